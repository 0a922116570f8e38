#pragma once

#include "qtp/mesh.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace qtp {

/// Nodal values of a P1 function over a mesh.
class DiscreteField {
public:
    DiscreteField() = default;
    /// Throws ValidationError when the length differs from the node count or a value is not finite.
    DiscreteField(std::shared_ptr<const Mesh> mesh, std::vector<double> values);

    /// Nodal interpolant of `f`.
    static DiscreteField interpolate(std::shared_ptr<const Mesh> mesh,
                                     const std::function<double(const Point&)>& f);
    static DiscreteField constant(std::shared_ptr<const Mesh> mesh, double value);

    const Mesh& mesh() const { return *mesh_; }
    const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
    std::span<const double> values() const { return values_; }
    std::vector<double>& mutable_values() { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    /// Value at barycentric coordinates of element e.
    double at(std::size_t e, const Barycentric& lambda) const;

private:
    std::shared_ptr<const Mesh> mesh_;
    std::vector<double> values_;
};

/// Coefficient, source or boundary data.
///
/// Three representations: a constant, a named or user-supplied closed-form evaluator, and a
/// nodal table interpolated piecewise-linearly on the mesh it is evaluated on.
class ScalarField {
public:
    using Evaluator = std::function<double(const Point&)>;

    ScalarField() : ScalarField(constant(0.0)) {}

    static ScalarField constant(double value);
    /// Built-in closed forms: "zero", "one", "x1", "x2", "r" (distance to origin),
    /// "bump" ((1 + cos(pi r)) / 2), "abs_x1".
    static ScalarField expression(const std::string& name);
    static ScalarField function(Evaluator f, std::string label = "callback");
    static ScalarField nodal(std::vector<double> values);

    bool is_constant() const { return std::holds_alternative<double>(repr_); }
    bool is_nodal() const { return std::holds_alternative<std::vector<double>>(repr_); }
    std::optional<double> constant_value() const;
    const std::string& label() const { return label_; }
    const std::vector<double>& nodal_values() const;

    /// Value at a point given by element and barycentric coordinates.
    double at(const Mesh& mesh, std::size_t e, const Barycentric& lambda) const;
    double at_node(const Mesh& mesh, std::size_t node) const;
    /// Pointwise evaluation; nodal tables are not evaluable without a mesh and throw.
    double at_point(const Point& x) const;

    /// Samples the field at every node of `mesh`.
    std::vector<double> sample_nodes(const Mesh& mesh) const;

private:
    struct Closed {
        Evaluator f;
    };
    using Repr = std::variant<double, Closed, std::vector<double>>;

    ScalarField(Repr repr, std::string label) : repr_(std::move(repr)), label_(std::move(label)) {}

    void check_nodal_size(const Mesh& mesh) const;

    Repr repr_;
    std::string label_;
};

}  // namespace qtp
