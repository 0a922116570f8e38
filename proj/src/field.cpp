#include "qtp/field.hpp"

#include "qtp/error.hpp"

#include <cmath>
#include <numbers>

namespace qtp {

DiscreteField::DiscreteField(std::shared_ptr<const Mesh> mesh, std::vector<double> values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
    if (!mesh_) throw ValidationError("field without mesh");
    if (values_.size() != mesh_->node_count()) {
        throw ValidationError("field length " + std::to_string(values_.size()) +
                              " differs from node count " + std::to_string(mesh_->node_count()));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw ValidationError("non-finite field value at node " + std::to_string(i));
        }
    }
}

DiscreteField DiscreteField::interpolate(std::shared_ptr<const Mesh> mesh,
                                         const std::function<double(const Point&)>& f) {
    std::vector<double> v(mesh->node_count());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(mesh->nodes[i]);
    return DiscreteField(std::move(mesh), std::move(v));
}

DiscreteField DiscreteField::constant(std::shared_ptr<const Mesh> mesh, double value) {
    const std::size_t n = mesh->node_count();
    return DiscreteField(std::move(mesh), std::vector<double>(n, value));
}

double DiscreteField::at(std::size_t e, const Barycentric& lambda) const {
    const auto& el = mesh_->elements[e];
    double s = 0.0;
    for (int i = 0; i < mesh_->vertices_per_element(); ++i) s += lambda[i] * values_[el[i]];
    return s;
}

ScalarField ScalarField::constant(double value) {
    return ScalarField(Repr{value}, "const");
}

ScalarField ScalarField::expression(const std::string& name) {
    Evaluator f;
    if (name == "zero") {
        f = [](const Point&) { return 0.0; };
    } else if (name == "one") {
        f = [](const Point&) { return 1.0; };
    } else if (name == "x1") {
        f = [](const Point& x) { return x[0]; };
    } else if (name == "x2") {
        f = [](const Point& x) { return x[1]; };
    } else if (name == "abs_x1") {
        f = [](const Point& x) { return std::abs(x[0]); };
    } else if (name == "r") {
        f = [](const Point& x) { return norm(x); };
    } else if (name == "bump") {
        f = [](const Point& x) { return 0.5 * (1.0 + std::cos(std::numbers::pi * norm(x))); };
    } else {
        throw ValidationError("unknown built-in field '" + name + "'");
    }
    return ScalarField(Repr{Closed{std::move(f)}}, name);
}

ScalarField ScalarField::function(Evaluator f, std::string label) {
    return ScalarField(Repr{Closed{std::move(f)}}, std::move(label));
}

ScalarField ScalarField::nodal(std::vector<double> values) {
    return ScalarField(Repr{std::move(values)}, "nodal");
}

std::optional<double> ScalarField::constant_value() const {
    if (const double* v = std::get_if<double>(&repr_)) return *v;
    return std::nullopt;
}

const std::vector<double>& ScalarField::nodal_values() const {
    if (const auto* v = std::get_if<std::vector<double>>(&repr_)) return *v;
    throw ValidationError("field is not a nodal table");
}

void ScalarField::check_nodal_size(const Mesh& mesh) const {
    const auto& v = std::get<std::vector<double>>(repr_);
    if (v.size() != mesh.node_count()) {
        throw ValidationError("nodal table of length " + std::to_string(v.size()) +
                              " on a mesh with " + std::to_string(mesh.node_count()) + " nodes");
    }
}

double ScalarField::at(const Mesh& mesh, std::size_t e, const Barycentric& lambda) const {
    if (const double* c = std::get_if<double>(&repr_)) return *c;
    if (const auto* closed = std::get_if<Closed>(&repr_)) return closed->f(mesh.point_at(e, lambda));
    check_nodal_size(mesh);
    const auto& v = std::get<std::vector<double>>(repr_);
    const auto& el = mesh.elements[e];
    double s = 0.0;
    for (int i = 0; i < mesh.vertices_per_element(); ++i) s += lambda[i] * v[el[i]];
    return s;
}

double ScalarField::at_node(const Mesh& mesh, std::size_t node) const {
    if (const double* c = std::get_if<double>(&repr_)) return *c;
    if (const auto* closed = std::get_if<Closed>(&repr_)) return closed->f(mesh.nodes[node]);
    check_nodal_size(mesh);
    return std::get<std::vector<double>>(repr_)[node];
}

double ScalarField::at_point(const Point& x) const {
    if (const double* c = std::get_if<double>(&repr_)) return *c;
    if (const auto* closed = std::get_if<Closed>(&repr_)) return closed->f(x);
    throw ValidationError("nodal table cannot be evaluated at a free point");
}

std::vector<double> ScalarField::sample_nodes(const Mesh& mesh) const {
    std::vector<double> v(mesh.node_count());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = at_node(mesh, i);
    return v;
}

}  // namespace qtp
