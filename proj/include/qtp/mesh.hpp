#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qtp {

/// Coordinates in the plane. One-dimensional meshes keep the second entry at zero.
using Point = std::array<double, 2>;

/// Barycentric coordinates of a point inside an element. Intervals use the first two entries.
using Barycentric = std::array<double, 3>;

double distance(const Point& x, const Point& y);
double norm(const Point& v);

enum class DomainKind { Interval, UnitDisc, UnitSquare };

std::string to_string(DomainKind kind);
DomainKind domain_kind_from_string(const std::string& name);

/// Domain shape plus an integer resolution.
///
/// The resolution counts elements across a reference length: elements of (-1, 1) for the
/// interval, cells per side for the unit square [0, 1]^2 and rings for the unit disc.
struct DomainDescriptor {
    DomainKind kind = DomainKind::Interval;
    int resolution = 64;
};

/// Radii that every disc mesh carries as exact ring radii: the decay and proximity balls plus the
/// energy-estimate radii 0.6 and 0.9.
inline constexpr std::array<double, 6> kDiscDiagnosticRadii{0.25, 0.5, 0.6, 0.625, 0.75, 0.9};

/// Conforming P1 simplicial mesh in one or two space dimensions.
struct Mesh {
    int dim = 1;
    DomainKind kind = DomainKind::Interval;
    std::vector<Point> nodes;
    /// Node indices per element; intervals use the first two entries and store -1 in the third.
    std::vector<std::array<int, 3>> elements;
    std::vector<int> boundary_nodes;
    std::vector<char> is_boundary;
    /// Largest element diameter.
    double h_mesh = 0.0;

    /// Per-element measure (length or area), filled by finalize().
    std::vector<double> measures;
    /// Gradients of the local barycentric basis functions, filled by finalize().
    std::vector<std::array<Point, 3>> basis_gradients;

    int vertices_per_element() const { return dim + 1; }
    std::size_t node_count() const { return nodes.size(); }
    std::size_t element_count() const { return elements.size(); }

    Point barycenter(std::size_t e) const;
    Point point_at(std::size_t e, const Barycentric& lambda) const;

    /// Diameter of the domain, used as the "no opposite phase" sentinel distance.
    double domain_diameter() const;

    /// Computes measures, basis gradients, boundary and h_mesh. Throws MeshError on
    /// degenerate elements. When `detect_boundary` is false the boundary set is kept.
    void finalize(bool detect_boundary = true);
};

Mesh build_mesh(const DomainDescriptor& descriptor);

/// A mesh holding only the elements of `mesh` whose vertices all lie in the closed ball.
/// `node_map[i]` is the index in the parent mesh of submesh node i.
struct SubMesh {
    std::shared_ptr<const Mesh> mesh;
    std::vector<int> node_map;
};

SubMesh extract_ball_submesh(const Mesh& mesh, const Point& center, double radius);

/// Quadrature point in barycentric form; weights are fractions of the element measure.
struct QuadraturePoint {
    Barycentric lambda;
    double weight;
};

/// Two-point Gauss per interval, three-point (degree 2) rule per triangle.
const std::vector<QuadraturePoint>& quadrature_rule(int dim);

/// Bucketed point location over a fixed mesh.
class PointLocator {
public:
    explicit PointLocator(std::shared_ptr<const Mesh> mesh);

    struct Location {
        int element;
        Barycentric lambda;
    };

    /// Element containing x (with a small tolerance), or nullopt outside the mesh.
    std::optional<Location> locate(const Point& x) const;

    const Mesh& mesh() const { return *mesh_; }

private:
    std::optional<Location> test_element(int e, const Point& x, double tol) const;

    std::shared_ptr<const Mesh> mesh_;
    Point lo_{};
    Point cell_size_{};
    int nx_ = 1;
    int ny_ = 1;
    std::vector<std::vector<int>> buckets_;
};

}  // namespace qtp
