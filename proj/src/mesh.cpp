#include "qtp/mesh.hpp"

#include "qtp/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <utility>

namespace qtp {

double distance(const Point& x, const Point& y) {
    return std::hypot(x[0] - y[0], x[1] - y[1]);
}

double norm(const Point& v) {
    return std::hypot(v[0], v[1]);
}

std::string to_string(DomainKind kind) {
    switch (kind) {
        case DomainKind::Interval: return "interval";
        case DomainKind::UnitDisc: return "unit-disc";
        case DomainKind::UnitSquare: return "unit-square";
    }
    return "unknown";
}

DomainKind domain_kind_from_string(const std::string& name) {
    if (name == "interval") return DomainKind::Interval;
    if (name == "unit-disc") return DomainKind::UnitDisc;
    if (name == "unit-square") return DomainKind::UnitSquare;
    throw ValidationError("unknown domain kind '" + name + "'");
}

Point Mesh::barycenter(std::size_t e) const {
    const auto& el = elements[e];
    const int nv = vertices_per_element();
    Point c{0.0, 0.0};
    for (int i = 0; i < nv; ++i) {
        c[0] += nodes[el[i]][0];
        c[1] += nodes[el[i]][1];
    }
    c[0] /= nv;
    c[1] /= nv;
    return c;
}

Point Mesh::point_at(std::size_t e, const Barycentric& lambda) const {
    const auto& el = elements[e];
    Point x{0.0, 0.0};
    for (int i = 0; i < vertices_per_element(); ++i) {
        x[0] += lambda[i] * nodes[el[i]][0];
        x[1] += lambda[i] * nodes[el[i]][1];
    }
    return x;
}

double Mesh::domain_diameter() const {
    switch (kind) {
        case DomainKind::Interval: return 2.0;
        case DomainKind::UnitDisc: return 2.0;
        case DomainKind::UnitSquare: return std::sqrt(2.0);
    }
    return 2.0;
}

void Mesh::finalize(bool detect_boundary) {
    const std::size_t ne = elements.size();
    measures.assign(ne, 0.0);
    basis_gradients.assign(ne, {});
    h_mesh = 0.0;

    for (std::size_t e = 0; e < ne; ++e) {
        const auto& el = elements[e];
        if (dim == 1) {
            const double x0 = nodes[el[0]][0];
            const double x1 = nodes[el[1]][0];
            const double len = x1 - x0;
            if (!(std::abs(len) > 0.0)) {
                throw MeshError("degenerate element " + std::to_string(e));
            }
            measures[e] = std::abs(len);
            basis_gradients[e] = {Point{-1.0 / len, 0.0}, Point{1.0 / len, 0.0}, Point{0.0, 0.0}};
            h_mesh = std::max(h_mesh, std::abs(len));
        } else {
            const Point& p0 = nodes[el[0]];
            const Point& p1 = nodes[el[1]];
            const Point& p2 = nodes[el[2]];
            const double area2 =
                (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
            if (!(area2 > 0.0)) {
                throw MeshError("degenerate or inverted element " + std::to_string(e));
            }
            measures[e] = 0.5 * area2;
            basis_gradients[e] = {
                Point{(p1[1] - p2[1]) / area2, (p2[0] - p1[0]) / area2},
                Point{(p2[1] - p0[1]) / area2, (p0[0] - p2[0]) / area2},
                Point{(p0[1] - p1[1]) / area2, (p1[0] - p0[0]) / area2},
            };
            h_mesh = std::max({h_mesh, distance(p0, p1), distance(p1, p2), distance(p2, p0)});
        }
    }

    if (!detect_boundary) {
        is_boundary.assign(nodes.size(), 0);
        for (int b : boundary_nodes) is_boundary[b] = 1;
        return;
    }

    is_boundary.assign(nodes.size(), 0);
    if (dim == 1) {
        std::vector<int> count(nodes.size(), 0);
        for (const auto& el : elements) {
            ++count[el[0]];
            ++count[el[1]];
        }
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (count[i] == 1) is_boundary[i] = 1;
        }
    } else {
        std::map<std::pair<int, int>, int> edge_count;
        for (const auto& el : elements) {
            for (int k = 0; k < 3; ++k) {
                const int a = el[k];
                const int b = el[(k + 1) % 3];
                ++edge_count[{std::min(a, b), std::max(a, b)}];
            }
        }
        for (const auto& [edge, count] : edge_count) {
            if (count == 1) {
                is_boundary[edge.first] = 1;
                is_boundary[edge.second] = 1;
            }
        }
    }
    boundary_nodes.clear();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (is_boundary[i]) boundary_nodes.push_back(static_cast<int>(i));
    }
}

namespace {

Mesh make_interval(int n) {
    Mesh m;
    m.dim = 1;
    m.kind = DomainKind::Interval;
    m.nodes.reserve(n + 1);
    for (int i = 0; i <= n; ++i) {
        m.nodes.push_back({-1.0 + 2.0 * i / n, 0.0});
    }
    for (int i = 0; i < n; ++i) {
        m.elements.push_back({i, i + 1, -1});
    }
    return m;
}

Mesh make_square(int n) {
    Mesh m;
    m.dim = 2;
    m.kind = DomainKind::UnitSquare;
    const auto id = [n](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            m.nodes.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
        }
    }
    // Alternating diagonals give a criss-cross pattern with mirror-symmetric cells.
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            if ((i + j) % 2 == 0) {
                m.elements.push_back({a, b, c});
                m.elements.push_back({a, c, d});
            } else {
                m.elements.push_back({a, b, d});
                m.elements.push_back({b, c, d});
            }
        }
    }
    return m;
}

void push_ccw(Mesh& m, int a, int b, int c) {
    const Point& p0 = m.nodes[a];
    const Point& p1 = m.nodes[b];
    const Point& p2 = m.nodes[c];
    const double area2 = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    if (area2 > 0.0) {
        m.elements.push_back({a, b, c});
    } else {
        m.elements.push_back({a, c, b});
    }
}

Mesh make_disc(int n) {
    struct Ring {
        double radius;
        int count;
    };
    std::vector<Ring> rings;
    for (int k = 1; k <= n; ++k) {
        rings.push_back({static_cast<double>(k) / n, 6 * k});
    }
    // Snap the nearest uniform ring onto each diagnostic radius; insert a ring when that one is
    // the boundary or already pinned.
    std::vector<char> pinned(rings.size(), 0);
    pinned.back() = 1;
    for (double r : kDiscDiagnosticRadii) {
        const auto k = static_cast<std::size_t>(std::clamp(std::lround(r * n), 1L, static_cast<long>(n))) - 1;
        if (std::abs(rings[k].radius - r) < 1e-12) {
            pinned[k] = 1;
        } else if (!pinned[k]) {
            rings[k].radius = r;
            pinned[k] = 1;
        } else {
            rings.push_back({r, std::max(6, static_cast<int>(std::lround(6.0 * r * n)))});
        }
    }
    std::sort(rings.begin(), rings.end(),
              [](const Ring& a, const Ring& b) { return a.radius < b.radius; });

    Mesh m;
    m.dim = 2;
    m.kind = DomainKind::UnitDisc;
    m.nodes.push_back({0.0, 0.0});

    std::vector<int> ring_start;
    for (const Ring& ring : rings) {
        ring_start.push_back(static_cast<int>(m.nodes.size()));
        for (int j = 0; j < ring.count; ++j) {
            const double theta = 2.0 * std::numbers::pi * j / ring.count;
            if (ring.radius == 1.0) {
                m.nodes.push_back({std::cos(theta), std::sin(theta)});
            } else {
                m.nodes.push_back({ring.radius * std::cos(theta), ring.radius * std::sin(theta)});
            }
        }
    }

    // Center fan.
    for (int j = 0; j < rings[0].count; ++j) {
        push_ccw(m, 0, ring_start[0] + j, ring_start[0] + (j + 1) % rings[0].count);
    }
    // Zip consecutive rings together by advancing along whichever ring has the next angle.
    for (std::size_t k = 1; k < rings.size(); ++k) {
        const int mi = rings[k - 1].count;
        const int mo = rings[k].count;
        const int si = ring_start[k - 1];
        const int so = ring_start[k];
        int i = 0, o = 0;
        while (i < mi || o < mo) {
            const double next_inner = static_cast<double>(i + 1) / mi;
            const double next_outer = static_cast<double>(o + 1) / mo;
            const int vi = si + i % mi;
            const int vo = so + o % mo;
            if (i < mi && (o == mo || next_inner <= next_outer)) {
                push_ccw(m, vi, vo, si + (i + 1) % mi);
                ++i;
            } else {
                push_ccw(m, vi, vo, so + (o + 1) % mo);
                ++o;
            }
        }
    }
    return m;
}

}  // namespace

Mesh build_mesh(const DomainDescriptor& descriptor) {
    const int n = descriptor.resolution;
    // Element counts across the domain diameter: n, 2n (square diagonal), 2n (disc).
    const int across = descriptor.kind == DomainKind::Interval ? n : 2 * n;
    if (n <= 0 || across < 4) {
        throw InvalidParameter("resolution too coarse: need at least 4 elements across, got " +
                               std::to_string(across));
    }
    Mesh m;
    switch (descriptor.kind) {
        case DomainKind::Interval: m = make_interval(n); break;
        case DomainKind::UnitSquare: m = make_square(n); break;
        case DomainKind::UnitDisc: m = make_disc(n); break;
    }
    m.finalize();
    return m;
}

SubMesh extract_ball_submesh(const Mesh& mesh, const Point& center, double radius) {
    const double tol = 1e-12 * std::max(1.0, radius);
    std::vector<int> new_index(mesh.node_count(), -1);
    SubMesh out;
    auto sub = std::make_shared<Mesh>();
    sub->dim = mesh.dim;
    sub->kind = mesh.kind;
    const int nv = mesh.vertices_per_element();
    for (const auto& el : mesh.elements) {
        bool inside = true;
        for (int i = 0; i < nv; ++i) {
            if (distance(mesh.nodes[el[i]], center) > radius + tol) {
                inside = false;
                break;
            }
        }
        if (!inside) continue;
        std::array<int, 3> mapped{-1, -1, -1};
        for (int i = 0; i < nv; ++i) {
            int& idx = new_index[el[i]];
            if (idx < 0) {
                idx = static_cast<int>(sub->nodes.size());
                sub->nodes.push_back(mesh.nodes[el[i]]);
                out.node_map.push_back(el[i]);
            }
            mapped[i] = idx;
        }
        sub->elements.push_back(mapped);
    }
    if (sub->elements.empty()) {
        throw MeshError("ball contains no complete element");
    }
    sub->finalize();
    out.mesh = std::move(sub);
    return out;
}

const std::vector<QuadraturePoint>& quadrature_rule(int dim) {
    static const std::vector<QuadraturePoint> gauss2 = [] {
        const double s = 0.5 / std::sqrt(3.0);
        return std::vector<QuadraturePoint>{
            {{0.5 + s, 0.5 - s, 0.0}, 0.5},
            {{0.5 - s, 0.5 + s, 0.0}, 0.5},
        };
    }();
    static const std::vector<QuadraturePoint> tri3{
        {{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0}, 1.0 / 3.0},
        {{1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}, 1.0 / 3.0},
        {{1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}, 1.0 / 3.0},
    };
    return dim == 1 ? gauss2 : tri3;
}

PointLocator::PointLocator(std::shared_ptr<const Mesh> mesh) : mesh_(std::move(mesh)) {
    const Mesh& m = *mesh_;
    Point lo{1e300, 1e300}, hi{-1e300, -1e300};
    for (const Point& p : m.nodes) {
        lo[0] = std::min(lo[0], p[0]);
        lo[1] = std::min(lo[1], p[1]);
        hi[0] = std::max(hi[0], p[0]);
        hi[1] = std::max(hi[1], p[1]);
    }
    const int side = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(m.element_count()))));
    nx_ = side;
    ny_ = m.dim == 1 ? 1 : side;
    lo_ = lo;
    cell_size_ = {std::max((hi[0] - lo[0]) / nx_, 1e-300), std::max((hi[1] - lo[1]) / ny_, 1e-300)};
    buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});

    const int nv = m.vertices_per_element();
    for (std::size_t e = 0; e < m.element_count(); ++e) {
        Point blo{1e300, 1e300}, bhi{-1e300, -1e300};
        for (int i = 0; i < nv; ++i) {
            const Point& p = m.nodes[m.elements[e][i]];
            blo[0] = std::min(blo[0], p[0]);
            blo[1] = std::min(blo[1], p[1]);
            bhi[0] = std::max(bhi[0], p[0]);
            bhi[1] = std::max(bhi[1], p[1]);
        }
        const auto cell = [this](double v, int axis, int count) {
            const int c = static_cast<int>(std::floor((v - lo_[axis]) / cell_size_[axis]));
            return std::clamp(c, 0, count - 1);
        };
        const int i0 = cell(blo[0], 0, nx_), i1 = cell(bhi[0], 0, nx_);
        const int j0 = cell(blo[1], 1, ny_), j1 = cell(bhi[1], 1, ny_);
        for (int j = j0; j <= j1; ++j) {
            for (int i = i0; i <= i1; ++i) {
                buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(static_cast<int>(e));
            }
        }
    }
}

std::optional<PointLocator::Location> PointLocator::test_element(int e, const Point& x,
                                                                 double tol) const {
    const Mesh& m = *mesh_;
    const auto& el = m.elements[e];
    Barycentric lambda{0.0, 0.0, 0.0};
    if (m.dim == 1) {
        const double x0 = m.nodes[el[0]][0];
        const double x1 = m.nodes[el[1]][0];
        lambda[1] = (x[0] - x0) / (x1 - x0);
        lambda[0] = 1.0 - lambda[1];
    } else {
        const auto& g = m.basis_gradients[e];
        const Point& p1 = m.nodes[el[1]];
        const Point& p2 = m.nodes[el[2]];
        const Point& p0 = m.nodes[el[0]];
        lambda[0] = g[0][0] * (x[0] - p1[0]) + g[0][1] * (x[1] - p1[1]);
        lambda[1] = g[1][0] * (x[0] - p2[0]) + g[1][1] * (x[1] - p2[1]);
        lambda[2] = g[2][0] * (x[0] - p0[0]) + g[2][1] * (x[1] - p0[1]);
    }
    for (int i = 0; i < m.vertices_per_element(); ++i) {
        if (lambda[i] < -tol) return std::nullopt;
    }
    return Location{e, lambda};
}

std::optional<PointLocator::Location> PointLocator::locate(const Point& x) const {
    const int i = static_cast<int>(std::floor((x[0] - lo_[0]) / cell_size_[0]));
    const int j = mesh_->dim == 1 ? 0 : static_cast<int>(std::floor((x[1] - lo_[1]) / cell_size_[1]));
    // Points on the far edge of the bounding box fall into the last bucket.
    const int ic = std::clamp(i, 0, nx_ - 1);
    const int jc = std::clamp(j, 0, ny_ - 1);
    if (std::abs(ic - i) > 1 || std::abs(jc - j) > 1) return std::nullopt;
    for (int e : buckets_[static_cast<std::size_t>(jc) * nx_ + ic]) {
        if (auto loc = test_element(e, x, 1e-10)) return loc;
    }
    return std::nullopt;
}

}  // namespace qtp
