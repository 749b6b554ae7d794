#include "cellwall/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "cellwall/error.hpp"

namespace cellwall {

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4.0;

struct Ring {
    std::vector<Point2> points;  // ordered by angle from t = 0 to t = s
};

double cross(const Point2& a, const Point2& b, const Point2& c) {
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

double dist(const Point2& a, const Point2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

// Cumulative layer positions 0 = p0 < p1 < ... < pm = total. The first
// `levels` layers grow geometrically from h*factor^levels towards h; the
// rest are uniform with spacing close to (and not above) h.
std::vector<double> layer_positions(double total, double h, const CellMeshGrading& g) {
    std::vector<double> thick;
    double acc = 0.0;
    for (int i = 0; i < g.levels && acc < total; ++i) {
        const double t = h * std::pow(g.factor, g.levels - i);
        thick.push_back(t);
        acc += t;
    }
    if (acc < total) {
        const double rest = total - acc;
        const int n = static_cast<int>(std::ceil(rest / h - 1e-9));
        for (int i = 0; i < n; ++i) thick.push_back(rest / n);
    } else {
        // The graded sequence alone overshoots: drop a short tail layer and
        // rescale so the last position lands on `total`.
        const double over = acc - total;
        if (thick.size() > 1 && over > 0.5 * thick.back()) {
            acc -= thick.back();
            thick.pop_back();
        }
        for (double& t : thick) t *= total / acc;
    }
    std::vector<double> pos{0.0};
    for (double t : thick) pos.push_back(pos.back() + t);
    pos.back() = total;
    return pos;
}

int intervals_for(double length, double spacing) {
    return std::max(1, static_cast<int>(std::ceil(length / spacing - 1e-9)));
}

// Arc ring of radius r over the octant, n intervals, endpoints exact.
Ring arc_ring(double r, int n) {
    Ring ring;
    for (int i = 0; i <= n; ++i) {
        if (i == 0) {
            ring.points.push_back({r, 0.0});
        } else if (i == n) {
            const double d = r * std::cos(kQuarterPi);
            ring.points.push_back({d, d});
        } else {
            const double th = kQuarterPi * i / n;
            ring.points.push_back({r * std::cos(th), r * std::sin(th)});
        }
    }
    return ring;
}

// Point on the outer transition ring at blend parameter xi in [0,1] between
// the circle of radius r0 (xi = 0) and the cell edge s = 0.5 (xi = 1).
Point2 outer_point(double r0, double xi, double tau) {
    if (xi == 1.0) return {0.5, 0.5 * tau};
    const double th = (1.0 - xi) * tau * kQuarterPi + xi * std::atan(tau);
    const double rho = r0 + xi * (0.5 / std::cos(th) - r0);
    if (tau == 0.0) return {rho, 0.0};
    if (tau == 1.0) {
        const double d = rho * std::cos(kQuarterPi);
        return {d, d};
    }
    return {rho * std::cos(th), rho * std::sin(th)};
}

double outer_ring_length(double r0, double xi) {
    double len = 0.0;
    Point2 prev = outer_point(r0, xi, 0.0);
    for (int i = 1; i <= 128; ++i) {
        const Point2 p = outer_point(r0, xi, i / 128.0);
        len += dist(prev, p);
        prev = p;
    }
    return len;
}

Ring outer_ring(double r0, double xi, int n) {
    Ring ring;
    for (int i = 0; i <= n; ++i) {
        const double tau = (i == n) ? 1.0 : static_cast<double>(i) / n;
        ring.points.push_back(outer_point(r0, xi, tau));
    }
    return ring;
}

struct OctantMesh {
    std::vector<Point2> pts;
    std::vector<Triangle> tris;
    std::vector<Region> regions;
    std::vector<std::array<int, 2>> interface_edges;
};

std::vector<int> append_ring(OctantMesh& m, const Ring& r) {
    std::vector<int> ids;
    for (const auto& p : r.points) {
        ids.push_back(static_cast<int>(m.pts.size()));
        m.pts.push_back(p);
    }
    return ids;
}

void add_oriented(OctantMesh& m, int a, int b, int c, Region reg) {
    const double area = cross(m.pts[a], m.pts[b], m.pts[c]);
    if (area == 0.0) throw Error("unit cell mesher produced a degenerate triangle");
    if (area > 0.0) {
        m.tris.push_back({a, b, c});
    } else {
        m.tris.push_back({a, c, b});
    }
    m.regions.push_back(reg);
}

// Triangulates the strip between two angularly ordered rings, picking the
// shorter diagonal at each step.
void stitch(OctantMesh& m, const std::vector<int>& inner, const std::vector<int>& outer, Region reg) {
    std::size_t i = 0, j = 0;
    const std::size_t ni = inner.size() - 1, nj = outer.size() - 1;
    while (i < ni || j < nj) {
        bool advance_inner;
        if (i == ni) {
            advance_inner = false;
        } else if (j == nj) {
            advance_inner = true;
        } else {
            advance_inner = dist(m.pts[inner[i + 1]], m.pts[outer[j]]) <
                            dist(m.pts[inner[i]], m.pts[outer[j + 1]]);
        }
        if (advance_inner) {
            add_oriented(m, inner[i], inner[i + 1], outer[j], reg);
            ++i;
        } else {
            add_oriented(m, inner[i], outer[j + 1], outer[j], reg);
            ++j;
        }
    }
}

OctantMesh mesh_octant(double radius, double h, const CellMeshGrading& grading) {
    const bool homogeneous = radius == 0.0;
    const double r0 = homogeneous ? 0.25 : radius;
    const CellMeshGrading g = homogeneous ? CellMeshGrading{1.0, 0} : grading;
    OctantMesh m;

    // Tangential spacing on the interface ring, limited so the chord
    // deviation from the circle stays below h^2.
    const double fine = h * std::pow(g.factor, g.levels);
    int n_arc = intervals_for(r0 * kQuarterPi, fine);
    while (r0 * (1.0 - std::cos(0.5 * kQuarterPi / n_arc)) > h * h) ++n_arc;

    // Inner rings, from the interface towards the centre.
    const std::vector<double> inner_pos = layer_positions(r0, h, g);
    std::vector<std::vector<int>> inner_rings;
    inner_rings.push_back(append_ring(m, arc_ring(r0, n_arc)));
    for (std::size_t k = 1; k + 1 < inner_pos.size(); ++k) {
        const double r = r0 - inner_pos[k];
        const double spacing = inner_pos[k + 1] - inner_pos[k];
        const double sp = std::max(spacing, inner_pos[k] - inner_pos[k - 1]);
        const int n = std::min(n_arc, intervals_for(r * kQuarterPi, 0.5 * (spacing + sp)));
        inner_rings.push_back(append_ring(m, arc_ring(r, n)));
    }
    const Region inside = homogeneous ? Region::Matrix : Region::Fibril;
    for (std::size_t k = 0; k + 1 < inner_rings.size(); ++k) {
        stitch(m, inner_rings[k + 1], inner_rings[k], inside);
    }
    const int centre = static_cast<int>(m.pts.size());
    m.pts.push_back({0.0, 0.0});
    const auto& last = inner_rings.back();
    for (std::size_t i = 0; i + 1 < last.size(); ++i) add_oriented(m, centre, last[i], last[i + 1], inside);

    if (!homogeneous) {
        const auto& arc = inner_rings.front();
        for (std::size_t i = 0; i + 1 < arc.size(); ++i) m.interface_edges.push_back({arc[i], arc[i + 1]});
    }

    // Outer rings between the circle and the cell edge, sized by the
    // longest ray (along the diagonal).
    const double longest = 0.5 / std::cos(kQuarterPi) - r0;
    const std::vector<double> outer_pos = layer_positions(longest, h, g);
    std::vector<int> prev = inner_rings.front();
    for (std::size_t k = 1; k < outer_pos.size(); ++k) {
        const double xi = (k + 1 == outer_pos.size()) ? 1.0 : outer_pos[k] / longest;
        const double spacing = outer_pos[k] - outer_pos[k - 1];
        const double next = (k + 1 < outer_pos.size()) ? outer_pos[k + 1] - outer_pos[k] : spacing;
        const int n = intervals_for(outer_ring_length(r0, xi), 0.5 * (spacing + next));
        auto ring = append_ring(m, outer_ring(r0, xi, n));
        stitch(m, prev, ring, Region::Matrix);
        prev = std::move(ring);
    }
    return m;
}

struct PointKey {
    double a, b;
    bool operator<(const PointKey& o) const { return a < o.a || (a == o.a && b < o.b); }
};

double clean_zero(double v) { return v == 0.0 ? 0.0 : v; }

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

double UnitCellMesh::triangle_area(std::size_t t) const {
    const auto& tri = triangles[t];
    return 0.5 * cross(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
}

std::vector<int> UnitCellMesh::periodic_master() const {
    std::vector<int> master(vertices.size());
    for (std::size_t i = 0; i < master.size(); ++i) master[i] = static_cast<int>(i);
    for (const auto& [slave, m] : periodic_pairs) master[slave] = m;
    return master;
}

UnitCellMesh build_unit_cell_mesh(double radius, double target_h, CellMeshGrading grading) {
    if (!(radius >= 0.0)) throw DomainError("radius must be >= 0");
    if (!(radius < 0.5)) throw DomainError("radius must be < 0.5");
    if (!(target_h > 0.0 && target_h <= 0.25)) throw DomainError("target_h must lie in (0, 0.25]");
    if (!(grading.factor > 0.0 && grading.factor <= 1.0) || grading.levels < 0) {
        throw DomainError("grading factor must lie in (0, 1] with non-negative levels");
    }

    const OctantMesh oct = mesh_octant(radius, target_h, grading);

    // The eight images of the octant under the symmetry group of the square.
    static constexpr int kImages[8][4] = {
        // s' = sa*(swap ? t : s), t' = sb*(swap ? s : t)
        {0, 1, 1, 0}, {1, 1, 1, 0}, {0, -1, 1, 0}, {1, -1, 1, 0},
        {0, 1, -1, 0}, {1, 1, -1, 0}, {0, -1, -1, 0}, {1, -1, -1, 0}};

    UnitCellMesh mesh;
    mesh.radius = radius;
    mesh.mesh_size_h = target_h;
    std::map<PointKey, int> index;
    auto vertex_id = [&](const Point2& p) {
        const PointKey key{clean_zero(p[0]), clean_zero(p[1])};
        auto [it, inserted] = index.emplace(key, static_cast<int>(index.size()));
        return it->second;
    };

    std::vector<Point2> local;
    for (const auto& img : kImages) {
        const bool swap = img[0] == 1;
        const double sa = img[1], sb = img[2];
        std::vector<int> ids(oct.pts.size());
        for (std::size_t v = 0; v < oct.pts.size(); ++v) {
            const auto& p = oct.pts[v];
            const Point2 q{sa * (swap ? p[1] : p[0]), sb * (swap ? p[0] : p[1])};
            ids[v] = vertex_id(q);
            if (static_cast<std::size_t>(ids[v]) == local.size()) local.push_back(q);
        }
        for (std::size_t t = 0; t < oct.tris.size(); ++t) {
            Triangle tri{ids[oct.tris[t][0]], ids[oct.tris[t][1]], ids[oct.tris[t][2]]};
            if (cross(local[tri[0]], local[tri[1]], local[tri[2]]) < 0.0) std::swap(tri[1], tri[2]);
            mesh.triangles.push_back(tri);
            mesh.regions.push_back(oct.regions[t]);
        }
        for (const auto& e : oct.interface_edges) mesh.interface_edges.push_back({ids[e[0]], ids[e[1]]});
    }

    mesh.vertices.resize(local.size());
    for (std::size_t v = 0; v < local.size(); ++v) {
        mesh.vertices[v] = {0.5 + local[v][0], 0.5 + local[v][1]};
    }

    // Periodic identification: map y = 1 onto y = 0 in each coordinate.
    std::map<PointKey, int> boundary;
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        const auto& y = mesh.vertices[v];
        if (y[0] == 0.0 || y[1] == 0.0) boundary.emplace(PointKey{y[0], y[1]}, static_cast<int>(v));
    }
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        const auto& y = mesh.vertices[v];
        if (y[0] != 1.0 && y[1] != 1.0) continue;
        const PointKey key{y[0] == 1.0 ? 0.0 : y[0], y[1] == 1.0 ? 0.0 : y[1]};
        const auto it = boundary.find(key);
        if (it == boundary.end()) throw Error("unit cell mesh lacks a periodic partner vertex");
        mesh.periodic_pairs.push_back({static_cast<int>(v), it->second});
    }
    // Corners (1,0) and (0,1) are slaves of (0,0) as well.
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        const auto& y = mesh.vertices[v];
        const bool corner = (y[0] == 0.0 && y[1] == 1.0) || (y[0] == 1.0 && y[1] == 0.0);
        if (!corner) continue;
        for (auto& pr : mesh.periodic_pairs) {
            if (pr[0] == static_cast<int>(v)) pr[1] = boundary.at(PointKey{0.0, 0.0});
        }
    }
    mesh.id = mesh_fingerprint(mesh);
    return mesh;
}

VolumeFractions volume_fractions(const UnitCellMesh& mesh) {
    double matrix = 0.0, total = 0.0;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const double a = mesh.triangle_area(t);
        total += a;
        if (mesh.regions[t] == Region::Matrix) matrix += a;
    }
    const double theta_m = matrix / total;
    return {theta_m, 1.0 - theta_m};
}

std::uint64_t mesh_fingerprint(const UnitCellMesh& mesh) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& v : mesh.vertices) h = fnv1a(h, v.data(), sizeof(double) * 2);
    for (const auto& t : mesh.triangles) h = fnv1a(h, t.data(), sizeof(int) * 3);
    for (auto r : mesh.regions) h = fnv1a(h, &r, sizeof(r));
    return h;
}

std::vector<std::string> check_unit_cell_mesh(const UnitCellMesh& mesh) {
    std::vector<std::string> issues;
    auto report = [&](const std::string& s) {
        if (issues.size() < 20) issues.push_back(s);
    };
    if (mesh.regions.size() != mesh.triangles.size()) report("region tag count mismatch");

    double total = 0.0, fibril = 0.0;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const double a = mesh.triangle_area(t);
        if (!(a > 0.0)) report("triangle " + std::to_string(t) + " has non-positive area");
        total += a;
        if (mesh.regions[t] == Region::Fibril) fibril += a;
        // Each triangle must lie on one side of the circle.
        if (mesh.radius > 0.0) {
            const auto& tri = mesh.triangles[t];
            double cx = 0.0, cy = 0.0;
            for (int k = 0; k < 3; ++k) {
                cx += mesh.vertices[tri[k]][0] / 3.0;
                cy += mesh.vertices[tri[k]][1] / 3.0;
            }
            const bool centroid_inside = std::hypot(cx - 0.5, cy - 0.5) < mesh.radius;
            if (centroid_inside != (mesh.regions[t] == Region::Fibril)) {
                report("triangle " + std::to_string(t) + " is tagged on the wrong side of the interface");
            }
            for (int k = 0; k < 3; ++k) {
                const double r = std::hypot(mesh.vertices[tri[k]][0] - 0.5, mesh.vertices[tri[k]][1] - 0.5);
                const bool outside = r > mesh.radius * (1.0 + 1e-12);
                const bool inside = r < mesh.radius * (1.0 - 1e-12);
                if ((mesh.regions[t] == Region::Fibril && outside) ||
                    (mesh.regions[t] == Region::Matrix && inside)) {
                    report("triangle " + std::to_string(t) + " straddles the interface");
                }
            }
        }
    }
    if (std::abs(total - 1.0) > 1e-10) report("triangle areas do not sum to 1");

    // Conformity: every interior edge shared by exactly two triangles,
    // boundary edges (on the cell edges) by exactly one.
    std::map<std::pair<int, int>, int> edges;
    for (const auto& tri : mesh.triangles) {
        for (int k = 0; k < 3; ++k) {
            const int a = tri[k], b = tri[(k + 1) % 3];
            edges[{std::min(a, b), std::max(a, b)}]++;
        }
    }
    for (const auto& [e, count] : edges) {
        const auto& pa = mesh.vertices[e.first];
        const auto& pb = mesh.vertices[e.second];
        const bool on_boundary = (pa[0] == pb[0] && (pa[0] == 0.0 || pa[0] == 1.0)) ||
                                 (pa[1] == pb[1] && (pa[1] == 0.0 || pa[1] == 1.0));
        if (count != (on_boundary ? 1 : 2)) {
            report("edge (" + std::to_string(e.first) + "," + std::to_string(e.second) +
                   ") is shared by " + std::to_string(count) + " triangles");
        }
    }

    // Periodic pairing.
    for (const auto& [slave, master] : mesh.periodic_pairs) {
        const auto& s = mesh.vertices[slave];
        const auto& m = mesh.vertices[master];
        const double ds0 = s[0] == 1.0 ? 0.0 : s[0];
        const double ds1 = s[1] == 1.0 ? 0.0 : s[1];
        if (std::abs(ds0 - m[0]) > 1e-12 || std::abs(ds1 - m[1]) > 1e-12) {
            report("periodic pair (" + std::to_string(slave) + "," + std::to_string(master) + ") mismatched");
        }
    }
    std::set<int> slaves;
    for (const auto& pr : mesh.periodic_pairs) slaves.insert(pr[0]);
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
        const auto& y = mesh.vertices[v];
        if ((y[0] == 1.0 || y[1] == 1.0) && !slaves.count(static_cast<int>(v))) {
            report("vertex " + std::to_string(v) + " on y = 1 has no periodic master");
        }
    }
    return issues;
}

UnitCellMesh region_submesh(const UnitCellMesh& mesh, Region region, std::vector<int>* vertex_map) {
    std::vector<int> local(mesh.num_vertices(), -1);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        if (mesh.regions[t] != region) continue;
        for (int v : mesh.triangles[t]) local[v] = 0;
    }
    UnitCellMesh sub;
    std::vector<int> map;
    for (std::size_t v = 0; v < local.size(); ++v) {
        if (local[v] < 0) continue;
        local[v] = static_cast<int>(map.size());
        map.push_back(static_cast<int>(v));
        sub.vertices.push_back(mesh.vertices[v]);
    }
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        if (mesh.regions[t] != region) continue;
        const auto& tri = mesh.triangles[t];
        sub.triangles.push_back({local[tri[0]], local[tri[1]], local[tri[2]]});
        sub.regions.push_back(region);
    }
    for (const auto& [a, b] : mesh.interface_edges) {
        if (local[a] >= 0 && local[b] >= 0) sub.interface_edges.push_back({local[a], local[b]});
    }
    for (const auto& [s, m] : mesh.periodic_pairs) {
        if (local[s] >= 0 && local[m] >= 0) sub.periodic_pairs.push_back({local[s], local[m]});
    }
    sub.radius = mesh.radius;
    sub.mesh_size_h = mesh.mesh_size_h;
    sub.id = mesh_fingerprint(sub);
    if (vertex_map) *vertex_map = std::move(map);
    return sub;
}

void write_unit_cell_mesh(const UnitCellMesh& mesh, std::ostream& out) {
    const auto old = out.precision(17);
    out << "# unit-cell mesh: " << mesh.num_vertices() << " vertices, " << mesh.num_triangles()
        << " triangles, radius " << mesh.radius << "\n";
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
        out << "v " << v << ' ' << mesh.vertices[v][0] << ' ' << mesh.vertices[v][1] << '\n';
    }
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        out << "t " << t << ' ' << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' '
            << (mesh.regions[t] == Region::Fibril ? "FIBRIL" : "MATRIX") << '\n';
    }
    out.precision(old);
}

// ---------------------------------------------------------------------------
// Macro box

std::vector<int> MacroMesh::periodic_master() const {
    std::vector<int> master(nodes.size());
    for (std::size_t i = 0; i < master.size(); ++i) master[i] = static_cast<int>(i);
    for (const auto& [slave, m] : periodic_pairs) master[slave] = m;
    return master;
}

std::size_t MacroMesh::count_faces(BoundaryTag tag) const {
    return static_cast<std::size_t>(
        std::count_if(faces.begin(), faces.end(), [&](const BoundaryFace& f) { return f.tag == tag; }));
}

MacroMesh build_macro_mesh(std::array<double, 3> extents, std::array<int, 3> cells) {
    for (int d = 0; d < 3; ++d) {
        if (!(extents[d] > 0.0)) throw DomainError("macro box extents must be positive");
        if (cells[d] < 1) throw DomainError("macro cell counts must be >= 1");
    }
    MacroMesh m;
    m.extents = extents;
    m.cells = cells;
    const auto [n1, n2, n3] = cells;
    for (int k = 0; k <= n3; ++k)
        for (int j = 0; j <= n2; ++j)
            for (int i = 0; i <= n1; ++i) {
                m.nodes.push_back({i == n1 ? extents[0] : extents[0] * i / n1,
                                   j == n2 ? extents[1] : extents[1] * j / n2,
                                   k == n3 ? extents[2] : extents[2] * k / n3});
            }
    for (int k = 0; k < n3; ++k)
        for (int j = 0; j < n2; ++j)
            for (int i = 0; i < n1; ++i) {
                m.hexes.push_back({m.node_index(i, j, k), m.node_index(i + 1, j, k),
                                   m.node_index(i + 1, j + 1, k), m.node_index(i, j + 1, k),
                                   m.node_index(i, j, k + 1), m.node_index(i + 1, j, k + 1),
                                   m.node_index(i + 1, j + 1, k + 1), m.node_index(i, j + 1, k + 1)});
            }
    const auto h = m.spacing();
    // x1 faces
    for (int k = 0; k < n3; ++k)
        for (int j = 0; j < n2; ++j) {
            m.faces.push_back({{m.node_index(0, j, k), m.node_index(0, j, k + 1), m.node_index(0, j + 1, k + 1),
                                m.node_index(0, j + 1, k)},
                               BoundaryTag::Inner, {-1.0, 0.0, 0.0}, h[1] * h[2]});
            m.faces.push_back({{m.node_index(n1, j, k), m.node_index(n1, j + 1, k),
                                m.node_index(n1, j + 1, k + 1), m.node_index(n1, j, k + 1)},
                               BoundaryTag::Exterior, {1.0, 0.0, 0.0}, h[1] * h[2]});
        }
    // x2 faces
    for (int k = 0; k < n3; ++k)
        for (int i = 0; i < n1; ++i) {
            m.faces.push_back({{m.node_index(i, 0, k), m.node_index(i + 1, 0, k), m.node_index(i + 1, 0, k + 1),
                                m.node_index(i, 0, k + 1)},
                               BoundaryTag::Upper, {0.0, -1.0, 0.0}, h[0] * h[2]});
            m.faces.push_back({{m.node_index(i, n2, k), m.node_index(i, n2, k + 1),
                                m.node_index(i + 1, n2, k + 1), m.node_index(i + 1, n2, k)},
                               BoundaryTag::Upper, {0.0, 1.0, 0.0}, h[0] * h[2]});
        }
    // x3 faces
    for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n1; ++i) {
            m.faces.push_back({{m.node_index(i, j, 0), m.node_index(i, j + 1, 0), m.node_index(i + 1, j + 1, 0),
                                m.node_index(i + 1, j, 0)},
                               BoundaryTag::PeriodicX3, {0.0, 0.0, -1.0}, h[0] * h[1]});
            m.faces.push_back({{m.node_index(i, j, n3), m.node_index(i + 1, j, n3),
                                m.node_index(i + 1, j + 1, n3), m.node_index(i, j + 1, n3)},
                               BoundaryTag::PeriodicX3, {0.0, 0.0, 1.0}, h[0] * h[1]});
        }
    for (int j = 0; j <= n2; ++j)
        for (int i = 0; i <= n1; ++i) m.periodic_pairs.push_back({m.node_index(i, j, n3), m.node_index(i, j, 0)});
    return m;
}

}  // namespace cellwall
