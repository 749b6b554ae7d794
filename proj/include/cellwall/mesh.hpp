#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace cellwall {

enum class Region : std::uint8_t { Matrix = 0, Fibril = 1 };

using Point2 = std::array<double, 2>;
using Point3 = std::array<double, 3>;
using Triangle = std::array<int, 3>;

/// Conforming P1 triangulation of the periodicity cell (0,1)^2 with a
/// circular fibril of radius `radius` centred at (0.5, 0.5).
///
/// Vertices on the circle lie exactly on it; the vertex set and the
/// connectivity are invariant under the symmetry group of the square.
struct UnitCellMesh {
    std::vector<Point2> vertices;
    std::vector<Triangle> triangles;  // counter-clockwise
    std::vector<Region> regions;  // one per triangle
    std::vector<std::array<int, 2>> interface_edges;
    /// (slave, master) pairs: slave on y1 = 1 (resp. y2 = 1) identified with
    /// the master on y1 = 0 (resp. y2 = 0) at the same tangential coordinate.
    /// Corner (1,1) is paired with (0,0) and the remaining corners likewise.
    std::vector<std::array<int, 2>> periodic_pairs;
    double radius = 0.0;
    double mesh_size_h = 0.0;
    std::uint64_t id = 0;  ///< content hash; see mesh_fingerprint

    std::size_t num_vertices() const { return vertices.size(); }
    std::size_t num_triangles() const { return triangles.size(); }
    double triangle_area(std::size_t t) const;
    /// Master vertex of every vertex (itself when not a slave).
    std::vector<int> periodic_master() const;
};

/// Grading applied towards the interface: element sizes shrink by `factor`
/// per layer over `levels` layers on each side of the circle.
struct CellMeshGrading {
    double factor = 0.7;
    int levels = 3;
};

/// radius == 0 yields a homogeneous cell (every triangle Matrix).
/// Throws DomainError unless 0 <= radius < 0.5 and 0 < target_h <= 0.25.
UnitCellMesh build_unit_cell_mesh(double radius, double target_h, CellMeshGrading grading = {});

struct VolumeFractions {
    double matrix;
    double fibril;
};

VolumeFractions volume_fractions(const UnitCellMesh& mesh);

/// Stable 64-bit hash over vertex coordinates, connectivity and tags.
std::uint64_t mesh_fingerprint(const UnitCellMesh& mesh);

/// Checks every structural invariant; returns a description of each
/// violation (empty when the mesh is valid).
std::vector<std::string> check_unit_cell_mesh(const UnitCellMesh& mesh);

/// Triangles of one region with vertices renumbered in increasing original
/// order; periodic pairs and interface edges are carried over. `vertex_map`
/// receives the original index of each submesh vertex.
UnitCellMesh region_submesh(const UnitCellMesh& mesh, Region region, std::vector<int>* vertex_map = nullptr);

/// Plain-text export: a header line, then "v index y1 y2" records and
/// "t index a b c region" records.
void write_unit_cell_mesh(const UnitCellMesh& mesh, std::ostream& out);

enum class BoundaryTag : std::uint8_t { Interior = 0, Inner, Exterior, Upper, PeriodicX3 };

/// Quadrilateral boundary face of the macro box.
struct BoundaryFace {
    std::array<int, 4> nodes;  // counter-clockwise seen from outside
    BoundaryTag tag;
    std::array<double, 3> normal;  // outward unit normal
    double area;
};

/// Structured hexahedral mesh of (0,a1) x (0,a2) x (0,a3), periodic in x3.
///
/// Node (i,j,k) has index i + (n1+1)*(j + (n2+1)*k). Element (i,j,k) has
/// index i + n1*(j + n2*k) and its nodes are ordered as the trilinear
/// reference cell (-1,-1,-1), (1,-1,-1), (1,1,-1), (-1,1,-1), then the same
/// four at +1 in the third coordinate.
struct MacroMesh {
    std::array<double, 3> extents{};
    std::array<int, 3> cells{};
    std::vector<Point3> nodes;
    std::vector<std::array<int, 8>> hexes;
    std::vector<BoundaryFace> faces;
    /// (slave on x3 = a3, master on x3 = 0)
    std::vector<std::array<int, 2>> periodic_pairs;

    std::size_t num_nodes() const { return nodes.size(); }
    std::size_t num_elements() const { return hexes.size(); }
    int node_index(int i, int j, int k) const {
        return i + (cells[0] + 1) * (j + (cells[1] + 1) * k);
    }
    std::array<double, 3> spacing() const {
        return {extents[0] / cells[0], extents[1] / cells[1], extents[2] / cells[2]};
    }
    std::vector<int> periodic_master() const;
    std::size_t count_faces(BoundaryTag tag) const;
};

/// Throws DomainError for non-positive extents or cell counts.
MacroMesh build_macro_mesh(std::array<double, 3> extents, std::array<int, 3> cells);

}  // namespace cellwall
