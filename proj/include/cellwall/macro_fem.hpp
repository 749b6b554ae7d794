#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "cellwall/constraints.hpp"
#include "cellwall/mesh.hpp"
#include "cellwall/sparse.hpp"
#include "cellwall/tensor4.hpp"

namespace cellwall::macro {

using fem::Vector;
using HexStrainOperator = Eigen::Matrix<double, 6, 24>;

/// Trilinear shape functions of the reference cell [-1,1]^3 (node order as
/// in MacroMesh) evaluated at a local point.
std::array<double, 8> hex_shape(const Point3& xi);

/// Engineering strain operator at local point xi of a box element with
/// edge lengths h; displacement dofs interleaved per node.
HexStrainOperator hex_strain_operator(const Point3& xi, const std::array<double, 3>& h);

/// Physical gradients of the 8 shape functions at xi.
std::array<std::array<double, 3>, 8> hex_gradients(const Point3& xi, const std::array<double, 3>& h);

/// The 2x2x2 Gauss rule on [-1,1]^3 (points and unit weights summing to 8).
const std::array<Point3, 8>& gauss_points();

/// Stiffness of one element for a constant tensor, 2x2x2 Gauss.
Eigen::Matrix<double, 24, 24> hex_stiffness(const Tensor4& c, const std::array<double, 3>& h);

/// Elasticity of the macro box under normal tractions with the constrained
/// space W: x3-periodic, zero mean displacement, zero mean rotation about
/// the x3 axis. The kernel (three translations and the x3 rotation) is
/// removed by the constraint functionals; unbalanced loads are absorbed by
/// their multipliers.
class ElasticitySolver {
public:
    explicit ElasticitySolver(const MacroMesh& mesh, double tolerance = 1e-12);

    /// Load vector for traction p_inner * e1 on the inner face (-p_inner nu
    /// with nu = -e1), traction_exterior * nu on the exterior face and
    /// traction_upper * nu on the upper faces.
    Vector traction_load(double p_inner, double traction_exterior, double traction_upper) const;

    struct Result {
        Vector u;
        Vector multipliers;
        int iterations = 0;
        double residual = 0.0;
    };

    /// Throws DomainError when an element tensor is not strongly elliptic
    /// and SolverError when CG fails.
    Result solve(const std::vector<Tensor4>& element_tensors, const Vector& load,
                 const Vector* initial = nullptr) const;

    /// W constraint values: (int u1, int u2, int u3, int (d2 u1 - d1 u2)).
    Vector constraint_values(const Vector& u) const { return map_.functional_values(u); }
    const fem::ConstraintMap& constraints() const { return map_; }
    const MacroMesh& mesh() const { return mesh_; }

private:
    const MacroMesh& mesh_;
    fem::ConstraintMap map_;
    double tolerance_;
    std::array<Eigen::Matrix<double, 24, 24>, 21> basis_;  // element stiffness per Voigt pair
};

/// Strain at local point xi of element e.
Mat3 element_strain(const MacroMesh& mesh, const Vector& u, std::size_t e, const Point3& xi);

/// Nodal strains averaged over the elements sharing a node (vertex values
/// of each element's trilinear field).
std::vector<Mat3> nodal_strains(const MacroMesh& mesh, const Vector& u);

/// sqrt(int e(u) : e(u) dx) with 2x2x2 Gauss.
double strain_norm(const MacroMesh& mesh, const Vector& u);

/// Lumped (vertex-rule) mass: volume / 8 per element corner.
Vector lumped_mass(const MacroMesh& mesh);

/// Lumped boundary mass of the faces with the given tag: area / 4 per face
/// corner.
Vector boundary_mass(const MacroMesh& mesh, BoundaryTag tag);

/// Stiffness of int D grad u . grad v. Diagonal entries of D use the
/// vertex rule (a seven-point M-matrix stencil on the box grid); any
/// off-diagonal entries use 2x2x2 Gauss.
fem::SparseMatrix assemble_diffusion(const MacroMesh& mesh, const Eigen::Matrix3d& d);

/// Periodic (x3) identification of nodes for scalar fields.
fem::ConstraintMap scalar_periodic_map(const MacroMesh& mesh);

}  // namespace cellwall::macro
