#pragma once

#include <array>
#include <cstddef>

#include <Eigen/Dense>

#include "cellwall/mesh.hpp"
#include "cellwall/sparse.hpp"
#include "cellwall/tensor4.hpp"

namespace cellwall::fem {

/// Area and constant shape-function gradients of a P1 triangle.
struct P1Element {
    double area;
    std::array<std::array<double, 2>, 3> grad;
};

P1Element p1_element(const UnitCellMesh& mesh, std::size_t t);

/// Engineering strain (Voigt order) of a field with three components that
/// depends on (y1, y2) only: e33 = 0 and e_i3 = 0.5 d_i u3. Columns are
/// ordered (node0: u1 u2 u3, node1: ..., node2: ...).
using StrainOperator = Eigen::Matrix<double, 6, 9>;
StrainOperator strain_operator_2p5d(const P1Element& e);

/// Region-indexed coefficient: entry [Region::Matrix] and [Region::Fibril].
template <class T>
using ByRegion = std::array<T, 2>;

/// Stiffness matrix of  int D grad u . grad v  on the mesh using the in-plane
/// block of each region's 3x3 coefficient. Throws DomainError when a
/// coefficient is not symmetric positive definite.
SparseMatrix assemble_scalar_stiffness(const UnitCellMesh& mesh, const ByRegion<Eigen::Matrix3d>& coefficient);

/// Stiffness matrix (3 unknowns per vertex, interleaved) of
/// int E e(u) : e(v) with the strain of strain_operator_2p5d.
SparseMatrix assemble_vector_stiffness_2p5d(const UnitCellMesh& mesh, const ByRegion<Tensor4>& stiffness);

/// Lumped P1 mass (area / 3 per triangle corner), one weight per vertex.
Vector lumped_mass(const UnitCellMesh& mesh);

/// Throws DomainError unless the matrix is symmetric positive definite.
void require_spd(const Eigen::Matrix3d& d, const char* what);

}  // namespace cellwall::fem
