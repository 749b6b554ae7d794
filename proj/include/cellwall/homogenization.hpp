#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "cellwall/assembly.hpp"
#include "cellwall/mesh.hpp"
#include "cellwall/sparse.hpp"
#include "cellwall/tensor4.hpp"

namespace cellwall {

struct CellSolveOptions {
    fem::SolverOptions solver{1e-12, 0, fem::Preconditioner::Jacobi};
    int threads = 1;  ///< workers for the independent corrector problems
};

namespace homog {

/// Scalar correctors v^j, j = 1..3, on the matrix part of the cell.
struct ScalarCorrectorSet {
    UnitCellMesh submesh;  ///< matrix triangles only
    std::vector<int> vertex_map;  ///< submesh vertex -> cell mesh vertex
    Eigen::Matrix3d coefficient;
    std::array<fem::Vector, 3> v;
    std::array<int, 3> iterations{};
};

/// Solves div(D grad v^j) = 0 in the matrix with the conormal condition
/// (D grad v^j + D e_j) . nu = 0 on the interface, periodic, zero mean.
ScalarCorrectorSet solve_scalar_correctors(const UnitCellMesh& mesh, const Eigen::Matrix3d& d,
                                           const CellSolveOptions& options = {});

/// D_ij = int_{Y_M} [D_ij + D_i1 d1 v^j + D_i2 d2 v^j], optionally divided by
/// the matrix volume fraction.
Eigen::Matrix3d effective_diffusion(const ScalarCorrectorSet& correctors, bool normalize_by_theta_m = false);

/// Elastic correctors w^I, I in Voigt order, each with three components per
/// vertex (interleaved), and their element strains.
struct ElasticCorrectorSet {
    std::uint64_t mesh_id = 0;
    fem::ByRegion<Tensor4> stiffness;
    std::array<fem::Vector, 6> w;
    /// strain[t].col(I): engineering strain of w^I on triangle t
    std::vector<Voigt6> strain;
    std::array<int, 6> iterations{};
};

/// Solves div(E (e(w^I) + e_I)) = 0 on the cell, periodic, zero mean, where
/// e_I is the unit engineering strain of Voigt slot I.
ElasticCorrectorSet solve_elastic_correctors(const UnitCellMesh& mesh, const fem::ByRegion<Tensor4>& stiffness,
                                             const CellSolveOptions& options = {});

/// Column I: int E (e_I + e(w^I)). Not symmetrized.
Voigt6 effective_elasticity_matrix(const UnitCellMesh& mesh, const ElasticCorrectorSet& correctors);

/// The effective tensor; throws Error when the computed matrix is not
/// symmetric to 1e-8 relative (a sign of an unconverged solve).
Tensor4 effective_elasticity(const UnitCellMesh& mesh, const ElasticCorrectorSet& correctors);

/// Strain localization per triangle: the local engineering strain is
/// sample[t] * E for the macroscopic engineering strain E.
struct LocalizationField {
    std::uint64_t mesh_id = 0;
    double reference_modulus = 0.0;  ///< matrix modulus of the solve (MPa)
    std::vector<Voigt6> sample;
    std::vector<double> weight;  ///< triangle areas
    std::vector<Region> region;
    double theta_m = 0.0;

    std::size_t size() const { return sample.size(); }
};

LocalizationField localization_field(const UnitCellMesh& mesh, const ElasticCorrectorSet& correctors,
                                     double reference_modulus = 0.0);

/// Integral of E(y) sample(y) over the cell; equals
/// effective_elasticity_matrix for the same correctors.
Voigt6 localization_stiffness(const LocalizationField& field, const fem::ByRegion<Tensor4>& stiffness);

/// Homogeneous degenerate case: identity samples on every triangle.
LocalizationField identity_localization(const UnitCellMesh& mesh);

}  // namespace homog
}  // namespace cellwall
