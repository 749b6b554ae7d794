#pragma once

#include <cstdint>
#include <string>

#include "cellwall/tensor4.hpp"

namespace cellwall {

struct UnitCellMesh;
struct CellSolveOptions;

namespace materials {

struct LameParameters {
    double lambda;
    double mu;
};

LameParameters lame_from_young(double young, double poisson);

/// Isotropic stiffness 2*mu*e + lambda*tr(e)*I. Requires E > 0 and
/// -1 < nu < 0.5.
Tensor4 isotropic_tensor(double young, double poisson);
Tensor4 isotropic_from_lame(double lambda, double mu);

/// Engineering constants of a transversely isotropic solid whose symmetry
/// axis is y3 (the fibril direction).
struct TransverselyIsotropicConstants {
    double young_transverse;  ///< E_F, modulus in the plane normal to the axis
    double poisson_transverse;  ///< nu_F1, in-plane contraction for in-plane stress
    double modulus_ratio;  ///< n_F = E_F / E_axial
    double poisson_axial;  ///< nu_F2, in-plane contraction for axial stress
    double shear_axial;  ///< Z_F, shear modulus of planes containing the axis
};

/// The five fibril constants used for the reference cell computation.
TransverselyIsotropicConstants reference_fibril_constants();

/// Builds the compliance matrix from the engineering constants and inverts
/// it. Throws DomainError naming the smallest compliance eigenvalue when the
/// compliance is not positive definite.
Tensor4 transversely_isotropic_tensor(const TransverselyIsotropicConstants& c);

/// Compliance (engineering Voigt) of the constants above.
Voigt6 transversely_isotropic_compliance(const TransverselyIsotropicConstants& c);

/// Affine Young's modulus law E(b) = slope * b + intercept, b in uM.
struct YoungModulusLaw {
    double slope = 0.775;  // MPa / uM
    double intercept = 8.08;  // MPa

    /// Throws DomainError for negative b.
    double operator()(double b) const;
};

/// E_hom(E) = E * slope_tensor + offset_tensor, built from two cell solves.
struct AffineTensorFamily {
    Tensor4 slope;  ///< E_hom,1 (dimensionless multiplier of E)
    Tensor4 offset;  ///< E_hom,0 (MPa)
    YoungModulusLaw law;
    double anchor_a = 0.0;  ///< MPa
    double anchor_b = 0.0;  ///< MPa
    std::uint64_t mesh_id = 0;

    Tensor4 at_modulus(double young) const;
    /// Effective tensor at cross-link density b (uM) through the modulus law.
    Tensor4 evaluate(double b) const { return at_modulus(law(b)); }
};

/// Affine family from two precomputed anchor tensors. Throws DomainError if
/// the anchors coincide or are not positive.
AffineTensorFamily affine_family_from_anchors(double young_a, const Tensor4& hom_a,
                                              double young_b, const Tensor4& hom_b,
                                              YoungModulusLaw law = {},
                                              std::uint64_t mesh_id = 0);

/// Solves the elasticity cell problems for an isotropic matrix (E_a, nu) and
/// (E_b, nu) around the given fibril and returns the resulting family.
AffineTensorFamily build_affine_family(const UnitCellMesh& mesh, const Tensor4& fibril,
                                       double matrix_poisson, double young_a, double young_b,
                                       YoungModulusLaw law, const CellSolveOptions& options);

}  // namespace materials
}  // namespace cellwall
