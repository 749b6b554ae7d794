#include "cellwall/error.hpp"
#include "cellwall/homogenization.hpp"
#include "cellwall/materials.hpp"

namespace cellwall::materials {

AffineTensorFamily build_affine_family(const UnitCellMesh& mesh, const Tensor4& fibril, double matrix_poisson,
                                       double young_a, double young_b, YoungModulusLaw law,
                                       const CellSolveOptions& options) {
    if (!(young_a > 0.0) || !(young_b > 0.0)) throw DomainError("anchor moduli must be positive");
    if (young_a == young_b) throw DomainError("anchor moduli must be distinct");
    auto solve = [&](double young) {
        const fem::ByRegion<Tensor4> stiffness{isotropic_tensor(young, matrix_poisson), fibril};
        const auto set = homog::solve_elastic_correctors(mesh, stiffness, options);
        return homog::effective_elasticity(mesh, set);
    };
    return affine_family_from_anchors(young_a, solve(young_a), young_b, solve(young_b), law, mesh.id);
}

}  // namespace cellwall::materials
