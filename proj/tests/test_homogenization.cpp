#include <doctest.h>

#include "cellwall/homogenization.hpp"
#include "cellwall/materials.hpp"
#include "cellwall/validation.hpp"
#include "support.hpp"

using namespace cellwall;
using testing::rel;

namespace {

fem::ByRegion<Tensor4> reference_constituents(double young = 10.0) {
    return {materials::isotropic_tensor(young, 0.3),
            materials::transversely_isotropic_tensor(materials::reference_fibril_constants())};
}

void require_all_pass(const std::vector<validation::CheckResult>& checks) {
    for (const auto& c : checks) {
        INFO(c.name << " value=" << c.value << " tol=" << c.tolerance << " " << c.detail);
        CHECK(c.passed);
    }
}

}  // namespace

TEST_SUITE("homogenization") {

TEST_CASE("scalar correctors: axial entry, in-plane isotropy and strict reduction") {
    require_all_pass(validation::diffusion_checks(1.0 / 16.0));
    require_all_pass(validation::diffusion_checks(1.0 / 32.0));
}

TEST_CASE("scalar correctors of a homogeneous cell vanish") {
    const auto mesh = build_unit_cell_mesh(0.0, 1.0 / 8.0);
    Eigen::Matrix3d d;
    d << 2.0, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 1.0;
    const auto set = homog::solve_scalar_correctors(mesh, d);
    for (const auto& v : set.v) CHECK(v.cwiseAbs().maxCoeff() < 1e-12);
    CHECK((homog::effective_diffusion(set) - d).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((homog::effective_diffusion(set, true) - d).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("normalization by the matrix fraction") {
    const auto mesh = build_unit_cell_mesh(0.25, 1.0 / 16.0);
    const auto set = homog::solve_scalar_correctors(mesh, Eigen::Matrix3d::Identity());
    const double theta = volume_fractions(mesh).matrix;
    const Eigen::Matrix3d a = homog::effective_diffusion(set, false);
    const Eigen::Matrix3d b = homog::effective_diffusion(set, true);
    CHECK((a / theta - b).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(b(2, 2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("equal constituents: zero correctors, unchanged tensor, identity localization") {
    require_all_pass(validation::homogeneous_checks(1.0 / 16.0, materials::isotropic_tensor(10.0, 0.3)));
    const Tensor4 ti = materials::transversely_isotropic_tensor(materials::reference_fibril_constants());
    require_all_pass(validation::homogeneous_checks(1.0 / 16.0, ti));
}

TEST_CASE("reference cell: tetragonal pattern and bounds") {
    const auto mesh = build_unit_cell_mesh(0.25, 1.0 / 32.0);
    const auto c = reference_constituents();
    const auto set = homog::solve_elastic_correctors(mesh, c);
    const Voigt6 raw = homog::effective_elasticity_matrix(mesh, set);
    CHECK((raw - raw.transpose()).cwiseAbs().maxCoeff() / raw.cwiseAbs().maxCoeff() < 1e-10);
    require_all_pass(validation::tetragonal_checks(raw));
    require_all_pass(validation::bounds_checks(mesh, {c[0], c[1]}, raw, "reference"));
}

TEST_CASE("localization integrates to the effective matrix and averages to identity") {
    const auto mesh = build_unit_cell_mesh(0.25, 1.0 / 16.0);
    const auto c = reference_constituents();
    const auto set = homog::solve_elastic_correctors(mesh, c);
    const auto loc = homog::localization_field(mesh, set, 10.0);
    CHECK(loc.mesh_id == mesh.id);
    CHECK(loc.reference_modulus == 10.0);
    const Voigt6 eff = homog::effective_elasticity_matrix(mesh, set);
    const Voigt6 via = homog::localization_stiffness(loc, c);
    CHECK((eff - via).cwiseAbs().maxCoeff() / eff.cwiseAbs().maxCoeff() < 1e-12);
    // Periodic correctors have zero mean strain.
    Voigt6 mean = Voigt6::Zero();
    for (std::size_t t = 0; t < loc.size(); ++t) mean += loc.weight[t] * loc.sample[t];
    CHECK((mean - Voigt6::Identity()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("stiff fibril agrees with closed forms for a rigid inclusion") {
    // Plane-strain bulk of a rigid cylinder in an isotropic matrix and the
    // antiplane shear of the same geometry; both are bounds that a fibril
    // 1500 times stiffer than the matrix should reach closely.
    const auto mesh = build_unit_cell_mesh(0.25, 1.0 / 32.0);
    const auto set = homog::solve_elastic_correctors(mesh, reference_constituents());
    const Voigt6 c = homog::effective_elasticity(mesh, set).voigt_matrix();
    const auto f = volume_fractions(mesh);
    const auto l = materials::lame_from_young(10.0, 0.3);
    const double k = l.lambda + l.mu;
    const double bulk = k + f.fibril * (k + l.mu) / f.matrix;
    const double antiplane = l.mu * (1.0 + f.fibril) / (1.0 - f.fibril);
    CHECK(rel(0.5 * (c(0, 0) + c(0, 1)), bulk) < 0.01);
    CHECK(rel(c(3, 3), antiplane) < 0.01);
    // Axial stiffness is close to the rule of mixtures.
    const double axial = f.matrix * (l.lambda + 2.0 * l.mu) +
                         f.fibril * materials::transversely_isotropic_tensor(materials::reference_fibril_constants()).voigt(2, 2);
    CHECK(rel(c(2, 2), axial) < 0.01);
}

TEST_CASE("random constituents satisfy the bounds") {
    require_all_pass(validation::random_bounds_suite(3, 99, 1.0 / 8.0));
}

TEST_CASE("threaded corrector solves are bit-identical") {
    const auto mesh = build_unit_cell_mesh(0.25, 1.0 / 16.0);
    CellSolveOptions one, four;
    four.threads = 4;
    const auto a = homog::solve_elastic_correctors(mesh, reference_constituents(), one);
    const auto b = homog::solve_elastic_correctors(mesh, reference_constituents(), four);
    for (int i = 0; i < 6; ++i) CHECK(a.w[i] == b.w[i]);
    CHECK(homog::effective_elasticity(mesh, a) == homog::effective_elasticity(mesh, b));
}

TEST_CASE("effective tensor is affine in the matrix modulus up to small non-affinity") {
    const auto mesh = build_unit_cell_mesh(0.25, 1.0 / 16.0);
    const auto fam = materials::build_affine_family(
        mesh, materials::transversely_isotropic_tensor(materials::reference_fibril_constants()), 0.3, 8.0, 12.0,
        materials::YoungModulusLaw{}, CellSolveOptions{});
    const auto direct = homog::effective_elasticity(mesh, homog::solve_elastic_correctors(mesh, reference_constituents()));
    const Voigt6 a = fam.at_modulus(10.0).voigt_matrix();
    const Voigt6 d = direct.voigt_matrix();
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            if (std::abs(d(i, j)) > 1e-6 * d(0, 0)) CHECK(rel(a(i, j), d(i, j)) < 0.01);
        }
    }
}

}  // TEST_SUITE
