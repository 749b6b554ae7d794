#include <doctest.h>

#include <random>

#include "cellwall/chemistry.hpp"
#include "cellwall/error.hpp"
#include "cellwall/materials.hpp"

using namespace cellwall;
using namespace cellwall::chemistry;

namespace {

KineticsParams sample_kinetics() { return {1.2, 0.9, 1.1, 0.8, 0.3}; }

}  // namespace

TEST_SUITE("chemistry") {

TEST_CASE("rate primitives") {
    const auto k = sample_kinetics();
    CHECK(rate_eE(2.0, 0.5, k) == doctest::Approx(1.2));
    CHECK(rate_dc(3.0, 1.1, k) == doctest::Approx(0.9 * 1.1 * 3.0 / 2.2));
    CHECK(rate_dc(3.0, 0.0, k) == 0.0);
    CHECK(rate_b(2.5, k) == doctest::Approx(2.0));
}

TEST_CASE("reaction terms by hand") {
    const auto k = sample_kinetics();
    const SpeciesState s{1.0, 0.5, 0.4, 0.7, 0.6};
    const double N = 0.9;
    const double ree = 1.2 * 1.0 * 0.5;
    const double rdc = 0.9 * 0.7 * 0.4 / (1.1 + 0.7);
    const double rb = 0.8 * 0.6;
    const auto p = reaction_p(s.p1, s.p2, k);
    CHECK(p[0] == doctest::Approx(ree));
    CHECK(p[1] == 0.0);
    const auto n = reaction_n(s, N, k);
    CHECK(n[0] == doctest::Approx(ree - 2.0 * rdc - 0.3 * 0.4 + 2.0 * rb * N));
    CHECK(n[1] == doctest::Approx(-rdc + rb * N));
    CHECK(reaction_b_model_I(s, N, k) == doctest::Approx(rdc - rb * N));

    const auto w = well_mixed_rhs(s, N, k, Model::I, 1.0);
    CHECK(w.p1 == doctest::Approx(-p[0]));
    CHECK(w.p2 == 0.0);
    CHECK(w.n1 == doctest::Approx(n[0]));
    CHECK(w.n2 == doctest::Approx(n[1]));
    CHECK(w.b == doctest::Approx(reaction_b_model_I(s, N, k)));
    const auto w2 = well_mixed_rhs(s, N, k, Model::II, 0.8);
    CHECK(w2.b == doctest::Approx(0.8 * rdc - rb * N));
}

TEST_CASE("exchange invariants of the reaction system") {
    KineticsParams k = sample_kinetics();
    k.k_eE = 0.0;
    k.R_d = 0.0;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int i = 0; i < 50; ++i) {
        const SpeciesState s{u(rng), u(rng), u(rng), u(rng), u(rng)};
        const auto r = well_mixed_rhs(s, u(rng), k, Model::I, 1.0);
        CHECK(std::abs(r.n1 + 2.0 * r.b) < 1e-14);
        CHECK(std::abs(r.n2 + r.b) < 1e-14);
    }
}

TEST_CASE("nonnegative orthant is invariant") {
    const auto k = sample_kinetics();
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        std::array<double, 5> v{u(rng), u(rng), u(rng), u(rng), u(rng)};
        v[static_cast<std::size_t>(i % 5)] = 0.0;
        const SpeciesState s{v[0], v[1], v[2], v[3], v[4]};
        for (Model m : {Model::I, Model::II}) {
            const auto r = well_mixed_rhs(s, u(rng), k, m, 0.8);
            const double rv[5] = {r.p1, r.p2, r.n1, r.n2, r.b};
            CHECK(rv[i % 5] >= 0.0);
        }
    }
}

TEST_CASE("clamping") {
    CHECK(clamp_nonnegative(-1e-13, "x") == 0.0);
    CHECK(clamp_nonnegative(0.25, "x") == 0.25);
    CHECK_THROWS_AS(clamp_nonnegative(-1e-6, "x"), DomainError);
    CHECK_THROWS_AS(reaction_n({1.0, 1.0, -0.1, 1.0, 1.0}, 0.0, sample_kinetics()), DomainError);
}

TEST_CASE("modulation is the positive part of the trace") {
    const Tensor4 c = materials::isotropic_tensor(10.0, 0.3);
    const auto l = materials::lame_from_young(10.0, 0.3);
    Mat3 e = Mat3::Zero();
    e(0, 0) = 0.01;
    e(1, 1) = 0.02;
    e(0, 1) = e(1, 0) = 0.05;
    CHECK(modulation(e, c, Variant::Strain) == doctest::Approx(0.03));
    CHECK(modulation(e, c, Variant::Stress) == doctest::Approx((3.0 * l.lambda + 2.0 * l.mu) * 0.03));
    CHECK(modulation(-e, c, Variant::Strain) == 0.0);
    CHECK(modulation(-e, c, Variant::Stress) == 0.0);
    const auto r = reaction_nb_model_II({1, 1, 0.4, 0.7, 0.6}, e, c, sample_kinetics(), Variant::Strain);
    CHECK(r.modulation == doctest::Approx(0.03));
    CHECK(r.n1 == doctest::Approx(2.0 * 0.8 * 0.6 * 0.03));
    CHECK(r.n2 == doctest::Approx(0.8 * 0.6 * 0.03));
    CHECK(r.b == doctest::Approx(rate_dc(0.4, 0.7, sample_kinetics()) - 0.8 * 0.6 * 0.03));
}

TEST_CASE("boundary flux coefficients reproduce the evaluated fluxes") {
    FluxParams f;
    f.beta_E = 0.3;
    f.zeta_E = 0.2;
    f.gamma_E = 0.1;
    f.beta_e = 0.5;
    f.zeta_e = 0.4;
    f.gamma_e = 0.15;
    f.gamma_d = 0.05;
    f.gamma_c1 = 0.6;
    f.gamma_c2 = 0.25;
    f.zeta_c1 = 0.07;
    f.zeta_c2 = 0.09;
    f.gamma_b = 0.11;
    const SpeciesState s{1.0, 0.5, 0.4, 0.7, 0.6};
    const double pe = 2.0, N = 0.8;
    const auto inner = boundary_fluxes(s, BoundarySide::Inner, pe, N, f, Model::I);
    CHECK(inner[0] == doctest::Approx(0.5 / (1.0 + 0.4 * pe)));
    CHECK(inner[1] == doctest::Approx(0.3 * pe - 0.2 * 0.5));
    CHECK(inner[2] == 0.0);
    CHECK(inner[3] == doctest::Approx(N * (0.6 - 0.25 * 0.7)));
    CHECK(inner[4] == 0.0);
    const auto ext = boundary_fluxes(s, BoundarySide::Exterior, pe, N, f, Model::I);
    CHECK(ext[0] == doctest::Approx(-0.15));
    CHECK(ext[1] == doctest::Approx(-0.1 * 0.5));
    CHECK(ext[2] == doctest::Approx(-0.05 * 0.4));
    CHECK(ext[3] == doctest::Approx(0.07 - 0.09 * 0.7));
    CHECK(ext[4] == 0.0);
    CHECK(boundary_fluxes(s, BoundarySide::Exterior, pe, N, f, Model::II)[4] == doctest::Approx(-0.11 * 0.6));
    for (auto side : {BoundarySide::Inner, BoundarySide::Exterior}) {
        const auto c = boundary_flux_coefficients(side, pe, N, f, Model::II);
        for (int i = 0; i < kNumSpecies; ++i) {
            CHECK(c.source[i] >= 0.0);
            CHECK(c.rate[i] >= 0.0);
        }
    }
}

TEST_CASE("stiffness bound dominates the loss rates") {
    const auto k = sample_kinetics();
    const SpeciesState s{1.0, 0.5, 0.4, 0.7, 0.6};
    const double lam = stiffness_bound(s, 0.9, k);
    CHECK(lam >= k.k_eE * s.p2);
    CHECK(lam >= k.k_b * 0.9);
    CHECK(lam >= k.R_d);
}

}  // TEST_SUITE
