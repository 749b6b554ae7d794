#include <doctest.h>

#include <cmath>

#include "cellwall/error.hpp"
#include "cellwall/io.hpp"
#include "cellwall/macro_solver.hpp"
#include "cellwall/validation.hpp"
#include "support.hpp"

using namespace cellwall;
using namespace cellwall::macro;
using testing::isotropic_model;
using testing::rel;

namespace {

SolverSettings frozen_settings(chemistry::Model model, double signal, double dt) {
    SolverSettings s;
    s.model = model;
    s.kinetics = {1.2, 0.9, 1.1, 0.8, 0.3};
    s.frozen_signal = signal;
    s.loads = {0.2, 0.1, 0.1};
    s.policy.dt = dt;
    s.policy.dt_min = dt / 64.0;
    return s;
}

void run_to(const CoupledSolver& solver, MacroState& st, double t_end) {
    while (st.time < t_end - 1e-12) solver.step(st, t_end);
}

double max_rel_to(const Vector& f, double want) {
    return (f.array() - want).abs().maxCoeff() / std::abs(want);
}

// Coupled Model I configuration with boundary fluxes, used for invariants.
SolverSettings coupled_settings() {
    SolverSettings s;
    s.model = chemistry::Model::I;
    s.kinetics = {1.0, 1.0, 1.0, 1.0, 0.1};
    s.fluxes.beta_E = 0.1;
    s.fluxes.zeta_E = 0.1;
    s.fluxes.gamma_E = 0.05;
    s.fluxes.beta_e = 0.2;
    s.fluxes.zeta_e = 0.1;
    s.fluxes.gamma_e = 0.05;
    s.fluxes.gamma_d = 0.05;
    s.fluxes.gamma_c1 = 0.5;
    s.fluxes.gamma_c2 = 0.1;
    s.fluxes.zeta_c1 = 0.05;
    s.fluxes.zeta_c2 = 0.05;
    s.loads = {0.2, 0.1, 0.1};
    s.delta = 0.3;
    s.normalize_ball_average = true;
    s.policy.dt = 0.02;
    s.policy.dt_min = 0.02 / 64.0;
    return s;
}

const chemistry::SpeciesState kInitial{1.0, 0.5, 0.5, 1.0, 2.48};

}  // namespace

TEST_SUITE("macro_solver") {

TEST_CASE("well-mixed Model I matches the oracle") {
    const MacroMesh mesh = build_macro_mesh({1.0, 1.0, 1.0}, {2, 2, 2});
    const auto gp = validation::golden_problem();
    const CoupledSolver solver(mesh, isotropic_model(), frozen_settings(chemistry::Model::I, gp.signal, 0.05));
    auto st = solver.initial_state(gp.initial);
    run_to(solver, st, 1.0);
    const auto ref = validation::well_mixed_final(gp, 1.0, 1e-3);
    CHECK(max_rel_to(st.species[0], ref.p1) < 1e-6);
    CHECK(max_rel_to(st.species[1], ref.p2) < 1e-6);
    CHECK(max_rel_to(st.species[2], ref.n1) < 1e-6);
    CHECK(max_rel_to(st.species[3], ref.n2) < 1e-6);
    CHECK(max_rel_to(st.species[4], ref.b) < 1e-6);
    CHECK(st.time == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("well-mixed Model II matches the oracle with the matrix fraction") {
    const MacroMesh mesh = build_macro_mesh({1.0, 1.0, 1.0}, {2, 2, 2});
    const double theta = 0.8;
    auto gp = validation::golden_problem();
    const double p = 0.7;
    const CoupledSolver solver(mesh, isotropic_model(theta, 1.0, 0.5), frozen_settings(chemistry::Model::II, p, 0.05));
    auto st = solver.initial_state(gp.initial);
    run_to(solver, st, 1.0);
    gp.model = chemistry::Model::II;
    gp.theta_m = theta;
    gp.signal = theta * p;
    const auto ref = validation::well_mixed_final(gp, 1.0, 1e-3);
    CHECK(max_rel_to(st.species[2], ref.n1) < 1e-6);
    CHECK(max_rel_to(st.species[3], ref.n2) < 1e-6);
    CHECK(max_rel_to(st.species[4], ref.b) < 1e-6);
}

TEST_CASE("breakage-only decay is exponential under step refinement") {
    const MacroMesh mesh = build_macro_mesh({1.0, 1.0, 1.0}, {2, 2, 2});
    double prev = 1.0;
    for (double dt : {0.1, 0.05, 0.025}) {
        auto s = frozen_settings(chemistry::Model::I, 0.7, dt);
        s.kinetics = {0.0, 0.0, 1.0, 1.3, 0.0};
        const CoupledSolver solver(mesh, isotropic_model(), s);
        auto st = solver.initial_state({0.0, 0.0, 0.0, 0.0, 1.0});
        run_to(solver, st, 1.0);
        const double err = max_rel_to(st.species[4], std::exp(-1.3 * 0.7));
        CAPTURE(dt);
        CHECK(err < 1e-8);
        CHECK(err <= prev);
        prev = err;
    }
}

TEST_CASE("coupled run keeps species nonnegative and contracts") {
    const MacroMesh mesh = build_macro_mesh({1.0, 1.0, 1.0}, {3, 3, 3});
    const CoupledSolver solver(mesh, isotropic_model(), coupled_settings());
    auto st = solver.initial_state(kInitial);
    for (int i = 0; i < 15; ++i) {
        const auto rep = solver.step(st, 10.0);
        CHECK(rep.contraction_ratio < 1.0);
        CHECK(rep.inner_iterations >= 2);
        for (const auto& f : st.species) CHECK(f.minCoeff() >= -1e-12);
    }
    // Loads open the channels on the inner face, so the fields are no
    // longer uniform.
    CHECK(st.species[3].maxCoeff() - st.species[3].minCoeff() > 1e-6);
}

TEST_CASE("pure exchange conserves n1 + 2b") {
    const MacroMesh mesh = build_macro_mesh({1.0, 1.0, 1.0}, {3, 3, 3});
    auto s = coupled_settings();
    s.kinetics.k_eE = 0.0;
    s.kinetics.R_d = 0.0;
    s.fluxes = {};
    s.fluxes.gamma_c1 = 0.5;  // calcium exchange does not enter the balance
    const CoupledSolver solver(mesh, isotropic_model(1.0, 0.7), s);
    auto st = solver.initial_state(kInitial);
    double c0 = solver.integral(st.species[2]) + 2.0 * solver.integral(st.species[4]);
    for (int i = 0; i < 10; ++i) {
        solver.step(st, 10.0);
        const double c = solver.integral(st.species[2]) + 2.0 * solver.integral(st.species[4]);
        CHECK(std::abs(c - c0) <= 1e-10 * std::abs(c0));
        c0 = c;
    }
}

TEST_CASE("cross-link outflow balances the change of total b") {
    const MacroMesh mesh = build_macro_mesh({1.0, 1.0, 1.0}, {3, 3, 3});
    const double theta = 0.8, gb = 0.4;
    auto s = frozen_settings(chemistry::Model::II, 0.0, 0.1);
    s.kinetics = {0.0, 0.0, 1.0, 0.0, 0.0};
    s.fluxes.gamma_b = gb;
    const CoupledSolver solver(mesh, isotropic_model(theta, 1.0, 0.6), s);
    auto st = solver.initial_state(kInitial);
    const Vector ext = boundary_mass(mesh, BoundaryTag::Exterior);
    for (int i = 0; i < 5; ++i) {
        const double before = solver.integral(st.species[4]);
        const auto rep = solver.step(st, 10.0);
        const double after = solver.integral(st.species[4]);
        const double outflow = rep.dt_used * gb / theta * ext.dot(st.species[4]);
        CHECK(outflow > 0.0);
        CHECK(std::abs((before - after) - outflow) <= 1e-10 * before);
    }
}

TEST_CASE("restart from a snapshot is bit-identical") {
    const MacroMesh mesh = build_macro_mesh({1.0, 1.0, 1.0}, {3, 3, 3});
    const CoupledSolver solver(mesh, isotropic_model(), coupled_settings());
    auto a = solver.initial_state(kInitial);
    for (int i = 0; i < 6; ++i) solver.step(a, 10.0);

    auto b = solver.initial_state(kInitial);
    for (int i = 0; i < 3; ++i) solver.step(b, 10.0);
    auto c = io::parse_snapshot(io::format_snapshot(b, mesh), mesh);
    for (int i = 0; i < 3; ++i) solver.step(c, 10.0);
    CHECK(c.time == a.time);
    CHECK(c.step == a.step);
    for (int s = 0; s < chemistry::kNumSpecies; ++s) CHECK(c.species[s] == a.species[s]);
    CHECK(c.u == a.u);
    CHECK(c.signal == a.signal);
}

TEST_CASE("without loads cross-links only form") {
    const MacroMesh mesh = build_macro_mesh({1.0, 1.0, 1.0}, {3, 3, 3});
    auto s = coupled_settings();
    s.loads = {};
    const CoupledSolver solver(mesh, isotropic_model(), s);
    auto st = solver.initial_state(kInitial);
    CHECK(st.u.cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < 10; ++i) {
        const Vector prev = st.species[4];
        solver.step(st, 10.0);
        CHECK((st.species[4] - prev).minCoeff() >= 0.0);
    }
}

TEST_CASE("splitting error is first order in the step") {
    const MacroMesh mesh = build_macro_mesh({1.0, 1.0, 1.0}, {2, 2, 2});
    auto make = [&](double dt) {
        auto s = coupled_settings();
        s.frozen_signal = 0.5;
        s.policy.dt = dt;
        s.policy.dt_min = dt / 64.0;
        return s;
    };
    auto run = [&](double dt) {
        const CoupledSolver solver(mesh, isotropic_model(1.0, 0.3), make(dt));
        auto st = solver.initial_state(kInitial);
        run_to(solver, st, 0.4);
        return st;
    };
    const auto ref = run(0.4 / 512.0);
    std::vector<double> err;
    for (double dt : {0.1, 0.05, 0.025}) {
        const auto st = run(dt);
        double e = 0.0;
        for (int s = 0; s < 4; ++s) e = std::max(e, (st.species[s] - ref.species[s]).cwiseAbs().maxCoeff());
        err.push_back(e);
    }
    for (std::size_t i = 1; i < err.size(); ++i) {
        const double order = std::log2(err[i - 1] / err[i]);
        CAPTURE(order);
        CHECK(order >= 0.9);
    }
}

TEST_CASE("step guards") {
    const MacroMesh mesh = build_macro_mesh({1.0, 1.0, 1.0}, {2, 2, 2});
    const CoupledSolver solver(mesh, isotropic_model(), frozen_settings(chemistry::Model::I, 0.5, 0.1));
    auto st = solver.initial_state(kInitial);
    CHECK_THROWS_AS(step_model_II(st, solver, 1.0), DomainError);
    CHECK_NOTHROW(step_model_I(st, solver, 1.0));
    st.time = 1.0;
    CHECK_THROWS_AS(solver.step(st, 1.0), DomainError);
    auto bad = frozen_settings(chemistry::Model::I, 0.5, 0.1);
    bad.policy.dt_min = 0.2;
    CHECK_THROWS_AS(CoupledSolver(mesh, isotropic_model(), bad), DomainError);
}

TEST_CASE("inner loop failure halves the step down to the floor") {
    const MacroMesh mesh = build_macro_mesh({1.0, 1.0, 1.0}, {2, 2, 2});
    auto s = coupled_settings();
    s.policy.max_inner = 2;
    s.policy.inner_tolerance = 1e-300;
    s.policy.b_floor = 1e-300;
    const CoupledSolver solver(mesh, isotropic_model(), s);
    auto st = solver.initial_state(kInitial);
    const auto before = st;
    try {
        solver.step(st, 1.0);
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        CHECK(e.iterations() == 2);
        CHECK(e.residual() > 0.0);
    }
    CHECK(st.time == before.time);
    CHECK(st.species[4] == before.species[4]);
}

}  // TEST_SUITE
