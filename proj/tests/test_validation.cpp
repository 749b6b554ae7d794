#include <doctest.h>

#include <cmath>

#include "cellwall/io.hpp"
#include "cellwall/macro_solver.hpp"
#include "cellwall/validation.hpp"
#include "support.hpp"

using namespace cellwall;
using testing::rel;

namespace {

std::vector<validation::GoldenRow> golden() {
    return validation::parse_golden(io::read_text_file(std::string(CELLWALL_TEST_DATA) + "/well_mixed_golden.txt"));
}

double state_gap(const chemistry::SpeciesState& a, const chemistry::SpeciesState& b) {
    return std::max({rel(a.p1, b.p1), rel(a.p2, b.p2), rel(a.n1, b.n1), rel(a.n2, b.n2), rel(a.b, b.b)});
}

}  // namespace

TEST_SUITE("validation") {

TEST_CASE("oracle reproduces the golden file") {
    const auto rows = golden();
    REQUIRE(rows.size() == 5u);
    CHECK(rows.front().time == 0.0);
    CHECK(rows.back().time == 1.0);
    const auto p = validation::golden_problem();
    for (const auto& r : rows) {
        const auto s = r.time == 0.0 ? p.initial : validation::well_mixed_final(p, r.time, 1e-3);
        CAPTURE(r.time);
        CHECK(state_gap(s, r.state) < 1e-12);
    }
}

TEST_CASE("golden file carries its provenance") {
    const auto text = io::read_text_file(std::string(CELLWALL_TEST_DATA) + "/well_mixed_golden.txt");
    CHECK(text.find("# dt_ref") != std::string::npos);
    CHECK(text.find("richardson_defect") != std::string::npos);
    CHECK(text.find("# git") != std::string::npos);
}

TEST_CASE("PDE solver on uniform data follows the golden trajectory") {
    const auto rows = golden();
    const auto p = validation::golden_problem();
    const MacroMesh mesh = build_macro_mesh({1.0, 1.0, 1.0}, {2, 2, 2});
    macro::SolverSettings s;
    s.kinetics = p.kinetics;
    s.frozen_signal = p.signal;
    s.policy.dt = 0.05;
    s.policy.dt_min = 0.05 / 64.0;
    const macro::CoupledSolver solver(mesh, testing::isotropic_model(), s);
    auto st = solver.initial_state(p.initial);
    for (const auto& r : rows) {
        while (st.time < r.time - 1e-12) solver.step(st, r.time);
        const chemistry::SpeciesState got{st.species[0](0), st.species[1](0), st.species[2](0), st.species[3](0),
                                          st.species[4](0)};
        CAPTURE(r.time);
        CHECK(state_gap(got, r.state) < 1e-6);
    }
}

TEST_CASE("oracle self-consistency") {
    const auto p = validation::golden_problem();
    CHECK(validation::richardson_defect(p, 1.0, 1e-3) < 1e-10);
    const auto traj = validation::well_mixed_oracle(p, 1.0, 1e-3, 250);
    REQUIRE(traj.time.size() == 5u);
    CHECK(traj.time.back() == doctest::Approx(1.0));
    CHECK(state_gap(traj.state.back(), validation::well_mixed_final(p, 1.0, 1e-3)) == 0.0);
}

TEST_CASE("validation suite pieces pass") {
    for (const auto& c : validation::random_bounds_suite(4, 7, 1.0 / 8.0)) CHECK(c.passed);
    const auto checks = validation::tetragonal_checks(validation::reference_table_harness(1.0 / 16.0).computed);
    CHECK(validation::all_passed(checks));
    const auto text = validation::format_checks(checks);
    CHECK(text.rfind("PASS ", 0) == 0);
}

TEST_CASE("tetragonal checks catch a broken pattern") {
    Voigt6 c = validation::reference_table_harness(1.0 / 8.0).computed;
    c(0, 0) *= 1.001;
    CHECK(!validation::all_passed(validation::tetragonal_checks(c)));
}

TEST_CASE("Monte-Carlo ball estimate converges to the ball volume") {
    const double est = validation::monte_carlo_ball_integral({0.5, 0.5, 0.5}, 0.2, {1.0, 1.0, 1.0},
                                                             [](const Point3&) { return 1.0; }, 400000, 1);
    CHECK(rel(est, 4.0 / 3.0 * M_PI * 0.008) < 0.01);
}

}  // TEST_SUITE
