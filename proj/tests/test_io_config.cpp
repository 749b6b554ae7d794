#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "cellwall/config.hpp"
#include "cellwall/error.hpp"
#include "cellwall/io.hpp"
#include "cellwall/validation.hpp"
#include "support.hpp"

using namespace cellwall;

namespace {

const char* kMinimal = R"({"coupling": {"model": "I"}, "stepping": {"t_end": 1}})";

std::vector<std::string> problems_of(const std::string& text) {
    try {
        io::parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.problems();
    }
    return {};
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
    for (const auto& x : v) {
        if (x == s) return true;
    }
    return false;
}

}  // namespace

TEST_SUITE("io_config") {

TEST_CASE("minimal configuration takes the defaults") {
    const auto c = io::parse_config_text(kMinimal);
    CHECK(c.coupling.model == chemistry::Model::I);
    CHECK(c.geometry.radius == 0.25);
    CHECK(c.materials.matrix_poisson == 0.3);
    CHECK(c.stepping.t_end == 1.0);
    CHECK(io::effective_delta(c) == doctest::Approx(0.1));
    CHECK(io::effective_localization_modulus(c) == doctest::Approx(8.08 + 0.775 * 2.48));
}

TEST_CASE("echo round trip") {
    auto c = io::parse_config_text(R"({
        "geometry": {"radius": 0.2, "cells": [3, 2, 2], "extents": [2, 1, 0.5]},
        "materials": {"diffusion": {"p1": 0.5, "b": [[1, 0.1, 0], [0.1, 1, 0], [0, 0, 2]]}},
        "coupling": {"model": "II", "variant": "strain", "delta": 0.05, "frozen_signal": 0.3},
        "stepping": {"t_end": 2.5, "dt": 0.125},
        "output": {"directory": "somewhere", "seed": 7}
    })");
    const auto text = io::echo_config(c);
    const auto back = io::parse_config_text(text);
    CHECK(back == c);
    CHECK(io::echo_config(back) == text);
    CHECK(back.materials.diffusion[4](0, 1) == 0.1);
    CHECK(back.materials.diffusion[0](1, 1) == 0.5);
    CHECK(*back.coupling.frozen_signal == 0.3);
}

TEST_CASE("out-of-range radius is reported with its key path") {
    const auto p = problems_of(R"({"geometry": {"radius": 0.6}, "coupling": {"model": "I"}, "stepping": {"t_end": 1}})");
    CHECK(contains(p, "geometry.radius: radius must be < 0.5"));
}

TEST_CASE("unknown keys are rejected") {
    const auto p = problems_of(R"({"turgur_pressure": 1, "coupling": {"model": "I"}, "stepping": {"t_end": 1}})");
    CHECK(contains(p, "turgur_pressure: unknown key"));
    const auto q = problems_of(R"({"coupling": {"model": "I", "detla": 1}, "stepping": {"t_end": 1}})");
    CHECK(contains(q, "coupling.detla: unknown key"));
}

TEST_CASE("every problem is collected") {
    const auto p = problems_of(R"({"geometry": {"radius": -1}, "kinetics": {"k_b": -2}, "stepping": {"dt": 0}})");
    CHECK(p.size() >= 4);
    CHECK(contains(p, "coupling.model: missing required key"));
    CHECK(contains(p, "stepping.t_end: missing required key"));
    CHECK_THROWS_AS(io::parse_config_text("{not json"), ConfigError);
    CHECK_THROWS_AS(io::parse_config("/nonexistent/config.json"), IoError);
}

TEST_CASE("environment overrides") {
    auto c = io::parse_config_text(kMinimal);
    setenv("CELLWALL_OUT", "/tmp/elsewhere", 1);
    setenv("CELLWALL_THREADS", "3", 1);
    io::apply_environment_overrides(c);
    CHECK(c.output.directory == "/tmp/elsewhere");
    CHECK(c.output.threads == 3);
    setenv("CELLWALL_THREADS", "many", 1);
    CHECK_THROWS_AS(io::apply_environment_overrides(c), ConfigError);
    unsetenv("CELLWALL_OUT");
    unsetenv("CELLWALL_THREADS");
}

TEST_CASE("Voigt table round trip is exact") {
    const Voigt6 c = validation::random_spd_voigt(3, 0.1, 1e5);
    const auto dir = testing::scratch_dir("voigt");
    const auto path = dir + "/c.txt";
    io::write_voigt_table(Tensor4::from_voigt(c), path, "test table");
    CHECK(io::read_voigt_table(path) == c);
    CHECK_THROWS_AS(io::parse_voigt_table("1 2 3\n"), IoError);
}

TEST_CASE("trajectory files") {
    const auto dir = testing::scratch_dir("traj");
    io::write_trajectory({}, dir + "/empty.csv");
    CHECK(io::read_text_file(dir + "/empty.csv") == io::trajectory_header() + "\n");
    CHECK(io::read_trajectory(dir + "/empty.csv").empty());
    io::TrajectoryRow r;
    r.time = 0.1;
    for (int i = 0; i < 5; ++i) {
        r.min[i] = i * 0.1;
        r.mean[i] = i * 0.2 + 1.0 / 3.0;
        r.max[i] = i * 0.3;
    }
    r.strain_norm = 1e-3;
    r.inner_iters = 3;
    r.contraction_ratio = 2.5e-5;
    io::write_trajectory({r, r}, dir + "/two.csv");
    const auto back = io::read_trajectory(dir + "/two.csv");
    REQUIRE(back.size() == 2);
    CHECK(back[1].mean[2] == r.mean[2]);
    CHECK(back[1].inner_iters == 3);
    CHECK(io::trajectory_header().rfind("time,p1_min,p1_mean,p1_max,", 0) == 0);
}

TEST_CASE("snapshot round trip is byte-identical") {
    const MacroMesh mesh = build_macro_mesh({1.0, 1.0, 1.0}, {2, 2, 2});
    macro::MacroState st;
    st.time = 0.3;
    st.step = 7;
    st.dt_next = 0.0125;
    const auto n = static_cast<Eigen::Index>(mesh.num_nodes());
    for (int s = 0; s < 5; ++s) st.species[s] = macro::Vector::LinSpaced(n, 0.1 * s, 1.0 / 3.0 + s);
    st.u = macro::Vector::LinSpaced(3 * n, -1e-3, 1e-3);
    st.signal = macro::Vector::Constant(n, M_PI);
    const auto text = io::format_snapshot(st, mesh);
    const auto back = io::parse_snapshot(text, mesh);
    CHECK(io::format_snapshot(back, mesh) == text);
    CHECK(back.u == st.u);
    CHECK(back.step == 7);
    const MacroMesh other = build_macro_mesh({1.0, 1.0, 1.0}, {3, 2, 2});
    CHECK_THROWS_AS(io::parse_snapshot(text, other), IoError);
    CHECK_THROWS_AS(io::parse_snapshot(text.substr(0, text.size() / 2), mesh), IoError);
}

}  // TEST_SUITE
