#include <doctest.h>

#include <filesystem>

#include <json.hpp>

#include "cellwall/config.hpp"
#include "cellwall/io.hpp"
#include "cellwall/pipeline.hpp"
#include "support.hpp"

using namespace cellwall;
namespace fs = std::filesystem;

namespace {

io::SimConfig small_config(const std::string& dir) {
    auto c = io::parse_config_text(R"({
        "geometry": {"h_cell": 0.125, "cells": [2, 2, 2]},
        "materials": {"diffusion": {"p1": 0.5, "p2": 0.2, "n1": 0.5, "n2": 1.0}},
        "fluxes": {"beta_e": 0.2, "zeta_e": 0.1, "gamma_e": 0.05, "beta_E": 0.1, "zeta_E": 0.1,
                   "gamma_E": 0.05, "gamma_d": 0.05, "gamma_c1": 0.5, "gamma_c2": 0.1,
                   "zeta_c1": 0.05, "zeta_c2": 0.05},
        "coupling": {"model": "I", "normalize_ball_average": true, "delta": 0.3},
        "stepping": {"dt": 0.01, "t_end": 0.04}
    })");
    c.output.directory = dir + "/run";
    c.output.cache_dir = dir + "/cache";
    return c;
}

bool same_model(const macro::EffectiveModel& a, const macro::EffectiveModel& b) {
    if (!(a.family.slope == b.family.slope) || !(a.family.offset == b.family.offset)) return false;
    for (int k = 0; k < 5; ++k) {
        if (a.diffusion[k] != b.diffusion[k]) return false;
    }
    if (a.localization.size() != b.localization.size()) return false;
    for (std::size_t t = 0; t < a.localization.size(); ++t) {
        if (a.localization.sample[t] != b.localization.sample[t]) return false;
        if (a.localization.weight[t] != b.localization.weight[t]) return false;
    }
    return a.theta_m == b.theta_m && a.localization.mesh_id == b.localization.mesh_id;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("fingerprint depends only on the cell inputs") {
    auto a = small_config("/tmp/x");
    auto b = a;
    b.kinetics.k_b = 5.0;
    b.stepping.t_end = 9.0;
    CHECK(pipeline::fingerprint(a) == pipeline::fingerprint(b));
    CHECK(pipeline::fingerprint(a).size() == 16u);
    b.geometry.radius = 0.2;
    CHECK(pipeline::fingerprint(a) != pipeline::fingerprint(b));
    b = a;
    b.materials.diffusion[2] *= 2.0;
    CHECK(pipeline::fingerprint(a) != pipeline::fingerprint(b));
}

TEST_CASE("cache miss, hit and corruption") {
    const auto dir = testing::scratch_dir("cache");
    const auto c = small_config(dir);
    const auto fresh = pipeline::prepare_effective_model(c);
    CHECK(!fresh.cache_hit);
    // Two anchors, the localization modulus, three distinct diffusion tensors.
    CHECK(fresh.cell_solves == 6);
    const auto path = dir + "/cache/effective-" + fresh.fingerprint + ".txt";
    REQUIRE(fs::exists(path));

    const auto hit = pipeline::prepare_effective_model(c);
    CHECK(hit.cache_hit);
    CHECK(hit.cell_solves == 0);
    CHECK(hit.warnings.empty());
    CHECK(same_model(fresh.model, hit.model));

    io::write_text_file(path, "garbage\n");
    const auto again = pipeline::prepare_effective_model(c);
    CHECK(!again.cache_hit);
    REQUIRE(again.warnings.size() == 1);
    CHECK(again.warnings[0].find("ignoring cache file") != std::string::npos);
    CHECK(same_model(fresh.model, again.model));
    CHECK(pipeline::prepare_effective_model(c).cache_hit);

    std::string reason;
    CHECK(!pipeline::parse_effective_model(io::read_text_file(path), "0000000000000000", &reason));
    CHECK(!reason.empty());
}

TEST_CASE("homogeneous cell gives the matrix itself") {
    const auto dir = testing::scratch_dir("homog");
    auto c = small_config(dir);
    c.geometry.radius = 0.0;
    c.output.cache_dir.clear();
    const auto p = pipeline::prepare_effective_model(c);
    CHECK(p.model.theta_m == 1.0);
    CHECK(relative_difference(p.model.family.slope, materials::isotropic_tensor(1.0, 0.3)) < 1e-10);
    CHECK(p.model.family.offset.max_abs() < 1e-9);
    CHECK((p.model.diffusion[0] - 0.5 * Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(p.model.diffusion[4].isZero(0.0));
}

TEST_CASE("cached and fresh runs write identical outputs") {
    const auto dir = testing::scratch_dir("run");
    auto c = small_config(dir);
    c.output.snapshot_every = 2;
    const auto first = pipeline::run_simulation(c);
    REQUIRE(first.completed);
    CHECK(!first.prepared.cache_hit);
    const std::string traj = io::read_text_file(c.output.directory + "/trajectory.csv");
    const std::string fin = io::read_text_file(c.output.directory + "/final.txt");
    CHECK(first.rows.size() == 5u);
    CHECK(fs::exists(c.output.directory + "/snapshots/step-000002.txt"));
    CHECK(fs::exists(c.output.directory + "/snapshots/step-000004.txt"));
    CHECK(io::parse_config(c.output.directory + "/config.json") == c);
    const auto summary = nlohmann::json::parse(io::read_text_file(c.output.directory + "/summary.json"));
    CHECK(summary["status"] == "completed");
    CHECK(summary["steps"] == 4);

    const auto second = pipeline::run_simulation(c);
    REQUIRE(second.completed);
    CHECK(second.prepared.cache_hit);
    CHECK(io::read_text_file(c.output.directory + "/trajectory.csv") == traj);
    CHECK(io::read_text_file(c.output.directory + "/final.txt") == fin);

    // Restart from the step-2 snapshot reaches the same final state.
    auto r = c;
    r.output.directory = dir + "/restart";
    pipeline::RunOptions opt;
    opt.restart_snapshot = c.output.directory + "/snapshots/step-000002.txt";
    const auto restarted = pipeline::run_simulation(r, opt);
    REQUIRE(restarted.completed);
    CHECK(io::read_text_file(r.output.directory + "/final.txt") == fin);
}

TEST_CASE("a failing step leaves a failure record") {
    const auto dir = testing::scratch_dir("fail");
    auto c = small_config(dir);
    c.stepping.policy.max_inner = 2;
    c.stepping.policy.inner_tolerance = 1e-300;
    c.stepping.policy.b_floor = 1e-300;
    const auto res = pipeline::run_simulation(c);
    CHECK(!res.completed);
    CHECK(!res.failure.empty());
    const auto f = nlohmann::json::parse(io::read_text_file(c.output.directory + "/failure.json"));
    CHECK(f["status"] == "failed");
    CHECK(f["error"] == "SolverError");
    CHECK(f["iterations"] == 2);
    CHECK(fs::exists(c.output.directory + "/trajectory.csv"));
    CHECK(!fs::exists(c.output.directory + "/summary.json"));
}

}  // TEST_SUITE
