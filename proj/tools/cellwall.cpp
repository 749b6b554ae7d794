#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cellwall/config.hpp"
#include "cellwall/error.hpp"
#include "cellwall/homogenization.hpp"
#include "cellwall/io.hpp"
#include "cellwall/materials.hpp"
#include "cellwall/mesh.hpp"
#include "cellwall/pipeline.hpp"
#include "cellwall/validation.hpp"

#ifndef CELLWALL_GIT_HASH
#define CELLWALL_GIT_HASH "unknown"
#endif

namespace {

using namespace cellwall;

struct CommonFlags {
    std::string config;
    std::string out;
    std::string model;
    std::string variant;
    std::optional<double> h;
    std::optional<int> threads;
};

void add_common(CLI::App* app, CommonFlags& f, bool config_required) {
    auto* c = app->add_option("--config", f.config, "JSON configuration file");
    if (config_required) c->required();
    app->add_option("--out", f.out, "output directory");
    app->add_option("--model", f.model, "I or II")->check(CLI::IsMember({"I", "II"}));
    app->add_option("--variant", f.variant, "stress or strain")->check(CLI::IsMember({"stress", "strain"}));
    app->add_option("--h", f.h, "cell mesh size")->check(CLI::PositiveNumber);
    app->add_option("--threads", f.threads, "worker threads")->check(CLI::Range(1, 1024));
}

// Config file (or defaults), then environment, then flags.
io::SimConfig load_config(const CommonFlags& f) {
    io::SimConfig c;
    if (!f.config.empty()) c = io::parse_config(f.config);
    io::apply_environment_overrides(c);
    if (!f.out.empty()) c.output.directory = f.out;
    if (!f.model.empty()) c.coupling.model = f.model == "I" ? chemistry::Model::I : chemistry::Model::II;
    if (!f.variant.empty()) {
        c.coupling.variant = f.variant == "stress" ? chemistry::Variant::Stress : chemistry::Variant::Strain;
    }
    if (f.h) c.geometry.h_cell = *f.h;
    if (f.threads) c.output.threads = *f.threads;
    io::validate_config(c);
    return c;
}

int cell_solve(const CommonFlags& f, std::optional<double> young) {
    const auto c = load_config(f);
    const double e = young ? *young : io::effective_localization_modulus(c);
    const UnitCellMesh mesh = build_unit_cell_mesh(c.geometry.radius, c.geometry.h_cell);
    CellSolveOptions opt;
    opt.threads = c.output.threads;
    const auto set = homog::solve_elastic_correctors(
        mesh,
        {materials::isotropic_tensor(e, c.materials.matrix_poisson),
         materials::transversely_isotropic_tensor(c.materials.fibril)},
        opt);
    const Tensor4 eff = homog::effective_elasticity(mesh, set);
    const std::filesystem::path dir(c.output.directory);
    char comment[160];
    std::snprintf(comment, sizeof comment, "effective elasticity, matrix E = %.17g MPa, h = %.17g, mesh %016llx", e,
                  c.geometry.h_cell, static_cast<unsigned long long>(mesh.id));
    io::write_voigt_table(eff, (dir / "effective_elasticity.txt").string(), comment);
    std::cout << io::format_voigt_table(eff.voigt_matrix(), comment);

    std::string diff = "# effective diffusion tensors (species: row-major 3x3)\n";
    for (int k = 0; k < chemistry::kNumSpecies; ++k) {
        const auto& d = c.materials.diffusion[k];
        Eigen::Matrix3d eff_d = Eigen::Matrix3d::Zero();
        if (!d.isZero(0.0)) {
            eff_d = homog::effective_diffusion(homog::solve_scalar_correctors(mesh, d, opt),
                                               c.coupling.normalize_effective_by_theta_m);
        }
        diff += chemistry::kSpeciesNames[k];
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) diff += " " + io::format_double(eff_d(i, j));
        }
        diff += "\n";
    }
    io::write_text_file((dir / "effective_diffusion.txt").string(), diff);
    std::cout << diff;
    std::cout << "theta_M " << io::format_double(volume_fractions(mesh).matrix) << "\n";
    return 0;
}

int tensor_table(const CommonFlags& f, double b_min, double b_max, int count) {
    const auto c = load_config(f);
    if (!(b_max >= b_min) || b_min < 0.0 || count < 1) throw DomainError("tensor-table needs 0 <= b-min <= b-max, count >= 1");
    const auto prepared = pipeline::prepare_effective_model(c);
    for (const auto& w : prepared.warnings) std::cerr << "warning: " << w << "\n";
    std::string csv = "b,E";
    for (int i = 0; i < 6; ++i) {
        for (int j = i; j < 6; ++j) csv += ",C" + std::to_string(i + 1) + std::to_string(j + 1);
    }
    csv += "\n";
    for (int n = 0; n < count; ++n) {
        const double b = count == 1 ? b_min : b_min + (b_max - b_min) * n / (count - 1);
        const double bu = b * c.materials.b_to_uM;
        const auto t = prepared.model.family.evaluate(bu).voigt_matrix();
        csv += io::format_double(b) + "," + io::format_double(prepared.model.family.law(bu));
        for (int i = 0; i < 6; ++i) {
            for (int j = i; j < 6; ++j) csv += "," + io::format_double(t(i, j));
        }
        csv += "\n";
    }
    const auto path = (std::filesystem::path(c.output.directory) / "tensor_table.csv").string();
    io::write_text_file(path, csv);
    std::cout << csv;
    std::cerr << "wrote " << path << (prepared.cache_hit ? " (cached effective model)" : "") << "\n";
    return 0;
}

int simulate(const CommonFlags& f, const std::string& restart) {
    const auto c = load_config(f);
    pipeline::RunOptions opt;
    opt.log = &std::cerr;
    if (!restart.empty()) opt.restart_snapshot = restart;
    const auto res = pipeline::run_simulation(c, opt);
    return res.completed ? 0 : 3;
}

int validate(const CommonFlags& f, const std::string& golden_out) {
    if (!golden_out.empty()) {
        const auto text = validation::format_golden(validation::golden_problem(), 1e-3, {0.0, 0.25, 0.5, 0.75, 1.0},
                                                    CELLWALL_GIT_HASH);
        io::write_text_file(golden_out, text);
        std::cout << text;
        return 0;
    }
    validation::SuiteOptions opt;
    if (f.h) opt.h = *f.h;
    if (f.threads) opt.threads = *f.threads;
    std::string report;
    const auto checks = validation::run_validation_suite(opt, &report);
    const std::string text = report + validation::format_checks(checks);
    std::cout << text;
    if (!f.out.empty()) io::write_text_file((std::filesystem::path(f.out) / "validation.txt").string(), text);
    const bool ok = validation::all_passed(checks);
    std::cout << (ok ? "all checks passed\n" : "some checks failed\n");
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-scale cell wall mechanics and chemistry"};
    app.set_help_flag("--help", "print help and exit");
    app.require_subcommand(1);

    CommonFlags cell_flags, table_flags, sim_flags, val_flags;
    std::optional<double> young;
    double b_min = 0.0, b_max = 10.0;
    int count = 11;
    std::string restart, golden_out;

    auto* cell = app.add_subcommand("cell-solve", "correctors and effective tensors for one matrix modulus");
    add_common(cell, cell_flags, false);
    cell->add_option("--young", young, "matrix Young's modulus in MPa (default E(b0))")->check(CLI::PositiveNumber);

    auto* table = app.add_subcommand("tensor-table", "affine family sampled over a range of b");
    add_common(table, table_flags, false);
    table->add_option("--b-min", b_min, "smallest b");
    table->add_option("--b-max", b_max, "largest b");
    table->add_option("--count", count, "number of samples");

    auto* sim = app.add_subcommand("simulate", "coupled macroscopic run");
    add_common(sim, sim_flags, true);
    sim->add_option("--restart", restart, "snapshot to continue from");

    auto* val = app.add_subcommand("validate", "oracle and property suite");
    add_common(val, val_flags, false);
    val->add_option("--write-golden", golden_out, "write the well-mixed golden file and exit");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*cell) return cell_solve(cell_flags, young);
        if (*table) return tensor_table(table_flags, b_min, b_max, count);
        if (*sim) return simulate(sim_flags, restart);
        if (*val) return validate(val_flags, golden_out);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
