#include "cellwall/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "cellwall/error.hpp"
#include "cellwall/homogenization.hpp"
#include "cellwall/mesh.hpp"

namespace cellwall::pipeline {

namespace {

constexpr const char* kCacheMagic = "cellwall-effective-model 1";

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void put_voigt(std::ostringstream& s, const char* name, const Voigt6& c) {
    s << name;
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) s << ' ' << io::format_double(c(i, j));
    }
    s << '\n';
}

// Token reader over the cache text; every failure becomes a reason string.
class Tokens {
public:
    explicit Tokens(const std::string& text) : in_(text) {}
    std::string word() {
        std::string w;
        if (!(in_ >> w)) throw IoError("unexpected end of cache file");
        return w;
    }
    void expect(const std::string& w) {
        const std::string got = word();
        if (got != w) throw IoError("expected '" + w + "', found '" + got + "'");
    }
    double number() {
        const std::string w = word();
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(w, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != w.size() || w.empty()) throw IoError("malformed number '" + w + "'");
        return v;
    }
    Voigt6 voigt(const std::string& name) {
        expect(name);
        Voigt6 c;
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) c(i, j) = number();
        }
        return c;
    }

private:
    std::istringstream in_;
};

Eigen::Matrix3d solve_diffusion(const UnitCellMesh& mesh, const Eigen::Matrix3d& d, bool normalize,
                                const CellSolveOptions& opt) {
    if (d.isZero(0.0)) return Eigen::Matrix3d::Zero();
    return homog::effective_diffusion(homog::solve_scalar_correctors(mesh, d, opt), normalize);
}

}  // namespace

std::string fingerprint(const io::SimConfig& config) { return hex64(fnv1a(io::canonical_cell_inputs(config))); }

std::string format_effective_model(const macro::EffectiveModel& m, const std::string& fp) {
    std::ostringstream s;
    s << kCacheMagic << '\n';
    s << "fingerprint " << fp << '\n';
    s << "mesh_id " << m.family.mesh_id << '\n';
    s << "theta_m " << io::format_double(m.theta_m) << '\n';
    s << "matrix_poisson " << io::format_double(m.matrix_poisson) << '\n';
    s << "law " << io::format_double(m.family.law.slope) << ' ' << io::format_double(m.family.law.intercept) << '\n';
    s << "anchors " << io::format_double(m.family.anchor_a) << ' ' << io::format_double(m.family.anchor_b) << '\n';
    put_voigt(s, "slope", m.family.slope.voigt_matrix());
    put_voigt(s, "offset", m.family.offset.voigt_matrix());
    for (int k = 0; k < chemistry::kNumSpecies; ++k) {
        s << "diffusion " << chemistry::kSpeciesNames[k];
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) s << ' ' << io::format_double(m.diffusion[k](i, j));
        }
        s << '\n';
    }
    const auto& loc = m.localization;
    s << "localization " << loc.mesh_id << ' ' << io::format_double(loc.reference_modulus) << ' '
      << io::format_double(loc.theta_m) << ' ' << loc.size() << '\n';
    for (std::size_t t = 0; t < loc.size(); ++t) {
        s << (loc.region[t] == Region::Matrix ? 'M' : 'F') << ' ' << io::format_double(loc.weight[t]);
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) s << ' ' << io::format_double(loc.sample[t](i, j));
        }
        s << '\n';
    }
    s << "end\n";
    return s.str();
}

std::optional<macro::EffectiveModel> parse_effective_model(const std::string& text, const std::string& fp,
                                                           std::string* reason) {
    try {
        if (text.rfind(kCacheMagic, 0) != 0) throw IoError("unknown cache format");
        Tokens tk(text.substr(std::string(kCacheMagic).size()));
        tk.expect("fingerprint");
        const std::string got = tk.word();
        if (got != fp) throw IoError("fingerprint mismatch (file " + got + ", expected " + fp + ")");
        macro::EffectiveModel m;
        tk.expect("mesh_id");
        m.family.mesh_id = std::stoull(tk.word());
        tk.expect("theta_m");
        m.theta_m = tk.number();
        tk.expect("matrix_poisson");
        m.matrix_poisson = tk.number();
        tk.expect("law");
        m.family.law.slope = tk.number();
        m.family.law.intercept = tk.number();
        tk.expect("anchors");
        m.family.anchor_a = tk.number();
        m.family.anchor_b = tk.number();
        m.family.slope = Tensor4::from_voigt(tk.voigt("slope"), 0.0);
        m.family.offset = Tensor4::from_voigt(tk.voigt("offset"), 0.0);
        for (int k = 0; k < chemistry::kNumSpecies; ++k) {
            tk.expect("diffusion");
            tk.expect(chemistry::kSpeciesNames[k]);
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) m.diffusion[k](i, j) = tk.number();
            }
        }
        auto& loc = m.localization;
        tk.expect("localization");
        loc.mesh_id = std::stoull(tk.word());
        loc.reference_modulus = tk.number();
        loc.theta_m = tk.number();
        const auto n = static_cast<std::size_t>(std::stoull(tk.word()));
        loc.sample.resize(n);
        loc.weight.resize(n);
        loc.region.resize(n);
        for (std::size_t t = 0; t < n; ++t) {
            const std::string r = tk.word();
            if (r != "M" && r != "F") throw IoError("bad region tag '" + r + "'");
            loc.region[t] = r == "M" ? Region::Matrix : Region::Fibril;
            loc.weight[t] = tk.number();
            for (int i = 0; i < 6; ++i) {
                for (int j = 0; j < 6; ++j) loc.sample[t](i, j) = tk.number();
            }
        }
        tk.expect("end");
        return m;
    } catch (const std::exception& e) {
        if (reason) *reason = e.what();
        return std::nullopt;
    }
}

PreparedModel prepare_effective_model(const io::SimConfig& config) {
    PreparedModel out;
    out.fingerprint = fingerprint(config);
    std::string cache_path;
    if (!config.output.cache_dir.empty()) {
        cache_path = (std::filesystem::path(config.output.cache_dir) / ("effective-" + out.fingerprint + ".txt")).string();
        if (std::filesystem::exists(cache_path)) {
            std::string reason;
            std::optional<macro::EffectiveModel> cached;
            try {
                cached = parse_effective_model(io::read_text_file(cache_path), out.fingerprint, &reason);
            } catch (const IoError& e) {
                reason = e.what();
            }
            if (cached) {
                out.model = std::move(*cached);
                out.mesh_id = out.model.family.mesh_id;
                out.cache_hit = true;
                return out;
            }
            out.warnings.push_back("ignoring cache file " + cache_path + ": " + reason + "; recomputing");
        }
    }

    const auto& g = config.geometry;
    const auto& mat = config.materials;
    const UnitCellMesh mesh = build_unit_cell_mesh(g.radius, g.h_cell);
    out.mesh_id = mesh.id;
    CellSolveOptions opt;
    opt.threads = config.output.threads;
    const Tensor4 fibril = materials::transversely_isotropic_tensor(mat.fibril);
    auto elastic = [&](double young) {
        ++out.cell_solves;
        return homog::solve_elastic_correctors(mesh, {materials::isotropic_tensor(young, mat.matrix_poisson), fibril},
                                               opt);
    };
    const double ea = mat.anchors[0], eb = mat.anchors[1];
    const auto set_a = elastic(ea);
    const auto set_b = elastic(eb);
    out.model.family = materials::affine_family_from_anchors(ea, homog::effective_elasticity(mesh, set_a), eb,
                                                             homog::effective_elasticity(mesh, set_b), mat.law,
                                                             mesh.id);
    const double e_ref = io::effective_localization_modulus(config);
    if (e_ref == ea) {
        out.model.localization = homog::localization_field(mesh, set_a, e_ref);
    } else if (e_ref == eb) {
        out.model.localization = homog::localization_field(mesh, set_b, e_ref);
    } else {
        out.model.localization = homog::localization_field(mesh, elastic(e_ref), e_ref);
    }
    const bool normalize = config.coupling.normalize_effective_by_theta_m;
    for (int k = 0; k < chemistry::kNumSpecies; ++k) {
        // Species sharing a tensor share the corrector solve.
        int same = -1;
        for (int j = 0; j < k; ++j) {
            if (mat.diffusion[j] == mat.diffusion[k]) same = j;
        }
        if (same >= 0) {
            out.model.diffusion[k] = out.model.diffusion[same];
        } else {
            if (!mat.diffusion[k].isZero(0.0)) ++out.cell_solves;
            out.model.diffusion[k] = solve_diffusion(mesh, mat.diffusion[k], normalize, opt);
        }
    }
    out.model.theta_m = volume_fractions(mesh).matrix;
    out.model.matrix_poisson = mat.matrix_poisson;

    if (!cache_path.empty()) {
        // Round-trip through the text form so cached and fresh runs see
        // identical bits.
        const std::string text = format_effective_model(out.model, out.fingerprint);
        io::write_text_file(cache_path, text);
        out.model = *parse_effective_model(text, out.fingerprint);
    }
    return out;
}

macro::SolverSettings solver_settings(const io::SimConfig& c) {
    macro::SolverSettings s;
    s.model = c.coupling.model;
    s.variant = c.coupling.variant;
    s.kinetics = c.kinetics;
    s.fluxes = c.fluxes;
    s.loads = c.loads;
    s.delta = io::effective_delta(c);
    s.normalize_ball_average = c.coupling.normalize_ball_average;
    s.frozen_signal = c.coupling.frozen_signal;
    s.b_to_uM = c.materials.b_to_uM;
    s.policy = c.stepping.policy;
    return s;
}

io::TrajectoryRow trajectory_row(const macro::CoupledSolver& solver, const macro::MacroState& state,
                                 const macro::StepReport* report) {
    io::TrajectoryRow r;
    r.time = state.time;
    const double volume = solver.integral(macro::Vector::Ones(state.species[0].size()));
    for (int k = 0; k < chemistry::kNumSpecies; ++k) {
        r.min[k] = state.species[k].minCoeff();
        r.max[k] = state.species[k].maxCoeff();
        r.mean[k] = solver.integral(state.species[k]) / volume;
    }
    r.strain_norm = macro::strain_norm(solver.mesh(), state.u);
    if (report) {
        r.inner_iters = report->inner_iterations;
        r.contraction_ratio = report->contraction_ratio;
    }
    return r;
}

RunResult run_simulation(const io::SimConfig& config, const RunOptions& options) {
    namespace fs = std::filesystem;
    using nlohmann::json;
    RunResult res;
    const fs::path dir(config.output.directory);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    io::write_text_file((dir / "config.json").string(), io::echo_config(config));
    auto log = [&](const std::string& msg) {
        if (options.log) *options.log << msg << '\n';
    };

    res.prepared = prepare_effective_model(config);
    for (const auto& w : res.prepared.warnings) log("warning: " + w);
    log(std::string("effective model ") + res.prepared.fingerprint + (res.prepared.cache_hit ? " (cached)" : "") +
        ", cell solves: " + std::to_string(res.prepared.cell_solves));

    const auto& g = config.geometry;
    const MacroMesh mesh = build_macro_mesh(g.extents, g.cells);
    const macro::CoupledSolver solver(mesh, res.prepared.model, solver_settings(config));
    macro::MacroState state = options.restart_snapshot ? io::read_snapshot(*options.restart_snapshot, mesh)
                                                       : solver.initial_state(config.initial);
    res.rows.push_back(trajectory_row(solver, state, nullptr));

    const double t_end = config.stepping.t_end;
    const double eps = 1e-12 * std::max(1.0, t_end);
    auto write_failure = [&](const std::string& type, const std::string& message, const json& extra) {
        json f = {{"status", "failed"}, {"error", type},   {"message", message},
                  {"time", state.time}, {"step", state.step}};
        f.update(extra);
        io::write_trajectory(res.rows, (dir / "trajectory.csv").string());
        io::write_text_file((dir / "failure.json").string(), f.dump(2) + "\n");
        res.failure = message;
        res.final_state = state;
        log("run failed at t = " + io::format_double(state.time) + ": " + message);
    };
    try {
        while (state.time < t_end - eps) {
            const auto report = solver.step(state, t_end);
            res.rows.push_back(trajectory_row(solver, state, &report));
            if (config.output.snapshot_every > 0 && state.step % config.output.snapshot_every == 0) {
                char name[32];
                std::snprintf(name, sizeof name, "step-%06ld.txt", state.step);
                io::write_snapshot(state, mesh, (dir / "snapshots" / name).string());
            }
        }
    } catch (const SolverError& e) {
        write_failure("SolverError", e.what(), {{"iterations", e.iterations()}, {"residual", e.residual()}});
        return res;
    } catch (const DomainError& e) {
        write_failure("DomainError", e.what(), json::object());
        return res;
    } catch (const Error& e) {
        write_failure("Error", e.what(), json::object());
        return res;
    }
    io::write_trajectory(res.rows, (dir / "trajectory.csv").string());
    io::write_snapshot(state, mesh, (dir / "final.txt").string());
    const json summary = {{"status", "completed"},
                          {"time", state.time},
                          {"steps", state.step},
                          {"fingerprint", res.prepared.fingerprint},
                          {"cache_hit", res.prepared.cache_hit},
                          {"cell_solves", res.prepared.cell_solves}};
    io::write_text_file((dir / "summary.json").string(), summary.dump(2) + "\n");
    res.completed = true;
    res.final_state = std::move(state);
    log("completed " + std::to_string(res.final_state.step) + " steps");
    return res;
}

}  // namespace cellwall::pipeline
