#include "cellwall/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cellwall/error.hpp"

namespace cellwall::io {

std::vector<std::string> range_problems(const SimConfig& c);

namespace {

using nlohmann::json;

// Walks one JSON object, recording every problem with its key path.
class Section {
public:
    Section(const json* obj, std::string path, std::vector<std::string>& problems)
        : obj_(obj), path_(std::move(path)), problems_(problems) {}

    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* find(const std::string& key) {
        seen_.insert(key);
        if (!obj_) return nullptr;
        auto it = obj_->find(key);
        return it == obj_->end() ? nullptr : &*it;
    }

    void number(const std::string& key, double& out, bool required = false) {
        const json* v = find(key);
        if (!v) {
            if (required) problem(key, "missing required key");
            return;
        }
        if (!v->is_number()) return problem(key, "expected a number");
        out = v->get<double>();
        if (!std::isfinite(out)) problem(key, "must be finite");
    }

    void integer(const std::string& key, int& out) {
        const json* v = find(key);
        if (!v) return;
        if (!v->is_number_integer()) return problem(key, "expected an integer");
        const auto i = v->get<long long>();
        if (i < -2147483647LL || i > 2147483647LL) return problem(key, "integer out of range");
        out = static_cast<int>(i);
    }

    void unsigned_integer(const std::string& key, std::uint64_t& out) {
        const json* v = find(key);
        if (!v) return;
        if (!v->is_number_unsigned()) return problem(key, "expected a nonnegative integer");
        out = v->get<std::uint64_t>();
    }

    void boolean(const std::string& key, bool& out) {
        const json* v = find(key);
        if (!v) return;
        if (!v->is_boolean()) return problem(key, "expected true or false");
        out = v->get<bool>();
    }

    void string(const std::string& key, std::string& out) {
        const json* v = find(key);
        if (!v) return;
        if (!v->is_string()) return problem(key, "expected a string");
        out = v->get<std::string>();
    }

    void optional_number(const std::string& key, std::optional<double>& out) {
        const json* v = find(key);
        if (!v) return;
        if (v->is_null()) {
            out.reset();
            return;
        }
        if (!v->is_number()) return problem(key, "expected a number or null");
        out = v->get<double>();
    }

    template <std::size_t N, typename T>
    void array(const std::string& key, std::array<T, N>& out) {
        const json* v = find(key);
        if (!v) return;
        if (!v->is_array() || v->size() != N) {
            return problem(key, "expected an array of " + std::to_string(N) + " entries");
        }
        for (std::size_t i = 0; i < N; ++i) {
            const json& e = (*v)[i];
            if constexpr (std::is_integral_v<T>) {
                if (!e.is_number_integer()) return problem(key, "expected integers");
            } else {
                if (!e.is_number()) return problem(key, "expected numbers");
            }
            out[i] = e.get<T>();
        }
    }

    Section child(const std::string& key) {
        const json* v = find(key);
        if (v && !v->is_object()) {
            problem(key, "expected an object");
            v = nullptr;
        }
        return Section(v, key_path(key), problems_);
    }

    const json* raw(const std::string& key) { return find(key); }

    void problem(const std::string& key, const std::string& what) { problems_.push_back(key_path(key) + ": " + what); }

    // Reports keys that were never asked for.
    void finish() {
        if (!obj_) return;
        for (auto it = obj_->begin(); it != obj_->end(); ++it) {
            if (!seen_.count(it.key())) problems_.push_back(key_path(it.key()) + ": unknown key");
        }
    }

private:
    const json* obj_;
    std::string path_;
    std::vector<std::string>& problems_;
    std::set<std::string> seen_;
};

void read_tensor(Section& s, const std::string& key, Eigen::Matrix3d& out) {
    const json* v = s.raw(key);
    if (!v) return;
    if (v->is_number()) {
        out = v->get<double>() * Eigen::Matrix3d::Identity();
        return;
    }
    if (!v->is_array() || v->size() != 3) return s.problem(key, "expected a number or a 3x3 array");
    for (int i = 0; i < 3; ++i) {
        const json& row = (*v)[static_cast<std::size_t>(i)];
        if (!row.is_array() || row.size() != 3) return s.problem(key, "expected a number or a 3x3 array");
        for (int j = 0; j < 3; ++j) {
            if (!row[static_cast<std::size_t>(j)].is_number()) return s.problem(key, "expected numbers");
            out(i, j) = row[static_cast<std::size_t>(j)].get<double>();
        }
    }
}

SimConfig from_json(const json& root) {
    std::vector<std::string> problems;
    SimConfig c;
    if (!root.is_object()) throw ConfigError({"<root>: expected a JSON object"});
    Section top(&root, "", problems);

    {
        auto g = top.child("geometry");
        g.number("radius", c.geometry.radius);
        g.number("h_cell", c.geometry.h_cell);
        g.array("extents", c.geometry.extents);
        g.array("cells", c.geometry.cells);
        g.finish();
    }
    {
        auto m = top.child("materials");
        m.number("matrix_poisson", c.materials.matrix_poisson);
        auto law = m.child("modulus_law");
        law.number("slope", c.materials.law.slope);
        law.number("intercept", c.materials.law.intercept);
        law.finish();
        auto f = m.child("fibril");
        f.number("young_transverse", c.materials.fibril.young_transverse);
        f.number("poisson_transverse", c.materials.fibril.poisson_transverse);
        f.number("modulus_ratio", c.materials.fibril.modulus_ratio);
        f.number("poisson_axial", c.materials.fibril.poisson_axial);
        f.number("shear_axial", c.materials.fibril.shear_axial);
        f.finish();
        m.array("anchors", c.materials.anchors);
        m.number("b_to_uM", c.materials.b_to_uM);
        auto d = m.child("diffusion");
        for (int s = 0; s < chemistry::kNumSpecies; ++s) read_tensor(d, chemistry::kSpeciesNames[s], c.materials.diffusion[s]);
        d.finish();
        m.finish();
    }
    {
        auto k = top.child("kinetics");
        k.number("k_eE", c.kinetics.k_eE);
        k.number("k_dc1", c.kinetics.k_dc1);
        k.number("k_dc2", c.kinetics.k_dc2);
        k.number("k_b", c.kinetics.k_b);
        k.number("R_d", c.kinetics.R_d);
        k.finish();
    }
    {
        auto f = top.child("fluxes");
        auto& x = c.fluxes;
        f.number("beta_E", x.beta_E);
        f.number("zeta_E", x.zeta_E);
        f.number("gamma_E", x.gamma_E);
        f.number("beta_e", x.beta_e);
        f.number("zeta_e", x.zeta_e);
        f.number("gamma_e", x.gamma_e);
        f.number("gamma_d", x.gamma_d);
        f.number("gamma_c1", x.gamma_c1);
        f.number("gamma_c2", x.gamma_c2);
        f.number("zeta_c1", x.zeta_c1);
        f.number("zeta_c2", x.zeta_c2);
        f.number("gamma_b", x.gamma_b);
        f.finish();
    }
    {
        auto l = top.child("loads");
        l.number("p_inner", c.loads.p_inner);
        l.number("traction_exterior", c.loads.traction_exterior);
        l.number("traction_upper", c.loads.traction_upper);
        l.finish();
    }
    {
        auto i = top.child("initial");
        i.number("p1", c.initial.p1);
        i.number("p2", c.initial.p2);
        i.number("n1", c.initial.n1);
        i.number("n2", c.initial.n2);
        i.number("b", c.initial.b);
        i.finish();
    }
    {
        auto k = top.child("coupling");
        const json* model = k.raw("model");
        if (!model) {
            k.problem("model", "missing required key");
        } else if (*model == "I") {
            c.coupling.model = chemistry::Model::I;
        } else if (*model == "II") {
            c.coupling.model = chemistry::Model::II;
        } else {
            k.problem("model", "expected \"I\" or \"II\"");
        }
        if (const json* v = k.raw("variant")) {
            if (*v == "stress") {
                c.coupling.variant = chemistry::Variant::Stress;
            } else if (*v == "strain") {
                c.coupling.variant = chemistry::Variant::Strain;
            } else {
                k.problem("variant", "expected \"stress\" or \"strain\"");
            }
        }
        k.optional_number("delta", c.coupling.delta);
        k.boolean("normalize_ball_average", c.coupling.normalize_ball_average);
        k.boolean("normalize_effective_by_theta_M", c.coupling.normalize_effective_by_theta_m);
        k.optional_number("frozen_signal", c.coupling.frozen_signal);
        k.optional_number("localization_modulus", c.coupling.localization_modulus);
        k.finish();
    }
    {
        auto s = top.child("stepping");
        auto& p = c.stepping.policy;
        s.number("dt", p.dt);
        s.number("t_end", c.stepping.t_end, true);
        s.number("dt_min", p.dt_min);
        s.number("inner_tolerance", p.inner_tolerance);
        s.number("b_floor", p.b_floor);
        s.integer("max_inner", p.max_inner);
        s.integer("min_substeps", p.min_substeps);
        s.number("max_substep_rate", p.max_substep_rate);
        s.number("solver_tolerance", p.solver_tolerance);
        s.finish();
    }
    {
        auto o = top.child("output");
        o.string("directory", c.output.directory);
        o.integer("snapshot_every", c.output.snapshot_every);
        o.unsigned_integer("seed", c.output.seed);
        o.integer("threads", c.output.threads);
        o.string("cache_dir", c.output.cache_dir);
        o.finish();
    }
    top.finish();
    // Range problems are reported alongside the structural ones.
    const auto range = range_problems(c);
    problems.insert(problems.end(), range.begin(), range.end());
    if (!problems.empty()) throw ConfigError(problems);
    return c;
}

json tensor_json(const Eigen::Matrix3d& d) {
    json rows = json::array();
    for (int i = 0; i < 3; ++i) rows.push_back({d(i, 0), d(i, 1), d(i, 2)});
    return rows;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json geometry_json(const SimConfig& c) {
    return {{"radius", c.geometry.radius},
            {"h_cell", c.geometry.h_cell},
            {"extents", c.geometry.extents},
            {"cells", c.geometry.cells}};
}

json materials_json(const SimConfig& c) {
    const auto& m = c.materials;
    json diffusion = json::object();
    for (int s = 0; s < chemistry::kNumSpecies; ++s) diffusion[chemistry::kSpeciesNames[s]] = tensor_json(m.diffusion[s]);
    return {{"matrix_poisson", m.matrix_poisson},
            {"modulus_law", {{"slope", m.law.slope}, {"intercept", m.law.intercept}}},
            {"fibril",
             {{"young_transverse", m.fibril.young_transverse},
              {"poisson_transverse", m.fibril.poisson_transverse},
              {"modulus_ratio", m.fibril.modulus_ratio},
              {"poisson_axial", m.fibril.poisson_axial},
              {"shear_axial", m.fibril.shear_axial}}},
            {"anchors", m.anchors},
            {"b_to_uM", m.b_to_uM},
            {"diffusion", diffusion}};
}

json to_json(const SimConfig& c) {
    const auto& f = c.fluxes;
    const auto& p = c.stepping.policy;
    json j;
    j["geometry"] = geometry_json(c);
    j["materials"] = materials_json(c);
    j["kinetics"] = {{"k_eE", c.kinetics.k_eE},
                     {"k_dc1", c.kinetics.k_dc1},
                     {"k_dc2", c.kinetics.k_dc2},
                     {"k_b", c.kinetics.k_b},
                     {"R_d", c.kinetics.R_d}};
    j["fluxes"] = {{"beta_E", f.beta_E},     {"zeta_E", f.zeta_E},     {"gamma_E", f.gamma_E},
                   {"beta_e", f.beta_e},     {"zeta_e", f.zeta_e},     {"gamma_e", f.gamma_e},
                   {"gamma_d", f.gamma_d},   {"gamma_c1", f.gamma_c1}, {"gamma_c2", f.gamma_c2},
                   {"zeta_c1", f.zeta_c1},   {"zeta_c2", f.zeta_c2},   {"gamma_b", f.gamma_b}};
    j["loads"] = {{"p_inner", c.loads.p_inner},
                  {"traction_exterior", c.loads.traction_exterior},
                  {"traction_upper", c.loads.traction_upper}};
    j["initial"] = {{"p1", c.initial.p1}, {"p2", c.initial.p2}, {"n1", c.initial.n1}, {"n2", c.initial.n2},
                    {"b", c.initial.b}};
    j["coupling"] = {{"model", c.coupling.model == chemistry::Model::I ? "I" : "II"},
                     {"variant", c.coupling.variant == chemistry::Variant::Stress ? "stress" : "strain"},
                     {"delta", optional_json(c.coupling.delta)},
                     {"normalize_ball_average", c.coupling.normalize_ball_average},
                     {"normalize_effective_by_theta_M", c.coupling.normalize_effective_by_theta_m},
                     {"frozen_signal", optional_json(c.coupling.frozen_signal)},
                     {"localization_modulus", optional_json(c.coupling.localization_modulus)}};
    j["stepping"] = {{"dt", p.dt},
                     {"t_end", c.stepping.t_end},
                     {"dt_min", p.dt_min},
                     {"inner_tolerance", p.inner_tolerance},
                     {"b_floor", p.b_floor},
                     {"max_inner", p.max_inner},
                     {"min_substeps", p.min_substeps},
                     {"max_substep_rate", p.max_substep_rate},
                     {"solver_tolerance", p.solver_tolerance}};
    j["output"] = {{"directory", c.output.directory},
                   {"snapshot_every", c.output.snapshot_every},
                   {"seed", c.output.seed},
                   {"threads", c.output.threads},
                   {"cache_dir", c.output.cache_dir}};
    return j;
}

}  // namespace

SimConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("<root>: malformed JSON: ") + e.what()});
    }
    return from_json(root);
}

SimConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::vector<std::string> range_problems(const SimConfig& c) {
    std::vector<std::string> p;
    auto need = [&](bool ok, const std::string& path, const std::string& what) {
        if (!ok) p.push_back(path + ": " + what);
    };
    const auto& g = c.geometry;
    need(g.radius >= 0.0, "geometry.radius", "radius must be >= 0");
    need(g.radius < 0.5, "geometry.radius", "radius must be < 0.5");
    need(g.h_cell > 0.0 && g.h_cell <= 0.25, "geometry.h_cell", "must lie in (0, 0.25]");
    for (int i = 0; i < 3; ++i) {
        need(g.extents[i] > 0.0, "geometry.extents", "extents must be positive");
        need(g.cells[i] >= 1, "geometry.cells", "cell counts must be >= 1");
    }
    const auto& m = c.materials;
    need(m.matrix_poisson > -1.0 && m.matrix_poisson < 0.5, "materials.matrix_poisson", "must lie in (-1, 0.5)");
    need(m.law.slope >= 0.0, "materials.modulus_law.slope", "must be >= 0");
    need(m.law.intercept > 0.0, "materials.modulus_law.intercept", "must be > 0");
    try {
        materials::transversely_isotropic_compliance(m.fibril);
    } catch (const Error& e) {
        p.push_back(std::string("materials.fibril: ") + e.what());
    }
    need(m.anchors[0] > 0.0 && m.anchors[1] > 0.0, "materials.anchors", "anchor moduli must be positive");
    need(m.anchors[0] != m.anchors[1], "materials.anchors", "anchor moduli must differ");
    need(m.b_to_uM > 0.0, "materials.b_to_uM", "must be > 0");
    for (int s = 0; s < chemistry::kNumSpecies; ++s) {
        const std::string path = std::string("materials.diffusion.") + chemistry::kSpeciesNames[s];
        const Eigen::Matrix3d& d = m.diffusion[s];
        if ((d - d.transpose()).cwiseAbs().maxCoeff() > 1e-14 * (1.0 + d.cwiseAbs().maxCoeff())) {
            p.push_back(path + ": tensor must be symmetric");
            continue;
        }
        if (d.isZero(0.0)) continue;
        const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(d).eigenvalues()(0);
        need(lmin > 0.0, path, "tensor must be zero or positive definite");
    }
    const auto& k = c.kinetics;
    for (auto [v, name] : {std::pair{k.k_eE, "k_eE"}, {k.k_dc1, "k_dc1"}, {k.k_dc2, "k_dc2"}, {k.k_b, "k_b"},
                           {k.R_d, "R_d"}}) {
        need(v >= 0.0, std::string("kinetics.") + name, "must be >= 0");
    }
    const auto& f = c.fluxes;
    for (auto [v, name] : {std::pair{f.beta_E, "beta_E"}, {f.zeta_E, "zeta_E"}, {f.gamma_E, "gamma_E"},
                           {f.beta_e, "beta_e"}, {f.zeta_e, "zeta_e"}, {f.gamma_e, "gamma_e"},
                           {f.gamma_d, "gamma_d"}, {f.gamma_c1, "gamma_c1"}, {f.gamma_c2, "gamma_c2"},
                           {f.zeta_c1, "zeta_c1"}, {f.zeta_c2, "zeta_c2"}, {f.gamma_b, "gamma_b"}}) {
        need(v >= 0.0, std::string("fluxes.") + name, "must be >= 0");
    }
    const auto& i = c.initial;
    for (auto [v, name] : {std::pair{i.p1, "p1"}, {i.p2, "p2"}, {i.n1, "n1"}, {i.n2, "n2"}, {i.b, "b"}}) {
        need(v >= 0.0, std::string("initial.") + name, "must be >= 0");
    }
    const auto& cp = c.coupling;
    if (cp.delta) need(*cp.delta > 0.0, "coupling.delta", "must be > 0");
    if (cp.frozen_signal) need(*cp.frozen_signal >= 0.0, "coupling.frozen_signal", "must be >= 0");
    if (cp.localization_modulus) need(*cp.localization_modulus > 0.0, "coupling.localization_modulus", "must be > 0");
    const auto& pol = c.stepping.policy;
    need(pol.dt > 0.0, "stepping.dt", "must be > 0");
    need(c.stepping.t_end > 0.0, "stepping.t_end", "must be > 0");
    need(pol.dt_min > 0.0 && pol.dt_min <= pol.dt, "stepping.dt_min", "must lie in (0, dt]");
    need(pol.inner_tolerance > 0.0, "stepping.inner_tolerance", "must be > 0");
    need(pol.b_floor > 0.0, "stepping.b_floor", "must be > 0");
    need(pol.max_inner >= 2, "stepping.max_inner", "must be >= 2");
    need(pol.min_substeps >= 1, "stepping.min_substeps", "must be >= 1");
    need(pol.max_substep_rate > 0.0 && pol.max_substep_rate <= 1.0, "stepping.max_substep_rate",
         "must lie in (0, 1]");
    need(pol.solver_tolerance > 0.0 && pol.solver_tolerance < 1.0, "stepping.solver_tolerance",
         "must lie in (0, 1)");
    need(c.output.snapshot_every >= 0, "output.snapshot_every", "must be >= 0");
    need(c.output.threads >= 1, "output.threads", "must be >= 1");
    need(!c.output.directory.empty(), "output.directory", "must not be empty");
    return p;
}

void validate_config(const SimConfig& c) {
    auto p = range_problems(c);
    if (!p.empty()) throw ConfigError(std::move(p));
}

std::string echo_config(const SimConfig& config) { return to_json(config).dump(2) + "\n"; }

std::string canonical_cell_inputs(const SimConfig& c) {
    json j;
    j["geometry"] = {{"radius", c.geometry.radius}, {"h_cell", c.geometry.h_cell}};
    j["materials"] = materials_json(c);
    j["normalize_effective_by_theta_M"] = c.coupling.normalize_effective_by_theta_m;
    j["localization_modulus"] = effective_localization_modulus(c);
    j["solver_tolerance"] = CellSolveOptions{}.solver.tolerance;
    return j.dump();
}

void apply_environment_overrides(SimConfig& config) {
    if (const char* out = std::getenv("CELLWALL_OUT"); out && *out) config.output.directory = out;
    if (const char* t = std::getenv("CELLWALL_THREADS"); t && *t) {
        char* end = nullptr;
        const long n = std::strtol(t, &end, 10);
        if (*end != '\0' || n < 1 || n > 1024) {
            throw ConfigError({std::string("CELLWALL_THREADS: expected a positive integer, got \"") + t + "\""});
        }
        config.output.threads = static_cast<int>(n);
    }
}

double effective_delta(const SimConfig& config) {
    return config.coupling.delta ? *config.coupling.delta : 0.1 * config.geometry.extents[0];
}

double effective_localization_modulus(const SimConfig& config) {
    if (config.coupling.localization_modulus) return *config.coupling.localization_modulus;
    return config.materials.law(config.initial.b * config.materials.b_to_uM);
}

bool operator==(const SimConfig& a, const SimConfig& b) { return to_json(a) == to_json(b); }

}  // namespace cellwall::io
