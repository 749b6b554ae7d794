#include "cellwall/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include "cellwall/coupling.hpp"
#include "cellwall/error.hpp"
#include "cellwall/homogenization.hpp"
#include "cellwall/io.hpp"
#include "cellwall/macro_fem.hpp"
#include "cellwall/materials.hpp"

namespace cellwall::validation {

namespace {

using chemistry::SpeciesState;

SpeciesState oracle_rhs(const WellMixedProblem& p, const SpeciesState& s) {
    const auto& k = p.kinetics;
    const double ee = chemistry::rate_eE(s.p1, s.p2, k);
    const double dc = chemistry::rate_dc(s.n1, s.n2, k);
    const double br = chemistry::rate_b(s.b, k) * p.signal;
    const double formation = p.model == chemistry::Model::I ? dc : p.theta_m * dc;
    return {-ee, 0.0, ee - 2.0 * dc - k.R_d * s.n1 + 2.0 * br, br - dc, formation - br};
}

SpeciesState combine(const SpeciesState& s, double h, const SpeciesState& k) {
    return {s.p1 + h * k.p1, s.p2 + h * k.p2, s.n1 + h * k.n1, s.n2 + h * k.n2, s.b + h * k.b};
}

SpeciesState rk4_step(const WellMixedProblem& p, const SpeciesState& s, double h) {
    const auto k1 = oracle_rhs(p, s);
    const auto k2 = oracle_rhs(p, combine(s, 0.5 * h, k1));
    const auto k3 = oracle_rhs(p, combine(s, 0.5 * h, k2));
    const auto k4 = oracle_rhs(p, combine(s, h, k3));
    SpeciesState out = s;
    out = combine(out, h / 6.0, k1);
    out = combine(out, h / 3.0, k2);
    out = combine(out, h / 3.0, k3);
    out = combine(out, h / 6.0, k4);
    return out;
}

std::array<double, 5> as_array(const SpeciesState& s) { return {s.p1, s.p2, s.n1, s.n2, s.b}; }

CheckResult check(std::string name, double value, double tol, std::string detail = "") {
    return {std::move(name), value <= tol, value, tol, std::move(detail)};
}

double rel_gap(double a, double b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

bool in_tetragonal_pattern(int i, int j) {
    if (i > j) std::swap(i, j);
    if (i < 3 && j < 3) return true;
    return i == j;
}

}  // namespace

std::string format_checks(const std::vector<CheckResult>& checks) {
    std::ostringstream s;
    for (const auto& c : checks) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s %-44s value=%.6e tol=%.1e", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                      c.value, c.tolerance);
        s << buf;
        if (!c.detail.empty()) s << "  " << c.detail;
        s << '\n';
    }
    return s.str();
}

bool all_passed(const std::vector<CheckResult>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

WellMixedTrajectory well_mixed_oracle(const WellMixedProblem& problem, double t_end, double dt_ref,
                                      int record_every) {
    if (!(dt_ref > 0.0) || !(t_end >= 0.0)) throw DomainError("well-mixed oracle needs dt_ref > 0 and t_end >= 0");
    const long steps = std::max(1L, std::lround(std::ceil(t_end / dt_ref - 1e-9)));
    const double h = t_end / static_cast<double>(steps);
    WellMixedTrajectory out;
    SpeciesState s = problem.initial;
    out.time.push_back(0.0);
    out.state.push_back(s);
    for (long i = 1; i <= steps; ++i) {
        s = rk4_step(problem, s, h);
        if ((record_every > 0 && i % record_every == 0) || i == steps) {
            out.time.push_back(i == steps ? t_end : static_cast<double>(i) * h);
            out.state.push_back(s);
        }
    }
    return out;
}

SpeciesState well_mixed_final(const WellMixedProblem& problem, double t_end, double dt_ref) {
    return well_mixed_oracle(problem, t_end, dt_ref, 0).state.back();
}

double richardson_defect(const WellMixedProblem& problem, double t_end, double dt_ref) {
    const auto a = as_array(well_mixed_final(problem, t_end, dt_ref));
    const auto b = as_array(well_mixed_final(problem, t_end, 0.5 * dt_ref));
    double d = 0.0;
    for (int i = 0; i < 5; ++i) d = std::max(d, rel_gap(a[i], b[i]));
    return d;
}

WellMixedProblem golden_problem() {
    WellMixedProblem p;
    p.initial = {1.0, 0.5, 0.3, 0.8, 0.6};
    p.signal = 0.7;
    p.kinetics = {1.2, 0.9, 1.1, 0.8, 0.3};
    p.model = chemistry::Model::I;
    return p;
}

std::string format_golden(const WellMixedProblem& p, double dt_ref, const std::vector<double>& sample_times,
                          const std::string& git_hash) {
    const double t_end = sample_times.empty() ? 0.0 : sample_times.back();
    const double defect = richardson_defect(p, t_end, dt_ref);
    std::ostringstream s;
    s << "# well-mixed RK4 reference\n";
    s << "# git " << (git_hash.empty() ? "unknown" : git_hash) << '\n';
    s << "# mesh none (spatially uniform system)\n";
    s << "# dt_ref " << io::format_double(dt_ref) << " richardson_defect " << io::format_double(defect)
      << " tolerance 1e-10\n";
    s << "# model " << (p.model == chemistry::Model::I ? "I" : "II") << " signal " << io::format_double(p.signal)
      << " theta_m " << io::format_double(p.theta_m) << '\n';
    const auto& k = p.kinetics;
    s << "# kinetics k_eE " << io::format_double(k.k_eE) << " k_dc1 " << io::format_double(k.k_dc1) << " k_dc2 "
      << io::format_double(k.k_dc2) << " k_b " << io::format_double(k.k_b) << " R_d " << io::format_double(k.R_d)
      << '\n';
    s << "t p1 p2 n1 n2 b\n";
    for (double t : sample_times) {
        const auto v = as_array(t == 0.0 ? p.initial : well_mixed_final(p, t, dt_ref));
        s << io::format_double(t);
        for (double x : v) s << ' ' << io::format_double(x);
        s << '\n';
    }
    return s.str();
}

std::vector<GoldenRow> parse_golden(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<GoldenRow> rows;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != "t p1 p2 n1 n2 b") throw IoError("golden file: unexpected column header");
            header = true;
            continue;
        }
        std::istringstream ls(line);
        GoldenRow r{};
        if (!(ls >> r.time >> r.state.p1 >> r.state.p2 >> r.state.n1 >> r.state.n2 >> r.state.b)) {
            throw IoError("golden file: malformed row '" + line + "'");
        }
        rows.push_back(r);
    }
    if (!header) throw IoError("golden file: missing column header");
    return rows;
}

ReferenceTableReport reference_table_harness(double h, int threads) {
    const auto start = std::chrono::steady_clock::now();
    ReferenceTableReport r;
    r.h = h;
    const UnitCellMesh mesh = build_unit_cell_mesh(0.25, h);
    r.vertices = mesh.vertices.size();
    r.mesh_id = mesh.id;
    r.theta_m = volume_fractions(mesh).matrix;
    CellSolveOptions opt;
    opt.threads = threads;
    const fem::ByRegion<Tensor4> stiffness{
        materials::isotropic_tensor(10.0, 0.3),
        materials::transversely_isotropic_tensor(materials::reference_fibril_constants())};
    const auto set = homog::solve_elastic_correctors(mesh, stiffness, opt);
    const Voigt6 raw = homog::effective_elasticity_matrix(mesh, set);
    r.symmetry_residual = (raw - raw.transpose()).cwiseAbs().maxCoeff() / raw.cwiseAbs().maxCoeff();
    r.computed = homog::effective_elasticity(mesh, set).voigt_matrix();
    const auto& c = r.computed;
    r.value = {c(0, 0), c(0, 1), c(0, 2), c(2, 2), c(3, 3), c(5, 5)};
    for (int i = 0; i < 6; ++i) r.deviation[i] = (r.value[i] - kReferenceTargets[i]) / kReferenceTargets[i];
    r.tetragonal_residual = std::max({rel_gap(c(0, 0), c(1, 1)), rel_gap(c(3, 3), c(4, 4)), rel_gap(c(0, 2), c(1, 2))});
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            if (!in_tetragonal_pattern(i, j)) r.non_tetragonal = std::max(r.non_tetragonal, std::abs(c(i, j)) / c(0, 0));
        }
    }
    r.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Voigt6>(c).eigenvalues()(0);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::string format_reference_report(const ReferenceTableReport& r) {
    std::ostringstream s;
    char buf[200];
    std::snprintf(buf, sizeof buf, "effective elasticity, h = 1/%g (%zu vertices, theta_M = %.8f, %.1f s)\n",
                  1.0 / r.h, r.vertices, r.theta_m, r.seconds);
    s << buf;
    s << io::format_voigt_table(r.computed);
    for (int i = 0; i < 6; ++i) {
        std::snprintf(buf, sizeof buf, "  %s computed %14.6f reference %10.1f deviation %+8.2f%%\n", kReferenceNames[i],
                      r.value[i], kReferenceTargets[i], 100.0 * r.deviation[i]);
        s << buf;
    }
    std::snprintf(buf, sizeof buf,
                  "  symmetry residual %.2e, tetragonal residual %.2e, non-tetragonal max %.2e, min eigenvalue %.6f\n",
                  r.symmetry_residual, r.tetragonal_residual, r.non_tetragonal, r.min_eigenvalue);
    s << buf;
    return s.str();
}

std::vector<CheckResult> tetragonal_checks(const Voigt6& c, double rel_tol, double zero_tol) {
    std::vector<CheckResult> out;
    out.push_back(check("C11 = C22", rel_gap(c(0, 0), c(1, 1)), rel_tol));
    out.push_back(check("C44 = C55", rel_gap(c(3, 3), c(4, 4)), rel_tol));
    out.push_back(check("C13 = C23", rel_gap(c(0, 2), c(1, 2)), rel_tol));
    double off = 0.0;
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            if (!in_tetragonal_pattern(i, j)) off = std::max(off, std::abs(c(i, j)) / std::abs(c(0, 0)));
        }
    }
    out.push_back(check("non-tetragonal couplings / C11", off, zero_tol));
    const double lmin = Eigen::SelfAdjointEigenSolver<Voigt6>(0.5 * (c + c.transpose())).eigenvalues()(0);
    out.push_back({"Voigt minimum eigenvalue > 0", lmin > 0.0, lmin, 0.0, ""});
    return out;
}

std::vector<CheckResult> bounds_checks(const UnitCellMesh& mesh, const std::array<Tensor4, 2>& constituents,
                                       const Voigt6& effective, const std::string& label) {
    double lmin = std::numeric_limits<double>::infinity();
    Voigt6 average = Voigt6::Zero();
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& c = constituents[static_cast<std::size_t>(mesh.regions[t])];
        average += mesh.triangle_area(t) * c.voigt_matrix();
    }
    for (int r = 0; r < 2; ++r) {
        const bool used = std::find(mesh.regions.begin(), mesh.regions.end(), static_cast<Region>(r)) != mesh.regions.end();
        if (used) lmin = std::min(lmin, constituents[static_cast<std::size_t>(r)].min_eigenvalue());
    }
    const Voigt6 sym = 0.5 * (effective + effective.transpose());
    const double scale = average.cwiseAbs().maxCoeff();
    const double low = Eigen::SelfAdjointEigenSolver<Voigt6>(sym).eigenvalues()(0);
    const double gap = Eigen::SelfAdjointEigenSolver<Voigt6>(average - sym).eigenvalues()(0);
    std::vector<CheckResult> out;
    // Reported as violations, so zero or negative passes.
    out.push_back(check(label + ": lower bound violation", (lmin - low) / scale, 1e-10));
    out.push_back(check(label + ": arithmetic bound violation", -gap / scale, 1e-10));
    return out;
}

Voigt6 random_spd_voigt(std::uint64_t seed, double lo, double hi) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uni(lo, hi);
    Voigt6 g;
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) g(i, j) = normal(rng);
    }
    const Voigt6 q = Eigen::HouseholderQR<Voigt6>(g).householderQ();
    Vec6 lambda;
    for (int i = 0; i < 6; ++i) lambda(i) = uni(rng);
    Voigt6 c = q * lambda.asDiagonal() * q.transpose();
    return 0.5 * (c + c.transpose());
}

std::vector<CheckResult> random_bounds_suite(int draws, std::uint64_t seed, double h) {
    const UnitCellMesh mesh = build_unit_cell_mesh(0.25, h);
    std::vector<CheckResult> out;
    for (int d = 0; d < draws; ++d) {
        const std::array<Tensor4, 2> c{Tensor4::from_voigt(random_spd_voigt(seed + 2 * d, 1.0, 10.0)),
                                       Tensor4::from_voigt(random_spd_voigt(seed + 2 * d + 1, 1.0, 100.0))};
        const auto set = homog::solve_elastic_correctors(mesh, {c[0], c[1]});
        const Voigt6 eff = homog::effective_elasticity(mesh, set).voigt_matrix();
        const auto checks = bounds_checks(mesh, c, eff, "random draw " + std::to_string(d + 1));
        out.insert(out.end(), checks.begin(), checks.end());
    }
    return out;
}

std::vector<CheckResult> homogeneous_checks(double h, const Tensor4& material) {
    const UnitCellMesh mesh = build_unit_cell_mesh(0.25, h);
    const auto set = homog::solve_elastic_correctors(mesh, {material, material});
    double wmax = 0.0;
    for (const auto& w : set.w) wmax = std::max(wmax, w.cwiseAbs().maxCoeff());
    const Tensor4 eff = homog::effective_elasticity(mesh, set);
    const auto loc = homog::localization_field(mesh, set, 0.0);
    double lmax = 0.0;
    for (const auto& s : loc.sample) lmax = std::max(lmax, (s - Voigt6::Identity()).cwiseAbs().maxCoeff());
    return {check("homogeneous: corrector max norm", wmax, 1e-10),
            check("homogeneous: effective tensor deviation", relative_difference(eff, material), 1e-10),
            check("homogeneous: localization deviation from identity", lmax, 1e-10)};
}

double monte_carlo_ball_integral(const Point3& x, double delta, const std::array<double, 3>& extents,
                                 const std::function<double(const Point3&)>& f, std::size_t samples,
                                 std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        Point3 y;
        double r2 = 0.0;
        for (int c = 0; c < 3; ++c) {
            const double d = uni(rng) * delta;
            y[c] = x[c] + d;
            r2 += d * d;
        }
        if (r2 > delta * delta) continue;
        bool inside = true;
        for (int c = 0; c < 3; ++c) inside = inside && y[c] >= 0.0 && y[c] <= extents[c];
        if (inside) sum += f(y);
    }
    const double cube = 8.0 * delta * delta * delta;
    return cube * sum / static_cast<double>(samples);
}

std::vector<CheckResult> diffusion_checks(double h) {
    const UnitCellMesh mesh = build_unit_cell_mesh(0.25, h);
    const double theta_m = volume_fractions(mesh).matrix;
    Eigen::Matrix3d d = Eigen::Matrix3d::Zero();
    d.diagonal() << 1.3, 1.3, 2.0;
    const auto set = homog::solve_scalar_correctors(mesh, d);
    const Eigen::Matrix3d eff = homog::effective_diffusion(set, false);
    return {check("diffusion: axial entry equals theta_M D33", rel_gap(eff(2, 2), theta_m * d(2, 2)), 1e-10),
            check("diffusion: axial corrector vanishes", set.v[2].cwiseAbs().maxCoeff(), 1e-12),
            check("diffusion: D11 = D22", rel_gap(eff(0, 0), eff(1, 1)), 1e-8),
            check("diffusion: off-diagonal entries vanish",
                  std::max({std::abs(eff(0, 1)), std::abs(eff(0, 2)), std::abs(eff(1, 2))}) / eff(0, 0), 1e-8),
            check("diffusion: D11 strictly below theta_M D11", eff(0, 0) < theta_m * d(0, 0) ? 0.0 : 1.0, 0.0,
                  "D11=" + std::to_string(eff(0, 0)) + " theta_M*D11=" + std::to_string(theta_m * d(0, 0)))};
}

std::vector<CheckResult> ball_checks(std::uint64_t seed) {
    std::vector<CheckResult> out;
    const MacroMesh mesh = build_macro_mesh({1.0, 1.0, 1.0}, {4, 4, 4});
    const double delta = 0.1, c = 0.6;
    macro::Vector u(3 * static_cast<Eigen::Index>(mesh.num_nodes()));
    for (std::size_t v = 0; v < mesh.num_nodes(); ++v) {
        for (int k = 0; k < 3; ++k) u(3 * static_cast<Eigen::Index>(v) + k) = c / 3.0 * mesh.nodes[v][k];
    }
    const std::vector<Point3> pts{{0.5, 0.5, 0.5}, {0.0, 0.5, 0.5}};
    const coupling::BallQuadrature quad(mesh, pts, delta);
    const std::vector<Tensor4> tensors(mesh.num_elements(), materials::isotropic_tensor(1.0, 0.3));
    const auto n = coupling::n_delta_eff(quad, u, tensors, chemistry::Variant::Strain);
    const double exact = c * 4.0 / 3.0 * M_PI * delta * delta * delta;
    out.push_back(check("ball: interior constant field", std::abs(n[0] - exact) / exact, 0.01));
    const double mc = monte_carlo_ball_integral(pts[1], delta, mesh.extents, [&](const Point3&) { return c; },
                                                2000000, seed);
    out.push_back(check("ball: boundary half-ball vs Monte Carlo", std::abs(n[1] - mc) / mc, 0.01));
    const auto neg = coupling::n_delta_eff(quad, -u, tensors, chemistry::Variant::Strain);
    out.push_back(check("ball: negative trace maps to zero", std::max(std::abs(neg[0]), std::abs(neg[1])), 0.0));
    return out;
}

std::vector<CheckResult> run_validation_suite(const SuiteOptions& options, std::string* report) {
    std::vector<CheckResult> out;
    auto add = [&](const std::vector<CheckResult>& v) { out.insert(out.end(), v.begin(), v.end()); };

    // Well-mixed oracle self-checks.
    {
        WellMixedProblem decay;
        decay.initial = {0.0, 0.0, 0.0, 0.0, 1.0};
        decay.signal = 0.7;
        decay.kinetics.k_b = 1.3;
        decay.kinetics.k_dc1 = 0.0;  // released calcium must not re-form cross-links
        const double b = well_mixed_final(decay, 1.0, 1e-3).b;
        out.push_back(check("oracle: breakage-only decay vs exponential", rel_gap(b, std::exp(-1.3 * 0.7)), 1e-12));

        WellMixedProblem exchange = golden_problem();
        exchange.kinetics.k_eE = 0.0;
        exchange.kinetics.R_d = 0.0;
        const auto traj = well_mixed_oracle(exchange, 1.0, 1e-3);
        const double c0 = exchange.initial.n1 + 2.0 * exchange.initial.b;
        double drift = 0.0;
        for (const auto& s : traj.state) drift = std::max(drift, std::abs(s.n1 + 2.0 * s.b - c0) / c0);
        out.push_back(check("oracle: n1 + 2b conserved under pure exchange", drift, 1e-12));
        out.push_back(check("oracle: Richardson self-check", richardson_defect(golden_problem(), 1.0, 1e-3), 1e-10));
    }

    // Reference cell solve.
    {
        const auto t1 = reference_table_harness(options.h, options.threads);
        if (report) *report += format_reference_report(t1);
        add(tetragonal_checks(t1.computed));
        out.push_back(check("reference solve: raw symmetry residual", t1.symmetry_residual, 1e-10));
        const UnitCellMesh mesh = build_unit_cell_mesh(0.25, options.h);
        add(bounds_checks(mesh,
                          {materials::isotropic_tensor(10.0, 0.3),
                           materials::transversely_isotropic_tensor(materials::reference_fibril_constants())},
                          t1.computed, "reference solve"));
    }
    add(random_bounds_suite(10, options.seed, 1.0 / 16.0));
    add(homogeneous_checks(1.0 / 16.0, materials::isotropic_tensor(10.0, 0.3)));

    add(diffusion_checks(1.0 / 32.0));
    add(ball_checks(options.seed));
    return out;
}

}  // namespace cellwall::validation
