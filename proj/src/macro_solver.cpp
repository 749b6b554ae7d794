#include "cellwall/macro_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cellwall/error.hpp"

namespace cellwall::macro {

namespace {

using chemistry::kNumSpecies;
using chemistry::SpeciesState;

SpeciesState node_state(const std::array<Vector, kNumSpecies>& f, int v) {
    return {f[0](v), f[1](v), f[2](v), f[3](v), f[4](v)};
}

void store(std::array<Vector, kNumSpecies>& f, int v, const SpeciesState& s) {
    f[0](v) = s.p1;
    f[1](v) = s.p2;
    f[2](v) = s.n1;
    f[3](v) = s.n2;
    f[4](v) = s.b;
}

SpeciesState axpy(const SpeciesState& s, double h, const SpeciesState& k) {
    return {s.p1 + h * k.p1, s.p2 + h * k.p2, s.n1 + h * k.n1, s.n2 + h * k.n2, s.b + h * k.b};
}

// Round-off negatives are zeroed; anything larger means the step is broken.
void clamp_field(Vector& f, const char* name) {
    const double scale = 1.0 + f.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        if (f(i) < 0.0) {
            if (f(i) < -1e-9 * scale) {
                std::ostringstream msg;
                msg << "species " << name << " became negative (" << f(i) << ")";
                throw DomainError(msg.str());
            }
            f(i) = 0.0;
        }
    }
}

}  // namespace

CoupledSolver::CoupledSolver(const MacroMesh& mesh, EffectiveModel model, SolverSettings settings)
    : mesh_(mesh),
      model_(std::move(model)),
      settings_(std::move(settings)),
      elasticity_(mesh, settings_.policy.solver_tolerance),
      scalar_map_(scalar_periodic_map(mesh)) {
    const auto& p = settings_.policy;
    if (!(p.dt > 0.0) || !(p.dt_min > 0.0) || p.dt_min > p.dt) throw DomainError("invalid time step policy");
    if (p.max_inner < 2) throw DomainError("max_inner must be at least 2");
    if (!(model_.theta_m > 0.0)) throw DomainError("matrix volume fraction must be positive");
    mass_ = lumped_mass(mesh);
    inner_mass_ = boundary_mass(mesh, BoundaryTag::Inner);
    exterior_mass_ = boundary_mass(mesh, BoundaryTag::Exterior);
    for (int s = 0; s < kNumSpecies; ++s) stiffness_[s] = assemble_diffusion(mesh, model_.diffusion[s]);

    const auto master = mesh.periodic_master();
    for (std::size_t v = 0; v < master.size(); ++v) {
        if (master[v] == static_cast<int>(v)) master_nodes_.push_back(static_cast<int>(v));
    }
    if (!settings_.frozen_signal) {
        if (settings_.model == chemistry::Model::I) {
            ball_nodes_ = master_nodes_;
        } else {
            for (int v : master_nodes_) {
                if (mesh.nodes[v][0] == 0.0) ball_nodes_.push_back(v);
            }
        }
        std::vector<Point3> points;
        for (int v : ball_nodes_) points.push_back(mesh.nodes[v]);
        ball_ = std::make_unique<coupling::BallQuadrature>(mesh, std::move(points), settings_.delta);
    }
    if (settings_.model == chemistry::Model::II && !settings_.frozen_signal) {
        modulation_ =
            std::make_unique<coupling::ModulationIntegral>(model_.localization, model_.matrix_poisson, settings_.variant);
    }
    load_ = elasticity_.traction_load(settings_.loads.p_inner, settings_.loads.traction_exterior,
                                      settings_.loads.traction_upper);
}

std::vector<Tensor4> CoupledSolver::element_tensors(const Vector& b) const {
    std::vector<Tensor4> out;
    out.reserve(mesh_.num_elements());
    for (const auto& hex : mesh_.hexes) {
        double mean = 0.0;
        for (int v : hex) mean += b(v);
        mean = std::max(mean / 8.0, 0.0);
        out.push_back(model_.family.evaluate(mean * settings_.b_to_uM));
    }
    return out;
}

Vector CoupledSolver::solve_displacement(const Vector& b) const {
    return elasticity_.solve(element_tensors(b), load_).u;
}

MacroState CoupledSolver::initial_state(const SpeciesState& initial) const {
    const auto s0 = chemistry::clamp_nonnegative(initial);
    const Eigen::Index n = static_cast<Eigen::Index>(mesh_.num_nodes());
    MacroState st;
    const double values[kNumSpecies] = {s0.p1, s0.p2, s0.n1, s0.n2, s0.b};
    for (int s = 0; s < kNumSpecies; ++s) st.species[s] = Vector::Constant(n, values[s]);
    const auto tensors = element_tensors(st.species[4]);
    st.u = elasticity_.solve(tensors, load_).u;
    Vector inner;
    mechanical_signals(st.species[4], st.u, tensors, st.signal, inner);
    st.dt_next = settings_.policy.dt;
    return st;
}

void CoupledSolver::mechanical_signals(const Vector& b, const Vector& u, const std::vector<Tensor4>& tensors,
                                       Vector& bulk, Vector& inner) const {
    const Eigen::Index n = static_cast<Eigen::Index>(mesh_.num_nodes());
    const bool model_one = settings_.model == chemistry::Model::I;
    if (settings_.frozen_signal) {
        const double v = *settings_.frozen_signal;
        bulk = Vector::Constant(n, model_one ? v : model_.theta_m * v);
        inner = Vector::Constant(n, v);
        return;
    }
    bulk = Vector::Zero(n);
    inner = Vector::Zero(n);
    const auto n_ball = coupling::n_delta_eff(*ball_, u, tensors, settings_.variant, settings_.normalize_ball_average);
    for (std::size_t i = 0; i < ball_nodes_.size(); ++i) inner(ball_nodes_[i]) = n_ball[i];
    if (model_one) {
        bulk = inner;
    } else {
        const auto strains = nodal_strains(mesh_, u);
        for (int v : master_nodes_) {
            const double young = model_.family.law(std::max(b(v), 0.0) * settings_.b_to_uM);
            bulk(v) = (*modulation_)(strain_to_voigt(strains[static_cast<std::size_t>(v)]), young);
        }
    }
    const auto master = mesh_.periodic_master();
    for (Eigen::Index v = 0; v < n; ++v) {
        bulk(v) = bulk(master[static_cast<std::size_t>(v)]);
        inner(v) = inner(master[static_cast<std::size_t>(v)]);
    }
}

Vector CoupledSolver::diffuse(int species, const Vector& start, const Vector& explicit_flux,
                              const Vector& implicit_rate, double dt) const {
    const auto& k = stiffness_[species];
    const std::size_t n = mesh_.num_nodes();
    fem::TripletBuilder tb(n, n);
    tb.reserve(k.nonzeros() + n);
    const auto& rp = k.row_ptr();
    const auto& ci = k.col_idx();
    const auto& kv = k.values();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t q = rp[i]; q < rp[i + 1]; ++q) tb.add(static_cast<int>(i), ci[q], dt * kv[q]);
        const auto ii = static_cast<Eigen::Index>(i);
        tb.add(static_cast<int>(i), static_cast<int>(i), mass_(ii) + dt * implicit_rate(ii));
    }
    const fem::SparseMatrix a = scalar_map_.reduce_matrix(tb.build());
    const Vector rhs_full = mass_.cwiseProduct(start) + dt * explicit_flux;
    const Vector rhs = scalar_map_.reduce_rhs(rhs_full);
    const Vector guess = scalar_map_.restrict_to_reduced(start);
    fem::SolverOptions opt;
    opt.tolerance = settings_.policy.solver_tolerance;
    const auto res = fem::solve_spd(a, rhs, opt, &guess);
    fem::require_converged(res, "species diffusion");
    return scalar_map_.expand(res.x);
}

std::array<Vector, kNumSpecies> CoupledSolver::chemistry_update(const MacroState& start, const Vector& bulk_signal,
                                                                const Vector& inner_signal, double dt) const {
    const auto& pol = settings_.policy;
    const auto model = settings_.model;
    const auto& kin = settings_.kinetics;
    std::array<Vector, kNumSpecies> out = start.species;

    // Reactions, node by node.
    for (int v : master_nodes_) {
        SpeciesState s = chemistry::clamp_nonnegative(node_state(start.species, v));
        const double sig = bulk_signal(v);
        const double lam = chemistry::stiffness_bound(s, sig, kin);
        const int nsub = std::max(pol.min_substeps, static_cast<int>(std::ceil(dt * lam / pol.max_substep_rate)));
        const double h = dt / nsub;
        auto rhs = [&](const SpeciesState& x) {
            return chemistry::well_mixed_rhs(x, sig, kin, model, model_.theta_m);
        };
        for (int i = 0; i < nsub; ++i) {
            const auto k1 = rhs(s);
            const auto k2 = rhs(axpy(s, 0.5 * h, k1));
            const auto k3 = rhs(axpy(s, 0.5 * h, k2));
            const auto k4 = rhs(axpy(s, h, k3));
            s = {s.p1 + h / 6.0 * (k1.p1 + 2.0 * k2.p1 + 2.0 * k3.p1 + k4.p1),
                 s.p2 + h / 6.0 * (k1.p2 + 2.0 * k2.p2 + 2.0 * k3.p2 + k4.p2),
                 s.n1 + h / 6.0 * (k1.n1 + 2.0 * k2.n1 + 2.0 * k3.n1 + k4.n1),
                 s.n2 + h / 6.0 * (k1.n2 + 2.0 * k2.n2 + 2.0 * k3.n2 + k4.n2),
                 s.b + h / 6.0 * (k1.b + 2.0 * k2.b + 2.0 * k3.b + k4.b)};
            s = {std::max(s.p1, 0.0), std::max(s.p2, 0.0), std::max(s.n1, 0.0), std::max(s.n2, 0.0),
                 std::max(s.b, 0.0)};
        }
        store(out, v, s);
    }
    const auto master = mesh_.periodic_master();
    for (std::size_t v = 0; v < master.size(); ++v) {
        if (master[v] != static_cast<int>(v)) store(out, static_cast<int>(v), node_state(out, master[v]));
    }

    // Diffusion with the boundary fluxes, scaled by 1/theta_M.
    const double total_pe = std::max(integral(start.species[0]), 0.0);
    const auto ext = chemistry::boundary_flux_coefficients(chemistry::BoundarySide::Exterior, total_pe, 0.0,
                                                           settings_.fluxes, model);
    const double scale = 1.0 / model_.theta_m;
    const int diffusing = model == chemistry::Model::I ? 4 : 5;
    const Eigen::Index n = static_cast<Eigen::Index>(mesh_.num_nodes());
    std::vector<chemistry::FluxCoefficients> inner(static_cast<std::size_t>(n));
    for (Eigen::Index v = 0; v < n; ++v) {
        if (inner_mass_(v) > 0.0) {
            inner[static_cast<std::size_t>(v)] = chemistry::boundary_flux_coefficients(
                chemistry::BoundarySide::Inner, total_pe, inner_signal(v), settings_.fluxes, model);
        }
    }
    for (int s = 0; s < diffusing; ++s) {
        Vector a(n), c(n);
        for (Eigen::Index v = 0; v < n; ++v) {
            const auto& in = inner[static_cast<std::size_t>(v)];
            a(v) = scale * (inner_mass_(v) * in.source[s] + exterior_mass_(v) * ext.source[s]);
            c(v) = scale * (inner_mass_(v) * in.rate[s] + exterior_mass_(v) * ext.rate[s]);
        }
        out[s] = diffuse(s, out[s], a, c, dt);
        clamp_field(out[s], chemistry::kSpeciesNames[s]);
    }
    return out;
}

bool CoupledSolver::try_step(MacroState& state, double dt, StepReport& report) const {
    const auto& pol = settings_.policy;
    Vector b_iter = state.species[4];
    std::array<Vector, kNumSpecies> result;
    Vector u, bulk, inner;
    double prev_diff = -1.0, max_ratio = 0.0;
    int k = 1;
    bool converged = false;
    for (; k <= pol.max_inner; ++k) {
        const auto tensors = element_tensors(b_iter);
        u = elasticity_.solve(tensors, load_).u;
        mechanical_signals(b_iter, u, tensors, bulk, inner);
        result = chemistry_update(state, bulk, inner, dt);
        const double diff = (result[4] - b_iter).cwiseAbs().maxCoeff();
        if (k >= 2 && prev_diff > 0.0) max_ratio = std::max(max_ratio, diff / prev_diff);
        prev_diff = diff;
        b_iter = result[4];
        const double scale = std::max(b_iter.cwiseAbs().maxCoeff(), pol.b_floor);
        report.inner_residual = diff / scale;
        if (k >= 2 && diff <= pol.inner_tolerance * scale) {
            converged = true;
            break;
        }
    }
    if (!converged) return false;
    // The stored displacement and signal belong to the accepted b.
    const auto tensors = element_tensors(result[4]);
    state.u = elasticity_.solve(tensors, load_).u;
    mechanical_signals(result[4], state.u, tensors, state.signal, inner);
    state.species = std::move(result);
    state.time += dt;
    state.step += 1;
    report.dt_used = dt;
    report.inner_iterations = k;
    report.contraction_ratio = max_ratio;
    report.strain_norm = strain_norm(mesh_, state.u);
    return true;
}

StepReport CoupledSolver::step(MacroState& state, double t_end) const {
    const auto& pol = settings_.policy;
    const double base = state.dt_next > 0.0 ? std::min(state.dt_next, pol.dt) : pol.dt;
    const double remaining = t_end - state.time;
    if (!(remaining > 0.0)) throw DomainError("step requested past the end time");
    double dt = std::min(base, remaining);
    StepReport report;
    while (true) {
        if (try_step(state, dt, report)) break;
        if (dt * 0.5 < pol.dt_min) {
            std::ostringstream msg;
            msg << "fixed-point iteration on b did not converge at t = " << state.time << " with dt = " << dt;
            throw SolverError(msg.str(), pol.max_inner, report.inner_residual);
        }
        dt *= 0.5;
        ++report.halvings;
    }
    state.dt_next = report.halvings > 0 ? dt : std::min(pol.dt, 2.0 * base);
    return report;
}

StepReport step_model_I(MacroState& state, const CoupledSolver& solver, double t_end) {
    if (solver.settings().model != chemistry::Model::I) throw DomainError("solver is not configured for Model I");
    return solver.step(state, t_end);
}

StepReport step_model_II(MacroState& state, const CoupledSolver& solver, double t_end) {
    if (solver.settings().model != chemistry::Model::II) throw DomainError("solver is not configured for Model II");
    return solver.step(state, t_end);
}

}  // namespace cellwall::macro
