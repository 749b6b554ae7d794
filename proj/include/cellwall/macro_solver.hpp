#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cellwall/chemistry.hpp"
#include "cellwall/coupling.hpp"
#include "cellwall/homogenization.hpp"
#include "cellwall/macro_fem.hpp"
#include "cellwall/materials.hpp"
#include "cellwall/mesh.hpp"

namespace cellwall::macro {

/// Everything the macro problem needs from the cell problems.
struct EffectiveModel {
    materials::AffineTensorFamily family;
    /// Effective diffusion tensor per species (p1, p2, n1, n2, b).
    std::array<Eigen::Matrix3d, chemistry::kNumSpecies> diffusion;
    homog::LocalizationField localization;
    double theta_m = 1.0;
    double matrix_poisson = 0.3;
};

struct TimeStepperPolicy {
    double dt = 0.01;
    double dt_min = 0.01 / 64.0;  ///< halving floor
    double inner_tolerance = 1e-10;  ///< relative sup-norm change of b
    double b_floor = 1e-8;  ///< absolute scale used when b is near zero
    int max_inner = 50;
    int min_substeps = 4;  ///< reaction substeps per step, at least
    double max_substep_rate = 0.2;  ///< substep h * largest loss rate
    double solver_tolerance = 1e-12;
};

struct Loads {
    double p_inner = 0.0;  ///< pressure on the inner face
    double traction_exterior = 0.0;  ///< normal traction on the exterior face
    double traction_upper = 0.0;  ///< normal traction on the upper faces
};

struct SolverSettings {
    chemistry::Model model = chemistry::Model::I;
    chemistry::Variant variant = chemistry::Variant::Stress;
    chemistry::KineticsParams kinetics;
    chemistry::FluxParams fluxes;
    Loads loads;
    double delta = 0.1;
    bool normalize_ball_average = false;
    /// Forces N (Model I) or the pointwise modulation P (Model II).
    std::optional<double> frozen_signal;
    double b_to_uM = 1.0;  ///< converts b to the units of the modulus law
    TimeStepperPolicy policy;
};

/// Nodal fields on the macro mesh (slave nodes carry their master's value).
struct MacroState {
    double time = 0.0;
    long step = 0;
    double dt_next = 0.0;
    std::array<Vector, chemistry::kNumSpecies> species;  ///< p1, p2, n1, n2, b
    Vector u;  ///< displacement, interleaved
    Vector signal;  ///< last N (Model I) or matrix modulation integral (Model II) per node
};

struct StepReport {
    double dt_used = 0.0;
    int inner_iterations = 0;
    double contraction_ratio = 0.0;  ///< largest ratio observed in the accepted step
    int halvings = 0;
    double strain_norm = 0.0;
    double inner_residual = 0.0;  ///< last relative change of b (also on failure)
};

/// Time stepper of the coupled macroscopic system. Each step uses Lie
/// splitting (pointwise reactions by RK4, then implicit diffusion with the
/// boundary fluxes) inside a fixed-point loop on b:
///   b -> E_hom(b) -> u -> mechanical signal -> chemistry over dt -> b.
class CoupledSolver {
public:
    CoupledSolver(const MacroMesh& mesh, EffectiveModel model, SolverSettings settings);

    /// Uniform initial data; u solved for b0.
    MacroState initial_state(const chemistry::SpeciesState& initial) const;

    /// Advances by min(state.dt_next, t_end - time), halving on inner-loop
    /// failure down to the policy floor (then throws SolverError).
    StepReport step(MacroState& state, double t_end) const;

    /// One attempt with a fixed dt; returns false when the inner loop does
    /// not converge (state untouched).
    bool try_step(MacroState& state, double dt, StepReport& report) const;

    /// Per-element effective tensors for nodal b.
    std::vector<Tensor4> element_tensors(const Vector& b) const;
    /// Elasticity solve for nodal b.
    Vector solve_displacement(const Vector& b) const;

    /// Integral of a nodal field over the domain (lumped mass).
    double integral(const Vector& f) const { return mass_.dot(f); }
    const MacroMesh& mesh() const { return mesh_; }
    const SolverSettings& settings() const { return settings_; }
    const EffectiveModel& model() const { return model_; }
    const ElasticitySolver& elasticity() const { return elasticity_; }

private:
    std::array<Vector, chemistry::kNumSpecies> chemistry_update(const MacroState& start, const Vector& bulk_signal,
                                                                const Vector& inner_signal, double dt) const;
    void mechanical_signals(const Vector& b, const Vector& u, const std::vector<Tensor4>& tensors,
                            Vector& bulk, Vector& inner) const;
    Vector diffuse(int species, const Vector& start, const Vector& explicit_flux, const Vector& implicit_rate,
                   double dt) const;

    const MacroMesh& mesh_;
    EffectiveModel model_;
    SolverSettings settings_;
    ElasticitySolver elasticity_;
    fem::ConstraintMap scalar_map_;
    Vector mass_, inner_mass_, exterior_mass_;
    std::array<fem::SparseMatrix, chemistry::kNumSpecies> stiffness_;
    std::vector<int> master_nodes_;
    std::vector<int> ball_nodes_;  // all masters (Model I) or inner-face masters (Model II)
    std::unique_ptr<coupling::BallQuadrature> ball_;
    std::unique_ptr<coupling::ModulationIntegral> modulation_;
    Vector load_;
};

/// Free-function forms of one step for the two models (the solver's model
/// must match).
StepReport step_model_I(MacroState& state, const CoupledSolver& solver, double t_end);
StepReport step_model_II(MacroState& state, const CoupledSolver& solver, double t_end);

}  // namespace cellwall::macro
