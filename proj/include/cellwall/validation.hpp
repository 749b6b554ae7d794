#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cellwall/chemistry.hpp"
#include "cellwall/mesh.hpp"
#include "cellwall/tensor4.hpp"

namespace cellwall::validation {

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

/// One line per check: "PASS name value=... tol=... detail".
std::string format_checks(const std::vector<CheckResult>& checks);
bool all_passed(const std::vector<CheckResult>& checks);

// ---------------------------------------------------------------------------
// Well-mixed reference. Uses only the rate primitives of the chemistry
// module, not its assembled right-hand side.

struct WellMixedProblem {
    chemistry::SpeciesState initial;
    double signal = 0.0;  ///< N (Model I) or matrix integral of P (Model II)
    chemistry::KineticsParams kinetics;
    chemistry::Model model = chemistry::Model::I;
    double theta_m = 1.0;  ///< scales the formation of b in Model II
};

struct WellMixedTrajectory {
    std::vector<double> time;
    std::vector<chemistry::SpeciesState> state;
};

/// Classic RK4 with fixed step dt_ref; records every `record_every` steps
/// (and the final time).
WellMixedTrajectory well_mixed_oracle(const WellMixedProblem& problem, double t_end, double dt_ref,
                                      int record_every = 1);
chemistry::SpeciesState well_mixed_final(const WellMixedProblem& problem, double t_end, double dt_ref);
/// Largest relative change of the final state when dt_ref is halved.
double richardson_defect(const WellMixedProblem& problem, double t_end, double dt_ref);

/// Golden file for the oracle: provenance header ('#' lines) then
/// "t p1 p2 n1 n2 b" rows at the sample times.
std::string format_golden(const WellMixedProblem& problem, double dt_ref, const std::vector<double>& sample_times,
                          const std::string& git_hash);
struct GoldenRow {
    double time;
    chemistry::SpeciesState state;
};
std::vector<GoldenRow> parse_golden(const std::string& text);
/// The fixed problem recorded in the golden file: full kinetics, order-one
/// constants, Model I.
WellMixedProblem golden_problem();

// ---------------------------------------------------------------------------
// Effective elasticity reference checks.

/// Independent entries in reference order: C11, C12, C13, C33, C44, C66.
constexpr std::array<double, 6> kReferenceTargets{21.2, 8.9, 23.3, 43367.5, 14.0, 5.7};
constexpr std::array<const char*, 6> kReferenceNames{"C11", "C12", "C13", "C33", "C44", "C66"};

struct ReferenceTableReport {
    double h = 0.0;
    std::size_t vertices = 0;
    std::uint64_t mesh_id = 0;
    double theta_m = 0.0;
    Voigt6 computed;
    std::array<double, 6> value{};
    std::array<double, 6> deviation{};  ///< relative to kReferenceTargets
    double symmetry_residual = 0.0;  ///< of the raw (unsymmetrized) matrix, relative
    double tetragonal_residual = 0.0;  ///< max of the C11/C22, C44/C55, C13/C23 relative gaps
    double non_tetragonal = 0.0;  ///< largest coupling outside the pattern, over C11
    double min_eigenvalue = 0.0;
    double seconds = 0.0;
};

/// Cell solve with the reference inputs (matrix E = 10 MPa, nu = 0.3,
/// reference fibril constants, r = 0.25) at mesh size h.
ReferenceTableReport reference_table_harness(double h, int threads = 1);
std::string format_reference_report(const ReferenceTableReport& report);

/// C11 = C22, C44 = C55, C13 = C23 to rel_tol; every coupling outside the
/// tetragonal pattern below zero_tol * C11; Voigt minimum eigenvalue > 0.
std::vector<CheckResult> tetragonal_checks(const Voigt6& c, double rel_tol = 1e-8, double zero_tol = 1e-6);

/// Eigenvalues of the effective tensor between the smallest constituent
/// eigenvalue and the arithmetic (Voigt) average, on the given mesh.
std::vector<CheckResult> bounds_checks(const UnitCellMesh& mesh, const std::array<Tensor4, 2>& constituents,
                                       const Voigt6& effective, const std::string& label);

/// Random SPD constituent pairs (seeded) through the cell solve, each
/// checked against the bounds.
std::vector<CheckResult> random_bounds_suite(int draws, std::uint64_t seed, double h);

/// Equal constituents: zero correctors, unchanged tensor, identity
/// localization.
std::vector<CheckResult> homogeneous_checks(double h, const Tensor4& material);

/// Random symmetric positive definite Voigt matrix with eigenvalues in
/// [lo, hi].
Voigt6 random_spd_voigt(std::uint64_t seed, double lo, double hi);

/// Scalar corrector checks at r = 0.25 for a diagonal D with equal in-plane
/// entries: axial entry theta_M D33, vanishing axial corrector, in-plane
/// isotropy and the strict in-plane reduction.
std::vector<CheckResult> diffusion_checks(double h);

// ---------------------------------------------------------------------------
// Ball measure reference.

/// Monte-Carlo estimate of the integral of f over B_delta(x) intersected
/// with the box [0, a1] x [0, a2] x [0, a3], from uniform samples in the
/// bounding cube of the ball.
double monte_carlo_ball_integral(const Point3& x, double delta, const std::array<double, 3>& extents,
                                 const std::function<double(const Point3&)>& f, std::size_t samples,
                                 std::uint64_t seed);

/// Ball integral of a constant strain trace on a 4x4x4 unit box: interior
/// point against c (4/3) pi delta^3, boundary point against the Monte-Carlo
/// estimate, and the sign-flipped field against zero.
std::vector<CheckResult> ball_checks(std::uint64_t seed);

// ---------------------------------------------------------------------------

struct SuiteOptions {
    double h = 1.0 / 64.0;  ///< mesh size of the reference cell solve
    int threads = 1;
    std::uint64_t seed = 20240601;
};

/// Every check above; the reference table report is appended to `report` for
/// reading, its entry deviations are informational.
std::vector<CheckResult> run_validation_suite(const SuiteOptions& options, std::string* report = nullptr);

}  // namespace cellwall::validation
