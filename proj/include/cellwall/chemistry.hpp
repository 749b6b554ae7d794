#pragma once

#include <array>

#include "cellwall/tensor4.hpp"

namespace cellwall::chemistry {

/// Nodal species densities.
struct SpeciesState {
    double p1 = 0.0;  ///< methylesterified pectin
    double p2 = 0.0;  ///< pectin methylesterase (PME)
    double n1 = 0.0;  ///< demethylesterified pectin
    double n2 = 0.0;  ///< calcium
    double b = 0.0;  ///< calcium-pectin cross-links
};

constexpr int kNumSpecies = 5;
constexpr std::array<const char*, kNumSpecies> kSpeciesNames{"p1", "p2", "n1", "n2", "b"};

struct KineticsParams {
    double k_eE = 1.0;  ///< demethylesterification rate
    double k_dc1 = 1.0;  ///< cross-link formation rate
    double k_dc2 = 1.0;  ///< calcium half-saturation density
    double k_b = 1.0;  ///< breakage rate per unit mechanical signal
    double R_d = 0.1;  ///< loss rate of demethylesterified pectin
};

/// Boundary-flux constants. The abstract outflow rate of the pectin pair is
/// realised per species by gamma_e and gamma_E.
struct FluxParams {
    double beta_E = 0.0, zeta_E = 0.0, gamma_E = 0.0;  // PME
    double beta_e = 0.0, zeta_e = 0.0, gamma_e = 0.0;  // methylesterified pectin
    double gamma_d = 0.0;  // demethylesterified pectin outflow
    double gamma_c1 = 0.0, gamma_c2 = 0.0, zeta_c1 = 0.0, zeta_c2 = 0.0;  // calcium
    double gamma_b = 0.0;  // cross-link outflow (Model II)
};

enum class Model { I, II };
enum class Variant { Stress, Strain };

/// Inputs below -tolerance raise DomainError; values in [-tolerance, 0) are
/// clamped to zero.
double clamp_nonnegative(double v, const char* name, double tolerance = 1e-12);
SpeciesState clamp_nonnegative(const SpeciesState& s, double tolerance = 1e-12);

double rate_eE(double p1, double p2, const KineticsParams& k);  // k_eE p1 p2
double rate_dc(double n1, double n2, const KineticsParams& k);  // k_dc1 n2 n1 / (k_dc2 + n2)
double rate_b(double b, const KineticsParams& k);  // k_b b

/// (R_eE, 0): the first component is the loss rate of p1.
std::array<double, 2> reaction_p(double p1, double p2, const KineticsParams& k);

/// F_n + R_n with F_n = (R_eE - 2 R_dc - R_d n1, -R_dc) and
/// R_n = (2 R_b N, R_b N).
std::array<double, 2> reaction_n(const SpeciesState& s, double signal, const KineticsParams& k);

/// R_dc - R_b N.
double reaction_b_model_I(const SpeciesState& s, double signal, const KineticsParams& k);

/// Pointwise mechanical modulation P: (tr(E e))^+ for the stress variant,
/// (tr e)^+ for the strain variant.
double modulation(const Mat3& strain, const Tensor4& stiffness, Variant variant);

/// Pointwise Model II rates: q_n = (2 R_b P, R_b P), q_b = R_dc - R_b P.
struct ModelIIRates {
    double n1 = 0.0;
    double n2 = 0.0;
    double b = 0.0;
    double modulation = 0.0;
};
ModelIIRates reaction_nb_model_II(const SpeciesState& s, const Mat3& strain, const Tensor4& stiffness,
                                  const KineticsParams& k, Variant variant);

enum class BoundarySide { Inner, Exterior };

/// Normal flux into the domain on one side, written as a - c u per species
/// (a, c >= 0) so that the c part can be treated implicitly.
struct FluxCoefficients {
    std::array<double, kNumSpecies> source{};  ///< a
    std::array<double, kNumSpecies> rate{};  ///< c
};

/// total_pe: integral of p1 over the domain; signal: N at the point (only
/// used on the inner side). The b entry is nonzero only for Model II on the
/// exterior side.
FluxCoefficients boundary_flux_coefficients(BoundarySide side, double total_pe, double signal,
                                            const FluxParams& f, Model model);

/// Evaluated fluxes a - c u in species order (p1, p2, n1, n2, b).
std::array<double, kNumSpecies> boundary_fluxes(const SpeciesState& s, BoundarySide side, double total_pe,
                                                double signal, const FluxParams& f, Model model);

/// Right-hand side of the spatially uniform system with frozen signal.
/// Model I: signal is N. Model II: signal is the matrix integral of the
/// modulation, and theta_m scales the formation term of b.
SpeciesState well_mixed_rhs(const SpeciesState& s, double signal, const KineticsParams& k, Model model,
                            double theta_m);

/// Per-species first-order loss rates of well_mixed_rhs at s, used to bound
/// explicit substeps.
double stiffness_bound(const SpeciesState& s, double signal, const KineticsParams& k);

}  // namespace cellwall::chemistry
