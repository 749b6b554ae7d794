#include "cellwall/chemistry.hpp"

#include <algorithm>
#include <sstream>

#include "cellwall/error.hpp"

namespace cellwall::chemistry {

double clamp_nonnegative(double v, const char* name, double tolerance) {
    if (v >= 0.0) return v;
    if (v >= -tolerance) return 0.0;
    std::ostringstream msg;
    msg << name << " = " << v << " is negative beyond the clamp tolerance " << tolerance;
    throw DomainError(msg.str());
}

SpeciesState clamp_nonnegative(const SpeciesState& s, double tolerance) {
    return {clamp_nonnegative(s.p1, "p1", tolerance), clamp_nonnegative(s.p2, "p2", tolerance),
            clamp_nonnegative(s.n1, "n1", tolerance), clamp_nonnegative(s.n2, "n2", tolerance),
            clamp_nonnegative(s.b, "b", tolerance)};
}

double rate_eE(double p1, double p2, const KineticsParams& k) { return k.k_eE * p1 * p2; }

double rate_dc(double n1, double n2, const KineticsParams& k) {
    if (n2 == 0.0) return 0.0;
    return k.k_dc1 * n2 * n1 / (k.k_dc2 + n2);
}

double rate_b(double b, const KineticsParams& k) { return k.k_b * b; }

std::array<double, 2> reaction_p(double p1, double p2, const KineticsParams& k) {
    p1 = clamp_nonnegative(p1, "p1");
    p2 = clamp_nonnegative(p2, "p2");
    return {rate_eE(p1, p2, k), 0.0};
}

std::array<double, 2> reaction_n(const SpeciesState& raw, double signal, const KineticsParams& k) {
    const SpeciesState s = clamp_nonnegative(raw);
    signal = clamp_nonnegative(signal, "mechanical signal");
    const double r_ee = rate_eE(s.p1, s.p2, k);
    const double r_dc = rate_dc(s.n1, s.n2, k);
    const double r_b = rate_b(s.b, k) * signal;
    return {r_ee - 2.0 * r_dc - k.R_d * s.n1 + 2.0 * r_b, -r_dc + r_b};
}

double reaction_b_model_I(const SpeciesState& raw, double signal, const KineticsParams& k) {
    const SpeciesState s = clamp_nonnegative(raw);
    signal = clamp_nonnegative(signal, "mechanical signal");
    return rate_dc(s.n1, s.n2, k) - rate_b(s.b, k) * signal;
}

double modulation(const Mat3& strain, const Tensor4& stiffness, Variant variant) {
    const double tr = variant == Variant::Stress ? stiffness.apply(strain).trace() : strain.trace();
    return std::max(tr, 0.0);
}

ModelIIRates reaction_nb_model_II(const SpeciesState& raw, const Mat3& strain, const Tensor4& stiffness,
                                  const KineticsParams& k, Variant variant) {
    const SpeciesState s = clamp_nonnegative(raw);
    ModelIIRates r;
    r.modulation = modulation(strain, stiffness, variant);
    const double rb = rate_b(s.b, k) * r.modulation;
    r.n1 = 2.0 * rb;
    r.n2 = rb;
    r.b = rate_dc(s.n1, s.n2, k) - rb;
    return r;
}

FluxCoefficients boundary_flux_coefficients(BoundarySide side, double total_pe, double signal,
                                            const FluxParams& f, Model model) {
    total_pe = clamp_nonnegative(total_pe, "total methylesterified pectin");
    signal = clamp_nonnegative(signal, "mechanical signal");
    FluxCoefficients c;
    if (side == BoundarySide::Inner) {
        c.source[0] = f.beta_e / (1.0 + f.zeta_e * total_pe);
        c.source[1] = f.beta_E * total_pe;
        c.rate[1] = f.zeta_E;
        c.source[3] = signal * f.gamma_c1;
        c.rate[3] = signal * f.gamma_c2;
    } else {
        c.rate[0] = f.gamma_e;
        c.rate[1] = f.gamma_E;
        c.rate[2] = f.gamma_d;
        c.source[3] = f.zeta_c1;
        c.rate[3] = f.zeta_c2;
        if (model == Model::II) c.rate[4] = f.gamma_b;
    }
    return c;
}

std::array<double, kNumSpecies> boundary_fluxes(const SpeciesState& raw, BoundarySide side, double total_pe,
                                                double signal, const FluxParams& f, Model model) {
    const SpeciesState s = clamp_nonnegative(raw);
    const auto c = boundary_flux_coefficients(side, total_pe, signal, f, model);
    const double u[kNumSpecies] = {s.p1, s.p2, s.n1, s.n2, s.b};
    std::array<double, kNumSpecies> out{};
    for (int i = 0; i < kNumSpecies; ++i) out[i] = c.source[i] - c.rate[i] * u[i];
    return out;
}

SpeciesState well_mixed_rhs(const SpeciesState& raw, double signal, const KineticsParams& k, Model model,
                            double theta_m) {
    const SpeciesState s = clamp_nonnegative(raw);
    const double r_ee = rate_eE(s.p1, s.p2, k);
    const double r_dc = rate_dc(s.n1, s.n2, k);
    const double r_b = rate_b(s.b, k) * signal;
    const double formation = model == Model::I ? r_dc : theta_m * r_dc;
    return {-r_ee, 0.0, r_ee - 2.0 * r_dc - k.R_d * s.n1 + 2.0 * r_b, -r_dc + r_b, formation - r_b};
}

double stiffness_bound(const SpeciesState& s, double signal, const KineticsParams& k) {
    const double n2 = std::max(s.n2, 0.0);
    const double n1 = std::max(s.n1, 0.0);
    const double denom = k.k_dc2 + n2;
    const double lam_p1 = k.k_eE * std::max(s.p2, 0.0);
    const double lam_n1 = (denom > 0.0 ? 2.0 * k.k_dc1 * n2 / denom : 0.0) + k.R_d;
    const double lam_n2 = denom > 0.0 ? k.k_dc1 * n1 / denom : 0.0;
    const double lam_b = k.k_b * std::max(signal, 0.0);
    return std::max({lam_p1, lam_n1, lam_n2, lam_b});
}

}  // namespace cellwall::chemistry
