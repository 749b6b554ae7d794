#include "cellwall/materials.hpp"

#include <cmath>
#include <sstream>

#include "cellwall/error.hpp"

namespace cellwall::materials {

LameParameters lame_from_young(double young, double poisson) {
    if (!(young > 0.0)) throw DomainError("Young's modulus must be positive");
    if (!(poisson > -1.0 && poisson < 0.5)) {
        throw DomainError("Poisson's ratio must lie in (-1, 0.5)");
    }
    return {young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson)),
            young / (2.0 * (1.0 + poisson))};
}

Tensor4 isotropic_from_lame(double lambda, double mu) {
    Tensor4 t;
    for (int I = 0; I < 3; ++I) {
        for (int J = I; J < 3; ++J) t.set_voigt(I, J, lambda);
        t.set_voigt(I, I, lambda + 2.0 * mu);
    }
    for (int I = 3; I < 6; ++I) t.set_voigt(I, I, mu);
    return t;
}

Tensor4 isotropic_tensor(double young, double poisson) {
    const auto [lambda, mu] = lame_from_young(young, poisson);
    return isotropic_from_lame(lambda, mu);
}

TransverselyIsotropicConstants reference_fibril_constants() {
    return {15000.0, 0.3, 0.068, 0.11, 84842.0};
}

Voigt6 transversely_isotropic_compliance(const TransverselyIsotropicConstants& c) {
    if (!(c.young_transverse > 0.0) || !(c.modulus_ratio > 0.0) || !(c.shear_axial > 0.0)) {
        throw DomainError("transversely isotropic moduli must be positive");
    }
    const double ep = c.young_transverse;
    const double ea = c.young_transverse / c.modulus_ratio;  // axial modulus
    Voigt6 s = Voigt6::Zero();
    s(0, 0) = s(1, 1) = 1.0 / ep;
    s(0, 1) = s(1, 0) = -c.poisson_transverse / ep;
    s(0, 2) = s(2, 0) = s(1, 2) = s(2, 1) = -c.poisson_axial / ea;
    s(2, 2) = 1.0 / ea;
    s(3, 3) = s(4, 4) = 1.0 / c.shear_axial;
    s(5, 5) = 2.0 * (1.0 + c.poisson_transverse) / ep;
    return s;
}

Tensor4 transversely_isotropic_tensor(const TransverselyIsotropicConstants& c) {
    const Voigt6 s = transversely_isotropic_compliance(c);
    Eigen::SelfAdjointEigenSolver<Voigt6> es(s, Eigen::EigenvaluesOnly);
    const double min_ev = es.eigenvalues().minCoeff();
    if (!(min_ev > 0.0)) {
        std::ostringstream msg;
        msg << "fibril compliance is not positive definite (smallest eigenvalue " << min_ev << ")";
        throw DomainError(msg.str());
    }
    return Tensor4::from_voigt(s.inverse(), 1e-9);
}

double YoungModulusLaw::operator()(double b) const {
    if (b < 0.0) throw DomainError("cross-link density must be non-negative");
    return slope * b + intercept;
}

Tensor4 AffineTensorFamily::at_modulus(double young) const {
    return young * slope + offset;
}

AffineTensorFamily affine_family_from_anchors(double young_a, const Tensor4& hom_a,
                                              double young_b, const Tensor4& hom_b,
                                              YoungModulusLaw law, std::uint64_t mesh_id) {
    if (!(young_a > 0.0) || !(young_b > 0.0)) {
        throw DomainError("anchor moduli must be positive");
    }
    if (young_a == young_b) {
        throw DomainError("anchor moduli must be distinct");
    }
    AffineTensorFamily f;
    f.slope = (1.0 / (young_b - young_a)) * (hom_b - hom_a);
    f.offset = hom_a - young_a * f.slope;
    f.law = law;
    f.anchor_a = young_a;
    f.anchor_b = young_b;
    f.mesh_id = mesh_id;
    return f;
}

}  // namespace cellwall::materials
