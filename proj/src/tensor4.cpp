#include "cellwall/tensor4.hpp"

#include <algorithm>
#include <cmath>

#include "cellwall/error.hpp"

namespace cellwall {

Vec6 strain_to_voigt(const Mat3& e) {
    Vec6 v;
    v << e(0, 0), e(1, 1), e(2, 2), e(1, 2) + e(2, 1), e(0, 2) + e(2, 0), e(0, 1) + e(1, 0);
    return v;
}

Mat3 voigt_to_strain(const Vec6& v) {
    Mat3 e;
    e << v(0), 0.5 * v(5), 0.5 * v(4),
         0.5 * v(5), v(1), 0.5 * v(3),
         0.5 * v(4), 0.5 * v(3), v(2);
    return e;
}

Vec6 stress_to_voigt(const Mat3& s) {
    Vec6 v;
    v << s(0, 0), s(1, 1), s(2, 2), 0.5 * (s(1, 2) + s(2, 1)), 0.5 * (s(0, 2) + s(2, 0)),
        0.5 * (s(0, 1) + s(1, 0));
    return v;
}

Mat3 voigt_to_stress(const Vec6& v) {
    Mat3 s;
    s << v(0), v(5), v(4),
         v(5), v(1), v(3),
         v(4), v(3), v(2);
    return s;
}

Tensor4 Tensor4::from_voigt(const Voigt6& c, double tol) {
    const double scale = std::max(c.cwiseAbs().maxCoeff(), 1e-300);
    Tensor4 t;
    for (int I = 0; I < 6; ++I) {
        for (int J = I; J < 6; ++J) {
            if (std::abs(c(I, J) - c(J, I)) > tol * scale) {
                throw DomainError("Voigt matrix is not symmetric (major symmetry violated)");
            }
            t.set_voigt(I, J, 0.5 * (c(I, J) + c(J, I)));
        }
    }
    return t;
}

Tensor4 Tensor4::from_components(const std::array<double, 81>& e, double tol) {
    auto at = [&](int i, int j, int k, int l) { return e[((i * 3 + j) * 3 + k) * 3 + l]; };
    double scale = 1e-300;
    for (double v : e) scale = std::max(scale, std::abs(v));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    const double v = at(i, j, k, l);
                    if (std::abs(v - at(j, i, k, l)) > tol * scale ||
                        std::abs(v - at(i, j, l, k)) > tol * scale) {
                        throw DomainError("elasticity tensor violates minor symmetry");
                    }
                    if (std::abs(v - at(k, l, i, j)) > tol * scale) {
                        throw DomainError("elasticity tensor violates major symmetry");
                    }
                }
    Tensor4 t;
    for (int I = 0; I < 6; ++I) {
        for (int J = I; J < 6; ++J) {
            const auto [i, j] = voigt_pair(I);
            const auto [k, l] = voigt_pair(J);
            t.set_voigt(I, J, at(i, j, k, l));
        }
    }
    return t;
}

Voigt6 Tensor4::voigt_matrix() const {
    Voigt6 c;
    for (int I = 0; I < 6; ++I)
        for (int J = 0; J < 6; ++J) c(I, J) = voigt(I, J);
    return c;
}

std::array<double, 81> Tensor4::components() const {
    std::array<double, 81> e{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) e[((i * 3 + j) * 3 + k) * 3 + l] = (*this)(i, j, k, l);
    return e;
}

Mat3 Tensor4::apply(const Mat3& strain) const {
    return voigt_to_stress(apply_voigt(strain_to_voigt(strain)));
}

Vec6 Tensor4::apply_voigt(const Vec6& engineering_strain) const {
    return voigt_matrix() * engineering_strain;
}

double Tensor4::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Voigt6> es(voigt_matrix(), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double Tensor4::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

Tensor4 Tensor4::rotated(const Mat3& q) const {
    const auto e = components();
    std::array<double, 81> r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    double s = 0.0;
                    for (int a = 0; a < 3; ++a)
                        for (int b = 0; b < 3; ++b)
                            for (int c = 0; c < 3; ++c)
                                for (int d = 0; d < 3; ++d)
                                    s += q(i, a) * q(j, b) * q(k, c) * q(l, d) *
                                         e[((a * 3 + b) * 3 + c) * 3 + d];
                    r[((i * 3 + j) * 3 + k) * 3 + l] = s;
                }
    return from_components(r, 1e-9);
}

Tensor4& Tensor4::operator+=(const Tensor4& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

Tensor4& Tensor4::operator-=(const Tensor4& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

Tensor4& Tensor4::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

double relative_difference(const Tensor4& a, const Tensor4& b) {
    const double scale = std::max({a.max_abs(), b.max_abs(), 1e-300});
    double d = 0.0;
    for (std::size_t i = 0; i < 21; ++i) d = std::max(d, std::abs(a.packed()[i] - b.packed()[i]));
    return d / scale;
}

}  // namespace cellwall
