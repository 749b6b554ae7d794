#pragma once

#include <array>
#include <cstddef>

#include <Eigen/Dense>

namespace cellwall {

using Voigt6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;

/// Voigt slot of the symmetric index pair (i, j), zero based:
/// (0,0)->0, (1,1)->1, (2,2)->2, (1,2)->3, (0,2)->4, (0,1)->5.
constexpr int voigt_index(int i, int j) {
    if (i == j) return i;
    const int s = i + j;  // 1 -> (0,1), 2 -> (0,2), 3 -> (1,2)
    return s == 1 ? 5 : (s == 2 ? 4 : 3);
}

/// Index pair of Voigt slot I.
constexpr std::array<int, 2> voigt_pair(int I) {
    constexpr int a[6][2] = {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};
    return {a[I][0], a[I][1]};
}

/// Symmetric strain tensor -> engineering Voigt vector
/// (e11, e22, e33, 2e23, 2e13, 2e12).
Vec6 strain_to_voigt(const Mat3& e);
Mat3 voigt_to_strain(const Vec6& v);
/// Stress tensor -> Voigt vector (s11, s22, s33, s23, s13, s12).
Vec6 stress_to_voigt(const Mat3& s);
Mat3 voigt_to_stress(const Vec6& v);

/// Rank-4 elasticity tensor with major and minor symmetries.
///
/// The 21 independent components are the upper triangle of the 6x6 Voigt
/// matrix, stored row by row: (0,0) (0,1) .. (0,5) (1,1) .. (1,5) .. (5,5).
/// Voigt rows/columns follow voigt_index(); shear columns act on engineering
/// shear strain, so C(I,J) equals the tensor component E_ijkl with
/// (i,j) = pair(I), (k,l) = pair(J). Units are whatever the caller uses (MPa
/// throughout this project).
class Tensor4 {
public:
    Tensor4() { data_.fill(0.0); }

    /// Builds from a Voigt matrix; throws DomainError if the matrix is not
    /// symmetric to `tol` relative to its largest entry.
    static Tensor4 from_voigt(const Voigt6& c, double tol = 1e-10);
    /// Builds from the full 3x3x3x3 component array, indexed
    /// [((i*3+j)*3+k)*3+l]. Throws DomainError when minor or major symmetry is
    /// violated beyond `tol` relative.
    static Tensor4 from_components(const std::array<double, 81>& e, double tol = 1e-10);

    double voigt(int I, int J) const { return data_[slot(I, J)]; }
    void set_voigt(int I, int J, double v) { data_[slot(I, J)] = v; }
    double operator()(int i, int j, int k, int l) const {
        return voigt(voigt_index(i, j), voigt_index(k, l));
    }

    Voigt6 voigt_matrix() const;
    std::array<double, 81> components() const;
    const std::array<double, 21>& packed() const { return data_; }

    /// Stress E:e for a symmetric strain e.
    Mat3 apply(const Mat3& strain) const;
    Vec6 apply_voigt(const Vec6& engineering_strain) const;

    /// Smallest eigenvalue of the Voigt matrix (strong ellipticity iff > 0).
    double min_eigenvalue() const;
    double max_abs() const;

    /// Tensor rotated by Q: E'_ijkl = Q_ia Q_jb Q_kc Q_ld E_abcd.
    Tensor4 rotated(const Mat3& q) const;

    Tensor4& operator+=(const Tensor4& o);
    Tensor4& operator-=(const Tensor4& o);
    Tensor4& operator*=(double s);
    friend Tensor4 operator+(Tensor4 a, const Tensor4& b) { return a += b; }
    friend Tensor4 operator-(Tensor4 a, const Tensor4& b) { return a -= b; }
    friend Tensor4 operator*(double s, Tensor4 a) { return a *= s; }
    friend Tensor4 operator*(Tensor4 a, double s) { return a *= s; }
    bool operator==(const Tensor4& o) const { return data_ == o.data_; }

private:
    static std::size_t slot(int I, int J) {
        if (I > J) std::swap(I, J);
        // row-major upper triangle offset
        return static_cast<std::size_t>(I * 6 - I * (I - 1) / 2 + (J - I));
    }
    std::array<double, 21> data_;
};

/// Max relative difference between two tensors, scaled by the larger max_abs.
double relative_difference(const Tensor4& a, const Tensor4& b);

}  // namespace cellwall
