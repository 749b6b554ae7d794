#pragma once

#include <cstdint>
#include <vector>

#include "cellwall/chemistry.hpp"
#include "cellwall/homogenization.hpp"
#include "cellwall/macro_fem.hpp"
#include "cellwall/mesh.hpp"
#include "cellwall/tensor4.hpp"

namespace cellwall::coupling {

/// Integration of macro strain fields over B_delta(x) intersected with the
/// box, for a fixed set of points x. Element pieces inside the ball are
/// found by octree subdivision; because the strain of a trilinear element
/// is a tensor product of linear functions in the other two coordinates,
/// the midpoint rule integrates it exactly on every box piece, so the only
/// error is the indicator resolution at the sphere.
class BallQuadrature {
public:
    struct Options {
        double resolution = 1.0 / 20.0;  ///< leaf edge as a fraction of delta
    };

    BallQuadrature(const MacroMesh& mesh, std::vector<Point3> points, double delta, Options options);
    BallQuadrature(const MacroMesh& mesh, std::vector<Point3> points, double delta)
        : BallQuadrature(mesh, std::move(points), delta, Options{}) {}

    double delta() const { return delta_; }
    std::size_t size() const { return points_.size(); }
    const std::vector<Point3>& points() const { return points_; }
    /// Integrated quadrature weight, |B_delta(x) cap box| up to indicator error.
    double measure(std::size_t i) const { return measure_[i]; }

    /// Integral over the ball of g_e . strain (engineering Voigt), where g_e
    /// is given per element.
    double integrate(std::size_t i, const macro::Vector& u, const std::vector<Vec6>& g) const;

private:
    struct Piece {
        int element;
        macro::HexStrainOperator op;  ///< integral of the strain operator over the piece
    };
    const MacroMesh& mesh_;
    std::vector<Point3> points_;
    double delta_;
    std::vector<double> measure_;
    std::vector<std::vector<Piece>> pieces_;
};

/// Per-element weights g_e with g_e . e = tr(E_e e) (stress) or tr e (strain).
std::vector<Vec6> trace_weights(const std::vector<Tensor4>& element_tensors, chemistry::Variant variant);

/// N at every quadrature point: (integral of the trace)^+, divided by the
/// ball measure when `normalize` is set.
std::vector<double> n_delta_eff(const BallQuadrature& quad, const macro::Vector& u,
                                const std::vector<Tensor4>& element_tensors, chemistry::Variant variant,
                                bool normalize = false);

/// Effective Model II rates at one macro point.
struct EffectiveRates {
    double n1 = 0.0;
    double n2 = 0.0;
    double b = 0.0;
    double signal = 0.0;  ///< integral of the modulation over the matrix
};

/// Quadrature over the matrix triangles of the pointwise Model II rates at
/// local strain sample(y) E. Throws DomainError when the localization was
/// computed on a mesh other than `expected_mesh_id`.
EffectiveRates q_eff(const chemistry::SpeciesState& s, const Mat3& macro_strain,
                     const homog::LocalizationField& localization, const Tensor4& matrix_stiffness,
                     const chemistry::KineticsParams& k, chemistry::Variant variant,
                     std::uint64_t expected_mesh_id);

/// Rates from a precomputed matrix integral of the modulation.
EffectiveRates rates_from_signal(const chemistry::SpeciesState& s, double signal, double theta_m,
                                 const chemistry::KineticsParams& k);

/// Fast evaluation of the matrix integral of the modulation for an isotropic
/// matrix with fixed Poisson ratio: the stress trace is linear in the
/// Young's modulus, so each triangle reduces to one 6-vector.
class ModulationIntegral {
public:
    ModulationIntegral(const homog::LocalizationField& field, double matrix_poisson, chemistry::Variant variant);
    /// Integral over the matrix of P at macro engineering strain `e` and
    /// matrix modulus `young` (ignored by the strain variant).
    double operator()(const Vec6& e, double young) const;
    double theta_m() const { return theta_m_; }
    std::uint64_t mesh_id() const { return mesh_id_; }

private:
    std::vector<Vec6> h_;
    std::vector<double> w_;
    chemistry::Variant variant_;
    double theta_m_ = 0.0;
    std::uint64_t mesh_id_ = 0;
};

}  // namespace cellwall::coupling
