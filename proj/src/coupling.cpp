#include "cellwall/coupling.hpp"

#include <algorithm>
#include <cmath>

#include "cellwall/error.hpp"
#include "cellwall/materials.hpp"

namespace cellwall::coupling {

namespace {

struct Box {
    Point3 lo, hi;
};

double min_dist2(const Point3& x, const Box& b) {
    double d = 0.0;
    for (int c = 0; c < 3; ++c) {
        const double t = std::max({b.lo[c] - x[c], 0.0, x[c] - b.hi[c]});
        d += t * t;
    }
    return d;
}

double max_dist2(const Point3& x, const Box& b) {
    double d = 0.0;
    for (int c = 0; c < 3; ++c) {
        const double t = std::max(std::abs(x[c] - b.lo[c]), std::abs(x[c] - b.hi[c]));
        d += t * t;
    }
    return d;
}

}  // namespace

BallQuadrature::BallQuadrature(const MacroMesh& mesh, std::vector<Point3> points, double delta, Options options)
    : mesh_(mesh), points_(std::move(points)), delta_(delta) {
    if (!(delta > 0.0)) throw DomainError("ball radius delta must be positive");
    const double diameter = std::sqrt(mesh.extents[0] * mesh.extents[0] + mesh.extents[1] * mesh.extents[1] +
                                      mesh.extents[2] * mesh.extents[2]);
    if (delta > diameter) throw DomainError("ball radius delta exceeds the domain diameter");
    if (!(options.resolution > 0.0 && options.resolution <= 1.0)) {
        throw DomainError("ball quadrature resolution must lie in (0, 1]");
    }
    const auto h = mesh.spacing();
    const double leaf = options.resolution * delta;
    const double r2 = delta * delta;
    measure_.assign(points_.size(), 0.0);
    pieces_.resize(points_.size());

    for (std::size_t p = 0; p < points_.size(); ++p) {
        const Point3& x = points_[p];
        for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
            const Point3& origin = mesh.nodes[mesh.hexes[e][0]];
            const Box elem{origin, {origin[0] + h[0], origin[1] + h[1], origin[2] + h[2]}};
            if (min_dist2(x, elem) >= r2) continue;
            macro::HexStrainOperator acc = macro::HexStrainOperator::Zero();
            double vol = 0.0;
            // Depth-first over sub-boxes.
            std::vector<Box> stack{elem};
            while (!stack.empty()) {
                const Box b = stack.back();
                stack.pop_back();
                if (min_dist2(x, b) >= r2) continue;
                const double edge = std::max({b.hi[0] - b.lo[0], b.hi[1] - b.lo[1], b.hi[2] - b.lo[2]});
                const bool inside = max_dist2(x, b) <= r2;
                Point3 mid;
                for (int c = 0; c < 3; ++c) mid[c] = 0.5 * (b.lo[c] + b.hi[c]);
                if (!inside && edge > leaf) {
                    for (int k = 0; k < 8; ++k) {
                        Box s;
                        for (int c = 0; c < 3; ++c) {
                            const bool upper = (k >> c) & 1;
                            s.lo[c] = upper ? mid[c] : b.lo[c];
                            s.hi[c] = upper ? b.hi[c] : mid[c];
                        }
                        stack.push_back(s);
                    }
                    continue;
                }
                if (!inside) {
                    double d2 = 0.0;
                    for (int c = 0; c < 3; ++c) d2 += (mid[c] - x[c]) * (mid[c] - x[c]);
                    if (d2 > r2) continue;
                }
                const double v = (b.hi[0] - b.lo[0]) * (b.hi[1] - b.lo[1]) * (b.hi[2] - b.lo[2]);
                Point3 xi;
                for (int c = 0; c < 3; ++c) xi[c] = 2.0 * (mid[c] - origin[c]) / h[c] - 1.0;
                acc.noalias() += v * macro::hex_strain_operator(xi, h);
                vol += v;
            }
            if (vol > 0.0) {
                pieces_[p].push_back({static_cast<int>(e), acc});
                measure_[p] += vol;
            }
        }
    }
}

double BallQuadrature::integrate(std::size_t i, const macro::Vector& u, const std::vector<Vec6>& g) const {
    double s = 0.0;
    for (const auto& piece : pieces_[i]) {
        const auto& hex = mesh_.hexes[static_cast<std::size_t>(piece.element)];
        Eigen::Matrix<double, 24, 1> ue;
        for (int k = 0; k < 24; ++k) ue(k) = u(3 * hex[k / 3] + k % 3);
        s += g[static_cast<std::size_t>(piece.element)].dot(piece.op * ue);
    }
    return s;
}

std::vector<Vec6> trace_weights(const std::vector<Tensor4>& element_tensors, chemistry::Variant variant) {
    std::vector<Vec6> g(element_tensors.size());
    for (std::size_t e = 0; e < g.size(); ++e) {
        if (variant == chemistry::Variant::Strain) {
            g[e] << 1.0, 1.0, 1.0, 0.0, 0.0, 0.0;
        } else {
            const Voigt6 c = element_tensors[e].voigt_matrix();
            g[e] = (c.row(0) + c.row(1) + c.row(2)).transpose();
        }
    }
    return g;
}

std::vector<double> n_delta_eff(const BallQuadrature& quad, const macro::Vector& u,
                                const std::vector<Tensor4>& element_tensors, chemistry::Variant variant,
                                bool normalize) {
    const auto g = trace_weights(element_tensors, variant);
    std::vector<double> out(quad.size());
    for (std::size_t i = 0; i < quad.size(); ++i) {
        double v = quad.integrate(i, u, g);
        if (normalize) v /= quad.measure(i);
        out[i] = std::max(v, 0.0);
    }
    return out;
}

EffectiveRates rates_from_signal(const chemistry::SpeciesState& raw, double signal, double theta_m,
                                 const chemistry::KineticsParams& k) {
    const auto s = chemistry::clamp_nonnegative(raw);
    const double rb = chemistry::rate_b(s.b, k) * signal;
    return {2.0 * rb, rb, theta_m * chemistry::rate_dc(s.n1, s.n2, k) - rb, signal};
}

EffectiveRates q_eff(const chemistry::SpeciesState& s, const Mat3& macro_strain,
                     const homog::LocalizationField& localization, const Tensor4& matrix_stiffness,
                     const chemistry::KineticsParams& k, chemistry::Variant variant,
                     std::uint64_t expected_mesh_id) {
    if (localization.mesh_id != expected_mesh_id) {
        throw DomainError("localization field is stale: it was computed on a different cell mesh");
    }
    const Vec6 e = strain_to_voigt(macro_strain);
    double signal = 0.0, theta = 0.0;
    for (std::size_t t = 0; t < localization.size(); ++t) {
        if (localization.region[t] != Region::Matrix) continue;
        const Mat3 local = voigt_to_strain(localization.sample[t] * e);
        signal += localization.weight[t] * chemistry::modulation(local, matrix_stiffness, variant);
        theta += localization.weight[t];
    }
    return rates_from_signal(s, signal, theta, k);
}

ModulationIntegral::ModulationIntegral(const homog::LocalizationField& field, double matrix_poisson,
                                       chemistry::Variant variant)
    : variant_(variant), mesh_id_(field.mesh_id) {
    Vec6 r;
    if (variant == chemistry::Variant::Stress) {
        const Voigt6 c = materials::isotropic_tensor(1.0, matrix_poisson).voigt_matrix();
        r = (c.row(0) + c.row(1) + c.row(2)).transpose();
    } else {
        r << 1.0, 1.0, 1.0, 0.0, 0.0, 0.0;
    }
    for (std::size_t t = 0; t < field.size(); ++t) {
        if (field.region[t] != Region::Matrix) continue;
        h_.push_back(field.sample[t].transpose() * r);
        w_.push_back(field.weight[t]);
        theta_m_ += field.weight[t];
    }
}

double ModulationIntegral::operator()(const Vec6& e, double young) const {
    double s = 0.0;
    for (std::size_t t = 0; t < h_.size(); ++t) s += w_[t] * std::max(h_[t].dot(e), 0.0);
    return variant_ == chemistry::Variant::Stress ? young * s : s;
}

}  // namespace cellwall::coupling
