#include <doctest.h>

#include <random>

#include "cellwall/coupling.hpp"
#include "cellwall/error.hpp"
#include "cellwall/homogenization.hpp"
#include "cellwall/materials.hpp"
#include "cellwall/validation.hpp"
#include "support.hpp"

using namespace cellwall;
using testing::rel;

namespace {

// Nodal values of u(x) = g x.
macro::Vector field(const MacroMesh& mesh, const Mat3& g) {
    macro::Vector u(3 * static_cast<Eigen::Index>(mesh.num_nodes()));
    for (std::size_t v = 0; v < mesh.num_nodes(); ++v) {
        const Eigen::Vector3d x(mesh.nodes[v][0], mesh.nodes[v][1], mesh.nodes[v][2]);
        const Eigen::Vector3d val = g * x;
        for (int k = 0; k < 3; ++k) u(3 * static_cast<Eigen::Index>(v) + k) = val(k);
    }
    return u;
}

}  // namespace

TEST_SUITE("coupling") {

TEST_CASE("ball integrals: constant field, half ball, negative trace") {
    for (const auto& c : validation::ball_checks(20240601)) {
        INFO(c.name << " value=" << c.value);
        CHECK(c.passed);
    }
}

TEST_CASE("ball measure and normalization") {
    const MacroMesh mesh = build_macro_mesh({1.0, 1.0, 1.0}, {4, 4, 4});
    const double delta = 0.15;
    const std::vector<Point3> pts{{0.5, 0.5, 0.5}, {0.0, 0.5, 0.5}, {0.0, 0.0, 0.5}, {1.0, 1.0, 0.3}};
    const coupling::BallQuadrature quad(mesh, pts, delta);
    const double ball = 4.0 / 3.0 * M_PI * delta * delta * delta;
    CHECK(rel(quad.measure(0), ball) < 0.01);
    CHECK(rel(quad.measure(1), ball / 2.0) < 0.01);
    CHECK(rel(quad.measure(2), ball / 4.0) < 0.01);
    CHECK(rel(quad.measure(3), ball / 4.0) < 0.01);
    Mat3 g = Mat3::Zero();
    g(0, 0) = 0.2;
    g(2, 2) = 0.1;
    const macro::Vector u = field(mesh, g);
    const std::vector<Tensor4> t(mesh.num_elements(), materials::isotropic_tensor(1.0, 0.3));
    const auto raw = coupling::n_delta_eff(quad, u, t, chemistry::Variant::Strain, false);
    const auto avg = coupling::n_delta_eff(quad, u, t, chemistry::Variant::Strain, true);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(avg[i] == doctest::Approx(raw[i] / quad.measure(i)).epsilon(1e-14));
        CHECK(avg[i] == doctest::Approx(0.3).epsilon(1e-12));
    }
}

TEST_CASE("ball integral of a linear strain field equals its centre value times the volume") {
    const MacroMesh mesh = build_macro_mesh({1.0, 1.0, 1.0}, {4, 4, 4});
    const double delta = 0.1;
    // u2 = s x1 x2 is trilinear, so the discrete strain is exact: e22 = s x1.
    macro::Vector u = macro::Vector::Zero(3 * static_cast<Eigen::Index>(mesh.num_nodes()));
    const double s = 0.4;
    for (std::size_t v = 0; v < mesh.num_nodes(); ++v) {
        u(3 * static_cast<Eigen::Index>(v) + 1) = s * mesh.nodes[v][0] * mesh.nodes[v][1];
    }
    const Point3 x{0.45, 0.55, 0.5};
    const coupling::BallQuadrature quad(mesh, {x}, delta);
    const std::vector<Tensor4> t(mesh.num_elements(), materials::isotropic_tensor(1.0, 0.3));
    const auto n = coupling::n_delta_eff(quad, u, t, chemistry::Variant::Strain);
    const double want = s * x[0] * quad.measure(0);
    CHECK(rel(n[0], want) < 1e-3);
}

TEST_CASE("stress trace weights") {
    const Tensor4 c = materials::isotropic_tensor(10.0, 0.3);
    const auto l = materials::lame_from_young(10.0, 0.3);
    const auto w = coupling::trace_weights({c}, chemistry::Variant::Stress);
    for (int i = 0; i < 3; ++i) CHECK(w[0](i) == doctest::Approx(3.0 * l.lambda + 2.0 * l.mu));
    for (int i = 3; i < 6; ++i) CHECK(w[0](i) == doctest::Approx(0.0));
    const auto ws = coupling::trace_weights({c}, chemistry::Variant::Strain);
    CHECK(ws[0] == (Vec6() << 1, 1, 1, 0, 0, 0).finished());
}

TEST_CASE("effective Model II rates against a direct triangle loop") {
    const auto mesh = build_unit_cell_mesh(0.25, 1.0 / 16.0);
    const fem::ByRegion<Tensor4> c{materials::isotropic_tensor(10.0, 0.3),
                                   materials::transversely_isotropic_tensor(materials::reference_fibril_constants())};
    const auto loc = homog::localization_field(mesh, homog::solve_elastic_correctors(mesh, c), 10.0);
    const chemistry::KineticsParams k{1.2, 0.9, 1.1, 0.8, 0.3};
    const chemistry::SpeciesState s{1.0, 0.5, 0.4, 0.7, 0.6};
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g(0.0, 0.01);
    for (int draw = 0; draw < 10; ++draw) {
        Mat3 e;
        for (int i = 0; i < 3; ++i) {
            for (int j = i; j < 3; ++j) e(i, j) = e(j, i) = g(rng);
        }
        for (auto variant : {chemistry::Variant::Stress, chemistry::Variant::Strain}) {
            const double young = 9.0 + draw * 0.3;
            const Tensor4 cm = materials::isotropic_tensor(young, 0.3);
            double n1 = 0.0, n2 = 0.0, b = 0.0, sig = 0.0;
            const Vec6 ev = strain_to_voigt(e);
            for (std::size_t t = 0; t < loc.size(); ++t) {
                if (loc.region[t] != Region::Matrix) continue;
                const auto r = chemistry::reaction_nb_model_II(s, voigt_to_strain(loc.sample[t] * ev), cm, k, variant);
                n1 += loc.weight[t] * r.n1;
                n2 += loc.weight[t] * r.n2;
                b += loc.weight[t] * r.b;
                sig += loc.weight[t] * r.modulation;
            }
            const auto q = coupling::q_eff(s, e, loc, cm, k, variant, mesh.id);
            const double scale = std::max({std::abs(n1), std::abs(b), 1e-300});
            CHECK(std::abs(q.n1 - n1) <= 1e-12 * scale);
            CHECK(std::abs(q.n2 - n2) <= 1e-12 * scale);
            CHECK(std::abs(q.b - b) <= 1e-12 * scale);
            const coupling::ModulationIntegral mi(loc, 0.3, variant);
            CHECK(mi(ev, young) == doctest::Approx(sig).epsilon(1e-11));
            CHECK(mi.theta_m() == doctest::Approx(volume_fractions(mesh).matrix).epsilon(1e-13));
        }
    }
}

TEST_CASE("stale localization fields are rejected") {
    const auto mesh = build_unit_cell_mesh(0.25, 1.0 / 8.0);
    const auto other = build_unit_cell_mesh(0.25, 1.0 / 16.0);
    const auto loc = homog::identity_localization(mesh);
    CHECK_THROWS_AS(coupling::q_eff({1, 1, 1, 1, 1}, Mat3::Identity() * 0.01, loc, materials::isotropic_tensor(10.0, 0.3),
                                    {}, chemistry::Variant::Stress, other.id),
                    DomainError);
    CHECK_NOTHROW(coupling::q_eff({1, 1, 1, 1, 1}, Mat3::Identity() * 0.01, loc, materials::isotropic_tensor(10.0, 0.3),
                                  {}, chemistry::Variant::Stress, mesh.id));
}

}  // TEST_SUITE
