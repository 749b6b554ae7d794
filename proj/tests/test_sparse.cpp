#include <doctest.h>

#include <random>

#include "cellwall/constraints.hpp"
#include "cellwall/error.hpp"
#include "cellwall/sparse.hpp"

using namespace cellwall;
using namespace cellwall::fem;

namespace {

// 1D Laplacian on a ring of n nodes (singular, kernel = constants).
SparseMatrix ring_laplacian(int n) {
    TripletBuilder b(n, n);
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        b.add(i, i, 1.0);
        b.add(j, j, 1.0);
        b.add(i, j, -1.0);
        b.add(j, i, -1.0);
    }
    return b.build();
}

Eigen::MatrixXd dense(const SparseMatrix& a) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols()));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
            d(static_cast<Eigen::Index>(i), a.col_idx()[k]) = a.values()[k];
        }
    }
    return d;
}

}  // namespace

TEST_SUITE("sparse") {

TEST_CASE("triplet builder sums duplicates and drops zeros") {
    TripletBuilder b(3, 3);
    b.add(0, 0, 1.0);
    b.add(0, 0, 2.0);
    b.add(2, 1, 5.0);
    b.add(1, 2, 4.0);
    b.add(1, 2, -4.0);
    const auto a = b.build();
    CHECK(a.nonzeros() == 2u);
    CHECK(a.at(0, 0) == 3.0);
    CHECK(a.at(2, 1) == 5.0);
    CHECK(a.at(1, 2) == 0.0);
    CHECK(a.symmetry_defect() == doctest::Approx(1.0));
    Vector x(3);
    x << 1, 2, 3;
    const Vector y = a * x;
    CHECK(y(0) == 3.0);
    CHECK(y(1) == 0.0);
    CHECK(y(2) == 10.0);
}

TEST_CASE("PCG agrees with a dense solve") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int n = 40;
    TripletBuilder b(n, n);
    for (int i = 0; i < n; ++i) {
        b.add(i, i, 4.0 + u(rng) * 0.5);
        if (i + 1 < n) {
            const double v = u(rng);
            b.add(i, i + 1, v);
            b.add(i + 1, i, v);
        }
        if (i + 7 < n) {
            const double v = 0.5 * u(rng);
            b.add(i, i + 7, v);
            b.add(i + 7, i, v);
        }
    }
    const auto a = b.build();
    CHECK(a.symmetry_defect() == 0.0);
    Vector rhs(n);
    for (int i = 0; i < n; ++i) rhs(i) = u(rng);
    const Vector ref = dense(a).ldlt().solve(rhs);
    for (auto pc : {Preconditioner::Jacobi, Preconditioner::SymmetricGaussSeidel}) {
        const auto r = solve_spd(a, rhs, {1e-13, 0, pc});
        CHECK(r.converged);
        CHECK((r.x - ref).norm() / ref.norm() < 1e-11);
    }
    const auto fail = solve_spd(a, rhs, {1e-15, 2, Preconditioner::Jacobi});
    CHECK(!fail.converged);
    CHECK_THROWS_AS(require_converged(fail, "test"), SolverError);
}

TEST_CASE("kernel method solves a singular periodic problem with a mean constraint") {
    const int n = 12;
    // Ring of n nodes written as a chain of n + 1 nodes whose last node is
    // periodic with the first.
    TripletBuilder b(n + 1, n + 1);
    for (int i = 0; i < n; ++i) {
        b.add(i, i, 1.0);
        b.add(i + 1, i + 1, 1.0);
        b.add(i, i + 1, -1.0);
        b.add(i + 1, i, -1.0);
    }
    const auto a = b.build();
    ConstraintMap map(n + 1);
    map.add_periodic(n, 0);
    Eigen::MatrixXd kernel = Eigen::MatrixXd::Ones(n + 1, 1);
    Eigen::MatrixXd c = Eigen::MatrixXd::Ones(1, n + 1);
    c(0, n) = 0.0;
    map.set_kernel(kernel, c);
    map.finalize();
    CHECK(map.reduced_size() == static_cast<std::size_t>(n - 1));

    // Unbalanced load: its mean is absorbed by the multiplier.
    Vector load = Vector::Zero(n + 1);
    load(3) = 1.0;
    load(8) = -0.25;
    Vector lambda;
    const Vector rhs = map.reduce_rhs(load, &lambda);
    REQUIRE(lambda.size() == 1);
    CHECK(lambda(0) == doctest::Approx(0.75 / n));
    const auto ra = map.reduce_matrix(a);
    const auto r = solve_spd(ra, rhs, {1e-14, 0, Preconditioner::Jacobi});
    REQUIRE(r.converged);
    const Vector u = map.expand(r.x);
    CHECK(u(n) == u(0));
    CHECK(std::abs(map.functional_values(u)(0)) < 1e-12);

    // Equilibrium on the ring with the balanced load.
    const SparseMatrix ring = ring_laplacian(n);
    Vector ur = u.head(n);
    Vector balanced = load.head(n);
    balanced.array() -= lambda(0);
    CHECK((ring * ur - balanced).cwiseAbs().maxCoeff() < 1e-12);

    // Projection is idempotent and removes the kernel.
    Vector w = Vector::LinSpaced(n + 1, 0.0, 1.0);
    const Vector p1 = map.project(w);
    CHECK((map.project(p1) - p1).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(map.project(kernel.col(0)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(map.restrict_to_reduced(u).size() == static_cast<Eigen::Index>(map.reduced_size()));
}

TEST_CASE("dependent constraint functionals are rejected") {
    ConstraintMap map(4);
    Eigen::MatrixXd kernel(4, 2);
    kernel << 1, 0, 1, 1, 1, 2, 1, 3;
    Eigen::MatrixXd c(2, 4);
    c << 1, 1, 1, 1, 2, 2, 2, 2;
    map.set_kernel(kernel, c);
    CHECK_THROWS_AS(map.finalize(), ConstraintError);
}

}  // TEST_SUITE
