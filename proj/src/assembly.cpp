#include "cellwall/assembly.hpp"

#include <cmath>
#include <sstream>

#include "cellwall/error.hpp"

namespace cellwall::fem {

P1Element p1_element(const UnitCellMesh& mesh, std::size_t t) {
    const auto& tri = mesh.triangles[t];
    const auto& p0 = mesh.vertices[tri[0]];
    const auto& p1 = mesh.vertices[tri[1]];
    const auto& p2 = mesh.vertices[tri[2]];
    const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0]);
    P1Element e;
    e.area = 0.5 * det;
    const std::array<const Point2*, 3> p{&p0, &p1, &p2};
    for (int i = 0; i < 3; ++i) {
        const auto& pj = *p[(i + 1) % 3];
        const auto& pk = *p[(i + 2) % 3];
        e.grad[i] = {(pj[1] - pk[1]) / det, (pk[0] - pj[0]) / det};
    }
    return e;
}

StrainOperator strain_operator_2p5d(const P1Element& e) {
    StrainOperator b = StrainOperator::Zero();
    for (int a = 0; a < 3; ++a) {
        const double gx = e.grad[a][0], gy = e.grad[a][1];
        const int c = 3 * a;
        b(0, c) = gx;  // e11
        b(1, c + 1) = gy;  // e22
        b(3, c + 2) = gy;  // 2 e23
        b(4, c + 2) = gx;  // 2 e13
        b(5, c) = gy;  // 2 e12
        b(5, c + 1) = gx;
    }
    return b;
}

void require_spd(const Eigen::Matrix3d& d, const char* what) {
    const double scale = d.cwiseAbs().maxCoeff();
    if (!((d - d.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale)) {
        throw DomainError(std::string(what) + " is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(d, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues().minCoeff() > 0.0)) {
        std::ostringstream msg;
        msg << what << " is not positive definite (smallest eigenvalue " << es.eigenvalues().minCoeff() << ")";
        throw DomainError(msg.str());
    }
}

SparseMatrix assemble_scalar_stiffness(const UnitCellMesh& mesh, const ByRegion<Eigen::Matrix3d>& coefficient) {
    bool used[2] = {false, false};
    for (auto r : mesh.regions) used[static_cast<int>(r)] = true;
    for (int r = 0; r < 2; ++r) {
        if (used[r]) require_spd(coefficient[r], "diffusion coefficient");
    }
    TripletBuilder tb(mesh.num_vertices(), mesh.num_vertices());
    tb.reserve(9 * mesh.num_triangles());
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto e = p1_element(mesh, t);
        const Eigen::Matrix3d& d = coefficient[static_cast<int>(mesh.regions[t])];
        const auto& tri = mesh.triangles[t];
        for (int a = 0; a < 3; ++a) {
            const double dx = d(0, 0) * e.grad[a][0] + d(0, 1) * e.grad[a][1];
            const double dy = d(1, 0) * e.grad[a][0] + d(1, 1) * e.grad[a][1];
            for (int b = 0; b < 3; ++b) {
                tb.add(tri[b], tri[a], e.area * (dx * e.grad[b][0] + dy * e.grad[b][1]));
            }
        }
    }
    return tb.build();
}

SparseMatrix assemble_vector_stiffness_2p5d(const UnitCellMesh& mesh, const ByRegion<Tensor4>& stiffness) {
    const Voigt6 c[2] = {stiffness[0].voigt_matrix(), stiffness[1].voigt_matrix()};
    const std::size_t n = 3 * mesh.num_vertices();
    TripletBuilder tb(n, n);
    tb.reserve(81 * mesh.num_triangles());
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto e = p1_element(mesh, t);
        const StrainOperator b = strain_operator_2p5d(e);
        const Eigen::Matrix<double, 9, 9> k = e.area * b.transpose() * c[static_cast<int>(mesh.regions[t])] * b;
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 9; ++i) {
            for (int j = 0; j < 9; ++j) {
                tb.add(3 * tri[i / 3] + i % 3, 3 * tri[j / 3] + j % 3, k(i, j));
            }
        }
    }
    return tb.build();
}

Vector lumped_mass(const UnitCellMesh& mesh) {
    Vector m = Vector::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const double w = mesh.triangle_area(t) / 3.0;
        for (int v : mesh.triangles[t]) m(v) += w;
    }
    return m;
}

}  // namespace cellwall::fem
