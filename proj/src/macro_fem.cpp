#include "cellwall/macro_fem.hpp"

#include <cmath>
#include <sstream>

#include "cellwall/error.hpp"

namespace cellwall::macro {

namespace {

constexpr int kCorner[8][3] = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                               {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};

Point3 corner_point(int a) {
    return {static_cast<double>(kCorner[a][0]), static_cast<double>(kCorner[a][1]),
            static_cast<double>(kCorner[a][2])};
}

double element_volume(const std::array<double, 3>& h) { return h[0] * h[1] * h[2]; }

}  // namespace

std::array<double, 8> hex_shape(const Point3& xi) {
    std::array<double, 8> n{};
    for (int a = 0; a < 8; ++a) {
        n[a] = 0.125 * (1.0 + kCorner[a][0] * xi[0]) * (1.0 + kCorner[a][1] * xi[1]) * (1.0 + kCorner[a][2] * xi[2]);
    }
    return n;
}

std::array<std::array<double, 3>, 8> hex_gradients(const Point3& xi, const std::array<double, 3>& h) {
    std::array<std::array<double, 3>, 8> g{};
    for (int a = 0; a < 8; ++a) {
        const double s0 = kCorner[a][0], s1 = kCorner[a][1], s2 = kCorner[a][2];
        const double f0 = 1.0 + s0 * xi[0], f1 = 1.0 + s1 * xi[1], f2 = 1.0 + s2 * xi[2];
        g[a] = {0.125 * s0 * f1 * f2 * 2.0 / h[0], 0.125 * f0 * s1 * f2 * 2.0 / h[1],
                0.125 * f0 * f1 * s2 * 2.0 / h[2]};
    }
    return g;
}

HexStrainOperator hex_strain_operator(const Point3& xi, const std::array<double, 3>& h) {
    const auto g = hex_gradients(xi, h);
    HexStrainOperator b = HexStrainOperator::Zero();
    for (int a = 0; a < 8; ++a) {
        const int c = 3 * a;
        b(0, c) = g[a][0];
        b(1, c + 1) = g[a][1];
        b(2, c + 2) = g[a][2];
        b(3, c + 1) = g[a][2];
        b(3, c + 2) = g[a][1];
        b(4, c) = g[a][2];
        b(4, c + 2) = g[a][0];
        b(5, c) = g[a][1];
        b(5, c + 1) = g[a][0];
    }
    return b;
}

const std::array<Point3, 8>& gauss_points() {
    static const std::array<Point3, 8> pts = [] {
        const double g = 1.0 / std::sqrt(3.0);
        std::array<Point3, 8> p{};
        for (int a = 0; a < 8; ++a) p[a] = {g * kCorner[a][0], g * kCorner[a][1], g * kCorner[a][2]};
        return p;
    }();
    return pts;
}

Eigen::Matrix<double, 24, 24> hex_stiffness(const Tensor4& c, const std::array<double, 3>& h) {
    const Voigt6 cv = c.voigt_matrix();
    const double w = element_volume(h) / 8.0;
    Eigen::Matrix<double, 24, 24> k = Eigen::Matrix<double, 24, 24>::Zero();
    for (const auto& q : gauss_points()) {
        const HexStrainOperator b = hex_strain_operator(q, h);
        k.noalias() += w * b.transpose() * cv * b;
    }
    return k;
}

ElasticitySolver::ElasticitySolver(const MacroMesh& mesh, double tolerance)
    : mesh_(mesh), map_(3 * mesh.num_nodes()), tolerance_(tolerance) {
    const auto h = mesh.spacing();
    const double w = element_volume(h) / 8.0;
    // Element stiffness is linear in the Voigt entries: K(C) = sum C_IJ G_IJ.
    int slot = 0;
    for (int I = 0; I < 6; ++I) {
        for (int J = I; J < 6; ++J, ++slot) {
            basis_[slot].setZero();
            for (const auto& q : gauss_points()) {
                const HexStrainOperator b = hex_strain_operator(q, h);
                basis_[slot].noalias() += w * b.row(I).transpose() * b.row(J);
                if (I != J) basis_[slot].noalias() += w * b.row(J).transpose() * b.row(I);
            }
        }
    }

    for (const auto& [s, m] : mesh.periodic_pairs) {
        for (int c = 0; c < 3; ++c) map_.add_periodic(3 * s + c, 3 * m + c);
    }
    const auto n = static_cast<Eigen::Index>(3 * mesh.num_nodes());
    Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(n, 4);
    Eigen::MatrixXd func = Eigen::MatrixXd::Zero(4, n);
    const double c1 = 0.5 * mesh.extents[0], c2 = 0.5 * mesh.extents[1];
    for (std::size_t v = 0; v < mesh.num_nodes(); ++v) {
        const auto i = static_cast<Eigen::Index>(3 * v);
        for (int c = 0; c < 3; ++c) kernel(i + c, c) = 1.0;
        kernel(i, 3) = -(mesh.nodes[v][1] - c2);
        kernel(i + 1, 3) = mesh.nodes[v][0] - c1;
    }
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const auto& hex = mesh.hexes[e];
        for (const auto& q : gauss_points()) {
            const auto nq = hex_shape(q);
            const auto g = hex_gradients(q, h);
            for (int a = 0; a < 8; ++a) {
                const auto i = static_cast<Eigen::Index>(3 * hex[a]);
                for (int c = 0; c < 3; ++c) func(c, i + c) += w * nq[a];
                func(3, i) += w * g[a][1];
                func(3, i + 1) -= w * g[a][0];
            }
        }
    }
    map_.set_kernel(std::move(kernel), std::move(func));
    map_.finalize();
}

Vector ElasticitySolver::traction_load(double p_inner, double traction_exterior, double traction_upper) const {
    Vector f = Vector::Zero(static_cast<Eigen::Index>(3 * mesh_.num_nodes()));
    for (const auto& face : mesh_.faces) {
        double scale;
        switch (face.tag) {
            case BoundaryTag::Inner: scale = -p_inner; break;
            case BoundaryTag::Exterior: scale = traction_exterior; break;
            case BoundaryTag::Upper: scale = traction_upper; break;
            default: continue;
        }
        for (int a = 0; a < 4; ++a) {
            for (int c = 0; c < 3; ++c) f(3 * face.nodes[a] + c) += 0.25 * face.area * scale * face.normal[c];
        }
    }
    return f;
}

ElasticitySolver::Result ElasticitySolver::solve(const std::vector<Tensor4>& element_tensors, const Vector& load,
                                                 const Vector* initial) const {
    (void)initial;
    if (element_tensors.size() != mesh_.num_elements()) throw Error("one tensor per macro element required");
    const std::size_t n = 3 * mesh_.num_nodes();
    fem::TripletBuilder tb(n, n);
    tb.reserve(576 * mesh_.num_elements());
    for (std::size_t e = 0; e < mesh_.num_elements(); ++e) {
        const Tensor4& c = element_tensors[e];
        const double min_ev = c.min_eigenvalue();
        if (!(min_ev > 0.0)) {
            std::ostringstream msg;
            msg << "effective tensor of macro element " << e << " lost ellipticity (smallest Voigt eigenvalue "
                << min_ev << ")";
            throw DomainError(msg.str());
        }
        Eigen::Matrix<double, 24, 24> k = Eigen::Matrix<double, 24, 24>::Zero();
        int slot = 0;
        for (int I = 0; I < 6; ++I) {
            for (int J = I; J < 6; ++J, ++slot) {
                const double v = c.voigt(I, J);
                if (v != 0.0) k.noalias() += v * basis_[slot];
            }
        }
        const auto& hex = mesh_.hexes[e];
        for (int i = 0; i < 24; ++i) {
            for (int j = 0; j < 24; ++j) tb.add(3 * hex[i / 3] + i % 3, 3 * hex[j / 3] + j % 3, k(i, j));
        }
    }
    const fem::SparseMatrix a = tb.build();
    const fem::SparseMatrix ar = map_.reduce_matrix(a);
    Result r;
    const Vector rhs = map_.reduce_rhs(load, &r.multipliers);
    fem::SolverOptions opt;
    opt.tolerance = tolerance_;
    const auto res = fem::solve_spd(ar, rhs, opt);
    fem::require_converged(res, "macro elasticity");
    r.u = map_.expand(res.x);
    r.iterations = res.iterations;
    r.residual = res.residual;
    return r;
}

Mat3 element_strain(const MacroMesh& mesh, const Vector& u, std::size_t e, const Point3& xi) {
    const auto g = hex_gradients(xi, mesh.spacing());
    Mat3 grad = Mat3::Zero();  // grad(i, j) = d_j u_i
    const auto& hex = mesh.hexes[e];
    for (int a = 0; a < 8; ++a) {
        for (int i = 0; i < 3; ++i) {
            const double ui = u(3 * hex[a] + i);
            for (int j = 0; j < 3; ++j) grad(i, j) += ui * g[a][j];
        }
    }
    return 0.5 * (grad + grad.transpose());
}

std::vector<Mat3> nodal_strains(const MacroMesh& mesh, const Vector& u) {
    std::vector<Mat3> out(mesh.num_nodes(), Mat3::Zero());
    std::vector<int> count(mesh.num_nodes(), 0);
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        for (int a = 0; a < 8; ++a) {
            const int v = mesh.hexes[e][a];
            out[v] += element_strain(mesh, u, e, corner_point(a));
            ++count[v];
        }
    }
    // Nodes on x3 = 0 and x3 = a3 are the same point of the periodic domain.
    for (const auto& [s, m] : mesh.periodic_pairs) {
        const Mat3 sum = out[s] + out[m];
        const int c = count[s] + count[m];
        out[s] = out[m] = sum;
        count[s] = count[m] = c;
    }
    for (std::size_t v = 0; v < out.size(); ++v) out[v] /= count[v];
    return out;
}

double strain_norm(const MacroMesh& mesh, const Vector& u) {
    const double w = element_volume(mesh.spacing()) / 8.0;
    double s = 0.0;
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        for (const auto& q : gauss_points()) {
            const Mat3 eps = element_strain(mesh, u, e, q);
            s += w * eps.squaredNorm();
        }
    }
    return std::sqrt(s);
}

Vector lumped_mass(const MacroMesh& mesh) {
    Vector m = Vector::Zero(static_cast<Eigen::Index>(mesh.num_nodes()));
    const double w = element_volume(mesh.spacing()) / 8.0;
    for (const auto& hex : mesh.hexes) {
        for (int v : hex) m(v) += w;
    }
    return m;
}

Vector boundary_mass(const MacroMesh& mesh, BoundaryTag tag) {
    Vector m = Vector::Zero(static_cast<Eigen::Index>(mesh.num_nodes()));
    for (const auto& f : mesh.faces) {
        if (f.tag != tag) continue;
        for (int v : f.nodes) m(v) += 0.25 * f.area;
    }
    return m;
}

fem::SparseMatrix assemble_diffusion(const MacroMesh& mesh, const Eigen::Matrix3d& d) {
    const auto h = mesh.spacing();
    const double vol = element_volume(h);
    Eigen::Matrix<double, 8, 8> k = Eigen::Matrix<double, 8, 8>::Zero();
    // Vertex rule for the diagonal: one conductance per element edge.
    for (int a = 0; a < 8; ++a) {
        for (int b = a + 1; b < 8; ++b) {
            int dir = -1, diffs = 0;
            for (int c = 0; c < 3; ++c) {
                if (kCorner[a][c] != kCorner[b][c]) {
                    dir = c;
                    ++diffs;
                }
            }
            if (diffs != 1) continue;
            const double g = d(dir, dir) * vol / (4.0 * h[dir] * h[dir]);
            k(a, a) += g;
            k(b, b) += g;
            k(a, b) -= g;
            k(b, a) -= g;
        }
    }
    const bool has_off_diagonal = d(0, 1) != 0.0 || d(0, 2) != 0.0 || d(1, 2) != 0.0 || d(1, 0) != 0.0 ||
                                  d(2, 0) != 0.0 || d(2, 1) != 0.0;
    if (has_off_diagonal) {
        Eigen::Matrix3d off = d;
        off.diagonal().setZero();
        const double w = vol / 8.0;
        for (const auto& q : gauss_points()) {
            const auto g = hex_gradients(q, h);
            for (int a = 0; a < 8; ++a) {
                const Eigen::Vector3d ga(g[a][0], g[a][1], g[a][2]);
                for (int b = 0; b < 8; ++b) {
                    const Eigen::Vector3d gb(g[b][0], g[b][1], g[b][2]);
                    k(a, b) += w * ga.dot(off * gb);
                }
            }
        }
    }
    fem::TripletBuilder tb(mesh.num_nodes(), mesh.num_nodes());
    tb.reserve(64 * mesh.num_elements());
    for (const auto& hex : mesh.hexes) {
        for (int a = 0; a < 8; ++a) {
            for (int b = 0; b < 8; ++b) tb.add(hex[a], hex[b], k(a, b));
        }
    }
    return tb.build();
}

fem::ConstraintMap scalar_periodic_map(const MacroMesh& mesh) {
    fem::ConstraintMap map(mesh.num_nodes());
    for (const auto& [s, m] : mesh.periodic_pairs) map.add_periodic(s, m);
    map.finalize();
    return map;
}

}  // namespace cellwall::macro
