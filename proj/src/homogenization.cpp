#include "cellwall/homogenization.hpp"

#include <future>
#include <sstream>

#include "cellwall/constraints.hpp"
#include "cellwall/error.hpp"

namespace cellwall::homog {

namespace {

// Runs job(0..count-1), on up to `threads` workers. Results are written by
// index, so the outcome does not depend on scheduling.
template <class Job>
void run_indexed(int count, int threads, Job job) {
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) job(i);
        return;
    }
    std::vector<std::future<void>> pending;
    for (int start = 0; start < threads && start < count; ++start) {
        pending.push_back(std::async(std::launch::async, [=, &job] {
            for (int i = start; i < count; i += threads) job(i);
        }));
    }
    for (auto& f : pending) f.get();
}

fem::ConstraintMap periodic_zero_mean(const UnitCellMesh& mesh, int components) {
    const std::size_t n = components * mesh.num_vertices();
    fem::ConstraintMap map(n);
    for (const auto& [s, m] : mesh.periodic_pairs) {
        for (int c = 0; c < components; ++c) map.add_periodic(components * s + c, components * m + c);
    }
    const fem::Vector mass = fem::lumped_mass(mesh);
    Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), components);
    Eigen::MatrixXd func = Eigen::MatrixXd::Zero(components, static_cast<Eigen::Index>(n));
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
        for (int c = 0; c < components; ++c) {
            const auto i = static_cast<Eigen::Index>(components * v + c);
            kernel(i, c) = 1.0;
            func(c, i) = mass(static_cast<Eigen::Index>(v));
        }
    }
    map.set_kernel(std::move(kernel), std::move(func));
    map.finalize();
    return map;
}

}  // namespace

ScalarCorrectorSet solve_scalar_correctors(const UnitCellMesh& mesh, const Eigen::Matrix3d& d,
                                           const CellSolveOptions& options) {
    fem::require_spd(d, "diffusion coefficient");
    ScalarCorrectorSet set;
    set.coefficient = d;
    set.submesh = region_submesh(mesh, Region::Matrix, &set.vertex_map);
    const auto& sub = set.submesh;
    if (sub.num_triangles() == 0) throw DomainError("cell has no matrix region");

    const fem::SparseMatrix a = fem::assemble_scalar_stiffness(sub, {d, d});
    const fem::ConstraintMap map = periodic_zero_mean(sub, 1);
    const fem::SparseMatrix ar = map.reduce_matrix(a);

    run_indexed(3, options.threads, [&](int j) {
        fem::Vector load = fem::Vector::Zero(static_cast<Eigen::Index>(sub.num_vertices()));
        double gross = 0.0;
        for (std::size_t t = 0; t < sub.num_triangles(); ++t) {
            const auto e = fem::p1_element(sub, t);
            for (int a_ = 0; a_ < 3; ++a_) {
                const double f = e.area * (d(0, j) * e.grad[a_][0] + d(1, j) * e.grad[a_][1]);
                gross += f * f;
                load(sub.triangles[t][a_]) -= f;
            }
        }
        fem::SolverOptions so = options.solver;
        so.absolute_floor = std::max(so.absolute_floor, 1e-14 * std::sqrt(gross));
        const auto res = fem::solve_spd(ar, map.reduce_rhs(load), so);
        fem::require_converged(res, "scalar corrector");
        set.v[j] = map.expand(res.x);
        set.iterations[j] = res.iterations;
    });
    return set;
}

Eigen::Matrix3d effective_diffusion(const ScalarCorrectorSet& set, bool normalize_by_theta_m) {
    const auto& sub = set.submesh;
    const Eigen::Matrix3d& d = set.coefficient;
    Eigen::Matrix3d out = Eigen::Matrix3d::Zero();
    double area = 0.0;
    for (std::size_t t = 0; t < sub.num_triangles(); ++t) {
        const auto e = fem::p1_element(sub, t);
        area += e.area;
        for (int j = 0; j < 3; ++j) {
            double g1 = 0.0, g2 = 0.0;
            for (int a = 0; a < 3; ++a) {
                const double v = set.v[j](sub.triangles[t][a]);
                g1 += v * e.grad[a][0];
                g2 += v * e.grad[a][1];
            }
            for (int i = 0; i < 3; ++i) out(i, j) += e.area * (d(i, j) + d(i, 0) * g1 + d(i, 1) * g2);
        }
    }
    // The cell has unit measure, so the matrix area is theta_M.
    if (normalize_by_theta_m) out /= area;
    return out;
}

ElasticCorrectorSet solve_elastic_correctors(const UnitCellMesh& mesh, const fem::ByRegion<Tensor4>& stiffness,
                                             const CellSolveOptions& options) {
    for (int r = 0; r < 2; ++r) {
        if (!(stiffness[r].min_eigenvalue() > 0.0)) {
            std::ostringstream msg;
            msg << "stiffness of region " << r << " is not strongly elliptic (smallest Voigt eigenvalue "
                << stiffness[r].min_eigenvalue() << ")";
            throw DomainError(msg.str());
        }
    }
    ElasticCorrectorSet set;
    set.mesh_id = mesh.id;
    set.stiffness = stiffness;
    const fem::SparseMatrix a = fem::assemble_vector_stiffness_2p5d(mesh, stiffness);
    const fem::ConstraintMap map = periodic_zero_mean(mesh, 3);
    const fem::SparseMatrix ar = map.reduce_matrix(a);

    const std::size_t nt = mesh.num_triangles();
    std::vector<fem::StrainOperator> ops(nt);
    std::vector<double> areas(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        const auto e = fem::p1_element(mesh, t);
        ops[t] = fem::strain_operator_2p5d(e);
        areas[t] = e.area;
    }
    const Voigt6 c[2] = {stiffness[0].voigt_matrix(), stiffness[1].voigt_matrix()};

    run_indexed(6, options.threads, [&](int I) {
        fem::Vector load = fem::Vector::Zero(static_cast<Eigen::Index>(3 * mesh.num_vertices()));
        double gross = 0.0;  // load norm before cancellation between elements
        for (std::size_t t = 0; t < nt; ++t) {
            const Vec6 sigma = c[static_cast<int>(mesh.regions[t])].col(I);
            const Eigen::Matrix<double, 9, 1> f = -areas[t] * ops[t].transpose() * sigma;
            gross += f.squaredNorm();
            const auto& tri = mesh.triangles[t];
            for (int k = 0; k < 9; ++k) load(3 * tri[k / 3] + k % 3) += f(k);
        }
        fem::SolverOptions so = options.solver;
        so.absolute_floor = std::max(so.absolute_floor, 1e-14 * std::sqrt(gross));
        const auto res = fem::solve_spd(ar, map.reduce_rhs(load), so);
        fem::require_converged(res, "elastic corrector");
        set.w[I] = map.expand(res.x);
        set.iterations[I] = res.iterations;
    });

    set.strain.assign(nt, Voigt6::Zero());
    for (std::size_t t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangles[t];
        for (int I = 0; I < 6; ++I) {
            Eigen::Matrix<double, 9, 1> we;
            for (int k = 0; k < 9; ++k) we(k) = set.w[I](3 * tri[k / 3] + k % 3);
            set.strain[t].col(I) = ops[t] * we;
        }
    }
    return set;
}

Voigt6 effective_elasticity_matrix(const UnitCellMesh& mesh, const ElasticCorrectorSet& set) {
    if (set.mesh_id != mesh.id) throw Error("elastic correctors belong to a different mesh");
    const Voigt6 c[2] = {set.stiffness[0].voigt_matrix(), set.stiffness[1].voigt_matrix()};
    Voigt6 out = Voigt6::Zero();
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const Voigt6 local = Voigt6::Identity() + set.strain[t];
        out += mesh.triangle_area(t) * (c[static_cast<int>(mesh.regions[t])] * local);
    }
    return out;
}

Tensor4 effective_elasticity(const UnitCellMesh& mesh, const ElasticCorrectorSet& set) {
    return Tensor4::from_voigt(effective_elasticity_matrix(mesh, set), 1e-8);
}

LocalizationField localization_field(const UnitCellMesh& mesh, const ElasticCorrectorSet& set,
                                     double reference_modulus) {
    if (set.mesh_id != mesh.id) throw Error("elastic correctors belong to a different mesh");
    LocalizationField f;
    f.mesh_id = mesh.id;
    f.reference_modulus = reference_modulus;
    f.theta_m = volume_fractions(mesh).matrix;
    f.sample.resize(mesh.num_triangles());
    f.weight.resize(mesh.num_triangles());
    f.region = mesh.regions;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        f.sample[t] = Voigt6::Identity() + set.strain[t];
        f.weight[t] = mesh.triangle_area(t);
    }
    return f;
}

Voigt6 localization_stiffness(const LocalizationField& field, const fem::ByRegion<Tensor4>& stiffness) {
    const Voigt6 c[2] = {stiffness[0].voigt_matrix(), stiffness[1].voigt_matrix()};
    Voigt6 out = Voigt6::Zero();
    for (std::size_t t = 0; t < field.size(); ++t) {
        out += field.weight[t] * (c[static_cast<int>(field.region[t])] * field.sample[t]);
    }
    return out;
}

LocalizationField identity_localization(const UnitCellMesh& mesh) {
    LocalizationField f;
    f.mesh_id = mesh.id;
    f.theta_m = volume_fractions(mesh).matrix;
    f.sample.assign(mesh.num_triangles(), Voigt6::Identity());
    f.region = mesh.regions;
    f.weight.resize(mesh.num_triangles());
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) f.weight[t] = mesh.triangle_area(t);
    return f;
}

}  // namespace homog
