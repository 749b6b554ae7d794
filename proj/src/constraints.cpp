#include "cellwall/constraints.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "cellwall/error.hpp"

namespace cellwall::fem {

ConstraintMap::ConstraintMap(std::size_t num_dofs) : n_(num_dofs), master_(num_dofs) {
    std::iota(master_.begin(), master_.end(), 0);
}

void ConstraintMap::add_periodic(int slave, int master) {
    if (slave < 0 || master < 0 || static_cast<std::size_t>(slave) >= n_ ||
        static_cast<std::size_t>(master) >= n_) {
        throw ConstraintError("periodic pair index out of range");
    }
    if (slave == master) return;
    master_[slave] = master;
    finalized_ = false;
}

void ConstraintMap::set_kernel(Eigen::MatrixXd kernel, Eigen::MatrixXd functionals) {
    if (static_cast<std::size_t>(kernel.rows()) != n_ || static_cast<std::size_t>(functionals.cols()) != n_ ||
        kernel.cols() != functionals.rows()) {
        throw ConstraintError("kernel basis and functionals have inconsistent shapes");
    }
    kernel_ = std::move(kernel);
    functionals_ = std::move(functionals);
    finalized_ = false;
}

void ConstraintMap::finalize(double pivot_tol) {
    // Resolve chains (a slave whose master is itself a slave).
    for (std::size_t i = 0; i < n_; ++i) {
        int m = master_[i];
        std::size_t guard = 0;
        while (master_[m] != m) {
            m = master_[m];
            if (++guard > n_) throw ConstraintError("periodic identification contains a cycle");
        }
        master_[i] = m;
    }
    const Eigen::Index k = kernel_.cols();
    pins_.clear();
    if (k > 0) {
        for (std::size_t i = 0; i < n_; ++i) {
            const double scale = kernel_.row(static_cast<Eigen::Index>(master_[i])).cwiseAbs().maxCoeff() + 1.0;
            if ((kernel_.row(static_cast<Eigen::Index>(i)) - kernel_.row(master_[i])).cwiseAbs().maxCoeff() >
                1e-12 * scale * kernel_.cwiseAbs().maxCoeff()) {
                throw ConstraintError("kernel basis is not periodic");
            }
        }
        // Complete pivoting on the master rows of R selects k pins with an
        // invertible R restricted to them.
        std::vector<Eigen::Index> rows;
        for (std::size_t i = 0; i < n_; ++i) {
            if (master_[i] == static_cast<int>(i)) rows.push_back(static_cast<Eigen::Index>(i));
        }
        Eigen::MatrixXd work(static_cast<Eigen::Index>(rows.size()), k);
        for (std::size_t r = 0; r < rows.size(); ++r) work.row(static_cast<Eigen::Index>(r)) = kernel_.row(rows[r]);
        const double scale = work.cwiseAbs().maxCoeff();
        std::vector<bool> col_used(static_cast<std::size_t>(k), false);
        for (Eigen::Index step = 0; step < k; ++step) {
            Eigen::Index best_r = -1, best_c = -1;
            double best = -1.0;
            for (Eigen::Index c = 0; c < k; ++c) {
                if (col_used[static_cast<std::size_t>(c)]) continue;
                for (Eigen::Index r = 0; r < work.rows(); ++r) {
                    // First strictly larger entry wins, so ties resolve to the
                    // lowest index and the choice is deterministic.
                    if (std::abs(work(r, c)) > best) {
                        best = std::abs(work(r, c));
                        best_r = r;
                        best_c = c;
                    }
                }
            }
            if (!(best > pivot_tol * scale)) {
                throw ConstraintError("kernel basis is rank deficient on the periodic space");
            }
            col_used[static_cast<std::size_t>(best_c)] = true;
            const Eigen::VectorXd pivot_row = work.row(best_r);
            for (Eigen::Index r = 0; r < work.rows(); ++r) {
                const double f = work(r, best_c) / pivot_row(best_c);
                work.row(r) -= f * pivot_row.transpose();
            }
            pins_.push_back(static_cast<int>(rows[static_cast<std::size_t>(best_r)]));
        }
        const Eigen::MatrixXd cr = functionals_ * kernel_;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(cr);
        const auto& sv = svd.singularValues();
        if (!(sv(sv.size() - 1) > pivot_tol * sv(0))) {
            std::ostringstream msg;
            msg << "constraint functionals do not fix the kernel (singular value ratio "
                << sv(sv.size() - 1) / sv(0) << ")";
            throw ConstraintError(msg.str());
        }
        cr_inv_ = cr.inverse();
    }
    reduced_.assign(n_, -1);
    std::vector<bool> pinned(n_, false);
    for (int p : pins_) pinned[static_cast<std::size_t>(p)] = true;
    reduced_size_ = 0;
    for (std::size_t i = 0; i < n_; ++i) {
        if (master_[i] == static_cast<int>(i) && !pinned[i]) reduced_[i] = static_cast<int>(reduced_size_++);
    }
    finalized_ = true;
}

SparseMatrix ConstraintMap::reduce_matrix(const SparseMatrix& a) const {
    if (!finalized_) throw ConstraintError("constraint map used before finalize()");
    if (a.rows() != n_ || a.cols() != n_) throw ConstraintError("matrix size does not match constraint map");
    TripletBuilder tb(reduced_size_, reduced_size_);
    tb.reserve(a.nonzeros());
    const auto& rp = a.row_ptr();
    const auto& ci = a.col_idx();
    const auto& v = a.values();
    for (std::size_t i = 0; i < n_; ++i) {
        const int ri = reduced_[static_cast<std::size_t>(master_[i])];
        if (ri < 0) continue;
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
            const int rj = reduced_[static_cast<std::size_t>(master_[static_cast<std::size_t>(ci[k])])];
            if (rj >= 0) tb.add(ri, rj, v[k]);
        }
    }
    return tb.build();
}

Vector ConstraintMap::reduce_rhs(const Vector& load, Vector* multipliers) const {
    if (!finalized_) throw ConstraintError("constraint map used before finalize()");
    Vector l = load;
    if (kernel_.cols() > 0) {
        // A u + C^T lambda = L tested with R (A R = 0) gives R^T C^T lambda = R^T L.
        const Vector lambda = cr_inv_.transpose() * (kernel_.transpose() * load);
        l -= functionals_.transpose() * lambda;
        if (multipliers) *multipliers = lambda;
    } else if (multipliers) {
        multipliers->resize(0);
    }
    Vector r = Vector::Zero(static_cast<Eigen::Index>(reduced_size_));
    for (std::size_t i = 0; i < n_; ++i) {
        const int ri = reduced_[static_cast<std::size_t>(master_[i])];
        if (ri >= 0) r(ri) += l(static_cast<Eigen::Index>(i));
    }
    return r;
}

Vector ConstraintMap::expand(const Vector& reduced) const {
    if (!finalized_) throw ConstraintError("constraint map used before finalize()");
    Vector u = Vector::Zero(static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < n_; ++i) {
        const int ri = reduced_[static_cast<std::size_t>(master_[i])];
        if (ri >= 0) u(static_cast<Eigen::Index>(i)) = reduced(ri);
    }
    if (kernel_.cols() > 0) u -= kernel_ * (cr_inv_ * (functionals_ * u));
    return u;
}

Vector ConstraintMap::project(const Vector& full) const {
    if (!finalized_) throw ConstraintError("constraint map used before finalize()");
    Vector u(static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < n_; ++i) u(static_cast<Eigen::Index>(i)) = full(master_[i]);
    if (kernel_.cols() > 0) u -= kernel_ * (cr_inv_ * (functionals_ * u));
    return u;
}

Vector ConstraintMap::restrict_to_reduced(const Vector& full) const {
    if (!finalized_) throw ConstraintError("constraint map used before finalize()");
    Vector r(static_cast<Eigen::Index>(reduced_size_));
    for (std::size_t i = 0; i < n_; ++i) {
        if (reduced_[i] >= 0) r(reduced_[i]) = full(static_cast<Eigen::Index>(i));
    }
    return r;
}

Vector ConstraintMap::functional_values(const Vector& full) const {
    if (functionals_.rows() == 0) return Vector();
    return functionals_ * full;
}

}  // namespace cellwall::fem
