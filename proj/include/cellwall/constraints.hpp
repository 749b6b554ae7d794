#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "cellwall/sparse.hpp"

namespace cellwall::fem {

/// Reduces a singular symmetric system to an SPD one.
///
/// Periodicity is handled by master-slave elimination: a slave degree of
/// freedom takes its master's value and its row/column are folded into the
/// master's. The remaining kernel (constants, rigid motions) is removed by
/// linear functionals C u = 0: given a kernel basis R of the periodic
/// operator, the load is projected onto range(A) with the multipliers
/// lambda = (C R)^-T R^T L, a few automatically chosen degrees of freedom
/// are pinned to make the reduced matrix definite, and after the solve the
/// kernel component is fixed so that C u = 0.
class ConstraintMap {
public:
    explicit ConstraintMap(std::size_t num_dofs);

    /// Identifies `slave` with `master`. Chains are resolved at finalize().
    void add_periodic(int slave, int master);
    /// kernel: n x k basis of the operator's null space on periodic fields;
    /// functionals: k x n rows of C. Both must be set together.
    void set_kernel(Eigen::MatrixXd kernel, Eigen::MatrixXd functionals);
    /// Resolves masters, picks pins and checks independence. Throws
    /// ConstraintError when the kernel basis is rank deficient, is not
    /// periodic, or when C R is singular (relative pivot below `pivot_tol`).
    void finalize(double pivot_tol = 1e-10);

    std::size_t num_dofs() const { return n_; }
    std::size_t reduced_size() const { return reduced_size_; }
    const std::vector<int>& master() const { return master_; }
    const std::vector<int>& pinned() const { return pins_; }
    /// Index of each dof in the reduced system, -1 for slaves and pins.
    const std::vector<int>& reduced_index() const { return reduced_; }

    SparseMatrix reduce_matrix(const SparseMatrix& a) const;
    /// Folds the load onto masters after removing its kernel component.
    /// Optionally returns the multipliers lambda (one per functional).
    Vector reduce_rhs(const Vector& load, Vector* multipliers = nullptr) const;
    /// Maps a reduced solution back to all dofs and enforces C u = 0.
    Vector expand(const Vector& reduced) const;
    /// Copies master values onto slaves and removes the kernel component
    /// violating C u = 0. Idempotent; maps kernel vectors to zero.
    Vector project(const Vector& full) const;
    /// Values of a full vector at the reduced dofs (e.g. an initial guess).
    Vector restrict_to_reduced(const Vector& full) const;
    /// C u for a full vector.
    Vector functional_values(const Vector& full) const;

private:
    std::size_t n_;
    std::vector<int> master_;
    Eigen::MatrixXd kernel_, functionals_;
    Eigen::MatrixXd cr_inv_;  // (C R)^-1
    std::vector<int> pins_;
    std::vector<int> reduced_;
    std::size_t reduced_size_ = 0;
    bool finalized_ = false;
};

}  // namespace cellwall::fem
