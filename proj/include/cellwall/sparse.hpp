#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace cellwall::fem {

using Vector = Eigen::VectorXd;

/// Compressed sparse row matrix. Column indices are sorted within each row
/// and no explicitly stored zero survives finalization.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                 std::vector<int> col_idx, std::vector<double> values);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nonzeros() const { return values_.size(); }
    const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }

    /// Entry (i, j), zero when not stored.
    double at(std::size_t i, std::size_t j) const;
    Vector diagonal() const;
    void multiply(const Vector& x, Vector& y) const;
    Vector operator*(const Vector& x) const;
    /// max |a_ij - a_ji| / max |a_ij|
    double symmetry_defect() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<int> col_idx_;
    std::vector<double> values_;
};

/// Collects (i, j, v) contributions. Duplicates are summed in insertion
/// order, so the result depends only on the sequence of add() calls.
class TripletBuilder {
public:
    TripletBuilder(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}
    void reserve(std::size_t n);
    void add(int i, int j, double v);
    SparseMatrix build() const;

private:
    struct Entry {
        int i, j;
        double v;
    };
    std::size_t rows_, cols_;
    std::vector<Entry> entries_;
};

enum class Preconditioner { Jacobi, SymmetricGaussSeidel };

struct SolverOptions {
    double tolerance = 1e-10;  ///< relative residual ||Ax - b|| / ||b||
    int max_iterations = 0;  ///< 0 selects 20 * n + 100
    Preconditioner preconditioner = Preconditioner::Jacobi;
    /// Residual norm that counts as converged regardless of ||b||; lets a
    /// load that is pure cancellation round-off pass.
    double absolute_floor = 0.0;
};

struct SolveResult {
    Vector x;
    int iterations = 0;
    double residual = 0.0;  ///< final relative residual
    bool converged = false;
};

/// Preconditioned conjugate gradients for a symmetric positive definite
/// matrix. Non-convergence is reported through the result, not thrown.
SolveResult solve_spd(const SparseMatrix& a, const Vector& b, const SolverOptions& options = {},
                      const Vector* initial = nullptr);

/// Throws SolverError when the result did not converge.
const SolveResult& require_converged(const SolveResult& r, const char* what);

}  // namespace cellwall::fem
