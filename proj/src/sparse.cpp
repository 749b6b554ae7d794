#include "cellwall/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cellwall/error.hpp"

namespace cellwall::fem {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                           std::vector<int> col_idx, std::vector<double> values)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
    if (row_ptr_.size() != rows_ + 1 || col_idx_.size() != values_.size() ||
        row_ptr_.back() != values_.size()) {
        throw Error("inconsistent CSR arrays");
    }
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
    const auto begin = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
    const auto end = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
    const auto it = std::lower_bound(begin, end, static_cast<int>(j));
    if (it == end || *it != static_cast<int>(j)) return 0.0;
    return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

Vector SparseMatrix::diagonal() const {
    Vector d = Vector::Zero(static_cast<Eigen::Index>(std::min(rows_, cols_)));
    for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = at(static_cast<std::size_t>(i), static_cast<std::size_t>(i));
    return d;
}

void SparseMatrix::multiply(const Vector& x, Vector& y) const {
    y.resize(static_cast<Eigen::Index>(rows_));
    const double* xv = x.data();
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * xv[col_idx_[k]];
        y(static_cast<Eigen::Index>(i)) = s;
    }
}

Vector SparseMatrix::operator*(const Vector& x) const {
    Vector y;
    multiply(x, y);
    return y;
}

double SparseMatrix::symmetry_defect() const {
    double scale = 0.0, defect = 0.0;
    for (double v : values_) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            const auto j = static_cast<std::size_t>(col_idx_[k]);
            defect = std::max(defect, std::abs(values_[k] - at(j, i)));
        }
    }
    return defect / scale;
}

void TripletBuilder::reserve(std::size_t n) { entries_.reserve(n); }

void TripletBuilder::add(int i, int j, double v) {
    if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= rows_ || static_cast<std::size_t>(j) >= cols_) {
        throw Error("triplet index out of range");
    }
    entries_.push_back({i, j, v});
}

SparseMatrix TripletBuilder::build() const {
    // Bucket by row (stable), then stable-sort each row by column so equal
    // (i, j) entries are summed in insertion order.
    std::vector<std::size_t> count(rows_ + 1, 0);
    for (const auto& e : entries_) ++count[static_cast<std::size_t>(e.i) + 1];
    std::partial_sum(count.begin(), count.end(), count.begin());
    std::vector<std::size_t> fill(count.begin(), count.end() - 1);
    std::vector<std::pair<int, double>> sorted(entries_.size());
    for (const auto& e : entries_) sorted[fill[static_cast<std::size_t>(e.i)]++] = {e.j, e.v};

    std::vector<std::size_t> row_ptr{0};
    row_ptr.reserve(rows_ + 1);
    std::vector<int> cols;
    std::vector<double> vals;
    cols.reserve(entries_.size() / 2);
    vals.reserve(entries_.size() / 2);
    for (std::size_t r = 0; r < rows_; ++r) {
        auto first = sorted.begin() + static_cast<std::ptrdiff_t>(count[r]);
        auto last = sorted.begin() + static_cast<std::ptrdiff_t>(count[r + 1]);
        std::stable_sort(first, last, [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto it = first; it != last;) {
            const int c = it->first;
            double s = 0.0;
            for (; it != last && it->first == c; ++it) s += it->second;
            if (s != 0.0) {
                cols.push_back(c);
                vals.push_back(s);
            }
        }
        row_ptr.push_back(cols.size());
    }
    return SparseMatrix(rows_, cols_, std::move(row_ptr), std::move(cols), std::move(vals));
}

namespace {

class Preconditioning {
public:
    Preconditioning(const SparseMatrix& a, Preconditioner kind) : a_(a), kind_(kind) {
        inv_diag_ = a.diagonal();
        for (Eigen::Index i = 0; i < inv_diag_.size(); ++i) {
            if (!(inv_diag_(i) > 0.0)) {
                std::ostringstream msg;
                msg << "matrix has non-positive diagonal entry " << inv_diag_(i) << " at row " << i;
                throw DomainError(msg.str());
            }
            inv_diag_(i) = 1.0 / inv_diag_(i);
        }
    }

    void apply(const Vector& r, Vector& z) const {
        if (kind_ == Preconditioner::Jacobi) {
            z = r.cwiseProduct(inv_diag_);
            return;
        }
        // Symmetric Gauss-Seidel: (D + L) D^-1 (D + U) z = r.
        const auto& rp = a_.row_ptr();
        const auto& ci = a_.col_idx();
        const auto& v = a_.values();
        const auto n = static_cast<std::size_t>(r.size());
        z.resize(r.size());
        for (std::size_t i = 0; i < n; ++i) {
            double s = r(static_cast<Eigen::Index>(i));
            for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
                if (static_cast<std::size_t>(ci[k]) < i) s -= v[k] * z(ci[k]);
            }
            z(static_cast<Eigen::Index>(i)) = s * inv_diag_(static_cast<Eigen::Index>(i));
        }
        for (std::size_t ii = n; ii-- > 0;) {
            double s = 0.0;
            for (std::size_t k = rp[ii]; k < rp[ii + 1]; ++k) {
                if (static_cast<std::size_t>(ci[k]) > ii) s += v[k] * z(ci[k]);
            }
            z(static_cast<Eigen::Index>(ii)) -= s * inv_diag_(static_cast<Eigen::Index>(ii));
        }
    }

private:
    const SparseMatrix& a_;
    Preconditioner kind_;
    Vector inv_diag_;
};

}  // namespace

SolveResult solve_spd(const SparseMatrix& a, const Vector& b, const SolverOptions& options,
                      const Vector* initial) {
    if (a.rows() != a.cols() || static_cast<std::size_t>(b.size()) != a.rows()) {
        throw Error("solve_spd: dimension mismatch");
    }
    SolveResult res;
    const auto n = b.size();
    res.x = initial ? *initial : Vector::Zero(n);
    const double bnorm = b.norm();
    if (n == 0 || bnorm == 0.0) {
        res.x.setZero(n);
        res.converged = true;
        return res;
    }
    const int maxit = options.max_iterations > 0 ? options.max_iterations : static_cast<int>(20 * n + 100);
    const Preconditioning pc(a, options.preconditioner);

    Vector r = b - a * res.x;
    Vector z, p, q;
    pc.apply(r, z);
    p = z;
    double rz = r.dot(z);
    const double target = std::max(options.tolerance * bnorm, options.absolute_floor);
    int it = 0;
    double rnorm = r.norm();
    while (rnorm > target && it < maxit) {
        a.multiply(p, q);
        const double pq = p.dot(q);
        if (!(pq > 0.0)) throw DomainError("solve_spd: matrix is not positive definite");
        const double alpha = rz / pq;
        res.x.noalias() += alpha * p;
        r.noalias() -= alpha * q;
        ++it;
        rnorm = r.norm();
        // Guard against drift of the recursive residual.
        if (rnorm <= target || it % 500 == 0) {
            r = b - a * res.x;
            rnorm = r.norm();
            if (rnorm <= target) break;
        }
        pc.apply(r, z);
        const double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
    }
    res.iterations = it;
    const double final_norm = (b - a * res.x).norm();
    res.residual = final_norm / bnorm;
    res.converged = final_norm <= target;
    return res;
}

const SolveResult& require_converged(const SolveResult& r, const char* what) {
    if (!r.converged) {
        std::ostringstream msg;
        msg << what << ": conjugate gradients did not converge after " << r.iterations
            << " iterations (relative residual " << r.residual << ")";
        throw SolverError(msg.str(), r.iterations, r.residual);
    }
    return r;
}

}  // namespace cellwall::fem
