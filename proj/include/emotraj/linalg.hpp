#pragma once

// Minimal dense linear algebra: a row-major matrix, a cyclic Jacobi
// eigensolver for symmetric matrices, and column-pivoted Householder QR
// least squares. Deterministic by construction; no external dependencies.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "emotraj/error.hpp"

namespace emotraj {

class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

    std::vector<double> column(int c) const {
        std::vector<double> out(static_cast<size_t>(rows_));
        for (int r = 0; r < rows_; ++r) out[static_cast<size_t>(r)] = (*this)(r, c);
        return out;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double v : data_) s += v * v;
        return std::sqrt(s);
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

struct SymmetricEigen {
    std::vector<double> values; // descending
    Matrix vectors;             // column i pairs with values[i]
};

// Cyclic Jacobi for symmetric input. Converges when the off-diagonal
// Frobenius norm falls below tol_rel * ||S||_F; hard cap max_sweeps.
inline SymmetricEigen jacobi_eigen_symmetric(Matrix s, int max_sweeps = 100,
                                             double tol_rel = 1e-12) {
    const int n = s.rows();
    if (n != s.cols())
        fail(ErrorCode::DimensionMismatch, "jacobi: matrix must be square");
    Matrix v(n, n, 0.0);
    for (int i = 0; i < n; ++i) v(i, i) = 1.0;

    const double stop = tol_rel * std::max(s.frobenius_norm(), 1e-300);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += 2.0 * s(p, q) * s(p, q);
        if (std::sqrt(off) < stop) break;

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = s(p, q);
                if (apq == 0.0) continue;
                const double theta = (s(q, q) - s(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;

                for (int k = 0; k < n; ++k) {
                    const double skp = s(k, p), skq = s(k, q);
                    s(k, p) = c * skp - sn * skq;
                    s(k, q) = sn * skp + c * skq;
                }
                for (int k = 0; k < n; ++k) {
                    const double spk = s(p, k), sqk = s(q, k);
                    s(p, k) = c * spk - sn * sqk;
                    s(q, k) = sn * spk + c * sqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> idx(static_cast<size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&s](int a, int b) { return s(a, a) > s(b, b); });

    SymmetricEigen out;
    out.values.resize(static_cast<size_t>(n));
    out.vectors = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        out.values[static_cast<size_t>(j)] = s(idx[static_cast<size_t>(j)], idx[static_cast<size_t>(j)]);
        for (int i = 0; i < n; ++i) out.vectors(i, j) = v(i, idx[static_cast<size_t>(j)]);
    }
    return out;
}

// min ||Ax - b||_2 via column-pivoted Householder QR. Rank-deficient systems
// get the basic solution (free variables pinned to zero), which keeps the
// result deterministic across duplicated-row inputs.
inline std::vector<double> least_squares(const Matrix& a_in, const std::vector<double>& b_in,
                                         double rank_tol_rel = 1e-12) {
    const int m = a_in.rows();
    const int n = a_in.cols();
    if (static_cast<size_t>(m) != b_in.size())
        fail(ErrorCode::DimensionMismatch, "least_squares: rows(A) != len(b)");
    Matrix a = a_in;
    std::vector<double> b = b_in;
    std::vector<int> perm(static_cast<size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> colnorm2(static_cast<size_t>(n), 0.0);

    const int steps = std::min(m, n);
    std::vector<double> rdiag;
    for (int k = 0; k < steps; ++k) {
        // pivot: largest remaining column norm, recomputed exactly; ties keep
        // the lowest column index
        int pivot = k;
        double best = -1.0;
        for (int j = k; j < n; ++j) {
            double s = 0.0;
            for (int i = k; i < m; ++i) s += a(i, j) * a(i, j);
            colnorm2[static_cast<size_t>(j)] = s;
            if (s > best) {
                best = s;
                pivot = j;
            }
        }
        if (pivot != k) {
            for (int i = 0; i < m; ++i) std::swap(a(i, k), a(i, pivot));
            std::swap(perm[static_cast<size_t>(k)], perm[static_cast<size_t>(pivot)]);
            std::swap(colnorm2[static_cast<size_t>(k)], colnorm2[static_cast<size_t>(pivot)]);
        }

        double norm = std::sqrt(colnorm2[static_cast<size_t>(k)]);
        if (norm == 0.0) {
            rdiag.push_back(0.0);
            continue;
        }
        // reflector v = x/norm + e_k with norm carrying the sign of x_k, so
        // v_k >= 1 and v^T v = 2 v_k; H maps x onto -norm * e_k
        if (a(k, k) < 0) norm = -norm;
        for (int i = k; i < m; ++i) a(i, k) /= norm;
        a(k, k) += 1.0;

        for (int j = k + 1; j < n; ++j) {
            double dot = 0.0;
            for (int i = k; i < m; ++i) dot += a(i, k) * a(i, j);
            dot = -dot / a(k, k);
            for (int i = k; i < m; ++i) a(i, j) += dot * a(i, k);
        }
        double dotb = 0.0;
        for (int i = k; i < m; ++i) dotb += a(i, k) * b[static_cast<size_t>(i)];
        dotb = -dotb / a(k, k);
        for (int i = k; i < m; ++i) b[static_cast<size_t>(i)] += dotb * a(i, k);
        rdiag.push_back(-norm);
    }

    double rmax = 0.0;
    for (double d : rdiag) rmax = std::max(rmax, std::abs(d));
    const double tol = rank_tol_rel * (rmax > 0.0 ? rmax : 1.0);
    int rank = 0;
    for (double d : rdiag)
        if (std::abs(d) > tol) ++rank;
        else break;

    std::vector<double> y(static_cast<size_t>(n), 0.0);
    for (int i = rank - 1; i >= 0; --i) {
        double s = b[static_cast<size_t>(i)];
        for (int j = i + 1; j < rank; ++j) s -= a(i, j) * y[static_cast<size_t>(j)];
        y[static_cast<size_t>(i)] = s / rdiag[static_cast<size_t>(i)];
    }
    std::vector<double> x(static_cast<size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) x[static_cast<size_t>(perm[static_cast<size_t>(j)])] = y[static_cast<size_t>(j)];
    return x;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

} // namespace emotraj
