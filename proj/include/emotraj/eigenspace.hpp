#pragma once

// Eigenface training and projection. Training eigendecomposes the small
// M x M Gram matrix A^T A instead of the hw x hw covariance (M << hw) and
// maps the eigenvectors back through A, which yields the identical retained
// basis at a fraction of the cost.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "emotraj/error.hpp"
#include "emotraj/linalg.hpp"

namespace emotraj {

struct EigenModel {
    int face_width = 0;
    int face_height = 0;
    int training_count = 0; // M
    bool centering = true;  // subtract the mean before projecting

    std::vector<double> mean;                     // length h*w
    std::vector<std::vector<double>> eigenfaces;  // K unit vectors, length h*w
    std::vector<double> eigenvalues;              // K retained, descending, of (A^T A)/M
    std::vector<double> singular_values;          // sqrt(M * eigenvalue)

    // Full spectrum of (A^T A)/M from training (all M values, descending).
    // Kept for diagnostics and reconstruction bounds; not persisted.
    std::vector<double> spectrum;

    int k() const { return static_cast<int>(eigenfaces.size()); }
    size_t dim() const { return mean.size(); }
};

using WeightVector = std::vector<double>;

// One sequence in weight space: column t is the projection of frame t.
struct WeightTrajectory {
    std::vector<WeightVector> columns; // L entries, each of length K
    std::string label = "unlabeled";

    int length() const { return static_cast<int>(columns.size()); }
    int k() const { return columns.empty() ? 0 : static_cast<int>(columns.front().size()); }
    double weight(int direction, int t) const {
        return columns[static_cast<size_t>(t)][static_cast<size_t>(direction)];
    }
};

namespace detail {

// Deterministic sign: largest-magnitude entry made positive (lowest index
// wins among equal magnitudes).
inline void canonicalize_sign(std::vector<double>& v) {
    size_t arg = 0;
    double best = -1.0;
    for (size_t i = 0; i < v.size(); ++i) {
        double m = std::abs(v[i]);
        if (m > best) {
            best = m;
            arg = i;
        }
    }
    if (!v.empty() && v[arg] < 0.0)
        for (double& x : v) x = -x;
}

} // namespace detail

inline constexpr double kEigenvalueFloorRel = 1e-10;

// Table-style PCA training over M face vectors. Returns at most
// min(requested_k, M) eigenfaces; directions whose eigenvalue falls below
// 1e-10 * lambda_1 are dropped, so the effective K can be smaller than
// requested.
inline EigenModel train_pca(const std::vector<std::vector<double>>& faces, int requested_k,
                            int face_width = 0, int face_height = 0) {
    const int m = static_cast<int>(faces.size());
    if (m < 2)
        fail(ErrorCode::DegenerateData, "train_pca: need at least 2 faces");
    const size_t dim = faces.front().size();
    if (dim == 0)
        fail(ErrorCode::DimensionMismatch, "train_pca: empty face vector");
    for (const auto& f : faces)
        if (f.size() != dim)
            fail(ErrorCode::DimensionMismatch, "train_pca: face vectors differ in length");
    if (requested_k < 1)
        fail(ErrorCode::InvalidArgument, "train_pca: K must be >= 1");

    EigenModel model;
    model.face_width = face_width > 0 ? face_width : static_cast<int>(dim);
    model.face_height = face_height > 0 ? face_height : 1;
    model.training_count = m;

    model.mean.assign(dim, 0.0);
    for (const auto& f : faces)
        for (size_t i = 0; i < dim; ++i) model.mean[i] += f[i];
    for (double& v : model.mean) v /= m;

    // centered columns phi_i = face_i - mean; Gram entry (i,j) = phi_i . phi_j
    std::vector<std::vector<double>> phi(faces.size());
    for (int i = 0; i < m; ++i) {
        phi[static_cast<size_t>(i)].resize(dim);
        for (size_t p = 0; p < dim; ++p)
            phi[static_cast<size_t>(i)][p] = faces[static_cast<size_t>(i)][p] - model.mean[p];
    }
    Matrix gram(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            double d = dot(phi[static_cast<size_t>(i)], phi[static_cast<size_t>(j)]);
            gram(i, j) = d;
            gram(j, i) = d;
        }

    SymmetricEigen eig = jacobi_eigen_symmetric(gram);

    model.spectrum.resize(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i)
        model.spectrum[static_cast<size_t>(i)] = std::max(eig.values[static_cast<size_t>(i)], 0.0) / m;

    const double lambda1 = model.spectrum.empty() ? 0.0 : model.spectrum.front();
    if (lambda1 <= 0.0)
        fail(ErrorCode::DegenerateData, "train_pca: all faces identical, covariance vanished");

    const int k_cap = std::min(requested_k, m);
    for (int i = 0; i < k_cap; ++i) {
        const double lambda = model.spectrum[static_cast<size_t>(i)];
        if (lambda < kEigenvalueFloorRel * lambda1) break;
        // u_i = A v_i, then unit-normalized
        std::vector<double> u(dim, 0.0);
        for (int j = 0; j < m; ++j) {
            const double vj = eig.vectors(j, i);
            const auto& col = phi[static_cast<size_t>(j)];
            for (size_t p = 0; p < dim; ++p) u[p] += vj * col[p];
        }
        const double len = norm2(u);
        if (len <= 0.0) break;
        for (double& x : u) x /= len;
        detail::canonicalize_sign(u);
        model.eigenfaces.push_back(std::move(u));
        model.eigenvalues.push_back(lambda);
        model.singular_values.push_back(std::sqrt(lambda * m));
    }
    return model;
}

// w = U^T (face - mean), or U^T face with centering off.
inline WeightVector project(const EigenModel& model, const std::vector<double>& face) {
    if (face.size() != model.dim())
        fail(ErrorCode::DimensionMismatch, "project: face length does not match model");
    WeightVector w(static_cast<size_t>(model.k()));
    std::vector<double> centered;
    const std::vector<double>* src = &face;
    if (model.centering) {
        centered.resize(face.size());
        for (size_t i = 0; i < face.size(); ++i) centered[i] = face[i] - model.mean[i];
        src = &centered;
    }
    for (int i = 0; i < model.k(); ++i)
        w[static_cast<size_t>(i)] = dot(model.eigenfaces[static_cast<size_t>(i)], *src);
    return w;
}

inline std::vector<double> reconstruct(const EigenModel& model, const WeightVector& w) {
    if (w.size() != static_cast<size_t>(model.k()))
        fail(ErrorCode::DimensionMismatch, "reconstruct: weight length does not match model");
    std::vector<double> face = model.centering ? model.mean : std::vector<double>(model.dim(), 0.0);
    for (int i = 0; i < model.k(); ++i) {
        const auto& u = model.eigenfaces[static_cast<size_t>(i)];
        const double wi = w[static_cast<size_t>(i)];
        for (size_t p = 0; p < face.size(); ++p) face[p] += wi * u[p];
    }
    return face;
}

inline WeightTrajectory project_sequence(const EigenModel& model,
                                         const std::vector<std::vector<double>>& frames,
                                         const std::string& label = "unlabeled") {
    WeightTrajectory traj;
    traj.label = label;
    traj.columns.reserve(frames.size());
    for (const auto& f : frames) traj.columns.push_back(project(model, f));
    return traj;
}

} // namespace emotraj
