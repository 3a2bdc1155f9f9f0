#pragma once

// Temporal trajectory model: per emotion and discriminating direction, one
// monic degree-L polynomial whose roots are (ideally) the sequence's scaled
// weights in that direction. Classification picks the emotion whose
// polynomials come closest to annihilating a test trajectory.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "emotraj/discriminator.hpp"
#include "emotraj/eigenspace.hpp"
#include "emotraj/error.hpp"
#include "emotraj/linalg.hpp"

namespace emotraj {

// Affine map of the training range [lo, hi] onto [-1, 1]; keeps degree-8
// arithmetic conditioned. A direction whose training weights never move is
// Constant and maps everything to the midpoint 0.
struct DirectionScaler {
    double lo = 0.0;
    double hi = 0.0;

    bool constant() const { return !(hi > lo); }
};

inline double scale_weight(const DirectionScaler& s, double w) {
    if (s.constant()) return 0.0;
    return (2.0 * w - s.lo - s.hi) / (s.hi - s.lo);
}

// Coefficients are stored highest-degree-first with the leading 1 included;
// degree L means L+1 entries.
inline std::vector<double> poly_from_roots(const std::vector<double>& roots) {
    std::vector<double> coeffs{1.0};
    for (double r : roots) {
        std::vector<double> next(coeffs.size() + 1, 0.0);
        for (size_t i = 0; i < coeffs.size(); ++i) {
            next[i] += coeffs[i];
            next[i + 1] -= r * coeffs[i];
        }
        coeffs = std::move(next);
    }
    return coeffs;
}

// Horner, highest degree first.
inline double evaluate_poly(const std::vector<double>& coeffs, double x) {
    double acc = 0.0;
    for (double c : coeffs) acc = acc * x + c;
    return acc;
}

inline std::vector<double> poly_derivative(const std::vector<double>& coeffs) {
    if (coeffs.size() <= 1) return {0.0};
    const int degree = static_cast<int>(coeffs.size()) - 1;
    std::vector<double> out(coeffs.size() - 1);
    for (size_t i = 0; i + 1 < coeffs.size(); ++i)
        out[i] = coeffs[i] * static_cast<double>(degree - static_cast<int>(i));
    return out;
}

struct EmotionPolynomialModel {
    std::vector<std::string> emotions;  // E names, fixed order
    DirectionSelection directions;      // D selected eigen directions
    // coefficients[e][d]: L+1 monic coefficients, highest-degree-first
    std::vector<std::vector<std::vector<double>>> coefficients;
    std::vector<DirectionScaler> scalers; // one per selected direction
    int sequence_length = 8;              // L

    int emotion_count() const { return static_cast<int>(emotions.size()); }
    int direction_count() const { return directions.count(); }

    int emotion_index(const std::string& name) const {
        for (size_t i = 0; i < emotions.size(); ++i)
            if (emotions[i] == name) return static_cast<int>(i);
        return -1;
    }
};

namespace detail {

// Monic-constrained least squares over the pooled points of one emotion and
// direction: rows [x^(L-1) ... x 1], targets -x^L, leading coefficient
// pinned to 1 rather than solved.
inline std::vector<double> fit_monic_poly(const std::vector<double>& xs, int degree) {
    const int m = static_cast<int>(xs.size());
    Matrix rows(m, degree);
    std::vector<double> target(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        const double x = xs[static_cast<size_t>(i)];
        double p = 1.0;
        for (int j = degree - 1; j >= 0; --j) {
            rows(i, j) = p;
            p *= x;
        }
        target[static_cast<size_t>(i)] = -p; // p == x^degree here
    }
    std::vector<double> lower = least_squares(rows, target);
    std::vector<double> coeffs(static_cast<size_t>(degree) + 1);
    coeffs[0] = 1.0;
    for (int j = 0; j < degree; ++j) coeffs[static_cast<size_t>(j) + 1] = lower[static_cast<size_t>(j)];
    return coeffs;
}

} // namespace detail

// Fits the full E x D coefficient table. Scalers come from the training
// weights pooled across every emotion so train and test share one map.
// With a single training sequence of distinct roots per emotion this
// reproduces poly_from_roots exactly (interpolation is the LS optimum).
inline EmotionPolynomialModel fit_emotion_polynomials(
    const std::vector<WeightTrajectory>& trajectories, const DirectionSelection& directions,
    std::vector<std::string> emotions = {}) {
    if (trajectories.empty())
        fail(ErrorCode::MissingEmotion, "fit_emotion_polynomials: no trajectories");
    const int length = trajectories.front().length();
    for (const auto& t : trajectories)
        if (t.length() != length)
            fail(ErrorCode::DimensionMismatch, "fit_emotion_polynomials: trajectory lengths differ");

    if (emotions.empty()) {
        for (const auto& t : trajectories) emotions.push_back(t.label);
        std::sort(emotions.begin(), emotions.end());
        emotions.erase(std::unique(emotions.begin(), emotions.end()), emotions.end());
    }

    EmotionPolynomialModel model;
    model.emotions = emotions;
    model.directions = directions;
    model.sequence_length = length;

    const int d_count = directions.count();
    model.scalers.resize(static_cast<size_t>(d_count));
    for (int d = 0; d < d_count; ++d) {
        const int dir = directions.indices[static_cast<size_t>(d)];
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const auto& traj : trajectories) {
            if (dir >= traj.k())
                fail(ErrorCode::DimensionMismatch,
                     "fit_emotion_polynomials: direction index exceeds trajectory K");
            for (int t = 0; t < length; ++t) {
                const double w = traj.weight(dir, t);
                lo = std::min(lo, w);
                hi = std::max(hi, w);
            }
        }
        model.scalers[static_cast<size_t>(d)] = DirectionScaler{lo, hi};
    }

    model.coefficients.resize(emotions.size());
    for (size_t e = 0; e < emotions.size(); ++e) {
        std::vector<const WeightTrajectory*> members;
        for (const auto& traj : trajectories)
            if (traj.label == emotions[e]) members.push_back(&traj);
        if (members.empty())
            fail(ErrorCode::MissingEmotion,
                 "fit_emotion_polynomials: emotion '" + emotions[e] + "' has no training sequences");

        model.coefficients[e].resize(static_cast<size_t>(d_count));
        for (int d = 0; d < d_count; ++d) {
            const int dir = directions.indices[static_cast<size_t>(d)];
            const DirectionScaler& scaler = model.scalers[static_cast<size_t>(d)];
            std::vector<double> xs;
            xs.reserve(members.size() * static_cast<size_t>(length));
            for (const auto* traj : members)
                for (int t = 0; t < length; ++t)
                    xs.push_back(scale_weight(scaler, traj->weight(dir, t)));
            model.coefficients[e][static_cast<size_t>(d)] = detail::fit_monic_poly(xs, length);
        }
    }
    return model;
}

// Sum over directions and frames of the squared polynomial value at the
// scaled weight; zero exactly when every scaled weight is a root.
inline double residual(const EmotionPolynomialModel& model, const WeightTrajectory& traj,
                       int emotion) {
    if (emotion < 0 || emotion >= model.emotion_count())
        fail(ErrorCode::InvalidArgument, "residual: emotion index out of range");
    if (traj.length() != model.sequence_length)
        fail(ErrorCode::DimensionMismatch, "residual: trajectory length does not match model");
    double sum = 0.0;
    for (int d = 0; d < model.direction_count(); ++d) {
        const int dir = model.directions.indices[static_cast<size_t>(d)];
        if (dir >= traj.k())
            fail(ErrorCode::DimensionMismatch, "residual: direction index exceeds trajectory K");
        const auto& coeffs = model.coefficients[static_cast<size_t>(emotion)][static_cast<size_t>(d)];
        const DirectionScaler& scaler = model.scalers[static_cast<size_t>(d)];
        for (int t = 0; t < traj.length(); ++t) {
            const double p = evaluate_poly(coeffs, scale_weight(scaler, traj.weight(dir, t)));
            sum += p * p;
        }
    }
    return sum;
}

struct ClassifyResult {
    int emotion = -1;
    std::vector<double> residuals; // one per model emotion
};

// argmin of residual over emotions; ties go to the lowest emotion index.
inline ClassifyResult classify(const EmotionPolynomialModel& model, const WeightTrajectory& traj) {
    ClassifyResult result;
    result.residuals.resize(static_cast<size_t>(model.emotion_count()));
    for (int e = 0; e < model.emotion_count(); ++e)
        result.residuals[static_cast<size_t>(e)] = residual(model, traj, e);
    result.emotion = 0;
    for (int e = 1; e < model.emotion_count(); ++e)
        if (result.residuals[static_cast<size_t>(e)] < result.residuals[static_cast<size_t>(result.emotion)])
            result.emotion = e;
    return result;
}

} // namespace emotraj
