#pragma once

// Ranks eigen directions by how far apart the emotion classes sit along
// them: the score of direction k is the between-class variance of the
// per-class mean weights. The top D directions become the discriminating
// directions used by the trajectory model.

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "emotraj/eigenspace.hpp"
#include "emotraj/error.hpp"

namespace emotraj {

struct DirectionSelection {
    std::vector<int> indices;   // distinct, each < K, score-descending
    std::vector<double> scores; // nonincreasing
    bool reduced = false;       // true when K < requested D

    int count() const { return static_cast<int>(indices.size()); }
};

// Between-class variance score per direction; ties broken by lower index.
// Requires at least two distinct labels. When K < d_count all K directions
// are returned and the selection is flagged reduced.
inline DirectionSelection select_directions(const std::vector<WeightTrajectory>& trajectories,
                                            int d_count) {
    if (d_count < 1)
        fail(ErrorCode::InvalidArgument, "select_directions: D must be >= 1");
    if (trajectories.empty())
        fail(ErrorCode::SingleClass, "select_directions: no trajectories");
    const int k = trajectories.front().k();
    for (const auto& t : trajectories)
        if (t.k() != k)
            fail(ErrorCode::DimensionMismatch, "select_directions: trajectories differ in K");

    // per-class accumulation of weights over all sequences and frames
    std::map<std::string, std::pair<std::vector<double>, long>> classes;
    for (const auto& traj : trajectories) {
        auto& entry = classes[traj.label];
        if (entry.first.empty()) entry.first.assign(static_cast<size_t>(k), 0.0);
        for (const auto& col : traj.columns) {
            for (int i = 0; i < k; ++i) entry.first[static_cast<size_t>(i)] += col[static_cast<size_t>(i)];
            entry.second += 1;
        }
    }
    if (classes.size() < 2)
        fail(ErrorCode::SingleClass, "select_directions: need at least 2 distinct labels");

    std::vector<std::vector<double>> class_means;
    for (auto& [label, entry] : classes) {
        (void)label;
        std::vector<double> mean(entry.first);
        for (double& v : mean) v /= static_cast<double>(entry.second);
        class_means.push_back(std::move(mean));
    }

    const double e = static_cast<double>(class_means.size());
    std::vector<double> scores(static_cast<size_t>(k), 0.0);
    for (int d = 0; d < k; ++d) {
        double mu = 0.0;
        for (const auto& cm : class_means) mu += cm[static_cast<size_t>(d)];
        mu /= e;
        double var = 0.0;
        for (const auto& cm : class_means) {
            const double diff = cm[static_cast<size_t>(d)] - mu;
            var += diff * diff;
        }
        scores[static_cast<size_t>(d)] = var / e;
    }

    std::vector<int> order(static_cast<size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&scores](int a, int b) {
        return scores[static_cast<size_t>(a)] > scores[static_cast<size_t>(b)];
    });

    DirectionSelection sel;
    const int take = std::min(d_count, k);
    sel.reduced = k < d_count;
    sel.indices.assign(order.begin(), order.begin() + take);
    sel.scores.reserve(static_cast<size_t>(take));
    for (int i = 0; i < take; ++i)
        sel.scores.push_back(scores[static_cast<size_t>(sel.indices[static_cast<size_t>(i)])]);
    return sel;
}

} // namespace emotraj
