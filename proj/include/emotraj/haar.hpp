#pragma once

// Rectangular Haar-like features over integral images, discrete-AdaBoost
// decision-stump training, and a desk-scale sliding-window detector.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "emotraj/error.hpp"
#include "emotraj/image.hpp"
#include "emotraj/integral.hpp"

namespace emotraj {

enum class HaarKind {
    TwoHorizontal,  // black left, white right
    TwoVertical,    // black top, white bottom
    ThreeHorizontal, // white outer pair, middle black double-weighted
    FourQuad,       // white on the main diagonal, black on the anti-diagonal
};

inline const char* haar_kind_name(HaarKind k) {
    switch (k) {
        case HaarKind::TwoHorizontal:   return "two_h";
        case HaarKind::TwoVertical:     return "two_v";
        case HaarKind::ThreeHorizontal: return "three_h";
        case HaarKind::FourQuad:        return "four";
    }
    return "?";
}

inline HaarKind haar_kind_from_name(const std::string& s) {
    if (s == "two_h") return HaarKind::TwoHorizontal;
    if (s == "two_v") return HaarKind::TwoVertical;
    if (s == "three_h") return HaarKind::ThreeHorizontal;
    if (s == "four") return HaarKind::FourQuad;
    fail(ErrorCode::UnreadableModel, "unknown haar kind '" + s + "'");
}

// Anchored inside a reference detection window; (w, h) is the unit rectangle,
// the kind determines how many units tile the feature.
struct HaarFeature {
    HaarKind kind = HaarKind::TwoHorizontal;
    int x = 0;
    int y = 0;
    int w = 1;
    int h = 1;
    int window = 0;

    int span_w() const {
        switch (kind) {
            case HaarKind::TwoHorizontal:   return 2 * w;
            case HaarKind::TwoVertical:     return w;
            case HaarKind::ThreeHorizontal: return 3 * w;
            case HaarKind::FourQuad:        return 2 * w;
        }
        return 0;
    }
    int span_h() const {
        switch (kind) {
            case HaarKind::TwoHorizontal:   return h;
            case HaarKind::TwoVertical:     return 2 * h;
            case HaarKind::ThreeHorizontal: return h;
            case HaarKind::FourQuad:        return 2 * h;
        }
        return 0;
    }

    bool operator==(const HaarFeature& o) const {
        return kind == o.kind && x == o.x && y == o.y && w == o.w && h == o.h && window == o.window;
    }
};

// Signed unit rectangle in window coordinates; weight +1 for white regions,
// negative for black (the three-rectangle middle carries -2 so the weighted
// areas balance and uniform patches cancel).
struct WeightedRect {
    int x, y, w, h;
    double weight;
};

inline std::vector<WeightedRect> feature_rectangles(const HaarFeature& f) {
    switch (f.kind) {
        case HaarKind::TwoHorizontal:
            return {{f.x, f.y, f.w, f.h, -1.0}, {f.x + f.w, f.y, f.w, f.h, +1.0}};
        case HaarKind::TwoVertical:
            return {{f.x, f.y, f.w, f.h, -1.0}, {f.x, f.y + f.h, f.w, f.h, +1.0}};
        case HaarKind::ThreeHorizontal:
            return {{f.x, f.y, f.w, f.h, +1.0},
                    {f.x + f.w, f.y, f.w, f.h, -2.0},
                    {f.x + 2 * f.w, f.y, f.w, f.h, +1.0}};
        case HaarKind::FourQuad:
            return {{f.x, f.y, f.w, f.h, +1.0},
                    {f.x + f.w, f.y, f.w, f.h, -1.0},
                    {f.x, f.y + f.h, f.w, f.h, -1.0},
                    {f.x + f.w, f.y + f.h, f.w, f.h, +1.0}};
    }
    return {};
}

namespace detail {

inline int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

struct FeatureSums {
    double pos_sum = 0.0, neg_sum = 0.0;
    double pos_area = 0.0, neg_area = 0.0;
};

// Scales each rectangle by rounding its edges (shared edges stay shared, so
// the tiling never gaps or overlaps) and accumulates weighted sums and the
// weighted pixel areas of both polarities.
inline FeatureSums feature_sums(const IntegralImage& ii, const HaarFeature& f, int origin_x,
                                int origin_y, double scale) {
    FeatureSums out;
    for (const WeightedRect& r : feature_rectangles(f)) {
        const int x0 = origin_x + round_half_up(r.x * scale);
        const int y0 = origin_y + round_half_up(r.y * scale);
        const int x1 = origin_x + round_half_up((r.x + r.w) * scale);
        const int y1 = origin_y + round_half_up((r.y + r.h) * scale);
        const double sum = rect_sum(ii, x0, y0, x1 - x0, y1 - y0);
        const double area = static_cast<double>(x1 - x0) * (y1 - y0);
        if (r.weight > 0.0) {
            out.pos_sum += r.weight * sum;
            out.pos_area += r.weight * area;
        } else {
            out.neg_sum += -r.weight * sum;
            out.neg_area += -r.weight * area;
        }
    }
    return out;
}

} // namespace detail

// White-sum minus black-sum, with the black side rescaled by the actual
// white/black area ratio so a uniform image always scores 0 even after
// scaled coordinates were rounded. At scale 1 the ratio is exactly 1 and the
// value is the plain difference.
inline double feature_value(const IntegralImage& ii, const HaarFeature& f, int origin_x = 0,
                            int origin_y = 0, double scale = 1.0) {
    const auto s = detail::feature_sums(ii, f, origin_x, origin_y, scale);
    if (s.pos_area <= 0.0 || s.neg_area <= 0.0) return 0.0;
    return s.pos_sum - s.neg_sum * (s.pos_area / s.neg_area);
}

// Full deterministic feature pool for a window side. Nesting order fixes the
// feature index used by stump tie-breaking: kind, then h, w, y, x.
inline std::vector<HaarFeature> enumerate_features(int window) {
    if (window < 2)
        fail(ErrorCode::InvalidArgument, "enumerate_features: window side must be >= 2");
    std::vector<HaarFeature> pool;
    for (HaarKind kind : {HaarKind::TwoHorizontal, HaarKind::TwoVertical,
                          HaarKind::ThreeHorizontal, HaarKind::FourQuad}) {
        HaarFeature f;
        f.kind = kind;
        f.window = window;
        for (int h = 1; h <= window; ++h) {
            for (int w = 1; w <= window; ++w) {
                f.w = w;
                f.h = h;
                if (f.span_w() > window || f.span_h() > window) continue;
                for (int y = 0; y + f.span_h() <= window; ++y) {
                    for (int x = 0; x + f.span_w() <= window; ++x) {
                        f.x = x;
                        f.y = y;
                        pool.push_back(f);
                    }
                }
            }
        }
    }
    return pool;
}

// One-feature threshold vote. Predicts positive when
// polarity * (value - threshold) > 0.
struct StumpClassifier {
    HaarFeature feature;
    double threshold = 0.0;
    int polarity = 1;
    double alpha = 0.0;

    bool predicts_positive(double value) const {
        return polarity * (value - threshold) > 0.0;
    }
};

struct AdaBoostRound {
    StumpClassifier stump;
    size_t feature_index = 0;
    double weighted_error = 0.0;
    std::vector<double> weights_after; // normalized example weights, positives first
};

struct AdaBoostResult {
    std::vector<StumpClassifier> stumps;
    bool degenerate = false; // no round beat 0.5 weighted error
    std::vector<AdaBoostRound> rounds;
};

inline constexpr double kAdaBoostErrorFloor = 1e-12;

// Discrete AdaBoost over decision stumps. Threshold candidates are the
// midpoints between consecutive distinct sorted feature values; each round
// admits the (feature, threshold, polarity) of strictly smallest weighted
// error, scanning features in pool order, thresholds ascending, polarity +1
// before -1 (so ties resolve to the lowest feature index, then lowest
// threshold). A best error >= 0.5 stops training.
inline AdaBoostResult adaboost_train(const std::vector<GrayImage>& positives,
                                     const std::vector<GrayImage>& negatives, int t_rounds) {
    if (positives.empty() || negatives.empty())
        fail(ErrorCode::EmptyClass, "adaboost_train: both classes must be nonempty");
    if (t_rounds < 1)
        fail(ErrorCode::InvalidArgument, "adaboost_train: T must be >= 1");

    const int window = positives.front().width;
    auto check_window = [window](const GrayImage& img) {
        if (img.width != window || img.height != window)
            fail(ErrorCode::DimensionMismatch,
                 "adaboost_train: all windows must be square with equal side");
    };
    for (const auto& img : positives) check_window(img);
    for (const auto& img : negatives) check_window(img);

    const size_t n_pos = positives.size();
    const size_t n = n_pos + negatives.size();
    std::vector<IntegralImage> tables;
    tables.reserve(n);
    for (const auto& img : positives) tables.push_back(integral_image(img));
    for (const auto& img : negatives) tables.push_back(integral_image(img));
    std::vector<int> labels(n, -1);
    for (size_t i = 0; i < n_pos; ++i) labels[i] = +1;

    const std::vector<HaarFeature> pool = enumerate_features(window);

    // feature values are weight-independent; compute once
    std::vector<std::vector<double>> values(pool.size(), std::vector<double>(n));
    std::vector<std::vector<double>> candidates(pool.size());
    for (size_t fi = 0; fi < pool.size(); ++fi) {
        for (size_t i = 0; i < n; ++i) values[fi][i] = feature_value(tables[i], pool[fi]);
        // midpoints between consecutive distinct sorted values, ascending
        std::vector<double> sorted_vals(values[fi]);
        std::sort(sorted_vals.begin(), sorted_vals.end());
        sorted_vals.erase(std::unique(sorted_vals.begin(), sorted_vals.end()), sorted_vals.end());
        for (size_t j = 0; j + 1 < sorted_vals.size(); ++j)
            candidates[fi].push_back(0.5 * (sorted_vals[j] + sorted_vals[j + 1]));
    }

    std::vector<double> weights(n, 1.0 / static_cast<double>(n));
    AdaBoostResult result;

    for (int round = 0; round < t_rounds; ++round) {
        double best_err = std::numeric_limits<double>::infinity();
        size_t best_feature = 0;
        double best_threshold = 0.0;
        int best_polarity = 1;

        // errors are plain sums over examples in index order, so the scan is
        // reproducible arithmetic, not just a reproducible candidate order
        for (size_t fi = 0; fi < pool.size(); ++fi) {
            const auto& v = values[fi];
            for (const double threshold : candidates[fi]) {
                double err_plus = 0.0, err_minus = 0.0;
                for (size_t i = 0; i < n; ++i) {
                    const int h = (v[i] - threshold > 0.0) ? +1 : -1;
                    if (h != labels[i]) err_plus += weights[i];
                    else err_minus += weights[i];
                }
                if (err_plus < best_err) {
                    best_err = err_plus;
                    best_feature = fi;
                    best_threshold = threshold;
                    best_polarity = +1;
                }
                if (err_minus < best_err) {
                    best_err = err_minus;
                    best_feature = fi;
                    best_threshold = threshold;
                    best_polarity = -1;
                }
            }
        }

        if (!(best_err < 0.5)) {
            result.degenerate = result.stumps.empty();
            break;
        }

        StumpClassifier stump;
        stump.feature = pool[best_feature];
        stump.threshold = best_threshold;
        stump.polarity = best_polarity;
        stump.alpha =
            0.5 * std::log((1.0 - best_err) / std::max(best_err, kAdaBoostErrorFloor));

        double wsum = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const bool predicted_pos = stump.predicts_positive(values[best_feature][i]);
            const int h = predicted_pos ? +1 : -1;
            weights[i] *= std::exp(-stump.alpha * labels[i] * h);
            wsum += weights[i];
        }
        for (double& w : weights) w /= wsum;

        result.stumps.push_back(stump);
        result.rounds.push_back(AdaBoostRound{stump, best_feature, best_err, weights});
        if (best_err == 0.0) break;
    }
    return result;
}

// 0/1 ensemble vote on one window: fires when the alpha-weighted positive
// votes reach half the total alpha mass.
inline bool ensemble_fires(const std::vector<StumpClassifier>& ensemble, const IntegralImage& ii,
                           int origin_x, int origin_y, double scale, double* score_out = nullptr) {
    double vote = 0.0, total = 0.0;
    for (const auto& stump : ensemble) {
        const auto sums = detail::feature_sums(ii, stump.feature, origin_x, origin_y, scale);
        double value = 0.0;
        if (sums.pos_area > 0.0 && sums.neg_area > 0.0) {
            value = sums.pos_sum - sums.neg_sum * (sums.pos_area / sums.neg_area);
            // renormalize to training-scale units so thresholds transfer
            const auto& f = stump.feature;
            const double ref_pos_area = [&f] {
                double a = 0.0;
                for (const auto& r : feature_rectangles(f))
                    if (r.weight > 0.0) a += r.weight * r.w * r.h;
                return a;
            }();
            value *= ref_pos_area / sums.pos_area;
        }
        total += stump.alpha;
        if (stump.predicts_positive(value)) vote += stump.alpha;
    }
    if (score_out) *score_out = vote;
    return vote >= 0.5 * total;
}

struct Detection {
    int x = 0;
    int y = 0;
    int side = 0;
    double score = 0.0;
};

inline double intersection_over_union(const Detection& a, const Detection& b) {
    const int x0 = std::max(a.x, b.x);
    const int y0 = std::max(a.y, b.y);
    const int x1 = std::min(a.x + a.side, b.x + b.side);
    const int y1 = std::min(a.y + a.side, b.y + b.side);
    const double inter = std::max(0, x1 - x0) * static_cast<double>(std::max(0, y1 - y0));
    const double uni = static_cast<double>(a.side) * a.side + static_cast<double>(b.side) * b.side - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

// Sliding-window scan at each scale, then greedy overlap suppression keeping
// the highest score among boxes with IoU > 0.5. An empty result is valid.
inline std::vector<Detection> detect(const GrayImage& img,
                                     const std::vector<StumpClassifier>& ensemble, int window,
                                     int stride = 1, const std::vector<double>& scales = {1.0}) {
    if (ensemble.empty())
        fail(ErrorCode::InvalidArgument, "detect: ensemble must be nonempty");
    if (window < 2 || stride < 1)
        fail(ErrorCode::InvalidArgument, "detect: bad window or stride");

    const IntegralImage ii = integral_image(img);
    std::vector<Detection> candidates;
    for (double scale : scales) {
        const int side = detail::round_half_up(window * scale);
        if (side < 2 || side > img.width || side > img.height) continue;
        for (int y = 0; y + side <= img.height; y += stride) {
            for (int x = 0; x + side <= img.width; x += stride) {
                double score = 0.0;
                if (ensemble_fires(ensemble, ii, x, y, scale, &score))
                    candidates.push_back(Detection{x, y, side, score});
            }
        }
    }

    std::stable_sort(candidates.begin(), candidates.end(), [](const Detection& a, const Detection& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.y != b.y) return a.y < b.y;
        if (a.x != b.x) return a.x < b.x;
        return a.side < b.side;
    });
    std::vector<Detection> kept;
    for (const auto& c : candidates) {
        bool suppressed = false;
        for (const auto& k : kept)
            if (intersection_over_union(c, k) > 0.5) {
                suppressed = true;
                break;
            }
        if (!suppressed) kept.push_back(c);
    }
    return kept;
}

} // namespace emotraj
