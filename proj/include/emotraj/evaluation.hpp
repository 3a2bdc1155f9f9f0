#pragma once

// Stratified train/test splitting, confusion-matrix generation and report
// rendering.

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "emotraj/error.hpp"
#include "emotraj/manifest.hpp"
#include "emotraj/pipeline.hpp"

namespace emotraj {

struct SplitResult {
    DatasetManifest train;
    DatasetManifest test;
    std::vector<std::string> warnings; // SingleSequenceClass notes
};

namespace detail {

// Fisher-Yates on top of raw mt19937_64 draws. std::shuffle and the
// distribution classes are implementation-defined; this pins the split to
// the seed on every toolchain.
template <typename T>
inline void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (size_t i = v.size(); i > 1; --i) {
        const size_t j = static_cast<size_t>(rng() % i);
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace detail

// Stratified per-label split on sequence_id: per class, a seeded shuffle of
// the lexicographically sorted ids, then round(train_fraction * n) of them
// (at least 1) go to training. Classes are processed in sorted label order
// off one RNG stream, so the result is a pure function of (manifest, seed).
inline SplitResult split_dataset(const DatasetManifest& manifest, double train_fraction,
                                 uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        fail(ErrorCode::InvalidArgument, "split: train_fraction must be in (0, 1)");

    std::map<std::string, std::vector<const SequenceRecord*>> by_label;
    for (const auto& rec : manifest.records) by_label[rec.label].push_back(&rec);

    SplitResult out;
    out.train.canonical_width = out.test.canonical_width = manifest.canonical_width;
    out.train.canonical_height = out.test.canonical_height = manifest.canonical_height;

    std::mt19937_64 rng(seed);
    for (auto& [label, members] : by_label) {
        std::sort(members.begin(), members.end(),
                  [](const SequenceRecord* a, const SequenceRecord* b) {
                      return a->sequence_id < b->sequence_id;
                  });
        detail::seeded_shuffle(members, rng);

        const size_t n = members.size();
        size_t n_train = static_cast<size_t>(
            std::llround(train_fraction * static_cast<double>(n)));
        n_train = std::clamp<size_t>(n_train, 1, n);
        if (n_train == n)
            out.warnings.push_back("SingleSequenceClass: class '" + label +
                                   "' cannot appear in both splits");
        for (size_t i = 0; i < n; ++i)
            (i < n_train ? out.train : out.test).records.push_back(*members[i]);
    }
    return out;
}

// Row-normalized fractions: entry (i, j) is the fraction of true-class-i
// test sequences classified as j. accuracy is the diagonal mean;
// pooled_accuracy is total correct over total tested (identical when classes
// are balanced).
struct ConfusionMatrix {
    std::vector<std::string> emotions;
    std::vector<std::vector<double>> rows;  // E x E fractions
    std::vector<long> row_totals;           // test sequences per true class
    double accuracy = 0.0;
    double pooled_accuracy = 0.0;
};

// Row-normalizes raw (truth, predicted) tallies. Exposed separately so the
// matrix semantics are testable without a trained pipeline.
inline ConfusionMatrix tally_confusion(const std::vector<std::string>& emotions,
                                       const std::vector<std::pair<int, int>>& outcomes) {
    const int e_count = static_cast<int>(emotions.size());
    ConfusionMatrix cm;
    cm.emotions = emotions;
    cm.rows.assign(static_cast<size_t>(e_count),
                   std::vector<double>(static_cast<size_t>(e_count), 0.0));
    cm.row_totals.assign(static_cast<size_t>(e_count), 0);

    long correct = 0;
    for (const auto& [truth, predicted] : outcomes) {
        cm.rows[static_cast<size_t>(truth)][static_cast<size_t>(predicted)] += 1.0;
        cm.row_totals[static_cast<size_t>(truth)] += 1;
        if (predicted == truth) ++correct;
    }

    double diag_sum = 0.0;
    int scored_rows = 0;
    for (int i = 0; i < e_count; ++i) {
        const long total = cm.row_totals[static_cast<size_t>(i)];
        if (total == 0) continue; // class absent from the test set: row stays zero
        for (int j = 0; j < e_count; ++j)
            cm.rows[static_cast<size_t>(i)][static_cast<size_t>(j)] /= static_cast<double>(total);
        diag_sum += cm.rows[static_cast<size_t>(i)][static_cast<size_t>(i)];
        ++scored_rows;
    }
    cm.accuracy = scored_rows > 0 ? diag_sum / scored_rows : 0.0;
    if (!outcomes.empty())
        cm.pooled_accuracy = static_cast<double>(correct) / static_cast<double>(outcomes.size());
    return cm;
}

// Classifies every test sequence end-to-end (align -> project -> residual
// argmin) and tallies. Every test label must be one of the model's emotions.
inline ConfusionMatrix evaluate(const Model& model, const DatasetManifest& test) {
    if (test.records.empty())
        fail(ErrorCode::EmptyTestSet, "evaluate: test manifest has no sequences");
    std::vector<std::pair<int, int>> outcomes;
    outcomes.reserve(test.records.size());
    for (const auto& rec : test.records) {
        const int truth = model.poly.emotion_index(rec.label);
        if (truth < 0)
            fail(ErrorCode::UnknownLabel,
                 "test label '" + rec.label + "' is not a model emotion");
        outcomes.emplace_back(truth, classify_record(model, rec).emotion);
    }
    return tally_confusion(model.poly.emotions, outcomes);
}

// Aligned plain-text table, fractions shown to 3 decimals.
inline std::string render_confusion_text(const ConfusionMatrix& cm) {
    size_t width = 8;
    for (const auto& name : cm.emotions) width = std::max(width, name.size() + 2);
    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(width)) << "";
    for (const auto& name : cm.emotions) out << std::setw(static_cast<int>(width)) << name;
    out << "\n";
    for (size_t i = 0; i < cm.rows.size(); ++i) {
        out << std::setw(static_cast<int>(width)) << cm.emotions[i];
        for (double v : cm.rows[i]) {
            std::ostringstream cell;
            cell << std::fixed << std::setprecision(3) << v;
            out << std::setw(static_cast<int>(width)) << cell.str();
        }
        out << "\n";
    }
    out << std::fixed << std::setprecision(3);
    out << "accuracy (diagonal mean): " << cm.accuracy << "\n";
    out << "accuracy (pooled):        " << cm.pooled_accuracy << "\n";
    return out.str();
}

// Full-precision CSV: one `true,predicted,fraction` row per cell plus an
// accuracy footer.
inline std::string render_confusion_csv(const ConfusionMatrix& cm) {
    std::ostringstream out;
    char buf[64];
    out << "true,predicted,fraction\n";
    for (size_t i = 0; i < cm.rows.size(); ++i)
        for (size_t j = 0; j < cm.rows[i].size(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", cm.rows[i][j]);
            out << cm.emotions[i] << ',' << cm.emotions[j] << ',' << buf << "\n";
        }
    std::snprintf(buf, sizeof(buf), "%.17g", cm.accuracy);
    out << "accuracy,," << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.17g", cm.pooled_accuracy);
    out << "pooled_accuracy,," << buf << "\n";
    return out.str();
}

} // namespace emotraj
