#pragma once

// End-to-end glue: manifest records -> aligned canonical faces -> eigenspace
// trajectories -> polynomial model, and the reverse path for classification.

#include <filesystem>
#include <string>
#include <vector>

#include "emotraj/discriminator.hpp"
#include "emotraj/eigenspace.hpp"
#include "emotraj/error.hpp"
#include "emotraj/image.hpp"
#include "emotraj/manifest.hpp"
#include "emotraj/model_io.hpp"
#include "emotraj/trajectory.hpp"

namespace emotraj {

struct TrainOptions {
    int k = 50;              // requested eigenface count, capped at M
    int d = 10;              // discriminating directions
    int sequence_length = 8; // L
    int canonical_width = 64;
    int canonical_height = 64;
    bool centering = true;
};

// One aligned canonical-size frame as a face vector. Frames with eye
// coordinates are aligned; frames without must already be canonical size
// (anything else is a hard error, never a silent resize).
inline std::vector<double> load_aligned_frame(const FrameRef& ref, int canonical_w,
                                              int canonical_h) {
    GrayImage img = read_pgm(ref.path);
    if (ref.has_eyes()) {
        img = align_face(img, *ref.eye_left, *ref.eye_right, canonical_w, canonical_h);
    } else if (img.width != canonical_w || img.height != canonical_h) {
        fail(ErrorCode::DimensionMismatch,
             "frame " + ref.path.string() + " is " + std::to_string(img.width) + "x" +
                 std::to_string(img.height) + " but has no eye coordinates to align to " +
                 std::to_string(canonical_w) + "x" + std::to_string(canonical_h));
    }
    return image_to_vector(img);
}

inline std::vector<std::vector<double>> load_aligned_sequence(const SequenceRecord& rec,
                                                              int canonical_w, int canonical_h) {
    std::vector<std::vector<double>> frames;
    frames.reserve(rec.frames.size());
    for (const auto& f : rec.frames)
        frames.push_back(load_aligned_frame(f, canonical_w, canonical_h));
    return frames;
}

// align -> train_pca -> project_sequence -> select_directions ->
// fit_emotion_polynomials, bundled into a persistable model. Emotion order
// is the lexicographic order of the training labels.
inline Model train_pipeline(const DatasetManifest& manifest, const TrainOptions& opts) {
    if (manifest.records.empty())
        fail(ErrorCode::EmptyClass, "train: manifest has no sequences");

    std::vector<std::vector<std::vector<double>>> sequences;
    sequences.reserve(manifest.records.size());
    std::vector<std::vector<double>> faces;
    for (const auto& rec : manifest.records) {
        sequences.push_back(load_aligned_sequence(rec, opts.canonical_width, opts.canonical_height));
        for (const auto& f : sequences.back()) faces.push_back(f);
    }

    Model model;
    model.canonical_width = opts.canonical_width;
    model.canonical_height = opts.canonical_height;
    model.sequence_length = opts.sequence_length;
    model.eigen = train_pca(faces, opts.k, opts.canonical_width, opts.canonical_height);
    model.eigen.centering = opts.centering;

    std::vector<WeightTrajectory> trajectories;
    trajectories.reserve(manifest.records.size());
    for (size_t r = 0; r < manifest.records.size(); ++r)
        trajectories.push_back(
            project_sequence(model.eigen, sequences[r], manifest.records[r].label));

    DirectionSelection directions = select_directions(trajectories, opts.d);
    model.poly = fit_emotion_polynomials(trajectories, directions);
    return model;
}

inline WeightTrajectory project_record(const Model& model, const SequenceRecord& rec) {
    if (static_cast<int>(rec.frames.size()) != model.sequence_length)
        fail(ErrorCode::DimensionMismatch,
             "sequence '" + rec.sequence_id + "' length does not match model");
    auto frames = load_aligned_sequence(rec, model.canonical_width, model.canonical_height);
    return project_sequence(model.eigen, frames, rec.label);
}

inline ClassifyResult classify_record(const Model& model, const SequenceRecord& rec) {
    return classify(model.poly, project_record(model, rec));
}

} // namespace emotraj
