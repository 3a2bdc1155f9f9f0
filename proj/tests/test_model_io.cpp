#include <doctest.h>

#include <fstream>
#include <sstream>

#include "emotraj/error.hpp"
#include "emotraj/model_io.hpp"
#include "emotraj/pipeline.hpp"
#include "emotraj/synthgen.hpp"
#include "test_support.hpp"

using namespace emotraj;
using testsupport::TempDir;

namespace {

Model trained_fixture(const std::filesystem::path& dir) {
    SynthConfig cfg;
    cfg.seed = 5;
    cfg.emotions = {"calm", "joy", "woe"};
    cfg.sequences_per_emotion = 2;
    cfg.width = cfg.height = 16;
    cfg.noise_sigma = 1.0;
    DatasetManifest manifest = generate(cfg, dir);
    TrainOptions opts;
    opts.k = 8;
    opts.d = 5;
    opts.canonical_width = opts.canonical_height = 16;
    return train_pipeline(manifest, opts);
}

} // namespace

TEST_CASE("model save/load/save is byte-identical and float-exact") {
    TempDir tmp("model-rt");
    Model model = trained_fixture(tmp.path() / "data");
    // attach a couple of stumps so the optional block round-trips too
    StumpClassifier s1;
    s1.feature = HaarFeature{HaarKind::ThreeHorizontal, 1, 2, 3, 4, 16};
    s1.threshold = 0.12345678901234567;
    s1.polarity = -1;
    s1.alpha = 1.75;
    model.stumps.push_back(s1);

    const auto p1 = tmp.path() / "model1.txt";
    const auto p2 = tmp.path() / "model2.txt";
    save_model(model, p1);
    Model loaded = load_model(p1);
    save_model(loaded, p2);
    CHECK(testsupport::slurp(p1) == testsupport::slurp(p2));

    CHECK(loaded.canonical_width == model.canonical_width);
    CHECK(loaded.sequence_length == model.sequence_length);
    CHECK(loaded.eigen.centering == model.eigen.centering);
    CHECK(loaded.poly.emotions == model.poly.emotions);
    CHECK(loaded.eigen.mean == model.eigen.mean);
    CHECK(loaded.eigen.eigenvalues == model.eigen.eigenvalues);
    REQUIRE(loaded.eigen.k() == model.eigen.k());
    for (int i = 0; i < model.eigen.k(); ++i)
        CHECK(loaded.eigen.eigenfaces[static_cast<size_t>(i)] ==
              model.eigen.eigenfaces[static_cast<size_t>(i)]);
    CHECK(loaded.poly.directions.indices == model.poly.directions.indices);
    for (size_t d = 0; d < model.poly.scalers.size(); ++d) {
        CHECK(loaded.poly.scalers[d].lo == model.poly.scalers[d].lo);
        CHECK(loaded.poly.scalers[d].hi == model.poly.scalers[d].hi);
    }
    CHECK(loaded.poly.coefficients == model.poly.coefficients);
    REQUIRE(loaded.stumps.size() == 1);
    CHECK(loaded.stumps[0].threshold == s1.threshold);
    CHECK(loaded.stumps[0].alpha == s1.alpha);
    CHECK(loaded.stumps[0].polarity == s1.polarity);
    CHECK(loaded.stumps[0].feature == s1.feature);
}

TEST_CASE("loaded model classifies identically to the in-memory model") {
    TempDir tmp("model-classify");
    Model model = trained_fixture(tmp.path() / "data");
    const auto path = tmp.path() / "model.txt";
    save_model(model, path);
    Model loaded = load_model(path);

    DatasetManifest manifest = load_manifest(tmp.path() / "data" / "manifest.csv");
    for (const auto& rec : manifest.records) {
        ClassifyResult a = classify_record(model, rec);
        ClassifyResult b = classify_record(loaded, rec);
        CHECK(a.emotion == b.emotion);
        CHECK(a.residuals == b.residuals);
    }
}

TEST_CASE("version mismatch is rejected, never coerced") {
    std::istringstream in("EMMODEL 2\nsize 4 4\n");
    try {
        read_model(in, "test");
        FAIL("expected UnreadableModel");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnreadableModel);
    }
}

TEST_CASE("truncated model file is rejected") {
    TempDir tmp("model-trunc");
    Model model = trained_fixture(tmp.path() / "data");
    const auto path = tmp.path() / "model.txt";
    save_model(model, path);
    const std::string full = testsupport::slurp(path);
    const auto cut = tmp.path() / "cut.txt";
    std::ofstream(cut, std::ios::binary) << full.substr(0, full.size() / 2);
    try {
        load_model(cut);
        FAIL("expected UnreadableModel");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnreadableModel);
    }
    CHECK_THROWS_AS(load_model(tmp.path() / "missing.txt"), Error);
}

TEST_CASE("detector-only models round trip") {
    TempDir tmp("model-det");
    Model model;
    model.canonical_width = 0;
    model.canonical_height = 0;
    StumpClassifier s;
    s.feature = HaarFeature{HaarKind::TwoVertical, 0, 1, 2, 2, 8};
    s.threshold = -3.5;
    s.polarity = 1;
    s.alpha = 0.25;
    model.stumps.assign(3, s);
    const auto p1 = tmp.path() / "det1.txt";
    const auto p2 = tmp.path() / "det2.txt";
    save_model(model, p1);
    Model loaded = load_model(p1);
    save_model(loaded, p2);
    CHECK(testsupport::slurp(p1) == testsupport::slurp(p2));
    CHECK(loaded.stumps.size() == 3);
    CHECK(loaded.poly.emotions.empty());
    CHECK(loaded.eigen.k() == 0);
}
