#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "emotraj/error.hpp"
#include "emotraj/image.hpp"
#include "emotraj/manifest.hpp"
#include "test_support.hpp"

using namespace emotraj;
using testsupport::TempDir;

TEST_CASE("image_to_vector flattens row-major") {
    GrayImage img = testsupport::make_image(2, 2, {1, 2, 3, 4});
    CHECK(image_to_vector(img) == std::vector<double>{1, 2, 3, 4});

    GrayImage one = testsupport::make_image(1, 1, {7});
    CHECK(image_to_vector(one) == std::vector<double>{7});
}

TEST_CASE("vector/image round trip is exact on random images") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        const int w = 1 + static_cast<int>(rng() % 16);
        const int h = 1 + static_cast<int>(rng() % 16);
        GrayImage img = testsupport::random_integer_image(rng, w, h);
        GrayImage back = vector_to_image(image_to_vector(img), w, h);
        CHECK(back.pixels == img.pixels);
        CHECK(image_to_vector(back) == image_to_vector(img));
    }
}

TEST_CASE("pgm round trip preserves integer rasters") {
    TempDir tmp("pgm");
    std::mt19937_64 rng(7);
    GrayImage img = testsupport::random_integer_image(rng, 9, 5);
    const auto path = tmp.path() / "img.pgm";
    write_pgm(img, path);
    GrayImage back = read_pgm(path);
    REQUIRE(back.width == img.width);
    REQUIRE(back.height == img.height);
    CHECK(back.pixels == img.pixels);
}

TEST_CASE("read_pgm rejects garbage") {
    TempDir tmp("badpgm");
    const auto path = tmp.path() / "bad.pgm";
    std::ofstream(path) << "P6 2 2 255 xxxx";
    CHECK_THROWS_AS(read_pgm(path), Error);
    CHECK_THROWS_AS(read_pgm(tmp.path() / "absent.pgm"), Error);
}

static GrayImage canonical_test_face(int w, int h, uint64_t seed) {
    std::mt19937_64 rng(seed);
    return testsupport::random_integer_image(rng, w, h);
}

TEST_CASE("align_face with eyes already on the anchors is the identity") {
    const int w = 64, h = 64;
    GrayImage img = canonical_test_face(w, h, 42);
    Point el{kEyeLeftX * w, kEyeY * h};
    Point er{kEyeRightX * w, kEyeY * h};
    GrayImage out = align_face(img, el, er, w, h);
    double max_diff = 0.0;
    for (size_t i = 0; i < img.size(); ++i)
        max_diff = std::max(max_diff, std::abs(out.pixels[i] - img.pixels[i]));
    CHECK(max_diff <= 1e-9);

    // idempotence: aligning the aligned image again moves nothing
    GrayImage again = align_face(out, el, er, w, h);
    max_diff = 0.0;
    for (size_t i = 0; i < out.size(); ++i)
        max_diff = std::max(max_diff, std::abs(again.pixels[i] - out.pixels[i]));
    CHECK(max_diff <= 1e-6);
}

TEST_CASE("alignment transform lands rotated eyes on the anchors") {
    // nearly vertical eye pair (a steep in-plane rotation); the forward
    // transform must place both eyes at row 0.35*H with equal y
    const int w = 64, h = 64;
    Point el{30.0, 44.0};
    Point er{33.0, 12.0};
    SimilarityTransform t = alignment_transform(el, er, w, h);
    Point pl = t.apply(el);
    Point pr = t.apply(er);
    CHECK(std::abs(pl.x - kEyeLeftX * w) <= 1e-9);
    CHECK(std::abs(pl.y - kEyeY * h) <= 1e-9);
    CHECK(std::abs(pr.x - kEyeRightX * w) <= 1e-9);
    CHECK(std::abs(pr.y - kEyeY * h) <= 1e-9);
    CHECK(std::abs(pl.y - pr.y) <= 1e-9);
}

TEST_CASE("degenerate and invalid eye geometry is rejected") {
    GrayImage img = canonical_test_face(32, 32, 3);
    CHECK_THROWS_AS(align_face(img, {10, 10}, {10, 10}, 32, 32), Error);
    CHECK_THROWS_AS(align_face(img, {10.0, 10.0}, {11.0, 10.0}, 32, 32), Error); // distance < 2
    CHECK_THROWS_AS(align_face(img, {20, 10}, {10, 10}, 32, 32), Error);         // swapped order
    CHECK_THROWS_AS(align_face(img, {-3, 10}, {10, 10}, 32, 32), Error);         // outside image
    try {
        align_face(img, {10, 10}, {10.5, 10.0}, 32, 32);
        FAIL("expected DegenerateEyes");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateEyes);
    }
}

// ---------------------------------------------------------------------------
// manifest

static void write_frames(const std::filesystem::path& dir, const std::string& stem, int count) {
    GrayImage img(4, 4, 9.0);
    for (int t = 0; t < count; ++t)
        write_pgm(img, dir / (stem + std::to_string(t) + ".pgm"));
}

static std::filesystem::path write_manifest_file(const std::filesystem::path& dir,
                                                 const std::string& body) {
    const auto path = dir / "manifest.csv";
    std::ofstream out(path);
    out << kManifestHeader << "\n" << body;
    return path;
}

TEST_CASE("load_manifest accepts a minimal valid 8-frame sequence") {
    TempDir tmp("manifest");
    write_frames(tmp.path(), "f", 8);
    std::string body;
    for (int t = 0; t < 8; ++t)
        body += "f" + std::to_string(t) + ".pgm,seq1," + std::to_string(t) + ",happiness,,,,\n";
    const auto path = write_manifest_file(tmp.path(), body);

    DatasetManifest m = load_manifest(path);
    REQUIRE(m.records.size() == 1);
    CHECK(m.records[0].label == "happiness");
    CHECK(m.records[0].sequence_id == "seq1");
    REQUIRE(m.records[0].frames.size() == 8);
    CHECK_FALSE(m.records[0].frames[0].has_eyes());

    // determinism: reloading gives a structurally equal manifest
    DatasetManifest m2 = load_manifest(path);
    REQUIRE(m2.records.size() == m.records.size());
    for (size_t i = 0; i < m.records.size(); ++i) {
        CHECK(m2.records[i].sequence_id == m.records[i].sequence_id);
        CHECK(m2.records[i].label == m.records[i].label);
        for (size_t t = 0; t < m.records[i].frames.size(); ++t)
            CHECK(m2.records[i].frames[t].path == m.records[i].frames[t].path);
    }
}

TEST_CASE("load_manifest error cases") {
    TempDir tmp("manifest-err");
    write_frames(tmp.path(), "f", 8);

    SUBCASE("missing image file") {
        std::string body;
        for (int t = 0; t < 8; ++t)
            body += "nope" + std::to_string(t) + ".pgm,s1," + std::to_string(t) + ",anger,,,,\n";
        try {
            load_manifest(write_manifest_file(tmp.path(), body));
            FAIL("expected MissingFile");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::MissingFile);
        }
    }
    SUBCASE("seven frames") {
        std::string body;
        for (int t = 0; t < 7; ++t)
            body += "f" + std::to_string(t) + ".pgm,s1," + std::to_string(t) + ",anger,,,,\n";
        try {
            load_manifest(write_manifest_file(tmp.path(), body));
            FAIL("expected BadFrameCount");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::BadFrameCount);
        }
    }
    SUBCASE("duplicate frame index") {
        std::string body;
        for (int t = 0; t < 8; ++t)
            body += "f" + std::to_string(t) + ".pgm,s1," + std::to_string(t == 3 ? 2 : t) +
                    ",anger,,,,\n";
        try {
            load_manifest(write_manifest_file(tmp.path(), body));
            FAIL("expected DuplicateFrameIndex");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::DuplicateFrameIndex);
        }
    }
    SUBCASE("bad header") {
        const auto path = tmp.path() / "m.csv";
        std::ofstream(path) << "path,id\n";
        CHECK_THROWS_AS(load_manifest(path), Error);
    }
    SUBCASE("partial eye columns") {
        std::string body;
        for (int t = 0; t < 8; ++t)
            body += "f" + std::to_string(t) + ".pgm,s1," + std::to_string(t) + ",anger,1.0,,,\n";
        CHECK_THROWS_AS(load_manifest(write_manifest_file(tmp.path(), body)), Error);
    }
}

TEST_CASE("manifest save/load round trip keeps eye coordinates bit-exact") {
    TempDir tmp("manifest-rt");
    write_frames(tmp.path(), "f", 8);
    std::string body;
    for (int t = 0; t < 8; ++t)
        body += "f" + std::to_string(t) + ".pgm,s1," + std::to_string(t) +
                ",surprise,19.199999999999999,22.399999999999999,44.799999999999997,22.399999999999999\n";
    DatasetManifest m = load_manifest(write_manifest_file(tmp.path(), body));
    REQUIRE(m.records[0].frames[0].has_eyes());

    const auto out = tmp.path() / "copy.csv";
    save_manifest(m, out);
    DatasetManifest m2 = load_manifest(out);
    for (int t = 0; t < 8; ++t) {
        CHECK(m2.records[0].frames[t].eye_left->x == m.records[0].frames[t].eye_left->x);
        CHECK(m2.records[0].frames[t].eye_left->y == m.records[0].frames[t].eye_left->y);
        CHECK(m2.records[0].frames[t].eye_right->x == m.records[0].frames[t].eye_right->x);
        CHECK(m2.records[0].frames[t].eye_right->y == m.records[0].frames[t].eye_right->y);
    }

    SUBCASE("rows without eyes survive the round trip too") {
        for (auto& f : m.records[0].frames) {
            f.eye_left.reset();
            f.eye_right.reset();
        }
        const auto out2 = tmp.path() / "noeyes.csv";
        save_manifest(m, out2);
        DatasetManifest m3 = load_manifest(out2);
        for (const auto& f : m3.records[0].frames) CHECK_FALSE(f.has_eyes());
    }
}
