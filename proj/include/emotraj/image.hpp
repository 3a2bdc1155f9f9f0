#pragma once

// Grayscale raster type, PGM (P5) I/O, row-major vectorization and
// eye-landmark face alignment to a canonical frame.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "emotraj/error.hpp"

namespace emotraj {

// Row-major intensity raster. Values are real in [0, 255]; ingest from PGM
// yields integers, alignment resampling produces fractional values.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill) {
        if (w < 1 || h < 1)
            fail(ErrorCode::InvalidArgument, "image dimensions must be >= 1");
    }

    double& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return pixels.size(); }
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Row-major flattening: image (h x w) -> vector of length h*w.
inline std::vector<double> image_to_vector(const GrayImage& img) {
    return img.pixels;
}

// Inverse of image_to_vector. Exact round trip.
inline GrayImage vector_to_image(const std::vector<double>& v, int width, int height) {
    if (static_cast<size_t>(width) * height != v.size())
        fail(ErrorCode::DimensionMismatch, "vector length does not match image dimensions");
    GrayImage img(width, height);
    img.pixels = v;
    return img;
}

// ---------------------------------------------------------------------------
// PGM (binary P5, 8-bit) ingest and emit.

namespace detail {

inline int pgm_next_token(std::istream& in, std::string& tok) {
    tok.clear();
    int c = in.get();
    // skip whitespace and '#' comment lines
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    return tok.empty() ? -1 : 0;
}

} // namespace detail

inline GrayImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorCode::MissingFile, "cannot open image: " + path.string());
    std::string tok;
    if (detail::pgm_next_token(in, tok) != 0 || tok != "P5")
        fail(ErrorCode::BadImage, "not a binary PGM (P5): " + path.string());
    long w = 0, h = 0, maxval = 0;
    auto read_int = [&](long& out) {
        if (detail::pgm_next_token(in, tok) != 0)
            fail(ErrorCode::BadImage, "truncated PGM header: " + path.string());
        try {
            out = std::stol(tok);
        } catch (const std::exception&) {
            fail(ErrorCode::BadImage, "bad PGM header token '" + tok + "': " + path.string());
        }
    };
    read_int(w);
    read_int(h);
    read_int(maxval);
    if (w < 1 || h < 1)
        fail(ErrorCode::BadImage, "bad PGM dimensions: " + path.string());
    if (maxval < 1 || maxval > 255)
        fail(ErrorCode::BadImage, "only 8-bit PGM supported: " + path.string());
    // single whitespace byte separates header from raster
    std::vector<unsigned char> raw(static_cast<size_t>(w) * h);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<size_t>(in.gcount()) != raw.size())
        fail(ErrorCode::BadImage, "truncated PGM raster: " + path.string());
    GrayImage img(static_cast<int>(w), static_cast<int>(h));
    for (size_t i = 0; i < raw.size(); ++i) img.pixels[i] = static_cast<double>(raw[i]);
    return img;
}

// Rounds half up and clamps to [0, 255].
inline void write_pgm(const GrayImage& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorCode::IoError, "cannot write image: " + path.string());
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> raw(img.size());
    for (size_t i = 0; i < img.size(); ++i) {
        double v = std::floor(img.pixels[i] + 0.5);
        raw[i] = static_cast<unsigned char>(std::clamp(v, 0.0, 255.0));
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out)
        fail(ErrorCode::IoError, "short write: " + path.string());
}

// ---------------------------------------------------------------------------
// Alignment. Canonical eye anchors are fixed fractions of the target frame.

inline constexpr double kEyeLeftX = 0.3;
inline constexpr double kEyeRightX = 0.7;
inline constexpr double kEyeY = 0.35;

// z -> scale*rot*z + offset, in complex form.
struct SimilarityTransform {
    std::complex<double> a{1.0, 0.0};
    std::complex<double> b{0.0, 0.0};

    Point apply(const Point& p) const {
        auto z = a * std::complex<double>(p.x, p.y) + b;
        return {z.real(), z.imag()};
    }
    Point apply_inverse(const Point& p) const {
        auto z = (std::complex<double>(p.x, p.y) - b) / a;
        return {z.real(), z.imag()};
    }
};

// The unique rotation+scale+translation taking the source eye pair onto the
// canonical anchors (0.3W, 0.35H) / (0.7W, 0.35H).
inline SimilarityTransform alignment_transform(const Point& eye_left, const Point& eye_right,
                                               int canonical_w, int canonical_h) {
    std::complex<double> el(eye_left.x, eye_left.y), er(eye_right.x, eye_right.y);
    double dist = std::abs(er - el);
    if (dist < 2.0)
        fail(ErrorCode::DegenerateEyes, "eye distance below 2 pixels, transform ill-conditioned");
    std::complex<double> pl(kEyeLeftX * canonical_w, kEyeY * canonical_h);
    std::complex<double> pr(kEyeRightX * canonical_w, kEyeY * canonical_h);
    SimilarityTransform t;
    t.a = (pr - pl) / (er - el);
    t.b = pl - t.a * el;
    return t;
}

// Bilinear sample; coordinates outside the raster contribute 0.
inline double sample_bilinear(const GrayImage& img, double x, double y) {
    int x0 = static_cast<int>(std::floor(x));
    int y0 = static_cast<int>(std::floor(y));
    double fx = x - x0, fy = y - y0;
    double acc = 0.0;
    for (int dy = 0; dy <= 1; ++dy) {
        for (int dx = 0; dx <= 1; ++dx) {
            int xi = x0 + dx, yi = y0 + dy;
            if (xi < 0 || yi < 0 || xi >= img.width || yi >= img.height) continue;
            double w = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy);
            acc += w * img.at(xi, yi);
        }
    }
    return acc;
}

// Resamples the face into the canonical frame. Idempotent once the eyes sit
// exactly on the anchors (the transform degenerates to the identity and
// bilinear sampling at integer coordinates copies pixels).
inline GrayImage align_face(const GrayImage& img, const Point& eye_left, const Point& eye_right,
                            int canonical_w, int canonical_h) {
    if (eye_left.x < 0 || eye_left.x > img.width - 1 || eye_left.y < 0 || eye_left.y > img.height - 1 ||
        eye_right.x < 0 || eye_right.x > img.width - 1 || eye_right.y < 0 || eye_right.y > img.height - 1)
        fail(ErrorCode::InvalidArgument, "eye coordinates outside the image");
    if (std::hypot(eye_right.x - eye_left.x, eye_right.y - eye_left.y) < 2.0)
        fail(ErrorCode::DegenerateEyes, "eye distance below 2 pixels, transform ill-conditioned");
    if (!(eye_left.x < eye_right.x))
        fail(ErrorCode::InvalidArgument, "expected eye_left.x < eye_right.x");
    SimilarityTransform t = alignment_transform(eye_left, eye_right, canonical_w, canonical_h);
    GrayImage out(canonical_w, canonical_h);
    for (int y = 0; y < canonical_h; ++y) {
        for (int x = 0; x < canonical_w; ++x) {
            Point src = t.apply_inverse({static_cast<double>(x), static_cast<double>(y)});
            out.at(x, y) = sample_bilinear(img, src.x, src.y);
        }
    }
    return out;
}

} // namespace emotraj
