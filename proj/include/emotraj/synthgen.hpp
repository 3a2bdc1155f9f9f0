#pragma once

// Deterministic synthetic face-sequence generator. One seeded neutral base
// face; per emotion a fixed deformation field, mutually orthogonalized so
// distinct emotions provably occupy distinct eigen directions; frame t adds
// the field scaled by gain * t/(L-1) plus seeded Gaussian noise. Eye
// coordinates in the emitted manifest are exact, so alignment reduces to
// the identity.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "emotraj/error.hpp"
#include "emotraj/image.hpp"
#include "emotraj/linalg.hpp"
#include "emotraj/manifest.hpp"

namespace emotraj {

struct SynthConfig {
    uint64_t seed = 7;
    std::vector<std::string> emotions = {"anger", "happiness", "sorrow", "surprise"};
    int sequences_per_emotion = 10;
    int width = 64;
    int height = 64;
    int frames = 8; // L
    double noise_sigma = 0.0;
    double deformation_gain = 1.0;
};

namespace detail {

inline double uniform01(std::mt19937_64& rng) {
    // 53-bit mantissa draw in (0, 1]; arithmetic only, no distribution class
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

inline double gaussian(std::mt19937_64& rng) {
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

inline void add_blob(std::vector<double>& img, int w, int h, double cx, double cy,
                     double sigma_x, double sigma_y, double amplitude) {
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double dx = (x - cx) / sigma_x;
            const double dy = (y - cy) / sigma_y;
            img[static_cast<size_t>(y) * w + x] += amplitude * std::exp(-0.5 * (dx * dx + dy * dy));
        }
    }
}

inline std::vector<double> neutral_base(const SynthConfig& cfg, std::mt19937_64& rng) {
    const int w = cfg.width, h = cfg.height;
    std::vector<double> base(static_cast<size_t>(w) * h, 50.0);
    auto jitter = [&rng] { return 1.0 + 0.05 * (2.0 * uniform01(rng) - 1.0); };
    // head, eye sockets (exactly on the canonical anchors), nose, mouth, brow
    add_blob(base, w, h, 0.50 * w, 0.55 * h, 0.30 * w, 0.38 * h, 115.0 * jitter());
    add_blob(base, w, h, kEyeLeftX * w, kEyeY * h, 0.055 * w, 0.045 * h, -55.0 * jitter());
    add_blob(base, w, h, kEyeRightX * w, kEyeY * h, 0.055 * w, 0.045 * h, -55.0 * jitter());
    add_blob(base, w, h, 0.50 * w, 0.58 * h, 0.040 * w, 0.100 * h, 25.0 * jitter());
    add_blob(base, w, h, 0.50 * w, 0.78 * h, 0.130 * w, 0.035 * h, -45.0 * jitter());
    add_blob(base, w, h, 0.50 * w, 0.27 * h, 0.220 * w, 0.030 * h, 18.0 * jitter());
    return base;
}

// Raw per-emotion intensity deformation patterns before orthogonalization.
inline std::vector<double> raw_field(const SynthConfig& cfg, int index) {
    const int w = cfg.width, h = cfg.height;
    std::vector<double> f(static_cast<size_t>(w) * h, 0.0);
    // the four named fields share one blob shape so their amplitude
    // statistics match; only the placement differs
    const double sx = 0.045 * w, sy = 0.035 * h;
    switch (index) {
        case 0: // mouth corners up
            add_blob(f, w, h, 0.30 * w, 0.74 * h, sx, sy, 1.0);
            add_blob(f, w, h, 0.70 * w, 0.74 * h, sx, sy, 1.0);
            break;
        case 1: // chin drop (mouth corners pulled down)
            add_blob(f, w, h, 0.38 * w, 0.90 * h, sx, sy, 1.0);
            add_blob(f, w, h, 0.62 * w, 0.90 * h, sx, sy, 1.0);
            break;
        case 2: // mouth opening
            add_blob(f, w, h, 0.42 * w, 0.66 * h, sx, sy, 1.0);
            add_blob(f, w, h, 0.58 * w, 0.66 * h, sx, sy, 1.0);
            break;
        case 3: // brow shift
            add_blob(f, w, h, 0.30 * w, 0.18 * h, sx, sy, 1.0);
            add_blob(f, w, h, 0.70 * w, 0.18 * h, sx, sy, 1.0);
            break;
        default: { // extra emotions: blobs on a ring around the face center
            const double angle = 0.9 * index + 0.7;
            add_blob(f, w, h, (0.5 + 0.28 * std::cos(angle)) * w, (0.5 + 0.28 * std::sin(angle)) * h,
                     0.050 * w, 0.050 * h, 1.0);
            break;
        }
    }
    return f;
}

inline constexpr double kFieldRms = 4.0;

// Gram-Schmidt orthogonalization, each field normalized to a fixed RMS
// amplitude so every emotion carries equal deformation energy.
inline std::vector<std::vector<double>> emotion_fields(const SynthConfig& cfg) {
    const size_t dim = static_cast<size_t>(cfg.width) * cfg.height;
    std::vector<std::vector<double>> fields;
    for (size_t e = 0; e < cfg.emotions.size(); ++e) {
        std::vector<double> f = raw_field(cfg, static_cast<int>(e));
        for (const auto& prev : fields) {
            const double proj = dot(f, prev) / dot(prev, prev);
            for (size_t i = 0; i < dim; ++i) f[i] -= proj * prev[i];
        }
        const double rms = norm2(f) / std::sqrt(static_cast<double>(dim));
        if (rms < 1e-9)
            fail(ErrorCode::DegenerateData, "synth: deformation fields collapsed");
        for (double& v : f) v *= kFieldRms / rms;
        fields.push_back(std::move(f));
    }
    return fields;
}

} // namespace detail

// Writes <out_dir>/images/*.pgm and <out_dir>/manifest.csv; returns the
// manifest. (seed, config) fully determines every emitted byte.
inline DatasetManifest generate(const SynthConfig& cfg, const std::filesystem::path& out_dir) {
    if (cfg.emotions.empty())
        fail(ErrorCode::InvalidArgument, "synth: need at least one emotion");
    if (cfg.sequences_per_emotion < 2)
        fail(ErrorCode::InvalidArgument, "synth: sequences_per_emotion must be >= 2");
    if (cfg.noise_sigma < 0.0)
        fail(ErrorCode::InvalidArgument, "synth: noise_sigma must be >= 0");
    if (cfg.width < 8 || cfg.height < 8 || cfg.frames < 2)
        fail(ErrorCode::InvalidArgument, "synth: degenerate geometry");
    for (const auto& name : cfg.emotions)
        if (!detail::valid_label_token(name))
            fail(ErrorCode::InvalidArgument, "synth: bad emotion name '" + name + "'");

    std::error_code ec;
    std::filesystem::create_directories(out_dir / "images", ec);
    if (ec)
        fail(ErrorCode::IoError, "synth: cannot create output directory: " + out_dir.string());

    std::mt19937_64 rng(cfg.seed);
    const std::vector<double> base = detail::neutral_base(cfg, rng);
    const std::vector<std::vector<double>> fields = detail::emotion_fields(cfg);
    const size_t dim = base.size();

    const Point eye_left{kEyeLeftX * cfg.width, kEyeY * cfg.height};
    const Point eye_right{kEyeRightX * cfg.width, kEyeY * cfg.height};

    DatasetManifest manifest;
    manifest.canonical_width = cfg.width;
    manifest.canonical_height = cfg.height;

    char name_buf[128];
    for (size_t e = 0; e < cfg.emotions.size(); ++e) {
        for (int s = 0; s < cfg.sequences_per_emotion; ++s) {
            SequenceRecord rec;
            std::snprintf(name_buf, sizeof(name_buf), "%s-%02d", cfg.emotions[e].c_str(), s);
            rec.sequence_id = name_buf;
            rec.label = cfg.emotions[e];
            for (int t = 0; t < cfg.frames; ++t) {
                const double ramp =
                    cfg.deformation_gain * static_cast<double>(t) / (cfg.frames - 1);
                GrayImage img(cfg.width, cfg.height);
                for (size_t i = 0; i < dim; ++i) {
                    double v = base[i] + ramp * fields[e][i];
                    if (cfg.noise_sigma > 0.0) v += cfg.noise_sigma * detail::gaussian(rng);
                    img.pixels[i] = std::clamp(v, 0.0, 255.0);
                }
                std::snprintf(name_buf, sizeof(name_buf), "%s_%02d_f%d.pgm",
                              cfg.emotions[e].c_str(), s, t);
                const std::filesystem::path img_path = out_dir / "images" / name_buf;
                write_pgm(img, img_path);
                FrameRef ref;
                ref.path = img_path;
                ref.eye_left = eye_left;
                ref.eye_right = eye_right;
                rec.frames.push_back(std::move(ref));
            }
            manifest.records.push_back(std::move(rec));
        }
    }
    save_manifest(manifest, out_dir / "manifest.csv");
    return manifest;
}

} // namespace emotraj
