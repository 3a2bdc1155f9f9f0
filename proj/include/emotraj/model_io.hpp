#pragma once

// Versioned line-oriented text persistence for the full trained pipeline.
// Floats are printed with 17 significant digits, so save -> load -> save is
// byte-identical and values survive bit-exactly.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "emotraj/eigenspace.hpp"
#include "emotraj/error.hpp"
#include "emotraj/haar.hpp"
#include "emotraj/trajectory.hpp"

namespace emotraj {

inline constexpr const char* kModelMagic = "EMMODEL";
inline constexpr int kModelVersion = 1;

// Everything classify/evaluate needs: eigenspace, discriminating
// directions with scalers and polynomial tables, and (optionally) a stump
// ensemble for detection.
struct Model {
    int canonical_width = 64;
    int canonical_height = 64;
    int sequence_length = 8;
    EigenModel eigen;
    EmotionPolynomialModel poly;
    std::vector<StumpClassifier> stumps;
};

namespace detail {

inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

class ModelReader {
public:
    explicit ModelReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

    std::istringstream expect(const std::string& key) {
        std::string line;
        if (!std::getline(in_, line))
            fail(ErrorCode::UnreadableModel, name_ + ": truncated, expected '" + key + "'");
        std::istringstream ls(line);
        std::string got;
        ls >> got;
        if (got != key)
            fail(ErrorCode::UnreadableModel,
                 name_ + ": expected '" + key + "', found '" + got + "'");
        return ls;
    }

    bool next_line(std::string& line) { return static_cast<bool>(std::getline(in_, line)); }

    template <typename T>
    T read_value(std::istringstream& ls, const char* what) {
        T v{};
        if (!(ls >> v))
            fail(ErrorCode::UnreadableModel, name_ + ": bad or missing " + what);
        return v;
    }

    std::vector<double> read_doubles(std::istringstream& ls, size_t count, const char* what) {
        std::vector<double> out(count);
        for (size_t i = 0; i < count; ++i)
            if (!(ls >> out[i]))
                fail(ErrorCode::UnreadableModel,
                     name_ + ": expected " + std::to_string(count) + " values for " + what);
        return out;
    }

    const std::string& name() const { return name_; }

private:
    std::istream& in_;
    std::string name_;
};

} // namespace detail

inline void write_model(const Model& model, std::ostream& out) {
    using detail::fmt17;
    out << kModelMagic << " " << kModelVersion << "\n";
    out << "size " << model.canonical_width << " " << model.canonical_height << "\n";
    out << "frames " << model.sequence_length << "\n";
    out << "centering " << (model.eigen.centering ? "on" : "off") << "\n";
    out << "K " << model.eigen.k() << "\n";
    out << "emotions " << model.poly.emotions.size();
    for (const auto& name : model.poly.emotions) out << " " << name;
    out << "\n";
    out << "mean";
    for (double v : model.eigen.mean) out << " " << fmt17(v);
    out << "\n";
    out << "eigenvalues";
    for (double v : model.eigen.eigenvalues) out << " " << fmt17(v);
    out << "\n";
    for (int i = 0; i < model.eigen.k(); ++i) {
        out << "eigenface " << i;
        for (double v : model.eigen.eigenfaces[static_cast<size_t>(i)]) out << " " << fmt17(v);
        out << "\n";
    }
    out << "directions";
    for (int idx : model.poly.directions.indices) out << " " << idx;
    out << "\n";
    for (size_t d = 0; d < model.poly.scalers.size(); ++d) {
        const auto& s = model.poly.scalers[d];
        out << "scaler " << d << " " << fmt17(s.lo) << " " << fmt17(s.hi) << "\n";
    }
    for (size_t e = 0; e < model.poly.coefficients.size(); ++e) {
        for (size_t d = 0; d < model.poly.coefficients[e].size(); ++d) {
            out << "poly " << e << " " << d;
            for (double c : model.poly.coefficients[e][d]) out << " " << fmt17(c);
            out << "\n";
        }
    }
    for (const auto& stump : model.stumps) {
        out << "stump " << haar_kind_name(stump.feature.kind) << " " << stump.feature.x << " "
            << stump.feature.y << " " << stump.feature.w << " " << stump.feature.h << " "
            << stump.feature.window << " " << fmt17(stump.threshold) << " " << stump.polarity
            << " " << fmt17(stump.alpha) << "\n";
    }
}

inline void save_model(const Model& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary); // binary: no newline translation
    if (!out)
        fail(ErrorCode::IoError, "cannot write model: " + path.string());
    write_model(model, out);
    if (!out)
        fail(ErrorCode::IoError, "short write: " + path.string());
}

inline Model read_model(std::istream& in, const std::string& name) {
    detail::ModelReader r(in, name);
    Model model;

    {
        auto ls = r.expect(kModelMagic);
        const int version = r.read_value<int>(ls, "version");
        if (version != kModelVersion)
            fail(ErrorCode::UnreadableModel,
                 name + ": unsupported model version " + std::to_string(version));
    }
    {
        auto ls = r.expect("size");
        model.canonical_width = r.read_value<int>(ls, "width");
        model.canonical_height = r.read_value<int>(ls, "height");
    }
    {
        auto ls = r.expect("frames");
        model.sequence_length = r.read_value<int>(ls, "frames");
        model.poly.sequence_length = model.sequence_length;
    }
    {
        auto ls = r.expect("centering");
        const auto mode = r.read_value<std::string>(ls, "centering");
        if (mode != "on" && mode != "off")
            fail(ErrorCode::UnreadableModel, name + ": centering must be on or off");
        model.eigen.centering = (mode == "on");
    }
    int k = 0;
    {
        auto ls = r.expect("K");
        k = r.read_value<int>(ls, "K");
        if (k < 0) fail(ErrorCode::UnreadableModel, name + ": negative K");
    }
    {
        auto ls = r.expect("emotions");
        const int e = r.read_value<int>(ls, "emotion count");
        if (e < 0) fail(ErrorCode::UnreadableModel, name + ": negative emotion count");
        for (int i = 0; i < e; ++i)
            model.poly.emotions.push_back(r.read_value<std::string>(ls, "emotion name"));
    }
    const size_t dim = static_cast<size_t>(model.canonical_width) * model.canonical_height;
    {
        auto ls = r.expect("mean");
        model.eigen.mean = r.read_doubles(ls, dim, "mean");
    }
    {
        auto ls = r.expect("eigenvalues");
        model.eigen.eigenvalues = r.read_doubles(ls, static_cast<size_t>(k), "eigenvalues");
    }
    for (int i = 0; i < k; ++i) {
        auto ls = r.expect("eigenface");
        const int idx = r.read_value<int>(ls, "eigenface index");
        if (idx != i)
            fail(ErrorCode::UnreadableModel, name + ": eigenface lines out of order");
        model.eigen.eigenfaces.push_back(r.read_doubles(ls, dim, "eigenface"));
    }
    // singular values and the full spectrum are training-side diagnostics;
    // they are not persisted and stay empty after a load
    model.eigen.face_width = model.canonical_width;
    model.eigen.face_height = model.canonical_height;
    {
        // `directions i1 ... iD`: D is the token count
        auto ls = r.expect("directions");
        int idx = 0;
        while (ls >> idx) {
            if (idx < 0 || idx >= std::max(k, 1))
                fail(ErrorCode::UnreadableModel, name + ": direction index out of range");
            model.poly.directions.indices.push_back(idx);
        }
        if (!ls.eof())
            fail(ErrorCode::UnreadableModel, name + ": malformed directions line");
    }
    const int d_count = model.poly.directions.count();
    for (int d = 0; d < d_count; ++d) {
        auto ls = r.expect("scaler");
        const int idx = r.read_value<int>(ls, "scaler index");
        if (idx != d)
            fail(ErrorCode::UnreadableModel, name + ": scaler lines out of order");
        DirectionScaler s;
        s.lo = r.read_value<double>(ls, "scaler lo");
        s.hi = r.read_value<double>(ls, "scaler hi");
        model.poly.scalers.push_back(s);
    }
    model.poly.coefficients.resize(model.poly.emotions.size());
    for (size_t e = 0; e < model.poly.emotions.size(); ++e) {
        model.poly.coefficients[e].resize(static_cast<size_t>(d_count));
        for (int d = 0; d < d_count; ++d) {
            auto ls = r.expect("poly");
            const int ei = r.read_value<int>(ls, "poly emotion index");
            const int di = r.read_value<int>(ls, "poly direction index");
            if (ei != static_cast<int>(e) || di != d)
                fail(ErrorCode::UnreadableModel, name + ": poly lines out of order");
            model.poly.coefficients[e][static_cast<size_t>(d)] = r.read_doubles(
                ls, static_cast<size_t>(model.sequence_length) + 1, "poly coefficients");
            if (model.poly.coefficients[e][static_cast<size_t>(d)][0] != 1.0)
                fail(ErrorCode::UnreadableModel, name + ": polynomial is not monic");
        }
    }
    std::string line;
    while (r.next_line(line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key != "stump")
            fail(ErrorCode::UnreadableModel, name + ": unexpected trailing line '" + key + "'");
        StumpClassifier stump;
        std::string kind;
        if (!(ls >> kind >> stump.feature.x >> stump.feature.y >> stump.feature.w >>
              stump.feature.h >> stump.feature.window >> stump.threshold >> stump.polarity >>
              stump.alpha))
            fail(ErrorCode::UnreadableModel, name + ": malformed stump line");
        stump.feature.kind = haar_kind_from_name(kind);
        model.stumps.push_back(stump);
    }
    return model;
}

inline Model load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorCode::UnreadableModel, "cannot open model: " + path.string());
    return read_model(in, path.string());
}

} // namespace emotraj
