#pragma once

// Dataset manifest: CSV schema binding image files on disk to labeled,
// frame-ordered sequences. Frame order comes exclusively from the
// frame_index column, never from filename sorting.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "emotraj/error.hpp"
#include "emotraj/image.hpp"

namespace emotraj {

inline constexpr int kDefaultSequenceLength = 8;
inline constexpr const char* kManifestHeader =
    "path,sequence_id,frame_index,label,eye_lx,eye_ly,eye_rx,eye_ry";
inline constexpr const char* kUnlabeled = "unlabeled";

struct FrameRef {
    std::filesystem::path path;
    std::optional<Point> eye_left;
    std::optional<Point> eye_right;

    bool has_eyes() const { return eye_left.has_value() && eye_right.has_value(); }
};

struct SequenceRecord {
    std::string sequence_id;
    std::string label = kUnlabeled;
    std::vector<FrameRef> frames; // index t = frame_index t
};

struct DatasetManifest {
    std::vector<SequenceRecord> records;
    int canonical_width = 64;
    int canonical_height = 64;
};

namespace detail {

inline std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

inline std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline bool valid_label_token(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
    return true;
}

inline double parse_double_field(const std::string& s, int lineno, const char* what) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail(ErrorCode::ManifestParse,
             std::string("line ") + std::to_string(lineno) + ": bad " + what + " '" + s + "'");
    }
}

} // namespace detail

// Parses and validates the manifest CSV. Every referenced file must exist;
// every sequence must carry exactly frame indices 0..L-1. Relative image
// paths resolve against the manifest's own directory.
inline DatasetManifest load_manifest(const std::filesystem::path& path,
                                     int sequence_length = kDefaultSequenceLength) {
    std::ifstream in(path);
    if (!in)
        fail(ErrorCode::MissingFile, "cannot open manifest: " + path.string());
    const std::filesystem::path base = path.has_parent_path()
                                           ? path.parent_path()
                                           : std::filesystem::path(".");

    std::string line;
    if (!std::getline(in, line) || detail::strip_cr(line) != kManifestHeader)
        fail(ErrorCode::ManifestParse, "manifest header must be exactly: " + std::string(kManifestHeader));

    struct PendingFrame {
        int index;
        FrameRef ref;
    };
    struct PendingSeq {
        std::string label;
        std::vector<PendingFrame> frames;
    };
    std::vector<std::string> order;
    std::map<std::string, PendingSeq> seqs;

    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = detail::strip_cr(line);
        if (line.empty()) continue;
        auto fields = detail::split_csv_row(line);
        if (fields.size() != 8)
            fail(ErrorCode::ManifestParse,
                 "line " + std::to_string(lineno) + ": expected 8 fields, got " +
                     std::to_string(fields.size()));
        const std::string& raw_path = fields[0];
        const std::string& seq_id = fields[1];
        const std::string& idx_str = fields[2];
        const std::string& label = fields[3];
        if (raw_path.empty() || seq_id.empty())
            fail(ErrorCode::ManifestParse, "line " + std::to_string(lineno) + ": empty path or sequence_id");
        if (!detail::valid_label_token(label))
            fail(ErrorCode::ManifestParse,
                 "line " + std::to_string(lineno) + ": bad label '" + label + "'");

        int frame_index = 0;
        try {
            size_t pos = 0;
            frame_index = std::stoi(idx_str, &pos);
            if (pos != idx_str.size() || frame_index < 0) throw std::invalid_argument(idx_str);
        } catch (const std::exception&) {
            fail(ErrorCode::ManifestParse,
                 "line " + std::to_string(lineno) + ": bad frame_index '" + idx_str + "'");
        }

        FrameRef ref;
        std::filesystem::path p(raw_path);
        ref.path = p.is_absolute() ? p : (base / p).lexically_normal();

        const bool any_eye = !fields[4].empty() || !fields[5].empty() ||
                             !fields[6].empty() || !fields[7].empty();
        const bool all_eyes = !fields[4].empty() && !fields[5].empty() &&
                              !fields[6].empty() && !fields[7].empty();
        if (any_eye && !all_eyes)
            fail(ErrorCode::ManifestParse,
                 "line " + std::to_string(lineno) + ": eye columns must be all present or all empty");
        if (all_eyes) {
            Point el{detail::parse_double_field(fields[4], lineno, "eye_lx"),
                     detail::parse_double_field(fields[5], lineno, "eye_ly")};
            Point er{detail::parse_double_field(fields[6], lineno, "eye_rx"),
                     detail::parse_double_field(fields[7], lineno, "eye_ry")};
            if (!(el.x < er.x))
                fail(ErrorCode::ManifestParse,
                     "line " + std::to_string(lineno) + ": eye_lx must be < eye_rx");
            ref.eye_left = el;
            ref.eye_right = er;
        }

        auto it = seqs.find(seq_id);
        if (it == seqs.end()) {
            order.push_back(seq_id);
            it = seqs.emplace(seq_id, PendingSeq{label, {}}).first;
        } else if (it->second.label != label) {
            fail(ErrorCode::ManifestParse,
                 "line " + std::to_string(lineno) + ": sequence '" + seq_id +
                     "' has conflicting labels '" + it->second.label + "' and '" + label + "'");
        }
        it->second.frames.push_back(PendingFrame{frame_index, std::move(ref)});
    }

    DatasetManifest manifest;
    for (const auto& seq_id : order) {
        auto& pending = seqs.at(seq_id);
        SequenceRecord rec;
        rec.sequence_id = seq_id;
        rec.label = pending.label;
        rec.frames.resize(static_cast<size_t>(sequence_length));
        std::vector<bool> seen(static_cast<size_t>(sequence_length), false);
        for (auto& pf : pending.frames) {
            if (pf.index >= sequence_length)
                fail(ErrorCode::BadFrameCount,
                     "sequence '" + seq_id + "': frame_index " + std::to_string(pf.index) +
                         " outside 0.." + std::to_string(sequence_length - 1));
            if (seen[static_cast<size_t>(pf.index)])
                fail(ErrorCode::DuplicateFrameIndex,
                     "sequence '" + seq_id + "': duplicate frame_index " + std::to_string(pf.index));
            seen[static_cast<size_t>(pf.index)] = true;
            rec.frames[static_cast<size_t>(pf.index)] = std::move(pf.ref);
        }
        if (pending.frames.size() != static_cast<size_t>(sequence_length))
            fail(ErrorCode::BadFrameCount,
                 "sequence '" + seq_id + "': expected " + std::to_string(sequence_length) +
                     " frames, got " + std::to_string(pending.frames.size()));
        for (const auto& f : rec.frames)
            if (!std::filesystem::exists(f.path))
                fail(ErrorCode::MissingFile, "referenced image does not exist: " + f.path.string());
        manifest.records.push_back(std::move(rec));
    }
    return manifest;
}

// Writes the CSV back out. Image paths are emitted relative to the output
// manifest's directory when possible so the dataset stays relocatable.
inline void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        fail(ErrorCode::IoError, "cannot write manifest: " + path.string());
    const std::filesystem::path base = path.has_parent_path()
                                           ? path.parent_path()
                                           : std::filesystem::path(".");
    out << kManifestHeader << "\n";
    char buf[64];
    auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (const auto& rec : manifest.records) {
        for (size_t t = 0; t < rec.frames.size(); ++t) {
            const FrameRef& f = rec.frames[t];
            std::error_code ec;
            std::filesystem::path rel = std::filesystem::relative(f.path, base, ec);
            const std::string p = (ec || rel.empty()) ? f.path.string() : rel.generic_string();
            out << p << ',' << rec.sequence_id << ',' << t << ',' << rec.label << ',';
            if (f.has_eyes()) {
                out << fmt(f.eye_left->x) << ',' << fmt(f.eye_left->y) << ','
                    << fmt(f.eye_right->x) << ',' << fmt(f.eye_right->y);
            } else {
                out << ",,,";
            }
            out << "\n";
        }
    }
    if (!out)
        fail(ErrorCode::IoError, "short write: " + path.string());
}

} // namespace emotraj
