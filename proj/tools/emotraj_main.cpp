// emotraj command-line tool: synthesize datasets, split them, train the
// eigenface + polynomial-trajectory classifier, classify and evaluate
// sequences, and run the Haar stump detector.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "emotraj/error.hpp"
#include "emotraj/evaluation.hpp"
#include "emotraj/haar.hpp"
#include "emotraj/manifest.hpp"
#include "emotraj/model_io.hpp"
#include "emotraj/pipeline.hpp"
#include "emotraj/synthgen.hpp"

namespace {

namespace fs = std::filesystem;
using namespace emotraj;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

// `key=value` lines, '#' comments; keys mirror the synth flag names. Values
// only apply to options not given on the command line.
void apply_synth_config_file(const std::string& path, CLI::App* synth, SynthConfig& cfg,
                             std::string& out_dir, std::string& emotions_csv) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::MissingFile, "cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::InvalidArgument,
                 path + ":" + std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto flag_given = [synth](const std::string& name) {
            return synth->count("--" + name) > 0;
        };
        try {
            if (key == "out") {
                if (!flag_given("out")) out_dir = value;
            } else if (key == "seed") {
                if (!flag_given("seed")) cfg.seed = std::stoull(value);
            } else if (key == "per-emotion") {
                if (!flag_given("per-emotion")) cfg.sequences_per_emotion = std::stoi(value);
            } else if (key == "emotions") {
                if (!flag_given("emotions")) emotions_csv = value;
            } else if (key == "noise-sigma") {
                if (!flag_given("noise-sigma")) cfg.noise_sigma = std::stod(value);
            } else if (key == "gain") {
                if (!flag_given("gain")) cfg.deformation_gain = std::stod(value);
            } else if (key == "canonical-size") {
                if (!flag_given("canonical-size")) cfg.width = std::stoi(value);
            } else if (key == "frames") {
                if (!flag_given("frames")) cfg.frames = std::stoi(value);
            } else {
                fail(ErrorCode::InvalidArgument,
                     path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
            }
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            fail(ErrorCode::InvalidArgument,
                 path + ":" + std::to_string(lineno) + ": bad value '" + value + "'");
        }
    }
}

std::vector<GrayImage> load_window_dir(const fs::path& dir) {
    std::vector<fs::path> paths;
    if (!fs::is_directory(dir))
        fail(ErrorCode::MissingFile, "not a directory: " + dir.string());
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".pgm")
            paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end());
    std::vector<GrayImage> out;
    out.reserve(paths.size());
    for (const auto& p : paths) out.push_back(read_pgm(p));
    return out;
}

int cmd_synth(const SynthConfig& cfg, const std::string& out_dir) {
    DatasetManifest manifest = generate(cfg, out_dir);
    std::cout << "wrote " << manifest.records.size() << " sequences ("
              << manifest.records.size() * static_cast<size_t>(cfg.frames) << " images) to "
              << out_dir << "\n";
    std::cout << "manifest: " << (fs::path(out_dir) / "manifest.csv").string() << "\n";
    return 0;
}

int cmd_split(const std::string& manifest_path, double train_fraction, uint64_t seed,
              const std::string& out_train, const std::string& out_test, int frames) {
    DatasetManifest manifest = load_manifest(manifest_path, frames);
    SplitResult split = split_dataset(manifest, train_fraction, seed);
    save_manifest(split.train, out_train);
    save_manifest(split.test, out_test);
    for (const auto& w : split.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "train: " << split.train.records.size() << " sequences -> " << out_train << "\n";
    std::cout << "test:  " << split.test.records.size() << " sequences -> " << out_test << "\n";
    return 0;
}

int cmd_train(const std::string& manifest_path, const std::string& model_path,
              const TrainOptions& opts) {
    DatasetManifest manifest = load_manifest(manifest_path, opts.sequence_length);
    Model model = train_pipeline(manifest, opts);
    save_model(model, model_path);

    std::cout << "effective K: " << model.eigen.k() << "\n";
    std::cout << "directions:";
    for (size_t i = 0; i < model.poly.directions.indices.size(); ++i)
        std::cout << " " << model.poly.directions.indices[i];
    if (model.poly.directions.reduced) std::cout << "  (reduced: K < D)";
    std::cout << "\n";

    std::map<std::string, std::pair<double, long>> per_emotion;
    for (const auto& rec : manifest.records) {
        const int e = model.poly.emotion_index(rec.label);
        const WeightTrajectory traj = project_record(model, rec);
        per_emotion[rec.label].first += residual(model.poly, traj, e);
        per_emotion[rec.label].second += 1;
    }
    for (const auto& [label, acc] : per_emotion)
        std::cout << "training residual " << label << ": " << fmt17(acc.first / acc.second)
                  << "\n";
    std::cout << "model: " << model_path << "\n";
    return 0;
}

int cmd_classify(const std::string& model_path, const std::string& manifest_path,
                 const std::vector<std::string>& frame_paths) {
    Model model = load_model(model_path);
    std::vector<SequenceRecord> records;
    if (!manifest_path.empty()) {
        DatasetManifest manifest = load_manifest(manifest_path, model.sequence_length);
        records = manifest.records;
    } else {
        if (static_cast<int>(frame_paths.size()) != model.sequence_length)
            fail(ErrorCode::BadFrameCount,
                 "expected " + std::to_string(model.sequence_length) + " frame paths, got " +
                     std::to_string(frame_paths.size()));
        SequenceRecord rec;
        rec.sequence_id = "cli";
        for (const auto& p : frame_paths) {
            if (!fs::exists(p)) fail(ErrorCode::MissingFile, "no such frame: " + p);
            FrameRef ref;
            ref.path = p;
            rec.frames.push_back(ref);
        }
        records.push_back(rec);
    }
    for (const auto& rec : records) {
        const ClassifyResult res = classify_record(model, rec);
        std::cout << rec.sequence_id << " " << model.poly.emotions[static_cast<size_t>(res.emotion)];
        for (double r : res.residuals) std::cout << " " << fmt17(r);
        std::cout << "\n";
    }
    return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& manifest_path,
                 const std::string& report, const std::string& out_csv) {
    Model model = load_model(model_path);
    DatasetManifest manifest = load_manifest(manifest_path, model.sequence_length);
    ConfusionMatrix cm = evaluate(model, manifest);
    if (report == "csv")
        std::cout << render_confusion_csv(cm);
    else
        std::cout << render_confusion_text(cm);
    if (!out_csv.empty()) {
        std::ofstream out(out_csv, std::ios::binary);
        if (!out) fail(ErrorCode::IoError, "cannot write report: " + out_csv);
        out << render_confusion_csv(cm);
    }
    return 0;
}

int cmd_train_detector(const std::string& pos_dir, const std::string& neg_dir, int rounds,
                       const std::string& model_path) {
    std::vector<GrayImage> positives = load_window_dir(pos_dir);
    std::vector<GrayImage> negatives = load_window_dir(neg_dir);
    AdaBoostResult trained = adaboost_train(positives, negatives, rounds);
    if (trained.degenerate)
        std::cerr << "warning: degenerate training set, ensemble is empty\n";
    Model model;
    model.canonical_width = 0;
    model.canonical_height = 0;
    model.stumps = trained.stumps;
    save_model(model, model_path);
    std::cout << "stumps: " << trained.stumps.size() << "\n";
    std::cout << "model: " << model_path << "\n";
    return 0;
}

int cmd_detect(const std::string& model_path, const std::string& image_path, int stride,
               const std::string& scales_str) {
    Model model = load_model(model_path);
    if (model.stumps.empty())
        fail(ErrorCode::InvalidArgument, "model has no stump ensemble; run train-detector");
    const int window = model.stumps.front().feature.window;
    std::vector<double> scales;
    for (const auto& tok : split_commas(scales_str)) scales.push_back(std::stod(tok));
    GrayImage img = read_pgm(image_path);
    std::vector<Detection> boxes = detect(img, model.stumps, window, stride, scales);
    for (const auto& b : boxes)
        std::cout << b.x << " " << b.y << " " << b.side << " " << fmt17(b.score) << "\n";
    std::cerr << boxes.size() << " detection(s)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynamic facial-expression classification in eigenface space"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a deterministic synthetic dataset");
    SynthConfig synth_cfg;
    std::string synth_out = "synth-data";
    std::string synth_emotions;
    synth->add_option("--out", synth_out, "output directory");
    synth->add_option("--seed", synth_cfg.seed, "generator seed");
    synth->add_option("--per-emotion", synth_cfg.sequences_per_emotion, "sequences per emotion");
    synth->add_option("--emotions", synth_emotions, "comma-separated emotion names");
    synth->add_option("--noise-sigma", synth_cfg.noise_sigma, "pixel noise std-dev");
    synth->add_option("--gain", synth_cfg.deformation_gain, "deformation gain");
    synth->add_option("--canonical-size", synth_cfg.width, "face side length");
    synth->add_option("--frames", synth_cfg.frames, "frames per sequence (L)");
    std::string synth_config_file;
    synth->add_option("--config", synth_config_file, "key=value config file (keys match the flags)");

    // split
    auto* split = app.add_subcommand("split", "stratified train/test split of a manifest");
    std::string split_manifest, split_out_train = "train.csv", split_out_test = "test.csv";
    double split_fraction = 0.4;
    uint64_t split_seed = 7;
    int split_frames = 8;
    split->add_option("--manifest", split_manifest, "input manifest")->required();
    split->add_option("--train-fraction", split_fraction, "fraction per class for training");
    split->add_option("--seed", split_seed, "shuffle seed");
    split->add_option("--out-train", split_out_train, "output training manifest");
    split->add_option("--out-test", split_out_test, "output test manifest");
    split->add_option("--frames", split_frames, "frames per sequence (L)");

    // train
    auto* train = app.add_subcommand("train", "train a model from a labeled manifest");
    std::string train_manifest, train_model = "model.txt", train_centering = "on";
    TrainOptions train_opts;
    train->add_option("--manifest", train_manifest, "training manifest")->required();
    train->add_option("--model", train_model, "output model file");
    train->add_option("--k", train_opts.k, "requested eigenface count");
    train->add_option("--d", train_opts.d, "discriminating direction count");
    train->add_option("--frames", train_opts.sequence_length, "frames per sequence (L)");
    train->add_option("--canonical-size", train_opts.canonical_width, "canonical face side");
    train->add_option("--centering", train_centering, "mean-center before projection (on|off)")
        ->check(CLI::IsMember({"on", "off"}));

    // classify
    auto* classify_cmd = app.add_subcommand("classify", "classify sequences against a model");
    std::string cls_model, cls_manifest;
    std::vector<std::string> cls_frames;
    classify_cmd->add_option("--model", cls_model, "model file")->required();
    classify_cmd->add_option("--manifest", cls_manifest, "manifest of sequences to classify");
    classify_cmd->add_option("--frames", cls_frames,
                             "L canonical-size frame paths (alternative to --manifest)");

    // evaluate
    auto* evaluate_cmd = app.add_subcommand("evaluate", "confusion matrix over a test manifest");
    std::string eval_model, eval_manifest, eval_report = "text", eval_out;
    evaluate_cmd->add_option("--model", eval_model, "model file")->required();
    evaluate_cmd->add_option("--manifest", eval_manifest, "test manifest")->required();
    evaluate_cmd->add_option("--report", eval_report, "stdout report format")
        ->check(CLI::IsMember({"text", "csv"}));
    evaluate_cmd->add_option("--out", eval_out, "also write CSV report to this path");

    // train-detector
    auto* traindet = app.add_subcommand("train-detector", "AdaBoost stump ensemble from window dirs");
    std::string det_pos, det_neg, det_model = "detector.txt";
    int det_rounds = 10;
    traindet->add_option("--positives", det_pos, "directory of positive PGM windows")->required();
    traindet->add_option("--negatives", det_neg, "directory of negative PGM windows")->required();
    traindet->add_option("--rounds", det_rounds, "boosting rounds (T)");
    traindet->add_option("--model", det_model, "output model file");

    // detect
    auto* detect_cmd = app.add_subcommand("detect", "sliding-window detection with a stump model");
    std::string detect_model, detect_image, detect_scales = "1.0";
    int detect_stride = 1;
    detect_cmd->add_option("--model", detect_model, "model file with a stump block")->required();
    detect_cmd->add_option("--image", detect_image, "PGM image to scan")->required();
    detect_cmd->add_option("--stride", detect_stride, "window stride in pixels");
    detect_cmd->add_option("--scales", detect_scales, "comma-separated scale factors");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (synth->parsed()) {
            if (!synth_config_file.empty())
                apply_synth_config_file(synth_config_file, synth, synth_cfg, synth_out,
                                        synth_emotions);
            if (!synth_emotions.empty()) synth_cfg.emotions = split_commas(synth_emotions);
            synth_cfg.height = synth_cfg.width;
            return cmd_synth(synth_cfg, synth_out);
        }
        if (split->parsed())
            return cmd_split(split_manifest, split_fraction, split_seed, split_out_train,
                             split_out_test, split_frames);
        if (train->parsed()) {
            train_opts.canonical_height = train_opts.canonical_width;
            train_opts.centering = (train_centering == "on");
            return cmd_train(train_manifest, train_model, train_opts);
        }
        if (classify_cmd->parsed()) {
            if (cls_manifest.empty() && cls_frames.empty())
                fail(ErrorCode::InvalidArgument, "classify needs --manifest or --frames");
            return cmd_classify(cls_model, cls_manifest, cls_frames);
        }
        if (evaluate_cmd->parsed())
            return cmd_evaluate(eval_model, eval_manifest, eval_report, eval_out);
        if (traindet->parsed())
            return cmd_train_detector(det_pos, det_neg, det_rounds, det_model);
        if (detect_cmd->parsed())
            return cmd_detect(detect_model, detect_image, detect_stride, detect_scales);
    } catch (const Error& e) {
        std::cerr << "error [" << error_name(e.code()) << "]: " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
