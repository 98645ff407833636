#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "turtleid/dataset.hpp"
#include "turtleid/hog.hpp"
#include "turtleid/image_io.hpp"
#include "turtleid/keypoint.hpp"
#include "turtleid/pipeline.hpp"
#include "turtleid/report_io.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDataError = 1;
constexpr int kExitConfigError = 2;

struct RunConfig {
    std::string manifest;
    std::string out_dir;
    std::string descriptor = "hog";
    std::string folds = "loo";
    std::string threshold_grid = "0.0:1.0:0.1";
    double operating_threshold = 0.9;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string sample_id;  // describe only

    turtleid::PipelineConfig pipeline;
};

void add_common_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--manifest", cfg.manifest, "Dataset manifest CSV")->required();
    cmd->add_option("--out", cfg.out_dir, "Output directory")->required();
    cmd->add_option("--jobs", cfg.jobs, "Worker parallelism bound")->check(CLI::PositiveNumber);
    cmd->add_option("--smooth-size", cfg.pipeline.smooth_size, "Gaussian kernel side length")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--smooth-sigma", cfg.pipeline.smooth_sigma, "Gaussian sigma")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--window-w", cfg.pipeline.hog.window_w, "Descriptor window width")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--window-h", cfg.pipeline.hog.window_h, "Descriptor window height")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--cell", cfg.pipeline.hog.cell, "Cell side in pixels")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--block", cfg.pipeline.hog.block, "Block side in cells")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--block-stride", cfg.pipeline.hog.block_stride, "Block stride in cells")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--bins", cfg.pipeline.hog.bins, "Orientation bins")
        ->check(CLI::PositiveNumber);
}

void add_descriptor_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--descriptor", cfg.descriptor, "Descriptor kind: hog | keypoint")
        ->check(CLI::IsMember({"hog", "keypoint"}));
    cmd->add_option("--acceptance-threshold", cfg.pipeline.acceptance_threshold,
                    "Keypoint ratio-test acceptance threshold")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--fast-threshold", cfg.pipeline.fast_threshold, "FAST intensity threshold");
    cmd->add_option("--max-keypoints", cfg.pipeline.max_keypoints, "Keypoint budget per image")
        ->check(CLI::PositiveNumber);
}

// Grid spec: either "start:stop:step" or a comma-separated list.
std::vector<double> parse_threshold_grid(const std::string& spec) {
    std::vector<double> grid;
    auto parse_num = [](const std::string& s) {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    };
    if (spec.find(':') != std::string::npos) {
        auto c1 = spec.find(':');
        auto c2 = spec.find(':', c1 + 1);
        if (c2 == std::string::npos) throw std::invalid_argument(spec);
        double start = parse_num(spec.substr(0, c1));
        double stop = parse_num(spec.substr(c1 + 1, c2 - c1 - 1));
        double step = parse_num(spec.substr(c2 + 1));
        if (step <= 0.0 || stop < start) throw std::invalid_argument(spec);
        int count = static_cast<int>(std::lround((stop - start) / step)) + 1;
        for (int i = 0; i < count; ++i) {
            // snap to 10 decimals so the grid reads back cleanly
            double t = std::round((start + i * step) * 1e10) / 1e10;
            if (t > stop + 1e-9) break;
            grid.push_back(t);
        }
    } else {
        std::stringstream ss(spec);
        std::string item;
        while (std::getline(ss, item, ',')) grid.push_back(parse_num(item));
    }
    if (grid.empty()) throw std::invalid_argument(spec);
    for (double t : grid)
        if (t < 0.0 || t > 1.0) throw std::invalid_argument("threshold outside [0, 1]");
    if (!std::is_sorted(grid.begin(), grid.end()))
        throw std::invalid_argument("grid must be ascending");
    return grid;
}

void validate_hog_geometry(const RunConfig& cfg) {
    try {
        turtleid::descriptor_len(cfg.pipeline.hog);
    } catch (const turtleid::IncompatibleGeometry& e) {
        throw std::invalid_argument(e.what());
    }
}

turtleid::EvalConfig make_eval_config(const RunConfig& cfg) {
    turtleid::EvalConfig ec;
    if (cfg.folds == "loo") {
        ec.fold_mode = turtleid::FoldMode::LeaveOneOut;
        ec.k = 0;
    } else {
        ec.fold_mode = turtleid::FoldMode::KFold;
        try {
            std::size_t pos = 0;
            ec.k = std::stoi(cfg.folds, &pos);
            if (pos != cfg.folds.size()) throw std::invalid_argument(cfg.folds);
        } catch (const std::exception&) {
            throw CLI::ValidationError("--folds", "expected 'loo' or an integer k");
        }
    }
    ec.seed = cfg.seed;
    ec.thresholds = parse_threshold_grid(cfg.threshold_grid);
    ec.operating_threshold = cfg.operating_threshold;
    ec.jobs = cfg.jobs;
    return ec;
}

ordered_json pipeline_json(const RunConfig& cfg) {
    ordered_json j;
    j["manifest"] = cfg.manifest;
    j["descriptor"] = cfg.descriptor;
    j["smoothing"] = {{"size", cfg.pipeline.smooth_size}, {"sigma", cfg.pipeline.smooth_sigma}};
    j["hog_params"] = {{"window_w", cfg.pipeline.hog.window_w},
                       {"window_h", cfg.pipeline.hog.window_h},
                       {"cell", cfg.pipeline.hog.cell},
                       {"block", cfg.pipeline.hog.block},
                       {"block_stride", cfg.pipeline.hog.block_stride},
                       {"bins", cfg.pipeline.hog.bins}};
    j["keypoint"] = {{"acceptance_threshold", cfg.pipeline.acceptance_threshold},
                     {"fast_threshold", cfg.pipeline.fast_threshold},
                     {"max_keypoints", cfg.pipeline.max_keypoints}};
    return j;
}

int cmd_preprocess(const RunConfig& cfg) {
    auto records = turtleid::load_manifest(cfg.manifest);
    fs::path roi_dir = fs::path(cfg.out_dir) / "roi";
    fs::create_directories(roi_dir);

    int failures = 0;
    ordered_json samples = ordered_json::array();
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        std::string id = turtleid::make_sample_id(static_cast<int>(i), rec);
        try {
            turtleid::RgbImage img =
                turtleid::load_image(turtleid::resolve_image_path(cfg.manifest, rec.image_path));
            turtleid::GrayImage roi =
                turtleid::preprocess_roi(img, rec.rotation_deg, rec.roi, cfg.pipeline);
            fs::path out = roi_dir / (id + ".pgm");
            turtleid::save_pgm(roi, out);
            samples.push_back({{"sample_id", id},
                               {"individual_id", rec.individual_id},
                               {"image_path", rec.image_path},
                               {"roi_file", out.string()}});
        } catch (const std::exception& e) {
            ++failures;
            std::cerr << "error: row " << i << " (" << rec.image_path << "): " << e.what() << "\n";
        }
    }

    ordered_json prov = pipeline_json(cfg);
    prov["samples"] = samples;
    prov["failures"] = failures;
    std::ofstream out(fs::path(cfg.out_dir) / "preprocess.json");
    out << prov.dump(2) << "\n";

    std::cout << "wrote " << samples.size() << " ROI images to " << roi_dir.string() << "\n";
    return failures == 0 ? kExitOk : kExitDataError;
}

int cmd_evaluate(const RunConfig& cfg) {
    validate_hog_geometry(cfg);
    turtleid::EvalConfig ec = make_eval_config(cfg);
    turtleid::PipelineConfig pc = cfg.pipeline;
    pc.kind = cfg.descriptor == "hog" ? turtleid::DescriptorKind::Hog
                                      : turtleid::DescriptorKind::Keypoint;

    turtleid::PreprocessedDataset ds = turtleid::load_and_preprocess(cfg.manifest, pc, cfg.jobs);
    turtleid::DistanceMatrix dm = turtleid::build_distance_matrix(ds.rois, ds.keys, pc, cfg.jobs);
    turtleid::EvalReport report = turtleid::run_evaluation(dm, ec);

    turtleid::write_report_files(report, pipeline_json(cfg), cfg.out_dir);

    std::printf("operating_threshold %.3f\n", ec.operating_threshold);
    std::printf("macro_accuracy %.4f\n", report.macro_accuracy);
    return kExitOk;
}

int cmd_describe(const RunConfig& cfg) {
    if (cfg.descriptor == "hog") validate_hog_geometry(cfg);
    auto records = turtleid::load_manifest(cfg.manifest);
    int index = -1;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (turtleid::make_sample_id(static_cast<int>(i), records[i]) == cfg.sample_id) {
            index = static_cast<int>(i);
            break;
        }
    if (index < 0) throw turtleid::UnknownSample(cfg.sample_id);

    const auto& rec = records[static_cast<std::size_t>(index)];
    turtleid::RgbImage img =
        turtleid::load_image(turtleid::resolve_image_path(cfg.manifest, rec.image_path));
    turtleid::GrayImage roi = turtleid::preprocess_roi(img, rec.rotation_deg, rec.roi, cfg.pipeline);

    fs::path desc_dir = fs::path(cfg.out_dir) / "descriptors";
    fs::create_directories(desc_dir);

    if (cfg.descriptor == "hog") {
        turtleid::HogDescriptor desc = turtleid::compute_hog(roi, cfg.pipeline.hog);
        turtleid::save_descriptor(desc, desc_dir / (cfg.sample_id + ".hogf"));
        std::ofstream out(desc_dir / (cfg.sample_id + ".json"));
        out << turtleid::descriptor_to_json(desc).dump(2) << "\n";

        int block_len = cfg.pipeline.hog.block * cfg.pipeline.hog.block * cfg.pipeline.hog.bins;
        double min_n = 1e300, max_n = 0.0, sum_n = 0.0;
        int blocks = static_cast<int>(desc.values.size()) / block_len;
        for (int b = 0; b < blocks; ++b) {
            double e = 0.0;
            for (int i = 0; i < block_len; ++i) {
                double v = desc.values[static_cast<std::size_t>(b * block_len + i)];
                e += v * v;
            }
            double n = std::sqrt(e);
            min_n = std::min(min_n, n);
            max_n = std::max(max_n, n);
            sum_n += n;
        }
        std::printf("descriptor length %zu\n", desc.values.size());
        std::printf("block norms min %.6f mean %.6f max %.6f\n", min_n,
                    blocks > 0 ? sum_n / blocks : 0.0, max_n);
        if (max_n == 0.0) std::printf("note: all-zero descriptor (constant image)\n");
    } else {
        turtleid::Kernel k = turtleid::gaussian_kernel(cfg.pipeline.smooth_size, cfg.pipeline.smooth_sigma);
        turtleid::GrayImage smoothed = turtleid::gaussian_smooth(roi, k);
        auto kps = turtleid::detect_fast(smoothed, cfg.pipeline.fast_threshold,
                                         cfg.pipeline.max_keypoints);
        ordered_json j;
        j["sample_id"] = cfg.sample_id;
        j["keypoints"] = ordered_json::array();
        for (const auto& kp : kps) {
            turtleid::BinaryDescriptor d = turtleid::describe_brief(smoothed, kp);
            char hex[4 * 16 + 1] = {};
            for (int w = 0; w < 4; ++w)
                std::snprintf(hex + w * 16, 17, "%016llx",
                              static_cast<unsigned long long>(d.bits[static_cast<std::size_t>(w)]));
            j["keypoints"].push_back({{"x", kp.x},
                                      {"y", kp.y},
                                      {"response", kp.response},
                                      {"orientation", kp.orientation},
                                      {"descriptor_hex", hex}});
        }
        std::ofstream out(desc_dir / (cfg.sample_id + ".json"));
        out << j.dump(2) << "\n";
        std::printf("%zu keypoints\n", kps.size());
        if (kps.empty()) std::printf("note: no keypoints detected\n");
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sea turtle carapace re-identification: HOG/NNDR matching and evaluation"};
    app.require_subcommand(1);

    RunConfig cfg;

    CLI::App* pre = app.add_subcommand("preprocess", "Cache preprocessed 96x128 ROIs as PGM");
    add_common_options(pre, cfg);

    CLI::App* desc = app.add_subcommand("describe", "Dump one sample's descriptor");
    add_common_options(desc, cfg);
    add_descriptor_options(desc, cfg);
    desc->add_option("--sample", cfg.sample_id, "Sample id (see preprocess.json)")->required();

    CLI::App* eval = app.add_subcommand("evaluate", "Cross-validated NNDR evaluation");
    add_common_options(eval, cfg);
    add_descriptor_options(eval, cfg);
    eval->add_option("--folds", cfg.folds, "'loo' or an integer fold count");
    eval->add_option("--threshold-grid", cfg.threshold_grid,
                     "start:stop:step or comma-separated values in [0, 1]");
    eval->add_option("--operating-threshold", cfg.operating_threshold,
                     "Threshold for the confusion matrix")
        ->check(CLI::Range(0.0, 1.0));
    eval->add_option("--seed", cfg.seed, "Fold shuffle seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfigError;
    }

    try {
        if (pre->parsed()) return cmd_preprocess(cfg);
        if (desc->parsed()) return cmd_describe(cfg);
        return cmd_evaluate(cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const CLI::Error& e) {
        std::cerr << "config error: " << e.get_name() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataError;
    }
}
