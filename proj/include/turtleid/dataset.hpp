#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "turtleid/error.hpp"
#include "turtleid/image.hpp"

namespace turtleid {

// Region of interest in the rotated image frame. Full bounds checking
// happens at crop time, when the rotated extent is known.
struct RoiRect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool operator==(const RoiRect&) const = default;
};

// One dataset entry: where the image lives, who it shows, and how to
// bring the carapace upright.
struct SampleRecord {
    std::string image_path;    // as written in the manifest
    std::string individual_id; // class label, e.g. "turtle_01"
    double rotation_deg = 0.0; // counterclockwise, applied before the ROI
    RoiRect roi;

    bool operator==(const SampleRecord&) const = default;
};

struct DatasetStats {
    std::map<std::string, int> per_class;
    int total = 0;
};

// Manifest format: UTF-8 CSV with header
//   image_path,individual_id,rotation_deg,roi_x,roi_y,roi_w,roi_h
// '#'-prefixed comment lines and blank lines are ignored.
std::vector<SampleRecord> load_manifest(const std::filesystem::path& path);
void write_manifest(const std::vector<SampleRecord>& records, const std::filesystem::path& path);

DatasetStats dataset_stats(const std::vector<SampleRecord>& records);

// Manifest paths are resolved relative to the manifest file's directory;
// absolute paths pass through.
std::filesystem::path resolve_image_path(const std::filesystem::path& manifest_path,
                                         const std::string& image_path);

// Stable per-row identifier: zero-padded row index plus a sanitized
// filename stem, e.g. "003_t05b". Unique by construction.
std::string make_sample_id(int row_index, const SampleRecord& record);

}  // namespace turtleid
