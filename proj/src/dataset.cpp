#include "turtleid/dataset.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace turtleid {

namespace {

const char* kHeader = "image_path,individual_id,rotation_deg,roi_x,roi_y,roi_w,roi_h";

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

int parse_int(const std::string& s, int line_no, const char* what) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw ParseError(line_no, std::string("bad integer for ") + what + ": '" + s + "'");
    return v;
}

double parse_double(const std::string& s, int line_no, const char* what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line_no, std::string("bad number for ") + what + ": '" + s + "'");
    }
}

}  // namespace

std::vector<SampleRecord> load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile(path.string());

    std::vector<SampleRecord> records;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (!header_seen) {
            if (t != kHeader) throw ParseError(line_no, std::string("expected header '") + kHeader + "'");
            header_seen = true;
            continue;
        }
        auto fields = split_csv(t);
        if (fields.size() != 7)
            throw ParseError(line_no, "expected 7 fields, got " + std::to_string(fields.size()));

        SampleRecord rec;
        rec.image_path = fields[0];
        rec.individual_id = fields[1];
        if (rec.image_path.empty()) throw ParseError(line_no, "empty image_path");
        if (rec.individual_id.empty()) throw ParseError(line_no, "empty individual_id");
        rec.rotation_deg = parse_double(fields[2], line_no, "rotation_deg");
        if (!std::isfinite(rec.rotation_deg)) throw ParseError(line_no, "rotation_deg not finite");
        rec.roi.x = parse_int(fields[3], line_no, "roi_x");
        rec.roi.y = parse_int(fields[4], line_no, "roi_y");
        rec.roi.w = parse_int(fields[5], line_no, "roi_w");
        rec.roi.h = parse_int(fields[6], line_no, "roi_h");
        if (rec.roi.w < 1 || rec.roi.h < 1 || rec.roi.x < 0 || rec.roi.y < 0)
            throw InvalidRoi(line_no);
        records.push_back(std::move(rec));
    }
    return records;
}

void write_manifest(const std::vector<SampleRecord>& records, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write manifest: " + path.string());
    out << kHeader << '\n';
    for (const auto& r : records) {
        out << r.image_path << ',' << r.individual_id << ',';
        std::ostringstream deg;
        deg.precision(17);
        deg << r.rotation_deg;
        out << deg.str() << ',' << r.roi.x << ',' << r.roi.y << ',' << r.roi.w << ',' << r.roi.h
            << '\n';
    }
    if (!out) throw Error("write failed: " + path.string());
}

DatasetStats dataset_stats(const std::vector<SampleRecord>& records) {
    DatasetStats stats;
    for (const auto& r : records) {
        ++stats.per_class[r.individual_id];
        ++stats.total;
    }
    return stats;
}

std::filesystem::path resolve_image_path(const std::filesystem::path& manifest_path,
                                         const std::string& image_path) {
    std::filesystem::path p(image_path);
    if (p.is_absolute()) return p;
    return manifest_path.parent_path() / p;
}

std::string make_sample_id(int row_index, const SampleRecord& record) {
    std::string stem = std::filesystem::path(record.image_path).stem().string();
    for (char& c : stem)
        if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%03d", row_index);
    return std::string(buf) + "_" + stem;
}

}  // namespace turtleid
