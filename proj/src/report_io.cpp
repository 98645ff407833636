#include "turtleid/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "turtleid/error.hpp"

namespace turtleid {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

const char* fold_mode_name(FoldMode m) {
    return m == FoldMode::LeaveOneOut ? "leave_one_out" : "k_fold";
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write: " + path.string());
    out << text;
    if (!out) throw Error("write failed: " + path.string());
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

}  // namespace

nlohmann::ordered_json report_to_json(const EvalReport& report) {
    nlohmann::ordered_json j;

    nlohmann::ordered_json cfg;
    cfg["fold_mode"] = fold_mode_name(report.config.fold_mode);
    cfg["k"] = report.config.k;
    cfg["seed"] = report.config.seed;
    cfg["thresholds"] = report.config.thresholds;
    cfg["operating_threshold"] = report.config.operating_threshold;
    // jobs is an execution knob, not an experiment parameter: reports
    // must be byte-identical for any worker count
    j["config"] = cfg;

    j["classes"] = report.classes;

    nlohmann::ordered_json sweep = nlohmann::ordered_json::array();
    for (const auto& tr : report.sweep) {
        nlohmann::ordered_json row;
        row["threshold"] = tr.threshold;
        row["tp"] = tr.counts.tp;
        row["fp"] = tr.counts.fp;
        row["tn"] = tr.counts.tn;
        row["fn"] = tr.counts.fn;
        row["tpr"] = tr.rates.tpr;
        row["fpr"] = tr.rates.fpr;
        row["tpr_degenerate"] = tr.rates.tpr_degenerate;
        row["fpr_degenerate"] = tr.rates.fpr_degenerate;
        sweep.push_back(std::move(row));
    }
    j["sweep"] = sweep;
    j["auc"] = report.auc;

    nlohmann::ordered_json cm;
    cm["classes"] = report.confusion.classes;
    cm["counts"] = report.confusion.counts;
    cm["row_totals"] = report.confusion.row_totals;
    cm["proportions"] = report.confusion.proportions;
    j["confusion"] = cm;

    j["macro_accuracy"] = report.macro_accuracy;
    j["micro_accuracy"] = report.micro_accuracy;
    j["random_guess_baseline"] = report.chance_level;

    nlohmann::ordered_json queries = nlohmann::ordered_json::array();
    std::vector<std::string> flagged;
    for (const auto& q : report.queries) {
        nlohmann::ordered_json row;
        row["sample_id"] = q.sample_id;
        row["true_class"] = q.true_class;
        row["best"] = q.score.best.sample_id;
        row["best_class"] = q.score.best.class_label;
        row["second"] = q.score.second.sample_id;
        row["omega_top"] = q.score.omega_top;
        row["omega_2nd"] = q.score.omega_2nd;
        row["beta"] = q.score.beta;
        row["decision"] = to_string(q.decision.kind);
        row["many_reason"] = to_string(q.decision.reason);
        row["outcome"] = to_string(q.result);
        row["no_same_class_in_gallery"] = q.no_same_class_in_gallery;
        queries.push_back(std::move(row));
        if (q.no_same_class_in_gallery) flagged.push_back(q.sample_id);
    }
    j["queries"] = queries;
    j["queries_without_same_class_in_gallery"] = flagged;
    return j;
}

std::string roc_csv(const EvalReport& report) {
    std::string out = "threshold,tp,fp,tn,fn,tpr,fpr\n";
    for (const auto& tr : report.sweep) {
        out += fmt(tr.threshold) + ',' + std::to_string(tr.counts.tp) + ',' +
               std::to_string(tr.counts.fp) + ',' + std::to_string(tr.counts.tn) + ',' +
               std::to_string(tr.counts.fn) + ',' + fmt(tr.rates.tpr) + ',' + fmt(tr.rates.fpr) +
               '\n';
    }
    return out;
}

std::string confusion_csv(const ConfusionMatrix& cm) {
    std::string out = "actual";
    for (const auto& c : cm.classes) out += ',' + c;
    out += ",MANY\n";
    for (std::size_t r = 0; r < cm.classes.size(); ++r) {
        out += cm.classes[r];
        for (std::size_t c = 0; c <= cm.classes.size(); ++c) out += ',' + fmt(cm.proportions[r][c]);
        out += '\n';
    }
    return out;
}

ConfusionMatrix read_confusion_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile(path.string());

    std::string line;
    if (!std::getline(in, line)) throw DecodeError("confusion csv: empty file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split_csv_line(line);
    if (header.size() < 3 || header.front() != "actual" || header.back() != "MANY")
        throw DecodeError("confusion csv: bad header: " + path.string());
    std::vector<std::string> classes(header.begin() + 1, header.end() - 1);

    std::vector<std::vector<double>> proportions;
    int row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != classes.size() + 2)
            throw DecodeError("confusion csv: row " + std::to_string(row) + " has " +
                              std::to_string(fields.size()) + " fields");
        if (fields[0] != classes[static_cast<std::size_t>(row)])
            throw DecodeError("confusion csv: row label mismatch: " + fields[0]);
        std::vector<double> p;
        for (std::size_t i = 1; i < fields.size(); ++i) p.push_back(std::stod(fields[i]));
        proportions.push_back(std::move(p));
        ++row;
    }
    return confusion_from_proportions(std::move(classes), std::move(proportions));
}

void write_report_files(const EvalReport& report, const nlohmann::ordered_json& config_extra,
                        const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    nlohmann::ordered_json j = report_to_json(report);
    if (!config_extra.is_null())
        for (auto& [key, value] : config_extra.items()) j["config"][key] = value;

    // partial outputs from this run disappear if any write fails
    std::vector<std::pair<std::filesystem::path, std::string>> files = {
        {out_dir / "report.json", j.dump(2) + "\n"},
        {out_dir / "roc.csv", roc_csv(report)},
        {out_dir / "confusion.csv", confusion_csv(report.confusion)},
    };
    std::vector<std::filesystem::path> touched;
    try {
        for (const auto& [path, content] : files) {
            touched.push_back(path);
            write_text_file(path, content);
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& p : touched) std::filesystem::remove(p, ec);
        throw;
    }
}

}  // namespace turtleid
