#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "turtleid/evaluation.hpp"

#include "json.hpp"

namespace turtleid {

// The report echoes every config field so a run is reproducible from its
// own output. Serialization is deterministic: same report, same bytes.
nlohmann::ordered_json report_to_json(const EvalReport& report);

std::string roc_csv(const EvalReport& report);        // threshold,tp,fp,tn,fn,tpr,fpr
std::string confusion_csv(const ConfusionMatrix& cm); // actual,<classes...>,MANY

ConfusionMatrix read_confusion_csv(const std::filesystem::path& path);

// Writes report.json, roc.csv and confusion.csv under out_dir. Partial
// outputs from this run are removed if any write fails.
void write_report_files(const EvalReport& report, const nlohmann::ordered_json& config_extra,
                        const std::filesystem::path& out_dir);

}  // namespace turtleid
