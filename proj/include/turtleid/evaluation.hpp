#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "turtleid/dataset.hpp"
#include "turtleid/nndr.hpp"

namespace turtleid {

enum class FoldMode { LeaveOneOut, KFold };

// Every sample appears in exactly one test set; test and train are
// disjoint within each fold. Entries are indices into the sample list.
struct FoldPlan {
    std::vector<std::vector<int>> test;
    std::vector<std::vector<int>> train;

    std::size_t fold_count() const { return test.size(); }
};

FoldPlan make_folds(int n_samples, FoldMode mode, int k, std::uint64_t seed);
FoldPlan make_folds(const std::vector<SampleRecord>& records, FoldMode mode, int k,
                    std::uint64_t seed);

struct Rates {
    double tpr = 0.0;
    double fpr = 0.0;
    bool tpr_degenerate = false;  // 0/0, reported as 0
    bool fpr_degenerate = false;
};

Rates compute_rates(const OutcomeCounts& counts);

struct RocPoint {
    double threshold = 0.0;
    double tpr = 0.0;
    double fpr = 0.0;
};

// Precomputed pairwise distances between all samples: the descriptor
// cache and gallery builder rolled into one. d(q, g) need not be
// symmetric (the keypoint score is not).
struct DistanceMatrix {
    std::vector<SampleKey> keys;
    std::vector<double> d;  // n*n, row-major (query, gallery)

    int size() const { return static_cast<int>(keys.size()); }
    double at(int q, int g) const { return d[static_cast<std::size_t>(q) * keys.size() + g]; }
    double& at(int q, int g) { return d[static_cast<std::size_t>(q) * keys.size() + g]; }
};

struct ThresholdResult {
    double threshold = 0.0;
    OutcomeCounts counts;
    Rates rates;
};

// Classifies every fold's test queries against that fold's training
// gallery; distances come from the matrix, decisions are re-derived per
// threshold. Thresholds must be sorted ascending.
std::vector<ThresholdResult> sweep_thresholds(const DistanceMatrix& dm, const FoldPlan& plan,
                                              const std::vector<double>& thresholds);

// Row = actual class, column = accepted class, last column = MANY.
// Proportions are row-normalized; rows with no samples are all-zero and
// flagged. `row_totals` is -1 per row when built from proportions only.
struct ConfusionMatrix {
    std::vector<std::string> classes;
    std::vector<std::vector<long long>> counts;    // n x (n+1); empty if proportions-only
    std::vector<long long> row_totals;
    std::vector<std::vector<double>> proportions;  // n x (n+1)
    std::vector<bool> empty_rows;
};

ConfusionMatrix build_confusion(const std::vector<std::string>& classes,
                                const std::vector<std::pair<std::string, MatchDecision>>& decisions);
ConfusionMatrix confusion_from_proportions(std::vector<std::string> classes,
                                           std::vector<std::vector<double>> proportions);

// Macro accuracy: unweighted mean of the row-normalized diagonal.
double average_accuracy(const ConfusionMatrix& cm);

// Micro accuracy over raw counts; requires a count-backed matrix.
double micro_accuracy(const ConfusionMatrix& cm);

double random_guess_baseline(int n_classes);

// Trapezoidal area with (0,0) and (1,1) anchors added.
double roc_auc(std::vector<RocPoint> points);

struct EvalConfig {
    FoldMode fold_mode = FoldMode::LeaveOneOut;
    int k = 0;  // used for FoldMode::KFold
    std::uint64_t seed = 0;
    std::vector<double> thresholds = default_threshold_grid();
    double operating_threshold = 0.9;
    int jobs = 1;

    static std::vector<double> default_threshold_grid();  // 0.0, 0.1, ..., 1.0
};

// One row per test query, evaluated at the operating threshold.
struct QueryResult {
    std::string sample_id;
    std::string true_class;
    NndrScore score;
    MatchDecision decision;
    Outcome result = Outcome::FN;
    // True when the fold's training gallery held no sample of the true
    // class (single-sample classes under leave-one-out); such queries
    // cannot produce a TP and are flagged in the report.
    bool no_same_class_in_gallery = false;
};

struct EvalReport {
    EvalConfig config;
    std::vector<std::string> classes;
    std::vector<ThresholdResult> sweep;
    double auc = 0.0;
    ConfusionMatrix confusion;  // at the operating threshold
    double macro_accuracy = 0.0;
    double micro_accuracy = 0.0;
    double chance_level = 0.0;
    std::vector<QueryResult> queries;
};

EvalReport run_evaluation(const DistanceMatrix& dm, const EvalConfig& config);

}  // namespace turtleid
