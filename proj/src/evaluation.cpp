#include "turtleid/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "turtleid/error.hpp"

namespace turtleid {

FoldPlan make_folds(int n_samples, FoldMode mode, int k, std::uint64_t seed) {
    if (n_samples < 2)
        throw TooFewSamples("need at least 2 samples, got " + std::to_string(n_samples));

    FoldPlan plan;
    if (mode == FoldMode::LeaveOneOut) {
        plan.test.resize(static_cast<std::size_t>(n_samples));
        plan.train.resize(static_cast<std::size_t>(n_samples));
        for (int i = 0; i < n_samples; ++i) {
            plan.test[static_cast<std::size_t>(i)] = {i};
            auto& train = plan.train[static_cast<std::size_t>(i)];
            train.reserve(static_cast<std::size_t>(n_samples) - 1);
            for (int j = 0; j < n_samples; ++j)
                if (j != i) train.push_back(j);
        }
        return plan;
    }

    if (k < 2 || k > n_samples)
        throw TooFewSamples("k must be in [2, n_samples], got k=" + std::to_string(k) +
                            " for n=" + std::to_string(n_samples));
    std::vector<int> order(static_cast<std::size_t>(n_samples));
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    int base = n_samples / k, rem = n_samples % k;
    std::size_t pos = 0;
    for (int f = 0; f < k; ++f) {
        std::size_t size = static_cast<std::size_t>(base + (f < rem ? 1 : 0));
        std::vector<int> test(order.begin() + static_cast<std::ptrdiff_t>(pos),
                              order.begin() + static_cast<std::ptrdiff_t>(pos + size));
        pos += size;
        std::sort(test.begin(), test.end());
        std::vector<int> train;
        train.reserve(static_cast<std::size_t>(n_samples) - size);
        std::size_t t = 0;
        for (int i = 0; i < n_samples; ++i) {
            if (t < test.size() && test[t] == i) {
                ++t;
                continue;
            }
            train.push_back(i);
        }
        plan.test.push_back(std::move(test));
        plan.train.push_back(std::move(train));
    }
    return plan;
}

FoldPlan make_folds(const std::vector<SampleRecord>& records, FoldMode mode, int k,
                    std::uint64_t seed) {
    return make_folds(static_cast<int>(records.size()), mode, k, seed);
}

Rates compute_rates(const OutcomeCounts& c) {
    Rates r;
    long long p = c.tp + c.fn;
    long long n = c.fp + c.tn;
    r.tpr_degenerate = p == 0;
    r.fpr_degenerate = n == 0;
    r.tpr = p == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(p);
    r.fpr = n == 0 ? 0.0 : static_cast<double>(c.fp) / static_cast<double>(n);
    return r;
}

namespace {

struct QueryScore {
    int index = 0;
    NndrScore score;
    bool class_tie = false;
    bool no_same_class = false;
};

// Scores every test query of every fold against that fold's gallery.
// Distances are read once; callers re-derive decisions per threshold.
std::vector<QueryScore> score_all_queries(const DistanceMatrix& dm, const FoldPlan& plan) {
    std::vector<QueryScore> out;
    for (std::size_t f = 0; f < plan.fold_count(); ++f) {
        const auto& train = plan.train[f];
        if (train.size() < 2)
            throw GalleryTooSmall("fold " + std::to_string(f) + " trains on " +
                                  std::to_string(train.size()) + " samples; need at least 2");
        std::vector<SampleKey> keys;
        keys.reserve(train.size());
        for (int g : train) keys.push_back(dm.keys[static_cast<std::size_t>(g)]);
        for (int q : plan.test[f]) {
            std::vector<double> distances;
            distances.reserve(train.size());
            for (int g : train) distances.push_back(dm.at(q, g));
            QueryScore qs;
            qs.index = q;
            qs.score = nndr_score(distances, keys);
            qs.class_tie = class_tie_at_top(distances, keys, qs.score);
            const std::string& true_class = dm.keys[static_cast<std::size_t>(q)].class_label;
            qs.no_same_class = std::none_of(keys.begin(), keys.end(), [&](const SampleKey& k) {
                return k.class_label == true_class;
            });
            out.push_back(std::move(qs));
        }
    }
    return out;
}

}  // namespace

std::vector<ThresholdResult> sweep_thresholds(const DistanceMatrix& dm, const FoldPlan& plan,
                                              const std::vector<double>& thresholds) {
    if (!std::is_sorted(thresholds.begin(), thresholds.end()))
        throw Error("threshold grid must be sorted ascending");
    std::vector<QueryScore> queries = score_all_queries(dm, plan);

    std::vector<ThresholdResult> results(thresholds.size());
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
        results[t].threshold = thresholds[t];
        for (const auto& qs : queries) {
            MatchDecision d = decide(qs.score, qs.class_tie, thresholds[t]);
            results[t].counts.add(
                outcome(d, dm.keys[static_cast<std::size_t>(qs.index)].class_label, thresholds[t]));
        }
        results[t].rates = compute_rates(results[t].counts);
    }
    return results;
}

ConfusionMatrix build_confusion(
    const std::vector<std::string>& classes,
    const std::vector<std::pair<std::string, MatchDecision>>& decisions) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < classes.size(); ++i) index[classes[i]] = i;

    std::size_t n = classes.size();
    ConfusionMatrix cm;
    cm.classes = classes;
    cm.counts.assign(n, std::vector<long long>(n + 1, 0));
    cm.row_totals.assign(n, 0);

    for (const auto& [true_class, decision] : decisions) {
        auto row = index.find(true_class);
        if (row == index.end()) throw UnknownClass(true_class);
        std::size_t col = n;  // MANY
        if (decision.kind == DecisionKind::Accept) {
            auto it = index.find(decision.accepted_class());
            if (it == index.end()) throw UnknownClass(decision.accepted_class());
            col = it->second;
        }
        ++cm.counts[row->second][col];
        ++cm.row_totals[row->second];
    }

    cm.proportions.assign(n, std::vector<double>(n + 1, 0.0));
    cm.empty_rows.assign(n, false);
    for (std::size_t r = 0; r < n; ++r) {
        if (cm.row_totals[r] == 0) {
            cm.empty_rows[r] = true;
            continue;
        }
        for (std::size_t c = 0; c <= n; ++c)
            cm.proportions[r][c] =
                static_cast<double>(cm.counts[r][c]) / static_cast<double>(cm.row_totals[r]);
    }
    return cm;
}

ConfusionMatrix confusion_from_proportions(std::vector<std::string> classes,
                                           std::vector<std::vector<double>> proportions) {
    if (proportions.size() != classes.size())
        throw Error("proportions row count does not match class count");
    for (const auto& row : proportions)
        if (row.size() != classes.size() + 1)
            throw Error("each proportions row needs n_classes + 1 columns (MANY last)");
    ConfusionMatrix cm;
    cm.classes = std::move(classes);
    cm.proportions = std::move(proportions);
    cm.row_totals.assign(cm.classes.size(), -1);
    cm.empty_rows.assign(cm.classes.size(), false);
    return cm;
}

double average_accuracy(const ConfusionMatrix& cm) {
    if (cm.classes.empty()) throw EmptyRow("confusion matrix has no classes");
    double sum = 0.0;
    for (std::size_t r = 0; r < cm.classes.size(); ++r) {
        if (cm.empty_rows[r])
            throw EmptyRow("class '" + cm.classes[r] + "' has no samples");
        sum += cm.proportions[r][r];
    }
    return sum / static_cast<double>(cm.classes.size());
}

double micro_accuracy(const ConfusionMatrix& cm) {
    if (cm.counts.empty()) throw Error("micro accuracy needs a count-backed confusion matrix");
    long long correct = 0, total = 0;
    for (std::size_t r = 0; r < cm.classes.size(); ++r) {
        correct += cm.counts[r][r];
        total += cm.row_totals[r];
    }
    if (total == 0) throw EmptyRow("confusion matrix holds no samples");
    return static_cast<double>(correct) / static_cast<double>(total);
}

double random_guess_baseline(int n_classes) {
    if (n_classes < 1) throw Error("need at least one class");
    return 1.0 / n_classes;
}

double roc_auc(std::vector<RocPoint> points) {
    points.push_back({0.0, 0.0, 0.0});
    points.push_back({1.0, 1.0, 1.0});
    std::sort(points.begin(), points.end(), [](const RocPoint& a, const RocPoint& b) {
        if (a.fpr != b.fpr) return a.fpr < b.fpr;
        return a.tpr < b.tpr;
    });
    double area = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
        area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) * 0.5;
    return area;
}

std::vector<double> EvalConfig::default_threshold_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
    return grid;
}

EvalReport run_evaluation(const DistanceMatrix& dm, const EvalConfig& config) {
    if (config.operating_threshold < 0.0 || config.operating_threshold > 1.0)
        throw Error("operating threshold must be in [0, 1]");

    EvalReport report;
    report.config = config;

    std::vector<std::string> classes;
    for (const auto& k : dm.keys) classes.push_back(k.class_label);
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    report.classes = classes;

    FoldPlan plan = make_folds(dm.size(), config.fold_mode, config.k, config.seed);
    report.sweep = sweep_thresholds(dm, plan, config.thresholds);

    std::vector<RocPoint> roc;
    for (const auto& tr : report.sweep)
        roc.push_back({tr.threshold, tr.rates.tpr, tr.rates.fpr});
    report.auc = roc_auc(roc);

    // per-query decisions at the operating threshold
    std::vector<std::pair<std::string, MatchDecision>> decisions;
    for (const auto& qs : score_all_queries(dm, plan)) {
        const SampleKey& key = dm.keys[static_cast<std::size_t>(qs.index)];
        QueryResult qr;
        qr.sample_id = key.sample_id;
        qr.true_class = key.class_label;
        qr.score = qs.score;
        qr.decision = decide(qs.score, qs.class_tie, config.operating_threshold);
        qr.result = outcome(qr.decision, key.class_label, config.operating_threshold);
        qr.no_same_class_in_gallery = qs.no_same_class;
        decisions.emplace_back(qr.true_class, qr.decision);
        report.queries.push_back(std::move(qr));
    }
    // queries come out in fold order; report them in sample order
    std::sort(report.queries.begin(), report.queries.end(),
              [](const QueryResult& a, const QueryResult& b) { return a.sample_id < b.sample_id; });

    report.confusion = build_confusion(classes, decisions);
    report.macro_accuracy = average_accuracy(report.confusion);
    report.micro_accuracy = micro_accuracy(report.confusion);
    report.chance_level = random_guess_baseline(static_cast<int>(classes.size()));
    return report;
}

}  // namespace turtleid
