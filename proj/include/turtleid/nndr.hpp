#pragma once

#include <string>
#include <vector>

#include "turtleid/hog.hpp"

namespace turtleid {

struct SampleKey {
    std::string sample_id;
    std::string class_label;

    bool operator==(const SampleKey&) const = default;
};

struct GalleryEntry {
    std::string sample_id;  // unique within a gallery
    std::string class_label;
    HogDescriptor descriptor;
};

// Nearest-neighbour distance ratio: beta = omega_top / omega_2nd, the
// distance to the best match over the distance to the second-best match
// (over a different sample, any class). Ties break on ascending
// sample_id, which makes the result independent of gallery order.
struct NndrScore {
    double beta = 0.0;
    SampleKey best;
    SampleKey second;
    double omega_top = 0.0;
    double omega_2nd = 0.0;
};

enum class DecisionKind { Accept, Many };

// Why a classification landed in MANY: a cross-class tie at omega_top,
// or a ratio the threshold could not separate.
enum class ManyReason { None, ClassTie, RatioAmbiguous };

struct MatchDecision {
    DecisionKind kind = DecisionKind::Many;
    ManyReason reason = ManyReason::None;
    NndrScore score;

    const std::string& accepted_class() const { return score.best.class_label; }
};

enum class Outcome { TP, FP, TN, FN };

struct OutcomeCounts {
    long long tp = 0;
    long long fp = 0;
    long long tn = 0;
    long long fn = 0;

    long long total() const { return tp + fp + tn + fn; }
    void add(Outcome o);
};

// Distance-level API: distances[i] pairs with keys[i]. Requires at least
// two entries (GalleryTooSmall otherwise). beta is 0 when omega_2nd is 0
// (both matches exact).
NndrScore nndr_score(const std::vector<double>& distances, const std::vector<SampleKey>& keys);

// Descriptor-level convenience over a HOG gallery.
NndrScore nndr_score(const HogDescriptor& query, const std::vector<GalleryEntry>& gallery);

// Cross-class ties at omega_top (within 1e-9 relative) classify as Many;
// otherwise Accept iff beta <= threshold, Many if the ratio test fails.
MatchDecision classify(const std::vector<double>& distances, const std::vector<SampleKey>& keys,
                       double threshold);
MatchDecision classify(const HogDescriptor& query, const std::vector<GalleryEntry>& gallery,
                       double threshold);

// True when some entry of a different class than the best match sits
// within 1e-9 relative of omega_top (exact ties only when omega_top is 0).
bool class_tie_at_top(const std::vector<double>& distances, const std::vector<SampleKey>& keys,
                      const NndrScore& score);

// Re-derives the decision at a new threshold from an existing score.
// `class_tie` is the cross-class tie flag computed with the distances.
MatchDecision decide(const NndrScore& score, bool class_tie, double threshold);

// Maps a decision against the true class: Accept -> TP/FP by class
// agreement; a failed ratio test -> FN when the best match had the true
// class, TN otherwise; tie-driven Many -> FN always.
Outcome outcome(const MatchDecision& decision, const std::string& true_class, double threshold);

const char* to_string(Outcome o);
const char* to_string(DecisionKind k);
const char* to_string(ManyReason r);

}  // namespace turtleid
