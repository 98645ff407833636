#include "turtleid/nndr.hpp"

#include <cmath>

#include "turtleid/error.hpp"

namespace turtleid {

namespace {

constexpr double kTieRelTolerance = 1e-9;

std::vector<double> gallery_distances(const HogDescriptor& query,
                                      const std::vector<GalleryEntry>& gallery) {
    std::vector<double> distances;
    distances.reserve(gallery.size());
    for (const auto& e : gallery) distances.push_back(hog_distance(query, e.descriptor));
    return distances;
}

std::vector<SampleKey> gallery_keys(const std::vector<GalleryEntry>& gallery) {
    std::vector<SampleKey> keys;
    keys.reserve(gallery.size());
    for (const auto& e : gallery) keys.push_back({e.sample_id, e.class_label});
    return keys;
}

}  // namespace

void OutcomeCounts::add(Outcome o) {
    switch (o) {
        case Outcome::TP: ++tp; break;
        case Outcome::FP: ++fp; break;
        case Outcome::TN: ++tn; break;
        case Outcome::FN: ++fn; break;
    }
}

NndrScore nndr_score(const std::vector<double>& distances, const std::vector<SampleKey>& keys) {
    if (distances.size() != keys.size()) throw LengthMismatch("distances and keys differ in size");
    if (distances.size() < 2)
        throw GalleryTooSmall("gallery must hold at least 2 entries, got " +
                              std::to_string(distances.size()));

    // best and second-best by (distance, sample_id); the id tie-break
    // makes the result independent of gallery order
    auto less = [&](std::size_t a, std::size_t b) {
        if (distances[a] != distances[b]) return distances[a] < distances[b];
        return keys[a].sample_id < keys[b].sample_id;
    };
    std::size_t best = 0;
    for (std::size_t i = 1; i < distances.size(); ++i)
        if (less(i, best)) best = i;
    std::size_t second = best == 0 ? 1 : 0;
    for (std::size_t i = 0; i < distances.size(); ++i) {
        if (i == best) continue;
        if (less(i, second)) second = i;
    }

    NndrScore score;
    score.best = keys[best];
    score.second = keys[second];
    score.omega_top = distances[best];
    score.omega_2nd = distances[second];
    score.beta = score.omega_2nd > 0.0 ? score.omega_top / score.omega_2nd : 0.0;
    return score;
}

NndrScore nndr_score(const HogDescriptor& query, const std::vector<GalleryEntry>& gallery) {
    return nndr_score(gallery_distances(query, gallery), gallery_keys(gallery));
}

bool class_tie_at_top(const std::vector<double>& distances, const std::vector<SampleKey>& keys,
                      const NndrScore& score) {
    double tol = kTieRelTolerance * score.omega_top;
    for (std::size_t i = 0; i < distances.size(); ++i) {
        if (keys[i].class_label == score.best.class_label) continue;
        if (std::abs(distances[i] - score.omega_top) <= tol) return true;
    }
    return false;
}

MatchDecision decide(const NndrScore& score, bool class_tie, double threshold) {
    MatchDecision d;
    d.score = score;
    if (class_tie) {
        d.kind = DecisionKind::Many;
        d.reason = ManyReason::ClassTie;
    } else if (score.beta <= threshold) {
        d.kind = DecisionKind::Accept;
        d.reason = ManyReason::None;
    } else {
        d.kind = DecisionKind::Many;
        d.reason = ManyReason::RatioAmbiguous;
    }
    return d;
}

MatchDecision classify(const std::vector<double>& distances, const std::vector<SampleKey>& keys,
                       double threshold) {
    NndrScore score = nndr_score(distances, keys);
    return decide(score, class_tie_at_top(distances, keys, score), threshold);
}

MatchDecision classify(const HogDescriptor& query, const std::vector<GalleryEntry>& gallery,
                       double threshold) {
    return classify(gallery_distances(query, gallery), gallery_keys(gallery), threshold);
}

Outcome outcome(const MatchDecision& decision, const std::string& true_class, double threshold) {
    (void)threshold;  // the decision already encodes the beta comparison
    bool best_is_true = decision.score.best.class_label == true_class;
    if (decision.kind == DecisionKind::Accept) return best_is_true ? Outcome::TP : Outcome::FP;
    if (decision.reason == ManyReason::ClassTie) return Outcome::FN;
    return best_is_true ? Outcome::FN : Outcome::TN;
}

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::TP: return "TP";
        case Outcome::FP: return "FP";
        case Outcome::TN: return "TN";
        case Outcome::FN: return "FN";
    }
    return "?";
}

const char* to_string(DecisionKind k) {
    return k == DecisionKind::Accept ? "accept" : "many";
}

const char* to_string(ManyReason r) {
    switch (r) {
        case ManyReason::None: return "none";
        case ManyReason::ClassTie: return "class_tie";
        case ManyReason::RatioAmbiguous: return "ratio_ambiguous";
    }
    return "?";
}

}  // namespace turtleid
