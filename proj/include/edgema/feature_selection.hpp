#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "edgema/dataset.hpp"
#include "edgema/error.hpp"

namespace edgema {

/// Single-feature decision stump: left_class when x[feature] <= threshold.
struct Stump {
    std::size_t feature_index = 0;
    double threshold = 0;
    int left_class = 0;
    int right_class = 0;

    int predict(std::span<const double> x) const {
        return x[feature_index] <= threshold ? left_class : right_class;
    }
    friend bool operator==(const Stump&, const Stump&) = default;
};

struct StumpFit {
    Stump stump;
    double error = 0;
};

namespace detail {

// Errors closer than this count as ties, so that reordering or splitting
// samples (which perturbs float sums) cannot change the chosen stump.
inline constexpr double kStumpTieTolerance = 1e-12;

// Scans one feature whose samples are pre-sorted by value via `order`.
inline StumpFit fit_stump_sorted(std::span<const Sample> samples, std::span<const double> weights,
                                 std::size_t feature, int num_classes, std::span<const std::size_t> order) {
    const std::size_t k = std::size_t(num_classes);
    std::vector<double> total(k, 0.0), left(k, 0.0);
    double total_weight = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        total[std::size_t(samples[i].label)] += weights[i];
        total_weight += weights[i];
    }

    const std::size_t majority = argmax_lowest(total);
    StumpFit best;
    best.stump = {feature, samples[order.front()].x[feature], int(majority), int(majority)};
    best.error = total_weight - total[majority];
    bool found_split = false;

    std::vector<double> right(k);
    for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
        const Sample& s = samples[order[pos]];
        left[std::size_t(s.label)] += weights[order[pos]];
        const double here = s.x[feature];
        const double next = samples[order[pos + 1]].x[feature];
        if (!(here < next)) continue;
        for (std::size_t c = 0; c < k; ++c) right[c] = total[c] - left[c];
        const std::size_t lc = argmax_lowest(left);
        const std::size_t rc = argmax_lowest(right);
        const double err = total_weight - left[lc] - right[rc];
        if (!found_split || err < best.error - kStumpTieTolerance) {
            best.stump = {feature, here + (next - here) / 2, int(lc), int(rc)};
            best.error = std::max(0.0, err);
            found_split = true;
        }
    }
    return best;
}

inline std::vector<std::size_t> sort_by_feature(std::span<const Sample> samples, std::size_t feature) {
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return samples[a].x[feature] < samples[b].x[feature]; });
    return order;
}

}  // namespace detail

/// Best stump on one feature under the given sample weights. The threshold is
/// a midpoint between consecutive distinct values; when every value is equal
/// the stump predicts the weighted majority on both sides.
inline StumpFit fit_stump(std::span<const Sample> samples, std::span<const double> weights,
                          std::size_t feature_index, int num_classes = 0) {
    if (samples.empty()) throw InvalidArgument("fit_stump: no samples");
    if (weights.size() != samples.size()) throw InvalidArgument("fit_stump: weight count mismatch");
    if (feature_index >= samples.front().x.size()) throw InvalidArgument("fit_stump: feature index out of range");
    if (num_classes <= 0) num_classes = infer_class_count(samples);
    const auto order = detail::sort_by_feature(samples, feature_index);
    return detail::fit_stump_sorted(samples, weights, feature_index, num_classes, order);
}

/// S_j per feature.
struct FeatureImportance {
    std::vector<double> scores;
};

enum class ImportanceMode { Alpha, Count };

struct BoostRound {
    Stump stump;
    double alpha = 0;
    double error = 0;
};

struct AdaBoostEnsemble {
    std::vector<BoostRound> rounds;
    FeatureImportance importance;
    int num_classes = 0;
};

/// Per-round view handed to AdaBoostOptions::on_round.
struct BoostTrace {
    std::size_t round = 0;
    const BoostRound* chosen = nullptr;
    std::span<const double> weights_before;  // normalized weights the stump was fit on
    std::span<const double> weights_after;   // after the update, before re-normalization
    std::span<const char> misclassified;     // nonzero where the stump was wrong
};

struct AdaBoostOptions {
    std::size_t rounds = 100;
    ImportanceMode importance_mode = ImportanceMode::Alpha;
    std::function<void(const BoostTrace&)> on_round;
};

/// Multiclass (SAMME) AdaBoost over decision stumps, used here only to score
/// features. Each round normalizes the weights, keeps the single stump with
/// the lowest weighted error across all features, credits that feature with
/// alpha = ln((1-E)/E) + ln(K-1) and multiplies misclassified weights by
/// exp(alpha). Training stops as soon as E >= 1 - 1/K.
inline AdaBoostEnsemble train_adaboost(std::span<const Sample> samples, const AdaBoostOptions& opts = {}) {
    if (samples.empty()) throw InvalidArgument("train_adaboost: empty dataset");
    if (opts.rounds < 1) throw InvalidArgument("train_adaboost: rounds must be >= 1");
    if (distinct_class_count(samples) < 2) throw InvalidArgument("train_adaboost: need at least two classes");
    const std::size_t n = samples.size();
    const std::size_t f = samples.front().x.size();
    for (const auto& s : samples)
        if (s.x.size() != f) throw InvalidArgument("train_adaboost: ragged feature rows");

    AdaBoostEnsemble ens;
    ens.num_classes = infer_class_count(samples);
    ens.importance.scores.assign(f, 0.0);
    const double k = ens.num_classes;
    const double max_error = 1.0 - 1.0 / k;

    std::vector<std::vector<std::size_t>> orders(f);
    for (std::size_t j = 0; j < f; ++j) orders[j] = detail::sort_by_feature(samples, j);

    std::vector<double> w(n, 1.0);
    std::vector<double> before(n);
    std::vector<char> wrong_storage(n);
    for (std::size_t t = 0; t < opts.rounds; ++t) {
        const double sum = std::accumulate(w.begin(), w.end(), 0.0);
        for (auto& v : w) v /= sum;
        before = w;

        StumpFit best;
        best.error = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < f; ++j) {
            auto fit = detail::fit_stump_sorted(samples, w, j, ens.num_classes, orders[j]);
            if (fit.error < best.error - detail::kStumpTieTolerance) best = fit;
        }
        if (best.error >= max_error) break;

        const double err = std::max(best.error, 1e-10);
        BoostRound round{best.stump, std::log((1.0 - err) / err) + std::log(k - 1.0), best.error};
        ens.importance.scores[round.stump.feature_index] +=
            opts.importance_mode == ImportanceMode::Alpha ? round.alpha : 1.0;

        const double boost = std::exp(round.alpha);
        for (std::size_t i = 0; i < n; ++i) {
            const bool miss = round.stump.predict(samples[i].x) != samples[i].label;
            wrong_storage[i] = miss;
            if (miss) w[i] *= boost;
        }
        ens.rounds.push_back(round);
        if (opts.on_round) opts.on_round(BoostTrace{t, &ens.rounds.back(), before, w, wrong_storage});
    }
    return ens;
}

/// Indices of the k largest scores, best first; equal scores keep index order.
inline std::vector<std::size_t> select_top_k(const FeatureImportance& importance, std::size_t k) {
    const auto& s = importance.scores;
    if (k < 1 || k > s.size()) throw InvalidArgument("select_top_k: k out of range");
    std::vector<std::size_t> idx(s.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
    idx.resize(k);
    return idx;
}

// ---------------------------------------------------------------------------
// Serialization: {version, scores[], selected[]}
// ---------------------------------------------------------------------------

struct FeatureSubset {
    std::vector<double> scores;
    std::vector<std::size_t> selected;
};

inline nlohmann::json to_json(const FeatureSubset& s) {
    return {{"version", 1}, {"scores", s.scores}, {"selected", s.selected}};
}

inline FeatureSubset feature_subset_from_json(const nlohmann::json& j) {
    if (j.value("version", 0) != 1) throw InvalidArgument("feature subset: unsupported version");
    FeatureSubset s;
    s.scores = j.at("scores").get<std::vector<double>>();
    s.selected = j.at("selected").get<std::vector<std::size_t>>();
    for (auto i : s.selected)
        if (i >= s.scores.size()) throw InvalidArgument("feature subset: selected index out of range");
    return s;
}

}  // namespace edgema
