#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "edgema/dataset.hpp"
#include "edgema/error.hpp"
#include "edgema/texture.hpp"

namespace edgema {

/// Node of a CART tree, stored in a flat array. A node with feature < 0 is a
/// leaf; otherwise samples with x[feature] <= threshold go left.
struct TreeNode {
    int feature = -1;
    double threshold = 0;
    int left = -1;
    int right = -1;
    std::size_t samples = 0;
    std::vector<std::uint32_t> class_counts;  // leaves only

    bool is_leaf() const noexcept { return feature < 0; }
    int majority() const { return int(argmax_lowest(class_counts)); }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    const TreeNode& leaf_for(std::span<const double> x) const {
        const TreeNode* n = &nodes.front();
        while (!n->is_leaf()) n = &nodes[std::size_t(x[std::size_t(n->feature)] <= n->threshold ? n->left : n->right)];
        return *n;
    }
    int predict(std::span<const double> x) const { return leaf_for(x).majority(); }
    std::size_t depth() const { return depth_from(0); }
    friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

private:
    std::size_t depth_from(int i) const {
        const auto& n = nodes[std::size_t(i)];
        return n.is_leaf() ? 0 : 1 + std::max(depth_from(n.left), depth_from(n.right));
    }
};

struct ForestOptions {
    std::size_t n_trees = 32;
    std::uint64_t seed = 0;
    std::size_t max_depth = 16;
    std::size_t min_node_size = 2;
    std::size_t features_per_node = 0;  // 0: ceil(sqrt(|feature_subset|))
    bool bootstrap = true;
    bool parallel = false;
};

struct RandomForest {
    std::vector<DecisionTree> trees;
    std::vector<std::size_t> feature_subset;
    std::vector<std::string> domain_labels;
    std::uint64_t seed = 0;
    int num_classes = 0;
    /// Feature space the forest was trained in (recorded for the CLI).
    TextureConfig texture;

    std::size_t n_trees() const noexcept { return trees.size(); }
    friend bool operator==(const RandomForest&, const RandomForest&) = default;
};

namespace detail {

class TreeBuilder {
public:
    TreeBuilder(std::span<const Sample> data, std::span<const std::size_t> features, int num_classes,
                const ForestOptions& opts, std::mt19937_64& rng)
        : data_(data), features_(features), k_(std::size_t(num_classes)), opts_(opts), rng_(rng) {
        mtry_ = opts.features_per_node ? std::min(opts.features_per_node, features.size())
                                       : std::size_t(std::ceil(std::sqrt(double(features.size()))));
        mtry_ = std::max<std::size_t>(1, mtry_);
    }

    DecisionTree build(std::vector<std::size_t> indices) {
        tree_.nodes.clear();
        grow(indices, 0);
        return std::move(tree_);
    }

private:
    struct Split {
        int feature = -1;
        double threshold = 0;
        double score = 0;
    };

    std::vector<std::uint32_t> counts_of(std::span<const std::size_t> idx) const {
        std::vector<std::uint32_t> c(k_, 0);
        for (auto i : idx) ++c[std::size_t(data_[i].label)];
        return c;
    }

    static double purity_score(std::span<const std::uint32_t> c, double n) {
        double s = 0;
        for (auto v : c) s += double(v) * double(v);
        return s / n;
    }

    std::vector<std::size_t> candidate_features() {
        std::vector<std::size_t> pool(features_.begin(), features_.end());
        if (mtry_ < pool.size()) {
            for (std::size_t i = 0; i < mtry_; ++i) {
                std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
                std::swap(pool[i], pool[pick(rng_)]);
            }
            pool.resize(mtry_);
        }
        std::sort(pool.begin(), pool.end());
        return pool;
    }

    // Maximizes sum_c L_c^2/n_L + sum_c R_c^2/n_R, i.e. minimizes weighted Gini.
    Split best_split(std::vector<std::size_t>& idx, std::span<const std::uint32_t> total) {
        Split best;
        const std::size_t n = idx.size();
        std::vector<std::uint32_t> left(k_), right(k_);
        for (std::size_t f : candidate_features()) {
            std::stable_sort(idx.begin(), idx.end(),
                             [&](std::size_t a, std::size_t b) { return data_[a].x[f] < data_[b].x[f]; });
            std::fill(left.begin(), left.end(), 0);
            for (std::size_t pos = 0; pos + 1 < n; ++pos) {
                ++left[std::size_t(data_[idx[pos]].label)];
                const double here = data_[idx[pos]].x[f];
                const double next = data_[idx[pos + 1]].x[f];
                if (!(here < next)) continue;
                for (std::size_t c = 0; c < k_; ++c) right[c] = total[c] - left[c];
                const double nl = double(pos + 1), nr = double(n - pos - 1);
                const double score = purity_score(left, nl) + purity_score(right, nr);
                if (best.feature < 0 || score > best.score) best = {int(f), here + (next - here) / 2, score};
            }
        }
        return best;
    }

    int grow(std::vector<std::size_t>& idx, std::size_t depth) {
        const int id = int(tree_.nodes.size());
        tree_.nodes.emplace_back();
        tree_.nodes.back().samples = idx.size();
        auto counts = counts_of(idx);
        const bool pure = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;

        Split split;
        if (!pure && idx.size() >= opts_.min_node_size && depth < opts_.max_depth) {
            split = best_split(idx, counts);
            const double parent = purity_score(counts, double(idx.size()));
            if (split.feature >= 0 && !(split.score > parent + 1e-9)) split.feature = -1;
        }
        if (split.feature < 0) {
            tree_.nodes[std::size_t(id)].class_counts = std::move(counts);
            return id;
        }

        std::vector<std::size_t> l, r;
        for (auto i : idx) (data_[i].x[std::size_t(split.feature)] <= split.threshold ? l : r).push_back(i);
        idx.clear();
        idx.shrink_to_fit();
        const int li = grow(l, depth + 1);
        const int ri = grow(r, depth + 1);
        auto& node = tree_.nodes[std::size_t(id)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = li;
        node.right = ri;
        return id;
    }

    std::span<const Sample> data_;
    std::span<const std::size_t> features_;
    std::size_t k_;
    const ForestOptions& opts_;
    std::mt19937_64& rng_;
    std::size_t mtry_ = 1;
    DecisionTree tree_;
};

inline std::mt19937_64 tree_rng(std::uint64_t seed, std::size_t tree) {
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(tree), 0x7265u};
    return std::mt19937_64(seq);
}

}  // namespace detail

/// n bootstrap indices drawn with replacement.
inline std::vector<std::size_t> bootstrap_sample(std::size_t n, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> out(n);
    for (auto& v : out) v = pick(rng);
    return out;
}

/// Trains a forest of CART trees (Gini splits at midpoints, per-node feature
/// subsampling). Tree t draws its bootstrap sample and feature subsets from
/// an rng seeded by (seed, t), so the result does not depend on the order in
/// which trees are built.
inline RandomForest train_forest(std::span<const Sample> data, std::vector<std::size_t> feature_subset,
                                 std::vector<std::string> domain_labels, const ForestOptions& opts = {}) {
    if (data.size() < 2) throw InvalidArgument("train_forest: need at least two samples");
    if (opts.n_trees < 1) throw InvalidArgument("train_forest: n_trees must be >= 1");
    const std::size_t width = data.front().x.size();
    for (const auto& s : data)
        if (s.x.size() != width) throw InvalidArgument("train_forest: ragged feature rows");
    if (feature_subset.empty()) {
        feature_subset.resize(width);
        std::iota(feature_subset.begin(), feature_subset.end(), std::size_t{0});
    }
    for (auto f : feature_subset)
        if (f >= width) throw InvalidArgument("train_forest: feature subset index out of range");

    RandomForest forest;
    forest.num_classes = std::max<int>(infer_class_count(data), int(domain_labels.size()));
    if (domain_labels.empty())
        for (int c = 0; c < forest.num_classes; ++c) domain_labels.push_back(std::to_string(c));
    if (int(domain_labels.size()) < forest.num_classes)
        throw InvalidArgument("train_forest: fewer domain labels than classes");
    forest.feature_subset = std::move(feature_subset);
    forest.domain_labels = std::move(domain_labels);
    forest.seed = opts.seed;

    auto build_one = [&](std::size_t t) {
        auto rng = detail::tree_rng(opts.seed, t);
        std::vector<std::size_t> idx;
        if (opts.bootstrap) {
            idx = bootstrap_sample(data.size(), rng);
        } else {
            idx.resize(data.size());
            std::iota(idx.begin(), idx.end(), std::size_t{0});
        }
        detail::TreeBuilder builder(data, forest.feature_subset, forest.num_classes, opts, rng);
        return builder.build(std::move(idx));
    };

    forest.trees.resize(opts.n_trees);
    if (opts.parallel) {
        std::vector<std::future<DecisionTree>> jobs;
        for (std::size_t t = 0; t < opts.n_trees; ++t) jobs.push_back(std::async(std::launch::async, build_one, t));
        for (std::size_t t = 0; t < opts.n_trees; ++t) forest.trees[t] = jobs[t].get();
    } else {
        for (std::size_t t = 0; t < opts.n_trees; ++t) forest.trees[t] = build_one(t);
    }
    return forest;
}

struct ForestVote {
    int domain = 0;
    std::vector<std::size_t> votes;  // per class
};

/// Majority vote of the trees; ties resolve to the lower class index.
inline ForestVote predict(const RandomForest& forest, std::span<const double> x) {
    std::size_t need = 0;
    for (auto f : forest.feature_subset) need = std::max(need, f + 1);
    if (x.size() < need) throw InvalidArgument("predict: feature vector does not cover the forest's subset");
    ForestVote v;
    v.votes.assign(std::size_t(forest.num_classes), 0);
    for (const auto& t : forest.trees) ++v.votes[std::size_t(t.predict(x))];
    v.domain = int(argmax_lowest(v.votes));
    return v;
}

inline ForestVote predict(const RandomForest& forest, const FeatureVector& fv) { return predict(forest, fv.values); }

struct DomainDecision {
    int domain = 0;
    std::vector<std::size_t> votes;        // tree votes summed over frames
    std::vector<std::size_t> frame_votes;  // per-frame forest decisions
    std::size_t frames_used = 0;
};

/// Classifies the trailing min(m, n) feature rows and takes the frame-level
/// majority (lowest domain index on ties).
inline DomainDecision detect_domain(const RandomForest& forest, std::span<const std::vector<double>> rows,
                                    std::size_t m = 10) {
    if (rows.empty()) throw InvalidArgument("detect_domain: empty batch");
    if (m == 0) throw InvalidArgument("detect_domain: m must be >= 1");
    DomainDecision d;
    d.votes.assign(std::size_t(forest.num_classes), 0);
    d.frame_votes.assign(std::size_t(forest.num_classes), 0);
    d.frames_used = std::min(m, rows.size());
    for (std::size_t i = rows.size() - d.frames_used; i < rows.size(); ++i) {
        auto v = predict(forest, rows[i]);
        for (std::size_t c = 0; c < v.votes.size(); ++c) d.votes[c] += v.votes[c];
        ++d.frame_votes[std::size_t(v.domain)];
    }
    d.domain = int(argmax_lowest(d.frame_votes));
    return d;
}

/// Same, extracting features from the trailing frames first.
inline DomainDecision detect_domain(const RandomForest& forest, std::span<const Frame> frames,
                                    const TextureConfig& texture, std::size_t m = 10) {
    if (frames.empty()) throw InvalidArgument("detect_domain: empty batch");
    const std::size_t used = std::min(m, frames.size());
    std::vector<std::vector<double>> rows;
    for (std::size_t i = frames.size() - used; i < frames.size(); ++i)
        rows.push_back(extract_features(frames[i], texture).values);
    return detect_domain(forest, rows, m);
}

inline double evaluate_detector(const RandomForest& forest, std::span<const Sample> test) {
    if (test.empty()) throw InvalidArgument("evaluate_detector: empty test set");
    std::size_t hits = 0;
    for (const auto& s : test) hits += predict(forest, s.x).domain == s.label;
    return double(hits) / double(test.size());
}

struct DetectorTrial {
    RandomForest forest;
    double accuracy = 0;
    std::size_t restart = 0;
};

/// Retrains with seeds seed, seed+1, ... and keeps the most accurate forest
/// on `test` (earliest restart on ties).
inline DetectorTrial best_of_restarts(std::span<const Sample> train, std::span<const Sample> test,
                                      std::vector<std::size_t> feature_subset, std::vector<std::string> labels,
                                      ForestOptions opts, std::size_t restarts) {
    if (restarts < 1) throw InvalidArgument("best_of_restarts: restarts must be >= 1");
    DetectorTrial best;
    best.accuracy = -1;
    const auto base = opts.seed;
    for (std::size_t r = 0; r < restarts; ++r) {
        opts.seed = base + r;
        auto forest = train_forest(train, feature_subset, labels, opts);
        const double acc = evaluate_detector(forest, test);
        if (acc > best.accuracy) best = {std::move(forest), acc, r};
    }
    return best;
}

// ---------------------------------------------------------------------------
// Serialization: {version, seed, feature_subset, domain_labels, trees}
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json node_to_json(const DecisionTree& t, int i) {
    const auto& n = t.nodes[std::size_t(i)];
    if (n.is_leaf()) return {{"n", n.samples}, {"leaf", n.class_counts}};
    return {{"n", n.samples},
            {"feature", n.feature},
            {"threshold", n.threshold},
            {"left", node_to_json(t, n.left)},
            {"right", node_to_json(t, n.right)}};
}

inline int node_from_json(DecisionTree& t, const nlohmann::json& j) {
    const int id = int(t.nodes.size());
    t.nodes.emplace_back();
    t.nodes.back().samples = j.at("n").get<std::size_t>();
    if (j.contains("leaf")) {
        t.nodes[std::size_t(id)].class_counts = j.at("leaf").get<std::vector<std::uint32_t>>();
        return id;
    }
    const int li = node_from_json(t, j.at("left"));
    const int ri = node_from_json(t, j.at("right"));
    auto& n = t.nodes[std::size_t(id)];
    n.feature = j.at("feature").get<int>();
    n.threshold = j.at("threshold").get<double>();
    n.left = li;
    n.right = ri;
    return id;
}

}  // namespace detail

inline nlohmann::json to_json(const RandomForest& f) {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : f.trees) trees.push_back(detail::node_to_json(t, 0));
    return {{"version", 1},
            {"seed", f.seed},
            {"num_classes", f.num_classes},
            {"feature_subset", f.feature_subset},
            {"domain_labels", f.domain_labels},
            {"texture", {{"levels", f.texture.levels}, {"grid", f.texture.grid_name}}},
            {"trees", trees}};
}

inline RandomForest forest_from_json(const nlohmann::json& j) {
    if (j.value("version", 0) != 1) throw InvalidArgument("forest: unsupported version");
    RandomForest f;
    f.seed = j.at("seed").get<std::uint64_t>();
    f.feature_subset = j.at("feature_subset").get<std::vector<std::size_t>>();
    f.domain_labels = j.at("domain_labels").get<std::vector<std::string>>();
    f.num_classes = j.value("num_classes", int(f.domain_labels.size()));
    if (j.contains("texture")) {
        f.texture.levels = j["texture"].at("levels").get<int>();
        f.texture.grid_name = j["texture"].at("grid").get<std::string>();
    }
    for (const auto& tj : j.at("trees")) {
        DecisionTree t;
        detail::node_from_json(t, tj);
        f.trees.push_back(std::move(t));
    }
    if (f.trees.empty()) throw InvalidArgument("forest: no trees");
    return f;
}

}  // namespace edgema
