#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "edgema/error.hpp"

namespace edgema {

/// A point on the probability simplex over K classes.
class LabelDistribution {
public:
    LabelDistribution() = default;
    explicit LabelDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
        if (probs_.empty()) throw InvalidArgument("LabelDistribution: no classes");
        double sum = 0;
        for (double p : probs_) {
            if (!(p >= 0) || !std::isfinite(p)) throw InvalidArgument("LabelDistribution: negative or non-finite mass");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument("LabelDistribution: mass does not sum to 1");
    }

    static LabelDistribution uniform(std::size_t k) { return LabelDistribution(std::vector<double>(k, 1.0 / double(k))); }

    /// Normalizes non-negative counts.
    static LabelDistribution from_counts(std::span<const double> counts) {
        const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
        if (!(total > 0)) throw InvalidArgument("LabelDistribution: counts sum to zero");
        std::vector<double> p(counts.begin(), counts.end());
        for (auto& v : p) v /= total;
        return LabelDistribution(std::move(p));
    }

    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    const std::vector<double>& probs() const noexcept { return probs_; }
    friend bool operator==(const LabelDistribution&, const LabelDistribution&) = default;

private:
    std::vector<double> probs_;
};

/// Joint P_S(h(x) = i, y = j) over a labeled holdout set.
struct ConfusionMatrix {
    std::size_t k = 0;
    std::vector<double> joint;  // row i = prediction, column j = true class

    double operator()(std::size_t pred, std::size_t truth) const { return joint[pred * k + truth]; }

    std::vector<double> row_sums() const {
        std::vector<double> r(k, 0.0);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) r[i] += (*this)(i, j);
        return r;
    }
    std::vector<double> column_sums() const {
        std::vector<double> c(k, 0.0);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) c[j] += (*this)(i, j);
        return c;
    }
};

struct ImportanceWeights {
    std::vector<double> w;
    double operator[](std::size_t i) const { return w[i]; }
    std::size_t size() const noexcept { return w.size(); }

    static ImportanceWeights ones(std::size_t k) { return {std::vector<double>(k, 1.0)}; }
};

/// Fraction of predictions per class.
inline LabelDistribution estimate_predicted_distribution(std::span<const int> predictions, std::size_t k) {
    if (predictions.empty()) throw InvalidArgument("estimate_predicted_distribution: no predictions");
    if (k == 0) throw InvalidArgument("estimate_predicted_distribution: K must be >= 1");
    std::vector<double> counts(k, 0.0);
    for (int p : predictions) {
        if (p < 0 || std::size_t(p) >= k) throw InvalidArgument("estimate_predicted_distribution: prediction out of range");
        counts[std::size_t(p)] += 1.0;
    }
    for (auto& c : counts) c /= double(predictions.size());
    return LabelDistribution(std::move(counts));
}

/// Confusion matrix from paired (prediction, truth) labels.
inline ConfusionMatrix estimate_confusion(std::span<const int> predictions, std::span<const int> truths, std::size_t k) {
    if (predictions.empty()) throw InvalidArgument("estimate_confusion: empty holdout");
    if (predictions.size() != truths.size()) throw InvalidArgument("estimate_confusion: length mismatch");
    ConfusionMatrix c{k, std::vector<double>(k * k, 0.0)};
    std::vector<bool> present(k, false);
    for (std::size_t n = 0; n < predictions.size(); ++n) {
        const int p = predictions[n], y = truths[n];
        if (p < 0 || y < 0 || std::size_t(p) >= k || std::size_t(y) >= k)
            throw InvalidArgument("estimate_confusion: label out of range");
        c.joint[std::size_t(p) * k + std::size_t(y)] += 1.0;
        present[std::size_t(y)] = true;
    }
    for (std::size_t j = 0; j < k; ++j)
        if (!present[j])
            throw InvalidArgument("estimate_confusion: class " + std::to_string(j) +
                                  " absent from holdout; importance weights are unidentifiable");
    for (auto& v : c.joint) v /= double(predictions.size());
    return c;
}

/// Raised when the confusion matrix is too close to singular to invert.
class RankDeficientError : public NumericalError {
public:
    explicit RankDeficientError(double condition)
        : NumericalError("confusion matrix is numerically rank-deficient (condition estimate " +
                         std::to_string(condition) + ")"),
          condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

struct ImportanceOptions {
    double ridge = 1e-6;
    double w_max = 10.0;
    /// Largest sigma_max/sigma_min of C accepted before giving up.
    double max_condition = 1e8;
};

/// Solves C w = q in the ridge least-squares sense, (C^T C + lambda I) w = C^T q,
/// then clips w to [0, w_max]. The result is a per-class ratio P_T(y)/P_S(y).
inline ImportanceWeights compute_importance_weights(const ConfusionMatrix& c, const LabelDistribution& q,
                                                    const ImportanceOptions& opts = {}) {
    const std::size_t k = c.k;
    if (q.size() != k) throw InvalidArgument("compute_importance_weights: K mismatch");
    const auto n = static_cast<Eigen::Index>(k);
    Eigen::MatrixXd cm(n, n);
    Eigen::VectorXd qv(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        qv(i) = q[std::size_t(i)];
        for (Eigen::Index j = 0; j < n; ++j) cm(i, j) = c(std::size_t(i), std::size_t(j));
    }

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(cm);
    const auto& sv = svd.singularValues();
    const double smax = sv(0), smin = sv(sv.size() - 1);
    const double condition = smin > 0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (!(condition <= opts.max_condition)) throw RankDeficientError(condition);

    const Eigen::MatrixXd normal =
        cm.transpose() * cm + opts.ridge * Eigen::MatrixXd::Identity(n, n);
    const Eigen::VectorXd w = normal.ldlt().solve(cm.transpose() * qv);

    ImportanceWeights out;
    out.w.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double v = w(static_cast<Eigen::Index>(i));
        if (!std::isfinite(v)) throw NumericalError("compute_importance_weights: non-finite solution");
        out.w[i] = std::clamp(v, 0.0, opts.w_max);
    }
    return out;
}

inline constexpr double kKlSmoothing = 1e-6;

/// D_KL(p || m) in nats after adding `eps` to every entry of both and
/// renormalizing, so the divergence stays finite on disjoint supports.
inline double kl_divergence(const LabelDistribution& p, const LabelDistribution& m, double eps = kKlSmoothing) {
    if (p.size() != m.size()) throw InvalidArgument("kl_divergence: K mismatch");
    const double k = double(p.size());
    const double zp = 1.0 + k * eps, zm = 1.0 + k * eps;
    double d = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi = (p[i] + eps) / zp;
        const double mi = (m[i] + eps) / zm;
        if (pi == 0) continue;
        d += pi * std::log(pi / mi);
    }
    return std::max(0.0, d);
}

enum class GateDecision { Lag, Adapt };

/// Lag while d < D; at d == D the shift counts as malignant.
inline GateDecision shift_gate(double d, double threshold) {
    if (!(d >= 0)) throw InvalidArgument("shift_gate: divergence must be non-negative");
    if (!(threshold >= 0)) throw InvalidArgument("shift_gate: threshold must be non-negative");
    return d < threshold ? GateDecision::Lag : GateDecision::Adapt;
}

}  // namespace edgema
