#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "edgema/dataset.hpp"
#include "edgema/error.hpp"
#include "edgema/label_shift.hpp"
#include "edgema/model.hpp"

namespace edgema {

struct FineTuneConfig {
    double fraction = 0.2;
    std::size_t iterations = 8;
    double learning_rate = 0.05;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(fraction > 0 && fraction <= 1)) throw InvalidArgument("fine-tune fraction must lie in (0, 1]");
        if (iterations < 1) throw InvalidArgument("fine-tune iterations must be >= 1");
        if (!(learning_rate > 0)) throw InvalidArgument("fine-tune learning rate must be positive");
    }
};

/// Raised when a fine-tuning step produces a non-finite loss or gradient.
class FineTuneError : public NumericalError {
public:
    FineTuneError(const std::string& what, std::size_t iteration)
        : NumericalError(what + " at iteration " + std::to_string(iteration)), iteration_(iteration) {}
    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

/// ceil(fraction * P) distinct parameter indices, uniformly without
/// replacement, returned in ascending order.
inline std::vector<std::size_t> select_parameter_subset(std::size_t param_count, double fraction, std::uint64_t seed) {
    if (!(fraction > 0 && fraction <= 1)) throw InvalidArgument("select_parameter_subset: fraction must lie in (0, 1]");
    const auto take = std::min<std::size_t>(param_count, std::size_t(std::ceil(fraction * double(param_count) - 1e-9)));
    std::vector<std::size_t> idx(param_count);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < take; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, param_count - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(take);
    std::sort(idx.begin(), idx.end());
    return idx;
}

inline std::vector<std::size_t> select_parameter_subset(const Model& model, double fraction, std::uint64_t seed) {
    return select_parameter_subset(model.param_count(), fraction, seed);
}

namespace detail {

inline double class_weight(const ImportanceWeights& w, int label) {
    if (label < 0 || std::size_t(label) >= w.size()) throw InvalidArgument("label outside importance weight range");
    return w[std::size_t(label)];
}

// (1/n) sum_i W[y_i] CE(x_i, y_i) and its dense gradient.
inline double loss_and_gradient(const Model& model, std::span<const Sample> data, const ImportanceWeights& w,
                                std::vector<double>& grad) {
    if (data.empty()) throw InvalidArgument("weighted loss of an empty dataset");
    grad.assign(model.param_count(), 0.0);
    const double inv_n = 1.0 / double(data.size());
    double loss = 0;
    for (const auto& s : data) {
        const double wy = class_weight(w, s.label);
        loss += wy * model.accumulate_gradient(s.x, s.label, wy * inv_n, grad);
    }
    return loss * inv_n;
}

}  // namespace detail

/// Importance-weighted empirical risk: mean of W[y_i] * cross_entropy(x_i, y_i).
inline double weighted_loss(const Model& model, std::span<const Sample> data, const ImportanceWeights& w) {
    if (data.empty()) throw InvalidArgument("weighted_loss: empty dataset");
    double loss = 0;
    std::vector<double> s(model.num_classes());
    for (const auto& x : data) {
        if (x.label < 0 || std::size_t(x.label) >= model.num_classes()) throw InvalidArgument("weighted_loss: label out of range");
        const double wy = detail::class_weight(w, x.label);
        model.scores(x.x, s);
        const double target = s[std::size_t(x.label)];
        const double lse = detail::softmax_inplace(s);
        loss += wy * (lse - target);
    }
    return loss / double(data.size());
}

/// Gradient of weighted_loss restricted to `subset` (one entry per index).
inline std::vector<double> gradient(const Model& model, std::span<const Sample> data, const ImportanceWeights& w,
                                    std::span<const std::size_t> subset) {
    std::vector<double> dense;
    detail::loss_and_gradient(model, data, w, dense);
    std::vector<double> out;
    out.reserve(subset.size());
    for (auto i : subset) {
        if (i >= dense.size()) throw InvalidArgument("gradient: parameter index out of range");
        out.push_back(dense[i]);
    }
    return out;
}

/// Plain full-parameter gradient descent on the weighted loss.
inline std::unique_ptr<Model> gradient_descent(const Model& model, std::span<const Sample> data,
                                               const ImportanceWeights& w, std::size_t iterations, double learning_rate) {
    auto out = model.clone();
    std::vector<double> grad;
    for (std::size_t it = 0; it < iterations; ++it) {
        detail::loss_and_gradient(*out, data, w, grad);
        auto p = out->mutable_params();
        for (std::size_t i = 0; i < p.size(); ++i) p[i] -= learning_rate * grad[i];
    }
    return out;
}

/// Coordinate-subset fine-tuning: draws one parameter subset per call and
/// runs `iterations` gradient steps on it; every other parameter keeps its
/// exact value. The input model is not modified.
inline std::unique_ptr<Model> fine_tune(const Model& model, std::span<const Sample> data, const ImportanceWeights& w,
                                        const FineTuneConfig& cfg) {
    cfg.validate();
    if (data.empty()) throw InvalidArgument("fine_tune: empty dataset");
    if (w.size() != model.num_classes()) throw InvalidArgument("fine_tune: importance weights do not match K");
    const auto subset = select_parameter_subset(model, cfg.fraction, cfg.seed);
    auto out = model.clone();
    std::vector<double> grad;
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        const double loss = detail::loss_and_gradient(*out, data, w, grad);
        if (!std::isfinite(loss)) throw FineTuneError("non-finite loss", it);
        auto p = out->mutable_params();
        for (auto i : subset) {
            if (!std::isfinite(grad[i])) throw FineTuneError("non-finite gradient", it);
            p[i] -= cfg.learning_rate * grad[i];
        }
    }
    return out;
}

struct TrainOptions {
    std::size_t iterations = 400;
    double learning_rate = 0.5;
};

/// Fits a fresh softmax model (scaler estimated from `data`) by full-batch
/// gradient descent on the unweighted loss.
inline std::unique_ptr<Model> train_softmax(std::span<const Sample> data, std::size_t num_classes,
                                            const TrainOptions& opts = {}) {
    if (data.empty()) throw InvalidArgument("train_softmax: empty dataset");
    SoftmaxModel m(data.front().x.size(), num_classes);
    m.set_scaler(InputScaler::fit(data));
    return gradient_descent(m, data, ImportanceWeights::ones(num_classes), opts.iterations, opts.learning_rate);
}

}  // namespace edgema
