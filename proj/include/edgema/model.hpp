#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "edgema/dataset.hpp"
#include "edgema/error.hpp"
#include "edgema/texture.hpp"

namespace edgema {

/// Per-feature affine standardization applied before a model sees its input.
/// Part of a checkpoint's metadata, never trained.
struct InputScaler {
    std::vector<double> mean;
    std::vector<double> scale;  // multiplies (x - mean)

    static InputScaler identity(std::size_t dim) { return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)}; }

    static InputScaler fit(std::span<const Sample> data) {
        if (data.empty()) throw InvalidArgument("InputScaler::fit: empty dataset");
        const std::size_t f = data.front().x.size();
        InputScaler s{std::vector<double>(f, 0.0), std::vector<double>(f, 1.0)};
        for (const auto& r : data)
            for (std::size_t i = 0; i < f; ++i) s.mean[i] += r.x[i];
        for (auto& m : s.mean) m /= double(data.size());
        std::vector<double> var(f, 0.0);
        for (const auto& r : data)
            for (std::size_t i = 0; i < f; ++i) var[i] += (r.x[i] - s.mean[i]) * (r.x[i] - s.mean[i]);
        for (std::size_t i = 0; i < f; ++i) {
            const double sd = std::sqrt(var[i] / double(data.size()));
            s.scale[i] = sd > 1e-12 ? 1.0 / sd : 1.0;
        }
        return s;
    }

    void apply(std::span<const double> x, std::span<double> out) const {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = (x[i] - mean[i]) * scale[i];
    }
    friend bool operator==(const InputScaler&, const InputScaler&) = default;
};

/// A classifier whose trainable state is one flat parameter vector.
///
/// Implementations provide class scores and the per-sample gradient of the
/// cross-entropy loss; everything else (losses, fine-tuning) is generic.
class Model {
public:
    virtual ~Model() = default;

    virtual std::string kind() const = 0;
    virtual std::size_t input_dim() const = 0;
    virtual std::size_t num_classes() const = 0;
    virtual std::unique_ptr<Model> clone() const = 0;

    /// Writes K unnormalized class scores for one input row.
    virtual void scores(std::span<const double> x, std::span<double> out) const = 0;

    /// Adds scale * d CE(x, label) / d params to `grad` (length param_count()).
    /// Returns the cross-entropy of this sample.
    virtual double accumulate_gradient(std::span<const double> x, int label, double scale,
                                       std::span<double> grad) const = 0;

    virtual nlohmann::json dims_json() const = 0;

    std::span<const double> params() const noexcept { return params_; }
    std::span<double> mutable_params() noexcept { return params_; }
    std::size_t param_count() const noexcept { return params_.size(); }
    const InputScaler& scaler() const noexcept { return scaler_; }
    void set_scaler(InputScaler s) {
        if (s.mean.size() != input_dim() || s.scale.size() != input_dim())
            throw InvalidArgument("Model::set_scaler: dimension mismatch");
        scaler_ = std::move(s);
    }

    std::vector<double> predict_scores(std::span<const double> x) const {
        std::vector<double> s(num_classes());
        scores(x, s);
        return s;
    }

    /// Argmax class; ties go to the lower index.
    int predict(std::span<const double> x) const {
        const auto s = predict_scores(x);
        return int(argmax_lowest(s));
    }

    bool compatible_with(const Model& other) const {
        return input_dim() == other.input_dim() && num_classes() == other.num_classes();
    }

protected:
    Model() = default;
    Model(const Model&) = default;
    Model& operator=(const Model&) = default;

    std::vector<double> params_;
    InputScaler scaler_;
};

namespace detail {

/// Softmax of `s` in place; returns log-sum-exp.
inline double softmax_inplace(std::span<double> s) {
    const double mx = *std::max_element(s.begin(), s.end());
    double z = 0;
    for (auto& v : s) {
        v = std::exp(v - mx);
        z += v;
    }
    for (auto& v : s) v /= z;
    return mx + std::log(z);
}

}  // namespace detail

/// Multinomial logistic regression: scores = W z + b on standardized z.
/// Parameters are W (K x F, row-major) followed by b (K).
class SoftmaxModel final : public Model {
public:
    SoftmaxModel(std::size_t input_dim, std::size_t classes) : f_(input_dim), k_(classes) {
        if (f_ == 0 || k_ < 2) throw InvalidArgument("SoftmaxModel: need input_dim >= 1 and K >= 2");
        params_.assign(k_ * f_ + k_, 0.0);
        scaler_ = InputScaler::identity(f_);
    }

    std::string kind() const override { return "softmax"; }
    std::size_t input_dim() const override { return f_; }
    std::size_t num_classes() const override { return k_; }
    std::unique_ptr<Model> clone() const override { return std::make_unique<SoftmaxModel>(*this); }
    nlohmann::json dims_json() const override { return {{"input", f_}, {"classes", k_}}; }

    void scores(std::span<const double> x, std::span<double> out) const override {
        std::vector<double> z(f_);
        scaler_.apply(x, z);
        forward(z, out);
    }

    double accumulate_gradient(std::span<const double> x, int label, double scale,
                               std::span<double> grad) const override {
        std::vector<double> z(f_), p(k_);
        scaler_.apply(x, z);
        forward(z, p);
        const double lse = detail::softmax_inplace(p);
        const double loss = lse - logit_of(z, std::size_t(label));
        for (std::size_t c = 0; c < k_; ++c) {
            const double d = scale * (p[c] - (std::size_t(label) == c ? 1.0 : 0.0));
            double* row = grad.data() + c * f_;
            for (std::size_t i = 0; i < f_; ++i) row[i] += d * z[i];
            grad[k_ * f_ + c] += d;
        }
        return loss;
    }

private:
    void forward(std::span<const double> z, std::span<double> out) const {
        for (std::size_t c = 0; c < k_; ++c) out[c] = logit_of(z, c);
    }
    double logit_of(std::span<const double> z, std::size_t c) const {
        const double* row = params_.data() + c * f_;
        double s = params_[k_ * f_ + c];
        for (std::size_t i = 0; i < f_; ++i) s += row[i] * z[i];
        return s;
    }

    std::size_t f_, k_;
};

/// One tanh hidden layer: scores = W2 tanh(W1 z + b1) + b2.
/// Parameter layout: W1 (H x F), b1 (H), W2 (K x H), b2 (K).
class MlpModel final : public Model {
public:
    MlpModel(std::size_t input_dim, std::size_t classes, std::size_t hidden = 32, std::uint64_t seed = 0)
        : f_(input_dim), k_(classes), h_(hidden) {
        if (f_ == 0 || k_ < 2 || h_ == 0) throw InvalidArgument("MlpModel: bad dimensions");
        params_.assign(h_ * f_ + h_ + k_ * h_ + k_, 0.0);
        scaler_ = InputScaler::identity(f_);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> w1(0.0, 1.0 / std::sqrt(double(f_)));
        std::normal_distribution<double> w2(0.0, 1.0 / std::sqrt(double(h_)));
        for (std::size_t i = 0; i < h_ * f_; ++i) params_[i] = w1(rng);
        for (std::size_t i = 0; i < k_ * h_; ++i) params_[w2_off() + i] = w2(rng);
    }

    std::string kind() const override { return "mlp"; }
    std::size_t input_dim() const override { return f_; }
    std::size_t num_classes() const override { return k_; }
    std::size_t hidden() const { return h_; }
    std::unique_ptr<Model> clone() const override { return std::make_unique<MlpModel>(*this); }
    nlohmann::json dims_json() const override { return {{"input", f_}, {"classes", k_}, {"hidden", h_}}; }

    void scores(std::span<const double> x, std::span<double> out) const override {
        std::vector<double> z(f_), a(h_);
        scaler_.apply(x, z);
        hidden_layer(z, a);
        output_layer(a, out);
    }

    double accumulate_gradient(std::span<const double> x, int label, double scale,
                               std::span<double> grad) const override {
        std::vector<double> z(f_), a(h_), p(k_);
        scaler_.apply(x, z);
        hidden_layer(z, a);
        output_layer(a, p);
        const double target = p[std::size_t(label)];
        const double lse = detail::softmax_inplace(p);
        const double loss = lse - target;

        std::vector<double> da(h_, 0.0);
        for (std::size_t c = 0; c < k_; ++c) {
            const double d = scale * (p[c] - (std::size_t(label) == c ? 1.0 : 0.0));
            const double* w2 = params_.data() + w2_off() + c * h_;
            double* g2 = grad.data() + w2_off() + c * h_;
            for (std::size_t j = 0; j < h_; ++j) {
                g2[j] += d * a[j];
                da[j] += d * w2[j];
            }
            grad[b2_off() + c] += d;
        }
        for (std::size_t j = 0; j < h_; ++j) {
            const double dpre = da[j] * (1.0 - a[j] * a[j]);
            double* g1 = grad.data() + j * f_;
            for (std::size_t i = 0; i < f_; ++i) g1[i] += dpre * z[i];
            grad[b1_off() + j] += dpre;
        }
        return loss;
    }

private:
    std::size_t b1_off() const { return h_ * f_; }
    std::size_t w2_off() const { return h_ * f_ + h_; }
    std::size_t b2_off() const { return h_ * f_ + h_ + k_ * h_; }

    void hidden_layer(std::span<const double> z, std::span<double> a) const {
        for (std::size_t j = 0; j < h_; ++j) {
            const double* w = params_.data() + j * f_;
            double s = params_[b1_off() + j];
            for (std::size_t i = 0; i < f_; ++i) s += w[i] * z[i];
            a[j] = std::tanh(s);
        }
    }
    void output_layer(std::span<const double> a, std::span<double> out) const {
        for (std::size_t c = 0; c < k_; ++c) {
            const double* w = params_.data() + w2_off() + c * h_;
            double s = params_[b2_off() + c];
            for (std::size_t j = 0; j < h_; ++j) s += w[j] * a[j];
            out[c] = s;
        }
    }

    std::size_t f_, k_, h_;
};

// ---------------------------------------------------------------------------
// Checkpoints: {version, kind, dims, params, scaler, texture}
// ---------------------------------------------------------------------------

/// A model plus the feature space it expects.
struct Checkpoint {
    std::shared_ptr<const Model> model;
    TextureConfig texture;
};

inline nlohmann::json to_json(const Model& m, const TextureConfig& texture = {}) {
    const auto p = m.params();
    return {{"version", 1},
            {"kind", m.kind()},
            {"dims", m.dims_json()},
            {"params", std::vector<double>(p.begin(), p.end())},
            {"scaler", {{"mean", m.scaler().mean}, {"scale", m.scaler().scale}}},
            {"texture", {{"levels", texture.levels}, {"grid", texture.grid_name}}}};
}

inline Checkpoint checkpoint_from_json(const nlohmann::json& j) {
    if (j.value("version", 0) != 1) throw InvalidArgument("checkpoint: unsupported version");
    const auto kind = j.at("kind").get<std::string>();
    const auto& dims = j.at("dims");
    const auto input = dims.at("input").get<std::size_t>();
    const auto classes = dims.at("classes").get<std::size_t>();
    std::unique_ptr<Model> m;
    if (kind == "softmax")
        m = std::make_unique<SoftmaxModel>(input, classes);
    else if (kind == "mlp")
        m = std::make_unique<MlpModel>(input, classes, dims.at("hidden").get<std::size_t>());
    else
        throw InvalidArgument("checkpoint: unknown model kind '" + kind + "'");

    const auto params = j.at("params").get<std::vector<double>>();
    if (params.size() != m->param_count()) throw InvalidArgument("checkpoint: parameter count mismatch");
    std::copy(params.begin(), params.end(), m->mutable_params().begin());
    if (j.contains("scaler"))
        m->set_scaler({j["scaler"].at("mean").get<std::vector<double>>(), j["scaler"].at("scale").get<std::vector<double>>()});

    Checkpoint c;
    if (j.contains("texture")) {
        c.texture.levels = j["texture"].at("levels").get<int>();
        c.texture.grid_name = j["texture"].at("grid").get<std::string>();
    }
    c.model = std::move(m);
    return c;
}

}  // namespace edgema
