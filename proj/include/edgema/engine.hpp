#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "edgema/adaptation.hpp"
#include "edgema/config.hpp"
#include "edgema/dataset.hpp"
#include "edgema/error.hpp"
#include "edgema/feature_selection.hpp"
#include "edgema/forest.hpp"
#include "edgema/label_shift.hpp"
#include "edgema/manifest.hpp"
#include "edgema/model.hpp"
#include "edgema/texture.hpp"

namespace edgema {

// ---------------------------------------------------------------------------
// Stream payload
// ---------------------------------------------------------------------------

struct StreamFrame {
    Frame frame;
    double timestamp = 0;
    std::optional<int> label;
    std::optional<std::string> domain;
};

/// B_T: consecutive frames buffered from the stream.
struct StreamBatch {
    std::size_t index = 0;
    std::vector<StreamFrame> frames;

    void validate() const {
        if (frames.empty()) throw InvalidArgument("StreamBatch: empty batch");
        for (std::size_t i = 1; i < frames.size(); ++i)
            if (frames[i].timestamp < frames[i - 1].timestamp)
                throw InvalidArgument("StreamBatch: timestamps must be non-decreasing");
    }
};

/// A batch after feature extraction; what the engine actually consumes.
struct PreparedBatch {
    std::size_t index = 0;
    std::vector<std::vector<double>> rows;
    std::vector<double> timestamps;
    std::vector<std::optional<int>> labels;
    std::vector<std::optional<std::string>> domains;

    std::size_t size() const noexcept { return rows.size(); }
};

inline PreparedBatch prepare_batch(const StreamBatch& batch, const TextureConfig& texture) {
    batch.validate();
    PreparedBatch p;
    p.index = batch.index;
    const auto grid = texture.grid();
    for (const auto& f : batch.frames) {
        p.rows.push_back(extract_features(f.frame, grid, texture.levels).values);
        p.timestamps.push_back(f.timestamp);
        p.labels.push_back(f.label);
        p.domains.push_back(f.domain);
    }
    return p;
}

// ---------------------------------------------------------------------------
// Domain profiles
// ---------------------------------------------------------------------------

/// Per-domain bundle: training data, pre-trained checkpoint h0, source label
/// prior P_S (from training labels) and h0's confusion matrix on the holdout.
struct DomainProfile {
    std::string id;
    Dataset train;
    Dataset holdout;
    std::shared_ptr<const Model> checkpoint;
    LabelDistribution source_prior;
    ConfusionMatrix confusion;

    std::size_t num_classes() const { return checkpoint->num_classes(); }
};

/// Holdout = the last ceil(fraction * n) samples; the rest is training data.
inline std::pair<Dataset, Dataset> split_holdout(const Dataset& all, double fraction) {
    if (!(fraction > 0 && fraction < 1)) throw InvalidArgument("holdout fraction must lie in (0, 1)");
    const auto n_hold = std::size_t(std::ceil(fraction * double(all.size()) - 1e-9));
    if (n_hold == 0 || n_hold >= all.size()) throw InvalidArgument("holdout split leaves an empty side");
    const auto cut = all.size() - n_hold;
    return {Dataset(all.begin(), all.begin() + std::ptrdiff_t(cut)), Dataset(all.begin() + std::ptrdiff_t(cut), all.end())};
}

inline DomainProfile make_profile(std::string id, const Dataset& all, double holdout_fraction,
                                  std::shared_ptr<const Model> checkpoint) {
    if (!checkpoint) throw InvalidArgument("make_profile: missing checkpoint");
    DomainProfile p;
    p.id = std::move(id);
    std::tie(p.train, p.holdout) = split_holdout(all, holdout_fraction);
    const std::size_t k = checkpoint->num_classes();

    std::vector<double> counts(k, 0.0);
    for (const auto& s : p.train) {
        if (s.label < 0 || std::size_t(s.label) >= k) throw InvalidArgument("profile " + p.id + ": label outside model classes");
        if (s.x.size() != checkpoint->input_dim()) throw InvalidArgument("profile " + p.id + ": feature width != model input");
        counts[std::size_t(s.label)] += 1.0;
    }
    p.source_prior = LabelDistribution::from_counts(counts);

    std::vector<int> preds, truths;
    for (const auto& s : p.holdout) {
        preds.push_back(checkpoint->predict(s.x));
        truths.push_back(s.label);
    }
    p.confusion = estimate_confusion(preds, truths, k);
    p.checkpoint = std::move(checkpoint);
    return p;
}

struct Registry {
    std::vector<DomainProfile> profiles;
    std::optional<RandomForest> forest;
    std::size_t initial = 0;

    std::optional<std::size_t> find(const std::string& id) const {
        for (std::size_t i = 0; i < profiles.size(); ++i)
            if (profiles[i].id == id) return i;
        return std::nullopt;
    }
};

/// Selects the top-k texture features by AdaBoost importance and trains the
/// domain forest on the union of every profile's samples.
inline RandomForest train_domain_detector(const std::vector<DomainProfile>& profiles, const EngineConfig& cfg) {
    Dataset data;
    std::vector<std::string> labels;
    for (std::size_t d = 0; d < profiles.size(); ++d) {
        labels.push_back(profiles[d].id);
        for (const auto* part : {&profiles[d].train, &profiles[d].holdout})
            for (const auto& s : *part) data.push_back({s.x, int(d)});
    }
    std::vector<std::size_t> subset;
    if (profiles.size() >= 2) {
        AdaBoostOptions ab;
        ab.rounds = cfg.adaboost_rounds;
        auto ens = train_adaboost(data, ab);
        subset = select_top_k(ens.importance, std::min(cfg.forest_top_k, ens.importance.scores.size()));
    }
    ForestOptions fo;
    fo.n_trees = cfg.forest_trees;
    fo.seed = cfg.forest_seed;
    auto forest = train_forest(data, subset, labels, fo);
    forest.texture = cfg.texture;
    return forest;
}

// ---------------------------------------------------------------------------
// Model serving slot
// ---------------------------------------------------------------------------

/// The active-model slot shared between inference and adaptation. Readers
/// take a lease (model + version) and keep using it even if a swap lands
/// meanwhile; the swap becomes visible to the next lease.
class ModelSlot {
public:
    struct Lease {
        std::shared_ptr<const Model> model;
        std::uint64_t version = 0;
    };

    explicit ModelSlot(std::shared_ptr<const Model> initial) : model_(std::move(initial)) {
        if (!model_) throw InvalidArgument("ModelSlot: null model");
    }

    Lease acquire() const {
        std::lock_guard lock(mu_);
        return {model_, version_};
    }

    /// Replaces the model; rejects one with different input/class dimensions.
    std::uint64_t swap(std::shared_ptr<const Model> next) {
        if (!next) throw InvalidArgument("ModelSlot::swap: null model");
        std::lock_guard lock(mu_);
        if (!next->compatible_with(*model_)) throw InvalidArgument("ModelSlot::swap: incompatible model dimensions");
        model_ = std::move(next);
        return ++version_;
    }

private:
    mutable std::mutex mu_;
    std::shared_ptr<const Model> model_;
    std::uint64_t version_ = 0;
};

struct BatchInference {
    std::vector<int> predictions;
    std::vector<double> latency_ms;
    std::uint64_t version = 0;
};

/// Runs every row through one leased model version.
inline BatchInference infer_batch(const ModelSlot& slot, const std::vector<std::vector<double>>& rows, bool timed = false) {
    const auto lease = slot.acquire();
    BatchInference out;
    out.version = lease.version;
    out.predictions.reserve(rows.size());
    for (const auto& r : rows) {
        const auto t0 = std::chrono::steady_clock::now();
        out.predictions.push_back(lease.model->predict(r));
        if (timed)
            out.latency_ms.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Engine state and per-batch processing
// ---------------------------------------------------------------------------

enum class Decision { Lag, AdaptDomain, AdaptLabels };

inline const char* decision_name(Decision d) {
    switch (d) {
        case Decision::Lag: return "lag";
        case Decision::AdaptDomain: return "adapt_domain";
        case Decision::AdaptLabels: return "adapt_labels";
    }
    return "?";
}

/// Where the active model came from.
struct Provenance {
    std::string profile;
    std::optional<std::size_t> tuned_at_batch;  // empty: untouched checkpoint
    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct EngineState {
    std::size_t current = 0;  // index into Registry::profiles
    std::shared_ptr<const Model> active;
    Provenance provenance;
    LabelDistribution model_prior;  // P_M: label distribution at the last fine-tune
    ImportanceWeights last_weights;
    bool prior_pending = false;  // FirstBatch init: P_M not yet set
};

inline EngineState initial_state(const Registry& reg, const EngineConfig& cfg) {
    if (reg.profiles.empty()) throw InvalidArgument("registry has no domain profiles");
    if (reg.initial >= reg.profiles.size()) throw InvalidArgument("registry initial domain out of range");
    const auto& p = reg.profiles[reg.initial];
    EngineState s;
    s.current = reg.initial;
    s.active = p.checkpoint;
    s.provenance = {p.id, std::nullopt};
    s.model_prior = p.source_prior;
    s.last_weights = ImportanceWeights::ones(p.num_classes());
    s.prior_pending = cfg.p_m_init == ModelPriorInit::FirstBatch;
    return s;
}

/// Installs `model` as the active model for subsequent batches.
inline EngineState swap_model(EngineState state, std::shared_ptr<const Model> model, Provenance provenance) {
    if (!model) throw InvalidArgument("swap_model: null model");
    if (state.active && !model->compatible_with(*state.active)) throw InvalidArgument("swap_model: incompatible model");
    state.active = std::move(model);
    state.provenance = std::move(provenance);
    return state;
}

struct BatchReport {
    std::size_t batch_index = 0;
    double t_start = 0, t_end = 0;
    std::string domain_pred;
    std::optional<std::string> domain_true;
    bool domain_changed = false;
    std::vector<double> q;
    double kl = 0;
    Decision decision = Decision::Lag;
    std::vector<double> weights;
    std::optional<double> finetune_ms;
    std::optional<double> top1;
    std::size_t labeled = 0;
    std::size_t frames = 0;
    std::optional<double> infer_ms_p50, infer_ms_p95;
    std::optional<std::string> error;
};

struct BatchOutcome {
    EngineState state;
    BatchReport report;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline double percentile(std::vector<double> v, double pct) {
    std::sort(v.begin(), v.end());
    const auto rank = std::size_t(std::ceil(pct / 100.0 * double(v.size())));
    return v[std::min(v.size() - 1, rank == 0 ? 0 : rank - 1)];
}

inline std::optional<std::string> majority_domain(const std::vector<std::optional<std::string>>& domains) {
    std::vector<std::pair<std::string, std::size_t>> tally;
    for (const auto& d : domains) {
        if (!d) continue;
        auto it = std::find_if(tally.begin(), tally.end(), [&](const auto& e) { return e.first == *d; });
        if (it == tally.end()) tally.emplace_back(*d, 1);
        else ++it->second;
    }
    if (tally.empty()) return std::nullopt;
    auto best = tally.begin();
    for (auto it = tally.begin(); it != tally.end(); ++it)
        if (it->second > best->second) best = it;
    return best->first;
}

}  // namespace detail

/// One step of the adaptation loop.
///
/// Every frame is first served by the active model. The forest then votes on
/// the trailing frames; a different domain loads that profile, estimates q
/// with the profile's checkpoint, derives W = C^-1 q and fine-tunes the
/// checkpoint. Otherwise q is compared with P_M and only a divergence at or
/// above the threshold triggers re-weighting and fine-tuning. The returned
/// state's model serves the next batch.
inline BatchOutcome process_batch(const EngineState& state, const PreparedBatch& batch, const Registry& reg,
                                  const EngineConfig& cfg) {
    if (batch.rows.empty()) throw InvalidArgument("process_batch: empty batch");
    if (state.current >= reg.profiles.size()) throw InvalidArgument("process_batch: current domain not in registry");
    BatchOutcome out{state, {}};
    BatchReport& rep = out.report;
    rep.batch_index = batch.index;
    rep.frames = batch.size();
    rep.t_start = batch.timestamps.empty() ? 0 : batch.timestamps.front();
    rep.t_end = batch.timestamps.empty() ? 0 : batch.timestamps.back();
    rep.domain_true = detail::majority_domain(batch.domains);

    // (a) inference with the model that is active at the batch boundary
    const ModelSlot slot(state.active);
    const auto served = infer_batch(slot, batch.rows, cfg.record_timings);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < batch.size(); ++i)
        if (i < batch.labels.size() && batch.labels[i]) {
            ++rep.labeled;
            hits += served.predictions[i] == *batch.labels[i];
        }
    if (rep.labeled) rep.top1 = double(hits) / double(rep.labeled);
    if (cfg.record_timings && !served.latency_ms.empty()) {
        rep.infer_ms_p50 = detail::percentile(served.latency_ms, 50);
        rep.infer_ms_p95 = detail::percentile(served.latency_ms, 95);
    }

    // (b) domain shift
    std::size_t target = state.current;
    rep.domain_pred = reg.profiles[state.current].id;
    if (cfg.domain_detection && reg.profiles.size() > 1) {
        if (!reg.forest) throw InvalidArgument("process_batch: domain detection enabled but registry has no forest");
        const auto decision = detect_domain(*reg.forest, batch.rows, cfg.domain_check_frames);
        rep.domain_pred = reg.forest->domain_labels.at(std::size_t(decision.domain));
        if (auto idx = reg.find(rep.domain_pred)) {
            target = *idx;
        } else {
            rep.error = "detected domain '" + rep.domain_pred + "' is not registered; keeping current model";
            rep.decision = Decision::Lag;
            return out;
        }
    }
    rep.domain_changed = target != state.current;
    const DomainProfile& profile = reg.profiles[target];

    // (c) label distribution of the batch under the profile's checkpoint h0
    std::vector<int> h0_preds;
    h0_preds.reserve(batch.size());
    for (const auto& r : batch.rows) h0_preds.push_back(profile.checkpoint->predict(r));
    const auto q = estimate_predicted_distribution(h0_preds, profile.num_classes());
    rep.q = q.probs();

    LabelDistribution reference = state.model_prior;
    if (state.prior_pending) {
        out.state.prior_pending = false;
        out.state.model_prior = q;
        reference = q;
    }
    if (reference.size() != q.size()) reference = profile.source_prior;
    rep.kl = kl_divergence(q, reference);

    if (rep.domain_changed) {
        rep.decision = Decision::AdaptDomain;
    } else {
        rep.decision = shift_gate(rep.kl, cfg.kl_threshold) == GateDecision::Adapt ? Decision::AdaptLabels : Decision::Lag;
    }
    if (rep.decision == Decision::Lag) return out;

    ImportanceWeights w;
    try {
        w = compute_importance_weights(profile.confusion, q);
    } catch (const NumericalError& e) {
        w = ImportanceWeights::ones(profile.num_classes());
        rep.error = std::string("importance weights unavailable, using uniform: ") + e.what();
    }
    rep.weights = w.w;

    FineTuneConfig ft = cfg.finetune;
    ft.seed = detail::splitmix64(cfg.engine_seed ^ detail::splitmix64(batch.index + 1));
    const auto t0 = std::chrono::steady_clock::now();
    std::shared_ptr<const Model> tuned;
    try {
        tuned = fine_tune(*profile.checkpoint, profile.train, w, ft);
    } catch (const Error& e) {
        // Fail-static: keep serving the previous model and domain.
        rep.error = std::string("fine-tune failed: ") + e.what();
        return out;
    }
    if (cfg.record_timings)
        rep.finetune_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    out.state = swap_model(std::move(out.state), std::move(tuned), {profile.id, batch.index});
    out.state.current = target;
    out.state.model_prior = q;
    out.state.last_weights = std::move(w);
    return out;
}

inline BatchOutcome process_batch(const EngineState& state, const StreamBatch& batch, const Registry& reg,
                                  const EngineConfig& cfg) {
    return process_batch(state, prepare_batch(batch, cfg.texture), reg, cfg);
}

// ---------------------------------------------------------------------------
// Replay harness
// ---------------------------------------------------------------------------

struct ReplaySummary {
    std::size_t batches = 0;
    std::size_t adapt_domain = 0;
    std::size_t adapt_labels = 0;
    std::size_t lag = 0;
    std::size_t errors = 0;
    std::optional<double> mean_top1;  // over all labeled frames
};

struct ReplayResult {
    std::vector<BatchReport> reports;
    ReplaySummary summary;
};

inline ReplaySummary summarize(const std::vector<BatchReport>& reports) {
    ReplaySummary s;
    s.batches = reports.size();
    double hits = 0;
    std::size_t labeled = 0;
    for (const auto& r : reports) {
        switch (r.decision) {
            case Decision::Lag: ++s.lag; break;
            case Decision::AdaptDomain: ++s.adapt_domain; break;
            case Decision::AdaptLabels: ++s.adapt_labels; break;
        }
        if (r.error) ++s.errors;
        if (r.top1) {
            hits += *r.top1 * double(r.labeled);
            labeled += r.labeled;
        }
    }
    if (labeled) s.mean_top1 = hits / double(labeled);
    return s;
}

/// Loads the frames of stream positions [begin, end) and extracts features.
inline PreparedBatch prepare_manifest_batch(const Manifest& m, const std::vector<std::size_t>& positions,
                                            std::size_t batch_index, const TextureConfig& texture) {
    StreamBatch b;
    b.index = batch_index;
    for (auto pos : positions) {
        const auto& r = m.records[pos];
        b.frames.push_back({load_frame(m.resolve(r)), r.timestamp, r.label, r.domain});
    }
    return prepare_batch(b, texture);
}

/// Folds process_batch over consecutive batches of `batch_size` stream
/// frames (the final partial batch is kept). Loading and feature extraction
/// of batch T+1 overlap with the adaptation work of batch T.
inline ReplayResult run_replay(const Manifest& stream, const EngineConfig& cfg, const Registry& reg) {
    cfg.validate();
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < stream.size(); i += cfg.stride) order.push_back(i);
    if (order.empty()) throw InvalidArgument("run_replay: empty stream");

    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t i = 0; i < order.size(); i += cfg.batch_size)
        batches.emplace_back(order.begin() + std::ptrdiff_t(i),
                             order.begin() + std::ptrdiff_t(std::min(order.size(), i + cfg.batch_size)));

    ReplayResult result;
    EngineState state = initial_state(reg, cfg);
    auto load = [&](std::size_t t) { return prepare_manifest_batch(stream, batches[t], t, cfg.texture); };
    std::future<PreparedBatch> next = std::async(std::launch::async, load, std::size_t{0});
    for (std::size_t t = 0; t < batches.size(); ++t) {
        PreparedBatch current = next.get();
        if (t + 1 < batches.size()) next = std::async(std::launch::async, load, t + 1);
        auto outcome = process_batch(state, current, reg, cfg);
        state = std::move(outcome.state);
        result.reports.push_back(std::move(outcome.report));
    }
    result.summary = summarize(result.reports);
    return result;
}

// ---------------------------------------------------------------------------
// Metrics output
// ---------------------------------------------------------------------------

inline constexpr const char* kMetricsHeader =
    "batch_index,t_start,t_end,domain_pred,domain_true,domain_changed,kl,decision,finetune_ms,top1_acc,frames,"
    "infer_ms_p50,infer_ms_p95";

inline std::string format_metrics_csv(const std::vector<BatchReport>& reports) {
    auto num = [](std::optional<double> v, const char* fmt) {
        if (!v) return std::string();
        char buf[64];
        std::snprintf(buf, sizeof buf, fmt, *v);
        return std::string(buf);
    };
    std::ostringstream out;
    out << kMetricsHeader << '\n';
    for (const auto& r : reports) {
        out << r.batch_index << ',' << num(r.t_start, "%.3f") << ',' << num(r.t_end, "%.3f") << ',' << r.domain_pred << ','
            << r.domain_true.value_or("") << ',' << (r.domain_changed ? 1 : 0) << ',' << num(r.kl, "%.6f") << ','
            << decision_name(r.decision) << ',' << num(r.finetune_ms, "%.3f") << ',' << num(r.top1, "%.6f") << ','
            << r.frames << ',' << num(r.infer_ms_p50, "%.4f") << ',' << num(r.infer_ms_p95, "%.4f") << '\n';
    }
    return out.str();
}

inline nlohmann::json summary_json(const ReplaySummary& s, const EngineConfig& cfg) {
    return {{"batches", s.batches},
            {"adapt_domain", s.adapt_domain},
            {"adapt_labels", s.adapt_labels},
            {"lag", s.lag},
            {"errors", s.errors},
            {"mean_top1", s.mean_top1 ? nlohmann::json(*s.mean_top1) : nlohmann::json(nullptr)},
            {"config_echo", to_json(cfg)}};
}

// ---------------------------------------------------------------------------
// Registry file: {forest?, initial_domain?, domains: [{id, train_manifest,
// checkpoint, holdout_fraction?}]}; paths relative to the registry file.
// ---------------------------------------------------------------------------

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError("invalid JSON in " + path.string() + ": " + e.what());
    }
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(1) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

inline Dataset dataset_from_table(const FeatureTable& t) {
    Dataset d;
    d.reserve(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) d.push_back({t.rows[i], t.records[i].label});
    return d;
}

inline Registry load_registry(const std::filesystem::path& path, const EngineConfig& cfg) {
    const auto j = read_json_file(path);
    const auto base = path.parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };
    Registry reg;
    for (const auto& d : j.at("domains")) {
        const auto id = d.at("id").get<std::string>();
        const auto ckpt = checkpoint_from_json(read_json_file(resolve(d.at("checkpoint").get<std::string>())));
        if (!(ckpt.texture == cfg.texture))
            throw InvalidArgument("registry: checkpoint of '" + id + "' was trained on a different GLCM configuration");
        const auto manifest = read_manifest(resolve(d.at("train_manifest").get<std::string>()));
        check_manifest_labels(manifest, int(ckpt.model->num_classes()));
        const auto data = dataset_from_table(extract_manifest_features(manifest, cfg.texture));
        reg.profiles.push_back(make_profile(id, data, d.value("holdout_fraction", 0.2), ckpt.model));
    }
    if (reg.profiles.empty()) throw InvalidArgument("registry: no domains");
    for (const auto& p : reg.profiles)
        if (!p.checkpoint->compatible_with(*reg.profiles.front().checkpoint))
            throw InvalidArgument("registry: profiles disagree on model dimensions");
    if (j.contains("initial_domain")) {
        auto idx = reg.find(j["initial_domain"].get<std::string>());
        if (!idx) throw InvalidArgument("registry: initial_domain is not a registered domain");
        reg.initial = *idx;
    }
    if (j.contains("forest")) {
        reg.forest = forest_from_json(read_json_file(resolve(j["forest"].get<std::string>())));
        if (!(reg.forest->texture == cfg.texture))
            throw InvalidArgument("registry: forest was trained on a different GLCM configuration");
    } else if (cfg.domain_detection && reg.profiles.size() > 1) {
        reg.forest = train_domain_detector(reg.profiles, cfg);
    }
    return reg;
}

}  // namespace edgema
