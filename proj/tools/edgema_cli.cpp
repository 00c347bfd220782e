// Command-line front end: synthetic data, feature extraction, detector and
// model training, and stream replay.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "edgema/edgema.hpp"

namespace fs = std::filesystem;
using namespace edgema;

namespace {

std::optional<std::uint64_t> seed_from_env() {
    if (const char* s = std::getenv("EDGEMA_SEED"); s && *s) return std::stoull(s);
    return std::nullopt;
}

// Domain strings in order of first appearance.
std::vector<std::string> domain_labels_of(const FeatureTable& t) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < t.records.size(); ++i) {
        if (!t.records[i].domain) throw InvalidArgument("record " + std::to_string(i + 1) + " has no domain");
        if (std::find(labels.begin(), labels.end(), *t.records[i].domain) == labels.end())
            labels.push_back(*t.records[i].domain);
    }
    return labels;
}

Dataset domain_dataset(const FeatureTable& t, const std::vector<std::string>& labels) {
    Dataset d;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        auto it = std::find(labels.begin(), labels.end(), t.records[i].domain.value_or(""));
        if (it == labels.end()) throw InvalidArgument("record " + std::to_string(i + 1) + ": unknown domain");
        d.push_back({t.rows[i], int(it - labels.begin())});
    }
    return d;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Drift-adaptive streaming inference toolkit"};
    app.require_subcommand(1);

    // synth
    std::string synth_spec, synth_out;
    auto* synth = app.add_subcommand("synth", "Render a synthetic multi-domain frame stream");
    synth->add_option("--spec", synth_spec, "Synthetic dataset spec (JSON)")->required();
    synth->add_option("--out", synth_out, "Output directory")->required();

    // features extract
    std::string fx_manifest, fx_grid = "reduced", fx_out;
    int fx_levels = 32;
    auto* features = app.add_subcommand("features", "Texture feature tools");
    features->require_subcommand(1);
    auto* extract = features->add_subcommand("extract", "Extract GLCM texture features for a manifest");
    extract->add_option("--manifest", fx_manifest)->required();
    extract->add_option("--grid", fx_grid)->check(CLI::IsMember({"full", "reduced"}));
    extract->add_option("--levels", fx_levels)->check(CLI::Range(2, 256));
    extract->add_option("--out", fx_out)->required();

    // select
    std::string sel_features, sel_out, sel_mode = "alpha";
    std::size_t sel_rounds = 100, sel_k = 6;
    auto* select = app.add_subcommand("select", "Rank features by AdaBoost importance over domain labels");
    select->add_option("--features", sel_features)->required();
    select->add_option("--rounds", sel_rounds);
    select->add_option("--top-k", sel_k);
    select->add_option("--importance", sel_mode)->check(CLI::IsMember({"alpha", "count"}));
    select->add_option("--out", sel_out)->required();

    // domain train / eval
    std::string dt_features, dt_subset, dt_out, de_forest, de_manifest;
    std::size_t dt_trees = 32, de_restarts = 1;
    std::uint64_t dt_seed = 0;
    auto* domain = app.add_subcommand("domain", "Domain detector");
    domain->require_subcommand(1);
    auto* dtrain = domain->add_subcommand("train", "Train the random-forest domain detector");
    dtrain->add_option("--features", dt_features)->required();
    dtrain->add_option("--subset", dt_subset)->required();
    dtrain->add_option("--trees", dt_trees);
    dtrain->add_option("--seed", dt_seed);
    dtrain->add_option("--out", dt_out)->required();
    auto* deval = domain->add_subcommand("eval", "Accuracy of a detector on a labeled manifest");
    deval->add_option("--forest", de_forest)->required();
    deval->add_option("--manifest", de_manifest)->required();

    // model train
    std::string mt_manifest, mt_out, mt_grid = "reduced", mt_kind = "softmax";
    int mt_levels = 32, mt_classes = 0;
    double mt_holdout = 0.2, mt_lr = 0.5;
    std::size_t mt_iterations = 400;
    auto* model = app.add_subcommand("model", "Lightweight model");
    model->require_subcommand(1);
    auto* mtrain = model->add_subcommand("train", "Train the built-in classifier on texture features");
    mtrain->add_option("--manifest", mt_manifest)->required();
    mtrain->add_option("--out", mt_out)->required();
    mtrain->add_option("--grid", mt_grid)->check(CLI::IsMember({"full", "reduced"}));
    mtrain->add_option("--levels", mt_levels)->check(CLI::Range(2, 256));
    mtrain->add_option("--classes", mt_classes, "Number of classes (default: 1 + largest label)");
    mtrain->add_option("--holdout-fraction", mt_holdout, "Trailing fraction reserved for confusion estimates");
    mtrain->add_option("--iterations", mt_iterations);
    mtrain->add_option("--learning-rate", mt_lr);
    mtrain->add_option("--kind", mt_kind)->check(CLI::IsMember({"softmax", "mlp"}));

    // replay
    std::string rp_stream, rp_config, rp_registry, rp_out, rp_summary;
    bool rp_static = false;
    auto* replay = app.add_subcommand("replay", "Replay a frame stream through the adaptation engine");
    replay->add_option("--stream", rp_stream)->required();
    replay->add_option("--config", rp_config)->required();
    replay->add_option("--registry", rp_registry)->required();
    replay->add_option("--out", rp_out)->required();
    replay->add_option("--summary", rp_summary)->required();
    replay->add_flag("--static", rp_static, "Disable domain detection and adaptation (baseline)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) {
            auto spec = synth_spec_from_json(read_json_file(synth_spec));
            if (auto s = seed_from_env()) spec.seed = *s;
            const auto m = synth_generate(spec, synth_out);
            std::printf("wrote %zu frames to %s\n", m.size(), synth_out.c_str());
        } else if (*extract) {
            const TextureConfig tex{fx_levels, fx_grid};
            const auto table = extract_manifest_features(read_manifest(fx_manifest), tex);
            write_json_file(fx_out, to_json(table));
            std::printf("extracted %zu x %zu features\n", table.rows.size(), table.descriptors.size());
        } else if (*select) {
            const auto table = feature_table_from_json(read_json_file(sel_features));
            const auto labels = domain_labels_of(table);
            AdaBoostOptions opts;
            opts.rounds = sel_rounds;
            opts.importance_mode = sel_mode == "count" ? ImportanceMode::Count : ImportanceMode::Alpha;
            const auto ens = train_adaboost(domain_dataset(table, labels), opts);
            FeatureSubset subset{ens.importance.scores, select_top_k(ens.importance, sel_k)};
            write_json_file(sel_out, to_json(subset));
            std::printf("selected");
            for (auto i : subset.selected) std::printf(" %zu(%s)", i, table.descriptors[i].name().c_str());
            std::printf("\n");
        } else if (*dtrain) {
            const auto table = feature_table_from_json(read_json_file(dt_features));
            const auto subset = feature_subset_from_json(read_json_file(dt_subset));
            const auto labels = domain_labels_of(table);
            ForestOptions opts;
            opts.n_trees = dt_trees;
            opts.seed = seed_from_env().value_or(dt_seed);
            auto forest = train_forest(domain_dataset(table, labels), subset.selected, labels, opts);
            forest.texture = table.texture;
            write_json_file(dt_out, to_json(forest));
            std::printf("trained %zu trees over %zu features\n", forest.n_trees(), forest.feature_subset.size());
        } else if (*deval) {
            const auto forest = forest_from_json(read_json_file(de_forest));
            const auto table = extract_manifest_features(read_manifest(de_manifest), forest.texture);
            const auto acc = evaluate_detector(forest, domain_dataset(table, forest.domain_labels));
            std::printf("accuracy %.4f (n=%zu)\n", acc, table.rows.size());
        } else if (*mtrain) {
            const TextureConfig tex{mt_levels, mt_grid};
            const auto all = dataset_from_table(extract_manifest_features(read_manifest(mt_manifest), tex));
            const int k = mt_classes > 0 ? mt_classes : infer_class_count(all);
            if (k < 2) throw InvalidArgument("model train: need at least two classes");
            for (const auto& s : all)
                if (s.label >= k) throw InvalidArgument("model train: label outside --classes");
            const auto [train, holdout] = split_holdout(all, mt_holdout);
            std::unique_ptr<Model> m;
            if (mt_kind == "softmax") {
                m = train_softmax(train, std::size_t(k), {mt_iterations, mt_lr});
            } else {
                MlpModel mlp(train.front().x.size(), std::size_t(k), 32, seed_from_env().value_or(0));
                mlp.set_scaler(InputScaler::fit(train));
                m = gradient_descent(mlp, train, ImportanceWeights::ones(std::size_t(k)), mt_iterations, mt_lr);
            }
            std::size_t hits = 0;
            for (const auto& s : holdout) hits += m->predict(s.x) == s.label;
            write_json_file(mt_out, to_json(*m, tex));
            std::printf("holdout accuracy %.4f (n=%zu)\n", double(hits) / double(holdout.size()), holdout.size());
        } else if (*replay) {
            auto cfg = engine_config_from_json(read_json_file(rp_config));
            apply_seed_override(cfg);
            if (rp_static) cfg = cfg.as_static();
            const auto reg = load_registry(rp_registry, cfg);
            const auto result = run_replay(read_manifest(rp_stream), cfg, reg);
            write_text(rp_out, format_metrics_csv(result.reports));
            write_json_file(rp_summary, summary_json(result.summary, cfg));
            for (const auto& r : result.reports)
                if (r.error) std::fprintf(stderr, "batch %zu: %s\n", r.batch_index, r.error->c_str());
            std::printf("%zu batches, mean top-1 %.4f\n", result.summary.batches, result.summary.mean_top1.value_or(0.0));
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "edgema: %s\n", e.what());
        return 1;
    }
    return 0;
}
