#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <string>

#include <nlohmann/json.hpp>

#include "edgema/adaptation.hpp"
#include "edgema/error.hpp"
#include "edgema/texture.hpp"

namespace edgema {

enum class ModelPriorInit { SourcePrior, FirstBatch };

/// Knobs of the streaming engine and replay harness.
struct EngineConfig {
    std::size_t batch_size = 250;
    double kl_threshold = 0.1;  // nats; +inf disables label-shift adaptation
    std::size_t domain_check_frames = 10;
    bool domain_detection = true;
    std::size_t stride = 1;
    ModelPriorInit p_m_init = ModelPriorInit::SourcePrior;
    bool record_timings = false;

    FineTuneConfig finetune;
    TextureConfig texture;

    // Detector trained at start-up when the registry carries no forest.
    std::size_t forest_trees = 32;
    std::uint64_t forest_seed = 0;
    std::size_t forest_top_k = 6;
    std::size_t adaboost_rounds = 100;

    std::uint64_t engine_seed = 0;

    void validate() const {
        if (batch_size < 1) throw InvalidArgument("config: batch_size must be >= 1");
        if (!(kl_threshold >= 0)) throw InvalidArgument("config: kl_threshold_D must be >= 0");
        if (domain_check_frames < 1) throw InvalidArgument("config: domain_check_frames must be >= 1");
        if (stride < 1) throw InvalidArgument("config: stride must be >= 1");
        finetune.validate();
        texture.grid();
        if (texture.levels < 2 || texture.levels > 256) throw InvalidArgument("config: glcm.levels must lie in [2, 256]");
    }

    /// Baseline mode: never detect domains, never adapt.
    EngineConfig as_static() const {
        EngineConfig c = *this;
        c.domain_detection = false;
        c.kl_threshold = std::numeric_limits<double>::infinity();
        return c;
    }
};

namespace detail {

inline double threshold_from_json(const nlohmann::json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "infinity" || s == "Infinity") return std::numeric_limits<double>::infinity();
    }
    throw InvalidArgument("config: kl_threshold_D must be a number or \"inf\"");
}

inline nlohmann::json threshold_to_json(double d) {
    if (std::isinf(d)) return "inf";
    return d;
}

}  // namespace detail

inline nlohmann::json to_json(const EngineConfig& c) {
    return {{"batch_size", c.batch_size},
            {"kl_threshold_D", detail::threshold_to_json(c.kl_threshold)},
            {"domain_check_frames", c.domain_check_frames},
            {"domain_detection", c.domain_detection},
            {"stride", c.stride},
            {"p_m_init", c.p_m_init == ModelPriorInit::SourcePrior ? "source_prior" : "first_batch"},
            {"record_timings", c.record_timings},
            {"finetune",
             {{"fraction", c.finetune.fraction},
              {"iterations", c.finetune.iterations},
              {"learning_rate", c.finetune.learning_rate}}},
            {"glcm", {{"levels", c.texture.levels}, {"grid", c.texture.grid_name}}},
            {"forest", {{"trees", c.forest_trees}, {"seed", c.forest_seed}, {"top_k", c.forest_top_k},
                        {"adaboost_rounds", c.adaboost_rounds}}},
            {"seeds", {{"engine", c.engine_seed}}}};
}

/// Missing keys keep their defaults.
inline EngineConfig engine_config_from_json(const nlohmann::json& j) {
    EngineConfig c;
    c.batch_size = j.value("batch_size", c.batch_size);
    if (j.contains("kl_threshold_D")) c.kl_threshold = detail::threshold_from_json(j["kl_threshold_D"]);
    c.domain_check_frames = j.value("domain_check_frames", c.domain_check_frames);
    c.domain_detection = j.value("domain_detection", c.domain_detection);
    c.stride = j.value("stride", c.stride);
    c.record_timings = j.value("record_timings", c.record_timings);
    if (j.contains("p_m_init")) {
        const auto s = j["p_m_init"].get<std::string>();
        if (s == "source_prior") c.p_m_init = ModelPriorInit::SourcePrior;
        else if (s == "first_batch") c.p_m_init = ModelPriorInit::FirstBatch;
        else throw InvalidArgument("config: p_m_init must be source_prior|first_batch");
    }
    if (j.contains("finetune")) {
        const auto& f = j["finetune"];
        c.finetune.fraction = f.value("fraction", c.finetune.fraction);
        c.finetune.iterations = f.value("iterations", c.finetune.iterations);
        c.finetune.learning_rate = f.value("learning_rate", c.finetune.learning_rate);
    }
    if (j.contains("glcm")) {
        c.texture.levels = j["glcm"].value("levels", c.texture.levels);
        c.texture.grid_name = j["glcm"].value("grid", c.texture.grid_name);
    }
    if (j.contains("forest")) {
        const auto& f = j["forest"];
        c.forest_trees = f.value("trees", c.forest_trees);
        c.forest_seed = f.value("seed", c.forest_seed);
        c.forest_top_k = f.value("top_k", c.forest_top_k);
        c.adaboost_rounds = f.value("adaboost_rounds", c.adaboost_rounds);
    }
    if (j.contains("seeds")) c.engine_seed = j["seeds"].value("engine", c.engine_seed);
    c.validate();
    return c;
}

/// EDGEMA_SEED, when set, replaces every seed in the config.
inline void apply_seed_override(EngineConfig& c) {
    if (const char* s = std::getenv("EDGEMA_SEED"); s && *s) {
        char* end = nullptr;
        const auto v = std::strtoull(s, &end, 10);
        if (end == s || *end != '\0') throw InvalidArgument("EDGEMA_SEED must be an unsigned integer");
        c.engine_seed = v;
        c.forest_seed = v;
    }
}

}  // namespace edgema
