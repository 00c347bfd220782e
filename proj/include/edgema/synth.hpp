#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "edgema/error.hpp"
#include "edgema/image.hpp"
#include "edgema/manifest.hpp"

namespace edgema {

/// Photometric condition applied on top of a clean class texture:
/// v' = 255 * gain * (v/255)^gamma + N(0, noise_sigma).
struct SynthDomain {
    std::string name;
    double gain = 1.0;
    double noise_sigma = 0.0;
    double gamma = 1.0;
};

enum class TextureKind { Stripes, Checker, Blobs };

/// Procedural object class. Stripes use `period` and `orientation`
/// (0: bands vary along columns, 90: along rows); checkers use `size`;
/// blobs scatter discs of `radius` with `density` discs per pixel.
struct SynthClass {
    std::string name;
    TextureKind kind = TextureKind::Stripes;
    double period = 8;
    int orientation = 0;
    int size = 4;
    double density = 0.01;
    int radius = 3;
};

struct SynthSegment {
    std::size_t domain = 0;
    std::vector<double> mix;  // class probabilities
    std::size_t length = 0;   // frames; 0 = frames_per_segment
};

struct SynthSpec {
    std::uint64_t seed = 1;
    int width = 64;
    int height = 64;
    double fps = 25.0;
    std::size_t frames_per_segment = 100;
    std::vector<SynthDomain> domains;
    std::vector<SynthClass> classes;
    std::vector<SynthSegment> schedule;

    void validate() const {
        if (width < 2 || height < 2) throw InvalidArgument("synth: frames must be at least 2x2");
        if (!(fps > 0)) throw InvalidArgument("synth: fps must be positive");
        if (domains.empty() || classes.empty()) throw InvalidArgument("synth: need at least one domain and one class");
        if (schedule.empty()) throw InvalidArgument("synth: empty schedule");
        for (const auto& s : schedule) {
            if (s.domain >= domains.size()) throw InvalidArgument("synth: segment references unknown domain");
            if (s.mix.size() != classes.size()) throw InvalidArgument("synth: class mix length != class count");
            double sum = 0;
            for (double p : s.mix) {
                if (!(p >= 0)) throw InvalidArgument("synth: negative class-mix entry");
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-6) throw InvalidArgument("synth: class mix is not on the simplex");
        }
        for (const auto& d : domains)
            if (!(d.gain >= 0) || !(d.noise_sigma >= 0) || !(d.gamma > 0)) throw InvalidArgument("synth: bad domain parameters");
    }

    std::size_t segment_length(const SynthSegment& s) const { return s.length ? s.length : frames_per_segment; }
    std::size_t total_frames() const {
        std::size_t n = 0;
        for (const auto& s : schedule) n += segment_length(s);
        return n;
    }
};

namespace detail {

inline std::mt19937_64 frame_rng(std::uint64_t seed, std::size_t frame) {
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(frame),
                      std::uint32_t(std::uint64_t(frame) >> 32), 0x5e17u};
    return std::mt19937_64(seq);
}

inline std::uint8_t to_byte(double v) { return std::uint8_t(std::clamp(std::lround(v), 0L, 255L)); }

}  // namespace detail

/// Clean texture of one class; brightness, contrast and phase vary per frame.
inline GrayFrame render_class_texture(const SynthClass& c, int width, int height, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double base = 95.0 + 60.0 * unit(rng);
    const double amp = 35.0 + 25.0 * unit(rng);
    GrayFrame f(width, height);
    switch (c.kind) {
        case TextureKind::Stripes: {
            const double period = std::max(2.0, c.period * (0.85 + 0.3 * unit(rng)));
            const double phase = period * unit(rng);
            for (int r = 0; r < height; ++r)
                for (int q = 0; q < width; ++q) {
                    const double coord = c.orientation == 90 ? r : q;
                    f.at(r, q) = detail::to_byte(base + amp * std::sin(2 * std::numbers::pi * (coord + phase) / period));
                }
            break;
        }
        case TextureKind::Checker: {
            const int size = std::max(1, c.size + int(unit(rng) * 3) - 1);
            const int off_r = int(unit(rng) * size), off_c = int(unit(rng) * size);
            for (int r = 0; r < height; ++r)
                for (int q = 0; q < width; ++q) {
                    const bool hi = (((r + off_r) / size) + ((q + off_c) / size)) % 2 == 0;
                    f.at(r, q) = detail::to_byte(base + (hi ? amp : -amp));
                }
            break;
        }
        case TextureKind::Blobs: {
            const std::uint8_t bg = detail::to_byte(base - amp / 2), fg = detail::to_byte(base + amp);
            for (auto& v : f.intensities()) v = bg;
            const auto count = std::size_t(std::max(1.0, c.density * width * height * (0.8 + 0.4 * unit(rng))));
            for (std::size_t b = 0; b < count; ++b) {
                const int cr = int(unit(rng) * height), cc = int(unit(rng) * width);
                const int rad = std::max(1, c.radius);
                for (int r = std::max(0, cr - rad); r <= std::min(height - 1, cr + rad); ++r)
                    for (int q = std::max(0, cc - rad); q <= std::min(width - 1, cc + rad); ++q)
                        if ((r - cr) * (r - cr) + (q - cc) * (q - cc) <= rad * rad) f.at(r, q) = fg;
            }
            break;
        }
    }
    return f;
}

inline GrayFrame apply_domain(const GrayFrame& clean, const SynthDomain& d, std::mt19937_64& rng) {
    GrayFrame out = clean;
    const bool photometric = d.gain != 1.0 || d.gamma != 1.0;
    std::normal_distribution<double> noise(0.0, d.noise_sigma > 0 ? d.noise_sigma : 1.0);
    for (auto& v : out.intensities()) {
        double x = v;
        if (photometric) x = 255.0 * d.gain * std::pow(x / 255.0, d.gamma);
        if (d.noise_sigma > 0) x += noise(rng);
        v = detail::to_byte(x);
    }
    return out;
}

struct SynthFrame {
    GrayFrame frame;
    int label = 0;
    std::size_t domain = 0;
};

/// Renders global frame `index` (which also fixes its segment) without disk I/O.
inline SynthFrame synth_frame(const SynthSpec& spec, std::size_t index) {
    std::size_t seg = 0, start = 0;
    while (seg < spec.schedule.size() && index >= start + spec.segment_length(spec.schedule[seg]))
        start += spec.segment_length(spec.schedule[seg++]);
    if (seg == spec.schedule.size()) throw InvalidArgument("synth_frame: index beyond schedule");
    const auto& s = spec.schedule[seg];

    auto rng = detail::frame_rng(spec.seed, index);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);
    int label = int(s.mix.size()) - 1;
    double acc = 0;
    for (std::size_t c = 0; c < s.mix.size(); ++c) {
        acc += s.mix[c];
        if (u < acc && s.mix[c] > 0) {
            label = int(c);
            break;
        }
    }
    const GrayFrame clean = render_class_texture(spec.classes[std::size_t(label)], spec.width, spec.height, rng);
    return {apply_domain(clean, spec.domains[s.domain], rng), label, s.domain};
}

inline std::string synth_frame_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%06zu.pgm", index);
    return buf;
}

/// Writes every scheduled frame as PGM plus `manifest.jsonl` into out_dir.
inline Manifest synth_generate(const SynthSpec& spec, const std::filesystem::path& out_dir) {
    spec.validate();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    Manifest m;
    m.base_dir = out_dir;
    const std::size_t n = spec.total_frames();
    m.records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto f = synth_frame(spec, i);
        const auto name = synth_frame_name(i);
        write_pgm(out_dir / name, f.frame);
        m.records.push_back({name, f.label, double(i) / spec.fps, spec.domains[f.domain].name});
    }
    write_manifest(out_dir / "manifest.jsonl", m.records);
    return m;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline TextureKind texture_kind_from_name(const std::string& s) {
    if (s == "stripes") return TextureKind::Stripes;
    if (s == "checker") return TextureKind::Checker;
    if (s == "blobs") return TextureKind::Blobs;
    throw InvalidArgument("synth: unknown texture kind '" + s + "'");
}

inline std::string texture_kind_name(TextureKind k) {
    switch (k) {
        case TextureKind::Stripes: return "stripes";
        case TextureKind::Checker: return "checker";
        case TextureKind::Blobs: return "blobs";
    }
    return "?";
}

inline nlohmann::json to_json(const SynthSpec& s) {
    nlohmann::json doms = nlohmann::json::array(), classes = nlohmann::json::array(), sched = nlohmann::json::array();
    for (const auto& d : s.domains)
        doms.push_back({{"name", d.name}, {"gain", d.gain}, {"noise_sigma", d.noise_sigma}, {"gamma", d.gamma}});
    for (const auto& c : s.classes)
        classes.push_back({{"name", c.name}, {"kind", texture_kind_name(c.kind)}, {"period", c.period},
                           {"orientation", c.orientation}, {"size", c.size}, {"density", c.density}, {"radius", c.radius}});
    for (const auto& g : s.schedule) sched.push_back({{"domain", g.domain}, {"mix", g.mix}, {"length", g.length}});
    return {{"seed", s.seed}, {"width", s.width}, {"height", s.height}, {"fps", s.fps},
            {"frames_per_segment", s.frames_per_segment}, {"domains", doms}, {"classes", classes}, {"schedule", sched}};
}

inline SynthSpec synth_spec_from_json(const nlohmann::json& j) {
    SynthSpec s;
    s.seed = j.value("seed", std::uint64_t{1});
    s.width = j.value("width", 64);
    s.height = j.value("height", 64);
    s.fps = j.value("fps", 25.0);
    s.frames_per_segment = j.value("frames_per_segment", std::size_t{100});
    for (const auto& d : j.at("domains"))
        s.domains.push_back({d.at("name").get<std::string>(), d.value("gain", 1.0), d.value("noise_sigma", 0.0),
                             d.value("gamma", 1.0)});
    for (const auto& c : j.at("classes")) {
        SynthClass k;
        k.kind = texture_kind_from_name(c.at("kind").get<std::string>());
        k.name = c.value("name", texture_kind_name(k.kind));
        k.period = c.value("period", 8.0);
        k.orientation = c.value("orientation", 0);
        k.size = c.value("size", 4);
        k.density = c.value("density", 0.01);
        k.radius = c.value("radius", 3);
        s.classes.push_back(std::move(k));
    }
    for (const auto& g : j.at("schedule")) {
        SynthSegment seg;
        const auto& dom = g.at("domain");
        if (dom.is_string()) {
            const auto name = dom.get<std::string>();
            auto it = std::find_if(s.domains.begin(), s.domains.end(), [&](const auto& d) { return d.name == name; });
            if (it == s.domains.end()) throw InvalidArgument("synth: schedule names unknown domain '" + name + "'");
            seg.domain = std::size_t(it - s.domains.begin());
        } else {
            seg.domain = dom.get<std::size_t>();
        }
        seg.mix = g.contains("mix") ? g["mix"].get<std::vector<double>>()
                                    : std::vector<double>(s.classes.size(), 1.0 / double(s.classes.size()));
        seg.length = g.value("length", std::size_t{0});
        s.schedule.push_back(std::move(seg));
    }
    s.validate();
    return s;
}

}  // namespace edgema
