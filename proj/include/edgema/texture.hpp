#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "edgema/error.hpp"
#include "edgema/image.hpp"

namespace edgema {

/// A frame as it arrives on the stream.
using Frame = std::variant<GrayFrame, RgbFrame>;

// ---------------------------------------------------------------------------
// Pre-processing
// ---------------------------------------------------------------------------

/// Luminance of one pixel: round(0.299 R + 0.587 G + 0.114 B), half away from zero.
inline std::uint8_t luminance(Rgb p) noexcept {
    const double g = 0.299 * p.r + 0.587 * p.g + 0.114 * p.b;
    const long v = std::lround(g);
    return static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
}

inline GrayFrame to_grayscale(const RgbFrame& frame) {
    std::vector<std::uint8_t> out;
    out.reserve(frame.pixels().size());
    for (const Rgb& p : frame.pixels()) out.push_back(luminance(p));
    return GrayFrame(frame.width(), frame.height(), std::move(out));
}

inline GrayFrame to_grayscale(const Frame& frame) {
    if (const auto* g = std::get_if<GrayFrame>(&frame)) return *g;
    return to_grayscale(std::get<RgbFrame>(frame));
}

/// Maps 0..255 onto 0..levels-1 by floor(g * levels / 256).
inline GrayFrame quantize(const GrayFrame& frame, int levels) {
    if (levels < 2 || levels > 256) throw InvalidArgument("quantize: levels must lie in [2, 256]");
    GrayFrame out = frame;
    for (auto& v : out.intensities()) v = static_cast<std::uint8_t>((unsigned(v) * unsigned(levels)) >> 8);
    return out;
}

// ---------------------------------------------------------------------------
// Co-occurrence matrices
// ---------------------------------------------------------------------------

enum class Angle : int { Deg0 = 0, Deg45 = 45, Deg90 = 90, Deg135 = 135 };

inline constexpr std::array<Angle, 4> kAllAngles = {Angle::Deg0, Angle::Deg45, Angle::Deg90, Angle::Deg135};

inline Angle angle_from_degrees(int degrees) {
    switch (degrees) {
        case 0: return Angle::Deg0;
        case 45: return Angle::Deg45;
        case 90: return Angle::Deg90;
        case 135: return Angle::Deg135;
        default: throw InvalidArgument("GLCM angle must be one of 0, 45, 90, 135; got " + std::to_string(degrees));
    }
}

struct GlcmOffset {
    Angle angle = Angle::Deg0;
    int distance = 1;

    GlcmOffset() = default;
    GlcmOffset(Angle a, int d) : angle(a), distance(d) {
        if (d < 1) throw InvalidArgument("GLCM distance must be >= 1");
    }

    /// Row step (dx) and column step (dy) of the neighbour pixel.
    int row_step() const noexcept {
        switch (angle) {
            case Angle::Deg0: return 0;
            default: return -distance;
        }
    }
    int col_step() const noexcept {
        switch (angle) {
            case Angle::Deg0:
            case Angle::Deg45: return distance;
            case Angle::Deg90: return 0;
            case Angle::Deg135: return -distance;
        }
        return 0;
    }

    friend bool operator==(const GlcmOffset&, const GlcmOffset&) = default;
};

/// Co-occurrence matrix of one offset.
///
/// `counts` holds the directed pair counts exactly as enumerated over the
/// image. `probs` is the symmetrized (counts + counts^T) matrix normalized to
/// unit mass, or all zeros when no pair fits inside the frame.
struct Glcm {
    int levels = 0;
    std::vector<std::uint64_t> counts;
    std::vector<double> probs;

    std::uint64_t count(int i, int j) const { return counts[std::size_t(i) * levels + j]; }
    double prob(int i, int j) const { return probs[std::size_t(i) * levels + j]; }
    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (auto c : counts) t += c;
        return t;
    }
    bool empty() const { return total() == 0; }
};

/// Fills `probs` from `counts`.
inline void normalize_symmetric(Glcm& m) {
    const int q = m.levels;
    m.probs.assign(std::size_t(q) * q, 0.0);
    const std::uint64_t total = m.total();
    if (total == 0) return;
    const double denom = 2.0 * double(total);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j)
            m.probs[std::size_t(i) * q + j] = double(m.count(i, j) + m.count(j, i)) / denom;
}

/// Counts pixel pairs (I(p,q), I(p+dx, q+dy)) with both ends inside the frame.
/// `frame` must already be quantized to [0, levels).
inline Glcm compute_glcm(const GrayFrame& frame, GlcmOffset offset, int levels) {
    if (levels < 2 || levels > 256) throw InvalidArgument("compute_glcm: levels must lie in [2, 256]");
    Glcm m;
    m.levels = levels;
    m.counts.assign(std::size_t(levels) * levels, 0);

    const int h = frame.height();
    const int w = frame.width();
    const int dx = offset.row_step();
    const int dy = offset.col_step();
    const int row_lo = std::max(0, -dx), row_hi = std::min(h, h - dx);
    const int col_lo = std::max(0, -dy), col_hi = std::min(w, w - dy);
    const auto px = frame.intensities();
    for (int p = row_lo; p < row_hi; ++p) {
        const std::uint8_t* a = px.data() + std::size_t(p) * w;
        const std::uint8_t* b = px.data() + std::size_t(p + dx) * w;
        for (int q = col_lo; q < col_hi; ++q) {
            const int gi = a[q], gj = b[q + dy];
            if (gi >= levels || gj >= levels)
                throw InvalidArgument("compute_glcm: intensity exceeds quantization levels");
            ++m.counts[std::size_t(gi) * levels + gj];
        }
    }
    normalize_symmetric(m);
    return m;
}

// ---------------------------------------------------------------------------
// Texture properties
// ---------------------------------------------------------------------------

enum class TextureProperty : int {
    Contrast = 0,
    Correlation,
    Homogeneity,
    AngularSecondMoment,
    Dissimilarity,
    Energy,
};

inline constexpr std::size_t kPropertyCount = 6;
inline constexpr std::array<TextureProperty, kPropertyCount> kAllProperties = {
    TextureProperty::Contrast,      TextureProperty::Correlation, TextureProperty::Homogeneity,
    TextureProperty::AngularSecondMoment, TextureProperty::Dissimilarity, TextureProperty::Energy,
};

inline std::string_view property_name(TextureProperty p) {
    static constexpr std::array<std::string_view, kPropertyCount> names = {
        "contrast", "correlation", "homogeneity", "asm", "dissimilarity", "energy"};
    return names[std::size_t(p)];
}

inline TextureProperty property_from_name(std::string_view name) {
    for (auto p : kAllProperties)
        if (property_name(p) == name) return p;
    throw InvalidArgument("unknown texture property: " + std::string(name));
}

struct TexturePropertySet {
    double contrast = 0;
    double correlation = 0;
    double homogeneity = 0;
    double angular_second_moment = 0;
    double dissimilarity = 0;
    double energy = 0;

    double operator[](TextureProperty p) const {
        switch (p) {
            case TextureProperty::Contrast: return contrast;
            case TextureProperty::Correlation: return correlation;
            case TextureProperty::Homogeneity: return homogeneity;
            case TextureProperty::AngularSecondMoment: return angular_second_moment;
            case TextureProperty::Dissimilarity: return dissimilarity;
            case TextureProperty::Energy: return energy;
        }
        return 0;
    }
};

/// Haralick statistics of the normalized matrix. Correlation is 1 when either
/// marginal has zero variance (including the empty matrix).
inline TexturePropertySet texture_properties(const Glcm& m) {
    const int q = m.levels;
    TexturePropertySet s;
    double mu_i = 0, mu_j = 0;
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) {
            const double p = m.prob(i, j);
            if (p == 0) continue;
            const double diff = double(i - j);
            s.contrast += p * diff * diff;
            s.dissimilarity += p * std::abs(diff);
            s.homogeneity += p / (1.0 + diff * diff);
            s.angular_second_moment += p * p;
            mu_i += i * p;
            mu_j += j * p;
        }
    double var_i = 0, var_j = 0, cov = 0;
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) {
            const double p = m.prob(i, j);
            if (p == 0) continue;
            var_i += p * (i - mu_i) * (i - mu_i);
            var_j += p * (j - mu_j) * (j - mu_j);
            cov += p * (i - mu_i) * (j - mu_j);
        }
    const double denom = std::sqrt(var_i) * std::sqrt(var_j);
    s.correlation = denom > 1e-15 ? std::clamp(cov / denom, -1.0, 1.0) : 1.0;
    s.energy = std::sqrt(s.angular_second_moment);
    return s;
}

// ---------------------------------------------------------------------------
// Feature vectors
// ---------------------------------------------------------------------------

struct FeatureDescriptor {
    Angle angle = Angle::Deg0;
    int distance = 1;
    TextureProperty property = TextureProperty::Contrast;

    std::string name() const {
        return std::string(property_name(property)) + "@" + std::to_string(int(angle)) + "deg/d" +
               std::to_string(distance);
    }
    friend bool operator==(const FeatureDescriptor&, const FeatureDescriptor&) = default;
};

struct FeatureVector {
    std::vector<double> values;
    std::vector<FeatureDescriptor> descriptors;
    /// False when some offset found no in-bounds pixel pair.
    bool valid = true;

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

using GlcmGrid = std::vector<GlcmOffset>;

/// Every angle with distances 1..30.
inline GlcmGrid full_grid() {
    GlcmGrid g;
    for (Angle a : kAllAngles)
        for (int d = 1; d <= 30; ++d) g.emplace_back(a, d);
    return g;
}

/// The two strongest distances per angle.
inline GlcmGrid reduced_grid() {
    return {
        {Angle::Deg0, 5},  {Angle::Deg0, 9},  {Angle::Deg45, 4},  {Angle::Deg45, 11},
        {Angle::Deg90, 2}, {Angle::Deg90, 4}, {Angle::Deg135, 2}, {Angle::Deg135, 6},
    };
}

inline GlcmGrid grid_by_name(std::string_view name) {
    if (name == "full") return full_grid();
    if (name == "reduced") return reduced_grid();
    throw InvalidArgument("unknown grid '" + std::string(name) + "' (expected full|reduced)");
}

inline std::vector<FeatureDescriptor> describe_grid(const GlcmGrid& grid) {
    std::vector<FeatureDescriptor> out;
    out.reserve(grid.size() * kPropertyCount);
    for (const auto& off : grid)
        for (auto p : kAllProperties) out.push_back({off.angle, off.distance, p});
    return out;
}

/// Quantizes `frame` to `levels` and emits six properties per offset, in grid
/// order (property order as in TexturePropertySet).
inline FeatureVector extract_features(const GrayFrame& frame, const GlcmGrid& grid, int levels) {
    if (grid.empty()) throw InvalidArgument("extract_features: empty GLCM grid");
    if (frame.width() < 2 || frame.height() < 2)
        throw InvalidArgument("extract_features: frame must be at least 2x2");
    const GrayFrame q = quantize(frame, levels);
    FeatureVector fv;
    fv.values.reserve(grid.size() * kPropertyCount);
    fv.descriptors = describe_grid(grid);
    for (const auto& off : grid) {
        const Glcm m = compute_glcm(q, off, levels);
        if (m.empty()) fv.valid = false;
        const auto props = texture_properties(m);
        for (auto p : kAllProperties) fv.values.push_back(props[p]);
    }
    return fv;
}

inline FeatureVector extract_features(const Frame& frame, const GlcmGrid& grid, int levels) {
    return extract_features(to_grayscale(frame), grid, levels);
}

/// Quantization depth and offsets that define a feature space.
struct TextureConfig {
    int levels = 32;
    std::string grid_name = "reduced";

    GlcmGrid grid() const { return grid_by_name(grid_name); }
    std::size_t feature_count() const { return grid().size() * kPropertyCount; }
    friend bool operator==(const TextureConfig&, const TextureConfig&) = default;
};

inline FeatureVector extract_features(const Frame& frame, const TextureConfig& cfg) {
    return extract_features(frame, cfg.grid(), cfg.levels);
}

}  // namespace edgema
