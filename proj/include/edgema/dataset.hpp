#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "edgema/error.hpp"

namespace edgema {

/// One feature row with its class index.
struct Sample {
    std::vector<double> x;
    int label = 0;
};

using Dataset = std::vector<Sample>;

/// 1 + the largest label, or 0 for an empty set.
inline int infer_class_count(std::span<const Sample> data) {
    int k = 0;
    for (const auto& s : data) {
        if (s.label < 0) throw InvalidArgument("negative class label");
        k = std::max(k, s.label + 1);
    }
    return k;
}

inline int distinct_class_count(std::span<const Sample> data) {
    std::vector<bool> seen(std::size_t(infer_class_count(data)), false);
    int n = 0;
    for (const auto& s : data)
        if (!seen[std::size_t(s.label)]) {
            seen[std::size_t(s.label)] = true;
            ++n;
        }
    return n;
}

/// Index of the largest entry; ties go to the lowest index.
template <class T>
std::size_t argmax_lowest(std::span<const T> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return best;
}

template <class T>
std::size_t argmax_lowest(const std::vector<T>& values) {
    return argmax_lowest(std::span<const T>(values));
}

}  // namespace edgema
