#pragma once

#include <cstdint>

#include "xdcc/dataset.hpp"

namespace xdcc::synth {

struct MultiLabelOptions {
    std::size_t rows = 593;
    std::size_t features = 72;
    std::size_t labels = 6;
    /// Number of informative latent factors shared by labels.
    std::size_t factors = 4;
    /// Probability of a feature cell being missing.
    double missing_rate = 0.0;
    double noise = 0.3;
};

/// Seeded multi-label data with correlated labels: labels come from
/// thresholded linear functions of latent factors, and some labels depend
/// directly on others.
Dataset make_multilabel(const MultiLabelOptions& opts, std::uint64_t seed);

/// Uniform random dataset (features in [0,1), labels Bernoulli(0.5)).
Dataset make_random(std::size_t rows, std::size_t features, std::size_t labels,
                    std::uint64_t seed, double missing_rate = 0.0);

} // namespace xdcc::synth
