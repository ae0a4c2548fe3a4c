#include "xdcc/synth.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace xdcc::synth {

Dataset make_multilabel(const MultiLabelOptions& opts, std::uint64_t seed) {
    if (opts.rows == 0 || opts.features == 0 || opts.labels == 0 || opts.factors == 0)
        throw std::invalid_argument("make_multilabel: all sizes must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const std::size_t f = opts.factors;
    // Feature loadings: every third feature is pure noise.
    std::vector<std::vector<double>> loading(opts.features, std::vector<double>(f, 0.0));
    for (std::size_t k = 0; k < opts.features; ++k)
        if (k % 3 != 2)
            for (auto& a : loading[k])
                a = normal(rng) / std::sqrt(static_cast<double>(f));
    std::vector<std::vector<double>> label_w(opts.labels, std::vector<double>(f, 0.0));
    for (auto& w : label_w)
        for (auto& a : w)
            a = normal(rng);

    FeatureMatrix x(opts.rows, opts.features);
    LabelMatrix y(opts.rows, opts.labels, 0);
    std::vector<double> z(f);
    for (std::size_t i = 0; i < opts.rows; ++i) {
        for (auto& v : z)
            v = normal(rng);
        for (std::size_t k = 0; k < opts.features; ++k) {
            double v = 0.5 * normal(rng);
            for (std::size_t a = 0; a < f; ++a)
                v += loading[k][a] * z[a];
            x(i, k) = unit(rng) < opts.missing_rate ? FeatureValue::missing() : FeatureValue(v);
        }
        for (std::size_t j = 0; j < opts.labels; ++j) {
            double s = opts.noise * normal(rng);
            for (std::size_t a = 0; a < f; ++a)
                s += label_w[j][a] * z[a];
            // Labels 3, 5, 7, ... require the label three positions earlier.
            if (j >= 3 && j % 2 == 1)
                y(i, j) = (y(i, j - 3) && s > -0.5) ? 1 : 0;
            else
                y(i, j) = s > 0.6 ? 1 : 0;
        }
    }
    return Dataset(std::move(x), std::move(y));
}

Dataset make_random(std::size_t rows, std::size_t features, std::size_t labels,
                    std::uint64_t seed, double missing_rate) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    FeatureMatrix x(rows, features);
    LabelMatrix y(rows, labels, 0);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t k = 0; k < features; ++k) {
            const double v = unit(rng);
            x(i, k) = unit(rng) < missing_rate ? FeatureValue::missing() : FeatureValue(v);
        }
        for (std::size_t j = 0; j < labels; ++j)
            y(i, j) = unit(rng) < 0.5 ? 1 : 0;
    }
    return Dataset(std::move(x), std::move(y));
}

} // namespace xdcc::synth
