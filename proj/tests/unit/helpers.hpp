#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "xdcc/dataset.hpp"

namespace xdcc::test {

inline std::filesystem::path tmp_dir() {
    std::filesystem::path p = XDCC_TEST_TMP;
    std::filesystem::create_directories(p);
    return p;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

/// 20 rows, one feature, label = feature > 0.5 (linearly separable).
inline Dataset separable_toy() {
    FeatureMatrix x(20, 1);
    LabelMatrix y(20, 1);
    for (std::size_t i = 0; i < 20; ++i) {
        const double v = static_cast<double>(i) / 19.0;
        x(i, 0) = FeatureValue(v);
        y(i, 0) = v > 0.5 ? 1 : 0;
    }
    return Dataset(x, y);
}

/// Rows with two base features and labels driven by them.
inline Dataset correlated_toy(std::size_t rows, std::size_t labels, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    FeatureMatrix x(rows, 3);
    LabelMatrix y(rows, labels, 0);
    for (std::size_t i = 0; i < rows; ++i) {
        const double a = unit(rng), b = unit(rng), c = unit(rng);
        x(i, 0) = FeatureValue(a);
        x(i, 1) = FeatureValue(b);
        x(i, 2) = FeatureValue(c);
        for (std::size_t j = 0; j < labels; ++j) {
            const double t = 0.3 + 0.4 * static_cast<double>(j) / static_cast<double>(labels);
            y(i, j) = (j % 2 == 0 ? a : b) > t ? 1 : 0;
        }
    }
    return Dataset(x, y);
}

} // namespace xdcc::test
