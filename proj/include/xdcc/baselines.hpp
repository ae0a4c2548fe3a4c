#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"

#include "xdcc/booster.hpp"
#include "xdcc/dataset.hpp"

namespace xdcc {

/// Single multi-label booster over all labels (no chain).
struct MLXGBModel {
    MLBooster booster;
    friend bool operator==(const MLXGBModel&, const MLXGBModel&) = default;
};

/// Binary relevance: one single-label booster per label.
struct BRModel {
    std::vector<MLBooster> models;
    friend bool operator==(const BRModel&, const BRModel&) = default;
};

/// Static classifier chain in a seeded random label order. The model at
/// chain position j sees K + j inputs: the base features followed by the
/// binarized outputs of positions 0..j-1.
struct CCModel {
    std::vector<MLBooster> models;
    std::vector<std::size_t> order;
    std::uint64_t seed = 0;
    friend bool operator==(const CCModel&, const CCModel&) = default;
};

MLXGBModel train_mlxgb(const Dataset& train, const BoostConfig& config);
RealMatrix predict_mlxgb_proba(const MLXGBModel& m, const FeatureMatrix& x);
LabelMatrix predict_mlxgb(const MLXGBModel& m, const FeatureMatrix& x);

BRModel train_br(const Dataset& train, const BoostConfig& config);
RealMatrix predict_br_proba(const BRModel& m, const FeatureMatrix& x);
LabelMatrix predict_br(const BRModel& m, const FeatureMatrix& x);

/// Seeded Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> random_order(std::size_t n, std::uint64_t seed);

CCModel train_cc(const Dataset& train, const BoostConfig& config, std::uint64_t seed);
/// Output columns are in original label order.
LabelMatrix predict_cc(const CCModel& m, const FeatureMatrix& x);

nlohmann::json to_json(const MLXGBModel& m);
nlohmann::json to_json(const BRModel& m);
nlohmann::json to_json(const CCModel& m);
MLXGBModel mlxgb_from_json(const nlohmann::json& j);
BRModel br_from_json(const nlohmann::json& j);
CCModel cc_from_json(const nlohmann::json& j);

} // namespace xdcc
