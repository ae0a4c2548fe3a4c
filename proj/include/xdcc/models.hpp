#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "json.hpp"

#include "xdcc/baselines.hpp"
#include "xdcc/chain.hpp"

namespace xdcc {

enum class Method { BR, CC, MLXGB, XDCC, XDCCCum };

Method parse_method(std::string_view name);
std::string_view to_string(Method m) noexcept;
bool is_chain_method(Method m) noexcept;

/// Everything needed to train one model of any kind.
struct ModelSpec {
    Method method = Method::XDCC;
    BoostConfig config;
    /// Chain variants only; nullopt means N.
    std::optional<std::size_t> chain_length;
    std::uint64_t seed = 0;
};

using ModelVariant = std::variant<BRModel, CCModel, MLXGBModel, ChainModel>;

/// A trained model of any method plus the metadata a harness needs.
struct AnyModel {
    Method method = Method::XDCC;
    ModelVariant model;
    std::size_t n_features = 0;
    std::size_t n_labels = 0;
    double train_seconds = 0.0;
};

AnyModel train_model(const Dataset& train, const ModelSpec& spec);
LabelMatrix predict_model(const AnyModel& model, const FeatureMatrix& x);

nlohmann::json to_json(const AnyModel& m);
AnyModel any_model_from_json(const nlohmann::json& j);
void save_model(const AnyModel& m, const std::filesystem::path& path);
AnyModel load_model(const std::filesystem::path& path);

} // namespace xdcc
