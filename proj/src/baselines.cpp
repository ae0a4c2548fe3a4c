#include "xdcc/baselines.hpp"

#include <numeric>
#include <random>
#include <stdexcept>

#include "xdcc/chain.hpp"

namespace xdcc {

namespace {

LabelMatrix column(const LabelMatrix& y, std::size_t j) {
    LabelMatrix out(y.rows(), 1);
    for (std::size_t i = 0; i < y.rows(); ++i)
        out(i, 0) = y(i, j);
    return out;
}

void check_width(const FeatureMatrix& x, std::size_t expected) {
    if (x.cols() != expected)
        throw std::invalid_argument("predict: feature width " + std::to_string(x.cols()) +
                                    " does not match model width " + std::to_string(expected));
}

// Appends one binarized prediction column to the feature matrix.
FeatureMatrix append_binary_column(const FeatureMatrix& x, const RealMatrix& proba) {
    FeatureMatrix col(x.rows(), 1);
    for (std::size_t i = 0; i < x.rows(); ++i)
        col(i, 0) = FeatureValue(proba(i, 0) >= kPositiveThreshold ? 1.0 : 0.0);
    return concat_columns(x, col);
}

} // namespace

MLXGBModel train_mlxgb(const Dataset& train, const BoostConfig& config) {
    return {train_booster(train.features(), train.labels(), {}, config)};
}

RealMatrix predict_mlxgb_proba(const MLXGBModel& m, const FeatureMatrix& x) {
    check_width(x, m.booster.n_features());
    return m.booster.predict_proba(x);
}

LabelMatrix predict_mlxgb(const MLXGBModel& m, const FeatureMatrix& x) {
    return binarize(predict_mlxgb_proba(m, x));
}

BRModel train_br(const Dataset& train, const BoostConfig& config) {
    BRModel m;
    for (std::size_t j = 0; j < train.n_labels(); ++j)
        m.models.push_back(train_booster(train.features(), column(train.labels(), j), {}, config));
    return m;
}

RealMatrix predict_br_proba(const BRModel& m, const FeatureMatrix& x) {
    RealMatrix out(x.rows(), m.models.size());
    for (std::size_t j = 0; j < m.models.size(); ++j) {
        check_width(x, m.models[j].n_features());
        const RealMatrix p = m.models[j].predict_proba(x);
        for (std::size_t i = 0; i < x.rows(); ++i)
            out(i, j) = p(i, 0);
    }
    return out;
}

LabelMatrix predict_br(const BRModel& m, const FeatureMatrix& x) {
    return binarize(predict_br_proba(m, x));
}

std::vector<std::size_t> random_order(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        std::swap(order[i - 1], order[pick(rng)]);
    }
    return order;
}

CCModel train_cc(const Dataset& train, const BoostConfig& config, std::uint64_t seed) {
    CCModel m;
    m.seed = seed;
    m.order = random_order(train.n_labels(), seed);
    FeatureMatrix x = train.features();
    for (const auto label : m.order) {
        MLBooster b = train_booster(x, column(train.labels(), label), {}, config);
        const RealMatrix self = b.predict_proba(x);
        x = append_binary_column(x, self);
        m.models.push_back(std::move(b));
    }
    return m;
}

LabelMatrix predict_cc(const CCModel& m, const FeatureMatrix& x_in) {
    if (m.models.empty())
        throw std::invalid_argument("predict_cc: empty model");
    check_width(x_in, m.models.front().n_features());
    LabelMatrix out(x_in.rows(), m.order.size(), 0);
    FeatureMatrix x = x_in;
    for (std::size_t pos = 0; pos < m.models.size(); ++pos) {
        const RealMatrix p = m.models[pos].predict_proba(x);
        for (std::size_t i = 0; i < x.rows(); ++i)
            out(i, m.order[pos]) = p(i, 0) >= kPositiveThreshold ? 1 : 0;
        if (pos + 1 < m.models.size())
            x = append_binary_column(x, p);
    }
    return out;
}

nlohmann::json to_json(const MLXGBModel& m) { return {{"booster", to_json(m.booster)}}; }

nlohmann::json to_json(const BRModel& m) {
    nlohmann::json models = nlohmann::json::array();
    for (const auto& b : m.models)
        models.push_back(to_json(b));
    return {{"models", std::move(models)}};
}

nlohmann::json to_json(const CCModel& m) {
    nlohmann::json models = nlohmann::json::array();
    for (const auto& b : m.models)
        models.push_back(to_json(b));
    return {{"order", m.order}, {"seed", m.seed}, {"models", std::move(models)}};
}

MLXGBModel mlxgb_from_json(const nlohmann::json& j) { return {booster_from_json(j.at("booster"))}; }

BRModel br_from_json(const nlohmann::json& j) {
    BRModel m;
    for (const auto& b : j.at("models"))
        m.models.push_back(booster_from_json(b));
    return m;
}

CCModel cc_from_json(const nlohmann::json& j) {
    CCModel m;
    m.order = j.at("order").get<std::vector<std::size_t>>();
    m.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& b : j.at("models"))
        m.models.push_back(booster_from_json(b));
    if (m.models.size() != m.order.size())
        throw std::runtime_error("cc model: order and model counts differ");
    return m;
}

} // namespace xdcc
