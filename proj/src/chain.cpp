#include "xdcc/chain.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "xdcc/metrics.hpp"

namespace xdcc {

std::vector<FeatureValue> propagate(std::span<const FeatureValue> prev,
                                    std::span<const double> y_hat) {
    if (prev.size() != y_hat.size())
        throw std::invalid_argument("propagate: state and prediction widths differ");
    std::vector<FeatureValue> next(prev.begin(), prev.end());

    std::size_t arg_max = prev.size(), arg_min = prev.size();
    for (std::size_t j = 0; j < prev.size(); ++j) {
        if (prev[j].has_value())
            continue;
        if (arg_max == prev.size() || y_hat[j] > y_hat[arg_max])
            arg_max = j;
        if (arg_min == prev.size() || y_hat[j] < y_hat[arg_min])
            arg_min = j;
    }
    if (arg_max == prev.size())
        return next;
    const std::size_t pick = y_hat[arg_max] >= kPositiveThreshold ? arg_max : arg_min;
    next[pick] = FeatureValue(y_hat[pick]);
    return next;
}

PropagationState propagate(const PropagationState& prev, const RealMatrix& y_hat) {
    if (prev.rows() != y_hat.rows() || prev.cols() != y_hat.cols())
        throw std::invalid_argument("propagate: shape mismatch");
    PropagationState next(prev.rows(), prev.cols());
    for (std::size_t i = 0; i < prev.rows(); ++i)
        std::ranges::copy(propagate(prev.row(i), y_hat.row(i)), next.row(i).begin());
    return next;
}

std::vector<double> cumulate_merge(std::span<const FeatureValue> final_state,
                                   std::span<const std::span<const double>> round_probs) {
    std::vector<double> out(final_state.size(), 0.0);
    for (std::size_t j = 0; j < final_state.size(); ++j) {
        if (final_state[j].has_value()) {
            out[j] = final_state[j].value();
            continue;
        }
        double m = 0.0;
        for (const auto& probs : round_probs)
            m = std::max(m, probs[j]);
        out[j] = m;
    }
    return out;
}

RealMatrix cumulate_merge(const PropagationState& final_state,
                          std::span<const RealMatrix> round_probs) {
    for (const auto& p : round_probs)
        if (p.rows() != final_state.rows() || p.cols() != final_state.cols())
            throw std::invalid_argument("cumulate_merge: shape mismatch");
    RealMatrix out(final_state.rows(), final_state.cols());
    std::vector<std::span<const double>> rows(round_probs.size());
    for (std::size_t i = 0; i < final_state.rows(); ++i) {
        for (std::size_t r = 0; r < round_probs.size(); ++r)
            rows[r] = round_probs[r].row(i);
        std::ranges::copy(cumulate_merge(final_state.row(i), rows), out.row(i).begin());
    }
    return out;
}

LabelMatrix binarize(const PropagationState& state) {
    LabelMatrix out(state.rows(), state.cols(), 0);
    for (std::size_t i = 0; i < state.rows(); ++i)
        for (std::size_t j = 0; j < state.cols(); ++j)
            out(i, j) = state(i, j).value_or(0.0) >= kPositiveThreshold ? 1 : 0;
    return out;
}

LabelMatrix binarize(const RealMatrix& probs) {
    LabelMatrix out(probs.rows(), probs.cols(), 0);
    for (std::size_t i = 0; i < probs.rows(); ++i)
        for (std::size_t j = 0; j < probs.cols(); ++j)
            out(i, j) = probs(i, j) >= kPositiveThreshold ? 1 : 0;
    return out;
}

namespace {

LabelMatrix unknown_mask(const PropagationState& state) {
    LabelMatrix active(state.rows(), state.cols(), 0);
    for (std::size_t i = 0; i < state.rows(); ++i)
        for (std::size_t j = 0; j < state.cols(); ++j)
            active(i, j) = state(i, j).is_missing() ? 1 : 0;
    return active;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

std::pair<ChainModel, RoundTrace> train_chain(const Dataset& train, const BoostConfig& config,
                                              std::size_t chain_length, std::uint64_t seed,
                                              bool cumulate, const TrainHooks* hooks) {
    const std::size_t n = train.n_labels();
    if (chain_length < 1 || chain_length > n)
        throw std::invalid_argument("train_chain: chain length must lie in [1, " +
                                    std::to_string(n) + "]");
    config.validate();

    ChainModel model;
    model.config = config;
    model.chain_length = chain_length;
    model.cumulate = cumulate;
    model.n_features = train.n_features();
    model.n_labels = n;
    model.seed = seed;
    model.label_names = train.label_names();

    RoundTrace trace;
    PropagationState state(train.n_rows(), n);
    for (std::size_t r = 0; r < chain_length; ++r) {
        const auto start = std::chrono::steady_clock::now();
        const FeatureMatrix x = concat_columns(train.features(), state);
        MLBooster booster = train_booster(x, train.labels(), unknown_mask(state), config, hooks);
        RealMatrix y_hat = booster.predict_proba(x);
        state = propagate(state, y_hat);
        trace.seconds.push_back(seconds_since(start));
        trace.y_hat.push_back(std::move(y_hat));
        trace.states.push_back(state);
        model.rounds.push_back(std::move(booster));
    }
    return {std::move(model), std::move(trace)};
}

ChainPrediction predict_chain(const ChainModel& model, const FeatureMatrix& x) {
    if (x.cols() != model.n_features)
        throw std::invalid_argument("predict_chain: feature width " + std::to_string(x.cols()) +
                                    " does not match model width " +
                                    std::to_string(model.n_features));
    ChainPrediction out;
    PropagationState state(x.rows(), model.n_labels);
    for (const auto& booster : model.rounds) {
        const auto start = std::chrono::steady_clock::now();
        RealMatrix y_hat = booster.predict_proba(concat_columns(x, state));
        state = propagate(state, y_hat);
        out.trace.seconds.push_back(seconds_since(start));
        out.trace.y_hat.push_back(std::move(y_hat));
        out.trace.states.push_back(state);
    }
    out.labels = model.cumulate ? binarize(cumulate_merge(state, out.trace.y_hat)) : binarize(state);
    return out;
}

std::vector<RoundMetrics> round_metrics(const RoundTrace& trace, const LabelMatrix& truth,
                                        bool cumulate) {
    if (trace.n_rounds() == 0)
        throw std::invalid_argument("round_metrics: empty trace");
    std::size_t n_pos = 0, n_neg = 0;
    for (auto v : truth.values())
        (v ? n_pos : n_neg)++;

    std::vector<RoundMetrics> out;
    for (std::size_t r = 0; r < trace.n_rounds(); ++r) {
        const auto& state = trace.states[r];
        if (state.rows() != truth.rows() || state.cols() != truth.cols())
            throw std::invalid_argument("round_metrics: truth shape does not match trace");
        const LabelMatrix pred =
            cumulate ? binarize(cumulate_merge(state, std::span(trace.y_hat).first(r + 1)))
                     : binarize(state);
        std::size_t pos_done = 0, neg_done = 0;
        for (std::size_t i = 0; i < state.rows(); ++i)
            for (std::size_t j = 0; j < state.cols(); ++j)
                if (state(i, j).has_value())
                    (truth(i, j) ? pos_done : neg_done)++;
        RoundMetrics m;
        m.round = r + 1;
        m.hamming = hamming_accuracy(truth, pred);
        m.subset = subset_accuracy(truth, pred);
        m.f1 = example_f1(truth, pred);
        m.pos_frac = n_pos ? static_cast<double>(pos_done) / static_cast<double>(n_pos) : 0.0;
        m.neg_frac = n_neg ? static_cast<double>(neg_done) / static_cast<double>(n_neg) : 0.0;
        out.push_back(m);
    }
    return out;
}

std::string round_metrics_csv(std::span<const RoundMetrics> rows) {
    std::string out = "round,HA,SA,F1,pos_frac,neg_frac\n";
    for (const auto& m : rows) {
        out += std::to_string(m.round) + ',' + format_real(m.hamming) + ',' + format_real(m.subset) +
               ',' + format_real(m.f1) + ',' + format_real(m.pos_frac) + ',' +
               format_real(m.neg_frac) + '\n';
    }
    return out;
}

nlohmann::json to_json(const ChainModel& m) {
    nlohmann::json rounds = nlohmann::json::array();
    for (const auto& b : m.rounds)
        rounds.push_back(to_json(b));
    return {{"chain_length", m.chain_length}, {"cumulate", m.cumulate},
            {"n_features", m.n_features},     {"n_labels", m.n_labels},
            {"seed", m.seed},                 {"label_names", m.label_names},
            {"config", to_json(m.config)},    {"rounds", std::move(rounds)}};
}

ChainModel chain_from_json(const nlohmann::json& j) {
    ChainModel m;
    m.chain_length = j.at("chain_length").get<std::size_t>();
    m.cumulate = j.at("cumulate").get<bool>();
    m.n_features = j.at("n_features").get<std::size_t>();
    m.n_labels = j.at("n_labels").get<std::size_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.label_names = j.at("label_names").get<std::vector<std::string>>();
    m.config = boost_config_from_json(j.at("config"));
    for (const auto& b : j.at("rounds")) {
        m.rounds.push_back(booster_from_json(b));
        if (m.rounds.back().n_features() != m.n_features + m.n_labels ||
            m.rounds.back().n_labels() != m.n_labels)
            throw std::runtime_error("chain model: round width does not match K + N");
    }
    if (m.rounds.size() != m.chain_length)
        throw std::runtime_error("chain model: round count does not match chain length");
    return m;
}

} // namespace xdcc
