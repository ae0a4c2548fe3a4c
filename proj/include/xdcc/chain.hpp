#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "xdcc/booster.hpp"
#include "xdcc/dataset.hpp"

namespace xdcc {

/// Per-instance label-feature values; missing means "not yet propagated".
using PropagationState = FeatureMatrix;

/// Probability threshold for a positive label (inclusive).
inline constexpr double kPositiveThreshold = 0.5;

/// One propagation step for a single instance.
///
/// Among the labels still unknown in `prev`, the highest probability is
/// written back if it is >= 0.5, otherwise the lowest one is. Ties go to the
/// lowest label index. Known cells are never touched; when no label is
/// unknown the row is returned unchanged.
std::vector<FeatureValue> propagate(std::span<const FeatureValue> prev,
                                    std::span<const double> y_hat);

/// Row-wise propagate over a whole state matrix.
PropagationState propagate(const PropagationState& prev, const RealMatrix& y_hat);

/// Known cells of `final_state` as-is; unknown cells take the maximum over
/// the per-round probabilities.
std::vector<double> cumulate_merge(std::span<const FeatureValue> final_state,
                                   std::span<const std::span<const double>> round_probs);

/// Matrix form; `round_probs` holds one M x N matrix per round.
RealMatrix cumulate_merge(const PropagationState& final_state,
                          std::span<const RealMatrix> round_probs);

/// Unknown or < 0.5 maps to 0, >= 0.5 to 1.
LabelMatrix binarize(const PropagationState& state);
LabelMatrix binarize(const RealMatrix& probs);

/// Per-round probabilities and propagation snapshots.
struct RoundTrace {
    std::vector<RealMatrix> y_hat;
    std::vector<PropagationState> states;
    /// Wall-clock seconds spent in each round.
    std::vector<double> seconds;

    std::size_t n_rounds() const noexcept { return y_hat.size(); }
};

/// Dynamic classifier chain: one multi-label booster per round, each trained
/// on base features plus the label-features produced by earlier rounds.
struct ChainModel {
    std::vector<MLBooster> rounds;
    BoostConfig config;
    std::size_t chain_length = 0;
    bool cumulate = false;
    std::size_t n_features = 0;
    std::size_t n_labels = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> label_names;

    friend bool operator==(const ChainModel&, const ChainModel&) = default;
};

/// Trains `chain_length` rounds. Round r masks (g = h = 0) every cell that
/// was propagated before round r, trains on [X | p^{r-1}], predicts on the
/// same rows, and propagates one label per row.
std::pair<ChainModel, RoundTrace> train_chain(const Dataset& train, const BoostConfig& config,
                                              std::size_t chain_length, std::uint64_t seed,
                                              bool cumulate = false,
                                              const TrainHooks* hooks = nullptr);

struct ChainPrediction {
    LabelMatrix labels;
    RoundTrace trace;
};

/// Runs the stored rounds on `x` (base features only, width K).
ChainPrediction predict_chain(const ChainModel& model, const FeatureMatrix& x);
inline ChainPrediction predict_chain(const ChainModel& model, const Dataset& test) {
    return predict_chain(model, test.features());
}

struct RoundMetrics {
    std::size_t round = 0;
    double hamming = 0.0;
    double subset = 0.0;
    double f1 = 0.0;
    /// Fraction of truly positive cells propagated by this round.
    double pos_frac = 0.0;
    /// Same for truly negative cells.
    double neg_frac = 0.0;
};

/// Metrics of the binarized state after each round. With `cumulate`, the
/// state at round r is merged with rounds 1..r before binarization.
std::vector<RoundMetrics> round_metrics(const RoundTrace& trace, const LabelMatrix& truth,
                                        bool cumulate = false);

/// CSV with header `round,HA,SA,F1,pos_frac,neg_frac`.
std::string round_metrics_csv(std::span<const RoundMetrics> rows);

nlohmann::json to_json(const ChainModel& m);
ChainModel chain_from_json(const nlohmann::json& j);

} // namespace xdcc
