#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "xdcc/dataset.hpp"
#include "xdcc/gains.hpp"
#include "xdcc/matrix.hpp"

namespace xdcc {

struct BoostConfig {
    int n_rounds = 10;
    int max_depth = 6;
    double learning_rate = 0.3;
    double lambda = 1.0;
    double gamma = 0.0;
    double min_child_weight = 1.0;
    GainStrategy gain = GainStrategy::SumGain;

    /// Throws std::invalid_argument on out-of-range fields.
    void validate() const;

    friend bool operator==(const BoostConfig&, const BoostConfig&) = default;
};

double sigmoid(double raw) noexcept;

struct GradHess {
    double g;
    double h;
};

/// Cross-entropy gradient and Hessian with respect to the raw score.
GradHess compute_grad_hess(int y, double raw);

/// learning_rate * (-G / (H + lambda)). Throws std::domain_error when
/// H + lambda == 0 and G != 0.
double leaf_weight(double G, double H, double lambda, double learning_rate);

/// Per-row per-label gradients and Hessians (M x N each). Masked cells hold 0.
struct GradientPairs {
    RealMatrix grad;
    RealMatrix hess;

    /// Stats of `rows` summed in the given order.
    GradStats sum(std::span<const std::size_t> rows) const;
};

/// Gradients of cross-entropy at `raw`; cells where `active` is 0 get g = h = 0.
/// An empty `active` matrix means every cell is active.
GradientPairs compute_gradients(const LabelMatrix& targets, const RealMatrix& raw,
                                const LabelMatrix& active = {});

struct SplitCandidate {
    std::size_t feature = 0;
    double threshold = 0.0;
    bool default_left = true;
    double gain = 0.0;

    friend bool operator==(const SplitCandidate&, const SplitCandidate&) = default;
};

/// Exact greedy split search over all columns of `x` for the instance set
/// `rows`. Candidates are midpoints between consecutive distinct present
/// values; missing values try both directions. Enumeration order is feature
/// ascending, threshold ascending, default-left first; the first maximum wins.
/// Candidates with a child whose summed Hessian is below min_child_weight are
/// skipped. Returns nullopt when no candidate has positive gain.
std::optional<SplitCandidate> find_best_split(const FeatureMatrix& x,
                                              std::span<const std::size_t> rows,
                                              const GradientPairs& gp, const BoostConfig& config);

/// Regression tree whose leaves carry one weight per label.
class MLTree {
public:
    struct Node {
        // Split fields; feature < 0 marks a leaf.
        int feature = -1;
        double threshold = 0.0;
        bool default_left = true;
        int left = -1;
        int right = -1;
        // Leaf field.
        std::vector<double> weights;

        bool is_leaf() const noexcept { return feature < 0; }
        friend bool operator==(const Node&, const Node&) = default;
    };

    MLTree() = default;
    explicit MLTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

    /// Index of the leaf reached by `row`.
    std::size_t leaf_index(std::span<const FeatureValue> row) const;
    const std::vector<double>& leaf_weights(std::span<const FeatureValue> row) const {
        return nodes_[leaf_index(row)].weights;
    }

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    std::size_t depth() const;
    /// Feature indices used by split nodes, in node order.
    std::vector<int> split_features() const;

    friend bool operator==(const MLTree&, const MLTree&) = default;

private:
    std::vector<Node> nodes_;
};

/// Callbacks invoked during training; all optional.
struct TrainHooks {
    /// Called for every node created, with its instance set, the node's
    /// GradStats, and the gradient buffer of the current tree.
    std::function<void(int tree, int depth, std::span<const std::size_t> rows,
                       const GradStats& stats, const GradientPairs& gp)>
        on_node;
    /// Called after each tree with the cumulative raw training scores.
    std::function<void(int tree, const RealMatrix& raw)> on_tree;
};

/// Additive ensemble of multi-label trees.
class MLBooster {
public:
    MLBooster() = default;
    MLBooster(std::vector<MLTree> trees, std::size_t n_labels, std::size_t n_features,
              double base_score, BoostConfig config);

    std::size_t n_labels() const noexcept { return n_labels_; }
    std::size_t n_features() const noexcept { return n_features_; }
    double base_score() const noexcept { return base_score_; }
    const BoostConfig& config() const noexcept { return config_; }
    const std::vector<MLTree>& trees() const noexcept { return trees_; }

    /// base_score + sum of reached leaf weights over the first `n_trees`
    /// trees (all when nullopt). Throws on width mismatch.
    std::vector<double> predict_raw(std::span<const FeatureValue> row,
                                    std::optional<std::size_t> n_trees = std::nullopt) const;
    std::vector<double> predict_proba(std::span<const FeatureValue> row) const;

    RealMatrix predict_raw(const FeatureMatrix& x) const;
    RealMatrix predict_proba(const FeatureMatrix& x) const;

    friend bool operator==(const MLBooster&, const MLBooster&) = default;

private:
    std::vector<MLTree> trees_;
    std::size_t n_labels_ = 0;
    std::size_t n_features_ = 0;
    double base_score_ = 0.0;
    BoostConfig config_;
};

/// Second-order boosting with cross-entropy on every label at once.
/// `active` (M x N, empty = all active) zeroes gradients of inactive cells.
MLBooster train_booster(const FeatureMatrix& x, const LabelMatrix& targets,
                        const LabelMatrix& active, const BoostConfig& config,
                        const TrainHooks* hooks = nullptr);

/// Mean over rows and labels of cross-entropy of sigmoid(raw) against targets.
double mean_cross_entropy(const LabelMatrix& targets, const RealMatrix& raw);

nlohmann::json to_json(const BoostConfig& c);
BoostConfig boost_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MLBooster& b);
MLBooster booster_from_json(const nlohmann::json& j);

} // namespace xdcc
