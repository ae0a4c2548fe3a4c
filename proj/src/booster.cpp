#include "xdcc/booster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace xdcc {

void BoostConfig::validate() const {
    if (n_rounds < 0)
        throw std::invalid_argument("BoostConfig: n_rounds must be >= 0");
    if (max_depth < 0)
        throw std::invalid_argument("BoostConfig: max_depth must be >= 0");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0))
        throw std::invalid_argument("BoostConfig: learning_rate must lie in (0,1]");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("BoostConfig: lambda must be >= 0");
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("BoostConfig: gamma must be >= 0");
    if (!(min_child_weight >= 0.0) || !std::isfinite(min_child_weight))
        throw std::invalid_argument("BoostConfig: min_child_weight must be >= 0");
}

double sigmoid(double raw) noexcept {
    if (raw >= 0.0)
        return 1.0 / (1.0 + std::exp(-raw));
    const double e = std::exp(raw);
    return e / (1.0 + e);
}

GradHess compute_grad_hess(int y, double raw) {
    if (y != 0 && y != 1)
        throw std::invalid_argument("compute_grad_hess: label must be 0 or 1");
    const double p = sigmoid(raw);
    return {p - static_cast<double>(y), p * (1.0 - p)};
}

double leaf_weight(double G, double H, double lambda, double learning_rate) {
    const double denom = H + lambda;
    if (denom == 0.0) {
        if (G == 0.0)
            return 0.0;
        throw std::domain_error("leaf_weight: degenerate node (H + lambda == 0)");
    }
    return learning_rate * (-G / denom);
}

GradStats GradientPairs::sum(std::span<const std::size_t> rows) const {
    GradStats s(grad.cols());
    for (auto r : rows)
        s.add(grad.row(r), hess.row(r));
    return s;
}

GradientPairs compute_gradients(const LabelMatrix& targets, const RealMatrix& raw,
                                const LabelMatrix& active) {
    if (raw.rows() != targets.rows() || raw.cols() != targets.cols())
        throw std::invalid_argument("compute_gradients: shape mismatch");
    const bool masked = !active.empty();
    if (masked && (active.rows() != targets.rows() || active.cols() != targets.cols()))
        throw std::invalid_argument("compute_gradients: mask shape mismatch");
    GradientPairs gp{RealMatrix(targets.rows(), targets.cols()),
                     RealMatrix(targets.rows(), targets.cols())};
    for (std::size_t i = 0; i < targets.rows(); ++i) {
        for (std::size_t j = 0; j < targets.cols(); ++j) {
            if (masked && !active(i, j))
                continue;
            const auto [g, h] = compute_grad_hess(targets(i, j), raw(i, j));
            gp.grad(i, j) = g;
            gp.hess(i, j) = h;
        }
    }
    return gp;
}

namespace {

double split_threshold(double lo, double hi) {
    const double mid = lo + (hi - lo) / 2.0;
    return mid > lo ? mid : hi;
}

struct PresentValue {
    double value;
    std::size_t row;
};

} // namespace

std::optional<SplitCandidate> find_best_split(const FeatureMatrix& x,
                                              std::span<const std::size_t> rows,
                                              const GradientPairs& gp, const BoostConfig& config) {
    if (rows.size() < 2)
        return std::nullopt;
    const std::size_t n_labels = gp.grad.cols();
    const auto score = [&](const GradStats& st) { return node_score(config.gain, st, config.lambda); };
    const double scale = gain_scale(config.gain);

    std::optional<SplitCandidate> best;
    std::vector<PresentValue> present;
    present.reserve(rows.size());
    GradStats missing(n_labels), left(n_labels), total(n_labels), right(n_labels),
        cand_left(n_labels), cand_right(n_labels), parent(n_labels);

    const auto assign_sum = [](GradStats& dst, const GradStats& a, const GradStats& b) {
        for (std::size_t j = 0; j < dst.grad.size(); ++j) {
            dst.grad[j] = a.grad[j] + b.grad[j];
            dst.hess[j] = a.hess[j] + b.hess[j];
        }
    };

    for (std::size_t f = 0; f < x.cols(); ++f) {
        present.clear();
        std::ranges::fill(missing.grad, 0.0);
        std::ranges::fill(missing.hess, 0.0);
        for (auto r : rows) {
            const auto& v = x(r, f);
            if (v.is_missing())
                missing.add(gp.grad.row(r), gp.hess.row(r));
            else
                present.push_back({v.value(), r});
        }
        if (present.size() < 2)
            continue;
        std::ranges::stable_sort(present, {}, &PresentValue::value);
        if (present.front().value == present.back().value)
            continue;

        std::ranges::fill(total.grad, 0.0);
        std::ranges::fill(total.hess, 0.0);
        for (const auto& p : present)
            total.add(gp.grad.row(p.row), gp.hess.row(p.row));
        std::ranges::fill(left.grad, 0.0);
        std::ranges::fill(left.hess, 0.0);
        const bool has_missing = present.size() < rows.size();

        for (std::size_t i = 1; i < present.size(); ++i) {
            left.add(gp.grad.row(present[i - 1].row), gp.hess.row(present[i - 1].row));
            if (present[i - 1].value == present[i].value)
                continue;
            const double threshold = split_threshold(present[i - 1].value, present[i].value);
            for (std::size_t j = 0; j < n_labels; ++j) {
                right.grad[j] = total.grad[j] - left.grad[j];
                right.hess[j] = total.hess[j] - left.hess[j];
            }
            for (const bool default_left : {true, false}) {
                if (!default_left && !has_missing)
                    break;
                if (default_left) {
                    assign_sum(cand_left, left, missing);
                    cand_right = right;
                } else {
                    cand_left = left;
                    assign_sum(cand_right, right, missing);
                }
                if (cand_left.hess_total() < config.min_child_weight ||
                    cand_right.hess_total() < config.min_child_weight)
                    continue;
                assign_sum(parent, cand_left, cand_right);
                const double gain =
                    scale * (score(cand_left) + score(cand_right) - score(parent)) - config.gamma;
                if (!best || gain > best->gain)
                    best = SplitCandidate{f, threshold, default_left, gain};
            }
        }
    }
    if (best && best->gain > 0.0)
        return best;
    return std::nullopt;
}

std::size_t MLTree::leaf_index(std::span<const FeatureValue> row) const {
    if (nodes_.empty())
        throw std::logic_error("MLTree: empty tree");
    std::size_t idx = 0;
    while (!nodes_[idx].is_leaf()) {
        const Node& n = nodes_[idx];
        const FeatureValue& v = row[static_cast<std::size_t>(n.feature)];
        const bool go_left = v.is_missing() ? n.default_left : v.value() < n.threshold;
        idx = static_cast<std::size_t>(go_left ? n.left : n.right);
    }
    return idx;
}

std::size_t MLTree::depth() const {
    if (nodes_.empty())
        return 0;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    std::size_t deepest = 0;
    while (!stack.empty()) {
        const auto [idx, d] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, d);
        const Node& n = nodes_[idx];
        if (!n.is_leaf()) {
            stack.emplace_back(static_cast<std::size_t>(n.left), d + 1);
            stack.emplace_back(static_cast<std::size_t>(n.right), d + 1);
        }
    }
    return deepest;
}

std::vector<int> MLTree::split_features() const {
    std::vector<int> out;
    for (const auto& n : nodes_)
        if (!n.is_leaf())
            out.push_back(n.feature);
    return out;
}

MLBooster::MLBooster(std::vector<MLTree> trees, std::size_t n_labels, std::size_t n_features,
                     double base_score, BoostConfig config)
    : trees_(std::move(trees)), n_labels_(n_labels), n_features_(n_features),
      base_score_(base_score), config_(config) {}

std::vector<double> MLBooster::predict_raw(std::span<const FeatureValue> row,
                                           std::optional<std::size_t> n_trees) const {
    if (row.size() != n_features_)
        throw std::invalid_argument("predict_raw: row width " + std::to_string(row.size()) +
                                    " does not match model width " + std::to_string(n_features_));
    std::vector<double> out(n_labels_, base_score_);
    const std::size_t limit = std::min(n_trees.value_or(trees_.size()), trees_.size());
    for (std::size_t t = 0; t < limit; ++t) {
        const auto& w = trees_[t].leaf_weights(row);
        for (std::size_t j = 0; j < n_labels_; ++j)
            out[j] += w[j];
    }
    return out;
}

std::vector<double> MLBooster::predict_proba(std::span<const FeatureValue> row) const {
    auto out = predict_raw(row);
    for (auto& v : out)
        v = sigmoid(v);
    return out;
}

RealMatrix MLBooster::predict_raw(const FeatureMatrix& x) const {
    RealMatrix out(x.rows(), n_labels_);
    for (std::size_t i = 0; i < x.rows(); ++i)
        std::ranges::copy(predict_raw(x.row(i)), out.row(i).begin());
    return out;
}

RealMatrix MLBooster::predict_proba(const FeatureMatrix& x) const {
    RealMatrix out = predict_raw(x);
    for (auto& v : out.values())
        v = sigmoid(v);
    return out;
}

namespace {

class TreeGrower {
public:
    TreeGrower(const FeatureMatrix& x, const GradientPairs& gp, const BoostConfig& config,
               const TrainHooks* hooks, int tree_index)
        : x_(x), gp_(gp), config_(config), hooks_(hooks), tree_index_(tree_index) {}

    MLTree grow(std::vector<std::size_t> rows) {
        build(std::move(rows), 0);
        return MLTree(std::move(nodes_));
    }

private:
    int build(std::vector<std::size_t> rows, int depth) {
        const GradStats stats = gp_.sum(rows);
        if (hooks_ && hooks_->on_node)
            hooks_->on_node(tree_index_, depth, rows, stats, gp_);

        const int idx = static_cast<int>(nodes_.size());
        nodes_.emplace_back();

        std::optional<SplitCandidate> split;
        if (depth < config_.max_depth)
            split = find_best_split(x_, rows, gp_, config_);
        if (!split) {
            std::vector<double> w(stats.n_labels());
            for (std::size_t j = 0; j < w.size(); ++j)
                w[j] = leaf_weight(stats.grad[j], stats.hess[j], config_.lambda,
                                   config_.learning_rate);
            nodes_[static_cast<std::size_t>(idx)].weights = std::move(w);
            return idx;
        }

        std::vector<std::size_t> left_rows, right_rows;
        for (auto r : rows) {
            const auto& v = x_(r, split->feature);
            const bool go_left = v.is_missing() ? split->default_left : v.value() < split->threshold;
            (go_left ? left_rows : right_rows).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        const int l = build(std::move(left_rows), depth + 1);
        const int r = build(std::move(right_rows), depth + 1);
        auto& node = nodes_[static_cast<std::size_t>(idx)];
        node.feature = static_cast<int>(split->feature);
        node.threshold = split->threshold;
        node.default_left = split->default_left;
        node.left = l;
        node.right = r;
        return idx;
    }

    const FeatureMatrix& x_;
    const GradientPairs& gp_;
    const BoostConfig& config_;
    const TrainHooks* hooks_;
    int tree_index_;
    std::vector<MLTree::Node> nodes_;
};

} // namespace

MLBooster train_booster(const FeatureMatrix& x, const LabelMatrix& targets,
                        const LabelMatrix& active, const BoostConfig& config,
                        const TrainHooks* hooks) {
    config.validate();
    if (x.rows() != targets.rows())
        throw std::invalid_argument("train_booster: feature and target row counts differ");
    if (x.rows() == 0 || targets.cols() == 0)
        throw std::invalid_argument("train_booster: empty training data");
    for (auto v : targets.values())
        if (v > 1)
            throw std::invalid_argument("train_booster: targets must be binary");

    constexpr double base_score = 0.0;
    RealMatrix raw(x.rows(), targets.cols(), base_score);
    std::vector<std::size_t> all_rows(x.rows());
    for (std::size_t i = 0; i < all_rows.size(); ++i)
        all_rows[i] = i;

    std::vector<MLTree> trees;
    trees.reserve(static_cast<std::size_t>(config.n_rounds));
    for (int t = 0; t < config.n_rounds; ++t) {
        const GradientPairs gp = compute_gradients(targets, raw, active);
        MLTree tree = TreeGrower(x, gp, config, hooks, t).grow(all_rows);
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const auto& w = tree.leaf_weights(x.row(i));
            auto r = raw.row(i);
            for (std::size_t j = 0; j < r.size(); ++j)
                r[j] += w[j];
        }
        trees.push_back(std::move(tree));
        if (hooks && hooks->on_tree)
            hooks->on_tree(t, raw);
    }
    return MLBooster(std::move(trees), targets.cols(), x.cols(), base_score, config);
}

double mean_cross_entropy(const LabelMatrix& targets, const RealMatrix& raw) {
    if (raw.rows() != targets.rows() || raw.cols() != targets.cols())
        throw std::invalid_argument("mean_cross_entropy: shape mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < raw.rows(); ++i)
        for (std::size_t j = 0; j < raw.cols(); ++j) {
            const double z = raw(i, j);
            // log(1 + e^z) - y z, stable for large |z|.
            total += std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) -
                     static_cast<double>(targets(i, j)) * z;
        }
    return total / static_cast<double>(raw.rows() * raw.cols());
}

// Serialization

nlohmann::json to_json(const BoostConfig& c) {
    return {{"n_rounds", c.n_rounds},   {"max_depth", c.max_depth},
            {"learning_rate", c.learning_rate}, {"lambda", c.lambda},
            {"gamma", c.gamma},         {"min_child_weight", c.min_child_weight},
            {"gain", std::string(to_string(c.gain))}};
}

BoostConfig boost_config_from_json(const nlohmann::json& j) {
    BoostConfig c;
    c.n_rounds = j.at("n_rounds").get<int>();
    c.max_depth = j.at("max_depth").get<int>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.lambda = j.at("lambda").get<double>();
    c.gamma = j.at("gamma").get<double>();
    c.min_child_weight = j.at("min_child_weight").get<double>();
    c.gain = parse_gain_strategy(j.at("gain").get<std::string>());
    c.validate();
    return c;
}

namespace {

nlohmann::json node_to_json(const std::vector<MLTree::Node>& nodes, std::size_t idx) {
    const auto& n = nodes[idx];
    if (n.is_leaf())
        return {{"leaf", {{"weights", n.weights}}}};
    return {{"split",
             {{"feature", n.feature},
              {"threshold", n.threshold},
              {"default_left", n.default_left},
              {"left", node_to_json(nodes, static_cast<std::size_t>(n.left))},
              {"right", node_to_json(nodes, static_cast<std::size_t>(n.right))}}}};
}

int node_from_json(const nlohmann::json& j, std::vector<MLTree::Node>& nodes, std::size_t n_labels,
                   std::size_t n_features) {
    const int idx = static_cast<int>(nodes.size());
    nodes.emplace_back();
    if (j.contains("leaf")) {
        auto w = j.at("leaf").at("weights").get<std::vector<double>>();
        if (w.size() != n_labels)
            throw std::runtime_error("model: leaf weight count does not match label count");
        nodes[static_cast<std::size_t>(idx)].weights = std::move(w);
        return idx;
    }
    const auto& s = j.at("split");
    const int feature = s.at("feature").get<int>();
    if (feature < 0 || static_cast<std::size_t>(feature) >= n_features)
        throw std::runtime_error("model: split feature out of range");
    const int l = node_from_json(s.at("left"), nodes, n_labels, n_features);
    const int r = node_from_json(s.at("right"), nodes, n_labels, n_features);
    auto& n = nodes[static_cast<std::size_t>(idx)];
    n.feature = feature;
    n.threshold = s.at("threshold").get<double>();
    n.default_left = s.at("default_left").get<bool>();
    n.left = l;
    n.right = r;
    return idx;
}

} // namespace

nlohmann::json to_json(const MLBooster& b) {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : b.trees())
        trees.push_back(node_to_json(t.nodes(), 0));
    return {{"n_labels", b.n_labels()},
            {"n_features", b.n_features()},
            {"base_score", b.base_score()},
            {"config", to_json(b.config())},
            {"trees", std::move(trees)}};
}

MLBooster booster_from_json(const nlohmann::json& j) {
    const auto n_labels = j.at("n_labels").get<std::size_t>();
    const auto n_features = j.at("n_features").get<std::size_t>();
    std::vector<MLTree> trees;
    for (const auto& t : j.at("trees")) {
        std::vector<MLTree::Node> nodes;
        node_from_json(t, nodes, n_labels, n_features);
        trees.emplace_back(std::move(nodes));
    }
    return MLBooster(std::move(trees), n_labels, n_features, j.at("base_score").get<double>(),
                     boost_config_from_json(j.at("config")));
}

} // namespace xdcc
