#pragma once

// Independent reference implementations used only by tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "xdcc/booster.hpp"

namespace xdcc::oracle {

/// Node score written directly from the six formulas.
inline double node_score(GainStrategy s, const std::vector<double>& G, const std::vector<double>& H,
                         double lambda) {
    std::vector<double> terms;
    for (std::size_t j = 0; j < G.size(); ++j) {
        const double d = H[j] + lambda;
        switch (s) {
        case GainStrategy::SumGain:
        case GainStrategy::MaxGain: terms.push_back(G[j] * G[j] / d); break;
        case GainStrategy::SumWeight:
        case GainStrategy::MaxWeight: terms.push_back(-G[j] / d); break;
        case GainStrategy::SumAbsG:
        case GainStrategy::MaxAbsG: terms.push_back(std::abs(-G[j] / d)); break;
        }
    }
    if (s == GainStrategy::MaxGain || s == GainStrategy::MaxWeight || s == GainStrategy::MaxAbsG)
        return *std::max_element(terms.begin(), terms.end());
    double sum = 0.0;
    for (double t : terms)
        sum += t;
    return sum;
}

struct Candidate {
    std::size_t feature;
    double threshold;
    bool default_left;
    double gain;
};

/// Enumerates every (feature, threshold, default direction) candidate,
/// partitions the rows explicitly, and sums each side from scratch.
inline std::optional<Candidate> brute_force_split(const FeatureMatrix& x,
                                                  const std::vector<std::size_t>& rows,
                                                  const GradientPairs& gp, const BoostConfig& c) {
    const std::size_t n = gp.grad.cols();
    std::optional<Candidate> best;
    for (std::size_t f = 0; f < x.cols(); ++f) {
        std::set<double> distinct;
        for (auto r : rows)
            if (x(r, f).has_value())
                distinct.insert(x(r, f).value());
        const std::vector<double> values(distinct.begin(), distinct.end());
        for (std::size_t k = 1; k < values.size(); ++k) {
            const double thr = (values[k - 1] + values[k]) / 2.0;
            for (bool dl : {true, false}) {
                std::vector<double> GL(n, 0), HL(n, 0), GR(n, 0), HR(n, 0);
                for (auto r : rows) {
                    const auto& v = x(r, f);
                    const bool left = v.is_missing() ? dl : v.value() < thr;
                    for (std::size_t j = 0; j < n; ++j) {
                        (left ? GL : GR)[j] += gp.grad(r, j);
                        (left ? HL : HR)[j] += gp.hess(r, j);
                    }
                }
                double hl = 0, hr = 0;
                for (std::size_t j = 0; j < n; ++j) {
                    hl += HL[j];
                    hr += HR[j];
                }
                if (hl < c.min_child_weight || hr < c.min_child_weight)
                    continue;
                std::vector<double> GP(n), HP(n);
                for (std::size_t j = 0; j < n; ++j) {
                    GP[j] = GL[j] + GR[j];
                    HP[j] = HL[j] + HR[j];
                }
                const double scale =
                    (c.gain == GainStrategy::SumGain || c.gain == GainStrategy::MaxGain) ? 0.5 : 1.0;
                const double gain = scale * (node_score(c.gain, GL, HL, c.lambda) +
                                             node_score(c.gain, GR, HR, c.lambda) -
                                             node_score(c.gain, GP, HP, c.lambda)) -
                                    c.gamma;
                if (!best || gain > best->gain)
                    best = Candidate{f, thr, dl, gain};
            }
        }
    }
    if (best && best->gain > 0.0)
        return best;
    return std::nullopt;
}

/// Random split-search problem whose every partial sum is exact in binary64:
/// dyadic feature values, gradients and Hessians.
struct SplitProblem {
    FeatureMatrix x;
    GradientPairs gp;
    std::vector<std::size_t> rows;
    BoostConfig config;
};

inline SplitProblem random_split_problem(std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> m_dist(2, 50), k_dist(1, 5), n_dist(1, 4);
    std::uniform_int_distribution<int> value(0, 8), grad(-64, 64), hess(0, 64), pick(0, 2),
        strategy(0, 5);
    std::bernoulli_distribution coin(0.5);
    const std::size_t m = m_dist(rng), k = k_dist(rng), n = n_dist(rng);
    const double missing_rate = coin(rng) ? 0.2 : 0.0;
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    SplitProblem p{FeatureMatrix(m, k), {RealMatrix(m, n), RealMatrix(m, n)}, {}, {}};
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t f = 0; f < k; ++f)
            p.x(i, f) = unit(rng) < missing_rate ? FeatureValue::missing()
                                                 : FeatureValue(value(rng) / 4.0);
        for (std::size_t j = 0; j < n; ++j) {
            p.gp.grad(i, j) = grad(rng) / 64.0;
            p.gp.hess(i, j) = hess(rng) / 64.0;
        }
    }
    for (std::size_t i = 0; i < m; ++i)
        if (unit(rng) < 0.8)
            p.rows.push_back(i);
    if (p.rows.size() < 2)
        p.rows = {0, 1};
    p.config.lambda = std::array{0.5, 1.0, 2.0}[static_cast<std::size_t>(pick(rng))];
    p.config.gamma = std::array{0.0, 0.0625, 0.25}[static_cast<std::size_t>(pick(rng))];
    p.config.min_child_weight = std::array{0.0, 0.5, 1.0}[static_cast<std::size_t>(pick(rng))];
    p.config.gain = kAllGainStrategies[static_cast<std::size_t>(strategy(rng))];
    return p;
}

/// True when find_best_split and the brute-force enumeration agree exactly.
inline bool split_matches_oracle(const SplitProblem& p) {
    const auto fast = find_best_split(p.x, p.rows, p.gp, p.config);
    const auto slow = brute_force_split(p.x, p.rows, p.gp, p.config);
    if (fast.has_value() != slow.has_value())
        return false;
    if (!fast)
        return true;
    return fast->feature == slow->feature && fast->threshold == slow->threshold &&
           fast->default_left == slow->default_left && fast->gain == slow->gain;
}

/// Central differences of cross-entropy in extended precision.
/// Loss written as softplus(raw) - y * raw to avoid cancellation in 1 - p.
inline long double cross_entropy(int y, long double raw) {
    const long double softplus = std::max(raw, 0.0L) + std::log1p(std::exp(-std::abs(raw)));
    return softplus - y * raw;
}
inline long double fd_grad(int y, long double raw) {
    const long double s = 1e-5L;
    return (cross_entropy(y, raw + s) - cross_entropy(y, raw - s)) / (2 * s);
}
inline long double fd_hess(int y, long double raw) {
    const long double s = 1e-4L;
    return (cross_entropy(y, raw + s) - 2 * cross_entropy(y, raw) + cross_entropy(y, raw - s)) /
           (s * s);
}

} // namespace xdcc::oracle
