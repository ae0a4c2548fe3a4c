#include "xdcc/gains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace xdcc {

GainStrategy parse_gain_strategy(std::string_view name) {
    if (name == "sumGain")
        return GainStrategy::SumGain;
    if (name == "maxGain")
        return GainStrategy::MaxGain;
    if (name == "sumWeight" || name == "sumGrad" || name == "avgGrad")
        return GainStrategy::SumWeight;
    if (name == "maxWeight" || name == "maxGrad")
        return GainStrategy::MaxWeight;
    if (name == "sumAbsG")
        return GainStrategy::SumAbsG;
    if (name == "maxAbsG")
        return GainStrategy::MaxAbsG;
    throw std::invalid_argument("unknown gain strategy '" + std::string(name) + "'");
}

std::string_view to_string(GainStrategy s) noexcept {
    switch (s) {
    case GainStrategy::SumGain: return "sumGain";
    case GainStrategy::MaxGain: return "maxGain";
    case GainStrategy::SumWeight: return "sumWeight";
    case GainStrategy::MaxWeight: return "maxWeight";
    case GainStrategy::SumAbsG: return "sumAbsG";
    case GainStrategy::MaxAbsG: return "maxAbsG";
    }
    return "?";
}

double gain_scale(GainStrategy s) noexcept {
    return (s == GainStrategy::SumGain || s == GainStrategy::MaxGain) ? 0.5 : 1.0;
}

namespace {

// Per-label term of the node score.
double label_term(GainStrategy s, double G, double H, double lambda) {
    const double denom = H + lambda;
    if (denom == 0.0) {
        if (G == 0.0)
            return 0.0;
        throw std::domain_error("node_score: zero denominator with nonzero gradient");
    }
    switch (s) {
    case GainStrategy::SumGain:
    case GainStrategy::MaxGain: return G * G / denom;
    case GainStrategy::SumWeight:
    case GainStrategy::MaxWeight: return -G / denom;
    case GainStrategy::SumAbsG:
    case GainStrategy::MaxAbsG: return std::abs(G / denom);
    }
    return 0.0;
}

bool is_max_variant(GainStrategy s) {
    return s == GainStrategy::MaxGain || s == GainStrategy::MaxWeight || s == GainStrategy::MaxAbsG;
}

} // namespace

double node_score(GainStrategy s, const GradStats& stats, double lambda) {
    const std::size_t n = stats.n_labels();
    if (n == 0)
        return 0.0;
    if (is_max_variant(s)) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j)
            best = std::max(best, label_term(s, stats.grad[j], stats.hess[j], lambda));
        return best;
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        sum += label_term(s, stats.grad[j], stats.hess[j], lambda);
    return sum;
}

double split_gain(GainStrategy s, const GradStats& left, const GradStats& right, double lambda,
                  double gamma) {
    const GradStats parent = left + right;
    return gain_scale(s) *
               (node_score(s, left, lambda) + node_score(s, right, lambda) -
                node_score(s, parent, lambda)) -
           gamma;
}

} // namespace xdcc
