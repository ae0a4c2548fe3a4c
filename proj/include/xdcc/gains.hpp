#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace xdcc {

/// Per-label sums of gradients and Hessians over an instance set.
struct GradStats {
    std::vector<double> grad;
    std::vector<double> hess;

    GradStats() = default;
    explicit GradStats(std::size_t n_labels) : grad(n_labels, 0.0), hess(n_labels, 0.0) {}

    std::size_t n_labels() const noexcept { return grad.size(); }

    /// Accumulate one instance's per-label (g, h).
    void add(std::span<const double> g, std::span<const double> h) noexcept {
        for (std::size_t j = 0; j < grad.size(); ++j) {
            grad[j] += g[j];
            hess[j] += h[j];
        }
    }
    GradStats& operator+=(const GradStats& o) noexcept {
        add(o.grad, o.hess);
        return *this;
    }
    GradStats& operator-=(const GradStats& o) noexcept {
        for (std::size_t j = 0; j < grad.size(); ++j) {
            grad[j] -= o.grad[j];
            hess[j] -= o.hess[j];
        }
        return *this;
    }
    friend GradStats operator+(GradStats a, const GradStats& b) noexcept { return a += b; }
    friend GradStats operator-(GradStats a, const GradStats& b) noexcept { return a -= b; }

    /// Sum of Hessians over labels (the min_child_weight measure).
    double hess_total() const noexcept {
        double s = 0.0;
        for (double h : hess)
            s += h;
        return s;
    }

    friend bool operator==(const GradStats&, const GradStats&) = default;
};

/// Node-score aggregation over labels used to rank splits.
enum class GainStrategy { SumGain, MaxGain, SumWeight, MaxWeight, SumAbsG, MaxAbsG };

inline constexpr std::array<GainStrategy, 6> kAllGainStrategies = {
    GainStrategy::SumGain,   GainStrategy::MaxGain, GainStrategy::SumWeight,
    GainStrategy::MaxWeight, GainStrategy::SumAbsG, GainStrategy::MaxAbsG};

/// Accepts canonical names and the aliases sumGrad, maxGrad, avgGrad.
GainStrategy parse_gain_strategy(std::string_view name);
std::string_view to_string(GainStrategy s) noexcept;

/// Factor applied to the child/parent score difference: 1/2 for the
/// squared-gradient strategies, 1 otherwise.
double gain_scale(GainStrategy s) noexcept;

/// Node score of a set with the given per-label sums. With
/// q_j = G_j^2/(H_j+lambda) and w_j = -G_j/(H_j+lambda):
/// sum/max of q, sum/max of w, sum/max of |w|.
///
/// A label with G_j = 0 and H_j + lambda = 0 contributes 0; a nonzero G_j
/// over a zero denominator throws std::domain_error.
double node_score(GainStrategy s, const GradStats& stats, double lambda);

/// c * [S(left) + S(right) - S(left + right)] - gamma.
double split_gain(GainStrategy s, const GradStats& left, const GradStats& right, double lambda,
                  double gamma);

} // namespace xdcc
