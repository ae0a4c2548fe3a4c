#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace xdcc {

/// A feature cell: a finite real number or the `missing` marker.
///
/// Label-features of a classifier chain use the same type, where `missing`
/// reads as "not yet predicted".
class FeatureValue {
public:
    /// Default-constructed values are missing.
    constexpr FeatureValue() noexcept = default;

    explicit FeatureValue(double v) : v_(v) {
        if (!std::isfinite(v))
            throw std::invalid_argument("FeatureValue: value must be finite");
    }

    static constexpr FeatureValue missing() noexcept { return FeatureValue(); }

    bool is_missing() const noexcept { return std::isnan(v_); }
    bool has_value() const noexcept { return !is_missing(); }

    double value() const {
        if (is_missing())
            throw std::logic_error("FeatureValue: value() on missing cell");
        return v_;
    }

    /// Value or `fallback` when missing.
    double value_or(double fallback) const noexcept { return is_missing() ? fallback : v_; }

    friend bool operator==(const FeatureValue& a, const FeatureValue& b) noexcept {
        if (a.is_missing() || b.is_missing())
            return a.is_missing() == b.is_missing();
        return std::bit_cast<std::uint64_t>(a.v_) == std::bit_cast<std::uint64_t>(b.v_);
    }

private:
    double v_ = std::numeric_limits<double>::quiet_NaN();
};

} // namespace xdcc
