#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xdcc/dataset.hpp"
#include "xdcc/models.hpp"

namespace xdcc {

/// Candidate values per tunable field. An empty list means "default only".
struct GridSpec {
    std::vector<int> trees;
    std::vector<int> depth;
    std::vector<double> eta;
    std::vector<double> lambda;
    std::vector<double> gamma;
    std::vector<double> min_child_weight;
    std::vector<GainStrategy> gain;
    std::vector<std::size_t> chain_length;

    /// Number of configurations in the Cartesian product.
    std::size_t cardinality() const noexcept;
};

/// One `key=v1,v2,...` per line; keys trees, depth, eta, lambda, gamma,
/// min_child_weight, gain, chain_length. Blank lines and `#` comments skipped.
GridSpec parse_grid(std::string_view text);
GridSpec load_grid(const std::filesystem::path& path);

/// The full XDCC tuning grid: depth x rounds x learning rate x gain.
GridSpec default_xdcc_grid();

/// Expands the grid in enumeration order (trees outermost, chain_length
/// innermost) on top of `base`.
std::vector<ModelSpec> enumerate_grid(const GridSpec& grid, const ModelSpec& base);

struct GridRow {
    ModelSpec spec;
    double f1 = 0.0;
};

struct GridResult {
    ModelSpec best;
    double best_f1 = 0.0;
    std::vector<GridRow> table;
};

/// Trains every grid cell on an 80% holdout split and scores example F1 on
/// the remaining 20%. The first cell with the maximal F1 wins.
GridResult grid_search(const Dataset& train, const GridSpec& grid, Method method,
                       std::uint64_t seed, double holdout = 0.2);

/// Columns: method,trees,depth,eta,lambda,gamma,min_child_weight,gain,chain_length,F1
std::string grid_table_csv(const GridResult& r);
/// `key=value` lines of the best configuration, loadable by parse_grid.
std::string best_config_text(const ModelSpec& spec);

} // namespace xdcc
