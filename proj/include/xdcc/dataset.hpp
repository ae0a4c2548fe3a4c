#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xdcc/feature_value.hpp"
#include "xdcc/matrix.hpp"

namespace xdcc {

using FeatureMatrix = Matrix<FeatureValue>;

/// Malformed input file. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

enum class DataFormat { MlcCsv, SvmlightMl };

DataFormat parse_data_format(std::string_view name);
std::string_view to_string(DataFormat f) noexcept;

/// Multi-label dataset: M x K features and M x N binary labels.
class Dataset {
public:
    Dataset(FeatureMatrix features, LabelMatrix labels,
            std::vector<std::string> feature_names = {},
            std::vector<std::string> label_names = {});

    std::size_t n_rows() const noexcept { return features_.rows(); }
    std::size_t n_features() const noexcept { return features_.cols(); }
    std::size_t n_labels() const noexcept { return labels_.cols(); }

    const FeatureMatrix& features() const noexcept { return features_; }
    const LabelMatrix& labels() const noexcept { return labels_; }
    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
    const std::vector<std::string>& label_names() const noexcept { return label_names_; }

    /// Rows in the given order.
    Dataset subset(std::span<const std::size_t> rows) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    FeatureMatrix features_;
    LabelMatrix labels_;
    std::vector<std::string> feature_names_;
    std::vector<std::string> label_names_;
};

/// Dataset plus one label-feature column per label, appended after the K
/// base columns.
class AugmentedDataset {
public:
    AugmentedDataset(Dataset base, FeatureMatrix label_features);

    const Dataset& base() const noexcept { return base_; }
    const FeatureMatrix& label_features() const noexcept { return label_features_; }

    /// Width presented to learners: K + N.
    std::size_t width() const noexcept { return base_.n_features() + base_.n_labels(); }

    /// The M x (K+N) matrix learners consume.
    FeatureMatrix feature_matrix() const;

    friend bool operator==(const AugmentedDataset&, const AugmentedDataset&) = default;

private:
    Dataset base_;
    FeatureMatrix label_features_;
};

/// Label-features all missing.
AugmentedDataset augment(const Dataset& d);

/// Concatenate base features and label-features column-wise.
FeatureMatrix concat_columns(const FeatureMatrix& left, const FeatureMatrix& right);

/// `n_labels` overrides N for svmlight-ml (otherwise max label index + 1).
Dataset load_dataset(const std::filesystem::path& path, DataFormat format,
                     std::optional<std::size_t> n_labels = std::nullopt);
Dataset parse_mlc_csv(std::string_view text);
Dataset parse_svmlight_ml(std::string_view text, std::optional<std::size_t> n_labels = std::nullopt);

std::string to_mlc_csv(const Dataset& d);
void save_mlc_csv(const Dataset& d, const std::filesystem::path& path);

/// Seeded row partition. First part holds ceil((1 - fraction) * M) rows;
/// both parts keep file order.
std::pair<Dataset, Dataset> split_holdout(const Dataset& d, double fraction, std::uint64_t seed);

/// Index form of split_holdout.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
holdout_indices(std::size_t n_rows, double fraction, std::uint64_t seed);

/// Shortest round-trip decimal form of a double.
std::string format_real(double v);

} // namespace xdcc
