#include "xdcc/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace xdcc {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::vector<std::string_view> lines_of(std::string_view text) {
    auto lines = split(text, '\n');
    if (!lines.empty() && trim(lines.back()).empty())
        lines.pop_back();
    return lines;
}

double parse_real(std::string_view tok, std::size_t line) {
    tok = trim(tok);
    if (!tok.empty() && tok.front() == '+')
        tok.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || tok.empty() || !std::isfinite(v))
        throw ParseError(line, "unparsable number '" + std::string(tok) + "'");
    return v;
}

std::size_t parse_index(std::string_view tok, std::size_t line) {
    tok = trim(tok);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || tok.empty())
        throw ParseError(line, "unparsable index '" + std::string(tok) + "'");
    return v;
}

std::vector<std::string> default_names(const char* prefix, std::size_t n) {
    std::vector<std::string> names;
    names.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        names.push_back(prefix + std::to_string(i));
    return names;
}

} // namespace

DataFormat parse_data_format(std::string_view name) {
    if (name == "mlc-csv")
        return DataFormat::MlcCsv;
    if (name == "svmlight-ml")
        return DataFormat::SvmlightMl;
    throw std::invalid_argument("unknown data format '" + std::string(name) + "'");
}

std::string_view to_string(DataFormat f) noexcept {
    return f == DataFormat::MlcCsv ? "mlc-csv" : "svmlight-ml";
}

std::string format_real(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

Dataset::Dataset(FeatureMatrix features, LabelMatrix labels, std::vector<std::string> feature_names,
                 std::vector<std::string> label_names)
    : features_(std::move(features)), labels_(std::move(labels)),
      feature_names_(std::move(feature_names)), label_names_(std::move(label_names)) {
    if (features_.rows() == 0)
        throw std::invalid_argument("Dataset: needs at least one row");
    if (features_.cols() == 0)
        throw std::invalid_argument("Dataset: needs at least one feature");
    if (labels_.cols() == 0)
        throw std::invalid_argument("Dataset: needs at least one label");
    if (labels_.rows() != features_.rows())
        throw std::invalid_argument("Dataset: feature and label row counts differ");
    for (auto v : labels_.values())
        if (v > 1)
            throw std::invalid_argument("Dataset: labels must be 0 or 1");
    if (feature_names_.empty())
        feature_names_ = default_names("f", features_.cols());
    if (label_names_.empty())
        label_names_ = default_names("l", labels_.cols());
    if (feature_names_.size() != features_.cols() || label_names_.size() != labels_.cols())
        throw std::invalid_argument("Dataset: name count does not match column count");
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    FeatureMatrix f(rows.size(), n_features());
    LabelMatrix l(rows.size(), n_labels());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] >= n_rows())
            throw std::out_of_range("Dataset::subset: row index out of range");
        std::ranges::copy(features_.row(rows[i]), f.row(i).begin());
        std::ranges::copy(labels_.row(rows[i]), l.row(i).begin());
    }
    return Dataset(std::move(f), std::move(l), feature_names_, label_names_);
}

AugmentedDataset::AugmentedDataset(Dataset base, FeatureMatrix label_features)
    : base_(std::move(base)), label_features_(std::move(label_features)) {
    if (label_features_.rows() != base_.n_rows() || label_features_.cols() != base_.n_labels())
        throw std::invalid_argument("AugmentedDataset: label-feature shape must be M x N");
    for (const auto& v : label_features_.values())
        if (v.has_value() && (v.value() < 0.0 || v.value() > 1.0))
            throw std::invalid_argument("AugmentedDataset: label-features must lie in [0,1]");
}

FeatureMatrix AugmentedDataset::feature_matrix() const {
    return concat_columns(base_.features(), label_features_);
}

AugmentedDataset augment(const Dataset& d) {
    return AugmentedDataset(d, FeatureMatrix(d.n_rows(), d.n_labels(), FeatureValue::missing()));
}

FeatureMatrix concat_columns(const FeatureMatrix& left, const FeatureMatrix& right) {
    if (left.rows() != right.rows())
        throw std::invalid_argument("concat_columns: row counts differ");
    FeatureMatrix out(left.rows(), left.cols() + right.cols());
    for (std::size_t i = 0; i < left.rows(); ++i) {
        auto dst = out.row(i);
        std::ranges::copy(left.row(i), dst.begin());
        std::ranges::copy(right.row(i), dst.begin() + static_cast<std::ptrdiff_t>(left.cols()));
    }
    return out;
}

Dataset parse_mlc_csv(std::string_view text) {
    const auto lines = lines_of(text);
    if (lines.empty())
        throw ParseError(0, "empty file");

    std::size_t n_labels = 0;
    {
        constexpr std::string_view key = "#labels=";
        const auto meta = trim(lines[0]);
        if (!meta.starts_with(key))
            throw ParseError(1, "expected '#labels=N' metadata line");
        n_labels = parse_index(meta.substr(key.size()), 1);
        if (n_labels == 0)
            throw ParseError(1, "label count must be positive");
    }
    if (lines.size() < 2)
        throw ParseError(1, "missing header line");

    const auto header = split(lines[1], ',');
    if (header.size() <= n_labels)
        throw ParseError(2, "header needs at least one feature column before the labels");
    const std::size_t n_features = header.size() - n_labels;
    std::vector<std::string> feature_names, label_names;
    for (std::size_t c = 0; c < header.size(); ++c)
        (c < n_features ? feature_names : label_names).emplace_back(trim(header[c]));

    FeatureMatrix features;
    LabelMatrix labels;
    std::vector<FeatureValue> frow(n_features);
    std::vector<unsigned char> lrow(n_labels);
    for (std::size_t li = 2; li < lines.size(); ++li) {
        const std::size_t line_no = li + 1;
        if (trim(lines[li]).empty())
            continue;
        const auto cells = split(lines[li], ',');
        if (cells.size() != header.size())
            throw ParseError(line_no, "expected " + std::to_string(header.size()) +
                                          " cells, found " + std::to_string(cells.size()));
        for (std::size_t c = 0; c < n_features; ++c) {
            const auto cell = trim(cells[c]);
            frow[c] = cell.empty() ? FeatureValue::missing() : FeatureValue(parse_real(cell, line_no));
        }
        for (std::size_t j = 0; j < n_labels; ++j) {
            const auto cell = trim(cells[n_features + j]);
            if (cell != "0" && cell != "1")
                throw ParseError(line_no, "label value must be 0 or 1, found '" + std::string(cell) + "'");
            lrow[j] = cell == "1" ? 1 : 0;
        }
        if (features.rows() == 0) {
            features = FeatureMatrix(0, n_features);
            labels = LabelMatrix(0, n_labels);
        }
        features.push_row(frow);
        labels.push_row(lrow);
    }
    if (features.rows() == 0)
        throw ParseError(0, "no data rows");
    return Dataset(std::move(features), std::move(labels), std::move(feature_names),
                   std::move(label_names));
}

Dataset parse_svmlight_ml(std::string_view text, std::optional<std::size_t> n_labels) {
    struct Row {
        std::vector<std::size_t> labels;
        std::vector<std::pair<std::size_t, double>> features;
    };
    std::vector<Row> rows;
    std::size_t max_label = 0, max_feature = 0;
    bool any_label = false, any_feature = false;

    const auto lines = lines_of(text);
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const std::size_t line_no = li + 1;
        const auto line = trim(lines[li]);
        if (line.empty())
            continue;
        Row row;
        const auto space = line.find(' ');
        const auto label_tok = line.substr(0, space);
        if (label_tok != "-") {
            for (auto tok : split(label_tok, ',')) {
                const auto j = parse_index(tok, line_no);
                row.labels.push_back(j);
                max_label = std::max(max_label, j);
                any_label = true;
            }
        }
        if (space != std::string_view::npos) {
            std::istringstream pairs{std::string(line.substr(space + 1))};
            std::string tok;
            while (pairs >> tok) {
                const auto colon = tok.find(':');
                if (colon == std::string::npos)
                    throw ParseError(line_no, "expected index:value, found '" + tok + "'");
                const std::string_view sv(tok);
                const auto k = parse_index(sv.substr(0, colon), line_no);
                if (!row.features.empty() && k <= row.features.back().first)
                    throw ParseError(line_no, "feature indices must be strictly ascending");
                row.features.emplace_back(k, parse_real(sv.substr(colon + 1), line_no));
                max_feature = std::max(max_feature, k);
                any_feature = true;
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw ParseError(0, "empty file");

    const std::size_t n = n_labels.value_or(any_label ? max_label + 1 : 1);
    if (n == 0)
        throw std::invalid_argument("label count must be positive");
    if (any_label && max_label >= n)
        throw ParseError(0, "label index " + std::to_string(max_label) + " exceeds label count " +
                                std::to_string(n));
    const std::size_t k = any_feature ? max_feature + 1 : 1;

    FeatureMatrix features(rows.size(), k, FeatureValue(0.0));
    LabelMatrix labels(rows.size(), n, 0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (auto j : rows[i].labels)
            labels(i, j) = 1;
        for (auto [idx, v] : rows[i].features)
            features(i, idx) = FeatureValue(v);
    }
    return Dataset(std::move(features), std::move(labels));
}

Dataset load_dataset(const std::filesystem::path& path, DataFormat format,
                     std::optional<std::size_t> n_labels) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    return format == DataFormat::MlcCsv ? parse_mlc_csv(text) : parse_svmlight_ml(text, n_labels);
}

std::string to_mlc_csv(const Dataset& d) {
    std::string out = "#labels=" + std::to_string(d.n_labels()) + "\n";
    const auto put_names = [&](const std::vector<std::string>& names, bool& first) {
        for (const auto& n : names) {
            if (!first)
                out += ',';
            out += n;
            first = false;
        }
    };
    bool first = true;
    put_names(d.feature_names(), first);
    put_names(d.label_names(), first);
    out += '\n';
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
        for (const auto& v : d.features().row(i)) {
            if (v.has_value())
                out += format_real(v.value());
            out += ',';
        }
        const auto labels = d.labels().row(i);
        for (std::size_t j = 0; j < labels.size(); ++j) {
            out += labels[j] ? '1' : '0';
            out += j + 1 < labels.size() ? ',' : '\n';
        }
    }
    return out;
}

void save_mlc_csv(const Dataset& d, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << to_mlc_csv(d);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
holdout_indices(std::size_t n_rows, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("split_holdout: fraction must lie in (0,1)");
    if (fraction * static_cast<double>(n_rows) < 1.0)
        throw std::invalid_argument("split_holdout: fraction * rows must be at least 1");
    const auto n_first =
        static_cast<std::size_t>(std::ceil((1.0 - fraction) * static_cast<double>(n_rows)));
    if (n_first == 0 || n_first >= n_rows)
        throw std::invalid_argument("split_holdout: a part would be empty");

    std::vector<std::size_t> perm(n_rows);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(seed);
    for (std::size_t i = n_rows - 1; i > 0; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i);
        std::swap(perm[i], perm[pick(rng)]);
    }
    std::vector<std::size_t> first(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_first));
    std::vector<std::size_t> second(perm.begin() + static_cast<std::ptrdiff_t>(n_first), perm.end());
    std::ranges::sort(first);
    std::ranges::sort(second);
    return {std::move(first), std::move(second)};
}

std::pair<Dataset, Dataset> split_holdout(const Dataset& d, double fraction, std::uint64_t seed) {
    const auto [a, b] = holdout_indices(d.n_rows(), fraction, seed);
    return {d.subset(a), d.subset(b)};
}

} // namespace xdcc
