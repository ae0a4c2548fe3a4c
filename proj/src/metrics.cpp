#include "xdcc/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "xdcc/dataset.hpp"

namespace xdcc {

namespace {

void check_shapes(const LabelMatrix& truth, const LabelMatrix& pred) {
    if (truth.rows() != pred.rows() || truth.cols() != pred.cols())
        throw std::invalid_argument("metrics: truth and prediction shapes differ");
    if (truth.rows() == 0 || truth.cols() == 0)
        throw std::invalid_argument("metrics: empty label matrix");
}

} // namespace

double hamming_accuracy(const LabelMatrix& truth, const LabelMatrix& pred) {
    check_shapes(truth, pred);
    double total = 0.0;
    for (std::size_t i = 0; i < truth.rows(); ++i) {
        std::size_t agree = 0;
        for (std::size_t j = 0; j < truth.cols(); ++j)
            agree += truth(i, j) == pred(i, j);
        total += static_cast<double>(agree) / static_cast<double>(truth.cols());
    }
    return total / static_cast<double>(truth.rows());
}

double subset_accuracy(const LabelMatrix& truth, const LabelMatrix& pred) {
    check_shapes(truth, pred);
    std::size_t exact = 0;
    for (std::size_t i = 0; i < truth.rows(); ++i)
        exact += std::ranges::equal(truth.row(i), pred.row(i));
    return static_cast<double>(exact) / static_cast<double>(truth.rows());
}

double example_f1(const LabelMatrix& truth, const LabelMatrix& pred, double empty_score) {
    check_shapes(truth, pred);
    double total = 0.0;
    for (std::size_t i = 0; i < truth.rows(); ++i) {
        std::size_t both = 0, n_true = 0, n_pred = 0;
        for (std::size_t j = 0; j < truth.cols(); ++j) {
            both += truth(i, j) && pred(i, j);
            n_true += truth(i, j);
            n_pred += pred(i, j);
        }
        total += (n_true + n_pred == 0)
                     ? empty_score
                     : 2.0 * static_cast<double>(both) / static_cast<double>(n_true + n_pred);
    }
    return total / static_cast<double>(truth.rows());
}

MetricsReport evaluate(const LabelMatrix& truth, const LabelMatrix& pred) {
    return {hamming_accuracy(truth, pred), subset_accuracy(truth, pred), example_f1(truth, pred),
            0.0, 0.0};
}

std::vector<double> mean_ranks(const std::vector<double>& scores) {
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::ranges::stable_sort(idx, [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::vector<double> ranks(scores.size());
    for (std::size_t start = 0; start < idx.size();) {
        std::size_t end = start + 1;
        while (end < idx.size() && scores[idx[end]] == scores[idx[start]])
            ++end;
        // Positions start..end-1 hold ranks start+1..end.
        const double r = (static_cast<double>(start + 1) + static_cast<double>(end)) / 2.0;
        for (std::size_t k = start; k < end; ++k)
            ranks[idx[k]] = r;
        start = end;
    }
    return ranks;
}

std::map<std::string, double> rank_table(const ScoreTable& scores) {
    if (scores.empty())
        throw std::invalid_argument("rank_table: no datasets");
    std::vector<std::string> methods;
    for (const auto& [m, _] : scores.begin()->second)
        methods.push_back(m);
    if (methods.empty())
        throw std::invalid_argument("rank_table: no methods");

    std::map<std::string, double> avg;
    for (const auto& [dataset, row] : scores) {
        if (row.size() != methods.size())
            throw std::invalid_argument("rank_table: dataset '" + dataset +
                                        "' does not score the same methods");
        std::vector<double> vals;
        for (const auto& m : methods) {
            const auto it = row.find(m);
            if (it == row.end())
                throw std::invalid_argument("rank_table: dataset '" + dataset + "' lacks method '" +
                                            m + "'");
            vals.push_back(it->second);
        }
        const auto r = mean_ranks(vals);
        for (std::size_t k = 0; k < methods.size(); ++k)
            avg[methods[k]] += r[k];
    }
    for (auto& [_, v] : avg)
        v /= static_cast<double>(scores.size());
    return avg;
}

std::string rank_table_csv(const std::map<std::string, double>& ranks) {
    std::string out = "method,avg_rank\n";
    for (const auto& [m, r] : ranks)
        out += m + ',' + format_real(r) + '\n';
    return out;
}

} // namespace xdcc
