#pragma once

#include <map>
#include <string>
#include <vector>

#include "xdcc/matrix.hpp"

namespace xdcc {

/// Mean over instances of the fraction of labels predicted correctly.
double hamming_accuracy(const LabelMatrix& truth, const LabelMatrix& pred);

/// Fraction of instances whose label vector is predicted exactly.
double subset_accuracy(const LabelMatrix& truth, const LabelMatrix& pred);

/// Example-based F1 averaged over instances. Rows where neither truth nor
/// prediction has a positive label score `empty_score`.
double example_f1(const LabelMatrix& truth, const LabelMatrix& pred, double empty_score = 1.0);

struct MetricsReport {
    double hamming = 0.0;
    double subset = 0.0;
    double f1 = 0.0;
    double train_seconds = 0.0;
    double predict_seconds = 0.0;
};

MetricsReport evaluate(const LabelMatrix& truth, const LabelMatrix& pred);

/// dataset -> method -> score (higher is better).
using ScoreTable = std::map<std::string, std::map<std::string, double>>;

/// Average rank per method across datasets; rank 1 is best and ties share
/// the mean of the ranks they span. Every dataset must score every method.
std::map<std::string, double> rank_table(const ScoreTable& scores);

/// Ranks of a single score list (1 = highest).
std::vector<double> mean_ranks(const std::vector<double>& scores);

std::string rank_table_csv(const std::map<std::string, double>& ranks);

} // namespace xdcc
