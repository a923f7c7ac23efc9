#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "advda/core_model.hpp"
#include "advda/dataset.hpp"
#include "advda/matrix.hpp"

namespace advda {

/// Mann-Whitney AUROC: (#(s+ > s-) + 0.5 #(s+ == s-)) / (P N), computed from
/// midranks in O(n log n). Throws UndefinedMetric unless both classes occur.
double auroc(std::span<const double> scores, std::span<const double> labels);

struct MacroAuroc {
    double value = 0.0;
    std::vector<double> per_column;        // NaN for skipped columns
    std::vector<std::size_t> skipped;      // columns with a single class
};

// Mean of per-column AUROC over columns that contain both classes.
MacroAuroc macro_auroc(const Matrix& scores, const Matrix& labels);

/// Cohen's kappa with linear disagreement weights |i - j| / (C - 1).
double linear_weighted_kappa(std::span<const int> pred, std::span<const int> truth, int num_classes);

struct MetricsReport {
    TaskKind task = TaskKind::binary();
    std::string metric_name;
    double headline = 0.0;
    std::optional<std::vector<double>> per_outcome;  // MultiLabel only
    std::vector<std::size_t> skipped_outcomes;
    std::size_t n_eval = 0;
};

// Headline metric name per task: auroc, linear_weighted_kappa, macro_auroc.
std::string headline_metric_name(const TaskKind& task);

/// Headline from precomputed bank scores (n x heads, as bank_predict returns).
MetricsReport evaluate_scores(const Matrix& scores, const Dataset& data);

/// Scores `data` with `bank` (rows in parallel) and computes the headline metric.
MetricsReport evaluate(const HeadBank& bank, const Dataset& data);

}  // namespace advda
