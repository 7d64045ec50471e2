#pragma once

#include "fflm/dataset.hpp"
#include "fflm/metrics.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fflm {

struct confusion_counts {
    int64_t tp = 0, fp = 0, tn = 0, fn = 0;
};

struct detection_report {
    double threshold = 0.0;
    metric_weights weights;
    double balanced_acc = 0.0;
    confusion_counts confusion;
    int64_t n = 0;
};

enum class correlation_level {
    summary,
    system,
};

struct correlation_report {
    double pearson = 0.0;
    double spearman = 0.0;
    double kendall = 0.0;
    correlation_level level = correlation_level::summary;
    int64_t n = 0;
};

enum class correlation_kind {
    pearson,
    spearman,
    kendall,
};

// (TPR + TNR) / 2 with positive class = 1. Requires both classes present.
double balanced_accuracy(std::span<const int> labels, std::span<const int> predictions);

struct threshold_result {
    double threshold = 0.0;
    double balanced_acc = 0.0;
};

// Exhaustive scan over {-inf} + midpoints of consecutive distinct sorted
// scores + {+inf} under the rule score >= threshold -> 1. Ties broken toward
// the smallest threshold.
threshold_result select_threshold(std::span<const double> scores, std::span<const int> labels);

struct grid_search_result {
    metric_weights weights;
    double threshold = 0.0;
    double balanced_acc = 0.0;
    size_t combos_evaluated = 0;
};

// Enumerates every (alpha, beta, delta) on the step grid summing to 1
// (66 combos at step 0.1) in lexicographic order; each combo is scored by
// select_threshold over the combined deltas. Ties keep the lexicographically
// smallest weights.
grid_search_result grid_search_weights(std::span<const delta_triple> val_deltas,
                                       std::span<const int> val_labels, double step = 0.1);

// pearson: product-moment. spearman: pearson over average ranks (ties share
// the mean rank). kendall: tau-b.
double correlate(std::span<const double> x, std::span<const double> y, correlation_kind kind);

correlation_report summary_level_report(std::span<const double> scores,
                                        std::span<const double> ratings);

// Correlates per-system means; requires >= 2 distinct systems and a system
// id on every example.
correlation_report system_level_report(std::span<const double> scores,
                                       std::span<const double> ratings,
                                       std::span<const std::string> systems);

struct error_type_params {
    std::vector<std::string> types; // empty: every canonical type present in the data
    int n_per_type = 50;
    int repeats = 10;
    uint64_t seed = 0;
};

struct error_type_result {
    std::string type;
    double mean_spearman = 0.0;
    int degenerate_repeats = 0; // repeats where the correlation was undefined (counted as 0)
    size_t tagged_total = 0;
    size_t multi_tagged = 0;    // tagged examples that also carry another type
};

// Per error type: each repeat draws n_per_type tagged examples without
// replacement (seeded), unions them with the full faithful pool
// (label == 1, untagged), assigns target 1 to faithful and 0 to sampled
// errors, and averages the Spearman correlation between scores and targets
// over repeats. Deterministic in seed.
std::vector<error_type_result> error_type_analysis(const std::vector<eval_example> & examples,
                                                   std::span<const double> scores,
                                                   const error_type_params & params);

} // namespace fflm
