#include "fflm/eval.hpp"

#include "fflm/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <numeric>
#include <random>

namespace fflm {

static void check_binary(std::span<const int> values, const char * what) {
    for (size_t i = 0; i < values.size(); i++) {
        if (values[i] != 0 && values[i] != 1) {
            fail(error_kind::protocol_violation,
                 std::string(what) + " must be 0 or 1, got " + std::to_string(values[i]) +
                     " at index " + std::to_string(i));
        }
    }
}

static void check_finite(std::span<const double> values, const char * what) {
    for (size_t i = 0; i < values.size(); i++) {
        if (!std::isfinite(values[i])) {
            fail(error_kind::protocol_violation,
                 std::string(what) + " at index " + std::to_string(i) + " is not finite");
        }
    }
}

static double confusion_balanced_accuracy(const confusion_counts & c) {
    const int64_t pos = c.tp + c.fn;
    const int64_t neg = c.tn + c.fp;
    if (pos == 0 || neg == 0) {
        fail(error_kind::single_class_labels, "labels contain only one class");
    }
    const double tpr = static_cast<double>(c.tp) / static_cast<double>(pos);
    const double tnr = static_cast<double>(c.tn) / static_cast<double>(neg);
    return 0.5 * (tpr + tnr);
}

double balanced_accuracy(std::span<const int> labels, std::span<const int> predictions) {
    if (labels.size() != predictions.size()) {
        fail(error_kind::length_mismatch,
             "labels and predictions differ in length: " + std::to_string(labels.size()) +
                 " vs " + std::to_string(predictions.size()));
    }
    if (labels.empty()) {
        fail(error_kind::empty_input, "labels are empty");
    }
    check_binary(labels, "labels");
    check_binary(predictions, "predictions");

    confusion_counts c;
    for (size_t i = 0; i < labels.size(); i++) {
        if (labels[i] == 1) {
            (predictions[i] == 1 ? c.tp : c.fn)++;
        } else {
            (predictions[i] == 1 ? c.fp : c.tn)++;
        }
    }
    return confusion_balanced_accuracy(c);
}

threshold_result select_threshold(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) {
        fail(error_kind::length_mismatch,
             "scores and labels differ in length: " + std::to_string(scores.size()) + " vs " +
                 std::to_string(labels.size()));
    }
    if (scores.empty()) {
        fail(error_kind::empty_input, "scores are empty");
    }
    check_finite(scores, "score");
    check_binary(labels, "labels");

    const size_t n = scores.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] < scores[b]; });

    confusion_counts c;
    for (int label : labels) {
        (label == 1 ? c.tp : c.fp)++;
    }

    // Predictions follow score >= threshold -> 1, so at -inf everything is
    // predicted consistent; sweeping the threshold upward past each distinct
    // score flips that score group to 0.
    threshold_result best;
    best.threshold    = -std::numeric_limits<double>::infinity();
    best.balanced_acc = confusion_balanced_accuracy(c);

    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) {
            j++;
        }
        for (size_t k = i; k <= j; k++) {
            if (labels[order[k]] == 1) {
                c.tp--;
                c.fn++;
            } else {
                c.fp--;
                c.tn++;
            }
        }
        const double candidate =
            j + 1 < n ? 0.5 * (scores[order[j]] + scores[order[j + 1]])
                      : std::numeric_limits<double>::infinity();
        const double ba = confusion_balanced_accuracy(c);
        if (ba > best.balanced_acc) {
            best.threshold    = candidate;
            best.balanced_acc = ba;
        }
        i = j + 1;
    }
    return best;
}

grid_search_result grid_search_weights(std::span<const delta_triple> val_deltas,
                                       std::span<const int> val_labels, double step) {
    if (val_deltas.size() != val_labels.size()) {
        fail(error_kind::length_mismatch,
             "deltas and labels differ in length: " + std::to_string(val_deltas.size()) +
                 " vs " + std::to_string(val_labels.size()));
    }
    if (val_deltas.empty()) {
        fail(error_kind::empty_input, "validation set is empty");
    }
    if (!(step > 0.0) || step > 1.0) {
        fail(error_kind::config_error, "grid step must lie in (0, 1]");
    }
    const auto n_steps = static_cast<int64_t>(std::llround(1.0 / step));
    if (n_steps < 1 || std::fabs(n_steps * step - 1.0) > 1e-9) {
        fail(error_kind::config_error, "grid step must divide 1 evenly");
    }

    grid_search_result best;
    bool have_best = false;
    std::vector<double> combined(val_deltas.size());
    for (int64_t a = 0; a <= n_steps; a++) {
        for (int64_t b = 0; b <= n_steps - a; b++) {
            const int64_t c = n_steps - a - b;
            const metric_weights w{
                static_cast<double>(a) / static_cast<double>(n_steps),
                static_cast<double>(b) / static_cast<double>(n_steps),
                static_cast<double>(c) / static_cast<double>(n_steps),
            };
            for (size_t i = 0; i < val_deltas.size(); i++) {
                combined[i] = fflm_combine(val_deltas[i], w);
            }
            const threshold_result r = select_threshold(combined, val_labels);
            best.combos_evaluated++;
            if (!have_best || r.balanced_acc > best.balanced_acc) {
                have_best         = true;
                best.weights      = w;
                best.threshold    = r.threshold;
                best.balanced_acc = r.balanced_acc;
            }
        }
    }
    return best;
}

static std::vector<double> average_ranks(std::span<const double> values) {
    const size_t n = values.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) {
            j++;
        }
        const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (size_t k = i; k <= j; k++) {
            ranks[order[k]] = mean_rank;
        }
        i = j + 1;
    }
    return ranks;
}

static double pearson(std::span<const double> x, std::span<const double> y) {
    const size_t n = x.size();
    std::vector<double> dx(n), dy(n), xy(n), xx(n), yy(n);
    const double mx = pairwise_mean(x);
    const double my = pairwise_mean(y);
    for (size_t i = 0; i < n; i++) {
        dx[i] = x[i] - mx;
        dy[i] = y[i] - my;
        xy[i] = dx[i] * dy[i];
        xx[i] = dx[i] * dx[i];
        yy[i] = dy[i] * dy[i];
    }
    const double sxx = pairwise_sum(xx);
    const double syy = pairwise_sum(yy);
    if (sxx == 0.0 || syy == 0.0) {
        fail(error_kind::degenerate_input, "input has zero variance");
    }
    const double r = pairwise_sum(xy) / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

static int64_t tie_pair_count(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    int64_t pairs = 0;
    size_t i = 0;
    while (i < sorted.size()) {
        size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) {
            j++;
        }
        const int64_t t = static_cast<int64_t>(j - i + 1);
        pairs += t * (t - 1) / 2;
        i = j + 1;
    }
    return pairs;
}

static double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
    const size_t n = x.size();
    int64_t concordant = 0;
    int64_t discordant = 0;
    for (size_t i = 0; i < n; i++) {
        for (size_t j = i + 1; j < n; j++) {
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            if (dx == 0.0 || dy == 0.0) {
                continue;
            }
            ((dx > 0.0) == (dy > 0.0) ? concordant : discordant)++;
        }
    }
    const int64_t n0 = static_cast<int64_t>(n) * (static_cast<int64_t>(n) - 1) / 2;
    const int64_t n1 = tie_pair_count(x);
    const int64_t n2 = tie_pair_count(y);
    if (n0 == n1 || n0 == n2) {
        fail(error_kind::degenerate_input, "input has no untied pairs");
    }
    const double denom = std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
    return std::clamp(static_cast<double>(concordant - discordant) / denom, -1.0, 1.0);
}

double correlate(std::span<const double> x, std::span<const double> y, correlation_kind kind) {
    if (x.size() != y.size()) {
        fail(error_kind::length_mismatch,
             "inputs differ in length: " + std::to_string(x.size()) + " vs " +
                 std::to_string(y.size()));
    }
    if (x.size() < 2) {
        fail(error_kind::degenerate_input, "correlation needs at least 2 points");
    }
    check_finite(x, "x");
    check_finite(y, "y");

    switch (kind) {
        case correlation_kind::pearson:
            return pearson(x, y);
        case correlation_kind::spearman: {
            const auto rx = average_ranks(x);
            const auto ry = average_ranks(y);
            return pearson(rx, ry);
        }
        case correlation_kind::kendall:
            return kendall_tau_b(x, y);
    }
    fail(error_kind::config_error, "unknown correlation kind");
}

correlation_report summary_level_report(std::span<const double> scores,
                                        std::span<const double> ratings) {
    correlation_report report;
    report.pearson  = correlate(scores, ratings, correlation_kind::pearson);
    report.spearman = correlate(scores, ratings, correlation_kind::spearman);
    report.kendall  = correlate(scores, ratings, correlation_kind::kendall);
    report.level    = correlation_level::summary;
    report.n        = static_cast<int64_t>(scores.size());
    return report;
}

correlation_report system_level_report(std::span<const double> scores,
                                       std::span<const double> ratings,
                                       std::span<const std::string> systems) {
    if (scores.size() != ratings.size() || scores.size() != systems.size()) {
        fail(error_kind::length_mismatch, "scores, ratings and systems differ in length");
    }
    if (scores.empty()) {
        fail(error_kind::empty_input, "no examples");
    }
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_system;
    for (size_t i = 0; i < scores.size(); i++) {
        if (systems[i].empty()) {
            fail(error_kind::missing_system_id,
                 "example at index " + std::to_string(i) + " has no system id");
        }
        auto & bucket = by_system[systems[i]];
        bucket.first.push_back(scores[i]);
        bucket.second.push_back(ratings[i]);
    }
    if (by_system.size() < 2) {
        fail(error_kind::too_few_systems,
             "system-level correlation needs at least 2 systems, got " +
                 std::to_string(by_system.size()));
    }

    std::vector<double> mean_scores, mean_ratings;
    mean_scores.reserve(by_system.size());
    mean_ratings.reserve(by_system.size());
    for (const auto & [name, bucket] : by_system) {
        mean_scores.push_back(pairwise_mean(bucket.first));
        mean_ratings.push_back(pairwise_mean(bucket.second));
    }

    correlation_report report;
    report.pearson  = correlate(mean_scores, mean_ratings, correlation_kind::pearson);
    report.spearman = correlate(mean_scores, mean_ratings, correlation_kind::spearman);
    report.kendall  = correlate(mean_scores, mean_ratings, correlation_kind::kendall);
    report.level    = correlation_level::system;
    report.n        = static_cast<int64_t>(by_system.size());
    return report;
}

static uint64_t fnv1a_bytes(uint64_t h, const void * data, size_t n) {
    const auto * bytes = static_cast<const unsigned char *>(data);
    for (size_t i = 0; i < n; i++) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

static uint64_t draw_seed(uint64_t seed, const std::string & type, uint64_t repeat) {
    unsigned char le[8];
    uint64_t h = 0xcbf29ce484222325ULL;
    for (int i = 0; i < 8; i++) {
        le[i] = static_cast<unsigned char>(seed >> (8 * i));
    }
    h = fnv1a_bytes(h, le, 8);
    const unsigned char sep = 0x1D;
    h = fnv1a_bytes(h, &sep, 1);
    h = fnv1a_bytes(h, type.data(), type.size());
    h = fnv1a_bytes(h, &sep, 1);
    for (int i = 0; i < 8; i++) {
        le[i] = static_cast<unsigned char>(repeat >> (8 * i));
    }
    return fnv1a_bytes(h, le, 8);
}

static const char * const k_canonical_types[] = {"Sem", "Disc", "CVer"};

std::vector<error_type_result> error_type_analysis(const std::vector<eval_example> & examples,
                                                   std::span<const double> scores,
                                                   const error_type_params & params) {
    if (examples.size() != scores.size()) {
        fail(error_kind::length_mismatch,
             "examples and scores differ in length: " + std::to_string(examples.size()) +
                 " vs " + std::to_string(scores.size()));
    }
    if (examples.empty()) {
        fail(error_kind::empty_input, "no examples");
    }
    if (params.n_per_type < 1) {
        fail(error_kind::config_error, "n_per_type must be at least 1");
    }
    if (params.repeats < 1) {
        fail(error_kind::config_error, "repeats must be at least 1");
    }
    check_finite(scores, "score");

    std::vector<size_t> faithful;
    for (size_t i = 0; i < examples.size(); i++) {
        const auto & ex = examples[i];
        if (!ex.label) {
            fail(error_kind::mode_mismatch,
                 "error-type analysis needs detection labels; example \"" + ex.id +
                     "\" has none");
        }
        if (*ex.label == 1 && ex.error_types.empty()) {
            faithful.push_back(i);
        }
    }
    if (faithful.empty()) {
        fail(error_kind::empty_faithful_pool,
             "no consistent untagged examples to compare against");
    }

    std::vector<std::string> types = params.types;
    if (types.empty()) {
        for (const char * t : k_canonical_types) {
            for (const auto & ex : examples) {
                if (ex.error_types.count(t)) {
                    types.emplace_back(t);
                    break;
                }
            }
        }
        if (types.empty()) {
            fail(error_kind::insufficient_examples, "no examples carry an error type");
        }
    } else {
        for (const auto & t : types) {
            if (std::find(std::begin(k_canonical_types), std::end(k_canonical_types), t) ==
                std::end(k_canonical_types)) {
                fail(error_kind::config_error, "unknown error type \"" + t + "\"");
            }
        }
    }

    std::vector<error_type_result> results;
    results.reserve(types.size());
    for (const auto & type : types) {
        std::vector<size_t> tagged;
        size_t multi = 0;
        for (size_t i = 0; i < examples.size(); i++) {
            if (examples[i].error_types.count(type)) {
                tagged.push_back(i);
                if (examples[i].error_types.size() > 1) {
                    multi++;
                }
            }
        }
        if (tagged.size() < static_cast<size_t>(params.n_per_type)) {
            fail(error_kind::insufficient_examples,
                 "error type \"" + type + "\" has " + std::to_string(tagged.size()) +
                     " tagged examples, need " + std::to_string(params.n_per_type));
        }

        error_type_result result;
        result.type         = type;
        result.tagged_total = tagged.size();
        result.multi_tagged = multi;

        std::vector<double> per_repeat(static_cast<size_t>(params.repeats));
        for (int r = 0; r < params.repeats; r++) {
            std::mt19937_64 rng(draw_seed(params.seed, type, static_cast<uint64_t>(r)));
            std::vector<size_t> pool = tagged;
            // Partial Fisher-Yates with a modulo draw: uniform_int_distribution
            // is implementation-defined, and reproducibility across standard
            // libraries matters more here than the negligible modulo bias.
            const auto take = static_cast<size_t>(params.n_per_type);
            for (size_t i = 0; i < take; i++) {
                const size_t j = i + static_cast<size_t>(rng() % (pool.size() - i));
                std::swap(pool[i], pool[j]);
            }

            std::vector<double> xs;
            std::vector<double> ys;
            xs.reserve(take + faithful.size());
            ys.reserve(take + faithful.size());
            for (size_t i = 0; i < take; i++) {
                xs.push_back(scores[pool[i]]);
                ys.push_back(0.0);
            }
            for (size_t idx : faithful) {
                xs.push_back(scores[idx]);
                ys.push_back(1.0);
            }
            try {
                per_repeat[static_cast<size_t>(r)] =
                    correlate(xs, ys, correlation_kind::spearman);
            } catch (const error & e) {
                if (e.kind() != error_kind::degenerate_input) {
                    throw;
                }
                per_repeat[static_cast<size_t>(r)] = 0.0;
                result.degenerate_repeats++;
            }
        }
        result.mean_spearman = pairwise_mean(per_repeat);
        results.push_back(std::move(result));
    }
    return results;
}

} // namespace fflm
