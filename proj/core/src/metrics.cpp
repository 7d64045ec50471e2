#include "fflm/metrics.hpp"

#include "fflm/error.hpp"

#include <cmath>

namespace fflm {

static double pairwise_sum_impl(const double * data, size_t n) {
    if (n <= 16) {
        double sum = 0.0;
        for (size_t i = 0; i < n; i++) {
            sum += data[i];
        }
        return sum;
    }
    const size_t half = n / 2;
    return pairwise_sum_impl(data, half) + pairwise_sum_impl(data + half, n - half);
}

double pairwise_sum(std::span<const double> values) {
    return pairwise_sum_impl(values.data(), values.size());
}

double pairwise_mean(std::span<const double> values) {
    if (values.empty()) {
        fail(error_kind::empty_input, "cannot take the mean of an empty vector");
    }
    return pairwise_sum(values) / static_cast<double>(values.size());
}

prob_vector prob_vector::from_probs(std::span<const double> probs) {
    if (probs.empty()) {
        fail(error_kind::empty_input, "probability vector is empty");
    }
    prob_vector out;
    out.probs_.reserve(probs.size());
    out.logs_.reserve(probs.size());
    for (size_t i = 0; i < probs.size(); i++) {
        const double p = probs[i];
        if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
            fail(error_kind::protocol_violation,
                 "probability out of range at index " + std::to_string(i) + ": " +
                     std::to_string(p));
        }
        const double clamped = p < k_prob_floor ? k_prob_floor : p;
        out.probs_.push_back(clamped);
        out.logs_.push_back(std::log(clamped));
    }
    return out;
}

prob_vector prob_vector::from_series(const token_prob_series & series) {
    validate_series(series, "prob_vector");
    const double log_floor = std::log(k_prob_floor);
    prob_vector out;
    out.probs_.reserve(series.logprobs.size());
    out.logs_.reserve(series.logprobs.size());
    for (double lp : series.logprobs) {
        const double clamped = lp < log_floor ? log_floor : lp;
        out.logs_.push_back(clamped);
        out.probs_.push_back(std::exp(clamped));
    }
    return out;
}

void validate_weights(const metric_weights & w) {
    const double parts[3] = {w.alpha, w.beta, w.delta};
    for (double v : parts) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            fail(error_kind::invalid_weights,
                 "weights must lie in [0, 1], got alpha=" + std::to_string(w.alpha) +
                     " beta=" + std::to_string(w.beta) + " delta=" + std::to_string(w.delta));
        }
    }
    const double sum = w.alpha + w.beta + w.delta;
    if (std::fabs(sum - 1.0) > 1e-9) {
        fail(error_kind::invalid_weights,
             "weights must sum to 1, got " + std::to_string(sum));
    }
}

template <typename F>
static double mean_zip(const prob_vector & a, const prob_vector & b, F term) {
    if (a.size() != b.size()) {
        fail(error_kind::length_mismatch,
             "probability vectors differ in length: " + std::to_string(a.size()) + " vs " +
                 std::to_string(b.size()));
    }
    if (a.size() == 0) {
        fail(error_kind::empty_input, "probability vectors are empty");
    }
    std::vector<double> terms(a.size());
    for (size_t i = 0; i < a.size(); i++) {
        terms[i] = term(i);
    }
    return pairwise_mean(terms);
}

double delta_prior_raw(const prob_vector & p_s2s, const prob_vector & p_other) {
    return mean_zip(p_s2s, p_other,
                    [&](size_t i) { return p_s2s.probs()[i] - p_other.probs()[i]; });
}

double delta_cond_raw(const prob_vector & p_s2s, const prob_vector & p_pref) {
    return delta_prior_raw(p_s2s, p_pref);
}

double delta_weighted(const prob_vector & p_s2s, const prob_vector & p_other) {
    return delta_ablated(p_s2s, p_other, ablation_flags{});
}

double delta_ablated(const prob_vector & p_s2s, const prob_vector & p_other,
                     ablation_flags flags) {
    return mean_zip(p_s2s, p_other, [&](size_t i) {
        const double diff = flags.use_log ? p_s2s.logs()[i] - p_other.logs()[i]
                                          : p_s2s.probs()[i] - p_other.probs()[i];
        const double weight = flags.use_token_weights ? std::exp(p_s2s.probs()[i]) : 1.0;
        return weight * diff;
    });
}

double fflm_combine(const delta_triple & deltas, const metric_weights & weights) {
    validate_weights(weights);
    return weights.alpha * deltas.d_y_prior + weights.beta * deltas.d_x_prior +
           weights.delta * deltas.d_y_cond;
}

double cop(const prob_vector & p_s2s, const prob_vector & p_pref) {
    return mean_zip(p_s2s, p_pref,
                    [&](size_t i) { return p_s2s.logs()[i] - p_pref.logs()[i]; });
}

double harim(const prob_vector & p_s2s, const prob_vector & p_lm) {
    return mean_zip(p_s2s, p_lm, [&](size_t i) {
        const double p = p_s2s.probs()[i];
        return (1.0 - p) * (1.0 - (p - p_lm.probs()[i]));
    });
}

double avg_logprob(const prob_vector & p_s2s) {
    if (p_s2s.size() == 0) {
        fail(error_kind::empty_input, "probability vector is empty");
    }
    return pairwise_mean(p_s2s.logs());
}

metric_scores score_pair(const pair_prob_bundle & bundle, const metric_weights & weights,
                         ablation_flags flags) {
    validate_weights(weights);

    const auto y_lm   = prob_vector::from_series(bundle.p_y_lm);
    const auto y_s2s  = prob_vector::from_series(bundle.p_y_s2s);
    const auto y_pref = prob_vector::from_series(bundle.p_y_pref);
    const auto x_lm   = prob_vector::from_series(bundle.p_x_lm);
    const auto x_s2s  = prob_vector::from_series(bundle.p_x_s2s);

    metric_scores out;
    out.deltas_raw.d_y_prior = delta_prior_raw(y_s2s, y_lm);
    out.deltas_raw.d_x_prior = delta_prior_raw(x_s2s, x_lm);
    out.deltas_raw.d_y_cond  = delta_cond_raw(y_s2s, y_pref);
    out.deltas_raw.weighted  = false;

    out.deltas_weighted.d_y_prior = delta_ablated(y_s2s, y_lm, flags);
    out.deltas_weighted.d_x_prior = delta_ablated(x_s2s, x_lm, flags);
    out.deltas_weighted.d_y_cond  = delta_ablated(y_s2s, y_pref, flags);
    out.deltas_weighted.weighted  = flags.use_log || flags.use_token_weights;

    out.fflm        = fflm_combine(out.deltas_weighted, weights);
    out.cop         = cop(y_s2s, y_pref);
    out.harim       = harim(y_s2s, y_lm);
    out.avg_logprob = avg_logprob(y_s2s);

    out.weights   = weights;
    out.ablation  = flags;
    out.model_id  = bundle.meta.model_id;
    out.separator = bundle.meta.separator;
    return out;
}

} // namespace fflm
