#pragma once

#include "fflm/extraction.hpp"
#include "fflm/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace fflm {

// Probabilities are clamped to at least this before any logarithm.
inline constexpr double k_prob_floor = 1e-10;

// Token probabilities in [1e-10, 1] together with their logs. Built either
// from plain probabilities or from a backend series; the series route keeps
// the backend's log probabilities instead of round-tripping through exp/log.
class prob_vector {
public:
    static prob_vector from_probs(std::span<const double> probs);
    static prob_vector from_series(const token_prob_series & series);

    size_t size() const { return probs_.size(); }
    std::span<const double> probs() const { return probs_; }
    std::span<const double> logs() const { return logs_; }

private:
    std::vector<double> probs_;
    std::vector<double> logs_;
};

struct metric_weights {
    double alpha = 0.25;
    double beta  = 0.25;
    double delta = 0.5;
};

// Each weight in [0,1] and alpha+beta+delta = 1 within 1e-9.
void validate_weights(const metric_weights & w);

struct delta_triple {
    double d_y_prior = 0.0;
    double d_x_prior = 0.0;
    double d_y_cond  = 0.0;
    bool weighted = false; // false: plain probability-difference form
};

struct ablation_flags {
    bool use_log = true;           // log-ratio instead of probability difference
    bool use_token_weights = true; // e^{p_s2s} token weights
};

struct metric_scores {
    delta_triple deltas_raw;      // probability-difference form, always
    delta_triple deltas_weighted; // exp-weighted log form under the ablation flags
    double fflm = 0.0;
    double cop = 0.0;
    double harim = 0.0;
    double avg_logprob = 0.0;
    // config echo
    metric_weights weights;
    ablation_flags ablation;
    std::string model_id;
    std::string separator;
};

// mean_i(p_s2s[i] - p_other[i])
double delta_prior_raw(const prob_vector & p_s2s, const prob_vector & p_other);

// mean_i(p_s2s[i] - p_pref[i]); positive when prefixing does not inflate the
// target's probability.
double delta_cond_raw(const prob_vector & p_s2s, const prob_vector & p_pref);

// mean_i(e^{p_s2s[i]} * (ln p_s2s[i] - ln p_other[i]))
double delta_weighted(const prob_vector & p_s2s, const prob_vector & p_other);

// delta_weighted with either design element switched off.
double delta_ablated(const prob_vector & p_s2s, const prob_vector & p_other,
                     ablation_flags flags);

// alpha*d_y_prior + beta*d_x_prior + delta*d_y_cond
double fflm_combine(const delta_triple & deltas, const metric_weights & weights);

// mean_i(ln p_s2s[i] - ln p_pref[i])
double cop(const prob_vector & p_s2s, const prob_vector & p_pref);

// mean_i((1 - p_s2s[i]) * (1 - (p_s2s[i] - p_lm[i]))). A risk score: higher
// means less faithful.
double harim(const prob_vector & p_s2s, const prob_vector & p_lm);

// mean_i(ln p_s2s[i])
double avg_logprob(const prob_vector & p_s2s);

// All metrics for one pair. The ablation flags select the delta form used
// for deltas_weighted (and hence fflm); deltas_raw always carries the plain
// probability differences.
metric_scores score_pair(const pair_prob_bundle & bundle, const metric_weights & weights,
                         ablation_flags flags = {});

// Pairwise (cascade) summation; bounds accumulation error on long inputs.
double pairwise_sum(std::span<const double> values);
double pairwise_mean(std::span<const double> values);

} // namespace fflm
