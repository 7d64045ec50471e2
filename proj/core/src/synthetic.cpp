#include "fflm/backend.hpp"

#include "fflm/error.hpp"
#include "fflm/types.hpp"

#include <algorithm>
#include <span>
#include <unordered_set>

namespace fflm {

token_prob_series score_target(const score_request & req, score_backend & backend) {
    validate_request(req);
    token_prob_series series = backend.score(req);
    validate_series(series, backend.name());
    return series;
}

//
// synthetic pseudo-LM
//

namespace {

constexpr uint64_t k_fnv_offset = 0xcbf29ce484222325ULL;
constexpr uint64_t k_fnv_prime  = 0x00000100000001b3ULL;
constexpr int      k_window     = 8;
constexpr double   k_base_min   = -3.0;
constexpr double   k_base_span  = 2.5;
constexpr double   k_boost      = 1.5;
constexpr double   k_clamp_max  = -0.05;

inline void fnv_absorb(uint64_t & h, const void * data, size_t len) {
    const auto * p = static_cast<const unsigned char *>(data);
    for (size_t i = 0; i < len; i++) {
        h ^= p[i];
        h *= k_fnv_prime;
    }
}

uint64_t context_hash(uint64_t seed, std::span<const std::string> window, const std::string & token) {
    uint64_t h = k_fnv_offset;
    unsigned char seed_bytes[8];
    for (int i = 0; i < 8; i++) {
        seed_bytes[i] = static_cast<unsigned char>((seed >> (8 * i)) & 0xff);
    }
    fnv_absorb(h, seed_bytes, sizeof(seed_bytes));
    for (const auto & w : window) {
        fnv_absorb(h, w.data(), w.size());
        const unsigned char sep = 0x1f;
        fnv_absorb(h, &sep, 1);
    }
    const unsigned char rec = 0x1e;
    fnv_absorb(h, &rec, 1);
    fnv_absorb(h, token.data(), token.size());
    return h;
}

} // namespace

token_prob_series synthetic_score(const score_request & req, uint64_t seed) {
    validate_request(req);

    const std::vector<std::string> cond_tokens = whitespace_tokens(req.conditioning);
    const std::vector<std::string> target_tokens = whitespace_tokens(req.target);

    std::unordered_set<std::string> cond_set;
    cond_set.reserve(cond_tokens.size());
    for (const auto & t : cond_tokens) {
        cond_set.insert(ascii_lower(t));
    }

    // preceding context: conditioning tokens, then the already-scored target
    std::vector<std::string> context = cond_tokens;

    token_prob_series series;
    series.tokens.reserve(target_tokens.size());
    series.logprobs.reserve(target_tokens.size());

    for (const auto & token : target_tokens) {
        const size_t start = context.size() > k_window ? context.size() - k_window : 0;
        const std::span<const std::string> window(context.data() + start, context.size() - start);

        const uint64_t h = context_hash(seed, window, token);
        const double u = static_cast<double>(h >> 11) * 0x1.0p-53; // top 53 bits, in [0,1)
        const double base = k_base_min + k_base_span * u;
        const double boost = cond_set.count(ascii_lower(token)) ? k_boost : 0.0;

        series.tokens.push_back(token);
        series.logprobs.push_back(std::min(base + boost, k_clamp_max));

        context.push_back(token);
    }
    return series;
}

} // namespace fflm
