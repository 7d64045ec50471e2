#pragma once

#include "fflm/types.hpp"

#include <cstdint>
#include <memory>
#include <string>

namespace fflm {

// Scoring-backend contract: given optional conditioning text and a target
// text, return the target's tokens and per-token natural-log probabilities.
// Implementations must be safe to call from multiple threads.
class score_backend {
public:
    virtual ~score_backend() = default;

    virtual token_prob_series score(const score_request & req) = 0;

    virtual std::string name() const = 0;
};

// Validates the request, scores it, validates the response. All scoring in
// the toolkit goes through here so every backend is held to the same
// protocol constraints.
token_prob_series score_target(const score_request & req, score_backend & backend);

//
// synthetic backend
//

// Deterministic pseudo-LM for tests and offline runs. Tokenizes the target
// by whitespace; each token draws
//
//   logprob(t) = min(base + boost, -0.05)
//   base      = -3.0 + 2.5 * u,   u = hash64(seed, window, t) / 2^64
//   boost     = +1.5 iff t occurs (ASCII-case-folded) among the whitespace
//               tokens of the conditioning text
//
// where window is the last 8 preceding tokens of conditioning plus the
// already-scored target, and hash64 is FNV-1a over the seed bytes
// (little-endian), each window token terminated by 0x1F, a 0x1E separator,
// then the token bytes. u takes the hash's top 53 bits over 2^53.
token_prob_series synthetic_score(const score_request & req, uint64_t seed);

class synthetic_backend : public score_backend {
public:
    explicit synthetic_backend(uint64_t seed) : seed_(seed) {}

    token_prob_series score(const score_request & req) override {
        return synthetic_score(req, seed_);
    }

    std::string name() const override { return "synthetic"; }

    uint64_t seed() const { return seed_; }

private:
    uint64_t seed_;
};

//
// HTTP backend
//

// Client for the wire protocol: POST {base_url}/score with JSON body
// {"model", "conditioning", "target"}; expects {"model", "tokens",
// "logprobs"} back. A bearer token is sent when FFLM_BACKEND_TOKEN is set.
// Plain http only.
class http_backend : public score_backend {
public:
    explicit http_backend(const std::string & base_url, int timeout_seconds = 120);

    token_prob_series score(const score_request & req) override;

    std::string name() const override { return "http:" + base_url_; }

private:
    std::string base_url_;
    std::string host_;       // scheme://host:port for the client
    std::string path_prefix; // leading path, "" or "/v1" style
    std::string bearer_token_;
    int timeout_seconds_;
};

} // namespace fflm
