#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fflm {

// One scoring call: per-token log probabilities of `target` under teacher
// forcing, conditioned on `conditioning` when non-empty.
struct score_request {
    std::string model_id;
    std::string conditioning;
    std::string target;
};

// A tokenized text with one natural-log probability per token.
// Valid series satisfy: tokens.size() == logprobs.size() >= 1 and every
// logprob finite and <= 0.
struct token_prob_series {
    std::vector<std::string> tokens;
    std::vector<double>      logprobs;

    bool operator==(const token_prob_series &) const = default;
};

// Byte-stable serialization of a request: version tag followed by each field
// as a little-endian u64 length prefix plus raw bytes, in fixed field order.
std::string canonical_request_bytes(const score_request & req);

// SHA-256 of canonical_request_bytes, lowercase hex. Stable across runs and
// machines; used as the replay-store key.
std::string request_key(const score_request & req);

// Throws error(empty_input) if target is empty after whitespace trimming.
void validate_request(const score_request & req);

// Throws error(protocol_violation) on length mismatch, empty series, or a
// non-finite or positive logprob. `where` names the offending backend/call.
void validate_series(const token_prob_series & series, const std::string & where);

// Split on ASCII whitespace, dropping empty pieces.
std::vector<std::string> whitespace_tokens(std::string_view text);

std::string ascii_lower(std::string_view text);

bool is_blank(std::string_view text);

} // namespace fflm
