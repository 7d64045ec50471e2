#include "fflm/types.hpp"

#include "fflm/error.hpp"

#include <openssl/evp.h>

#include <cctype>
#include <cmath>
#include <cstring>

namespace fflm {

static void append_u64_le(std::string & out, uint64_t v) {
    for (int i = 0; i < 8; i++) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
}

static void append_field(std::string & out, const std::string & field) {
    append_u64_le(out, field.size());
    out.append(field);
}

std::string canonical_request_bytes(const score_request & req) {
    std::string out = "fflm.req.v1";
    append_field(out, req.model_id);
    append_field(out, req.conditioning);
    append_field(out, req.target);
    return out;
}

std::string request_key(const score_request & req) {
    const std::string bytes = canonical_request_bytes(req);

    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int digest_len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &digest_len, EVP_sha256(), nullptr) != 1) {
        fail(error_kind::store_io, "SHA-256 digest failed");
    }

    static const char hex[] = "0123456789abcdef";
    std::string out(digest_len * 2, '0');
    for (unsigned int i = 0; i < digest_len; i++) {
        out[2 * i]     = hex[digest[i] >> 4];
        out[2 * i + 1] = hex[digest[i] & 0xf];
    }
    return out;
}

void validate_request(const score_request & req) {
    if (is_blank(req.target)) {
        fail(error_kind::empty_input, "score target is empty");
    }
}

void validate_series(const token_prob_series & series, const std::string & where) {
    if (series.tokens.empty()) {
        fail(error_kind::protocol_violation, where + ": empty token series");
    }
    if (series.tokens.size() != series.logprobs.size()) {
        fail(error_kind::protocol_violation,
             where + ": " + std::to_string(series.tokens.size()) + " tokens vs " +
                 std::to_string(series.logprobs.size()) + " logprobs");
    }
    for (size_t i = 0; i < series.logprobs.size(); i++) {
        const double lp = series.logprobs[i];
        if (!std::isfinite(lp)) {
            fail(error_kind::protocol_violation,
                 where + ": non-finite logprob at token " + std::to_string(i));
        }
        if (lp > 0.0) {
            fail(error_kind::protocol_violation,
                 where + ": positive logprob " + std::to_string(lp) + " at token " +
                     std::to_string(i));
        }
    }
}

std::vector<std::string> whitespace_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) {
            i++;
        }
        size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) {
            i++;
        }
        if (i > start) {
            tokens.emplace_back(text.substr(start, i - start));
        }
    }
    return tokens;
}

std::string ascii_lower(std::string_view text) {
    std::string out(text);
    for (char & c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

bool is_blank(std::string_view text) {
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            return false;
        }
    }
    return true;
}

const char * error_kind_name(error_kind kind) {
    switch (kind) {
        case error_kind::backend_unreachable:  return "backend-unreachable";
        case error_kind::protocol_violation:   return "protocol-violation";
        case error_kind::replay_miss:          return "replay-miss";
        case error_kind::store_io:             return "store-io";
        case error_kind::empty_input:          return "empty-input";
        case error_kind::budget_exceeded:      return "budget-exceeded";
        case error_kind::length_mismatch:      return "length-mismatch";
        case error_kind::invalid_weights:      return "invalid-weights";
        case error_kind::single_class_labels:  return "single-class-labels";
        case error_kind::degenerate_input:     return "degenerate-input";
        case error_kind::too_few_systems:      return "too-few-systems";
        case error_kind::missing_system_id:    return "missing-system-id";
        case error_kind::insufficient_examples: return "insufficient-examples";
        case error_kind::empty_faithful_pool:  return "empty-faithful-pool";
        case error_kind::parse_error:          return "parse-error";
        case error_kind::schema_error:         return "schema-error";
        case error_kind::mode_mismatch:        return "mode-mismatch";
        case error_kind::id_mismatch:          return "id-mismatch";
        case error_kind::config_error:         return "config-error";
    }
    return "unknown-error";
}

} // namespace fflm
