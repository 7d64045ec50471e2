#pragma once

#include "fflm/backend.hpp"
#include "fflm/types.hpp"

#include <string>
#include <vector>

namespace fflm {

enum class truncation_policy {
    truncate_document_tail,
    error,
};

struct extraction_config {
    std::string separator     = "\nTL;DR\n"; // between conditioning and target
    std::string prefix_joiner = "\n";        // between the prefix and the document
    int context_budget        = 2048;        // whitespace tokens available for conditioning
    truncation_policy policy  = truncation_policy::truncate_document_tail;
};

struct bundle_meta {
    std::string model_id;
    std::string separator;
    bool truncated = false;
    int doc_tokens_original = 0;
    int doc_tokens_retained = 0;
};

// The five probability series for one (document X, summary Y) pair.
// The three Y-series share one tokenization of Y (length m); the two
// X-series share one tokenization of X (length n).
struct pair_prob_bundle {
    token_prob_series p_y_lm;   // Y unconditioned
    token_prob_series p_y_s2s;  // Y given X
    token_prob_series p_y_pref; // Y given Y-prefixed X
    token_prob_series p_x_lm;   // X unconditioned
    token_prob_series p_x_s2s;  // X given Y
    bundle_meta meta;
};

// First min(size, budget) tokens; tail removal, order preserved.
std::vector<std::string> truncate_document(const std::vector<std::string> & doc_tokens,
                                           size_t budget);

// Issues the five scoring calls
//   ("" -> Y), (X+sep -> Y), (Y+joiner+X+sep -> Y), ("" -> X), (Y+sep -> X)
// and assembles the bundle. The budget constrains the longest conditioning
// sequence (Y+joiner+X+sep); when the document does not fit it is cut from
// its end and the same truncated document is used in all five calls. The
// summary, separator, and prefix are never truncated.
pair_prob_bundle build_pair_bundle(const std::string & document, const std::string & summary,
                                   const extraction_config & config, score_backend & backend,
                                   const std::string & model_id);

} // namespace fflm
