#include "fflm/extraction.hpp"

#include "fflm/error.hpp"

#include <numeric>
#include <sstream>

namespace fflm {

std::vector<std::string> truncate_document(const std::vector<std::string> & doc_tokens,
                                           size_t budget) {
    if (doc_tokens.size() <= budget) {
        return doc_tokens;
    }
    return {doc_tokens.begin(), doc_tokens.begin() + budget};
}

static std::string join_tokens(const std::vector<std::string> & tokens) {
    std::string out;
    for (size_t i = 0; i < tokens.size(); i++) {
        if (i > 0) {
            out += ' ';
        }
        out += tokens[i];
    }
    return out;
}

pair_prob_bundle build_pair_bundle(const std::string & document, const std::string & summary,
                                   const extraction_config & config, score_backend & backend,
                                   const std::string & model_id) {
    if (is_blank(document)) {
        fail(error_kind::empty_input, "document is empty");
    }
    if (is_blank(summary)) {
        fail(error_kind::empty_input, "summary is empty");
    }
    if (config.separator.empty()) {
        fail(error_kind::config_error, "separator must be non-empty");
    }
    if (config.context_budget < 16) {
        fail(error_kind::config_error, "context budget must be at least 16 tokens");
    }

    const auto doc_tokens = whitespace_tokens(document);
    const auto sum_tokens = whitespace_tokens(summary);
    const auto sep_tokens = whitespace_tokens(config.separator);
    const auto join_count = whitespace_tokens(config.prefix_joiner).size();

    // The longest conditioning is the prefix call: Y + joiner + X + sep.
    const size_t reserved = sum_tokens.size() + join_count + sep_tokens.size();
    const size_t budget = static_cast<size_t>(config.context_budget);
    if (reserved + 1 > budget) {
        fail(error_kind::budget_exceeded,
             "summary and separator need " + std::to_string(reserved) +
                 " tokens, leaving no room for the document in a budget of " +
                 std::to_string(budget));
    }
    const size_t allowed = budget - reserved;

    bundle_meta meta;
    meta.model_id = model_id;
    meta.separator = config.separator;
    meta.doc_tokens_original = static_cast<int>(doc_tokens.size());

    std::string doc_text = document;
    if (doc_tokens.size() > allowed) {
        if (config.policy == truncation_policy::error) {
            fail(error_kind::budget_exceeded,
                 "document has " + std::to_string(doc_tokens.size()) +
                     " tokens but only " + std::to_string(allowed) + " fit");
        }
        meta.truncated = true;
        doc_text = join_tokens(truncate_document(doc_tokens, allowed));
        meta.doc_tokens_retained = static_cast<int>(allowed);
    } else {
        meta.doc_tokens_retained = static_cast<int>(doc_tokens.size());
    }

    const std::string & sep = config.separator;
    const std::string & joiner = config.prefix_joiner;

    struct call_spec {
        const char * tag;
        std::string conditioning;
        const std::string & target;
    };
    const call_spec calls[5] = {
        {"p_y_lm", "", summary},
        {"p_y_s2s", doc_text + sep, summary},
        {"p_y_pref", summary + joiner + doc_text + sep, summary},
        {"p_x_lm", "", doc_text},
        {"p_x_s2s", summary + sep, doc_text},
    };

    token_prob_series out[5];
    for (int i = 0; i < 5; i++) {
        const score_request req{model_id, calls[i].conditioning, calls[i].target};
        try {
            out[i] = score_target(req, backend);
        } catch (const error & e) {
            throw error(e.kind(), std::string(calls[i].tag) + " call failed: " + e.message());
        }
    }

    pair_prob_bundle bundle{std::move(out[0]), std::move(out[1]), std::move(out[2]),
                            std::move(out[3]), std::move(out[4]), std::move(meta)};

    const size_t m = bundle.p_y_lm.tokens.size();
    if (bundle.p_y_s2s.tokens.size() != m || bundle.p_y_pref.tokens.size() != m) {
        fail(error_kind::protocol_violation,
             "summary tokenization disagrees across conditionings: " + std::to_string(m) +
                 " vs " + std::to_string(bundle.p_y_s2s.tokens.size()) + " vs " +
                 std::to_string(bundle.p_y_pref.tokens.size()));
    }
    if (bundle.p_x_lm.tokens.size() != bundle.p_x_s2s.tokens.size()) {
        fail(error_kind::protocol_violation,
             "document tokenization disagrees across conditionings: " +
                 std::to_string(bundle.p_x_lm.tokens.size()) + " vs " +
                 std::to_string(bundle.p_x_s2s.tokens.size()));
    }
    return bundle;
}

} // namespace fflm
