#include "fflm/scoring.hpp"

#include "fflm/error.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <exception>
#include <fstream>
#include <thread>
#include <unordered_set>

namespace fflm {

using ordered_json = nlohmann::ordered_json;

static score_row score_one(const eval_example & ex, const run_config & config,
                           score_backend & backend) {
    pair_prob_bundle bundle =
        build_pair_bundle(ex.document, ex.summary, config.extraction, backend, config.model_id);
    score_row row;
    row.id     = ex.id;
    row.scores = score_pair(bundle, config.weights, config.ablation);
    row.meta   = bundle.meta;
    return row;
}

std::vector<score_row> score_examples(const std::vector<eval_example> & examples,
                                      const run_config & config, score_backend & backend) {
    if (examples.empty()) {
        fail(error_kind::empty_input, "no examples to score");
    }
    if (config.parallelism < 1) {
        fail(error_kind::config_error, "parallelism must be at least 1");
    }
    validate_weights(config.weights);

    const size_t n = examples.size();
    std::vector<score_row> rows(n);

    const size_t threads = std::min<size_t>(static_cast<size_t>(config.parallelism), n);
    if (threads <= 1) {
        for (size_t i = 0; i < n; i++) {
            try {
                rows[i] = score_one(examples[i], config, backend);
            } catch (const error & e) {
                throw error(e.kind(), "example \"" + examples[i].id + "\": " + e.message());
            }
        }
        return rows;
    }

    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (size_t t = 0; t < threads; t++) {
        workers.emplace_back([&] {
            while (true) {
                const size_t i = next.fetch_add(1);
                if (i >= n || failed.load()) {
                    return;
                }
                try {
                    rows[i] = score_one(examples[i], config, backend);
                } catch (const error & e) {
                    errors[i] = std::make_exception_ptr(
                        error(e.kind(), "example \"" + examples[i].id + "\": " + e.message()));
                    failed.store(true);
                } catch (...) {
                    errors[i] = std::current_exception();
                    failed.store(true);
                }
            }
        });
    }
    for (auto & w : workers) {
        w.join();
    }
    if (failed.load()) {
        // Indices are claimed in order, so the smallest stored error belongs
        // to the earliest failing example regardless of thread timing.
        for (size_t i = 0; i < n; i++) {
            if (errors[i]) {
                std::rethrow_exception(errors[i]);
            }
        }
    }
    return rows;
}

static ordered_json triple_to_json(const delta_triple & d) {
    ordered_json obj;
    obj["d_y_prior"] = d.d_y_prior;
    obj["d_x_prior"] = d.d_x_prior;
    obj["d_y_cond"]  = d.d_y_cond;
    return obj;
}

std::string score_row_to_jsonl(const score_row & row, const run_config & config) {
    ordered_json obj;
    obj["id"]              = row.id;
    obj["fflm"]            = row.scores.fflm;
    obj["cop"]             = row.scores.cop;
    obj["harim"]           = row.scores.harim;
    obj["avg_logprob"]     = row.scores.avg_logprob;
    obj["deltas_weighted"] = triple_to_json(row.scores.deltas_weighted);
    obj["deltas_raw"]      = triple_to_json(row.scores.deltas_raw);
    obj["weights"]         = ordered_json{{"alpha", row.scores.weights.alpha},
                                          {"beta", row.scores.weights.beta},
                                          {"delta", row.scores.weights.delta}};
    obj["ablation"] = ordered_json{{"use_log", row.scores.ablation.use_log},
                                   {"use_token_weights", row.scores.ablation.use_token_weights}};
    obj["model"]     = row.meta.model_id;
    obj["separator"] = row.meta.separator;
    obj["joiner"]    = config.extraction.prefix_joiner;
    obj["context_budget"] = config.extraction.context_budget;
    obj["truncation"] =
        config.extraction.policy == truncation_policy::error ? "error" : "truncate";
    obj["backend"]             = config.backend_spec;
    obj["truncated"]           = row.meta.truncated;
    obj["doc_tokens_original"] = row.meta.doc_tokens_original;
    obj["doc_tokens_retained"] = row.meta.doc_tokens_retained;
    return obj.dump();
}

static double require_number(const ordered_json & obj, const char * field,
                             const std::string & where) {
    if (!obj.contains(field) || !obj[field].is_number()) {
        fail(error_kind::schema_error,
             where + ": missing or non-numeric field \"" + field + "\"");
    }
    return obj[field].get<double>();
}

static delta_triple triple_from_json(const ordered_json & parent, const char * field,
                                     const std::string & where) {
    if (!parent.contains(field) || !parent[field].is_object()) {
        fail(error_kind::schema_error, where + ": missing object field \"" + field + "\"");
    }
    const auto & obj = parent[field];
    delta_triple d;
    d.d_y_prior = require_number(obj, "d_y_prior", where);
    d.d_x_prior = require_number(obj, "d_x_prior", where);
    d.d_y_cond  = require_number(obj, "d_y_cond", where);
    return d;
}

std::vector<loaded_score_row> load_score_file(const std::string & path) {
    std::ifstream in(path);
    if (!in) {
        fail(error_kind::parse_error, "cannot open score file " + path);
    }

    std::vector<loaded_score_row> rows;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (is_blank(line)) {
            continue;
        }
        const std::string where = path + " line " + std::to_string(line_no);
        ordered_json obj;
        try {
            obj = ordered_json::parse(line);
        } catch (const ordered_json::parse_error & e) {
            fail(error_kind::parse_error, where + ": " + e.what());
        }
        if (!obj.is_object()) {
            fail(error_kind::schema_error, where + ": expected a JSON object");
        }
        if (!obj.contains("id") || !obj["id"].is_string()) {
            fail(error_kind::schema_error, where + ": missing string field \"id\"");
        }

        loaded_score_row row;
        row.id = obj["id"].get<std::string>();
        if (!seen_ids.insert(row.id).second) {
            fail(error_kind::schema_error, where + ": duplicate id \"" + row.id + "\"");
        }
        row.fflm            = require_number(obj, "fflm", where);
        row.cop             = require_number(obj, "cop", where);
        row.harim           = require_number(obj, "harim", where);
        row.avg_logprob     = require_number(obj, "avg_logprob", where);
        row.deltas_weighted = triple_from_json(obj, "deltas_weighted", where);
        row.deltas_raw      = triple_from_json(obj, "deltas_raw", where);
        if (!obj.contains("weights") || !obj["weights"].is_object()) {
            fail(error_kind::schema_error, where + ": missing object field \"weights\"");
        }
        row.weights.alpha = require_number(obj["weights"], "alpha", where);
        row.weights.beta  = require_number(obj["weights"], "beta", where);
        row.weights.delta = require_number(obj["weights"], "delta", where);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        fail(error_kind::empty_input, "no rows in " + path);
    }
    return rows;
}

} // namespace fflm
