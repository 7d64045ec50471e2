// fflm - scores summary faithfulness from per-token probabilities and
// evaluates the scores against labeled or rated datasets.
//
// Subcommands:
//   score        run the probability extraction pipeline over a dataset
//   tune         pick combination weights and a decision threshold on
//                validation labels
//   eval-detect  balanced-accuracy report for binary consistency labels
//   eval-rate    correlation report against scalar faithfulness ratings
//
// Exit codes: 0 success, 2 configuration error, 3 dataset/report-input
// error, 4 backend or I/O error.

#include "fflm/backend.hpp"
#include "fflm/dataset.hpp"
#include "fflm/error.hpp"
#include "fflm/eval.hpp"
#include "fflm/metrics.hpp"
#include "fflm/replay.hpp"
#include "fflm/scoring.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

using ordered_json = nlohmann::ordered_json;

namespace {

int exit_code_for(fflm::error_kind kind) {
    using k = fflm::error_kind;
    switch (kind) {
        case k::config_error:
        case k::invalid_weights:
        case k::budget_exceeded:
            return 2;
        case k::parse_error:
        case k::schema_error:
        case k::mode_mismatch:
        case k::id_mismatch:
        case k::empty_input:
        case k::length_mismatch:
        case k::single_class_labels:
        case k::degenerate_input:
        case k::too_few_systems:
        case k::missing_system_id:
        case k::insufficient_examples:
        case k::empty_faithful_pool:
            return 3;
        case k::backend_unreachable:
        case k::protocol_violation:
        case k::replay_miss:
        case k::store_io:
            return 4;
    }
    return 1;
}

// Turns the escape sequences a shell delivers literally ("\n", "\t", "\\")
// into the characters they name, so --separator '\nTL;DR\n' works.
std::string unescape(const std::string & text) {
    std::string out;
    out.reserve(text.size());
    for (size_t i = 0; i < text.size(); i++) {
        if (text[i] != '\\') {
            out += text[i];
            continue;
        }
        if (i + 1 >= text.size()) {
            fflm::fail(fflm::error_kind::config_error,
                       "dangling backslash at end of \"" + text + "\"");
        }
        i++;
        switch (text[i]) {
            case 'n':  out += '\n'; break;
            case 't':  out += '\t'; break;
            case '\\': out += '\\'; break;
            default:
                fflm::fail(fflm::error_kind::config_error,
                           std::string("unknown escape \"\\") + text[i] +
                               "\" (supported: \\n, \\t, \\\\)");
        }
    }
    return out;
}

fflm::metric_weights parse_weights(const std::string & text) {
    std::vector<double> parts;
    size_t start = 0;
    while (true) {
        const size_t comma = text.find(',', start);
        const std::string piece =
            comma == std::string::npos ? text.substr(start) : text.substr(start, comma - start);
        try {
            size_t used = 0;
            parts.push_back(std::stod(piece, &used));
            if (used != piece.size()) {
                throw std::invalid_argument(piece);
            }
        } catch (const std::exception &) {
            fflm::fail(fflm::error_kind::config_error,
                       "cannot parse weight \"" + piece + "\" in \"" + text + "\"");
        }
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    if (parts.size() != 3) {
        fflm::fail(fflm::error_kind::config_error,
                   "--weights needs three comma-separated values, got \"" + text + "\"");
    }
    fflm::metric_weights w{parts[0], parts[1], parts[2]};
    fflm::validate_weights(w);
    return w;
}

// Owns whichever combination of upstream backend and replay cache the
// backend spec selects.
struct backend_stack {
    std::unique_ptr<fflm::replay_store> store;
    std::unique_ptr<fflm::score_backend> upstream;
    std::unique_ptr<fflm::score_backend> front;

    fflm::score_backend & use() { return front ? *front : *upstream; }
};

backend_stack make_backend(const std::string & spec, const std::string & replay_path) {
    backend_stack stack;
    if (spec == "replay-only") {
        if (replay_path.empty()) {
            fflm::fail(fflm::error_kind::config_error,
                       "backend \"replay-only\" needs --replay <file>");
        }
        stack.store =
            std::make_unique<fflm::replay_store>(replay_path, fflm::store_mode::read_only);
        stack.front = std::make_unique<fflm::cached_backend>(*stack.store, nullptr);
        return stack;
    }

    if (spec.rfind("synthetic:", 0) == 0) {
        const std::string rest = spec.substr(10);
        uint64_t seed = 0;
        try {
            size_t used = 0;
            seed = std::stoull(rest, &used);
            if (used != rest.size()) {
                throw std::invalid_argument(rest);
            }
        } catch (const std::exception &) {
            fflm::fail(fflm::error_kind::config_error,
                       "cannot parse synthetic seed \"" + rest + "\"");
        }
        stack.upstream = std::make_unique<fflm::synthetic_backend>(seed);
    } else if (spec.rfind("http://", 0) == 0) {
        stack.upstream = std::make_unique<fflm::http_backend>(spec);
    } else if (spec.rfind("http:", 0) == 0) {
        const std::string rest = spec.substr(5);
        const std::string url = rest.rfind("http://", 0) == 0 ? rest : "http://" + rest;
        stack.upstream = std::make_unique<fflm::http_backend>(url);
    } else {
        fflm::fail(fflm::error_kind::config_error,
                   "unknown backend spec \"" + spec +
                       "\" (expected http:<url>, synthetic:<seed>, or replay-only)");
    }

    if (!replay_path.empty()) {
        stack.store =
            std::make_unique<fflm::replay_store>(replay_path, fflm::store_mode::read_write);
        stack.front =
            std::make_unique<fflm::cached_backend>(*stack.store, stack.upstream.get());
    }
    return stack;
}

void write_file_atomic(const std::string & path, const std::string & content) {
    namespace fs = std::filesystem;
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            fflm::fail(fflm::error_kind::store_io, "cannot open " + tmp + " for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            fflm::fail(fflm::error_kind::store_io, "write to " + tmp + " failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        fflm::fail(fflm::error_kind::store_io,
                   "cannot move " + tmp + " to " + path + ": " + ec.message());
    }
}

void emit_report(const std::string & output_path, const ordered_json & report) {
    const std::string text = report.dump(2) + "\n";
    if (output_path.empty()) {
        std::cout << text;
    } else {
        write_file_atomic(output_path, text);
    }
}

// Thresholds can legitimately be infinite (constant-prediction optimum), and
// JSON has no literal for that, so infinities travel as strings.
ordered_json threshold_to_json(double threshold) {
    if (std::isfinite(threshold)) {
        return threshold;
    }
    return threshold > 0 ? "inf" : "-inf";
}

double threshold_from_json(const ordered_json & value, const std::string & where) {
    if (value.is_number()) {
        return value.get<double>();
    }
    if (value.is_string()) {
        const std::string s = value.get<std::string>();
        if (s == "inf") {
            return std::numeric_limits<double>::infinity();
        }
        if (s == "-inf") {
            return -std::numeric_limits<double>::infinity();
        }
    }
    fflm::fail(fflm::error_kind::schema_error,
               where + ": \"threshold\" must be a number, \"inf\", or \"-inf\"");
}

const std::vector<std::string> k_metric_names = {
    "fflm", "cop", "harim", "avg_logprob", "d_y_prior", "d_x_prior", "d_y_cond",
};

double metric_column(const fflm::loaded_score_row & row, const std::string & metric) {
    if (metric == "fflm") {
        return row.fflm;
    }
    if (metric == "cop") {
        return row.cop;
    }
    if (metric == "harim") {
        return row.harim;
    }
    if (metric == "avg_logprob") {
        return row.avg_logprob;
    }
    if (metric == "d_y_prior") {
        return row.deltas_weighted.d_y_prior;
    }
    if (metric == "d_x_prior") {
        return row.deltas_weighted.d_x_prior;
    }
    if (metric == "d_y_cond") {
        return row.deltas_weighted.d_y_cond;
    }
    fflm::fail(fflm::error_kind::config_error, "unknown metric \"" + metric + "\"");
}

struct joined_row {
    const fflm::loaded_score_row * scores;
    const fflm::eval_example * example;
};

// Pairs score rows with their dataset examples by id. A score id absent from
// the dataset is an error; a score id whose example falls outside the
// requested split is silently dropped (one score file serves both splits).
std::vector<joined_row> join_rows(const std::vector<fflm::loaded_score_row> & rows,
                                  const std::vector<fflm::eval_example> & examples,
                                  const std::optional<fflm::dataset_split> & split,
                                  const std::string & scores_path,
                                  const std::string & dataset_path) {
    std::map<std::string, const fflm::eval_example *> by_id;
    for (const auto & ex : examples) {
        by_id[ex.id] = &ex;
    }
    std::vector<joined_row> joined;
    joined.reserve(rows.size());
    for (const auto & row : rows) {
        const auto it = by_id.find(row.id);
        if (it == by_id.end()) {
            fflm::fail(fflm::error_kind::id_mismatch,
                       "id \"" + row.id + "\" appears in " + scores_path +
                           " but not in " + dataset_path);
        }
        if (split && it->second->split != *split) {
            continue;
        }
        joined.push_back({&row, it->second});
    }
    if (joined.empty()) {
        fflm::fail(fflm::error_kind::empty_input,
                   "no score rows from " + scores_path + " match " + dataset_path +
                       (split ? std::string(" split ") + fflm::split_name(*split) : ""));
    }
    return joined;
}

std::vector<int> detection_labels(const std::vector<joined_row> & joined) {
    std::vector<int> labels;
    labels.reserve(joined.size());
    for (const auto & j : joined) {
        labels.push_back(*j.example->label);
    }
    return labels;
}

ordered_json weights_to_json(const fflm::metric_weights & w) {
    return ordered_json{{"alpha", w.alpha}, {"beta", w.beta}, {"delta", w.delta}};
}

//
// score
//

struct score_args {
    std::string input;
    std::string output;
    std::string backend;
    std::string replay;
    std::string model_id = "default";
    std::string separator = "\\nTL;DR\\n";
    std::string joiner = "\\n";
    int context_budget = 2048;
    std::string truncation = "truncate";
    std::string weights = "0.25,0.25,0.5";
    std::vector<std::string> ablate;
    int parallelism = 1;
    std::string split = "all";
};

std::optional<fflm::dataset_split> parse_split(const std::string & split) {
    if (split == "all") {
        return std::nullopt;
    }
    if (split == "val") {
        return fflm::dataset_split::val;
    }
    if (split == "test") {
        return fflm::dataset_split::test;
    }
    fflm::fail(fflm::error_kind::config_error,
               "--split must be val, test, or all, got \"" + split + "\"");
}

int cmd_score(const score_args & args) {
    fflm::run_config config;
    config.backend_spec = args.backend;
    config.replay_path  = args.replay;
    config.model_id     = args.model_id;
    config.weights      = parse_weights(args.weights);
    config.parallelism  = args.parallelism;

    config.extraction.separator      = unescape(args.separator);
    config.extraction.prefix_joiner  = unescape(args.joiner);
    config.extraction.context_budget = args.context_budget;
    if (args.truncation == "truncate") {
        config.extraction.policy = fflm::truncation_policy::truncate_document_tail;
    } else if (args.truncation == "error") {
        config.extraction.policy = fflm::truncation_policy::error;
    } else {
        fflm::fail(fflm::error_kind::config_error,
                   "--truncation must be truncate or error, got \"" + args.truncation + "\"");
    }
    for (const auto & a : args.ablate) {
        if (a == "log") {
            config.ablation.use_log = false;
        } else if (a == "weights") {
            config.ablation.use_token_weights = false;
        } else {
            fflm::fail(fflm::error_kind::config_error,
                       "--ablate must be log or weights, got \"" + a + "\"");
        }
    }
    const auto split = parse_split(args.split);

    auto loaded = fflm::load_dataset(args.input, fflm::infer_mode(args.input));
    std::vector<fflm::eval_example> examples =
        split ? fflm::split_filter(loaded.examples, *split) : std::move(loaded.examples);
    if (examples.empty()) {
        fflm::fail(fflm::error_kind::empty_input,
                   "no examples in " + args.input + " for split " + args.split);
    }

    backend_stack backend = make_backend(args.backend, args.replay);
    const auto rows = fflm::score_examples(examples, config, backend.use());

    std::string content;
    for (const auto & row : rows) {
        content += fflm::score_row_to_jsonl(row, config);
        content += '\n';
    }
    write_file_atomic(args.output, content);
    return 0;
}

//
// tune
//

struct tune_args {
    std::string scores;
    std::string input;
    std::string output;
    std::string split = "all";
    std::string metric = "fflm";
    bool negate = false;
    double step = 0.1;
};

int cmd_tune(const tune_args & args) {
    const auto rows    = fflm::load_score_file(args.scores);
    const auto dataset = fflm::load_dataset(args.input, fflm::eval_mode::detection);
    const auto joined =
        join_rows(rows, dataset.examples, parse_split(args.split), args.scores, args.input);
    const auto labels = detection_labels(joined);

    ordered_json report;
    report["metric"] = args.metric;
    report["negate"] = args.negate;

    if (args.metric == "fflm") {
        if (args.negate) {
            fflm::fail(fflm::error_kind::config_error,
                       "--negate does not apply to fflm (higher already means consistent)");
        }
        std::vector<fflm::delta_triple> deltas;
        deltas.reserve(joined.size());
        for (const auto & j : joined) {
            deltas.push_back(j.scores->deltas_weighted);
        }
        const auto result = fflm::grid_search_weights(deltas, labels, args.step);
        report["step"]             = args.step;
        report["combos_evaluated"] = result.combos_evaluated;
        report["weights"]          = weights_to_json(result.weights);
        report["threshold"]        = threshold_to_json(result.threshold);
        report["validation_ba"]    = result.balanced_acc;
    } else {
        std::vector<double> scores;
        scores.reserve(joined.size());
        for (const auto & j : joined) {
            const double v = metric_column(*j.scores, args.metric);
            scores.push_back(args.negate ? -v : v);
        }
        const auto result       = fflm::select_threshold(scores, labels);
        report["weights"]       = nullptr;
        report["threshold"]     = threshold_to_json(result.threshold);
        report["validation_ba"] = result.balanced_acc;
    }
    report["n"] = joined.size();
    emit_report(args.output, report);
    return 0;
}

//
// eval-detect
//

struct eval_detect_args {
    std::string scores;
    std::string input;
    std::string output;
    std::string split = "all";
    std::string tuning;
    std::optional<double> threshold;
    std::string metric = "fflm";
    bool negate = false;
    std::optional<int> n_per_type;
    int repeats = 10;
    uint64_t seed = 0;
};

struct decision_rule {
    std::string metric;
    bool negate = false;
    std::optional<fflm::metric_weights> weights;
    double threshold = 0.0;
};

decision_rule load_tuning(const std::string & path) {
    std::ifstream in(path);
    if (!in) {
        fflm::fail(fflm::error_kind::parse_error, "cannot open tuning file " + path);
    }
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const ordered_json::parse_error & e) {
        fflm::fail(fflm::error_kind::parse_error, path + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("threshold")) {
        fflm::fail(fflm::error_kind::schema_error, path + ": missing \"threshold\"");
    }
    decision_rule rule;
    rule.threshold = threshold_from_json(doc["threshold"], path);
    rule.metric    = doc.value("metric", std::string("fflm"));
    rule.negate    = doc.value("negate", false);
    if (doc.contains("weights") && doc["weights"].is_object()) {
        const auto & w = doc["weights"];
        if (!w.contains("alpha") || !w.contains("beta") || !w.contains("delta") ||
            !w["alpha"].is_number() || !w["beta"].is_number() || !w["delta"].is_number()) {
            fflm::fail(fflm::error_kind::schema_error,
                       path + ": \"weights\" needs numeric alpha, beta, delta");
        }
        rule.weights = fflm::metric_weights{w["alpha"].get<double>(), w["beta"].get<double>(),
                                            w["delta"].get<double>()};
        fflm::validate_weights(*rule.weights);
    }
    return rule;
}

int cmd_eval_detect(const eval_detect_args & args) {
    if (!args.tuning.empty() && args.threshold) {
        fflm::fail(fflm::error_kind::config_error,
                   "--tuning and --threshold are mutually exclusive");
    }
    if (args.tuning.empty() && !args.threshold) {
        fflm::fail(fflm::error_kind::config_error,
                   "eval-detect needs either --tuning <file> or --threshold <value>");
    }

    decision_rule rule;
    if (!args.tuning.empty()) {
        rule = load_tuning(args.tuning);
    } else {
        rule.metric    = args.metric;
        rule.negate    = args.negate;
        rule.threshold = *args.threshold;
    }
    if (rule.metric == "fflm" && rule.negate) {
        fflm::fail(fflm::error_kind::config_error, "--negate does not apply to fflm");
    }

    const auto rows    = fflm::load_score_file(args.scores);
    const auto dataset = fflm::load_dataset(args.input, fflm::eval_mode::detection);
    const auto joined =
        join_rows(rows, dataset.examples, parse_split(args.split), args.scores, args.input);
    const auto labels = detection_labels(joined);

    std::vector<double> scores;
    scores.reserve(joined.size());
    for (const auto & j : joined) {
        double v;
        if (rule.metric == "fflm" && rule.weights) {
            v = fflm::fflm_combine(j.scores->deltas_weighted, *rule.weights);
        } else {
            v = metric_column(*j.scores, rule.metric);
        }
        scores.push_back(rule.negate ? -v : v);
    }

    fflm::confusion_counts confusion;
    std::vector<int> predictions;
    predictions.reserve(scores.size());
    for (size_t i = 0; i < scores.size(); i++) {
        const int pred = scores[i] >= rule.threshold ? 1 : 0;
        predictions.push_back(pred);
        if (labels[i] == 1) {
            (pred == 1 ? confusion.tp : confusion.fn)++;
        } else {
            (pred == 1 ? confusion.fp : confusion.tn)++;
        }
    }
    const double ba = fflm::balanced_accuracy(labels, predictions);

    ordered_json report;
    report["metric"]    = rule.metric;
    report["negate"]    = rule.negate;
    report["threshold"] = threshold_to_json(rule.threshold);
    report["weights"]   = rule.weights ? weights_to_json(*rule.weights) : ordered_json(nullptr);
    report["balanced_accuracy"] = ba;
    report["confusion"] = ordered_json{{"tp", confusion.tp},
                                       {"fp", confusion.fp},
                                       {"tn", confusion.tn},
                                       {"fn", confusion.fn}};
    report["n"] = joined.size();

    if (args.n_per_type) {
        fflm::error_type_params params;
        params.n_per_type = *args.n_per_type;
        params.repeats    = args.repeats;
        params.seed       = args.seed;

        std::vector<fflm::eval_example> examples;
        std::vector<double> oriented;
        examples.reserve(joined.size());
        oriented.reserve(joined.size());
        for (size_t i = 0; i < joined.size(); i++) {
            examples.push_back(*joined[i].example);
            oriented.push_back(scores[i]);
        }
        const auto results = fflm::error_type_analysis(examples, oriented, params);

        ordered_json analysis;
        analysis["target"]     = "faithful-vs-sampled-error";
        analysis["n_per_type"] = params.n_per_type;
        analysis["repeats"]    = params.repeats;
        analysis["seed"]       = params.seed;
        analysis["types"]      = ordered_json::array();
        for (const auto & r : results) {
            analysis["types"].push_back(ordered_json{{"type", r.type},
                                                     {"mean_spearman", r.mean_spearman},
                                                     {"degenerate_repeats", r.degenerate_repeats},
                                                     {"tagged_total", r.tagged_total},
                                                     {"multi_tagged", r.multi_tagged}});
        }
        report["error_analysis"] = analysis;
    }

    emit_report(args.output, report);
    return 0;
}

//
// eval-rate
//

struct eval_rate_args {
    std::string scores;
    std::string input;
    std::string output;
    std::string split = "all";
    std::string level = "summary";
    std::string metric = "fflm";
    bool negate = false;
};

int cmd_eval_rate(const eval_rate_args & args) {
    if (args.level != "summary" && args.level != "system") {
        fflm::fail(fflm::error_kind::config_error,
                   "--level must be summary or system, got \"" + args.level + "\"");
    }
    if (args.metric == "fflm" && args.negate) {
        fflm::fail(fflm::error_kind::config_error, "--negate does not apply to fflm");
    }

    const auto rows    = fflm::load_score_file(args.scores);
    const auto dataset = fflm::load_dataset(args.input, fflm::eval_mode::rating);
    const auto joined =
        join_rows(rows, dataset.examples, parse_split(args.split), args.scores, args.input);

    std::vector<double> scores, ratings;
    scores.reserve(joined.size());
    ratings.reserve(joined.size());
    for (const auto & j : joined) {
        const double v = metric_column(*j.scores, args.metric);
        scores.push_back(args.negate ? -v : v);
        ratings.push_back(*j.example->rating);
    }

    fflm::correlation_report result;
    if (args.level == "summary") {
        result = fflm::summary_level_report(scores, ratings);
    } else {
        std::vector<std::string> systems;
        systems.reserve(joined.size());
        for (const auto & j : joined) {
            systems.push_back(j.example->system ? *j.example->system : "");
        }
        result = fflm::system_level_report(scores, ratings, systems);
    }

    ordered_json report;
    report["metric"]   = args.metric;
    report["negate"]   = args.negate;
    report["level"]    = args.level;
    report["n"]        = result.n;
    report["pearson"]  = result.pearson;
    report["spearman"] = result.spearman;
    report["kendall"]  = result.kendall;
    emit_report(args.output, report);
    return 0;
}

} // namespace

int main(int argc, char ** argv) {
    CLI::App app{"summary-faithfulness scoring from per-token probabilities"};
    app.require_subcommand(1);

    score_args s;
    auto * score = app.add_subcommand("score", "score document/summary pairs");
    score->add_option("--input", s.input, "dataset JSONL")->required();
    score->add_option("--output", s.output, "score file to write")->required();
    score
        ->add_option("--backend", s.backend,
                     "http:<url> | synthetic:<seed> | replay-only")
        ->required();
    score->add_option("--replay", s.replay, "replay cache JSONL");
    score->add_option("--model-id", s.model_id, "model identifier sent to the backend");
    score->add_option("--separator", s.separator,
                      "conditioning/target separator (\\n, \\t, \\\\ recognized)");
    score->add_option("--joiner", s.joiner, "prefix/document joiner");
    score->add_option("--context-budget", s.context_budget,
                      "conditioning budget in whitespace tokens");
    score->add_option("--truncation", s.truncation, "truncate | error");
    score->add_option("--weights", s.weights, "alpha,beta,delta");
    score->add_option("--ablate", s.ablate, "disable a scoring element: log | weights");
    score->add_option("--parallelism", s.parallelism, "max concurrent pairs");
    score->add_option("--split", s.split, "val | test | all");

    tune_args t;
    auto * tune = app.add_subcommand("tune", "select weights and threshold on labels");
    tune->add_option("--scores", t.scores, "score file from `score`")->required();
    tune->add_option("--input", t.input, "labeled dataset JSONL")->required();
    tune->add_option("--output", t.output, "tuning JSON (stdout when omitted)");
    tune->add_option("--split", t.split, "val | test | all");
    tune->add_option("--metric", t.metric, "fflm | cop | harim | avg_logprob | d_*");
    tune->add_flag("--negate", t.negate, "flip the metric's sign before tuning");
    tune->add_option("--step", t.step, "weight grid step");

    eval_detect_args d;
    auto * detect = app.add_subcommand("eval-detect", "balanced-accuracy report");
    detect->add_option("--scores", d.scores, "score file from `score`")->required();
    detect->add_option("--input", d.input, "labeled dataset JSONL")->required();
    detect->add_option("--output", d.output, "report JSON (stdout when omitted)");
    detect->add_option("--split", d.split, "val | test | all");
    detect->add_option("--tuning", d.tuning, "tuning JSON from `tune`");
    detect->add_option("--threshold", d.threshold, "fixed decision threshold");
    detect->add_option("--metric", d.metric, "metric column when no tuning file is given");
    detect->add_flag("--negate", d.negate, "flip the metric's sign");
    detect->add_option("--n-per-type", d.n_per_type,
                       "run the error-type analysis, sampling this many per type");
    detect->add_option("--repeats", d.repeats, "error-type analysis repeats");
    detect->add_option("--seed", d.seed, "error-type analysis sampling seed");

    eval_rate_args r;
    auto * rate = app.add_subcommand("eval-rate", "correlation report against ratings");
    rate->add_option("--scores", r.scores, "score file from `score`")->required();
    rate->add_option("--input", r.input, "rated dataset JSONL")->required();
    rate->add_option("--output", r.output, "report JSON (stdout when omitted)");
    rate->add_option("--split", r.split, "val | test | all");
    rate->add_option("--level", r.level, "summary | system");
    rate->add_option("--metric", r.metric, "metric column to correlate");
    rate->add_flag("--negate", r.negate, "flip the metric's sign");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError & e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (score->parsed()) {
            return cmd_score(s);
        }
        if (tune->parsed()) {
            return cmd_tune(t);
        }
        if (detect->parsed()) {
            return cmd_eval_detect(d);
        }
        if (rate->parsed()) {
            return cmd_eval_rate(r);
        }
    } catch (const fflm::error & e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception & e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
