#pragma once

#include "fflm/backend.hpp"
#include "fflm/dataset.hpp"
#include "fflm/extraction.hpp"
#include "fflm/metrics.hpp"

#include <string>
#include <vector>

namespace fflm {

// Everything needed to reproduce a scoring run; echoed into every output row.
struct run_config {
    std::string backend_spec; // "http:<url>" | "synthetic:<seed>" | "replay-only"
    std::string replay_path;  // empty: no cache
    std::string model_id = "default";
    extraction_config extraction;
    metric_weights weights;
    ablation_flags ablation;
    int parallelism = 1;
};

struct score_row {
    std::string id;
    metric_scores scores;
    bundle_meta meta;
};

// Scores every example, in input order, fanning pairs out across up to
// config.parallelism threads. Output order and values are independent of the
// parallelism setting. On failure the error for the earliest example wins.
std::vector<score_row> score_examples(const std::vector<eval_example> & examples,
                                      const run_config & config, score_backend & backend);

// One row per line; stable field order so identical runs are byte-identical.
std::string score_row_to_jsonl(const score_row & row, const run_config & config);

struct loaded_score_row {
    std::string id;
    delta_triple deltas_raw;
    delta_triple deltas_weighted;
    double fflm = 0.0;
    double cop = 0.0;
    double harim = 0.0;
    double avg_logprob = 0.0;
    metric_weights weights;
};

// Parses a score file written by score_row_to_jsonl.
std::vector<loaded_score_row> load_score_file(const std::string & path);

} // namespace fflm
