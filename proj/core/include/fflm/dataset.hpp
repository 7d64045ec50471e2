#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fflm {

enum class eval_mode {
    detection, // binary consistency labels
    rating,    // scalar faithfulness ratings
};

enum class dataset_split {
    val,
    test,
};

const char * eval_mode_name(eval_mode mode);
const char * split_name(dataset_split split);

// One dataset row. Exactly one of label/rating is present, uniformly across
// a file. label polarity: 1 = consistent.
struct eval_example {
    std::string id;
    std::string dataset;
    dataset_split split = dataset_split::test;
    std::string document;
    std::string summary;
    std::optional<int> label;
    std::optional<double> rating;
    std::optional<std::string> system;
    std::set<std::string> error_types; // subset of {Sem, Disc, CVer}; empty = untagged
};

struct dataset_manifest {
    std::string name;
    std::string path;
    eval_mode mode = eval_mode::detection;
    size_t val_count = 0;
    size_t test_count = 0;
};

struct loaded_dataset {
    std::vector<eval_example> examples;
    dataset_manifest manifest;
};

// JSON-lines loader; validates every line against the canonical schema and
// reports offending line numbers. Detection mode requires label, rating mode
// requires rating.
loaded_dataset load_dataset(const std::string & path, eval_mode mode);

// Peeks at the first data line to decide between detection and rating.
eval_mode infer_mode(const std::string & path);

// Stable-order subset with matching split.
std::vector<eval_example> split_filter(const std::vector<eval_example> & examples,
                                       dataset_split split);

// Canonical JSONL line for an example (round-trips through load_dataset).
std::string example_to_jsonl(const eval_example & ex);

} // namespace fflm
