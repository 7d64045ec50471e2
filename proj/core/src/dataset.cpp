#include "fflm/dataset.hpp"

#include "fflm/error.hpp"
#include "fflm/types.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <unordered_set>

namespace fflm {

using ordered_json = nlohmann::ordered_json;

const char * eval_mode_name(eval_mode mode) {
    return mode == eval_mode::detection ? "detection" : "rating";
}

const char * split_name(dataset_split split) {
    return split == dataset_split::val ? "val" : "test";
}

static const std::set<std::string> k_known_error_types = {"Sem", "Disc", "CVer"};

static std::string line_ref(const std::string & path, size_t line_no) {
    return path + " line " + std::to_string(line_no);
}

static std::string require_string(const ordered_json & obj, const char * field,
                                  const std::string & where) {
    if (!obj.contains(field)) {
        fail(error_kind::schema_error, where + ": missing field \"" + field + "\"");
    }
    if (!obj[field].is_string()) {
        fail(error_kind::schema_error, where + ": field \"" + field + "\" must be a string");
    }
    return obj[field].get<std::string>();
}

static eval_example parse_example(const ordered_json & obj, eval_mode mode,
                                  const std::string & where) {
    if (!obj.is_object()) {
        fail(error_kind::schema_error, where + ": expected a JSON object");
    }

    eval_example ex;
    ex.id = require_string(obj, "id", where);
    if (is_blank(ex.id)) {
        fail(error_kind::schema_error, where + ": field \"id\" must be non-empty");
    }
    ex.document = require_string(obj, "document", where);
    if (is_blank(ex.document)) {
        fail(error_kind::schema_error, where + ": field \"document\" must be non-empty");
    }
    ex.summary = require_string(obj, "summary", where);
    if (is_blank(ex.summary)) {
        fail(error_kind::schema_error, where + ": field \"summary\" must be non-empty");
    }

    if (obj.contains("dataset")) {
        if (!obj["dataset"].is_string()) {
            fail(error_kind::schema_error, where + ": field \"dataset\" must be a string");
        }
        ex.dataset = obj["dataset"].get<std::string>();
    }

    if (obj.contains("split")) {
        if (!obj["split"].is_string()) {
            fail(error_kind::schema_error, where + ": field \"split\" must be a string");
        }
        const std::string s = obj["split"].get<std::string>();
        if (s == "val") {
            ex.split = dataset_split::val;
        } else if (s == "test") {
            ex.split = dataset_split::test;
        } else {
            fail(error_kind::schema_error,
                 where + ": field \"split\" must be \"val\" or \"test\", got \"" + s + "\"");
        }
    }

    const bool has_label  = obj.contains("label");
    const bool has_rating = obj.contains("rating");
    if (has_label && has_rating) {
        fail(error_kind::schema_error,
             where + ": fields \"label\" and \"rating\" are mutually exclusive");
    }
    if (has_label) {
        if (!obj["label"].is_number_integer()) {
            fail(error_kind::schema_error, where + ": field \"label\" must be an integer");
        }
        const int64_t v = obj["label"].get<int64_t>();
        if (v != 0 && v != 1) {
            fail(error_kind::schema_error,
                 where + ": field \"label\" must be 0 or 1, got " + std::to_string(v));
        }
        ex.label = static_cast<int>(v);
    }
    if (has_rating) {
        if (!obj["rating"].is_number()) {
            fail(error_kind::schema_error, where + ": field \"rating\" must be a number");
        }
        const double v = obj["rating"].get<double>();
        if (!std::isfinite(v)) {
            fail(error_kind::schema_error, where + ": field \"rating\" must be finite");
        }
        ex.rating = v;
    }

    if (mode == eval_mode::detection && !has_label) {
        fail(error_kind::mode_mismatch,
             where + ": detection evaluation needs \"label\" on every example");
    }
    if (mode == eval_mode::rating && !has_rating) {
        fail(error_kind::mode_mismatch,
             where + ": rating evaluation needs \"rating\" on every example");
    }

    if (obj.contains("system")) {
        if (!obj["system"].is_string()) {
            fail(error_kind::schema_error, where + ": field \"system\" must be a string");
        }
        const std::string s = obj["system"].get<std::string>();
        if (is_blank(s)) {
            fail(error_kind::schema_error,
                 where + ": field \"system\" must be non-empty when present");
        }
        ex.system = s;
    }

    if (obj.contains("error_types")) {
        if (!obj["error_types"].is_array()) {
            fail(error_kind::schema_error,
                 where + ": field \"error_types\" must be an array of strings");
        }
        for (const auto & item : obj["error_types"]) {
            if (!item.is_string()) {
                fail(error_kind::schema_error,
                     where + ": field \"error_types\" must be an array of strings");
            }
            const std::string tag = item.get<std::string>();
            if (!k_known_error_types.count(tag)) {
                fail(error_kind::schema_error,
                     where + ": unknown error type \"" + tag + "\"");
            }
            ex.error_types.insert(tag);
        }
    }

    return ex;
}

loaded_dataset load_dataset(const std::string & path, eval_mode mode) {
    std::ifstream in(path);
    if (!in) {
        fail(error_kind::parse_error, "cannot open dataset file " + path);
    }

    loaded_dataset out;
    out.manifest.path = path;
    out.manifest.mode = mode;

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
        const std::string where = line_ref(path, line_no);
        ordered_json obj;
        try {
            obj = ordered_json::parse(line);
        } catch (const ordered_json::parse_error & e) {
            fail(error_kind::parse_error, where + ": " + e.what());
        }
        eval_example ex = parse_example(obj, mode, where);
        if (!seen_ids.insert(ex.id).second) {
            fail(error_kind::schema_error, where + ": duplicate id \"" + ex.id + "\"");
        }
        if (ex.split == dataset_split::val) {
            out.manifest.val_count++;
        } else {
            out.manifest.test_count++;
        }
        if (out.manifest.name.empty() && !ex.dataset.empty()) {
            out.manifest.name = ex.dataset;
        }
        out.examples.push_back(std::move(ex));
    }

    if (out.examples.empty()) {
        fail(error_kind::empty_input, "no examples in " + path);
    }
    if (out.manifest.name.empty()) {
        // Fall back to the file stem when no example names its dataset.
        std::string stem = path;
        if (const auto slash = stem.find_last_of("/\\"); slash != std::string::npos) {
            stem = stem.substr(slash + 1);
        }
        if (const auto dot = stem.find_last_of('.'); dot != std::string::npos && dot > 0) {
            stem = stem.substr(0, dot);
        }
        out.manifest.name = stem;
    }
    return out;
}

eval_mode infer_mode(const std::string & path) {
    std::ifstream in(path);
    if (!in) {
        fail(error_kind::parse_error, "cannot open dataset file " + path);
    }
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
        const std::string where = line_ref(path, line_no);
        ordered_json obj;
        try {
            obj = ordered_json::parse(line);
        } catch (const ordered_json::parse_error & e) {
            fail(error_kind::parse_error, where + ": " + e.what());
        }
        if (!obj.is_object()) {
            fail(error_kind::schema_error, where + ": expected a JSON object");
        }
        const bool has_label  = obj.contains("label");
        const bool has_rating = obj.contains("rating");
        if (has_label == has_rating) {
            fail(error_kind::mode_mismatch,
                 where + ": cannot infer evaluation mode; expected exactly one of "
                         "\"label\" and \"rating\"");
        }
        return has_label ? eval_mode::detection : eval_mode::rating;
    }
    fail(error_kind::empty_input, "no examples in " + path);
}

std::vector<eval_example> split_filter(const std::vector<eval_example> & examples,
                                       dataset_split split) {
    std::vector<eval_example> out;
    for (const auto & ex : examples) {
        if (ex.split == split) {
            out.push_back(ex);
        }
    }
    return out;
}

std::string example_to_jsonl(const eval_example & ex) {
    ordered_json obj;
    obj["id"] = ex.id;
    if (!ex.dataset.empty()) {
        obj["dataset"] = ex.dataset;
    }
    obj["split"]    = split_name(ex.split);
    obj["document"] = ex.document;
    obj["summary"]  = ex.summary;
    if (ex.label) {
        obj["label"] = *ex.label;
    }
    if (ex.rating) {
        obj["rating"] = *ex.rating;
    }
    if (ex.system) {
        obj["system"] = *ex.system;
    }
    if (!ex.error_types.empty()) {
        obj["error_types"] = ex.error_types;
    }
    return obj.dump();
}

} // namespace fflm
