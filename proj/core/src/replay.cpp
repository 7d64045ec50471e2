#include "fflm/replay.hpp"

#include "fflm/error.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <mutex>

namespace fflm {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

static std::string record_to_line(const replay_record & record) {
    ordered_json j = {
        {"key", record.key},
        {"request",
         {
             {"model", record.request.model_id},
             {"conditioning", record.request.conditioning},
             {"target", record.request.target},
         }},
        {"series",
         {
             {"tokens", record.series.tokens},
             {"logprobs", record.series.logprobs},
         }},
    };
    return j.dump();
}

replay_store::replay_store(const std::string & path, store_mode mode)
    : path_(path), mode_(mode) {
    std::ifstream in(path);
    if (!in) {
        if (mode == store_mode::read_only) {
            fail(error_kind::store_io, "replay store not found: " + path);
        }
    } else {
        std::string line;
        size_t line_no = 0;
        while (std::getline(in, line)) {
            line_no++;
            if (line.empty()) {
                continue;
            }
            json j;
            try {
                j = json::parse(line);
            } catch (const json::exception & e) {
                fail(error_kind::store_io,
                     path + " line " + std::to_string(line_no) + ": " + e.what());
            }
            try {
                replay_record record;
                record.key = j.at("key").get<std::string>();
                const auto & req = j.at("request");
                record.request.model_id = req.at("model").get<std::string>();
                record.request.conditioning = req.at("conditioning").get<std::string>();
                record.request.target = req.at("target").get<std::string>();
                const auto & ser = j.at("series");
                record.series.tokens = ser.at("tokens").get<std::vector<std::string>>();
                record.series.logprobs = ser.at("logprobs").get<std::vector<double>>();

                if (record.key != request_key(record.request)) {
                    fail(error_kind::store_io,
                         path + " line " + std::to_string(line_no) +
                             ": key does not match request hash");
                }
                validate_series(record.series, path + " line " + std::to_string(line_no));
                records_.emplace(std::move(record.key), std::move(record.series));
            } catch (const json::exception & e) {
                fail(error_kind::store_io,
                     path + " line " + std::to_string(line_no) + ": " + e.what());
            }
        }
    }

    if (mode == store_mode::read_write) {
        out_.open(path, std::ios::app);
        if (!out_) {
            fail(error_kind::store_io, "cannot open replay store for append: " + path);
        }
    }
}

std::optional<token_prob_series> replay_store::lookup(const std::string & key) const {
    std::shared_lock lock(mutex_);
    auto it = records_.find(key);
    if (it == records_.end()) {
        return std::nullopt;
    }
    return it->second;
}

const token_prob_series & replay_store::append(const replay_record & record) {
    if (mode_ == store_mode::read_only) {
        fail(error_kind::store_io, "replay store is read-only: " + path_);
    }
    std::unique_lock lock(mutex_);
    auto [it, inserted] = records_.emplace(record.key, record.series);
    if (inserted) {
        out_ << record_to_line(record) << '\n';
        out_.flush();
        if (!out_) {
            fail(error_kind::store_io, "write to replay store failed: " + path_);
        }
    }
    return it->second;
}

size_t replay_store::size() const {
    std::shared_lock lock(mutex_);
    return records_.size();
}

token_prob_series cache_lookup_or_fetch(const score_request & req, replay_store & store,
                                        score_backend * upstream) {
    const std::string key = request_key(req);
    if (auto hit = store.lookup(key)) {
        return *hit;
    }
    if (!upstream || store.read_only()) {
        fail(error_kind::replay_miss, "no replay record for key " + key);
    }
    token_prob_series series = score_target(req, *upstream);
    return store.append({key, req, std::move(series)});
}

token_prob_series cached_backend::score(const score_request & req) {
    const std::string key = request_key(req);
    if (auto hit = store_.lookup(key)) {
        return *hit;
    }
    if (!upstream_ || store_.read_only()) {
        fail(error_kind::replay_miss, "no replay record for key " + key);
    }
    upstream_calls_++;
    token_prob_series series = score_target(req, *upstream_);
    return store_.append({key, req, std::move(series)});
}

} // namespace fflm
