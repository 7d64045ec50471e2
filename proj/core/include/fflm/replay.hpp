#pragma once

#include "fflm/backend.hpp"
#include "fflm/types.hpp"

#include <atomic>
#include <fstream>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>

namespace fflm {

struct replay_record {
    std::string       key; // request_key(request)
    score_request     request;
    token_prob_series series;
};

enum class store_mode {
    read_write, // missing file is created; appends allowed
    read_only,  // file must exist; appends rejected
};

// JSON-lines record store keyed by the canonical request hash. Append-only;
// one writer, many readers. Corrupt lines are rejected at open with the line
// number.
class replay_store {
public:
    replay_store(const std::string & path, store_mode mode);

    std::optional<token_prob_series> lookup(const std::string & key) const;

    // Writes the record unless the key is already present (first write wins).
    // Returns the stored series either way.
    const token_prob_series & append(const replay_record & record);

    bool read_only() const { return mode_ == store_mode::read_only; }
    size_t size() const;
    const std::string & path() const { return path_; }

private:
    std::string path_;
    store_mode  mode_;
    std::ofstream out_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, token_prob_series> records_;
};

// Replay-through cache: hits are served from the store without contacting
// the upstream backend; misses fetch via score_target and append. With no
// upstream (or a read-only store) a miss raises replay_miss.
class cached_backend : public score_backend {
public:
    cached_backend(replay_store & store, score_backend * upstream)
        : store_(store), upstream_(upstream) {}

    token_prob_series score(const score_request & req) override;

    std::string name() const override {
        return upstream_ ? "replay+" + upstream_->name() : "replay-only";
    }

    uint64_t upstream_calls() const { return upstream_calls_; }

private:
    replay_store & store_;
    score_backend * upstream_; // may be null (replay-only mode)
    std::atomic<uint64_t> upstream_calls_{0};
};

// The cache primitive behind cached_backend, usable directly.
token_prob_series cache_lookup_or_fetch(const score_request & req, replay_store & store,
                                        score_backend * upstream);

} // namespace fflm
