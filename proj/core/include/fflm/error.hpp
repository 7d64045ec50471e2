#pragma once

#include <stdexcept>
#include <string>

namespace fflm {

enum class error_kind {
    // backend
    backend_unreachable,
    protocol_violation,
    replay_miss,
    store_io,
    // extraction
    empty_input,
    budget_exceeded,
    // metrics / eval
    length_mismatch,
    invalid_weights,
    single_class_labels,
    degenerate_input,
    too_few_systems,
    missing_system_id,
    insufficient_examples,
    empty_faithful_pool,
    // datasets / file plumbing
    parse_error,
    schema_error,
    mode_mismatch,
    id_mismatch,
    config_error,
};

const char * error_kind_name(error_kind kind);

// Single exception type for the whole toolkit; the kind drives the CLI exit code.
class error : public std::runtime_error {
public:
    error(error_kind kind, const std::string & msg)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + msg),
          kind_(kind),
          message_(msg) {}

    error_kind kind() const { return kind_; }

    // The message without the kind prefix, for wrapping with more context.
    const std::string & message() const { return message_; }

private:
    error_kind kind_;
    std::string message_;
};

[[noreturn]] inline void fail(error_kind kind, const std::string & msg) {
    throw error(kind, msg);
}

} // namespace fflm
