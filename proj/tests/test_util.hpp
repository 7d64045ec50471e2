// Shared helpers for the test suite: scratch directories, file I/O, and a
// portable uniform draw (mt19937_64's output sequence is pinned by the
// standard; distribution objects are not).
#pragma once

#include "fflm/error.hpp"

#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

// Asserts that an expression throws fflm::error with the given kind.
#define CHECK_FAILS_WITH(expr, expected_kind)                 \
    do {                                                      \
        bool threw_ = false;                                  \
        try {                                                 \
            (void)(expr);                                     \
        } catch (const fflm::error & e_) {                    \
            threw_ = true;                                    \
            CHECK(e_.kind() == (expected_kind));              \
        }                                                     \
        CHECK_MESSAGE(threw_, "expected " #expr " to throw"); \
    } while (0)

namespace testutil {

struct temp_dir {
    std::filesystem::path path;

    explicit temp_dir(const std::string & tag) {
        static std::atomic<uint64_t> counter{0};
        path = std::filesystem::temp_directory_path() /
               ("fflm-test-" + tag + "-" + std::to_string(counter.fetch_add(1)) + "-" +
                std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }

    ~temp_dir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }

    std::string file(const std::string & name) const { return (path / name).string(); }
};

inline void write_file(const std::string & path, const std::string & content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::string & path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline double unit_double(std::mt19937_64 & rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace testutil
