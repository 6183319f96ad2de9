#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace robusteval {

// Base class for all harness-level failures. Subject-program behavior is
// never reported through exceptions; it lives in ExecutionOutcome.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public Error {
public:
    using Error::Error;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);
// Write to a sibling temp file and rename into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::filesystem::path& path);

std::string to_lower(std::string_view s);
bool contains_ci(std::string_view haystack, std::string_view needle);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Deterministic splittable PRNG. std::mt19937 plus the standard
// distributions would not be bit-reproducible across library
// implementations, so sampling is done by hand on top of splitmix64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    // Uniform in [0, n), n > 0.
    std::uint64_t below(std::uint64_t n);
    // Uniform in [lo, hi] inclusive.
    std::int64_t range(std::int64_t lo, std::int64_t hi);
    double unit();  // [0, 1)
    bool chance(double p);

    // Independent deterministic substream, e.g. one per program id.
    Rng fork(std::string_view tag) const;

private:
    std::uint64_t state_;
};

std::uint64_t fnv1a64(std::string_view s);

}  // namespace robusteval
