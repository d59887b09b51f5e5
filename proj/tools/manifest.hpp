#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace idrkit::cli {

inline constexpr const char* kToolVersion = "0.1.0";

struct InputDigest {
    std::string path;
    std::string sha256;
};

/// Record written next to every output: rerunning with the same flags and
/// inputs reproduces the output byte for byte.
struct RunManifest {
    std::string subcommand;
    std::map<std::string, std::string> flags;
    std::uint64_t rng_seed = 0;
    std::vector<InputDigest> inputs;
    std::string tool_version = kToolVersion;

    std::string to_json() const;
};

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);
std::string sha256_hex(const std::string& bytes);

}  // namespace idrkit::cli
