#include "manifest.hpp"

#include <array>
#include <cstdio>

#include <openssl/evp.h>

#include "json.hpp"
#include "table_io.hpp"

namespace idrkit::cli {

std::string sha256_hex(const std::string& bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr);
    std::string hex;
    char byte[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(byte, sizeof byte, "%02x", md[i]);
        hex += byte;
    }
    return hex;
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_file(path)); }

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = "idrkit";
    j["tool_version"] = tool_version;
    j["subcommand"] = subcommand;
    j["rng_seed"] = rng_seed;
    j["flags"] = flags;
    auto& in = j["inputs"] = nlohmann::ordered_json::array();
    for (const auto& d : inputs) in.push_back({{"path", d.path}, {"sha256", d.sha256}});
    return j.dump(2) + "\n";
}

}  // namespace idrkit::cli
