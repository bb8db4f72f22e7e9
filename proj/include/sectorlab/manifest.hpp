#pragma once

// Artifact manifest: one line per file, "sha256  bytes  relative-path",
// sorted by path. No timestamps, so identical runs give identical text.

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "sectorlab/errors.hpp"
#include "sectorlab/io.hpp"

namespace sectorlab {

inline std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw RangeError("sha256 digest failed");
    }
    std::string hex;
    hex.reserve(2 * len);
    char buf[3];
    for (unsigned int k = 0; k < len; ++k) {
        std::snprintf(buf, sizeof buf, "%02x", digest[k]);
        hex += buf;
    }
    return hex;
}

struct ManifestEntry {
    std::string path;
    std::string sha256;
    std::size_t bytes = 0;
};

/// Collects artifacts written under one output directory.
class ArtifactWriter {
public:
    explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    const std::filesystem::path& dir() const { return dir_; }

    void write(const std::string& relative, const std::string& text) {
        const auto full = dir_ / relative;
        if (full.has_parent_path()) std::filesystem::create_directories(full.parent_path());
        write_file(full.string(), text);
        entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                      [&](const ManifestEntry& e) { return e.path == relative; }),
                       entries_.end());
        entries_.push_back({relative, sha256_hex(text), text.size()});
    }

    std::string manifest_text() const {
        auto sorted = entries_;
        std::sort(sorted.begin(), sorted.end(),
                  [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
        std::string out;
        for (const auto& e : sorted) out += e.sha256 + "  " + std::to_string(e.bytes) + "  " + e.path + '\n';
        return out;
    }

    /// Writes manifest.txt (not listed in itself) and returns its text.
    std::string finish() const {
        const std::string text = manifest_text();
        write_file((dir_ / "manifest.txt").string(), text);
        return text;
    }

    const std::vector<ManifestEntry>& entries() const { return entries_; }

private:
    std::filesystem::path dir_;
    std::vector<ManifestEntry> entries_;
};

}  // namespace sectorlab
