// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace claimcheck {

// Streaming SHA-256. Cache identity and run-manifest hashes go through this,
// so the digest must be stable across platforms.
class Sha256 {
public:
    Sha256();

    void update(const void* data, std::size_t len);
    void update(std::string_view s) { update(s.data(), s.size()); }

    /// Finalizes and returns the lowercase hex digest. Call once.
    std::string hex_digest();

private:
    void process_block(const std::uint8_t* block);

    std::uint32_t state_[8];
    std::uint64_t bit_count_ = 0;
    std::uint8_t buffer_[64];
    std::size_t buffer_len_ = 0;
};

std::string sha256_hex(std::string_view data);

std::string sha256_file_hex(const std::filesystem::path& path);

} // namespace claimcheck
