// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace claimcheck::jsonl {

using json = nlohmann::json;

/// Calls `fn(line_number, object)` for every non-blank line. Lines that fail
/// to parse are reported through `on_bad_line` (line number + message) and
/// skipped; pass nullptr to throw instead.
void for_each(const std::filesystem::path& path,
              const std::function<void(std::size_t, const json&)>& fn,
              const std::function<void(std::size_t, const std::string&)>& on_bad_line = nullptr);

std::vector<json> read_all(const std::filesystem::path& path);

/// One compact object per line, keys in nlohmann's sorted order. Writes to a
/// temp file then renames, so readers never see a half-written file.
void write_all(const std::filesystem::path& path, const std::vector<json>& rows);

void write_text_file(const std::filesystem::path& path, const std::string& content);

std::string read_text_file(const std::filesystem::path& path);

} // namespace claimcheck::jsonl
