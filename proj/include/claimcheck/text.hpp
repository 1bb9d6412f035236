// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace claimcheck::text {

/// Whitespace tokenization. Token and length counts throughout the project
/// use this split, nothing smarter.
std::vector<std::string> tokenize(std::string_view s);

std::size_t token_count(std::string_view s);

/// Keeps at most `max_tokens` whitespace tokens, single-space joined.
std::string truncate_tokens(std::string_view s, std::size_t max_tokens);

std::string trim(std::string_view s);

std::string to_lower(std::string_view s);

/// Lowercase, remove punctuation, collapse whitespace. Shared by the
/// rule-based judge and the answer normalizer.
std::string normalize_for_match(std::string_view s);

/// Short-answer normalization: normalize_for_match plus dropping leading
/// articles (a/an/the). No numeric coercion ("42" != "42.0").
std::string normalize_answer(std::string_view s);

bool contains(std::string_view haystack, std::string_view needle);

/// Single-space join.
std::string join(const std::vector<std::string>& parts, std::string_view sep);

} // namespace claimcheck::text
