// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#include "claimcheck/text.hpp"

#include <algorithm>
#include <cctype>

namespace claimcheck::text {

namespace {

bool is_space(unsigned char c) {
    return std::isspace(c) != 0;
}

bool is_punct(unsigned char c) {
    return std::ispunct(c) != 0;
}

} // namespace

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(s[i]))
            ++i;
        std::size_t start = i;
        while (i < s.size() && !is_space(s[i]))
            ++i;
        if (i > start)
            out.emplace_back(s.substr(start, i - start));
    }
    return out;
}

std::size_t token_count(std::string_view s) {
    std::size_t n = 0;
    bool in_token = false;
    for (unsigned char c : s) {
        if (is_space(c)) {
            in_token = false;
        } else if (!in_token) {
            in_token = true;
            ++n;
        }
    }
    return n;
}

std::string truncate_tokens(std::string_view s, std::size_t max_tokens) {
    auto toks = tokenize(s);
    if (toks.size() > max_tokens)
        toks.resize(max_tokens);
    return join(toks, " ");
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b]))
        ++b;
    while (e > b && is_space(s[e - 1]))
        --e;
    return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string normalize_for_match(std::string_view s) {
    std::string cleaned;
    cleaned.reserve(s.size());
    for (unsigned char c : s) {
        if (is_punct(c))
            continue;
        cleaned.push_back(static_cast<char>(std::tolower(c)));
    }
    return join(tokenize(cleaned), " ");
}

std::string normalize_answer(std::string_view s) {
    std::string norm = normalize_for_match(s);
    for (std::string_view article : {"a ", "an ", "the "}) {
        if (norm.size() > article.size() && norm.compare(0, article.size(), article) == 0) {
            norm.erase(0, article.size());
            break;
        }
    }
    return norm;
}

bool contains(std::string_view haystack, std::string_view needle) {
    return haystack.find(needle) != std::string_view::npos;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0)
            out += sep;
        out += parts[i];
    }
    return out;
}

} // namespace claimcheck::text
