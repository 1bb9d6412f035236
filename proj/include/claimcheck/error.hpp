// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#pragma once

#include <stdexcept>
#include <string>

namespace claimcheck {

/// Hard failure: unreadable input, malformed config, broken invariant.
/// Data-level outcomes (rejected records, violations, judging errors) are
/// returned as values, never thrown.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace claimcheck
