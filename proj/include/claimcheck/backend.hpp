// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#pragma once

#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace claimcheck::judges {

using json = nlohmann::json;

/// Wire request sent to a judge or system endpoint. Field names are part of
/// the protocol (docs/protocol.md); temperature is fixed at 0.
struct WireRequest {
    std::string task;
    std::string prompt;
    std::vector<std::string> images_b64;

    json to_json() const;
    /// Sorted-key compact serialization; defines cache identity.
    std::string canonical() const;
    std::string hash() const; // sha256 of canonical()
};

std::string base64_encode(const std::string& bytes);

enum class BackendKind { remote, rule_based, replay };

std::string backend_kind_token(BackendKind kind);
BackendKind parse_backend_kind(const std::string& token);

/// Semantics the rule-based judge applies to (claim, evidence) pairs. The
/// substring rule is a documented test oracle, not a model of entailment.
struct RuleBasedConfig {
    /// Extra contradiction triggers: claim must match .first and evidence
    /// .second (both substring matches on normalized text).
    std::vector<std::pair<std::string, std::string>> negation_pairs;
};

struct BackendConfig {
    BackendKind kind = BackendKind::rule_based;
    std::string endpoint;                 // required for remote
    std::filesystem::path cache_dir;      // required for replay; enables record mode otherwise
    int max_inflight = 4;
    int timeout_ms = 30000;
    int retries = 2;
    RuleBasedConfig rules;

    void validate() const;
};

/// One file per request hash, holding {"request":..., "response":...}.
/// Reads are lock-free; writes are serialized.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir);

    std::optional<json> get(const WireRequest& request) const;
    void put(const WireRequest& request, const json& response);
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    mutable std::mutex write_mutex_;
};

struct CachedCallResult {
    json response;       // valid iff error is empty
    bool cache_hit = false;
    std::string error;   // "missing_fixture: <hash>" on replay miss

    bool ok() const { return error.empty(); }
};

/// Cache-through call. On a miss: replay mode fails with missing_fixture;
/// record mode invokes `responder` and stores the result.
CachedCallResult cached_call(ResponseCache& cache, const WireRequest& request,
                             const std::function<json(const WireRequest&)>& responder,
                             bool record_mode);

} // namespace claimcheck::judges
