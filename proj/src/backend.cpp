// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#include "claimcheck/backend.hpp"

#include "claimcheck/error.hpp"
#include "claimcheck/jsonl.hpp"
#include "claimcheck/sha256.hpp"

namespace claimcheck::judges {

json WireRequest::to_json() const {
    json obj;
    obj["task"] = task;
    obj["prompt"] = prompt;
    obj["images"] = images_b64;
    obj["temperature"] = 0;
    return obj;
}

std::string WireRequest::canonical() const {
    // nlohmann objects iterate in sorted key order, so dump() is canonical
    // as long as requests are built from this fixed field set.
    return to_json().dump();
}

std::string WireRequest::hash() const {
    return sha256_hex(canonical());
}

std::string base64_encode(const std::string& bytes) {
    static const char* alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 3 <= bytes.size()) {
        std::uint32_t n = (std::uint32_t(std::uint8_t(bytes[i])) << 16) |
                          (std::uint32_t(std::uint8_t(bytes[i + 1])) << 8) |
                          std::uint32_t(std::uint8_t(bytes[i + 2]));
        out.push_back(alphabet[(n >> 18) & 63]);
        out.push_back(alphabet[(n >> 12) & 63]);
        out.push_back(alphabet[(n >> 6) & 63]);
        out.push_back(alphabet[n & 63]);
        i += 3;
    }
    std::size_t rest = bytes.size() - i;
    if (rest == 1) {
        std::uint32_t n = std::uint32_t(std::uint8_t(bytes[i])) << 16;
        out.push_back(alphabet[(n >> 18) & 63]);
        out.push_back(alphabet[(n >> 12) & 63]);
        out += "==";
    } else if (rest == 2) {
        std::uint32_t n = (std::uint32_t(std::uint8_t(bytes[i])) << 16) |
                          (std::uint32_t(std::uint8_t(bytes[i + 1])) << 8);
        out.push_back(alphabet[(n >> 18) & 63]);
        out.push_back(alphabet[(n >> 12) & 63]);
        out.push_back(alphabet[(n >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

std::string backend_kind_token(BackendKind kind) {
    switch (kind) {
    case BackendKind::remote: return "remote";
    case BackendKind::rule_based: return "rule";
    case BackendKind::replay: return "replay";
    }
    throw Error("invalid backend kind");
}

BackendKind parse_backend_kind(const std::string& token) {
    if (token == "remote")
        return BackendKind::remote;
    if (token == "rule" || token == "rule_based")
        return BackendKind::rule_based;
    if (token == "replay")
        return BackendKind::replay;
    throw Error("unknown backend kind: " + token);
}

void BackendConfig::validate() const {
    if (kind == BackendKind::remote && endpoint.empty())
        throw Error("remote backend requires an endpoint");
    if (kind == BackendKind::replay && cache_dir.empty())
        throw Error("replay backend requires a cache_dir");
    if (max_inflight < 1)
        throw Error("max_inflight must be >= 1");
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::optional<json> ResponseCache::get(const WireRequest& request) const {
    auto path = dir_ / (request.hash() + ".json");
    if (!std::filesystem::exists(path))
        return std::nullopt;
    json entry = json::parse(jsonl::read_text_file(path), nullptr, false);
    if (entry.is_discarded() || !entry.contains("response"))
        throw Error("corrupt cache entry: " + path.string());
    return entry.at("response");
}

void ResponseCache::put(const WireRequest& request, const json& response) {
    std::lock_guard<std::mutex> lock(write_mutex_);
    json entry;
    entry["request"] = request.to_json();
    entry["response"] = response;
    jsonl::write_text_file(dir_ / (request.hash() + ".json"), entry.dump(2) + "\n");
}

CachedCallResult cached_call(ResponseCache& cache, const WireRequest& request,
                             const std::function<json(const WireRequest&)>& responder,
                             bool record_mode) {
    if (auto hit = cache.get(request))
        return {*hit, true, ""};
    if (!record_mode || !responder)
        return {json(), false, "missing_fixture: " + request.hash()};
    json response = responder(request);
    cache.put(request, response);
    return {response, false, ""};
}

} // namespace claimcheck::judges
