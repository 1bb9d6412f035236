// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#include "claimcheck/judges.hpp"

#include "claimcheck/error.hpp"
#include "claimcheck/jsonl.hpp"
#include "claimcheck/text.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_map>

namespace claimcheck::judges {

std::string label_token(Label v) {
    switch (v) {
    case Label::entailment: return "Entailment";
    case Label::neutral: return "Neutral";
    case Label::contradiction: return "Contradiction";
    }
    throw Error("invalid label");
}

Label parse_label(const std::string& token) {
    std::string t = text::to_lower(text::trim(token));
    if (t == "entailment")
        return Label::entailment;
    if (t == "neutral")
        return Label::neutral;
    if (t == "contradiction")
        return Label::contradiction;
    throw Error("unknown judgment label: " + token);
}

// ---------------------------------------------------------------------------
// Claim splitting heuristics
// ---------------------------------------------------------------------------

namespace {

const std::set<std::string>& abbreviations() {
    static const std::set<std::string> abbr = {"e.g", "i.e", "mr", "mrs", "ms",
                                               "dr",  "prof", "vs", "fig", "etc"};
    return abbr;
}

bool is_sentence_punct(char c) {
    return c == '.' || c == '!' || c == '?';
}

bool is_closing(char c) {
    return c == '"' || c == '\'' || c == ')' || c == ']';
}

/// Word immediately before position `pos`, lowercased, dots kept ("e.g").
std::string word_before(const std::string& s, std::size_t pos) {
    std::size_t end = pos;
    std::size_t begin = end;
    while (begin > 0 && !std::isspace(static_cast<unsigned char>(s[begin - 1])))
        --begin;
    return text::to_lower(s.substr(begin, end - begin));
}

std::vector<std::string> split_sentences(const std::string& answer) {
    std::vector<std::string> sentences;
    std::size_t start = 0;
    std::size_t i = 0;
    while (i < answer.size()) {
        if (!is_sentence_punct(answer[i])) {
            ++i;
            continue;
        }
        std::size_t punct_begin = i;
        while (i < answer.size() && is_sentence_punct(answer[i]))
            ++i;
        while (i < answer.size() && is_closing(answer[i]))
            ++i;
        if (i >= answer.size())
            break; // trailing punctuation; flush below
        if (!std::isspace(static_cast<unsigned char>(answer[i])))
            continue;
        std::size_t next = i;
        while (next < answer.size() && std::isspace(static_cast<unsigned char>(answer[next])))
            ++next;
        if (next >= answer.size())
            break;
        unsigned char head = static_cast<unsigned char>(answer[next]);
        if (!(std::isupper(head) || std::isdigit(head) || head == '"' || head == '('))
            continue;
        std::string prev = word_before(answer, punct_begin);
        // "J. Smith" and listed abbreviations do not end a sentence.
        if (prev.size() == 1 && std::isalpha(static_cast<unsigned char>(prev[0])))
            continue;
        std::string prev_nodot = prev;
        while (!prev_nodot.empty() && prev_nodot.back() == '.')
            prev_nodot.pop_back();
        if (abbreviations().count(prev_nodot) > 0)
            continue;
        sentences.push_back(answer.substr(start, i - start));
        start = next;
        i = next;
    }
    if (start < answer.size())
        sentences.push_back(answer.substr(start));
    return sentences;
}

const std::set<std::string>& pronoun_subjects() {
    static const std::set<std::string> pronouns = {"it",  "he",   "she",  "they", "we",
                                                   "i",   "this", "that", "these", "those"};
    return pronouns;
}

constexpr std::size_t kMinClauseTokens = 3;

/// Earliest clause-split position at or after `from`; the position is where
/// the right-hand segment begins. npos when no split applies.
std::size_t find_clause_split(const std::string& s, std::size_t from) {
    std::size_t best = std::string::npos;
    auto consider = [&](std::size_t pos) {
        if (pos != std::string::npos && pos > from && (best == std::string::npos || pos < best))
            best = pos;
    };

    for (const char* marker : {", and ", ", but ", ", or ", ", yet ", ", so "}) {
        std::size_t pos = s.find(marker, from);
        while (pos != std::string::npos) {
            consider(pos + 2); // right side starts at the coordinator
            pos = s.find(marker, pos + 1);
        }
    }
    for (const char* marker : {" while ", " whereas "}) {
        std::size_t pos = s.find(marker, from);
        while (pos != std::string::npos) {
            consider(pos + 1);
            pos = s.find(marker, pos + 1);
        }
    }
    for (const char* marker : {" and ", " but "}) {
        std::size_t pos = s.find(marker, from);
        while (pos != std::string::npos) {
            std::size_t word_start = pos + std::strlen(marker);
            std::size_t word_end = word_start;
            while (word_end < s.size() && std::isalpha(static_cast<unsigned char>(s[word_end])))
                ++word_end;
            if (pronoun_subjects().count(text::to_lower(s.substr(word_start, word_end - word_start))))
                consider(pos + 1);
            pos = s.find(marker, pos + 1);
        }
    }
    return best;
}

std::vector<std::string> split_clauses(const std::string& sentence) {
    std::vector<std::string> parts;
    std::size_t seg_start = 0;
    std::size_t search_from = 0;
    while (true) {
        std::size_t cut = find_clause_split(sentence, search_from);
        if (cut == std::string::npos)
            break;
        std::string left = sentence.substr(seg_start, cut - seg_start);
        std::string right = sentence.substr(cut);
        if (text::token_count(left) >= kMinClauseTokens &&
            text::token_count(right) >= kMinClauseTokens) {
            parts.push_back(left);
            seg_start = cut;
        }
        search_from = cut + 1;
    }
    parts.push_back(sentence.substr(seg_start));
    return parts;
}

bool has_digit(const std::string& token) {
    return std::any_of(token.begin(), token.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}

} // namespace

std::vector<std::string> heuristic_split(const std::string& answer) {
    std::vector<std::string> claims;
    for (const auto& sentence : split_sentences(answer)) {
        for (const auto& clause : split_clauses(sentence)) {
            std::string trimmed = text::trim(clause);
            if (!trimmed.empty())
                claims.push_back(trimmed);
        }
    }
    return claims;
}

bool needs_backend_split(const std::string& sentence) {
    auto tokens = text::tokenize(text::to_lower(sentence));
    int numeric = 0;
    bool cue = false;
    for (const auto& tok : tokens) {
        if (has_digit(tok))
            ++numeric;
        std::string bare = text::normalize_for_match(tok);
        if (bare == "while" || bare == "whereas" || bare == "versus" || bare == "vs" ||
            bare == "compared" || bare == "but")
            cue = true;
    }
    return numeric >= 2 && cue;
}

// ---------------------------------------------------------------------------
// JudgeClient
// ---------------------------------------------------------------------------

namespace {

class Semaphore {
public:
    explicit Semaphore(int count) : count_(count) {}

    void acquire() {
        std::unique_lock<std::mutex> lock(mutex_);
        cv_.wait(lock, [&] { return count_ > 0; });
        --count_;
    }
    void release() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            ++count_;
        }
        cv_.notify_one();
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int count_;
};

struct EndpointParts {
    std::string base; // scheme://host:port
    std::string path;
};

EndpointParts parse_endpoint(const std::string& endpoint) {
    auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw Error("endpoint must include scheme: " + endpoint);
    auto path_begin = endpoint.find('/', scheme_end + 3);
    if (path_begin == std::string::npos)
        return {endpoint, "/"};
    return {endpoint.substr(0, path_begin), endpoint.substr(path_begin)};
}

std::string judge_preamble(InitStyle style) {
    return style == InitStyle::plain
               ? "Please judge the following claim against the evidence."
               : "You are an expert fact-checking analyst. Judge the following claim against "
                 "the evidence.";
}

} // namespace

struct JudgeClient::Impl {
    BackendConfig config;
    std::optional<ResponseCache> cache;
    Semaphore inflight;
    std::mutex image_memo_mutex;
    std::unordered_map<std::string, std::string> image_memo; // path -> base64

    explicit Impl(BackendConfig cfg)
        : config(std::move(cfg)), inflight(std::max(1, config.max_inflight)) {
        config.validate();
        if (!config.cache_dir.empty())
            cache.emplace(config.cache_dir);
    }

    std::string image_base64(const std::string& path) {
        {
            std::lock_guard<std::mutex> lock(image_memo_mutex);
            auto it = image_memo.find(path);
            if (it != image_memo.end())
                return it->second;
        }
        std::string encoded = base64_encode(jsonl::read_text_file(path));
        std::lock_guard<std::mutex> lock(image_memo_mutex);
        image_memo.emplace(path, encoded);
        return encoded;
    }

    Outcome<json> remote_call(const WireRequest& request) {
        EndpointParts parts = parse_endpoint(config.endpoint);
        std::string body = request.to_json().dump();
        std::string last_error;
        for (int attempt = 0; attempt <= config.retries; ++attempt) {
            if (attempt > 0)
                std::this_thread::sleep_for(std::chrono::milliseconds(20));
            httplib::Client client(parts.base);
            client.set_connection_timeout(0, config.timeout_ms * 1000LL);
            client.set_read_timeout(config.timeout_ms / 1000, (config.timeout_ms % 1000) * 1000);
            httplib::Headers headers;
            if (const char* key = std::getenv("CLAIMCHECK_API_KEY"))
                headers.emplace("Authorization", std::string("Bearer ") + key);
            auto res = client.Post(parts.path, headers, body, "application/json");
            if (!res) {
                last_error = "connection failed";
                continue;
            }
            if (res->status != 200) {
                last_error = "http status " + std::to_string(res->status);
                continue;
            }
            json parsed = json::parse(res->body, nullptr, false);
            if (parsed.is_discarded()) {
                last_error = "unparseable response body";
                continue;
            }
            return {parsed, ""};
        }
        return {std::nullopt, "judging_error: remote unreachable (" + last_error + ")"};
    }

    /// Cache-through dispatch. `rule_eval` supplies the rule-based response.
    Outcome<json> dispatch(const WireRequest& request, const std::function<json()>& rule_eval) {
        if (cache) {
            if (auto hit = cache->get(request))
                return {*hit, ""};
        }
        switch (config.kind) {
        case BackendKind::replay:
            return {std::nullopt, "missing_fixture: " + request.hash()};
        case BackendKind::rule_based: {
            json response = rule_eval();
            if (cache)
                cache->put(request, response);
            return {response, ""};
        }
        case BackendKind::remote: {
            inflight.acquire();
            auto result = remote_call(request);
            inflight.release();
            if (result.ok() && cache)
                cache->put(request, *result.value);
            return result;
        }
        }
        return {std::nullopt, "invalid backend kind"};
    }
};

JudgeClient::JudgeClient(BackendConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

JudgeClient::~JudgeClient() = default;

const BackendConfig& JudgeClient::config() const {
    return impl_->config;
}

// ---------------------------------------------------------------------------
// Rule-based semantics
// ---------------------------------------------------------------------------

namespace {

/// True when `needle` occurs in `haystack` starting at a word boundary
/// ("cannot x" must not count as "not x").
bool contains_at_word_start(const std::string& haystack, const std::string& needle) {
    std::size_t pos = haystack.find(needle);
    while (pos != std::string::npos) {
        if (pos == 0 || haystack[pos - 1] == ' ')
            return true;
        pos = haystack.find(needle, pos + 1);
    }
    return false;
}

Label rule_entailment(const RuleBasedConfig& rules, const std::string& claim,
                      const std::string& evidence_text) {
    std::string c = text::normalize_for_match(claim);
    std::string e = text::normalize_for_match(evidence_text);
    if (c.empty() || e.empty())
        return Label::neutral;

    // Negation wins over the plain substring rule: "not <claim>" contains
    // <claim>, so the order here is load-bearing.
    if (contains_at_word_start(e, "not " + c) || contains_at_word_start(e, "no " + c) ||
        contains_at_word_start(e, "never " + c))
        return Label::contradiction;
    for (const char* negator : {"not ", "no ", "never "}) {
        if (c.rfind(negator, 0) == 0 && text::contains(e, c.substr(std::strlen(negator))))
            return Label::contradiction;
    }
    for (const auto& [claim_pat, evidence_pat] : rules.negation_pairs) {
        if (text::contains(c, text::normalize_for_match(claim_pat)) &&
            text::contains(e, text::normalize_for_match(evidence_pat)))
            return Label::contradiction;
    }
    if (text::contains(e, c))
        return Label::entailment;
    return Label::neutral;
}

std::string evidence_rule_text(const corpus::EvidenceItem& evidence) {
    if (evidence.modality == corpus::Modality::text)
        return evidence.content_ref;
    return evidence.caption.value_or("");
}

} // namespace

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

Outcome<Judgment> JudgeClient::judge_entailment(const std::string& claim,
                                                const corpus::EvidenceItem& evidence,
                                                const PromptConfig& prompt) {
    WireRequest request;
    request.task = "entailment";

    std::string body = judge_preamble(prompt.init_style);
    body += "\n\nClaim: " + claim + "\n";
    if (evidence.modality == corpus::Modality::text) {
        body += "Evidence (text): " + evidence.content_ref + "\n";
    } else {
        body += "Evidence (image): attached\n";
        if (evidence.caption && !evidence.caption->empty())
            body += "Caption: " + *evidence.caption + "\n";
        // Image bytes go on the wire only when something consumes them: the
        // remote judge or the cache key. The pure rule backend reads captions.
        if (impl_->config.kind == BackendKind::remote || !impl_->config.cache_dir.empty()) {
            try {
                request.images_b64.push_back(impl_->image_base64(evidence.content_ref));
            } catch (const Error& e) {
                return {std::nullopt, std::string("judging_error: ") + e.what()};
            }
        }
    }
    body += "\nRespond with exactly one word: Entailment, Neutral, or Contradiction.";
    request.prompt = body;

    auto result = impl_->dispatch(request, [&] {
        json r;
        r["label"] = label_token(rule_entailment(impl_->config.rules, claim,
                                                 evidence_rule_text(evidence)));
        return r;
    });
    if (!result.ok())
        return {std::nullopt, result.error};
    const json& response = *result.value;
    if (!response.contains("label") || !response.at("label").is_string())
        return {std::nullopt, "judging_error: response missing label"};
    Judgment judgment;
    try {
        judgment.value = parse_label(response.at("label").get<std::string>());
    } catch (const Error& e) {
        return {std::nullopt, std::string("judging_error: ") + e.what()};
    }
    if (response.contains("rationale") && response.at("rationale").is_string())
        judgment.rationale = response.at("rationale").get<std::string>();
    return {judgment, ""};
}

Outcome<Judgment> JudgeClient::judge_entailment_text(const std::string& claim,
                                                     const std::string& evidence_text,
                                                     const PromptConfig& prompt) {
    corpus::EvidenceItem pseudo;
    pseudo.evidence_id = "";
    pseudo.modality = corpus::Modality::text;
    pseudo.content_ref = evidence_text;
    return judge_entailment(claim, pseudo, prompt);
}

ClaimExtraction JudgeClient::extract_claims(const std::string& long_answer) {
    ClaimExtraction result;
    for (const auto& sentence : split_sentences(long_answer)) {
        if (text::trim(sentence).empty())
            continue;
        if (needs_backend_split(sentence)) {
            WireRequest request;
            request.task = "split_claims";
            request.prompt =
                "Split the following sentence into minimal verifiable claims, one per line. "
                "Keep each claim self-contained.\n\nSentence: " +
                sentence;
            auto outcome = impl_->dispatch(request, [&] {
                std::vector<std::string> parts;
                for (const auto& clause : split_clauses(sentence)) {
                    std::string t = text::trim(clause);
                    if (!t.empty())
                        parts.push_back(t);
                }
                json r;
                r["answer"] = text::join(parts, "\n");
                return r;
            });
            bool used_backend = false;
            if (outcome.ok() && outcome.value->contains("answer") &&
                outcome.value->at("answer").is_string()) {
                std::vector<std::string> lines;
                std::istringstream stream(outcome.value->at("answer").get<std::string>());
                std::string line;
                while (std::getline(stream, line)) {
                    std::string t = text::trim(line);
                    if (!t.empty())
                        lines.push_back(t);
                }
                if (!lines.empty()) {
                    for (auto& l : lines)
                        result.claims.push_back(std::move(l));
                    used_backend = true;
                }
            }
            if (!used_backend) {
                result.backend_degraded = true;
                for (const auto& clause : split_clauses(sentence)) {
                    std::string t = text::trim(clause);
                    if (!t.empty())
                        result.claims.push_back(t);
                }
            }
        } else {
            for (const auto& clause : split_clauses(sentence)) {
                std::string t = text::trim(clause);
                if (!t.empty())
                    result.claims.push_back(t);
            }
        }
    }
    return result;
}

Outcome<ProbeResult> JudgeClient::closed_book_probe(const std::string& question) {
    if (text::trim(question).empty())
        return {std::nullopt, "probe_error: empty question"};
    WireRequest request;
    request.task = "closed_book";
    request.prompt =
        "Answer the following question from memory, without any external evidence. "
        "Respond as JSON with fields \"answer\" and \"confidence\" (a number in [0,1]).\n\n"
        "Question: " +
        question;
    auto outcome = impl_->dispatch(request, [] {
        json r;
        r["answer"] = "";
        r["confidence"] = 0.0;
        return r;
    });
    if (!outcome.ok())
        return {std::nullopt, "probe_error: " + outcome.error};
    const json& response = *outcome.value;
    if (!response.contains("answer") || !response.at("answer").is_string())
        return {std::nullopt, "probe_error: response missing answer"};
    if (!response.contains("confidence") || !response.at("confidence").is_number())
        return {std::nullopt, "probe_error: confidence not a number"};
    double confidence = response.at("confidence").get<double>();
    if (confidence < 0.0 || confidence > 1.0)
        return {std::nullopt, "probe_error: confidence out of range"};
    return {ProbeResult{response.at("answer").get<std::string>(), confidence}, ""};
}

Outcome<AmbiguityVerdict> JudgeClient::classify_ambiguity(const std::string& question,
                                                          const corpus::EvidenceItem* image) {
    if (text::trim(question).empty())
        return {std::nullopt, "ambiguity_error: empty question"};
    WireRequest request;
    request.task = "ambiguity";
    if (image != nullptr) {
        request.prompt =
            "Decide whether the following image-conditioned question is CLEAR or AMBIGUOUS. "
            "Mark it AMBIGUOUS if a single correct answer cannot be determined without extra "
            "constraints, or if the key visual evidence is not visible or is blurred. "
            "Respond as JSON {\"label\": \"CLEAR\"|\"AMBIGUOUS\", \"rationale\": \"<short "
            "rationale, at most 30 words>\"}.\n\nQuestion: " +
            question;
        try {
            request.images_b64.push_back(impl_->image_base64(image->content_ref));
        } catch (const Error& e) {
            return {std::nullopt, std::string("ambiguity_error: ") + e.what()};
        }
    } else {
        request.prompt =
            "Decide whether the following question is CLEAR or AMBIGUOUS. Mark it AMBIGUOUS "
            "if a single correct answer cannot be determined without extra constraints such "
            "as time, location, unit, or referent. Respond as JSON {\"label\": "
            "\"CLEAR\"|\"AMBIGUOUS\", \"rationale\": \"<short rationale, at most 30 "
            "words>\"}.\n\nQuestion: " +
            question;
    }
    auto outcome = impl_->dispatch(request, [] {
        json r;
        r["label"] = "CLEAR";
        r["rationale"] = "";
        return r;
    });
    if (!outcome.ok())
        return {std::nullopt, "ambiguity_error: " + outcome.error};
    const json& response = *outcome.value;
    if (!response.contains("label") || !response.at("label").is_string())
        return {std::nullopt, "ambiguity_error: response missing label"};
    std::string label = text::to_lower(text::trim(response.at("label").get<std::string>()));
    if (label != "clear" && label != "ambiguous")
        return {std::nullopt, "ambiguity_error: unknown label " + label};
    AmbiguityVerdict verdict;
    verdict.ambiguous = (label == "ambiguous");
    if (response.contains("rationale") && response.at("rationale").is_string())
        verdict.rationale = text::truncate_tokens(response.at("rationale").get<std::string>(), 30);
    return {verdict, ""};
}

RewriteResult JudgeClient::rewrite(RewriteKind kind, const std::string& question,
                                   const retrieval::EvidencePack& pack,
                                   const std::string& original) {
    WireRequest request;
    std::string evidence_block;
    for (const auto& entry : pack.texts)
        evidence_block += "[Text] " + entry.item.content_ref + "\n";
    for (const auto& entry : pack.images) {
        evidence_block += "[Image]";
        if (entry.item.caption && !entry.item.caption->empty())
            evidence_block += " " + *entry.item.caption;
        evidence_block += "\n";
    }
    if (kind == RewriteKind::answer) {
        request.task = "rewrite_answer";
        request.prompt = "Rewrite the answer so it is concise and fully grounded in the "
                         "evidence below. If the evidence does not determine an answer, reply "
                         "exactly: Evidence inconclusive.\n\nQuestion: " +
                         question + "\nOriginal answer: " + original + "\n\nEvidence:\n" +
                         evidence_block + "\nRespond as JSON {\"answer\": \"...\"}.";
    } else {
        request.task = "rewrite_query";
        request.prompt = "Rewrite the question into a single precise sentence that can be "
                         "answered solely from the evidence below.\n\nQuestion: " +
                         original + "\n\nEvidence:\n" + evidence_block +
                         "\nRespond as JSON {\"answer\": \"...\"}.";
    }
    auto outcome = impl_->dispatch(request, [&] {
        json r;
        r["answer"] = original;
        return r;
    });
    if (!outcome.ok() || !outcome.value->contains("answer") ||
        !outcome.value->at("answer").is_string())
        return {original, false};
    return {outcome.value->at("answer").get<std::string>(), true};
}

Outcome<json> JudgeClient::call(const WireRequest& request) {
    return impl_->dispatch(request, [] {
        json r;
        r["answer"] = "SHORT: unknown\nLONG: unknown";
        return r;
    });
}

} // namespace claimcheck::judges
