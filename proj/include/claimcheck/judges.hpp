// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#pragma once

#include "claimcheck/backend.hpp"
#include "claimcheck/corpus.hpp"
#include "claimcheck/prompts.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace claimcheck::judges {

enum class Label { entailment, neutral, contradiction };

std::string label_token(Label v); // "Entailment" / "Neutral" / "Contradiction"
Label parse_label(const std::string& token);

struct Judgment {
    Label value = Label::neutral;
    std::string rationale; // optional short text

    bool operator==(const Judgment&) const = default;
};

/// Data-level outcome of one judge call. `error` non-empty means the call
/// failed (judging_error / probe_error / missing_fixture); such pairs are
/// excluded from metric denominators, never coerced to a label.
template <typename T>
struct Outcome {
    std::optional<T> value;
    std::string error;

    bool ok() const { return value.has_value(); }
};

struct ProbeResult {
    std::string answer;
    double confidence = 0.0; // in [0, 1]
};

struct AmbiguityVerdict {
    bool ambiguous = false;
    std::string rationale; // capped at 30 whitespace tokens
};

struct RewriteResult {
    std::string output;
    bool rewritten = false; // false = backend failed, original passed through
};

enum class RewriteKind { answer, query };

struct ClaimExtraction {
    std::vector<std::string> claims;
    bool backend_degraded = false; // splitter failure fell back to heuristics
};

/// Heuristic claim splitter: sentence boundaries plus clause splits at
/// comma+coordinator, "while"/"whereas", and bare and/but before a pronoun
/// subject. Claims are contiguous spans: their concatenation preserves every
/// non-whitespace character of the input in order.
std::vector<std::string> heuristic_split(const std::string& answer);

/// Compound numeric comparisons go to the backend splitter.
bool needs_backend_split(const std::string& sentence);

/// All judge-side operations behind one backend: remote endpoint, rule-based
/// offline logic, or a record/replay cache. Safe for concurrent calls.
class JudgeClient {
public:
    explicit JudgeClient(BackendConfig config);
    ~JudgeClient();

    JudgeClient(const JudgeClient&) = delete;
    JudgeClient& operator=(const JudgeClient&) = delete;

    const BackendConfig& config() const;

    /// Three-way verdict for one (claim, evidence) pair. Image evidence is
    /// transmitted as image content (base64), never a synthesized caption.
    Outcome<Judgment> judge_entailment(const std::string& claim,
                                       const corpus::EvidenceItem& evidence,
                                       const PromptConfig& prompt);

    /// Like judge_entailment against a plain text (used for whole-answer
    /// matching and the reference channel).
    Outcome<Judgment> judge_entailment_text(const std::string& claim, const std::string& evidence_text,
                                            const PromptConfig& prompt);

    ClaimExtraction extract_claims(const std::string& long_answer);

    Outcome<ProbeResult> closed_book_probe(const std::string& question);

    /// Image-conditioned and text-only variants use distinct templates.
    Outcome<AmbiguityVerdict> classify_ambiguity(const std::string& question,
                                                 const corpus::EvidenceItem* image);

    RewriteResult rewrite(RewriteKind kind, const std::string& question,
                          const retrieval::EvidencePack& pack, const std::string& original);

    /// Raw wire call for the system-under-test surface (task "generate").
    Outcome<json> call(const WireRequest& request);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Sentinel the evidence-grounded answer rewrite may return verbatim.
inline constexpr const char* kInconclusiveSentinel = "Evidence inconclusive.";

} // namespace claimcheck::judges
