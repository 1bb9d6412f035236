// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#pragma once

#include "claimcheck/judges.hpp"
#include "claimcheck/retrieval.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace claimcheck::checker {

inline constexpr int kCheckResultSchemaVersion = 1;

/// One judged (claim, evidence) cell; errored cells hold no judgment and are
/// excluded from aggregation.
struct PairJudgment {
    std::optional<judges::Judgment> judgment;
    std::string error;

    bool ok() const { return judgment.has_value(); }
};

/// Per-claim judgments over the pack, image and text columns separate.
struct JudgmentMatrix {
    std::vector<std::string> claims;
    std::vector<std::string> image_ids; // pack order
    std::vector<std::string> text_ids;
    std::vector<std::vector<PairJudgment>> image_judgments; // [claim][image]
    std::vector<std::vector<PairJudgment>> text_judgments;  // [claim][text]
};

struct ClaimVerdict {
    std::string claim;
    judges::Label label = judges::Label::neutral;
    bool unjudgeable = false; // every pair errored; excluded from denominators
    bool s_img = false;
    bool s_txt = false;
    /// Reference-channel entailment (contributes to label only when the
    /// channel is on; false when it is off).
    bool reference_entailed = false;
    /// Raw claim-vs-reference judgment, computed whenever the gold long
    /// answer exists. Feeds the per-modality precision reconstruction.
    bool matches_reference = false;
    std::set<std::string> entailing_evidence_ids;
};

struct GoldClaimMatch {
    std::string claim;
    bool matched = false; // entailed by the generated long answer
    bool s_img = false;   // entailed by a pack image
    bool s_txt = false;   // entailed by a pack text
};

struct CheckResult {
    std::string record_id;
    retrieval::RetrievalMode mode = retrieval::RetrievalMode::gt_only;
    std::vector<ClaimVerdict> verdicts;
    std::vector<std::string> image_ids; // the retrieved set E, by modality
    std::vector<std::string> text_ids;
    std::set<std::string> used_evidence_ids;
    std::vector<GoldClaimMatch> gold_matches;
    bool gold_reference_present = false;
    /// Gold-claim extraction/judging hit an error: record excluded from CR.
    bool gold_matching_failed = false;
    int judging_error_count = 0;
    int unjudgeable_claim_count = 0;
    bool check_failed = false; // total judge outage for this record

    nlohmann::json to_json() const;
    static CheckResult from_json(const nlohmann::json& obj);
};

struct CheckOptions {
    judges::PromptConfig judge_prompt;
    /// Off by default. When on, the gold long answer is judged as one extra
    /// pseudo-evidence item that can entail a claim but never counts in E,
    /// E_used, or any precision/coverage denominator.
    bool reference_channel = false;
};

/// Stage-3 precedence: any Entailment wins, else any Contradiction, else
/// Neutral. Empty input = unjudgeable (nullopt).
std::optional<judges::Label> aggregate_label(const std::vector<judges::Label>& image_judgments,
                                             const std::vector<judges::Label>& text_judgments);

/// s_img / s_txt for one claim: 1 iff some judgment of that modality is
/// Entailment (errored cells ignored).
std::pair<bool, bool> derive_flags(const JudgmentMatrix& matrix, std::size_t claim_index);

/// Evidence items with at least one Entailment cell in their column.
std::set<std::string> mark_used(const JudgmentMatrix& matrix);

struct GoldMatchOutcome {
    std::vector<GoldClaimMatch> matches; // s_img/s_txt left unset here
    int error_count = 0;
};

/// Mines gold claims from the reference long answer (same splitter settings
/// as answer claims) and judges each against the full generated answer.
GoldMatchOutcome match_gold_claims(const std::string& gold_long_answer,
                                   const std::string& generated_long_answer,
                                   judges::JudgeClient& client,
                                   const judges::PromptConfig& prompt);

struct GeneratedAnswer {
    std::string short_answer;
    std::string long_answer;
};

/// Stages 1-3 end to end for one record. Deterministic under rule/replay
/// backends; output ordering is canonical regardless of judging order.
CheckResult check_answer(const corpus::QueryRecord& record, const retrieval::EvidencePack& pack,
                         const GeneratedAnswer& generated, judges::JudgeClient& client,
                         const CheckOptions& options);

} // namespace claimcheck::checker
