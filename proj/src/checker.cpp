// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#include "claimcheck/checker.hpp"

#include "claimcheck/error.hpp"
#include "claimcheck/text.hpp"

#include <algorithm>

namespace claimcheck::checker {

using judges::Label;
using nlohmann::json;

std::optional<Label> aggregate_label(const std::vector<Label>& image_judgments,
                                     const std::vector<Label>& text_judgments) {
    bool any = false, entailed = false, contradicted = false;
    for (const auto* side : {&image_judgments, &text_judgments}) {
        for (Label l : *side) {
            any = true;
            if (l == Label::entailment)
                entailed = true;
            else if (l == Label::contradiction)
                contradicted = true;
        }
    }
    if (!any)
        return std::nullopt;
    if (entailed)
        return Label::entailment;
    if (contradicted)
        return Label::contradiction;
    return Label::neutral;
}

std::pair<bool, bool> derive_flags(const JudgmentMatrix& matrix, std::size_t claim_index) {
    if (claim_index >= matrix.claims.size())
        throw Error("claim index out of range");
    auto has_entailment = [](const std::vector<PairJudgment>& row) {
        return std::any_of(row.begin(), row.end(), [](const PairJudgment& cell) {
            return cell.ok() && cell.judgment->value == Label::entailment;
        });
    };
    return {has_entailment(matrix.image_judgments[claim_index]),
            has_entailment(matrix.text_judgments[claim_index])};
}

std::set<std::string> mark_used(const JudgmentMatrix& matrix) {
    std::set<std::string> used;
    auto scan = [&](const std::vector<std::string>& ids,
                    const std::vector<std::vector<PairJudgment>>& cells) {
        for (std::size_t col = 0; col < ids.size(); ++col) {
            for (std::size_t row = 0; row < matrix.claims.size(); ++row) {
                const PairJudgment& cell = cells[row][col];
                if (cell.ok() && cell.judgment->value == Label::entailment) {
                    used.insert(ids[col]);
                    break;
                }
            }
        }
    };
    scan(matrix.image_ids, matrix.image_judgments);
    scan(matrix.text_ids, matrix.text_judgments);
    return used;
}

GoldMatchOutcome match_gold_claims(const std::string& gold_long_answer,
                                   const std::string& generated_long_answer,
                                   judges::JudgeClient& client,
                                   const judges::PromptConfig& prompt) {
    GoldMatchOutcome outcome;
    auto extraction = client.extract_claims(gold_long_answer);
    for (const auto& gold_claim : extraction.claims) {
        GoldClaimMatch match;
        match.claim = gold_claim;
        if (text::trim(generated_long_answer).empty()) {
            match.matched = false;
        } else {
            auto judged = client.judge_entailment_text(gold_claim, generated_long_answer, prompt);
            if (!judged.ok()) {
                ++outcome.error_count;
                match.matched = false;
            } else {
                match.matched = judged.value->value == Label::entailment;
            }
        }
        outcome.matches.push_back(std::move(match));
    }
    return outcome;
}

CheckResult check_answer(const corpus::QueryRecord& record, const retrieval::EvidencePack& pack,
                         const GeneratedAnswer& generated, judges::JudgeClient& client,
                         const CheckOptions& options) {
    if (pack.record_id != record.record_id)
        throw Error("pack does not belong to record " + record.record_id);

    CheckResult result;
    result.record_id = record.record_id;
    result.mode = pack.mode;
    for (const auto& entry : pack.images)
        result.image_ids.push_back(entry.item.evidence_id);
    for (const auto& entry : pack.texts)
        result.text_ids.push_back(entry.item.evidence_id);
    result.gold_reference_present = !text::trim(record.long_answer).empty();

    // Stage 1: claim extraction.
    auto extraction = client.extract_claims(generated.long_answer);

    JudgmentMatrix matrix;
    matrix.claims = extraction.claims;
    matrix.image_ids = result.image_ids;
    matrix.text_ids = result.text_ids;
    matrix.image_judgments.resize(matrix.claims.size());
    matrix.text_judgments.resize(matrix.claims.size());

    // Stage 2: judge every (claim, evidence) pair. Pairs are independent;
    // ordering below is canonical whatever the completion order.
    std::size_t attempted_pairs = 0;
    std::vector<std::optional<judges::Judgment>> reference_judgments(matrix.claims.size());
    for (std::size_t i = 0; i < matrix.claims.size(); ++i) {
        for (const auto& entry : pack.images) {
            auto judged = client.judge_entailment(matrix.claims[i], entry.item,
                                                  options.judge_prompt);
            ++attempted_pairs;
            if (judged.ok()) {
                matrix.image_judgments[i].push_back({judged.value, ""});
            } else {
                matrix.image_judgments[i].push_back({std::nullopt, judged.error});
                ++result.judging_error_count;
            }
        }
        for (const auto& entry : pack.texts) {
            auto judged = client.judge_entailment(matrix.claims[i], entry.item,
                                                  options.judge_prompt);
            ++attempted_pairs;
            if (judged.ok()) {
                matrix.text_judgments[i].push_back({judged.value, ""});
            } else {
                matrix.text_judgments[i].push_back({std::nullopt, judged.error});
                ++result.judging_error_count;
            }
        }
        if (result.gold_reference_present) {
            auto judged = client.judge_entailment_text(matrix.claims[i], record.long_answer,
                                                       options.judge_prompt);
            if (judged.ok())
                reference_judgments[i] = judged.value;
            else
                ++result.judging_error_count;
        }
    }

    if (attempted_pairs > 0 &&
        result.judging_error_count >= static_cast<int>(attempted_pairs) &&
        std::all_of(matrix.image_judgments.begin(), matrix.image_judgments.end(),
                    [](const auto& row) {
                        return std::none_of(row.begin(), row.end(),
                                            [](const PairJudgment& c) { return c.ok(); });
                    }) &&
        std::all_of(matrix.text_judgments.begin(), matrix.text_judgments.end(),
                    [](const auto& row) {
                        return std::none_of(row.begin(), row.end(),
                                            [](const PairJudgment& c) { return c.ok(); });
                    })) {
        result.check_failed = true;
    }

    // Stage 3: aggregate labels, flags, used set.
    for (std::size_t i = 0; i < matrix.claims.size(); ++i) {
        ClaimVerdict verdict;
        verdict.claim = matrix.claims[i];

        std::vector<Label> image_labels, text_labels;
        for (const auto& cell : matrix.image_judgments[i])
            if (cell.ok())
                image_labels.push_back(cell.judgment->value);
        for (const auto& cell : matrix.text_judgments[i])
            if (cell.ok())
                text_labels.push_back(cell.judgment->value);

        bool ref_entailed_raw = reference_judgments[i].has_value() &&
                                reference_judgments[i]->value == Label::entailment;
        verdict.matches_reference = ref_entailed_raw;

        if (options.reference_channel && reference_judgments[i].has_value()) {
            // The reference acts as one extra judgment for the label only.
            text_labels.push_back(reference_judgments[i]->value);
            verdict.reference_entailed = ref_entailed_raw;
        }

        auto label = aggregate_label(image_labels, text_labels);
        if (!label) {
            verdict.unjudgeable = true;
            ++result.unjudgeable_claim_count;
        } else {
            verdict.label = *label;
        }

        auto [s_img, s_txt] = derive_flags(matrix, i);
        verdict.s_img = s_img;
        verdict.s_txt = s_txt;

        auto collect_entailing = [&](const std::vector<std::string>& ids,
                                     const std::vector<PairJudgment>& row) {
            for (std::size_t col = 0; col < ids.size(); ++col)
                if (row[col].ok() && row[col].judgment->value == Label::entailment)
                    verdict.entailing_evidence_ids.insert(ids[col]);
        };
        collect_entailing(matrix.image_ids, matrix.image_judgments[i]);
        collect_entailing(matrix.text_ids, matrix.text_judgments[i]);

        result.verdicts.push_back(std::move(verdict));
    }

    result.used_evidence_ids = mark_used(matrix);

    // Gold-claim matching plus per-gold-claim modality support flags.
    if (result.gold_reference_present) {
        auto gold = match_gold_claims(record.long_answer, generated.long_answer, client,
                                      options.judge_prompt);
        result.gold_matches = std::move(gold.matches);
        if (gold.error_count > 0) {
            result.gold_matching_failed = true;
            result.judging_error_count += gold.error_count;
        }
        for (auto& match : result.gold_matches) {
            for (const auto& entry : pack.images) {
                auto judged = client.judge_entailment(match.claim, entry.item,
                                                      options.judge_prompt);
                if (!judged.ok()) {
                    result.gold_matching_failed = true;
                    ++result.judging_error_count;
                } else if (judged.value->value == Label::entailment) {
                    match.s_img = true;
                }
            }
            for (const auto& entry : pack.texts) {
                auto judged = client.judge_entailment(match.claim, entry.item,
                                                      options.judge_prompt);
                if (!judged.ok()) {
                    result.gold_matching_failed = true;
                    ++result.judging_error_count;
                } else if (judged.value->value == Label::entailment) {
                    match.s_txt = true;
                }
            }
        }
    }

    return result;
}

json CheckResult::to_json() const {
    json obj;
    obj["schema_version"] = kCheckResultSchemaVersion;
    obj["record_id"] = record_id;
    obj["mode"] = retrieval::mode_token(mode);
    json claims = json::array();
    for (const auto& v : verdicts) {
        json c;
        c["claim"] = v.claim;
        c["label"] = judges::label_token(v.label);
        c["unjudgeable"] = v.unjudgeable;
        c["s_img"] = v.s_img;
        c["s_txt"] = v.s_txt;
        c["reference_entailed"] = v.reference_entailed;
        c["matches_reference"] = v.matches_reference;
        c["entailing_evidence_ids"] =
            std::vector<std::string>(v.entailing_evidence_ids.begin(),
                                     v.entailing_evidence_ids.end());
        claims.push_back(std::move(c));
    }
    obj["claims"] = std::move(claims);
    obj["image_ids"] = image_ids;
    obj["text_ids"] = text_ids;
    obj["used_evidence_ids"] =
        std::vector<std::string>(used_evidence_ids.begin(), used_evidence_ids.end());
    json gold = json::array();
    for (const auto& g : gold_matches) {
        json m;
        m["claim"] = g.claim;
        m["matched"] = g.matched;
        m["s_img"] = g.s_img;
        m["s_txt"] = g.s_txt;
        gold.push_back(std::move(m));
    }
    obj["gold_matches"] = std::move(gold);
    obj["gold_reference_present"] = gold_reference_present;
    obj["gold_matching_failed"] = gold_matching_failed;
    obj["judging_error_count"] = judging_error_count;
    obj["unjudgeable_claim_count"] = unjudgeable_claim_count;
    obj["check_failed"] = check_failed;
    return obj;
}

CheckResult CheckResult::from_json(const json& obj) {
    CheckResult result;
    result.record_id = obj.at("record_id").get<std::string>();
    result.mode = retrieval::parse_mode(obj.at("mode").get<std::string>());
    for (const auto& c : obj.at("claims")) {
        ClaimVerdict v;
        v.claim = c.at("claim").get<std::string>();
        v.label = judges::parse_label(c.at("label").get<std::string>());
        v.unjudgeable = c.value("unjudgeable", false);
        v.s_img = c.value("s_img", false);
        v.s_txt = c.value("s_txt", false);
        v.reference_entailed = c.value("reference_entailed", false);
        v.matches_reference = c.value("matches_reference", false);
        if (c.contains("entailing_evidence_ids"))
            for (const auto& id : c.at("entailing_evidence_ids"))
                v.entailing_evidence_ids.insert(id.get<std::string>());
        result.verdicts.push_back(std::move(v));
    }
    result.image_ids = obj.value("image_ids", std::vector<std::string>{});
    result.text_ids = obj.value("text_ids", std::vector<std::string>{});
    if (obj.contains("used_evidence_ids"))
        for (const auto& id : obj.at("used_evidence_ids"))
            result.used_evidence_ids.insert(id.get<std::string>());
    if (obj.contains("gold_matches")) {
        for (const auto& m : obj.at("gold_matches")) {
            GoldClaimMatch g;
            g.claim = m.at("claim").get<std::string>();
            g.matched = m.value("matched", false);
            g.s_img = m.value("s_img", false);
            g.s_txt = m.value("s_txt", false);
            result.gold_matches.push_back(std::move(g));
        }
    }
    result.gold_reference_present = obj.value("gold_reference_present", false);
    result.gold_matching_failed = obj.value("gold_matching_failed", false);
    result.judging_error_count = obj.value("judging_error_count", 0);
    result.unjudgeable_claim_count = obj.value("unjudgeable_claim_count", 0);
    result.check_failed = obj.value("check_failed", false);
    return result;
}

} // namespace claimcheck::checker
