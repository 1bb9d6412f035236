// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

// Test-side oracles. Each one is an independent implementation of the rule it
// checks, written from the rule text, and must stay decoupled from the
// library code paths it verifies.

#pragma once

#include "claimcheck/checker.hpp"
#include "claimcheck/judges.hpp"
#include "claimcheck/metrics.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace oracles {

using claimcheck::judges::Label;

// --- Stage-3 precedence rule, literal reading -------------------------------
// (i) Entailment if any judgment is Entailment; (ii) else Contradiction if
// any judgment is Contradiction; (iii) else Neutral.
inline Label precedence_label(const std::vector<Label>& all_judgments) {
    for (Label l : all_judgments)
        if (l == Label::entailment)
            return Label::entailment;
    for (Label l : all_judgments)
        if (l == Label::contradiction)
            return Label::contradiction;
    return Label::neutral;
}

inline bool flag_of(const std::vector<Label>& side) {
    return std::find(side.begin(), side.end(), Label::entailment) != side.end();
}

// --- cosine ranking ----------------------------------------------------------
// Naive sequential dot products over every pair; sort by (score desc, id asc).
struct ScoredId {
    std::string id;
    double score;
};

inline std::vector<ScoredId> brute_force_top_k(const std::vector<std::string>& ids,
                                               const std::vector<std::vector<double>>& vectors,
                                               const std::vector<double>& query, std::size_t k,
                                               const std::set<std::string>& exclude) {
    std::vector<ScoredId> scored;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (exclude.count(ids[i]))
            continue;
        double dot = 0.0;
        for (std::size_t d = 0; d < query.size(); ++d)
            dot += vectors[i][d] * query[d];
        dot = std::clamp(dot, -1.0, 1.0);
        scored.push_back({ids[i], dot});
    }
    std::sort(scored.begin(), scored.end(), [](const ScoredId& a, const ScoredId& b) {
        if (a.score != b.score)
            return a.score > b.score;
        return a.id < b.id;
    });
    if (scored.size() > k)
        scored.resize(k);
    return scored;
}

// --- LCS / ROUGE-L ------------------------------------------------------------
// Recursive memoized LCS, structurally different from the iterative
// rolling-row implementation under test.
inline std::size_t lcs_memo(const std::vector<std::string>& a, const std::vector<std::string>& b,
                            std::size_t i, std::size_t j,
                            std::map<std::pair<std::size_t, std::size_t>, std::size_t>& memo) {
    if (i == 0 || j == 0)
        return 0;
    auto key = std::make_pair(i, j);
    auto it = memo.find(key);
    if (it != memo.end())
        return it->second;
    std::size_t value;
    if (a[i - 1] == b[j - 1])
        value = lcs_memo(a, b, i - 1, j - 1, memo) + 1;
    else
        value = std::max(lcs_memo(a, b, i - 1, j, memo), lcs_memo(a, b, i, j - 1, memo));
    memo[key] = value;
    return value;
}

inline double rouge_l_oracle(const std::vector<std::string>& pred,
                             const std::vector<std::string>& ref) {
    if (pred.empty() || ref.empty())
        return 0.0;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
    double lcs = static_cast<double>(lcs_memo(pred, ref, pred.size(), ref.size(), memo));
    if (lcs == 0.0)
        return 0.0;
    double p = lcs / static_cast<double>(pred.size());
    double r = lcs / static_cast<double>(ref.size());
    return 2.0 * p * r / (p + r);
}

// --- Cohen's kappa -------------------------------------------------------------
// Dense contingency-matrix computation over an explicit label alphabet.
inline double kappa_oracle(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::string> alphabet;
    for (const auto* side : {&a, &b})
        for (const auto& label : *side)
            if (std::find(alphabet.begin(), alphabet.end(), label) == alphabet.end())
                alphabet.push_back(label);
    std::sort(alphabet.begin(), alphabet.end());
    const std::size_t m = alphabet.size();
    auto index_of = [&](const std::string& label) {
        return static_cast<std::size_t>(
            std::find(alphabet.begin(), alphabet.end(), label) - alphabet.begin());
    };
    std::vector<std::vector<double>> table(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < a.size(); ++i)
        table[index_of(a[i])][index_of(b[i])] += 1.0;
    double n = static_cast<double>(a.size());
    double p_o = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        p_o += table[i][i] / n;
    double p_e = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double row = 0.0, col = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            row += table[i][j];
            col += table[j][i];
        }
        p_e += (row / n) * (col / n);
    }
    if (p_e == 1.0)
        return p_o == 1.0 ? 1.0 : 0.0;
    return (p_o - p_e) / (1.0 - p_e);
}

// --- metric recounts ------------------------------------------------------------
// Independent per-record recounts straight from the CheckResult fields.
struct CoreRecount {
    std::optional<double> hallucination, faithfulness, contradiction;
    std::optional<double> claim_recall, context_precision, self_knowledge;
};

inline CoreRecount core_recount(const claimcheck::checker::CheckResult& r) {
    CoreRecount out;
    double n = 0, neutral = 0, entailed = 0, contradicted = 0, self = 0;
    for (const auto& v : r.verdicts) {
        if (v.unjudgeable)
            continue;
        n += 1;
        if (v.label == Label::neutral)
            neutral += 1;
        if (v.label == Label::contradiction)
            contradicted += 1;
        if (v.label == Label::entailment) {
            entailed += 1;
            if (!v.s_img && !v.s_txt)
                self += 1;
        }
    }
    if (n > 0) {
        out.hallucination = neutral / n;
        out.faithfulness = entailed / n;
        out.contradiction = contradicted / n;
    }
    if (entailed > 0)
        out.self_knowledge = self / entailed;
    if (r.gold_reference_present && !r.gold_matching_failed && !r.gold_matches.empty()) {
        double matched = 0;
        for (const auto& g : r.gold_matches)
            if (g.matched)
                matched += 1;
        out.claim_recall = matched / static_cast<double>(r.gold_matches.size());
    }
    double total_evidence = static_cast<double>(r.image_ids.size() + r.text_ids.size());
    if (total_evidence > 0)
        out.context_precision = static_cast<double>(r.used_evidence_ids.size()) / total_evidence;
    return out;
}

struct CrossRecount {
    std::optional<double> cr_img, cr_txt, cp_img, cp_txt, vis_hit, txt_miss, cma, v_hr, d_hr;
};

inline CrossRecount cross_recount(const claimcheck::checker::CheckResult& r) {
    CrossRecount out;
    if (r.gold_reference_present && !r.gold_matching_failed && !r.gold_matches.empty()) {
        double g = static_cast<double>(r.gold_matches.size());
        double img = 0, txt = 0;
        for (const auto& gm : r.gold_matches) {
            if (gm.matched && gm.s_img)
                img += 1;
            if (gm.matched && gm.s_txt)
                txt += 1;
        }
        out.cr_img = img / g;
        out.cr_txt = txt / g;
    }
    if (!r.image_ids.empty()) {
        double used = 0;
        for (const auto& id : r.image_ids)
            if (r.used_evidence_ids.count(id))
                used += 1;
        out.cp_img = used / static_cast<double>(r.image_ids.size());
        out.vis_hit = out.cp_img;
    }
    if (!r.text_ids.empty()) {
        double used = 0;
        for (const auto& id : r.text_ids)
            if (r.used_evidence_ids.count(id))
                used += 1;
        out.cp_txt = used / static_cast<double>(r.text_ids.size());
        out.txt_miss = 1.0 - *out.cp_txt;
    }
    double either = 0, both = 0, neutral = 0, v_hr = 0, d_hr = 0;
    for (const auto& v : r.verdicts) {
        if (v.unjudgeable)
            continue;
        if (v.s_img || v.s_txt)
            either += 1;
        if (v.s_img && v.s_txt)
            both += 1;
        if (v.label == Label::neutral) {
            neutral += 1;
            if (v.s_img)
                v_hr += 1;
            if (v.s_txt)
                d_hr += 1;
        }
    }
    if (either > 0)
        out.cma = both / either;
    if (neutral > 0) {
        out.v_hr = v_hr / neutral;
        out.d_hr = d_hr / neutral;
    }
    return out;
}

struct PrfRecount {
    std::optional<double> recall_img, precision_img, f1_img;
    std::optional<double> recall_txt, precision_txt, f1_txt;
};

inline PrfRecount prf_recount(const claimcheck::checker::CheckResult& r) {
    PrfRecount out;
    auto side = [&](bool image, std::optional<double>& recall, std::optional<double>& precision,
                    std::optional<double>& f1) {
        if (r.gold_reference_present && !r.gold_matching_failed && !r.gold_matches.empty()) {
            double flagged = 0;
            for (const auto& g : r.gold_matches)
                if (image ? g.s_img : g.s_txt)
                    flagged += 1;
            recall = flagged / static_cast<double>(r.gold_matches.size());
        }
        if (r.gold_reference_present && !r.gold_matching_failed) {
            double flagged = 0, matching = 0;
            for (const auto& v : r.verdicts) {
                if (v.unjudgeable || !(image ? v.s_img : v.s_txt))
                    continue;
                flagged += 1;
                if (v.matches_reference)
                    matching += 1;
            }
            if (flagged > 0)
                precision = matching / flagged;
        }
        if (recall && precision)
            f1 = (*recall + *precision) > 0
                     ? 2.0 * *recall * *precision / (*recall + *precision)
                     : 0.0;
    };
    side(true, out.recall_img, out.precision_img, out.f1_img);
    side(false, out.recall_txt, out.precision_txt, out.f1_txt);
    return out;
}

// Column scan for used-evidence marking, independent of mark_used.
inline std::set<std::string>
used_columns_oracle(const std::vector<std::string>& ids,
                    const std::vector<std::vector<std::optional<Label>>>& columns_by_claim) {
    std::set<std::string> used;
    for (std::size_t col = 0; col < ids.size(); ++col)
        for (const auto& row : columns_by_claim)
            if (row[col].has_value() && *row[col] == Label::entailment)
                used.insert(ids[col]);
    return used;
}

} // namespace oracles
