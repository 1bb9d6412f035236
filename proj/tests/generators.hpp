// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#pragma once

#include "claimcheck/checker.hpp"

#include <random>
#include <string>

namespace generators {

using claimcheck::checker::CheckResult;
using claimcheck::checker::ClaimVerdict;
using claimcheck::checker::GoldClaimMatch;
using claimcheck::judges::Label;

struct GeneratorOptions {
    std::size_t max_claims = 10;
    std::size_t max_images = 3;
    std::size_t max_texts = 3;
    std::size_t max_gold = 5;
    /// When true, labels/flags honor the single-pass precedence rule
    /// (s_img|s_txt => Entailment). When false, combinations are arbitrary,
    /// exercising the metric formulas on imported-verdict shapes.
    bool rule_consistent = false;
    bool with_reference = true;
};

/// Random CheckResult as the metric layer sees it: labels, flags, used set,
/// gold matches. Content-free claims (the metrics never look at text).
inline CheckResult random_check_result(std::mt19937_64& rng, const GeneratorOptions& opt,
                                       std::size_t tag) {
    std::uniform_int_distribution<std::size_t> claim_count(0, opt.max_claims);
    std::uniform_int_distribution<std::size_t> image_count(0, opt.max_images);
    std::uniform_int_distribution<std::size_t> text_count(0, opt.max_texts);
    std::uniform_int_distribution<std::size_t> gold_count(0, opt.max_gold);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> label_pick(0, 2);

    CheckResult r;
    r.record_id = "fuzz" + std::to_string(tag);
    r.mode = claimcheck::retrieval::RetrievalMode::gt_plus_distractors;
    std::size_t n_img = image_count(rng);
    std::size_t n_txt = text_count(rng);
    for (std::size_t i = 0; i < n_img; ++i)
        r.image_ids.push_back("I" + std::to_string(tag) + "_" + std::to_string(i));
    for (std::size_t i = 0; i < n_txt; ++i)
        r.text_ids.push_back("T" + std::to_string(tag) + "_" + std::to_string(i));

    std::size_t n_claims = claim_count(rng);
    for (std::size_t i = 0; i < n_claims; ++i) {
        ClaimVerdict v;
        v.claim = "claim " + std::to_string(i);
        if (opt.rule_consistent) {
            v.s_img = n_img > 0 && coin(rng) == 1;
            v.s_txt = n_txt > 0 && coin(rng) == 1;
            if (v.s_img || v.s_txt)
                v.label = Label::entailment;
            else
                v.label = coin(rng) == 1 ? Label::neutral : Label::contradiction;
            v.reference_entailed = false;
        } else {
            v.label = static_cast<Label>(label_pick(rng));
            v.s_img = n_img > 0 && coin(rng) == 1;
            v.s_txt = n_txt > 0 && coin(rng) == 1;
            v.reference_entailed = coin(rng) == 1;
        }
        v.matches_reference = coin(rng) == 1;
        v.unjudgeable = false;
        for (std::size_t k = 0; k < n_img && v.s_img; ++k)
            if (coin(rng) == 1)
                v.entailing_evidence_ids.insert(r.image_ids[k]);
        r.verdicts.push_back(std::move(v));
    }

    // used set: make it consistent with flags where possible, plus noise
    for (const auto& v : r.verdicts) {
        if (v.s_img && !r.image_ids.empty())
            r.used_evidence_ids.insert(r.image_ids[rng() % r.image_ids.size()]);
        if (v.s_txt && !r.text_ids.empty())
            r.used_evidence_ids.insert(r.text_ids[rng() % r.text_ids.size()]);
    }

    r.gold_reference_present = opt.with_reference && coin(rng) == 1;
    if (r.gold_reference_present) {
        std::size_t n_gold = gold_count(rng);
        for (std::size_t i = 0; i < n_gold; ++i) {
            GoldClaimMatch g;
            g.claim = "gold " + std::to_string(i);
            g.matched = coin(rng) == 1;
            g.s_img = n_img > 0 && coin(rng) == 1;
            g.s_txt = n_txt > 0 && coin(rng) == 1;
            r.gold_matches.push_back(std::move(g));
        }
    }
    return r;
}

} // namespace generators
