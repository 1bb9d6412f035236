// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#include "claimcheck/metrics.hpp"

#include "claimcheck/error.hpp"
#include "claimcheck/text.hpp"

#include <algorithm>

namespace claimcheck::metrics {

using checker::CheckResult;
using judges::Label;

namespace {

Metric ratio(std::size_t numerator, std::size_t denominator) {
    if (denominator == 0)
        return std::nullopt;
    return static_cast<double>(numerator) / static_cast<double>(denominator);
}

Metric difference(const Metric& a, const Metric& b) {
    if (!a || !b)
        return std::nullopt;
    return *a - *b;
}

bool cr_defined(const CheckResult& r) {
    return r.gold_reference_present && !r.gold_matching_failed && !r.gold_matches.empty();
}

} // namespace

CoreMetrics core_metrics(const CheckResult& result) {
    CoreMetrics m;
    std::size_t neutral = 0, entailed = 0, contradicted = 0;
    std::size_t self_supported = 0;
    for (const auto& v : result.verdicts) {
        if (v.unjudgeable) {
            ++m.unjudgeable_claim_count;
            continue;
        }
        ++m.claim_count;
        switch (v.label) {
        case Label::neutral: ++neutral; break;
        case Label::contradiction: ++contradicted; break;
        case Label::entailment:
            ++entailed;
            if (!v.s_img && !v.s_txt)
                ++self_supported; // entailed with no retrieved support
            break;
        }
    }
    m.hallucination_rate = ratio(neutral, m.claim_count);
    m.faithfulness = ratio(entailed, m.claim_count);
    m.contradiction_rate = ratio(contradicted, m.claim_count);
    m.self_knowledge = ratio(self_supported, entailed);

    m.gold_claim_count = result.gold_matches.size();
    if (cr_defined(result)) {
        std::size_t matched = static_cast<std::size_t>(
            std::count_if(result.gold_matches.begin(), result.gold_matches.end(),
                          [](const auto& g) { return g.matched; }));
        m.claim_recall = ratio(matched, result.gold_matches.size());
    }

    std::size_t evidence_total = result.image_ids.size() + result.text_ids.size();
    m.context_precision = ratio(result.used_evidence_ids.size(), evidence_total);
    return m;
}

RecordCrossMetrics cross_modality_record(const CheckResult& result) {
    RecordCrossMetrics m;

    if (cr_defined(result)) {
        std::size_t img_hits = 0, txt_hits = 0;
        for (const auto& g : result.gold_matches) {
            if (g.matched && g.s_img)
                ++img_hits;
            if (g.matched && g.s_txt)
                ++txt_hits;
        }
        m.cr_img = ratio(img_hits, result.gold_matches.size());
        m.cr_txt = ratio(txt_hits, result.gold_matches.size());
        m.delta_cr = difference(m.cr_img, m.cr_txt);
    }

    std::size_t used_images = 0, used_texts = 0;
    for (const auto& id : result.image_ids)
        if (result.used_evidence_ids.count(id))
            ++used_images;
    for (const auto& id : result.text_ids)
        if (result.used_evidence_ids.count(id))
            ++used_texts;
    m.cp_img = ratio(used_images, result.image_ids.size());
    m.cp_txt = ratio(used_texts, result.text_ids.size());
    m.delta_cp = difference(m.cp_img, m.cp_txt);
    m.vis_hit_at_k = m.cp_img;
    if (m.cp_txt)
        m.txt_miss_rate = 1.0 - *m.cp_txt;

    std::size_t both = 0, either = 0, neutral = 0, neutral_img = 0, neutral_txt = 0;
    for (const auto& v : result.verdicts) {
        if (v.unjudgeable)
            continue;
        if (v.s_img || v.s_txt)
            ++either;
        if (v.s_img && v.s_txt)
            ++both;
        if (v.label == Label::neutral) {
            ++neutral;
            if (v.s_img)
                ++neutral_img;
            if (v.s_txt)
                ++neutral_txt;
        }
    }
    m.cma = ratio(both, either);
    m.v_hr = ratio(neutral_img, neutral);
    m.d_hr = ratio(neutral_txt, neutral);
    return m;
}

CrossModalityReport cross_modality_metrics(const std::vector<CheckResult>& results,
                                           const retrieval::Caps& caps) {
    if (results.empty())
        throw Error("cross_modality_metrics: empty result list");
    for (const auto& r : results) {
        if (r.image_ids.size() > caps.k_img || r.text_ids.size() > caps.k_txt)
            throw Error("record " + r.record_id + " exceeds shared caps");
    }

    MeanAccumulator cr_img, cr_txt, cp_img, cp_txt, vis_hit, txt_miss, cma, v_hr, d_hr;
    for (const auto& r : results) {
        auto m = cross_modality_record(r);
        cr_img.add(m.cr_img);
        cr_txt.add(m.cr_txt);
        cp_img.add(m.cp_img);
        cp_txt.add(m.cp_txt);
        vis_hit.add(m.vis_hit_at_k);
        txt_miss.add(m.txt_miss_rate);
        cma.add(m.cma);
        v_hr.add(m.v_hr);
        d_hr.add(m.d_hr);
    }
    CrossModalityReport report;
    report.record_count = results.size();
    report.cr_img = cr_img.mean();
    report.cr_txt = cr_txt.mean();
    report.cp_img = cp_img.mean();
    report.cp_txt = cp_txt.mean();
    report.delta_cr = difference(report.cr_img, report.cr_txt);
    report.delta_cp = difference(report.cp_img, report.cp_txt);
    report.vis_hit_at_k = vis_hit.mean();
    report.txt_miss_rate = txt_miss.mean();
    report.cma = cma.mean();
    report.v_hr = v_hr.mean();
    report.d_hr = d_hr.mean();
    return report;
}

int exact_match(const std::string& predicted, const std::string& gold) {
    return text::normalize_answer(predicted) == text::normalize_answer(gold) ? 1 : 0;
}

int containment_match(const std::string& predicted, const std::string& gold) {
    std::string p = text::normalize_answer(predicted);
    std::string g = text::normalize_answer(gold);
    if (g.empty())
        return 0;
    return text::contains(p, g) ? 1 : 0;
}

double rouge_l(const std::string& predicted, const std::string& reference) {
    auto pred = text::tokenize(predicted);
    auto ref = text::tokenize(reference);
    if (pred.empty() || ref.empty())
        return 0.0;

    // LCS with two rolling rows.
    std::vector<std::size_t> prev(pred.size() + 1, 0), curr(pred.size() + 1, 0);
    for (std::size_t i = 1; i <= ref.size(); ++i) {
        for (std::size_t j = 1; j <= pred.size(); ++j) {
            if (ref[i - 1] == pred[j - 1])
                curr[j] = prev[j - 1] + 1;
            else
                curr[j] = std::max(prev[j], curr[j - 1]);
        }
        std::swap(prev, curr);
    }
    double lcs = static_cast<double>(prev[pred.size()]);
    if (lcs == 0.0)
        return 0.0;
    double precision = lcs / static_cast<double>(pred.size());
    double recall = lcs / static_cast<double>(ref.size());
    return 2.0 * precision * recall / (precision + recall);
}

PerModalityPrf per_modality_prf_record(const CheckResult& result) {
    PerModalityPrf out;

    auto fill = [&](bool image_side, PrfSet& set) {
        auto gold_flag = [&](const checker::GoldClaimMatch& g) {
            return image_side ? g.s_img : g.s_txt;
        };
        auto claim_flag = [&](const checker::ClaimVerdict& v) {
            return image_side ? v.s_img : v.s_txt;
        };

        if (cr_defined(result)) {
            std::size_t supported = static_cast<std::size_t>(std::count_if(
                result.gold_matches.begin(), result.gold_matches.end(), gold_flag));
            set.recall = ratio(supported, result.gold_matches.size());
        }

        if (result.gold_reference_present && !result.gold_matching_failed) {
            std::size_t flagged = 0, flagged_matching = 0;
            for (const auto& v : result.verdicts) {
                if (v.unjudgeable || !claim_flag(v))
                    continue;
                ++flagged;
                if (v.matches_reference)
                    ++flagged_matching;
            }
            set.precision = ratio(flagged_matching, flagged);
        }

        if (set.recall && set.precision) {
            double p = *set.precision, r = *set.recall;
            set.f1 = (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
        }
    };
    fill(true, out.img);
    fill(false, out.txt);
    return out;
}

PerModalityPrf per_modality_prf(const std::vector<CheckResult>& results) {
    MeanAccumulator r_img, p_img, f_img, r_txt, p_txt, f_txt;
    for (const auto& result : results) {
        auto m = per_modality_prf_record(result);
        r_img.add(m.img.recall);
        p_img.add(m.img.precision);
        f_img.add(m.img.f1);
        r_txt.add(m.txt.recall);
        p_txt.add(m.txt.precision);
        f_txt.add(m.txt.f1);
    }
    PerModalityPrf out;
    out.img = {r_img.mean(), p_img.mean(), f_img.mean()};
    out.txt = {r_txt.mean(), p_txt.mean(), f_txt.mean()};
    return out;
}

} // namespace claimcheck::metrics
