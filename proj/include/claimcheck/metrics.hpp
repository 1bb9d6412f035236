// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#pragma once

#include "claimcheck/checker.hpp"

#include <optional>
#include <string>
#include <vector>

namespace claimcheck::metrics {

/// Undefined metrics stay undefined (nullopt) through every aggregation;
/// they are never coerced to 0.
using Metric = std::optional<double>;

struct CoreMetrics {
    Metric hallucination_rate; // #Neutral / |C|
    Metric faithfulness;       // #Entailment / |C|
    Metric contradiction_rate; // #Contradiction / |C|
    Metric claim_recall;       // matched gold / |G|, undefined when |G| = 0
    Metric context_precision;  // |E_used| / |E|
    Metric self_knowledge;     // entailed claims with no evidence support / entailed
    std::size_t claim_count = 0; // judged claims (unjudgeable excluded)
    std::size_t gold_claim_count = 0;
    std::size_t unjudgeable_claim_count = 0;
};

CoreMetrics core_metrics(const checker::CheckResult& result);

struct RecordCrossMetrics {
    Metric cr_img, cr_txt, delta_cr;
    Metric cp_img, cp_txt, delta_cp;
    Metric vis_hit_at_k, txt_miss_rate;
    Metric cma, v_hr, d_hr;
};

/// Per-record cross-modality values. Denominators for the coverage rates are
/// the record's actual retrieved counts per modality.
RecordCrossMetrics cross_modality_record(const checker::CheckResult& result);

struct CrossModalityReport {
    Metric delta_cr, delta_cp;
    Metric vis_hit_at_k, txt_miss_rate;
    Metric cma, v_hr, d_hr;
    Metric cr_img, cr_txt, cp_img, cp_txt;
    std::size_t record_count = 0;
};

/// Macro-average of per-record values, undefined excluded; batch deltas are
/// differences of the batch means so delta_cr == cr_img - cr_txt holds by
/// construction. Throws if any record exceeds the shared caps.
CrossModalityReport cross_modality_metrics(const std::vector<checker::CheckResult>& results,
                                           const retrieval::Caps& caps);

/// Normalized string equality: lowercase, strip punctuation, collapse
/// whitespace, drop leading articles. No numeric coercion.
int exact_match(const std::string& predicted, const std::string& gold);

/// Containment accuracy: normalized gold appears inside the normalized
/// prediction. Used for datasets where strict EM is unavailable.
int containment_match(const std::string& predicted, const std::string& gold);

/// ROUGE-L F-measure over whitespace tokens; 0 when either side is empty.
double rouge_l(const std::string& predicted, const std::string& reference);

struct PrfSet {
    Metric recall, precision, f1;
};

struct PerModalityPrf {
    PrfSet img, txt;
};

/// Reconstructed Table-3 style P/R/F1. recall_m = gold claims with flag s_m
/// over |G|; precision_m = answer claims with flag s_m matching the reference
/// over answer claims with flag s_m; F1 harmonic (0 when P = R = 0).
PerModalityPrf per_modality_prf_record(const checker::CheckResult& result);

/// Macro-average across records.
PerModalityPrf per_modality_prf(const std::vector<checker::CheckResult>& results);

/// Mean over defined values only.
class MeanAccumulator {
public:
    void add(const Metric& value) {
        if (value) {
            sum_ += *value;
            ++count_;
        }
    }
    Metric mean() const {
        if (count_ == 0)
            return std::nullopt;
        return sum_ / static_cast<double>(count_);
    }
    std::size_t defined_count() const { return count_; }

private:
    double sum_ = 0.0;
    std::size_t count_ = 0;
};

} // namespace claimcheck::metrics
