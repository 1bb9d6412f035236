// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#pragma once

#include "claimcheck/corpus.hpp"
#include "claimcheck/judges.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace claimcheck::filtering {

struct FilterConfig {
    double confidence_threshold = 0.9;
    double drop_fraction = 0.10;
    // Weights over (multi_hop, modality_dependency, baseline_success); must sum to 1.
    double w_multi_hop = 0.25;
    double w_modality_dependency = 0.25;
    double w_baseline_success = 0.5;

    void validate() const;
};

struct DropEntry {
    std::string record_id;
    std::string reason; // "verbatim_in_question" | "closed_book" | easiness detail
};

struct StageOnePartition {
    std::vector<corpus::QueryRecord> kept;
    std::vector<DropEntry> dropped;
    int probe_error_count = 0; // probe errors keep the record
};

/// Stage 1: drop records whose normalized short answer appears in the
/// question, or that a closed-book probe solves with confidence above the
/// threshold and an EM-correct answer.
StageOnePartition retrieval_independent_filter(const std::vector<corpus::QueryRecord>& records,
                                               judges::JudgeClient& client,
                                               const FilterConfig& config);

struct DifficultySignals {
    bool multi_hop = false;
    bool modality_dependency = false;
    double baseline_success_rate = 0.0; // in [0, 1]
};

using SignalMap = std::map<std::string, DifficultySignals>; // keyed by record_id

struct DifficultyOutcome {
    std::vector<corpus::QueryRecord> kept; // carry the filtered flag
    std::vector<DropEntry> dropped;
    std::vector<std::string> warnings; // missing signals
};

/// Stage 2: easiness = w1*baseline + w2*(1 - multi_hop) + w3*(1 - modality
/// dependency); drops the floor(drop_fraction * n) easiest per dataset, ties
/// broken by ascending record_id. Kept records gain the filtered flag.
DifficultyOutcome difficulty_filter(const std::vector<corpus::QueryRecord>& records,
                                    const SignalMap& signals, const FilterConfig& config);

/// Unweighted Cohen's kappa; throws on length mismatch or empty input.
double cohen_kappa(const std::vector<std::string>& labels_a,
                   const std::vector<std::string>& labels_b);

struct AmbiguityRecord {
    std::string record_id;
    std::string prefilter_label; // "CLEAR" | "AMBIGUOUS"
    std::string prefilter_rationale;
    std::string annotator_a; // "CLEAR" | "AMBIGUOUS"
    std::string annotator_b;
    std::optional<std::string> adjudicated; // set only when both annotator labels present
};

std::vector<AmbiguityRecord> load_adjudications(const std::filesystem::path& file);

struct SourceAccounting {
    std::size_t text_only = 0;
    std::size_t image_conditioned = 0;
};

struct SubsetAccounting {
    std::map<corpus::DatasetId, SourceAccounting> per_source;
    std::size_t text_only_total = 0;
    std::size_t image_conditioned_total = 0;
    std::size_t final_total = 0;
    std::size_t clear_total = 0;
    std::vector<std::string> warnings;
};

struct AmbiguitySubset {
    std::vector<std::string> ambiguous_ids;
    std::vector<std::string> clear_ids; // matched clear set, seeded sample
    SubsetAccounting accounting;
};

/// Final set = adjudicated-AMBIGUOUS records (record_id order) up to
/// target_size; the matched clear set is sampled uniformly (seeded) from
/// adjudicated-CLEAR records of the same datasets, matched per dataset.
/// A record counts as image-conditioned when it has gold image evidence.
AmbiguitySubset build_ambiguity_subset(const std::vector<corpus::QueryRecord>& records,
                                       const std::vector<AmbiguityRecord>& adjudications,
                                       std::size_t target_size, std::uint64_t clear_seed);

} // namespace claimcheck::filtering
