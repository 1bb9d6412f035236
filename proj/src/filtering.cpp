// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#include "claimcheck/filtering.hpp"

#include "claimcheck/error.hpp"
#include "claimcheck/jsonl.hpp"
#include "claimcheck/metrics.hpp"
#include "claimcheck/parallel.hpp"
#include "claimcheck/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace claimcheck::filtering {

void FilterConfig::validate() const {
    if (!(confidence_threshold > 0.0) || confidence_threshold > 1.0)
        throw Error("confidence_threshold must be in (0, 1]");
    if (drop_fraction < 0.0 || drop_fraction >= 1.0)
        throw Error("drop_fraction must be in [0, 1)");
    double sum = w_multi_hop + w_modality_dependency + w_baseline_success;
    if (std::abs(sum - 1.0) > 1e-9)
        throw Error("difficulty weights must sum to 1");
    if (w_multi_hop < 0.0 || w_modality_dependency < 0.0 || w_baseline_success < 0.0)
        throw Error("difficulty weights must be non-negative");
}

StageOnePartition retrieval_independent_filter(const std::vector<corpus::QueryRecord>& records,
                                               judges::JudgeClient& client,
                                               const FilterConfig& config) {
    config.validate();

    enum class Outcome { kept, verbatim, closed_book, probe_error };
    std::vector<Outcome> outcomes(records.size(), Outcome::kept);

    // probes run concurrently (bounded by the backend's own in-flight cap);
    // the partition below is assembled in input order
    parallel_for(records.size(), default_worker_count(), [&](std::size_t i) {
        const auto& record = records[i];
        std::string norm_q = text::normalize_for_match(record.question);
        std::string norm_a = text::normalize_for_match(record.short_answer);
        if (!norm_a.empty() && text::contains(norm_q, norm_a)) {
            outcomes[i] = Outcome::verbatim;
            return;
        }
        auto probe = client.closed_book_probe(record.question);
        if (!probe.ok()) {
            outcomes[i] = Outcome::probe_error; // treated as not-solved
            return;
        }
        if (probe.value->confidence > config.confidence_threshold &&
            metrics::exact_match(probe.value->answer, record.short_answer) == 1)
            outcomes[i] = Outcome::closed_book;
    });

    StageOnePartition partition;
    for (std::size_t i = 0; i < records.size(); ++i) {
        switch (outcomes[i]) {
        case Outcome::verbatim:
            partition.dropped.push_back({records[i].record_id, "verbatim_in_question"});
            break;
        case Outcome::closed_book:
            partition.dropped.push_back({records[i].record_id, "closed_book"});
            break;
        case Outcome::probe_error:
            ++partition.probe_error_count;
            partition.kept.push_back(records[i]);
            break;
        case Outcome::kept:
            partition.kept.push_back(records[i]);
            break;
        }
    }
    return partition;
}

DifficultyOutcome difficulty_filter(const std::vector<corpus::QueryRecord>& records,
                                    const SignalMap& signals, const FilterConfig& config) {
    config.validate();
    DifficultyOutcome outcome;

    struct Ranked {
        const corpus::QueryRecord* record;
        double easiness;
    };
    std::map<corpus::DatasetId, std::vector<Ranked>> ranked_by_dataset;
    std::map<corpus::DatasetId, std::size_t> totals;

    for (const auto& record : records) {
        ++totals[record.dataset_id];
        auto it = signals.find(record.record_id);
        if (it == signals.end()) {
            outcome.warnings.push_back("missing difficulty signals for " + record.record_id);
            corpus::QueryRecord kept = record;
            kept.in_filtered_split = true;
            outcome.kept.push_back(std::move(kept));
            continue;
        }
        const auto& s = it->second;
        double easiness = config.w_baseline_success * s.baseline_success_rate +
                          config.w_multi_hop * (s.multi_hop ? 0.0 : 1.0) +
                          config.w_modality_dependency * (s.modality_dependency ? 0.0 : 1.0);
        ranked_by_dataset[record.dataset_id].push_back({&record, easiness});
    }

    for (auto& [dataset, ranked] : ranked_by_dataset) {
        // Easiest first; ties broken by ascending record_id.
        std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
            if (a.easiness != b.easiness)
                return a.easiness > b.easiness;
            return a.record->record_id < b.record->record_id;
        });
        std::size_t drop_n = static_cast<std::size_t>(
            std::floor(config.drop_fraction * static_cast<double>(totals[dataset])));
        drop_n = std::min(drop_n, ranked.size());
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            if (i < drop_n) {
                outcome.dropped.push_back({ranked[i].record->record_id, "easiest_decile"});
            } else {
                corpus::QueryRecord kept = *ranked[i].record;
                kept.in_filtered_split = true;
                outcome.kept.push_back(std::move(kept));
            }
        }
    }

    // Canonical output order regardless of ranking order.
    std::sort(outcome.kept.begin(), outcome.kept.end(),
              [](const corpus::QueryRecord& a, const corpus::QueryRecord& b) {
                  return a.record_id < b.record_id;
              });
    std::sort(outcome.dropped.begin(), outcome.dropped.end(),
              [](const DropEntry& a, const DropEntry& b) { return a.record_id < b.record_id; });
    return outcome;
}

double cohen_kappa(const std::vector<std::string>& labels_a,
                   const std::vector<std::string>& labels_b) {
    if (labels_a.size() != labels_b.size())
        throw Error("cohen_kappa: label lists differ in length");
    if (labels_a.empty())
        throw Error("cohen_kappa: empty label lists");

    const double n = static_cast<double>(labels_a.size());
    std::map<std::string, double> marginal_a, marginal_b;
    double agreement = 0.0;
    for (std::size_t i = 0; i < labels_a.size(); ++i) {
        marginal_a[labels_a[i]] += 1.0;
        marginal_b[labels_b[i]] += 1.0;
        if (labels_a[i] == labels_b[i])
            agreement += 1.0;
    }
    double p_o = agreement / n;
    double p_e = 0.0;
    for (const auto& [label, count_a] : marginal_a) {
        auto it = marginal_b.find(label);
        if (it != marginal_b.end())
            p_e += (count_a / n) * (it->second / n);
    }
    if (p_e == 1.0)
        return p_o == 1.0 ? 1.0 : 0.0; // p_e = 1 forces p_o = 1 for real data
    return (p_o - p_e) / (1.0 - p_e);
}

std::vector<AmbiguityRecord> load_adjudications(const std::filesystem::path& file) {
    std::vector<AmbiguityRecord> out;
    jsonl::for_each(file, [&](std::size_t line, const nlohmann::json& obj) {
        AmbiguityRecord rec;
        rec.record_id = obj.value("record_id", "");
        if (rec.record_id.empty())
            throw Error(file.string() + ":" + std::to_string(line) + ": record_id missing");
        rec.prefilter_label = obj.value("prefilter_label", "");
        rec.prefilter_rationale = obj.value("prefilter_rationale", "");
        rec.annotator_a = obj.value("annotator_a", "");
        rec.annotator_b = obj.value("annotator_b", "");
        if (obj.contains("adjudicated") && obj.at("adjudicated").is_string()) {
            if (rec.annotator_a.empty() || rec.annotator_b.empty())
                throw Error(file.string() + ":" + std::to_string(line) +
                            ": adjudicated label without both annotator labels");
            rec.adjudicated = obj.at("adjudicated").get<std::string>();
        }
        out.push_back(std::move(rec));
    });
    return out;
}

AmbiguitySubset build_ambiguity_subset(const std::vector<corpus::QueryRecord>& records,
                                       const std::vector<AmbiguityRecord>& adjudications,
                                       std::size_t target_size, std::uint64_t clear_seed) {
    AmbiguitySubset subset;

    std::map<std::string, const corpus::QueryRecord*> by_id;
    for (const auto& r : records)
        by_id[r.record_id] = &r;

    std::vector<const AmbiguityRecord*> ambiguous, clear;
    for (const auto& adj : adjudications) {
        if (!adj.adjudicated)
            continue;
        if (*adj.adjudicated == "AMBIGUOUS")
            ambiguous.push_back(&adj);
        else if (*adj.adjudicated == "CLEAR")
            clear.push_back(&adj);
    }
    auto by_record_id = [](const AmbiguityRecord* a, const AmbiguityRecord* b) {
        return a->record_id < b->record_id;
    };
    std::sort(ambiguous.begin(), ambiguous.end(), by_record_id);
    std::sort(clear.begin(), clear.end(), by_record_id);

    if (ambiguous.size() < target_size)
        subset.accounting.warnings.push_back(
            "only " + std::to_string(ambiguous.size()) + " adjudicated AMBIGUOUS items for a " +
            std::to_string(target_size) + "-item subset");
    if (ambiguous.size() > target_size)
        ambiguous.resize(target_size);

    std::map<corpus::DatasetId, std::size_t> ambiguous_per_dataset;
    for (const AmbiguityRecord* adj : ambiguous) {
        auto it = by_id.find(adj->record_id);
        if (it == by_id.end()) {
            subset.accounting.warnings.push_back("adjudicated record not in corpus: " +
                                                 adj->record_id);
            continue;
        }
        const corpus::QueryRecord& record = *it->second;
        subset.ambiguous_ids.push_back(record.record_id);
        auto& src = subset.accounting.per_source[record.dataset_id];
        if (record.gold_image_ids.empty())
            ++src.text_only;
        else
            ++src.image_conditioned;
        ++ambiguous_per_dataset[record.dataset_id];
    }
    for (const auto& [dataset, acc] : subset.accounting.per_source) {
        subset.accounting.text_only_total += acc.text_only;
        subset.accounting.image_conditioned_total += acc.image_conditioned;
    }
    subset.accounting.final_total =
        subset.accounting.text_only_total + subset.accounting.image_conditioned_total;

    // Matched clear set: per dataset, a seeded uniform sample of the same
    // count (or as many as exist).
    std::map<corpus::DatasetId, std::vector<std::string>> clear_pool;
    for (const AmbiguityRecord* adj : clear) {
        auto it = by_id.find(adj->record_id);
        if (it != by_id.end())
            clear_pool[it->second->dataset_id].push_back(adj->record_id);
    }
    std::mt19937_64 rng(clear_seed);
    for (const auto& [dataset, want_count] : ambiguous_per_dataset) {
        auto pool_it = clear_pool.find(dataset);
        std::size_t available = pool_it == clear_pool.end() ? 0 : pool_it->second.size();
        std::size_t take = std::min(want_count, available);
        if (take < want_count)
            subset.accounting.warnings.push_back(
                "dataset " + corpus::dataset_token(dataset) + ": only " +
                std::to_string(available) + " adjudicated CLEAR items for a matched set of " +
                std::to_string(want_count));
        if (take == 0)
            continue;
        auto& pool = pool_it->second; // already sorted by record_id
        // modulo draws on mt19937_64 keep the sample reproducible across
        // standard library implementations
        for (std::size_t i = 0; i < take; ++i) {
            std::size_t j = i + static_cast<std::size_t>(rng() % (pool.size() - i));
            std::swap(pool[i], pool[j]);
        }
        for (std::size_t i = 0; i < take; ++i)
            subset.clear_ids.push_back(pool[i]);
    }
    std::sort(subset.clear_ids.begin(), subset.clear_ids.end());
    subset.accounting.clear_total = subset.clear_ids.size();
    return subset;
}

} // namespace claimcheck::filtering
