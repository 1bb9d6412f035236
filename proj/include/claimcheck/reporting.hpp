// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#pragma once

#include "claimcheck/checker.hpp"
#include "claimcheck/metrics.hpp"

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace claimcheck::reporting {

using metrics::Metric;

struct RunManifest {
    std::string config_hash;
    std::string corpus_hash;
    std::string embedding_hash;
    std::string cache_hash;
    std::vector<std::string> backend_kinds;
    std::string tool_version;
    std::string timestamp; // manifests live outside the deterministic report tree

    nlohmann::json to_json() const;
};

struct CellKey {
    std::string dataset; // display name
    std::string model;
    std::string split;  // "filtered" | "full" | subset tag
    std::string mode;   // "GO" | "GPD" | "DO"
    std::string prompt; // nickname

    auto operator<=>(const CellKey&) const = default;
};

/// Everything displayed traces back to these raw fractions.
struct CellMetrics {
    Metric em, rouge_l;
    Metric hallucination, faithfulness, contradiction;
    Metric claim_recall, context_precision, self_knowledge;
    Metric delta_cr, delta_cp, vis_hit_at_k, txt_miss_rate, cma, v_hr, d_hr;
    Metric cr_img, cr_txt, cp_img, cp_txt;
    Metric recall_img, recall_txt, precision_img, precision_txt, f1_img, f1_txt;
    std::size_t record_count = 0;
    std::size_t em_excluded = 0;        // generation_error records
    std::size_t judging_errors = 0;     // judged pairs that errored
    std::size_t unjudgeable_claims = 0; // claims excluded from denominators
    std::size_t check_failed = 0;       // records aborted by total judge outage
};

struct ReportCell {
    CellKey key;
    CellMetrics metrics;

    nlohmann::json to_json() const;
    static ReportCell from_json(const nlohmann::json& obj);
};

/// One record's contribution to a cell.
struct RecordEvaluation {
    CellKey key;
    checker::CheckResult check;
    std::optional<int> em;       // absent on generation_error
    std::optional<double> rouge; // absent on generation_error
    bool generation_error = false;
};

/// Macro-averages per cell; deterministic cell order (dataset, model, split,
/// mode, prompt). Undefined metrics are excluded from means.
std::vector<ReportCell> aggregate_runs(const std::vector<RecordEvaluation>& evaluations);

struct DeltaRow {
    CellKey key; // the matched (dataset, model, mode, prompt); split reflects the pairing
    Metric d_em, d_hallucination, d_claim_recall, d_context_precision;
};

/// Row-wise ambiguous-minus-clear differences; cells are matched on
/// (dataset, model, mode, prompt). Throws when a counterpart is missing.
std::vector<DeltaRow> ambiguity_delta_report(const std::vector<ReportCell>& ambiguous_cells,
                                             const std::vector<ReportCell>& clear_cells);

enum class ReportFormat { csv, markdown, jsonl };

/// Writes report.{csv,md,jsonl} into out_dir; percentages rendered with one
/// decimal, raw fractions preserved in the machine format, undefined values
/// rendered as em-dash (null in jsonl).
std::vector<std::filesystem::path> emit_report(const std::vector<ReportCell>& cells,
                                               const std::set<ReportFormat>& formats,
                                               const std::filesystem::path& out_dir,
                                               const std::string& basename = "report");

std::vector<std::filesystem::path> emit_delta_report(const std::vector<DeltaRow>& rows,
                                                     const std::set<ReportFormat>& formats,
                                                     const std::filesystem::path& out_dir,
                                                     const std::string& basename =
                                                         "ambiguity_delta");

/// Machine-format round trip.
std::vector<ReportCell> read_report_jsonl(const std::filesystem::path& file);

/// "0.224" -> "22.4"; used anywhere a percentage is displayed.
std::string render_percent(double fraction);
/// Signed percent-scale delta at one decimal ("-5.9", "+9.5").
std::string render_delta_percent(double fraction_delta);
/// Undefined -> em-dash.
std::string render_metric(const Metric& value);
std::string render_delta(const Metric& value);

} // namespace claimcheck::reporting
