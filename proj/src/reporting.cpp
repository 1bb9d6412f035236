// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#include "claimcheck/reporting.hpp"

#include "claimcheck/error.hpp"
#include "claimcheck/jsonl.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace claimcheck::reporting {

using nlohmann::json;

namespace {

constexpr int kReportSchemaVersion = 1;

const std::vector<std::string>& footnotes() {
    static const std::vector<std::string> notes = {
        "EM normalization: lowercase, strip punctuation, collapse whitespace, drop leading "
        "articles (a/an/the); no numeric coercion.",
        "Token and length counts use whitespace splitting.",
        "Cells are macro-averages over records; undefined values are excluded from means and "
        "rendered as an em dash.",
        "Per-modality recall/precision/F1 columns are reconstructed definitions.",
        "All rates are stored as raw fractions in the machine format and rendered as "
        "one-decimal percentages here; mixed scales in external sources are normalized to "
        "fractions on ingestion.",
    };
    return notes;
}

struct MetricColumn {
    const char* name;
    Metric CellMetrics::* field;
    bool is_delta; // rendered with an explicit sign
};

const std::vector<MetricColumn>& metric_columns() {
    static const std::vector<MetricColumn> cols = {
        {"em", &CellMetrics::em, false},
        {"rouge_l", &CellMetrics::rouge_l, false},
        {"hallucination", &CellMetrics::hallucination, false},
        {"faithfulness", &CellMetrics::faithfulness, false},
        {"contradiction", &CellMetrics::contradiction, false},
        {"claim_recall", &CellMetrics::claim_recall, false},
        {"context_precision", &CellMetrics::context_precision, false},
        {"self_knowledge", &CellMetrics::self_knowledge, false},
        {"delta_cr", &CellMetrics::delta_cr, true},
        {"delta_cp", &CellMetrics::delta_cp, true},
        {"vis_hit_at_k", &CellMetrics::vis_hit_at_k, false},
        {"txt_miss_rate", &CellMetrics::txt_miss_rate, false},
        {"cma", &CellMetrics::cma, false},
        {"v_hr", &CellMetrics::v_hr, false},
        {"d_hr", &CellMetrics::d_hr, false},
        {"cr_img", &CellMetrics::cr_img, false},
        {"cr_txt", &CellMetrics::cr_txt, false},
        {"cp_img", &CellMetrics::cp_img, false},
        {"cp_txt", &CellMetrics::cp_txt, false},
        {"recall_img", &CellMetrics::recall_img, false},
        {"recall_txt", &CellMetrics::recall_txt, false},
        {"precision_img", &CellMetrics::precision_img, false},
        {"precision_txt", &CellMetrics::precision_txt, false},
        {"f1_img", &CellMetrics::f1_img, false},
        {"f1_txt", &CellMetrics::f1_txt, false},
    };
    return cols;
}

struct CountColumn {
    const char* name;
    std::size_t CellMetrics::* field;
};

const std::vector<CountColumn>& count_columns() {
    static const std::vector<CountColumn> cols = {
        {"records", &CellMetrics::record_count},
        {"em_excluded", &CellMetrics::em_excluded},
        {"judging_errors", &CellMetrics::judging_errors},
        {"unjudgeable_claims", &CellMetrics::unjudgeable_claims},
        {"check_failed", &CellMetrics::check_failed},
    };
    return cols;
}

std::string format_fixed1(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.1f", value);
    std::string s(buf);
    if (s == "-0.0")
        s = "0.0";
    return s;
}

} // namespace

std::string render_percent(double fraction) {
    return format_fixed1(fraction * 100.0);
}

std::string render_delta_percent(double fraction_delta) {
    std::string magnitude = format_fixed1(std::abs(fraction_delta) * 100.0);
    if (magnitude == "0.0")
        return "0.0";
    return (fraction_delta < 0.0 ? "-" : "+") + magnitude;
}

std::string render_metric(const Metric& value) {
    if (!value)
        return "—";
    return render_percent(*value);
}

std::string render_delta(const Metric& value) {
    if (!value)
        return "—";
    return render_delta_percent(*value);
}

json RunManifest::to_json() const {
    json obj;
    obj["config_hash"] = config_hash;
    obj["corpus_hash"] = corpus_hash;
    obj["embedding_hash"] = embedding_hash;
    obj["cache_hash"] = cache_hash;
    obj["backend_kinds"] = backend_kinds;
    obj["tool_version"] = tool_version;
    obj["timestamp"] = timestamp;
    return obj;
}

json ReportCell::to_json() const {
    json obj;
    obj["type"] = "cell";
    json k;
    k["dataset"] = key.dataset;
    k["model"] = key.model;
    k["split"] = key.split;
    k["mode"] = key.mode;
    k["prompt"] = key.prompt;
    obj["key"] = std::move(k);
    json m;
    for (const auto& col : metric_columns()) {
        const Metric& value = metrics.*(col.field);
        m[col.name] = value ? json(*value) : json(nullptr);
    }
    obj["metrics"] = std::move(m);
    json c;
    for (const auto& col : count_columns())
        c[col.name] = metrics.*(col.field);
    obj["counts"] = std::move(c);
    return obj;
}

ReportCell ReportCell::from_json(const json& obj) {
    ReportCell cell;
    const json& k = obj.at("key");
    cell.key = {k.at("dataset").get<std::string>(), k.at("model").get<std::string>(),
                k.at("split").get<std::string>(), k.at("mode").get<std::string>(),
                k.at("prompt").get<std::string>()};
    const json& m = obj.at("metrics");
    for (const auto& col : metric_columns()) {
        const json& value = m.at(col.name);
        if (!value.is_null())
            cell.metrics.*(col.field) = value.get<double>();
    }
    const json& c = obj.at("counts");
    for (const auto& col : count_columns())
        cell.metrics.*(col.field) = c.at(col.name).get<std::size_t>();
    return cell;
}

std::vector<ReportCell> aggregate_runs(const std::vector<RecordEvaluation>& evaluations) {
    struct Accumulators {
        metrics::MeanAccumulator em, rouge;
        metrics::MeanAccumulator core[6];  // halluc, faith, contra, cr, cp, self
        metrics::MeanAccumulator cross[9]; // cr_img, cr_txt, cp_img, cp_txt, vis, miss, cma, vhr, dhr
        metrics::MeanAccumulator prf[6];   // r/p/f1 x img/txt
        CellMetrics counts;
    };
    std::map<CellKey, Accumulators> cells;

    for (const auto& eval : evaluations) {
        Accumulators& acc = cells[eval.key];
        ++acc.counts.record_count;
        if (eval.generation_error) {
            ++acc.counts.em_excluded;
        } else {
            if (eval.em)
                acc.em.add(static_cast<double>(*eval.em));
            if (eval.rouge)
                acc.rouge.add(*eval.rouge);
        }
        const auto& check = eval.check;
        acc.counts.judging_errors += static_cast<std::size_t>(check.judging_error_count);
        acc.counts.unjudgeable_claims += static_cast<std::size_t>(check.unjudgeable_claim_count);
        if (check.check_failed) {
            ++acc.counts.check_failed;
            continue; // aborted record: no claim-level contribution
        }
        auto core = metrics::core_metrics(check);
        acc.core[0].add(core.hallucination_rate);
        acc.core[1].add(core.faithfulness);
        acc.core[2].add(core.contradiction_rate);
        acc.core[3].add(core.claim_recall);
        acc.core[4].add(core.context_precision);
        acc.core[5].add(core.self_knowledge);
        auto cross = metrics::cross_modality_record(check);
        acc.cross[0].add(cross.cr_img);
        acc.cross[1].add(cross.cr_txt);
        acc.cross[2].add(cross.cp_img);
        acc.cross[3].add(cross.cp_txt);
        acc.cross[4].add(cross.vis_hit_at_k);
        acc.cross[5].add(cross.txt_miss_rate);
        acc.cross[6].add(cross.cma);
        acc.cross[7].add(cross.v_hr);
        acc.cross[8].add(cross.d_hr);
        auto prf = metrics::per_modality_prf_record(check);
        acc.prf[0].add(prf.img.recall);
        acc.prf[1].add(prf.img.precision);
        acc.prf[2].add(prf.img.f1);
        acc.prf[3].add(prf.txt.recall);
        acc.prf[4].add(prf.txt.precision);
        acc.prf[5].add(prf.txt.f1);
    }

    std::vector<ReportCell> out;
    for (const auto& [key, acc] : cells) {
        ReportCell cell;
        cell.key = key;
        cell.metrics = acc.counts;
        cell.metrics.em = acc.em.mean();
        cell.metrics.rouge_l = acc.rouge.mean();
        cell.metrics.hallucination = acc.core[0].mean();
        cell.metrics.faithfulness = acc.core[1].mean();
        cell.metrics.contradiction = acc.core[2].mean();
        cell.metrics.claim_recall = acc.core[3].mean();
        cell.metrics.context_precision = acc.core[4].mean();
        cell.metrics.self_knowledge = acc.core[5].mean();
        cell.metrics.cr_img = acc.cross[0].mean();
        cell.metrics.cr_txt = acc.cross[1].mean();
        cell.metrics.cp_img = acc.cross[2].mean();
        cell.metrics.cp_txt = acc.cross[3].mean();
        cell.metrics.vis_hit_at_k = acc.cross[4].mean();
        cell.metrics.txt_miss_rate = acc.cross[5].mean();
        cell.metrics.cma = acc.cross[6].mean();
        cell.metrics.v_hr = acc.cross[7].mean();
        cell.metrics.d_hr = acc.cross[8].mean();
        if (cell.metrics.cr_img && cell.metrics.cr_txt)
            cell.metrics.delta_cr = *cell.metrics.cr_img - *cell.metrics.cr_txt;
        if (cell.metrics.cp_img && cell.metrics.cp_txt)
            cell.metrics.delta_cp = *cell.metrics.cp_img - *cell.metrics.cp_txt;
        cell.metrics.recall_img = acc.prf[0].mean();
        cell.metrics.precision_img = acc.prf[1].mean();
        cell.metrics.f1_img = acc.prf[2].mean();
        cell.metrics.recall_txt = acc.prf[3].mean();
        cell.metrics.precision_txt = acc.prf[4].mean();
        cell.metrics.f1_txt = acc.prf[5].mean();
        out.push_back(std::move(cell));
    }
    return out; // std::map iteration: already in (dataset, model, split, mode, prompt) order
}

std::vector<DeltaRow> ambiguity_delta_report(const std::vector<ReportCell>& ambiguous_cells,
                                             const std::vector<ReportCell>& clear_cells) {
    auto match_key = [](const CellKey& k) {
        return std::tuple(k.dataset, k.model, k.mode, k.prompt);
    };
    std::map<std::tuple<std::string, std::string, std::string, std::string>, const ReportCell*>
        clear_by_key;
    for (const auto& cell : clear_cells)
        clear_by_key[match_key(cell.key)] = &cell;

    std::vector<DeltaRow> rows;
    for (const auto& amb : ambiguous_cells) {
        auto it = clear_by_key.find(match_key(amb.key));
        if (it == clear_by_key.end())
            throw Error("missing clear counterpart cell for dataset=" + amb.key.dataset +
                        " model=" + amb.key.model + " mode=" + amb.key.mode);
        const ReportCell& clr = *it->second;
        DeltaRow row;
        row.key = amb.key;
        row.key.split = "ambiguous-minus-clear";
        auto delta = [](const Metric& a, const Metric& b) -> Metric {
            if (!a || !b)
                return std::nullopt;
            return *a - *b;
        };
        row.d_em = delta(amb.metrics.em, clr.metrics.em);
        row.d_hallucination = delta(amb.metrics.hallucination, clr.metrics.hallucination);
        row.d_claim_recall = delta(amb.metrics.claim_recall, clr.metrics.claim_recall);
        row.d_context_precision =
            delta(amb.metrics.context_precision, clr.metrics.context_precision);
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(),
              [](const DeltaRow& a, const DeltaRow& b) { return a.key < b.key; });
    return rows;
}

namespace {

std::string csv_report(const std::vector<ReportCell>& cells) {
    std::ostringstream out;
    out << "dataset,model,split,mode,prompt";
    for (const auto& col : count_columns())
        out << ',' << col.name;
    for (const auto& col : metric_columns())
        out << ',' << col.name;
    out << '\n';
    for (const auto& cell : cells) {
        out << cell.key.dataset << ',' << cell.key.model << ',' << cell.key.split << ','
            << cell.key.mode << ',' << cell.key.prompt;
        for (const auto& col : count_columns())
            out << ',' << cell.metrics.*(col.field);
        for (const auto& col : metric_columns()) {
            const Metric& value = cell.metrics.*(col.field);
            out << ',' << (col.is_delta ? render_delta(value) : render_metric(value));
        }
        out << '\n';
    }
    for (const auto& note : footnotes())
        out << "# " << note << '\n';
    return out.str();
}

std::string markdown_report(const std::vector<ReportCell>& cells) {
    std::ostringstream out;
    out << "| dataset | model | split | mode | prompt |";
    for (const auto& col : count_columns())
        out << ' ' << col.name << " |";
    for (const auto& col : metric_columns())
        out << ' ' << col.name << " |";
    out << '\n';
    out << "|---|---|---|---|---|";
    for (std::size_t i = 0; i < count_columns().size() + metric_columns().size(); ++i)
        out << "---|";
    out << '\n';
    for (const auto& cell : cells) {
        out << "| " << cell.key.dataset << " | " << cell.key.model << " | " << cell.key.split
            << " | " << cell.key.mode << " | " << cell.key.prompt << " |";
        for (const auto& col : count_columns())
            out << ' ' << cell.metrics.*(col.field) << " |";
        for (const auto& col : metric_columns()) {
            const Metric& value = cell.metrics.*(col.field);
            out << ' ' << (col.is_delta ? render_delta(value) : render_metric(value)) << " |";
        }
        out << '\n';
    }
    out << '\n';
    for (const auto& note : footnotes())
        out << "*" << note << "*\n";
    return out.str();
}

std::string jsonl_report(const std::vector<ReportCell>& cells) {
    std::ostringstream out;
    json meta;
    meta["type"] = "meta";
    meta["schema_version"] = kReportSchemaVersion;
    meta["footnotes"] = footnotes();
    out << meta.dump() << '\n';
    for (const auto& cell : cells)
        out << cell.to_json().dump() << '\n';
    return out.str();
}

std::string format_extension(ReportFormat format) {
    switch (format) {
    case ReportFormat::csv: return ".csv";
    case ReportFormat::markdown: return ".md";
    case ReportFormat::jsonl: return ".jsonl";
    }
    throw Error("invalid report format");
}

} // namespace

std::vector<std::filesystem::path> emit_report(const std::vector<ReportCell>& cells,
                                               const std::set<ReportFormat>& formats,
                                               const std::filesystem::path& out_dir,
                                               const std::string& basename) {
    if (cells.empty())
        throw Error("emit_report: no cells");
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;
    for (ReportFormat format : formats) {
        auto path = out_dir / (basename + format_extension(format));
        switch (format) {
        case ReportFormat::csv: jsonl::write_text_file(path, csv_report(cells)); break;
        case ReportFormat::markdown: jsonl::write_text_file(path, markdown_report(cells)); break;
        case ReportFormat::jsonl: jsonl::write_text_file(path, jsonl_report(cells)); break;
        }
        written.push_back(path);
    }
    return written;
}

std::vector<std::filesystem::path> emit_delta_report(const std::vector<DeltaRow>& rows,
                                                     const std::set<ReportFormat>& formats,
                                                     const std::filesystem::path& out_dir,
                                                     const std::string& basename) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;
    for (ReportFormat format : formats) {
        auto path = out_dir / (basename + format_extension(format));
        std::ostringstream out;
        if (format == ReportFormat::csv) {
            out << "dataset,model,mode,prompt,d_em,d_hallucination,d_claim_recall,"
                   "d_context_precision\n";
            for (const auto& row : rows)
                out << row.key.dataset << ',' << row.key.model << ',' << row.key.mode << ','
                    << row.key.prompt << ',' << render_delta(row.d_em) << ','
                    << render_delta(row.d_hallucination) << ','
                    << render_delta(row.d_claim_recall) << ','
                    << render_delta(row.d_context_precision) << '\n';
        } else if (format == ReportFormat::markdown) {
            out << "| dataset | model | mode | prompt | d_em | d_hallucination | "
                   "d_claim_recall | d_context_precision |\n";
            out << "|---|---|---|---|---|---|---|---|\n";
            for (const auto& row : rows)
                out << "| " << row.key.dataset << " | " << row.key.model << " | "
                    << row.key.mode << " | " << row.key.prompt << " | "
                    << render_delta(row.d_em) << " | " << render_delta(row.d_hallucination)
                    << " | " << render_delta(row.d_claim_recall) << " | "
                    << render_delta(row.d_context_precision) << " |\n";
        } else {
            for (const auto& row : rows) {
                json obj;
                obj["dataset"] = row.key.dataset;
                obj["model"] = row.key.model;
                obj["mode"] = row.key.mode;
                obj["prompt"] = row.key.prompt;
                auto put = [&](const char* name, const Metric& value) {
                    obj[name] = value ? json(*value) : json(nullptr);
                };
                put("d_em", row.d_em);
                put("d_hallucination", row.d_hallucination);
                put("d_claim_recall", row.d_claim_recall);
                put("d_context_precision", row.d_context_precision);
                out << obj.dump() << '\n';
            }
        }
        jsonl::write_text_file(path, out.str());
        written.push_back(path);
    }
    return written;
}

std::vector<ReportCell> read_report_jsonl(const std::filesystem::path& file) {
    std::vector<ReportCell> cells;
    jsonl::for_each(file, [&](std::size_t, const json& obj) {
        if (obj.value("type", "") == "cell")
            cells.push_back(ReportCell::from_json(obj));
    });
    return cells;
}

} // namespace claimcheck::reporting
