// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace claimcheck::corpus {

/// The eight benchmark sources every record is normalized from.
enum class DatasetId {
    mrag_bench,
    chart_rag,
    visual_rag,
    webqa,
    visrag_arxiv,
    visrag_plot,
    visrag_slide,
    visrag_doc,
};

constexpr int kDatasetCount = 8;

DatasetId parse_dataset_id(const std::string& token);
std::string dataset_token(DatasetId id);
/// Table-style display name ("MRAG-Bench", "Chart-MRAG", ...).
std::string dataset_display_name(DatasetId id);
std::vector<DatasetId> all_datasets();

enum class Modality { image, text };

std::string modality_token(Modality m);
Modality parse_modality(const std::string& token);

enum class AmbiguityLabel { unlabeled, clear, ambiguous };

std::string ambiguity_token(AmbiguityLabel label);
AmbiguityLabel parse_ambiguity(const std::string& token);

/// One normalized benchmark item. Evidence is referenced by id so a single
/// evidence item can back many questions.
struct QueryRecord {
    std::string record_id;
    DatasetId dataset_id = DatasetId::webqa;
    std::string question;
    std::string short_answer;
    std::string long_answer; // may be empty
    std::vector<std::string> gold_image_ids;
    std::vector<std::string> gold_text_ids;
    AmbiguityLabel ambiguity_label = AmbiguityLabel::unlabeled;
    bool in_filtered_split = false; // "filtered" flag; every record is in "full"

    bool operator==(const QueryRecord&) const = default;
};

struct EvidenceItem {
    std::string evidence_id;
    Modality modality = Modality::text;
    /// Image: path to the image file. Text: the passage itself.
    std::string content_ref;
    std::optional<std::string> caption;          // images only
    std::optional<std::uint32_t> width_px;       // images only
    std::optional<std::uint32_t> height_px;      // images only

    bool operator==(const EvidenceItem&) const = default;
};

/// Table-1 style aggregate for one dataset. Lengths count whitespace tokens;
/// averages are means of those whole-number counts.
struct DatasetStats {
    DatasetId dataset_id = DatasetId::webqa;
    std::size_t item_count = 0;
    std::size_t retained_count = 0;  // records carrying the filtered flag
    std::size_t ambiguous_count = 0;
    double avg_img_width_px = 0.0;
    double avg_img_height_px = 0.0;
    std::size_t max_q_len = 0;
    std::size_t max_a_len = 0;
    double avg_q_len = 0.0;
    double avg_a_len = 0.0;
};

struct Rejection {
    std::size_t line = 0;
    std::string record_id; // empty when the id itself was missing
    std::string reason;
};

struct IngestReport {
    std::size_t accepted = 0;
    std::vector<Rejection> rejections;
};

/// Maps canonical field names (question, short_answer, long_answer,
/// evidence_imgs, evidence_txts, record_id) to the source file's names.
/// Unmapped fields default to the canonical name itself.
using SchemaMap = std::map<std::string, std::string>;

/// In-memory corpus backed by a directory of per-dataset record files plus
/// an evidence manifest. Single writer during ingestion; read-only after.
class CorpusStore {
public:
    CorpusStore() = default;

    /// Ingests a UTF-8 line-delimited source file. Accepted records overwrite
    /// any stored record with the same (dataset, record_id); rejects are
    /// logged with a reason and never stored.
    IngestReport ingest_records(const std::filesystem::path& source_file, DatasetId dataset,
                                const SchemaMap& schema_map);

    /// Loads evidence manifest lines; same-id entries overwrite.
    std::size_t ingest_evidence(const std::filesystem::path& manifest_file);

    void put_record(const QueryRecord& record);
    void put_evidence(const EvidenceItem& item);

    const QueryRecord* find_record(DatasetId dataset, const std::string& record_id) const;
    const EvidenceItem* find_evidence(const std::string& evidence_id) const;

    std::vector<const QueryRecord*> records(DatasetId dataset) const;
    std::vector<const QueryRecord*> all_records() const;
    std::size_t record_count(DatasetId dataset) const;
    std::size_t evidence_count() const { return evidence_.size(); }

    /// Every violated invariant, not just the first. Empty result = ok.
    std::vector<std::string> validate_record(const QueryRecord& record) const;

    DatasetStats compute_stats(DatasetId dataset) const;

    void save(const std::filesystem::path& dir) const;
    static CorpusStore load(const std::filesystem::path& dir);

    /// Canonical per-dataset record file content (sorted by record_id).
    std::string export_records(DatasetId dataset) const;
    std::string export_evidence() const;

private:
    // key: dataset token + '\0' + record_id, keeps iteration deterministic
    std::map<std::string, QueryRecord> records_;
    std::map<std::string, EvidenceItem> evidence_;
};

} // namespace claimcheck::corpus
