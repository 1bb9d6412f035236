// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#include "claimcheck/corpus.hpp"

#include "claimcheck/error.hpp"
#include "claimcheck/jsonl.hpp"
#include "claimcheck/text.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace claimcheck::corpus {

using nlohmann::json;

namespace {

struct DatasetInfo {
    DatasetId id;
    const char* token;
    const char* display;
};

constexpr std::array<DatasetInfo, kDatasetCount> kDatasets = {{
    {DatasetId::mrag_bench, "mrag_bench", "MRAG-Bench"},
    {DatasetId::chart_rag, "chart_rag", "Chart-MRAG"},
    {DatasetId::visual_rag, "visual_rag", "Visual-RAG"},
    {DatasetId::webqa, "webqa", "WebQA"},
    {DatasetId::visrag_arxiv, "visrag_arxiv", "VisRAG-ArXiv"},
    {DatasetId::visrag_plot, "visrag_plot", "VisRAG-Plot"},
    {DatasetId::visrag_slide, "visrag_slide", "VisRAG-Slide"},
    {DatasetId::visrag_doc, "visrag_doc", "VisRAG-Doc"},
}};

std::string record_key(DatasetId dataset, const std::string& record_id) {
    std::string key = dataset_token(dataset);
    key.push_back('\0');
    key += record_id;
    return key;
}

std::vector<std::string> string_list(const json& value) {
    std::vector<std::string> out;
    if (value.is_string()) {
        out.push_back(value.get<std::string>());
    } else if (value.is_array()) {
        for (const auto& item : value)
            out.push_back(item.is_string() ? item.get<std::string>() : item.dump());
    }
    return out;
}

json record_to_json(const QueryRecord& r) {
    json obj;
    obj["record_id"] = r.record_id;
    obj["question"] = r.question;
    obj["short_answer"] = r.short_answer;
    obj["long_answer"] = r.long_answer;
    obj["evidence_imgs"] = r.gold_image_ids;
    obj["evidence_txts"] = r.gold_text_ids;
    if (r.ambiguity_label != AmbiguityLabel::unlabeled)
        obj["ambiguity_label"] = ambiguity_token(r.ambiguity_label);
    json flags = json::array({"full"});
    if (r.in_filtered_split)
        flags.push_back("filtered");
    obj["split_flags"] = flags;
    return obj;
}

QueryRecord record_from_json(DatasetId dataset, const json& obj) {
    QueryRecord r;
    r.dataset_id = dataset;
    r.record_id = obj.value("record_id", "");
    r.question = obj.value("question", "");
    r.short_answer = obj.value("short_answer", "");
    r.long_answer = obj.value("long_answer", "");
    if (obj.contains("evidence_imgs"))
        r.gold_image_ids = string_list(obj.at("evidence_imgs"));
    if (obj.contains("evidence_txts"))
        r.gold_text_ids = string_list(obj.at("evidence_txts"));
    if (obj.contains("ambiguity_label"))
        r.ambiguity_label = parse_ambiguity(obj.at("ambiguity_label").get<std::string>());
    if (obj.contains("split_flags")) {
        for (const auto& f : obj.at("split_flags"))
            if (f.get<std::string>() == "filtered")
                r.in_filtered_split = true;
    }
    return r;
}

json evidence_to_json(const EvidenceItem& e) {
    json obj;
    obj["evidence_id"] = e.evidence_id;
    obj["modality"] = modality_token(e.modality);
    obj["content_ref"] = e.content_ref;
    if (e.caption)
        obj["caption"] = *e.caption;
    if (e.width_px)
        obj["width_px"] = *e.width_px;
    if (e.height_px)
        obj["height_px"] = *e.height_px;
    return obj;
}

EvidenceItem evidence_from_json(const json& obj) {
    EvidenceItem e;
    e.evidence_id = obj.value("evidence_id", "");
    e.modality = parse_modality(obj.value("modality", "text"));
    e.content_ref = obj.value("content_ref", "");
    if (obj.contains("caption"))
        e.caption = obj.at("caption").get<std::string>();
    if (obj.contains("width_px"))
        e.width_px = obj.at("width_px").get<std::uint32_t>();
    if (obj.contains("height_px"))
        e.height_px = obj.at("height_px").get<std::uint32_t>();
    return e;
}

} // namespace

DatasetId parse_dataset_id(const std::string& token) {
    for (const auto& d : kDatasets)
        if (token == d.token)
            return d.id;
    throw Error("unknown dataset id: " + token);
}

std::string dataset_token(DatasetId id) {
    for (const auto& d : kDatasets)
        if (id == d.id)
            return d.token;
    throw Error("invalid dataset enum value");
}

std::string dataset_display_name(DatasetId id) {
    for (const auto& d : kDatasets)
        if (id == d.id)
            return d.display;
    throw Error("invalid dataset enum value");
}

std::vector<DatasetId> all_datasets() {
    std::vector<DatasetId> out;
    for (const auto& d : kDatasets)
        out.push_back(d.id);
    return out;
}

std::string modality_token(Modality m) {
    return m == Modality::image ? "image" : "text";
}

Modality parse_modality(const std::string& token) {
    if (token == "image")
        return Modality::image;
    if (token == "text")
        return Modality::text;
    throw Error("unknown modality: " + token);
}

std::string ambiguity_token(AmbiguityLabel label) {
    switch (label) {
    case AmbiguityLabel::clear: return "clear";
    case AmbiguityLabel::ambiguous: return "ambiguous";
    case AmbiguityLabel::unlabeled: return "unlabeled";
    }
    throw Error("invalid ambiguity enum value");
}

AmbiguityLabel parse_ambiguity(const std::string& token) {
    if (token == "clear")
        return AmbiguityLabel::clear;
    if (token == "ambiguous")
        return AmbiguityLabel::ambiguous;
    if (token == "unlabeled")
        return AmbiguityLabel::unlabeled;
    throw Error("unknown ambiguity label: " + token);
}

IngestReport CorpusStore::ingest_records(const std::filesystem::path& source_file,
                                         DatasetId dataset, const SchemaMap& schema_map) {
    auto mapped = [&](const char* canonical) -> std::string {
        auto it = schema_map.find(canonical);
        return it == schema_map.end() ? canonical : it->second;
    };
    const std::string f_id = mapped("record_id");
    const std::string f_question = mapped("question");
    const std::string f_short = mapped("short_answer");
    const std::string f_long = mapped("long_answer");
    const std::string f_imgs = mapped("evidence_imgs");
    const std::string f_txts = mapped("evidence_txts");

    IngestReport report;
    std::set<std::string> seen_ids;
    jsonl::for_each(
        source_file,
        [&](std::size_t line, const json& obj) {
            auto reject = [&](const std::string& id, const std::string& reason) {
                report.rejections.push_back({line, id, reason});
            };
            if (!obj.contains(f_id) || !obj.at(f_id).is_string() ||
                obj.at(f_id).get<std::string>().empty()) {
                reject("", "missing record_id");
                return;
            }
            std::string id = obj.at(f_id).get<std::string>();
            if (!seen_ids.insert(id).second) {
                reject(id, "duplicate record_id: " + id);
                return;
            }
            QueryRecord r;
            r.record_id = id;
            r.dataset_id = dataset;
            if (obj.contains(f_question) && obj.at(f_question).is_string())
                r.question = obj.at(f_question).get<std::string>();
            if (text::trim(r.question).empty()) {
                reject(id, "missing question");
                return;
            }
            if (obj.contains(f_short) && obj.at(f_short).is_string())
                r.short_answer = obj.at(f_short).get<std::string>();
            if (text::trim(r.short_answer).empty()) {
                reject(id, "missing short_answer");
                return;
            }
            if (obj.contains(f_long) && obj.at(f_long).is_string())
                r.long_answer = obj.at(f_long).get<std::string>();
            if (obj.contains(f_imgs))
                r.gold_image_ids = string_list(obj.at(f_imgs));
            if (obj.contains(f_txts))
                r.gold_text_ids = string_list(obj.at(f_txts));
            if (obj.contains("ambiguity_label") && obj.at("ambiguity_label").is_string())
                r.ambiguity_label = parse_ambiguity(obj.at("ambiguity_label").get<std::string>());
            put_record(r);
            ++report.accepted;
        },
        [&](std::size_t line, const std::string& msg) {
            report.rejections.push_back({line, "", msg});
        });
    return report;
}

std::size_t CorpusStore::ingest_evidence(const std::filesystem::path& manifest_file) {
    std::size_t count = 0;
    const auto base = manifest_file.has_parent_path() ? manifest_file.parent_path()
                                                      : std::filesystem::path(".");
    jsonl::for_each(manifest_file, [&](std::size_t line, const json& obj) {
        EvidenceItem e = evidence_from_json(obj);
        if (e.evidence_id.empty())
            throw Error(manifest_file.string() + ":" + std::to_string(line) +
                        ": evidence_id missing");
        // Image paths are relative to the manifest; store them resolved so
        // later stages are independent of the working directory.
        if (e.modality == Modality::image && !e.content_ref.empty() &&
            std::filesystem::path(e.content_ref).is_relative()) {
            e.content_ref =
                std::filesystem::absolute(base / e.content_ref).lexically_normal().string();
        }
        put_evidence(e);
        ++count;
    });
    return count;
}

void CorpusStore::put_record(const QueryRecord& record) {
    records_[record_key(record.dataset_id, record.record_id)] = record;
}

void CorpusStore::put_evidence(const EvidenceItem& item) {
    evidence_[item.evidence_id] = item;
}

const QueryRecord* CorpusStore::find_record(DatasetId dataset, const std::string& record_id) const {
    auto it = records_.find(record_key(dataset, record_id));
    return it == records_.end() ? nullptr : &it->second;
}

const EvidenceItem* CorpusStore::find_evidence(const std::string& evidence_id) const {
    auto it = evidence_.find(evidence_id);
    return it == evidence_.end() ? nullptr : &it->second;
}

std::vector<const QueryRecord*> CorpusStore::records(DatasetId dataset) const {
    std::vector<const QueryRecord*> out;
    for (const auto& [key, record] : records_)
        if (record.dataset_id == dataset)
            out.push_back(&record);
    return out;
}

std::vector<const QueryRecord*> CorpusStore::all_records() const {
    std::vector<const QueryRecord*> out;
    for (const auto& [key, record] : records_)
        out.push_back(&record);
    return out;
}

std::size_t CorpusStore::record_count(DatasetId dataset) const {
    return records(dataset).size();
}

std::vector<std::string> CorpusStore::validate_record(const QueryRecord& record) const {
    std::vector<std::string> violations;
    if (record.record_id.empty())
        violations.push_back("record_id empty");
    if (text::trim(record.question).empty())
        violations.push_back("question empty");
    if (text::trim(record.short_answer).empty())
        violations.push_back("short_answer empty");
    auto check_ids = [&](const std::vector<std::string>& ids, Modality expect) {
        for (const auto& id : ids) {
            const EvidenceItem* item = find_evidence(id);
            if (item == nullptr) {
                violations.push_back("unresolved evidence id: " + id);
                continue;
            }
            if (item->modality != expect) {
                violations.push_back("evidence id " + id + " has modality " +
                                     modality_token(item->modality) + ", expected " +
                                     modality_token(expect));
            }
            if (item->modality == Modality::image &&
                !std::filesystem::exists(item->content_ref)) {
                violations.push_back("image file missing for " + id + ": " +
                                     item->content_ref);
            }
            if (item->modality == Modality::text && text::trim(item->content_ref).empty()) {
                violations.push_back("text evidence empty for " + id);
            }
        }
    };
    check_ids(record.gold_image_ids, Modality::image);
    check_ids(record.gold_text_ids, Modality::text);
    return violations;
}

DatasetStats CorpusStore::compute_stats(DatasetId dataset) const {
    DatasetStats stats;
    stats.dataset_id = dataset;
    auto recs = records(dataset);
    stats.item_count = recs.size();

    std::size_t q_sum = 0, a_sum = 0;
    std::set<std::string> image_ids;
    for (const QueryRecord* r : recs) {
        if (r->in_filtered_split)
            ++stats.retained_count;
        if (r->ambiguity_label == AmbiguityLabel::ambiguous)
            ++stats.ambiguous_count;
        std::size_t q_len = text::token_count(r->question);
        std::size_t a_len = text::token_count(r->short_answer);
        q_sum += q_len;
        a_sum += a_len;
        stats.max_q_len = std::max(stats.max_q_len, q_len);
        stats.max_a_len = std::max(stats.max_a_len, a_len);
        for (const auto& id : r->gold_image_ids)
            image_ids.insert(id);
    }
    if (!recs.empty()) {
        stats.avg_q_len = static_cast<double>(q_sum) / static_cast<double>(recs.size());
        stats.avg_a_len = static_cast<double>(a_sum) / static_cast<double>(recs.size());
    }

    // Image resolution averages over the distinct gold images of the dataset;
    // an item reused by many records counts once.
    std::size_t w_sum = 0, h_sum = 0, dims_n = 0;
    for (const auto& id : image_ids) {
        const EvidenceItem* item = find_evidence(id);
        if (item != nullptr && item->width_px && item->height_px) {
            w_sum += *item->width_px;
            h_sum += *item->height_px;
            ++dims_n;
        }
    }
    if (dims_n > 0) {
        stats.avg_img_width_px = static_cast<double>(w_sum) / static_cast<double>(dims_n);
        stats.avg_img_height_px = static_cast<double>(h_sum) / static_cast<double>(dims_n);
    }
    return stats;
}

std::string CorpusStore::export_records(DatasetId dataset) const {
    std::ostringstream out;
    for (const QueryRecord* r : records(dataset))
        out << record_to_json(*r).dump() << '\n';
    return out.str();
}

std::string CorpusStore::export_evidence() const {
    std::ostringstream out;
    for (const auto& [id, item] : evidence_)
        out << evidence_to_json(item).dump() << '\n';
    return out.str();
}

void CorpusStore::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir / "records");
    for (DatasetId dataset : all_datasets()) {
        if (record_count(dataset) == 0)
            continue;
        jsonl::write_text_file(dir / "records" / (dataset_token(dataset) + ".jsonl"),
                               export_records(dataset));
    }
    jsonl::write_text_file(dir / "evidence.jsonl", export_evidence());
}

CorpusStore CorpusStore::load(const std::filesystem::path& dir) {
    CorpusStore store;
    const auto records_dir = dir / "records";
    if (std::filesystem::exists(records_dir)) {
        for (DatasetId dataset : all_datasets()) {
            auto file = records_dir / (dataset_token(dataset) + ".jsonl");
            if (!std::filesystem::exists(file))
                continue;
            jsonl::for_each(file, [&](std::size_t, const json& obj) {
                store.put_record(record_from_json(dataset, obj));
            });
        }
    }
    auto manifest = dir / "evidence.jsonl";
    if (std::filesystem::exists(manifest))
        store.ingest_evidence(manifest);
    return store;
}

} // namespace claimcheck::corpus
