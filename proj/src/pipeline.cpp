// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#include "claimcheck/pipeline.hpp"

#include "claimcheck/error.hpp"
#include "claimcheck/jsonl.hpp"
#include "claimcheck/metrics.hpp"
#include "claimcheck/parallel.hpp"
#include "claimcheck/sha256.hpp"
#include "claimcheck/text.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace claimcheck::pipeline {

using config::PipelineConfig;
using nlohmann::json;

namespace {

#ifndef CLAIMCHECK_VERSION
#define CLAIMCHECK_VERSION "0.0.0"
#endif

std::string file_hash_or_absent(const std::filesystem::path& path) {
    if (path.empty() || !std::filesystem::exists(path))
        return "absent";
    return sha256_file_hex(path);
}

// --- stage stamps (resumability) -------------------------------------------

std::filesystem::path stamp_path(const PipelineConfig& cfg, Stage stage) {
    return cfg.out_dir / "stamps" / (stage_token(stage) + ".json");
}

bool stamp_matches(const PipelineConfig& cfg, Stage stage, const std::string& inputs_hash) {
    auto path = stamp_path(cfg, stage);
    if (!std::filesystem::exists(path))
        return false;
    json stamp = json::parse(jsonl::read_text_file(path), nullptr, false);
    return !stamp.is_discarded() && stamp.value("inputs_hash", "") == inputs_hash;
}

void write_stamp(const PipelineConfig& cfg, Stage stage, const std::string& inputs_hash) {
    json stamp;
    stamp["stage"] = stage_token(stage);
    stamp["inputs_hash"] = inputs_hash;
    jsonl::write_text_file(stamp_path(cfg, stage), stamp.dump(2) + "\n");
}

// --- shared loading ----------------------------------------------------------

corpus::CorpusStore load_corpus_artifact(const PipelineConfig& cfg) {
    auto dir = cfg.out_dir / "corpus";
    if (!std::filesystem::exists(dir / "evidence.jsonl"))
        throw Error("corpus artifacts not found in " + dir.string() + "; run ingest first");
    return corpus::CorpusStore::load(dir);
}

std::set<std::string> load_filtered_ids(const PipelineConfig& cfg) {
    std::set<std::string> ids;
    auto path = cfg.out_dir / "filter" / "filtered_ids.txt";
    if (!std::filesystem::exists(path))
        return ids;
    std::istringstream in(jsonl::read_text_file(path));
    std::string line;
    while (std::getline(in, line)) {
        line = text::trim(line);
        if (!line.empty())
            ids.insert(line);
    }
    return ids;
}

void apply_filtered_flags(corpus::CorpusStore& store, const std::set<std::string>& ids) {
    for (const corpus::QueryRecord* r : store.all_records()) {
        if (ids.count(r->record_id)) {
            corpus::QueryRecord updated = *r;
            updated.in_filtered_split = true;
            store.put_record(updated);
        }
    }
}

std::vector<corpus::QueryRecord> select_records(const PipelineConfig& cfg,
                                                const corpus::CorpusStore& store) {
    std::vector<corpus::QueryRecord> out;
    for (const corpus::QueryRecord* r : store.all_records()) {
        if (cfg.split == config::Split::filtered && !r->in_filtered_split)
            continue;
        out.push_back(*r);
    }
    return out; // store iteration is (dataset, record_id)-sorted already
}

// --- packs -------------------------------------------------------------------

json pack_to_json(const retrieval::EvidencePack& pack) {
    json obj;
    obj["record_id"] = pack.record_id;
    obj["mode"] = retrieval::mode_token(pack.mode);
    obj["seed"] = pack.sampling_seed;
    obj["caps"] = {{"k_img", pack.caps.k_img}, {"k_txt", pack.caps.k_txt}};
    auto dump_side = [](const std::vector<retrieval::PackEntry>& side) {
        json arr = json::array();
        for (const auto& entry : side) {
            json e;
            e["id"] = entry.item.evidence_id;
            e["provenance"] =
                entry.provenance == retrieval::Provenance::gold ? "gold" : "distractor";
            arr.push_back(std::move(e));
        }
        return arr;
    };
    obj["images"] = dump_side(pack.images);
    obj["texts"] = dump_side(pack.texts);
    return obj;
}

retrieval::EvidencePack pack_from_json(const json& obj, const corpus::CorpusStore& store) {
    retrieval::EvidencePack pack;
    pack.record_id = obj.at("record_id").get<std::string>();
    pack.mode = retrieval::parse_mode(obj.at("mode").get<std::string>());
    pack.sampling_seed = obj.value("seed", std::uint64_t{0});
    pack.caps.k_img = obj.at("caps").at("k_img").get<std::size_t>();
    pack.caps.k_txt = obj.at("caps").at("k_txt").get<std::size_t>();
    auto load_side = [&](const json& arr, std::vector<retrieval::PackEntry>& side) {
        for (const auto& e : arr) {
            const corpus::EvidenceItem* item =
                store.find_evidence(e.at("id").get<std::string>());
            if (item == nullptr)
                throw Error("pack references unknown evidence id: " +
                            e.at("id").get<std::string>());
            side.push_back({*item, e.at("provenance").get<std::string>() == "gold"
                                       ? retrieval::Provenance::gold
                                       : retrieval::Provenance::distractor});
        }
    };
    load_side(obj.at("images"), pack.images);
    load_side(obj.at("texts"), pack.texts);
    return pack;
}

// --- answers ------------------------------------------------------------------

json answer_to_json(const AnswerEntry& a) {
    json obj;
    obj["record_id"] = a.record_id;
    obj["mode"] = a.mode;
    obj["model"] = a.model;
    obj["prompt"] = a.prompt;
    obj["short_answer"] = a.short_answer;
    obj["long_answer"] = a.long_answer;
    obj["generation_error"] = a.generation_error;
    if (!a.error.empty())
        obj["error"] = a.error;
    return obj;
}

AnswerEntry answer_from_json(const json& obj, const std::string& default_model,
                             const std::string& default_prompt) {
    AnswerEntry a;
    a.record_id = obj.at("record_id").get<std::string>();
    a.mode = text::to_lower(obj.value("mode", "go"));
    a.model = obj.value("model", default_model);
    a.prompt = obj.value("prompt", default_prompt);
    a.short_answer = obj.value("short_answer", "");
    a.long_answer = obj.value("long_answer", "");
    a.generation_error = obj.value("generation_error", false);
    a.error = obj.value("error", "");
    return a;
}

void sort_answers(std::vector<AnswerEntry>& answers) {
    std::sort(answers.begin(), answers.end(), [](const AnswerEntry& a, const AnswerEntry& b) {
        return std::tie(a.model, a.record_id, a.mode, a.prompt) <
               std::tie(b.model, b.record_id, b.mode, b.prompt);
    });
}

std::string now_utc_iso8601() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

} // namespace

std::string stage_token(Stage stage) {
    switch (stage) {
    case Stage::ingest: return "ingest";
    case Stage::index: return "index";
    case Stage::filter: return "filter";
    case Stage::evaluate: return "evaluate";
    case Stage::check: return "check";
    case Stage::report: return "report";
    }
    throw Error("invalid stage");
}

std::string hash_tree(const std::filesystem::path& dir) {
    if (dir.empty() || !std::filesystem::exists(dir))
        return "absent";
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir))
        if (entry.is_regular_file())
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    Sha256 h;
    for (const auto& file : files) {
        h.update(std::filesystem::relative(file, dir).generic_string());
        h.update("\0", 1);
        h.update(sha256_file_hex(file));
        h.update("\n", 1);
    }
    return h.hex_digest();
}

std::optional<std::pair<std::string, std::string>> parse_answer_sections(const std::string& raw) {
    auto short_pos = raw.find("SHORT:");
    auto long_pos = raw.find("LONG:");
    if (short_pos == std::string::npos || long_pos == std::string::npos || long_pos < short_pos)
        return std::nullopt;
    std::string short_answer =
        text::trim(raw.substr(short_pos + 6, long_pos - (short_pos + 6)));
    std::string long_answer = text::trim(raw.substr(long_pos + 5));
    return std::make_pair(short_answer, long_answer);
}

std::vector<AnswerEntry> generate_answers(const std::vector<corpus::QueryRecord>& records,
                                          const std::vector<retrieval::EvidencePack>& packs,
                                          const std::vector<judges::PromptConfig>& prompts,
                                          judges::JudgeClient& system_client,
                                          const std::string& model_name) {
    std::map<std::string, const retrieval::EvidencePack*> pack_of;
    for (const auto& pack : packs)
        pack_of[pack.record_id] = &pack;

    std::vector<AnswerEntry> out;
    for (const auto& record : records) {
        auto it = pack_of.find(record.record_id);
        if (it == pack_of.end())
            continue; // cell skipped at assembly
        const retrieval::EvidencePack& pack = *it->second;
        for (const auto& prompt : prompts) {
            AnswerEntry entry;
            entry.record_id = record.record_id;
            entry.mode = retrieval::mode_token(pack.mode);
            entry.model = model_name;
            entry.prompt = prompt.nickname();

            judges::WireRequest request;
            request.task = "generate";
            request.prompt = judges::compose_prompt(prompt, record.question, pack) +
                             "\n\nRespond with \"SHORT:\" followed by the short answer, then "
                             "\"LONG:\" followed by the long answer.";
            for (const auto& img : pack.images) {
                try {
                    request.images_b64.push_back(
                        judges::base64_encode(jsonl::read_text_file(img.item.content_ref)));
                } catch (const Error&) {
                    // unreadable image: the request still goes out text-only
                }
            }
            auto outcome = system_client.call(request);
            if (!outcome.ok()) {
                entry.generation_error = true;
                entry.error = outcome.error;
            } else if (!outcome.value->contains("answer") ||
                       !outcome.value->at("answer").is_string()) {
                entry.generation_error = true;
                entry.error = "generation_error: response missing answer";
            } else {
                auto sections =
                    parse_answer_sections(outcome.value->at("answer").get<std::string>());
                if (!sections) {
                    entry.generation_error = true;
                    entry.error = "generation_error: missing SHORT:/LONG: sections";
                } else {
                    entry.short_answer = sections->first;
                    entry.long_answer = sections->second;
                }
            }
            out.push_back(std::move(entry));
        }
    }
    sort_answers(out);
    return out;
}

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

StageStatus run_ingest(const PipelineConfig& cfg) {
    json inputs;
    inputs["evidence"] = file_hash_or_absent(cfg.evidence_manifest);
    json sources = json::array();
    for (const auto& s : cfg.sources) {
        json sj;
        sj["path"] = s.path.string();
        sj["hash"] = file_hash_or_absent(s.path);
        sj["dataset"] = corpus::dataset_token(s.dataset);
        sj["schema_map"] = s.schema_map;
        sources.push_back(std::move(sj));
    }
    inputs["sources"] = std::move(sources);
    std::string inputs_hash = sha256_hex(inputs.dump());
    if (stamp_matches(cfg, Stage::ingest, inputs_hash))
        return {Stage::ingest, true, "up-to-date"};

    corpus::CorpusStore store;
    json report;
    json per_source = json::array();
    for (const auto& s : cfg.sources) {
        auto r = store.ingest_records(s.path, s.dataset, s.schema_map);
        json sj;
        sj["path"] = s.path.string();
        sj["dataset"] = corpus::dataset_token(s.dataset);
        sj["accepted"] = r.accepted;
        json rejections = json::array();
        for (const auto& rej : r.rejections) {
            json rj;
            rj["line"] = rej.line;
            rj["record_id"] = rej.record_id;
            rj["reason"] = rej.reason;
            rejections.push_back(std::move(rj));
        }
        sj["rejections"] = std::move(rejections);
        per_source.push_back(std::move(sj));
    }
    report["sources"] = std::move(per_source);
    if (!cfg.evidence_manifest.empty())
        report["evidence_count"] = store.ingest_evidence(cfg.evidence_manifest);

    // Validation pass: violations are data, invalid records stay stored.
    std::vector<json> violations;
    for (const corpus::QueryRecord* r : store.all_records()) {
        auto v = store.validate_record(*r);
        if (!v.empty()) {
            json vj;
            vj["record_id"] = r->record_id;
            vj["dataset"] = corpus::dataset_token(r->dataset_id);
            vj["violations"] = v;
            violations.push_back(std::move(vj));
        }
    }

    auto corpus_dir = cfg.out_dir / "corpus";
    store.save(corpus_dir);
    jsonl::write_text_file(corpus_dir / "ingest_report.json", report.dump(2) + "\n");
    jsonl::write_all(corpus_dir / "validation.jsonl", violations);

    json stats;
    for (auto dataset : corpus::all_datasets()) {
        if (store.record_count(dataset) == 0)
            continue;
        auto s = store.compute_stats(dataset);
        json sj;
        sj["item_count"] = s.item_count;
        sj["retained_count"] = s.retained_count;
        sj["ambiguous_count"] = s.ambiguous_count;
        sj["avg_img_px"] = {s.avg_img_width_px, s.avg_img_height_px};
        sj["max_q_len"] = s.max_q_len;
        sj["max_a_len"] = s.max_a_len;
        sj["avg_q_len"] = s.avg_q_len;
        sj["avg_a_len"] = s.avg_a_len;
        stats[corpus::dataset_token(dataset)] = std::move(sj);
    }
    jsonl::write_text_file(corpus_dir / "stats.json", stats.dump(2) + "\n");

    write_stamp(cfg, Stage::ingest, inputs_hash);
    return {Stage::ingest, false, ""};
}

StageStatus run_index(const PipelineConfig& cfg) {
    json inputs;
    inputs["images"] = file_hash_or_absent(cfg.image_embeddings);
    inputs["texts"] = file_hash_or_absent(cfg.text_embeddings);
    std::string inputs_hash = sha256_hex(inputs.dump());
    if (stamp_matches(cfg, Stage::index, inputs_hash))
        return {Stage::index, true, "up-to-date"};

    auto index_dir = cfg.out_dir / "index";
    if (cfg.image_embeddings.empty() || cfg.text_embeddings.empty())
        throw Error("config: embeddings.images and embeddings.texts are required for index");
    auto image_store = retrieval::build_index(cfg.image_embeddings);
    auto text_store = retrieval::build_index(cfg.text_embeddings);
    jsonl::write_text_file(index_dir / "images.emb", image_store.dump());
    jsonl::write_text_file(index_dir / "texts.emb", text_store.dump());

    write_stamp(cfg, Stage::index, inputs_hash);
    return {Stage::index, false, ""};
}

StageStatus run_filter(const PipelineConfig& cfg) {
    if (!cfg.filter)
        return {Stage::filter, true, "no filter configured"};

    json inputs;
    inputs["corpus"] = hash_tree(cfg.out_dir / "corpus");
    inputs["signals"] = file_hash_or_absent(cfg.signals_file);
    inputs["config"] = {{"confidence_threshold", cfg.filter->confidence_threshold},
                        {"drop_fraction", cfg.filter->drop_fraction},
                        {"w_multi_hop", cfg.filter->w_multi_hop},
                        {"w_modality_dependency", cfg.filter->w_modality_dependency},
                        {"w_baseline_success", cfg.filter->w_baseline_success}};
    inputs["backend_kind"] = judges::backend_kind_token(cfg.backend.kind);
    if (cfg.ambiguity) {
        inputs["ambiguity"] = {{"adjudications", file_hash_or_absent(cfg.ambiguity->adjudications)},
                               {"target_size", cfg.ambiguity->target_size},
                               {"clear_seed", cfg.ambiguity->clear_seed}};
    }
    std::string inputs_hash = sha256_hex(inputs.dump());
    if (stamp_matches(cfg, Stage::filter, inputs_hash))
        return {Stage::filter, true, "up-to-date"};

    auto store = load_corpus_artifact(cfg);
    std::vector<corpus::QueryRecord> records;
    for (const corpus::QueryRecord* r : store.all_records())
        records.push_back(*r);

    judges::JudgeClient client(cfg.backend);
    auto stage1 = filtering::retrieval_independent_filter(records, client, *cfg.filter);

    auto filter_dir = cfg.out_dir / "filter";
    std::vector<json> stage1_rows;
    for (const auto& d : stage1.dropped)
        stage1_rows.push_back({{"record_id", d.record_id}, {"reason", d.reason}});
    jsonl::write_all(filter_dir / "stage1_dropped.jsonl", stage1_rows);

    filtering::SignalMap signals;
    if (!cfg.signals_file.empty() && std::filesystem::exists(cfg.signals_file)) {
        jsonl::for_each(cfg.signals_file, [&](std::size_t, const json& obj) {
            filtering::DifficultySignals s;
            s.multi_hop = obj.value("multi_hop", 0) != 0;
            s.modality_dependency = obj.value("modality_dependency", 0) != 0;
            s.baseline_success_rate = obj.value("baseline_success_rate", 0.0);
            signals[obj.at("record_id").get<std::string>()] = s;
        });
    }
    auto stage2 = filtering::difficulty_filter(stage1.kept, signals, *cfg.filter);

    std::vector<json> stage2_rows;
    for (const auto& d : stage2.dropped)
        stage2_rows.push_back({{"record_id", d.record_id}, {"reason", d.reason}});
    jsonl::write_all(filter_dir / "stage2_dropped.jsonl", stage2_rows);

    std::ostringstream ids;
    for (const auto& r : stage2.kept) {
        ids << r.record_id << '\n';
        store.put_record(r); // carry the filtered flag into stats below
    }
    jsonl::write_text_file(filter_dir / "filtered_ids.txt", ids.str());

    json meta;
    meta["stage1_dropped"] = stage1.dropped.size();
    meta["stage2_dropped"] = stage2.dropped.size();
    meta["kept"] = stage2.kept.size();
    meta["probe_errors"] = stage1.probe_error_count;
    meta["warnings"] = stage2.warnings;
    jsonl::write_text_file(filter_dir / "filter_report.json", meta.dump(2) + "\n");

    if (cfg.ambiguity) {
        auto adjudications = filtering::load_adjudications(cfg.ambiguity->adjudications);
        // adjudicated labels land on the stored records so stats see them
        for (const auto& adj : adjudications) {
            if (!adj.adjudicated)
                continue;
            for (auto dataset : corpus::all_datasets()) {
                if (const corpus::QueryRecord* r = store.find_record(dataset, adj.record_id)) {
                    corpus::QueryRecord updated = *r;
                    updated.ambiguity_label = *adj.adjudicated == "AMBIGUOUS"
                                                  ? corpus::AmbiguityLabel::ambiguous
                                                  : corpus::AmbiguityLabel::clear;
                    store.put_record(updated);
                }
            }
        }
        auto subset = filtering::build_ambiguity_subset(records, adjudications,
                                                        cfg.ambiguity->target_size,
                                                        cfg.ambiguity->clear_seed);
        auto amb_dir = filter_dir / "ambiguity";
        std::ostringstream amb_ids, clr_ids;
        for (const auto& id : subset.ambiguous_ids)
            amb_ids << id << '\n';
        for (const auto& id : subset.clear_ids)
            clr_ids << id << '\n';
        jsonl::write_text_file(amb_dir / "ambiguous_ids.txt", amb_ids.str());
        jsonl::write_text_file(amb_dir / "clear_ids.txt", clr_ids.str());

        json accounting;
        json per_source;
        for (const auto& [dataset, acc] : subset.accounting.per_source)
            per_source[corpus::dataset_token(dataset)] = {
                {"text_only", acc.text_only}, {"image_conditioned", acc.image_conditioned}};
        accounting["per_source"] = std::move(per_source);
        accounting["text_only_total"] = subset.accounting.text_only_total;
        accounting["image_conditioned_total"] = subset.accounting.image_conditioned_total;
        accounting["final_total"] = subset.accounting.final_total;
        accounting["clear_total"] = subset.accounting.clear_total;
        accounting["warnings"] = subset.accounting.warnings;

        std::vector<std::string> labels_a, labels_b;
        for (const auto& adj : adjudications) {
            if (!adj.annotator_a.empty() && !adj.annotator_b.empty()) {
                labels_a.push_back(adj.annotator_a);
                labels_b.push_back(adj.annotator_b);
            }
        }
        if (!labels_a.empty())
            accounting["kappa"] = filtering::cohen_kappa(labels_a, labels_b);
        jsonl::write_text_file(amb_dir / "accounting.json", accounting.dump(2) + "\n");
    }

    json stats;
    for (auto dataset : corpus::all_datasets()) {
        if (store.record_count(dataset) == 0)
            continue;
        auto s = store.compute_stats(dataset);
        stats[corpus::dataset_token(dataset)] = {{"item_count", s.item_count},
                                                 {"retained_count", s.retained_count},
                                                 {"ambiguous_count", s.ambiguous_count}};
    }
    jsonl::write_text_file(filter_dir / "stats.json", stats.dump(2) + "\n");

    write_stamp(cfg, Stage::filter, inputs_hash);
    return {Stage::filter, false, ""};
}

StageStatus run_evaluate(const PipelineConfig& cfg) {
    json inputs;
    inputs["corpus"] = hash_tree(cfg.out_dir / "corpus");
    inputs["filter"] = hash_tree(cfg.out_dir / "filter");
    inputs["index"] = hash_tree(cfg.out_dir / "index");
    inputs["caps"] = {{"k_img", cfg.caps.k_img}, {"k_txt", cfg.caps.k_txt}};
    json modes = json::array();
    for (auto mode : cfg.modes)
        modes.push_back(retrieval::mode_token(mode));
    inputs["modes"] = std::move(modes);
    inputs["seed"] = cfg.seed;
    inputs["selection"] = cfg.distractor_selection == retrieval::DistractorSelection::top_k
                              ? "top_k"
                              : "sample_top_2k";
    inputs["split"] = config::split_token(cfg.split);
    json answer_files = json::array();
    for (const auto& a : cfg.answers_files)
        answer_files.push_back({{"model", a.model}, {"hash", file_hash_or_absent(a.path)}});
    inputs["answers_files"] = std::move(answer_files);
    inputs["system_endpoint"] = cfg.system_endpoint;
    json prompts = json::array();
    for (const auto& p : cfg.prompts)
        prompts.push_back(p.nickname());
    inputs["prompts"] = std::move(prompts);
    std::string inputs_hash = sha256_hex(inputs.dump());
    if (stamp_matches(cfg, Stage::evaluate, inputs_hash))
        return {Stage::evaluate, true, "up-to-date"};

    auto store = load_corpus_artifact(cfg);
    apply_filtered_flags(store, load_filtered_ids(cfg));
    auto records = select_records(cfg, store);
    if (cfg.split == config::Split::filtered && records.empty())
        throw Error("no records carry the filtered flag; run filter first");

    auto index_dir = cfg.out_dir / "index";
    if (!std::filesystem::exists(index_dir / "images.emb"))
        throw Error("index artifacts not found; run index first");
    auto image_store = retrieval::build_index(index_dir / "images.emb");
    auto text_store = retrieval::build_index(index_dir / "texts.emb");

    auto packs_dir = cfg.out_dir / "packs";
    std::map<retrieval::RetrievalMode, std::vector<retrieval::EvidencePack>> packs_by_mode;
    for (auto mode : cfg.modes) {
        std::vector<json> pack_rows, skip_rows;
        retrieval::AssembleOptions options;
        options.caps = cfg.caps;
        options.seed = cfg.seed;
        options.selection = cfg.distractor_selection;
        for (const auto& record : records) {
            auto outcome = retrieval::assemble_evidence(record, mode, store, image_store,
                                                        text_store, options);
            if (!outcome.pack) {
                skip_rows.push_back(
                    {{"record_id", record.record_id}, {"reason", outcome.skip_reason}});
                continue;
            }
            pack_rows.push_back(pack_to_json(*outcome.pack));
            packs_by_mode[mode].push_back(std::move(*outcome.pack));
        }
        jsonl::write_all(packs_dir / (retrieval::mode_token(mode) + ".jsonl"), pack_rows);
        jsonl::write_all(packs_dir / ("skipped_" + retrieval::mode_token(mode) + ".jsonl"),
                         skip_rows);
    }

    // System answers: supplied as data and/or generated against an endpoint.
    std::vector<AnswerEntry> answers;
    std::set<std::string> selected_ids;
    for (const auto& r : records)
        selected_ids.insert(r.record_id);
    std::string default_prompt = cfg.prompts.front().nickname();
    std::set<std::string> active_modes;
    for (auto mode : cfg.modes)
        active_modes.insert(retrieval::mode_token(mode));
    for (const auto& spec : cfg.answers_files) {
        jsonl::for_each(spec.path, [&](std::size_t, const json& obj) {
            AnswerEntry a = answer_from_json(obj, spec.model, default_prompt);
            if (selected_ids.count(a.record_id) && active_modes.count(a.mode))
                answers.push_back(std::move(a));
        });
    }
    if (!cfg.system_endpoint.empty()) {
        // same backend kind as the judges: remote hits the endpoint, replay
        // serves the recorded generations, rule answers with its fixed stub
        judges::BackendConfig system_backend = cfg.backend;
        system_backend.endpoint = cfg.system_endpoint;
        system_backend.validate();
        judges::JudgeClient system_client(system_backend);
        for (auto mode : cfg.modes) {
            auto generated = generate_answers(records, packs_by_mode[mode], cfg.prompts,
                                              system_client, cfg.default_model_name);
            answers.insert(answers.end(), generated.begin(), generated.end());
        }
    }
    sort_answers(answers);
    std::map<std::string, std::vector<json>> answers_by_model;
    for (const auto& a : answers)
        answers_by_model[a.model].push_back(answer_to_json(a));
    auto answers_dir = cfg.out_dir / "answers";
    std::filesystem::create_directories(answers_dir);
    for (const auto& [model, rows] : answers_by_model)
        jsonl::write_all(answers_dir / (model + ".jsonl"), rows);

    write_stamp(cfg, Stage::evaluate, inputs_hash);
    return {Stage::evaluate, false, ""};
}

StageStatus run_check(const PipelineConfig& cfg) {
    auto packs_dir = cfg.out_dir / "packs";
    if (!std::filesystem::exists(packs_dir))
        throw Error("packs not found in " + packs_dir.string() + "; run evaluate first");
    auto answers_dir = cfg.out_dir / "answers";
    if (!std::filesystem::exists(answers_dir))
        throw Error("answers not found in " + answers_dir.string() + "; run evaluate first");

    json inputs;
    inputs["corpus"] = hash_tree(cfg.out_dir / "corpus"); // evidence bodies feed the judges
    inputs["packs"] = hash_tree(packs_dir);
    inputs["answers"] = hash_tree(answers_dir);
    inputs["backend_kind"] = judges::backend_kind_token(cfg.backend.kind);
    inputs["reference_channel"] = cfg.reference_channel;
    std::string inputs_hash = sha256_hex(inputs.dump());
    if (stamp_matches(cfg, Stage::check, inputs_hash))
        return {Stage::check, true, "up-to-date"};

    auto store = load_corpus_artifact(cfg);
    std::map<std::string, const corpus::QueryRecord*> record_of;
    for (const corpus::QueryRecord* r : store.all_records()) {
        if (!record_of.emplace(r->record_id, r).second)
            throw Error("record_id is not unique across datasets: " + r->record_id);
    }

    std::map<std::string, std::map<std::string, retrieval::EvidencePack>> packs; // mode -> id
    for (auto mode : cfg.modes) {
        auto path = packs_dir / (retrieval::mode_token(mode) + ".jsonl");
        if (!std::filesystem::exists(path))
            continue;
        jsonl::for_each(path, [&](std::size_t, const json& obj) {
            auto pack = pack_from_json(obj, store);
            packs[retrieval::mode_token(mode)].emplace(pack.record_id, std::move(pack));
        });
    }

    std::vector<AnswerEntry> answers;
    for (const auto& entry : std::filesystem::directory_iterator(answers_dir)) {
        if (entry.path().extension() != ".jsonl")
            continue;
        jsonl::for_each(entry.path(), [&](std::size_t, const json& obj) {
            answers.push_back(answer_from_json(obj, entry.path().stem().string(),
                                               cfg.prompts.front().nickname()));
        });
    }
    sort_answers(answers);

    judges::JudgeClient client(cfg.backend);
    checker::CheckOptions options;
    options.reference_channel = cfg.reference_channel;

    struct Row {
        json line;
        std::string model;
    };
    std::vector<Row> rows(answers.size());
    std::vector<json> skipped;
    std::mutex skipped_mutex;

    unsigned workers = default_worker_count();
    parallel_for(answers.size(), workers, [&](std::size_t i) {
        const AnswerEntry& answer = answers[i];
        json line;
        line["record_id"] = answer.record_id;
        line["mode"] = answer.mode;
        line["model"] = answer.model;
        line["prompt"] = answer.prompt;
        if (answer.generation_error) {
            line["generation_error"] = true;
            rows[i] = {std::move(line), answer.model};
            return;
        }
        auto record_it = record_of.find(answer.record_id);
        auto mode_it = packs.find(answer.mode);
        if (record_it == record_of.end() || mode_it == packs.end() ||
            mode_it->second.count(answer.record_id) == 0) {
            std::lock_guard<std::mutex> lock(skipped_mutex);
            skipped.push_back({{"record_id", answer.record_id},
                               {"mode", answer.mode},
                               {"reason", "no pack for this cell"}});
            rows[i] = {json(), answer.model};
            return;
        }
        auto result = checker::check_answer(*record_it->second,
                                            mode_it->second.at(answer.record_id),
                                            {answer.short_answer, answer.long_answer}, client,
                                            options);
        line["generation_error"] = false;
        line["check"] = result.to_json();
        rows[i] = {std::move(line), answer.model};
    });

    std::map<std::string, std::vector<json>> by_model;
    for (auto& row : rows)
        if (!row.line.is_null())
            by_model[row.model].push_back(std::move(row.line));
    auto checks_dir = cfg.out_dir / "checks";
    std::filesystem::create_directories(checks_dir);
    for (const auto& [model, lines] : by_model)
        jsonl::write_all(checks_dir / (model + ".jsonl"), lines);
    // skips were collected in worker completion order; write them canonically
    std::sort(skipped.begin(), skipped.end(), [](const json& a, const json& b) {
        return std::tie(a.at("record_id").get_ref<const std::string&>(),
                        a.at("mode").get_ref<const std::string&>()) <
               std::tie(b.at("record_id").get_ref<const std::string&>(),
                        b.at("mode").get_ref<const std::string&>());
    });
    jsonl::write_all(checks_dir / "skipped.jsonl", skipped);

    write_stamp(cfg, Stage::check, inputs_hash);
    return {Stage::check, false, ""};
}

StageStatus run_report(const PipelineConfig& cfg) {
    auto checks_dir = cfg.out_dir / "checks";
    if (!std::filesystem::exists(checks_dir))
        throw Error("checks not found in " + checks_dir.string() + "; run check first");

    json inputs;
    inputs["checks"] = hash_tree(checks_dir);
    inputs["answers"] = hash_tree(cfg.out_dir / "answers");
    inputs["corpus"] = hash_tree(cfg.out_dir / "corpus");
    inputs["filter"] = hash_tree(cfg.out_dir / "filter");
    inputs["split"] = config::split_token(cfg.split);
    json em_rules;
    em_rules["default"] = cfg.default_em_rule == config::EmRule::strict_em ? "strict_em"
                                                                           : "containment";
    for (const auto& [dataset, rule] : cfg.em_rule_overrides)
        em_rules[corpus::dataset_token(dataset)] =
            rule == config::EmRule::strict_em ? "strict_em" : "containment";
    inputs["em_rules"] = std::move(em_rules);
    std::string inputs_hash = sha256_hex(inputs.dump());
    if (stamp_matches(cfg, Stage::report, inputs_hash))
        return {Stage::report, true, "up-to-date"};

    auto store = load_corpus_artifact(cfg);
    std::map<std::string, const corpus::QueryRecord*> record_of;
    for (const corpus::QueryRecord* r : store.all_records())
        record_of[r->record_id] = r;

    std::map<std::tuple<std::string, std::string, std::string, std::string>, AnswerEntry>
        answer_of;
    auto answers_dir = cfg.out_dir / "answers";
    if (std::filesystem::exists(answers_dir)) {
        for (const auto& entry : std::filesystem::directory_iterator(answers_dir)) {
            if (entry.path().extension() != ".jsonl")
                continue;
            jsonl::for_each(entry.path(), [&](std::size_t, const json& obj) {
                AnswerEntry a = answer_from_json(obj, entry.path().stem().string(),
                                                 cfg.prompts.front().nickname());
                answer_of[{a.model, a.record_id, a.mode, a.prompt}] = a;
            });
        }
    }

    std::vector<reporting::RecordEvaluation> evaluations;
    for (const auto& entry : std::filesystem::directory_iterator(checks_dir)) {
        if (entry.path().extension() != ".jsonl" || entry.path().filename() == "skipped.jsonl")
            continue;
        jsonl::for_each(entry.path(), [&](std::size_t, const json& obj) {
            reporting::RecordEvaluation eval;
            std::string record_id = obj.at("record_id").get<std::string>();
            std::string mode = obj.at("mode").get<std::string>();
            auto record_it = record_of.find(record_id);
            if (record_it == record_of.end())
                return;
            const corpus::QueryRecord& record = *record_it->second;
            eval.key.dataset = corpus::dataset_display_name(record.dataset_id);
            eval.key.model = obj.at("model").get<std::string>();
            eval.key.split = config::split_token(cfg.split);
            eval.key.mode = retrieval::mode_display(retrieval::parse_mode(mode));
            eval.key.prompt = obj.at("prompt").get<std::string>();
            eval.generation_error = obj.value("generation_error", false);
            if (!eval.generation_error && obj.contains("check")) {
                eval.check = checker::CheckResult::from_json(obj.at("check"));
                auto ans_it = answer_of.find({eval.key.model, record_id, mode,
                                              obj.at("prompt").get<std::string>()});
                if (ans_it != answer_of.end()) {
                    const AnswerEntry& a = ans_it->second;
                    eval.em = cfg.em_rule_for(record.dataset_id) == config::EmRule::strict_em
                                  ? metrics::exact_match(a.short_answer, record.short_answer)
                                  : metrics::containment_match(a.short_answer,
                                                               record.short_answer);
                    eval.rouge = metrics::rouge_l(a.long_answer, record.long_answer);
                }
            } else {
                eval.check.record_id = record_id;
            }
            evaluations.push_back(std::move(eval));
        });
    }

    auto reports_dir = cfg.out_dir / "reports";
    std::set<reporting::ReportFormat> formats = {reporting::ReportFormat::csv,
                                                 reporting::ReportFormat::markdown,
                                                 reporting::ReportFormat::jsonl};
    auto cells = reporting::aggregate_runs(evaluations);
    reporting::emit_report(cells, formats, reports_dir, "report");

    // Ambiguity vs matched-clear comparison, when the filter stage built one.
    auto amb_dir = cfg.out_dir / "filter" / "ambiguity";
    if (std::filesystem::exists(amb_dir / "ambiguous_ids.txt")) {
        auto load_ids = [](const std::filesystem::path& p) {
            std::set<std::string> ids;
            std::istringstream in(jsonl::read_text_file(p));
            std::string line;
            while (std::getline(in, line))
                if (!text::trim(line).empty())
                    ids.insert(text::trim(line));
            return ids;
        };
        auto ambiguous_ids = load_ids(amb_dir / "ambiguous_ids.txt");
        auto clear_ids = load_ids(amb_dir / "clear_ids.txt");
        std::vector<reporting::RecordEvaluation> amb_evals, clr_evals;
        for (const auto& eval : evaluations) {
            if (ambiguous_ids.count(eval.check.record_id)) {
                auto copy = eval;
                copy.key.split = "ambiguous";
                amb_evals.push_back(std::move(copy));
            } else if (clear_ids.count(eval.check.record_id)) {
                auto copy = eval;
                copy.key.split = "clear";
                clr_evals.push_back(std::move(copy));
            }
        }
        if (!amb_evals.empty() && !clr_evals.empty()) {
            auto amb_cells = reporting::aggregate_runs(amb_evals);
            auto clr_cells = reporting::aggregate_runs(clr_evals);
            reporting::emit_report(amb_cells, formats, reports_dir, "ambiguity_ambiguous");
            reporting::emit_report(clr_cells, formats, reports_dir, "ambiguity_clear");
            auto deltas = reporting::ambiguity_delta_report(amb_cells, clr_cells);
            reporting::emit_delta_report(deltas, formats, reports_dir, "ambiguity_delta");
        }
    }

    // The manifest carries a timestamp, so it lives outside reports/.
    reporting::RunManifest manifest;
    manifest.config_hash = sha256_hex(cfg.to_json().dump());
    manifest.corpus_hash = hash_tree(cfg.out_dir / "corpus");
    manifest.embedding_hash = hash_tree(cfg.out_dir / "index");
    manifest.cache_hash = hash_tree(cfg.backend.cache_dir);
    manifest.backend_kinds = {judges::backend_kind_token(cfg.backend.kind)};
    manifest.tool_version = CLAIMCHECK_VERSION;
    manifest.timestamp = now_utc_iso8601();
    jsonl::write_text_file(cfg.out_dir / "manifest.json", manifest.to_json().dump(2) + "\n");

    write_stamp(cfg, Stage::report, inputs_hash);
    return {Stage::report, false, ""};
}

std::vector<StageStatus> run_all(const PipelineConfig& cfg) {
    std::vector<StageStatus> statuses;
    statuses.push_back(run_ingest(cfg));
    statuses.push_back(run_index(cfg));
    statuses.push_back(run_filter(cfg));
    statuses.push_back(run_evaluate(cfg));
    statuses.push_back(run_check(cfg));
    statuses.push_back(run_report(cfg));
    return statuses;
}

std::vector<StageStatus> run_stage_by_name(const std::string& name, const PipelineConfig& cfg) {
    if (name == "all")
        return run_all(cfg);
    if (name == "ingest")
        return {run_ingest(cfg)};
    if (name == "index")
        return {run_index(cfg)};
    if (name == "filter")
        return {run_filter(cfg)};
    if (name == "evaluate")
        return {run_evaluate(cfg)};
    if (name == "check")
        return {run_check(cfg)};
    if (name == "report")
        return {run_report(cfg)};
    throw Error("unknown stage: " + name);
}

} // namespace claimcheck::pipeline
