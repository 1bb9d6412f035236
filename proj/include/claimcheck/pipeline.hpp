// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#pragma once

#include "claimcheck/config.hpp"
#include "claimcheck/judges.hpp"
#include "claimcheck/reporting.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace claimcheck::pipeline {

enum class Stage { ingest, index, filter, evaluate, check, report };

std::string stage_token(Stage stage);

struct StageStatus {
    Stage stage;
    bool skipped = false; // inputs unchanged, outputs present
    std::string note;
};

/// One per-record system answer, generated or supplied as data.
struct AnswerEntry {
    std::string record_id;
    std::string mode;   // mode token ("go"/"gpd"/"do")
    std::string model;
    std::string prompt; // prompt nickname
    std::string short_answer;
    std::string long_answer;
    bool generation_error = false;
    std::string error;
};

/// Composes the grid prompt for every (record, pack) pair and queries the
/// system endpoint; responses must carry "SHORT:" and "LONG:" sections.
/// Parse failures become generation_error entries (kept, excluded from EM).
std::vector<AnswerEntry> generate_answers(const std::vector<corpus::QueryRecord>& records,
                                          const std::vector<retrieval::EvidencePack>& packs,
                                          const std::vector<judges::PromptConfig>& prompts,
                                          judges::JudgeClient& system_client,
                                          const std::string& model_name);

/// Parses a raw system response into (short, long); empty optional on
/// missing delimiters.
std::optional<std::pair<std::string, std::string>> parse_answer_sections(const std::string& raw);

StageStatus run_ingest(const config::PipelineConfig& cfg);
StageStatus run_index(const config::PipelineConfig& cfg);
StageStatus run_filter(const config::PipelineConfig& cfg);
StageStatus run_evaluate(const config::PipelineConfig& cfg);
StageStatus run_check(const config::PipelineConfig& cfg);
StageStatus run_report(const config::PipelineConfig& cfg);

std::vector<StageStatus> run_all(const config::PipelineConfig& cfg);

std::vector<StageStatus> run_stage_by_name(const std::string& name,
                                           const config::PipelineConfig& cfg);

/// Deterministic content hash of a directory tree (sorted relative paths +
/// file digests); missing directory hashes to a fixed sentinel.
std::string hash_tree(const std::filesystem::path& dir);

} // namespace claimcheck::pipeline
