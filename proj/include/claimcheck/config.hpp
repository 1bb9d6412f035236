// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#pragma once

#include "claimcheck/backend.hpp"
#include "claimcheck/corpus.hpp"
#include "claimcheck/filtering.hpp"
#include "claimcheck/prompts.hpp"
#include "claimcheck/retrieval.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace claimcheck::config {

struct SourceSpec {
    std::filesystem::path path;
    corpus::DatasetId dataset = corpus::DatasetId::webqa;
    corpus::SchemaMap schema_map;
};

struct AnswersFileSpec {
    std::string model;
    std::filesystem::path path;
};

struct AmbiguitySpec {
    std::filesystem::path adjudications;
    std::size_t target_size = 200;
    std::uint64_t clear_seed = 0;
};

enum class EmRule { strict_em, containment };

enum class Split { full, filtered };

std::string split_token(Split split);
Split parse_split(const std::string& token);

/// The single declarative pipeline configuration. Parsed from JSON; unknown
/// keys are rejected with their location. Relative paths resolve against the
/// config file's directory.
struct PipelineConfig {
    // corpus
    std::vector<SourceSpec> sources;
    std::filesystem::path evidence_manifest;
    // embeddings
    std::filesystem::path image_embeddings;
    std::filesystem::path text_embeddings;
    // judge backend
    judges::BackendConfig backend;
    // system under test
    std::string system_endpoint;
    std::vector<AnswersFileSpec> answers_files;
    std::string default_model_name = "system";
    // evaluation grid
    retrieval::Caps caps;
    std::vector<retrieval::RetrievalMode> modes;
    std::vector<judges::PromptConfig> prompts;
    retrieval::DistractorSelection distractor_selection =
        retrieval::DistractorSelection::top_k;
    Split split = Split::full;
    bool reference_channel = false;
    // filtering
    std::optional<filtering::FilterConfig> filter;
    std::filesystem::path signals_file;
    std::optional<AmbiguitySpec> ambiguity;
    // end-task scoring
    EmRule default_em_rule = EmRule::strict_em;
    std::map<corpus::DatasetId, EmRule> em_rule_overrides;
    // run
    std::filesystem::path out_dir = "out";
    std::uint64_t seed = 0;

    EmRule em_rule_for(corpus::DatasetId dataset) const;

    /// Canonical JSON view (used for config hashing).
    nlohmann::json to_json() const;
};

PipelineConfig load_config(const std::filesystem::path& config_path);

struct Overrides {
    std::optional<std::string> mode;
    std::optional<std::string> split;
    std::optional<std::string> backend_kind;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> max_inflight;
};

void apply_overrides(PipelineConfig& config, const Overrides& overrides);

} // namespace claimcheck::config
