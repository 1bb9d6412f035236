// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#include "claimcheck/config.hpp"

#include "claimcheck/error.hpp"
#include "claimcheck/jsonl.hpp"

#include <set>

namespace claimcheck::config {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::string& where, const std::set<std::string>& known) {
    for (const auto& [key, value] : obj.items()) {
        if (known.count(key) == 0)
            throw Error("config: unknown key \"" + key + "\" in " + where);
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_absolute())
        return path;
    return base / path;
}

judges::PromptConfig parse_prompt(const json& obj, const std::string& where) {
    require_keys(obj, where,
                 {"init", "examples", "reasoning", "context_order", "include_doc_ids",
                  "max_examples"});
    judges::PromptConfig prompt;
    if (obj.contains("init"))
        prompt.init_style = judges::parse_init_style(obj.at("init").get<std::string>());
    if (obj.contains("examples"))
        prompt.example_style = judges::parse_example_style(obj.at("examples").get<std::string>());
    if (obj.contains("reasoning"))
        prompt.reasoning = judges::parse_reasoning(obj.at("reasoning").get<std::string>());
    if (obj.contains("context_order"))
        prompt.context_order =
            judges::parse_context_order(obj.at("context_order").get<std::string>());
    if (obj.contains("include_doc_ids"))
        prompt.include_doc_ids = obj.at("include_doc_ids").get<bool>();
    if (obj.contains("max_examples"))
        prompt.max_examples = obj.at("max_examples").get<int>();
    prompt.validate();
    return prompt;
}

EmRule parse_em_rule(const std::string& token) {
    if (token == "strict_em")
        return EmRule::strict_em;
    if (token == "containment")
        return EmRule::containment;
    throw Error("config: unknown em rule: " + token);
}

std::string em_rule_token(EmRule rule) {
    return rule == EmRule::strict_em ? "strict_em" : "containment";
}

} // namespace

std::string split_token(Split split) {
    return split == Split::full ? "full" : "filtered";
}

Split parse_split(const std::string& token) {
    if (token == "full")
        return Split::full;
    if (token == "filtered")
        return Split::filtered;
    throw Error("unknown split: " + token);
}

EmRule PipelineConfig::em_rule_for(corpus::DatasetId dataset) const {
    auto it = em_rule_overrides.find(dataset);
    return it == em_rule_overrides.end() ? default_em_rule : it->second;
}

json PipelineConfig::to_json() const {
    json obj;
    json sources_json = json::array();
    for (const auto& s : sources) {
        json sj;
        sj["path"] = s.path.string();
        sj["dataset"] = corpus::dataset_token(s.dataset);
        sj["schema_map"] = s.schema_map;
        sources_json.push_back(std::move(sj));
    }
    obj["sources"] = std::move(sources_json);
    obj["evidence_manifest"] = evidence_manifest.string();
    obj["image_embeddings"] = image_embeddings.string();
    obj["text_embeddings"] = text_embeddings.string();
    obj["backend_kind"] = judges::backend_kind_token(backend.kind);
    obj["backend_endpoint"] = backend.endpoint;
    obj["backend_cache_dir"] = backend.cache_dir.string();
    obj["system_endpoint"] = system_endpoint;
    json answers = json::array();
    for (const auto& a : answers_files) {
        json aj;
        aj["model"] = a.model;
        aj["path"] = a.path.string();
        answers.push_back(std::move(aj));
    }
    obj["answers_files"] = std::move(answers);
    obj["caps"] = {{"k_img", caps.k_img}, {"k_txt", caps.k_txt}};
    json modes_json = json::array();
    for (auto mode : modes)
        modes_json.push_back(retrieval::mode_token(mode));
    obj["modes"] = std::move(modes_json);
    json prompts_json = json::array();
    for (const auto& p : prompts)
        prompts_json.push_back(p.nickname());
    obj["prompts"] = std::move(prompts_json);
    obj["distractor_selection"] =
        distractor_selection == retrieval::DistractorSelection::top_k ? "top_k" : "sample_top_2k";
    obj["split"] = split_token(split);
    obj["reference_channel"] = reference_channel;
    if (filter) {
        obj["filter"] = {{"confidence_threshold", filter->confidence_threshold},
                         {"drop_fraction", filter->drop_fraction},
                         {"w_multi_hop", filter->w_multi_hop},
                         {"w_modality_dependency", filter->w_modality_dependency},
                         {"w_baseline_success", filter->w_baseline_success}};
        obj["signals_file"] = signals_file.string();
    }
    if (ambiguity) {
        obj["ambiguity"] = {{"adjudications", ambiguity->adjudications.string()},
                            {"target_size", ambiguity->target_size},
                            {"clear_seed", ambiguity->clear_seed}};
    }
    obj["default_em_rule"] = em_rule_token(default_em_rule);
    json overrides_json;
    for (const auto& [dataset, rule] : em_rule_overrides)
        overrides_json[corpus::dataset_token(dataset)] = em_rule_token(rule);
    obj["em_rule_overrides"] = std::move(overrides_json);
    obj["out_dir"] = out_dir.string();
    obj["seed"] = seed;
    obj["default_model_name"] = default_model_name;
    return obj;
}

PipelineConfig load_config(const std::filesystem::path& config_path) {
    json root = json::parse(jsonl::read_text_file(config_path), nullptr, false);
    if (root.is_discarded()) {
        // Re-parse with exceptions on for a line-numbered message.
        try {
            json reparsed = json::parse(jsonl::read_text_file(config_path));
            (void)reparsed;
        } catch (const json::parse_error& e) {
            throw Error("config parse error: " + std::string(e.what()));
        }
        throw Error("config parse error: " + config_path.string());
    }
    const auto base = config_path.has_parent_path() ? config_path.parent_path()
                                                    : std::filesystem::path(".");

    require_keys(root, "top level",
                 {"corpus", "embeddings", "backend", "system", "caps", "modes", "prompts",
                  "distractor_selection", "split", "reference_channel", "filter", "ambiguity",
                  "em_rule", "out_dir", "seed"});

    PipelineConfig cfg;

    if (root.contains("corpus")) {
        const json& c = root.at("corpus");
        require_keys(c, "corpus", {"sources", "evidence_manifest"});
        if (c.contains("sources")) {
            for (const auto& s : c.at("sources")) {
                require_keys(s, "corpus.sources[]", {"path", "dataset", "schema_map"});
                SourceSpec spec;
                spec.path = resolve(base, s.at("path").get<std::string>());
                spec.dataset = corpus::parse_dataset_id(s.at("dataset").get<std::string>());
                if (s.contains("schema_map"))
                    for (const auto& [k, v] : s.at("schema_map").items())
                        spec.schema_map[k] = v.get<std::string>();
                cfg.sources.push_back(std::move(spec));
            }
        }
        if (c.contains("evidence_manifest"))
            cfg.evidence_manifest = resolve(base, c.at("evidence_manifest").get<std::string>());
    }

    if (root.contains("embeddings")) {
        const json& e = root.at("embeddings");
        require_keys(e, "embeddings", {"images", "texts"});
        if (e.contains("images"))
            cfg.image_embeddings = resolve(base, e.at("images").get<std::string>());
        if (e.contains("texts"))
            cfg.text_embeddings = resolve(base, e.at("texts").get<std::string>());
    }

    if (root.contains("backend")) {
        const json& b = root.at("backend");
        require_keys(b, "backend",
                     {"kind", "endpoint", "cache_dir", "max_inflight", "timeout_ms", "retries",
                      "negation_pairs"});
        if (b.contains("kind"))
            cfg.backend.kind = judges::parse_backend_kind(b.at("kind").get<std::string>());
        if (b.contains("endpoint"))
            cfg.backend.endpoint = b.at("endpoint").get<std::string>();
        if (b.contains("cache_dir"))
            cfg.backend.cache_dir = resolve(base, b.at("cache_dir").get<std::string>());
        if (b.contains("max_inflight"))
            cfg.backend.max_inflight = b.at("max_inflight").get<int>();
        if (b.contains("timeout_ms"))
            cfg.backend.timeout_ms = b.at("timeout_ms").get<int>();
        if (b.contains("retries"))
            cfg.backend.retries = b.at("retries").get<int>();
        if (b.contains("negation_pairs"))
            for (const auto& pair : b.at("negation_pairs"))
                cfg.backend.rules.negation_pairs.emplace_back(pair.at(0).get<std::string>(),
                                                              pair.at(1).get<std::string>());
    }

    if (root.contains("system")) {
        const json& s = root.at("system");
        require_keys(s, "system", {"endpoint", "answers_files", "model_name"});
        if (s.contains("endpoint"))
            cfg.system_endpoint = s.at("endpoint").get<std::string>();
        if (s.contains("model_name"))
            cfg.default_model_name = s.at("model_name").get<std::string>();
        if (s.contains("answers_files")) {
            for (const auto& a : s.at("answers_files")) {
                require_keys(a, "system.answers_files[]", {"model", "path"});
                cfg.answers_files.push_back(
                    {a.at("model").get<std::string>(), resolve(base, a.at("path").get<std::string>())});
            }
        }
    }

    if (root.contains("caps")) {
        const json& c = root.at("caps");
        require_keys(c, "caps", {"k_img", "k_txt"});
        if (c.contains("k_img"))
            cfg.caps.k_img = c.at("k_img").get<std::size_t>();
        if (c.contains("k_txt"))
            cfg.caps.k_txt = c.at("k_txt").get<std::size_t>();
    }

    if (root.contains("modes"))
        for (const auto& m : root.at("modes"))
            cfg.modes.push_back(retrieval::parse_mode(m.get<std::string>()));
    if (cfg.modes.empty())
        cfg.modes = {retrieval::RetrievalMode::gt_only};

    if (root.contains("prompts")) {
        std::size_t index = 0;
        for (const auto& p : root.at("prompts"))
            cfg.prompts.push_back(parse_prompt(p, "prompts[" + std::to_string(index++) + "]"));
    }
    if (cfg.prompts.empty())
        cfg.prompts.push_back(judges::PromptConfig{});

    if (root.contains("distractor_selection")) {
        std::string sel = root.at("distractor_selection").get<std::string>();
        if (sel == "top_k")
            cfg.distractor_selection = retrieval::DistractorSelection::top_k;
        else if (sel == "sample_top_2k")
            cfg.distractor_selection = retrieval::DistractorSelection::sample_top_2k;
        else
            throw Error("config: unknown distractor_selection: " + sel);
    }

    if (root.contains("split"))
        cfg.split = parse_split(root.at("split").get<std::string>());
    if (root.contains("reference_channel"))
        cfg.reference_channel = root.at("reference_channel").get<bool>();

    if (root.contains("filter")) {
        const json& f = root.at("filter");
        require_keys(f, "filter",
                     {"confidence_threshold", "drop_fraction", "weights", "signals"});
        filtering::FilterConfig filter;
        if (f.contains("confidence_threshold"))
            filter.confidence_threshold = f.at("confidence_threshold").get<double>();
        if (f.contains("drop_fraction"))
            filter.drop_fraction = f.at("drop_fraction").get<double>();
        if (f.contains("weights")) {
            const json& w = f.at("weights");
            require_keys(w, "filter.weights",
                         {"multi_hop", "modality_dependency", "baseline_success"});
            if (w.contains("multi_hop"))
                filter.w_multi_hop = w.at("multi_hop").get<double>();
            if (w.contains("modality_dependency"))
                filter.w_modality_dependency = w.at("modality_dependency").get<double>();
            if (w.contains("baseline_success"))
                filter.w_baseline_success = w.at("baseline_success").get<double>();
        }
        filter.validate();
        cfg.filter = filter;
        if (f.contains("signals"))
            cfg.signals_file = resolve(base, f.at("signals").get<std::string>());
    }

    if (root.contains("ambiguity")) {
        const json& a = root.at("ambiguity");
        require_keys(a, "ambiguity", {"adjudications", "target_size", "clear_seed"});
        AmbiguitySpec spec;
        spec.adjudications = resolve(base, a.at("adjudications").get<std::string>());
        if (a.contains("target_size"))
            spec.target_size = a.at("target_size").get<std::size_t>();
        if (a.contains("clear_seed"))
            spec.clear_seed = a.at("clear_seed").get<std::uint64_t>();
        cfg.ambiguity = spec;
    }

    if (root.contains("em_rule")) {
        const json& e = root.at("em_rule");
        for (const auto& [key, value] : e.items()) {
            if (key == "default")
                cfg.default_em_rule = parse_em_rule(value.get<std::string>());
            else
                cfg.em_rule_overrides[corpus::parse_dataset_id(key)] =
                    parse_em_rule(value.get<std::string>());
        }
    }

    if (root.contains("out_dir"))
        cfg.out_dir = resolve(base, root.at("out_dir").get<std::string>());
    if (root.contains("seed"))
        cfg.seed = root.at("seed").get<std::uint64_t>();

    return cfg;
}

void apply_overrides(PipelineConfig& cfg, const Overrides& overrides) {
    if (overrides.mode)
        cfg.modes = {retrieval::parse_mode(*overrides.mode)};
    if (overrides.split)
        cfg.split = parse_split(*overrides.split);
    if (overrides.backend_kind)
        cfg.backend.kind = judges::parse_backend_kind(*overrides.backend_kind);
    if (overrides.seed)
        cfg.seed = *overrides.seed;
    if (overrides.out_dir)
        cfg.out_dir = *overrides.out_dir;
    if (overrides.max_inflight)
        cfg.backend.max_inflight = *overrides.max_inflight;
}

} // namespace claimcheck::config
