// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#include "claimcheck/error.hpp"
#include "claimcheck/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct GlobalArgs {
    std::string config_path;
    std::string mode;
    std::string split;
    std::string backend;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int max_inflight = 0;
};

int run_command(const std::string& command, const GlobalArgs& args) {
    auto cfg = claimcheck::config::load_config(args.config_path);
    claimcheck::config::Overrides overrides;
    if (!args.mode.empty())
        overrides.mode = args.mode;
    if (!args.split.empty())
        overrides.split = args.split;
    if (!args.backend.empty())
        overrides.backend_kind = args.backend;
    if (args.seed_set)
        overrides.seed = args.seed;
    if (!args.out_dir.empty())
        overrides.out_dir = args.out_dir;
    if (args.max_inflight > 0)
        overrides.max_inflight = args.max_inflight;
    claimcheck::config::apply_overrides(cfg, overrides);

    std::string command_to_run = command;
    if (command == "seed-demo") {
        // Record mode: the rule-based judge answers every wire request the
        // pipeline issues and the responses land in the replay cache.
        cfg.backend.kind = claimcheck::judges::BackendKind::rule_based;
        if (cfg.backend.cache_dir.empty())
            throw claimcheck::Error("seed-demo needs backend.cache_dir in the config");
        command_to_run = "all";
    }

    auto statuses = claimcheck::pipeline::run_stage_by_name(command_to_run, cfg);
    for (const auto& status : statuses) {
        std::cout << claimcheck::pipeline::stage_token(status.stage) << ": "
                  << (status.skipped ? (status.note.empty() ? "skipped" : status.note) : "done")
                  << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"claim-level diagnostics for multimodal retrieval-augmented generation"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags are accepted after the subcommand name

    GlobalArgs args;
    app.add_option("--config,-c", args.config_path, "pipeline config file")->required();
    app.add_option("--mode", args.mode, "restrict to one retrieval mode: go|gpd|do");
    app.add_option("--split", args.split, "record split: filtered|full");
    app.add_option("--backend", args.backend, "judge backend: remote|rule|replay");
    auto* seed_opt = app.add_option("--seed", args.seed, "run seed");
    app.add_option("--out", args.out_dir, "output directory");
    app.add_option("--max-inflight", args.max_inflight, "max concurrent remote calls");

    app.add_subcommand("ingest", "normalize source files into the corpus store");
    app.add_subcommand("index", "load and canonicalize the embedding pools");
    app.add_subcommand("filter", "two-step non-triviality filter and ambiguity subsets");
    app.add_subcommand("evaluate", "assemble evidence packs and collect system answers");
    app.add_subcommand("check", "claim-level verification against the evidence");
    app.add_subcommand("report", "aggregate cells and emit csv/markdown/jsonl reports");
    app.add_subcommand("all", "run every stage in order");
    app.add_subcommand("seed-demo",
                       "record rule-based judge verdicts into the replay cache");

    CLI11_PARSE(app, argc, argv);
    args.seed_set = seed_opt->count() > 0;

    try {
        return run_command(app.get_subcommands().front()->get_name(), args);
    } catch (const claimcheck::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
