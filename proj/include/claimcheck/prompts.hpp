// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#pragma once

#include "claimcheck/retrieval.hpp"

#include <string>

namespace claimcheck::judges {

enum class InitStyle { plain, expert };
enum class ExampleStyle { ex1, ex3, ex6 };
enum class ReasoningStyle { direct, retrieve_then_reason, structured, plan_execute, verify, none };
enum class ContextOrder { img_first, txt_first };

/// One point of the prompt grid used for systems under test.
struct PromptConfig {
    InitStyle init_style = InitStyle::plain;
    ExampleStyle example_style = ExampleStyle::ex1;
    ReasoningStyle reasoning = ReasoningStyle::direct;
    ContextOrder context_order = ContextOrder::img_first;
    bool include_doc_ids = false;
    int max_examples = 0; // 0 or 5

    /// Throws on out-of-range values (max_examples must be 0 or 5).
    void validate() const;

    /// Grid nickname, e.g. "plain3-direct", "expert6-retrieve_then_reason".
    std::string nickname() const;

    bool operator==(const PromptConfig&) const = default;
};

std::string init_style_token(InitStyle v);
InitStyle parse_init_style(const std::string& token);
std::string example_style_token(ExampleStyle v);
ExampleStyle parse_example_style(const std::string& token);
std::string reasoning_token(ReasoningStyle v);
ReasoningStyle parse_reasoning(const std::string& token);
std::string context_order_token(ContextOrder v);
ContextOrder parse_context_order(const std::string& token);

/// Deterministic system-under-test prompt: init block, exemplars, evidence in
/// context order (ids shown iff include_doc_ids), reasoning block, question.
/// Ends with "Answer:".
std::string compose_prompt(const PromptConfig& config, const std::string& question,
                           const retrieval::EvidencePack& pack);

} // namespace claimcheck::judges
