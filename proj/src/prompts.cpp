// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#include "claimcheck/prompts.hpp"

#include "claimcheck/error.hpp"

#include <array>
#include <sstream>

namespace claimcheck::judges {

namespace {

constexpr const char* kPlainInit =
    "Please read the following question and answer it using the provided evidence.";
constexpr const char* kExpertInit =
    "You are an expert analyst. Read the following question carefully and answer it "
    "precisely, grounding every statement in the provided evidence.";

struct Exemplar {
    const char* question;
    const char* answer;
};

// Fixed exemplar bank; example_style picks how many are available.
constexpr std::array<Exemplar, 6> kExemplars = {{
    {"What color is the sky on a clear day?", "Blue."},
    {"Which planet is closest to the sun?", "Mercury."},
    {"How many continents are there on Earth?", "Seven."},
    {"What gas do plants absorb during photosynthesis?", "Carbon dioxide."},
    {"In which year did the first moon landing occur?", "1969."},
    {"What is the boiling point of water at sea level in Celsius?", "100."},
}};

int style_example_count(ExampleStyle style) {
    switch (style) {
    case ExampleStyle::ex1: return 1;
    case ExampleStyle::ex3: return 3;
    case ExampleStyle::ex6: return 6;
    }
    throw Error("invalid example style");
}

const char* reasoning_block(ReasoningStyle style) {
    switch (style) {
    case ReasoningStyle::direct:
        return "Answer directly without explaining.";
    case ReasoningStyle::retrieve_then_reason:
        return "First identify the evidence relevant to the question, then reason over it "
               "step by step before answering.";
    case ReasoningStyle::structured:
        return "Organize your answer as a numbered list of evidence-backed statements.";
    case ReasoningStyle::plan_execute:
        return "First write a short plan for answering, then execute the plan to produce "
               "the answer.";
    case ReasoningStyle::verify:
        return "Draft an answer, verify each statement against the evidence, then give the "
               "final answer.";
    case ReasoningStyle::none:
        return "";
    }
    throw Error("invalid reasoning style");
}

} // namespace

void PromptConfig::validate() const {
    if (max_examples != 0 && max_examples != 5)
        throw Error("max_examples must be 0 or 5");
}

std::string PromptConfig::nickname() const {
    return init_style_token(init_style) + std::to_string(style_example_count(example_style)) +
           "-" + reasoning_token(reasoning);
}

std::string init_style_token(InitStyle v) {
    return v == InitStyle::plain ? "plain" : "expert";
}

InitStyle parse_init_style(const std::string& token) {
    if (token == "plain")
        return InitStyle::plain;
    if (token == "expert")
        return InitStyle::expert;
    throw Error("unknown init style: " + token);
}

std::string example_style_token(ExampleStyle v) {
    switch (v) {
    case ExampleStyle::ex1: return "ex1";
    case ExampleStyle::ex3: return "ex3";
    case ExampleStyle::ex6: return "ex6";
    }
    throw Error("invalid example style");
}

ExampleStyle parse_example_style(const std::string& token) {
    if (token == "ex1")
        return ExampleStyle::ex1;
    if (token == "ex3")
        return ExampleStyle::ex3;
    if (token == "ex6")
        return ExampleStyle::ex6;
    throw Error("unknown example style: " + token);
}

std::string reasoning_token(ReasoningStyle v) {
    switch (v) {
    case ReasoningStyle::direct: return "direct";
    case ReasoningStyle::retrieve_then_reason: return "retrieve_then_reason";
    case ReasoningStyle::structured: return "structured";
    case ReasoningStyle::plan_execute: return "plan_execute";
    case ReasoningStyle::verify: return "verify";
    case ReasoningStyle::none: return "none";
    }
    throw Error("invalid reasoning style");
}

ReasoningStyle parse_reasoning(const std::string& token) {
    if (token == "direct")
        return ReasoningStyle::direct;
    if (token == "retrieve_then_reason")
        return ReasoningStyle::retrieve_then_reason;
    if (token == "structured")
        return ReasoningStyle::structured;
    if (token == "plan_execute")
        return ReasoningStyle::plan_execute;
    if (token == "verify")
        return ReasoningStyle::verify;
    if (token == "none")
        return ReasoningStyle::none;
    throw Error("unknown reasoning style: " + token);
}

std::string context_order_token(ContextOrder v) {
    return v == ContextOrder::img_first ? "img_first" : "txt_first";
}

ContextOrder parse_context_order(const std::string& token) {
    if (token == "img_first")
        return ContextOrder::img_first;
    if (token == "txt_first")
        return ContextOrder::txt_first;
    throw Error("unknown context order: " + token);
}

std::string compose_prompt(const PromptConfig& config, const std::string& question,
                           const retrieval::EvidencePack& pack) {
    config.validate();
    std::ostringstream out;
    out << (config.init_style == InitStyle::plain ? kPlainInit : kExpertInit) << "\n";

    int n_examples = std::min(config.max_examples, style_example_count(config.example_style));
    for (int i = 0; i < n_examples; ++i) {
        out << "\nExample " << (i + 1) << ":\n"
            << "Question: " << kExemplars[static_cast<std::size_t>(i)].question << "\n"
            << "Answer: " << kExemplars[static_cast<std::size_t>(i)].answer << "\n";
    }

    auto emit_images = [&] {
        for (const auto& entry : pack.images) {
            out << "\n[Image";
            if (config.include_doc_ids)
                out << " " << entry.item.evidence_id;
            out << "]";
            if (entry.item.caption && !entry.item.caption->empty())
                out << " " << *entry.item.caption;
            out << "\n";
        }
    };
    auto emit_texts = [&] {
        for (const auto& entry : pack.texts) {
            out << "\n[Text";
            if (config.include_doc_ids)
                out << " " << entry.item.evidence_id;
            out << "] " << entry.item.content_ref << "\n";
        }
    };
    if (config.context_order == ContextOrder::img_first) {
        emit_images();
        emit_texts();
    } else {
        emit_texts();
        emit_images();
    }

    const char* block = reasoning_block(config.reasoning);
    if (*block != '\0')
        out << "\n" << block << "\n";

    out << "\nQuestion: " << question << "\nAnswer:";
    return out.str();
}

} // namespace claimcheck::judges
