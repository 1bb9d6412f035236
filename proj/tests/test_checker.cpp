// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#include <doctest.h>

#include "claimcheck/checker.hpp"
#include "claimcheck/jsonl.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <random>

using namespace claimcheck;
using checker::CheckResult;
using checker::JudgmentMatrix;
using checker::PairJudgment;
using judges::Label;

namespace {

PairJudgment cell(Label l) {
    return {judges::Judgment{l, ""}, ""};
}

PairJudgment errored_cell() {
    return {std::nullopt, "judging_error: down"};
}

judges::BackendConfig rule_backend() {
    judges::BackendConfig cfg;
    cfg.kind = judges::BackendKind::rule_based;
    return cfg;
}

corpus::EvidenceItem text_evidence(const std::string& id, const std::string& body) {
    corpus::EvidenceItem e;
    e.evidence_id = id;
    e.modality = corpus::Modality::text;
    e.content_ref = body;
    return e;
}

corpus::EvidenceItem image_evidence(const std::string& id, const std::string& caption) {
    corpus::EvidenceItem e;
    e.evidence_id = id;
    e.modality = corpus::Modality::image;
    e.content_ref = "unused.png"; // rule-based judging reads the caption only
    e.caption = caption;
    return e;
}

} // namespace

TEST_CASE("aggregate_label follows the precedence rule") {
    using V = std::vector<Label>;
    CHECK(*checker::aggregate_label(V{Label::neutral, Label::entailment},
                                    V{Label::contradiction}) == Label::entailment);
    CHECK(*checker::aggregate_label(V{Label::neutral},
                                    V{Label::contradiction, Label::neutral}) ==
          Label::contradiction);
    CHECK(*checker::aggregate_label(V{Label::neutral}, V{Label::neutral}) == Label::neutral);
    CHECK(!checker::aggregate_label(V{}, V{}).has_value()); // unjudgeable
}

TEST_CASE("derive_flags looks for Entailment per modality") {
    JudgmentMatrix matrix;
    matrix.claims = {"c"};
    matrix.image_ids = {"i1", "i2"};
    matrix.text_ids = {"t1"};

    matrix.image_judgments = {{cell(Label::entailment), cell(Label::neutral)}};
    matrix.text_judgments = {{cell(Label::neutral)}};
    auto [img1, txt1] = checker::derive_flags(matrix, 0);
    CHECK(img1);
    CHECK(!txt1);

    matrix.image_judgments = {{cell(Label::neutral), cell(Label::neutral)}};
    matrix.text_judgments = {{cell(Label::entailment)}};
    auto [img2, txt2] = checker::derive_flags(matrix, 0);
    CHECK(!img2);
    CHECK(txt2);

    matrix.image_judgments = {{cell(Label::contradiction), cell(Label::contradiction)}};
    matrix.text_judgments = {{cell(Label::contradiction)}};
    auto [img3, txt3] = checker::derive_flags(matrix, 0);
    CHECK(!img3);
    CHECK(!txt3);
}

TEST_CASE("mark_used collects evidence with at least one Entailment cell") {
    JudgmentMatrix matrix;
    matrix.claims = {"c1", "c2"};
    matrix.image_ids = {"I1", "I2"};
    matrix.text_ids = {"T1"};
    matrix.image_judgments = {{cell(Label::neutral), cell(Label::neutral)},
                              {cell(Label::neutral), cell(Label::neutral)}};
    matrix.text_judgments = {{cell(Label::neutral)}, {cell(Label::contradiction)}};
    CHECK(checker::mark_used(matrix).empty());

    matrix.image_judgments[1][1] = cell(Label::entailment);
    auto used = checker::mark_used(matrix);
    CHECK(used == std::set<std::string>{"I2"});
}

TEST_CASE("mark_used equals an independent column scan on random matrices") {
    std::mt19937_64 rng(555);
    std::uniform_int_distribution<int> label_pick(0, 3); // 3 = errored
    for (int iter = 0; iter < 50; ++iter) {
        JudgmentMatrix matrix;
        for (int c = 0; c < 5; ++c)
            matrix.claims.push_back("c" + std::to_string(c));
        for (int i = 0; i < 3; ++i)
            matrix.image_ids.push_back("I" + std::to_string(i));
        for (int t = 0; t < 3; ++t)
            matrix.text_ids.push_back("T" + std::to_string(t));

        std::vector<std::vector<std::optional<Label>>> oracle_rows;
        for (std::size_t c = 0; c < 5; ++c) {
            std::vector<PairJudgment> img_row, txt_row;
            std::vector<std::optional<Label>> oracle_row;
            for (int k = 0; k < 6; ++k) {
                int pick = label_pick(rng);
                PairJudgment pj = pick == 3 ? errored_cell() : cell(static_cast<Label>(pick));
                (k < 3 ? img_row : txt_row).push_back(pj);
                oracle_row.push_back(pick == 3 ? std::nullopt
                                               : std::optional<Label>(static_cast<Label>(pick)));
            }
            matrix.image_judgments.push_back(img_row);
            matrix.text_judgments.push_back(txt_row);
            oracle_rows.push_back(oracle_row);
        }
        std::vector<std::string> all_ids = {"I0", "I1", "I2", "T0", "T1", "T2"};
        CHECK(checker::mark_used(matrix) == oracles::used_columns_oracle(all_ids, oracle_rows));
    }
}

TEST_CASE("mark_used is invariant under claim order permutation") {
    std::mt19937_64 rng(777);
    JudgmentMatrix matrix;
    matrix.claims = {"a", "b", "c", "d"};
    matrix.image_ids = {"I0", "I1"};
    matrix.text_ids = {"T0"};
    std::uniform_int_distribution<int> pick(0, 2);
    for (int c = 0; c < 4; ++c) {
        matrix.image_judgments.push_back(
            {cell(static_cast<Label>(pick(rng))), cell(static_cast<Label>(pick(rng)))});
        matrix.text_judgments.push_back({cell(static_cast<Label>(pick(rng)))});
    }
    auto baseline = checker::mark_used(matrix);

    std::vector<std::size_t> order = {2, 0, 3, 1};
    JudgmentMatrix permuted;
    permuted.image_ids = matrix.image_ids;
    permuted.text_ids = matrix.text_ids;
    for (std::size_t i : order) {
        permuted.claims.push_back(matrix.claims[i]);
        permuted.image_judgments.push_back(matrix.image_judgments[i]);
        permuted.text_judgments.push_back(matrix.text_judgments[i]);
    }
    CHECK(checker::mark_used(permuted) == baseline);
}

TEST_CASE("match_gold_claims judges each gold claim against the whole answer") {
    judges::JudgeClient client(rule_backend());
    const std::string gold =
        "The marmot is large. It digs deep burrows. It sings opera at dawn.";
    const std::string generated =
        "Observations show the marmot is large. Also, it digs deep burrows every summer.";
    auto outcome = checker::match_gold_claims(gold, generated, client, {});
    REQUIRE(outcome.matches.size() == 3);
    CHECK(outcome.matches[0].matched);
    CHECK(outcome.matches[1].matched);
    CHECK(!outcome.matches[2].matched);
    CHECK(outcome.error_count == 0);
}

TEST_CASE("match_gold_claims replays identically from a recorded cache") {
    testutil::TempDir tmp("checker");
    auto cache = tmp.path() / "cache";
    // three gold claims; recorded verdicts (E, N, E) replay as (t, f, t)
    const std::string gold =
        "The chart peaks in 2019. The legend covers two series. The axis is logarithmic.";
    const std::string generated =
        "Overall the chart peaks in 2019. Note that the axis is logarithmic.";
    std::vector<bool> recorded;
    {
        judges::BackendConfig cfg = rule_backend();
        cfg.cache_dir = cache;
        judges::JudgeClient recorder(cfg);
        auto outcome = checker::match_gold_claims(gold, generated, recorder, {});
        for (const auto& m : outcome.matches)
            recorded.push_back(m.matched);
    }
    judges::BackendConfig replay;
    replay.kind = judges::BackendKind::replay;
    replay.cache_dir = cache;
    judges::JudgeClient replayer(replay);
    auto outcome = checker::match_gold_claims(gold, generated, replayer, {});
    REQUIRE(outcome.matches.size() == recorded.size());
    for (std::size_t i = 0; i < recorded.size(); ++i)
        CHECK(outcome.matches[i].matched == recorded[i]);
    CHECK(recorded == std::vector<bool>{true, false, true});
}

TEST_CASE("match_gold_claims with empty generated answer marks everything unmatched") {
    judges::JudgeClient client(rule_backend());
    auto outcome = checker::match_gold_claims("Gold claim one. Gold claim two.", "", client, {});
    REQUIRE(outcome.matches.size() == 2);
    CHECK(!outcome.matches[0].matched);
    CHECK(!outcome.matches[1].matched);
}

namespace {

struct CheckFixture {
    corpus::QueryRecord record;
    retrieval::EvidencePack pack;

    CheckFixture() {
        record.record_id = "rec1";
        record.dataset_id = corpus::DatasetId::mrag_bench;
        record.question = "What is this animal?";
        record.short_answer = "marmot";
        record.long_answer =
            "The marmot is large. Marmots live in high-altitude environments.";

        pack.record_id = "rec1";
        pack.mode = retrieval::RetrievalMode::gt_only;
        pack.caps = {3, 3};
        pack.images.push_back({image_evidence("img1", "A large marmot. The marmot is large indeed."),
                               retrieval::Provenance::gold});
        pack.images.push_back({image_evidence("img2", "Blue sky over mountains."),
                               retrieval::Provenance::gold});
        pack.texts.push_back({text_evidence("txt1", "Marmots are rodents. It eats seeds all day."),
                              retrieval::Provenance::gold});
        pack.texts.push_back({text_evidence("txt2", "Research notes: not the sky is green here."),
                              retrieval::Provenance::gold});
    }
};

} // namespace

TEST_CASE("check_answer with an answer that yields no claims") {
    CheckFixture fx;
    judges::JudgeClient client(rule_backend());
    auto result = checker::check_answer(fx.record, fx.pack, {"marmot", ""}, client, {});
    CHECK(result.verdicts.empty());
    CHECK(result.used_evidence_ids.empty());
    CHECK(!result.check_failed);
    CHECK(result.gold_reference_present);
    CHECK(result.gold_matches.size() == 2);
}

TEST_CASE("check_answer flags the unmatched high-altitude gold claim") {
    CheckFixture fx;
    judges::JudgeClient client(rule_backend());
    checker::GeneratedAnswer generated{
        "marmot", "The marmot is large. It eats seeds. The sky is green."};
    auto result = checker::check_answer(fx.record, fx.pack, generated, client, {});
    REQUIRE(result.gold_matches.size() == 2);
    CHECK(result.gold_matches[0].claim == "The marmot is large.");
    CHECK(result.gold_matches[0].matched);
    CHECK(result.gold_matches[1].claim == "Marmots live in high-altitude environments.");
    CHECK(!result.gold_matches[1].matched);
}

TEST_CASE("check_answer matches the hand-traced golden execution") {
    CheckFixture fx;
    judges::JudgeClient client(rule_backend());
    checker::GeneratedAnswer generated{
        "marmot", "The marmot is large. It eats seeds. The sky is green."};
    auto result = checker::check_answer(fx.record, fx.pack, generated, client, {});

    // Hand trace: claim 1 entailed by img1; claim 2 entailed by txt1; claim 3
    // contradicted by txt2 via the negation rule.
    REQUIRE(result.verdicts.size() == 3);
    CHECK(result.verdicts[0].claim == "The marmot is large.");
    CHECK(result.verdicts[0].label == Label::entailment);
    CHECK(result.verdicts[0].s_img);
    CHECK(!result.verdicts[0].s_txt);
    CHECK(result.verdicts[0].entailing_evidence_ids == std::set<std::string>{"img1"});
    CHECK(result.verdicts[0].matches_reference); // claim appears in the gold long answer

    CHECK(result.verdicts[1].claim == "It eats seeds.");
    CHECK(result.verdicts[1].label == Label::entailment);
    CHECK(!result.verdicts[1].s_img);
    CHECK(result.verdicts[1].s_txt);
    CHECK(result.verdicts[1].entailing_evidence_ids == std::set<std::string>{"txt1"});
    CHECK(!result.verdicts[1].matches_reference);

    CHECK(result.verdicts[2].claim == "The sky is green.");
    CHECK(result.verdicts[2].label == Label::contradiction);
    CHECK(!result.verdicts[2].s_img);
    CHECK(!result.verdicts[2].s_txt);
    CHECK(result.verdicts[2].entailing_evidence_ids.empty());

    CHECK(result.used_evidence_ids == std::set<std::string>{"img1", "txt1"});
    CHECK(result.judging_error_count == 0);
    CHECK(result.unjudgeable_claim_count == 0);

    // gold flags: "The marmot is large." is image-supported
    CHECK(result.gold_matches[0].s_img);
    CHECK(!result.gold_matches[0].s_txt);
    CHECK(!result.gold_matches[1].s_img);

    // golden file comparison (bit-exact dump schema)
    auto golden_path =
        std::filesystem::path(CLAIMCHECK_TEST_DATA_DIR) / "golden" / "check_trace.json";
    REQUIRE(std::filesystem::exists(golden_path));
    auto golden = nlohmann::json::parse(jsonl::read_text_file(golden_path));
    CHECK(result.to_json() == golden);

    // serialization round trip
    CHECK(CheckResult::from_json(result.to_json()).to_json() == result.to_json());
}

TEST_CASE("reference channel turns reference-only support into Entailment") {
    CheckFixture fx;
    fx.record.long_answer = "The marmot whistles loudly when alarmed.";
    judges::JudgeClient client(rule_backend());
    checker::GeneratedAnswer generated{"marmot", "The marmot whistles loudly when alarmed."};

    checker::CheckOptions off;
    auto without = checker::check_answer(fx.record, fx.pack, generated, client, off);
    REQUIRE(without.verdicts.size() == 1);
    CHECK(without.verdicts[0].label == Label::neutral);
    CHECK(!without.verdicts[0].reference_entailed);
    CHECK(without.verdicts[0].matches_reference);

    checker::CheckOptions on;
    on.reference_channel = true;
    auto with = checker::check_answer(fx.record, fx.pack, generated, client, on);
    REQUIRE(with.verdicts.size() == 1);
    CHECK(with.verdicts[0].label == Label::entailment);
    CHECK(with.verdicts[0].reference_entailed);
    CHECK(!with.verdicts[0].s_img);
    CHECK(!with.verdicts[0].s_txt);
    // the reference never becomes retrieved evidence
    CHECK(with.used_evidence_ids.empty());
    CHECK(with.image_ids.size() == 2);
    CHECK(with.text_ids.size() == 2);
}

TEST_CASE("label equals Entailment iff an entailment source exists (fuzz)") {
    std::mt19937_64 rng(91);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int iter = 0; iter < 40; ++iter) {
        CheckFixture fx;
        bool channel = coin(rng) == 1;
        // randomize the generated answer out of supported/unsupported parts
        std::string answer;
        if (coin(rng))
            answer += "The marmot is large. ";
        if (coin(rng))
            answer += "It eats seeds. ";
        if (coin(rng))
            answer += "Quantum squirrels rule the moon. ";
        if (coin(rng))
            answer += "Marmots live in high-altitude environments. ";
        judges::JudgeClient client(rule_backend());
        checker::CheckOptions options;
        options.reference_channel = channel;
        auto result = checker::check_answer(fx.record, fx.pack, {"marmot", answer}, client,
                                            options);
        for (const auto& v : result.verdicts) {
            if (v.unjudgeable)
                continue;
            bool has_source = v.s_img || v.s_txt || v.reference_entailed;
            CHECK((v.label == Label::entailment) == has_source);
            // single-pass judging: no flagged claim can stay Neutral
            if (v.s_img || v.s_txt)
                CHECK(v.label == Label::entailment);
        }
    }
}

TEST_CASE("check_answer aborts the record on a total judge outage") {
    CheckFixture fx;
    judges::BackendConfig replay;
    replay.kind = judges::BackendKind::replay;
    testutil::TempDir tmp("checker");
    replay.cache_dir = tmp.path() / "empty_cache";
    judges::JudgeClient client(replay);
    auto result = checker::check_answer(fx.record, fx.pack,
                                        {"marmot", "The marmot is large."}, client, {});
    CHECK(result.check_failed);
    CHECK(result.judging_error_count > 0);
    REQUIRE(result.verdicts.size() == 1);
    CHECK(result.verdicts[0].unjudgeable);
    CHECK(result.unjudgeable_claim_count == 1);
}

TEST_CASE("check_answer rejects a pack that belongs to another record") {
    CheckFixture fx;
    fx.pack.record_id = "other";
    judges::JudgeClient client(rule_backend());
    CHECK_THROWS(checker::check_answer(fx.record, fx.pack, {"a", "b"}, client, {}));
}
