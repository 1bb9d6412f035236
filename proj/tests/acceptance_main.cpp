// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

// Acceptance suite: one criterion per function, one PASS/FAIL line each,
// nonzero exit when anything fails. Oracles live in oracles.hpp and are
// independent implementations of the rules they verify.

#include "claimcheck/checker.hpp"
#include "claimcheck/filtering.hpp"
#include "claimcheck/jsonl.hpp"
#include "claimcheck/metrics.hpp"
#include "claimcheck/pipeline.hpp"
#include "claimcheck/reporting.hpp"
#include "claimcheck/retrieval.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace claimcheck;
using judges::Label;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& message) {
    if (!condition)
        throw Failure(message);
}

void require_close(const std::optional<double>& got, const std::optional<double>& expected,
                   const std::string& what, double tol = 1e-12) {
    require(got.has_value() == expected.has_value(), what + ": definedness mismatch");
    if (got)
        require(std::abs(*got - *expected) <= tol,
                what + ": " + std::to_string(*got) + " vs " + std::to_string(*expected));
}

// --- criterion 1 -------------------------------------------------------------

void criterion_precedence_exhaustive() {
    auto start = std::chrono::steady_clock::now();
    const std::array<Label, 3> labels = {Label::entailment, Label::neutral,
                                         Label::contradiction};
    std::size_t cases = 0;
    for (int code = 0; code < 729; ++code) {
        int rest = code;
        std::vector<Label> img(3), txt(3);
        for (int k = 0; k < 3; ++k) {
            img[static_cast<std::size_t>(k)] = labels[static_cast<std::size_t>(rest % 3)];
            rest /= 3;
        }
        for (int k = 0; k < 3; ++k) {
            txt[static_cast<std::size_t>(k)] = labels[static_cast<std::size_t>(rest % 3)];
            rest /= 3;
        }

        auto got = checker::aggregate_label(img, txt);
        std::vector<Label> all = img;
        all.insert(all.end(), txt.begin(), txt.end());
        require(got.has_value(), "aggregate_label empty on a full row");
        require(*got == oracles::precedence_label(all), "aggregate_label mismatch");

        checker::JudgmentMatrix matrix;
        matrix.claims = {"c"};
        matrix.image_ids = {"i0", "i1", "i2"};
        matrix.text_ids = {"t0", "t1", "t2"};
        matrix.image_judgments.resize(1);
        matrix.text_judgments.resize(1);
        for (Label l : img)
            matrix.image_judgments[0].push_back({judges::Judgment{l, ""}, ""});
        for (Label l : txt)
            matrix.text_judgments[0].push_back({judges::Judgment{l, ""}, ""});
        auto [s_img, s_txt] = checker::derive_flags(matrix, 0);
        require(s_img == oracles::flag_of(img), "s_img mismatch");
        require(s_txt == oracles::flag_of(txt), "s_txt mismatch");
        ++cases;
    }
    require(cases == 729, "expected 729 assignments");
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    require(elapsed < 1000, "took " + std::to_string(elapsed) + " ms, limit 1000 ms");
}

// --- criterion 2 -------------------------------------------------------------

void criterion_metric_oracle_equivalence() {
    std::mt19937_64 rng(20260808);
    generators::GeneratorOptions opt;
    opt.max_claims = 10;
    opt.max_images = 3;
    opt.max_texts = 3; // <= 6 evidence items
    std::vector<checker::CheckResult> batch;
    metrics::MeanAccumulator o_cr_img, o_cr_txt, o_cp_img, o_cp_txt, o_vis, o_miss, o_cma,
        o_vhr, o_dhr;
    for (std::size_t i = 0; i < 1000; ++i) {
        auto r = generators::random_check_result(rng, opt, i);
        auto core = metrics::core_metrics(r);
        auto expected = oracles::core_recount(r);
        require_close(core.hallucination_rate, expected.hallucination, "hallucination");
        require_close(core.faithfulness, expected.faithfulness, "faithfulness");
        require_close(core.contradiction_rate, expected.contradiction, "contradiction");
        require_close(core.claim_recall, expected.claim_recall, "claim recall");
        require_close(core.context_precision, expected.context_precision, "context precision");
        require_close(core.self_knowledge, expected.self_knowledge, "self-knowledge");
        if (core.hallucination_rate) {
            double sum = *core.hallucination_rate + *core.faithfulness +
                         *core.contradiction_rate;
            require(std::abs(sum - 1.0) <= 1e-12, "sum identity violated");
        }

        auto cross = metrics::cross_modality_record(r);
        auto cx = oracles::cross_recount(r);
        require_close(cross.cr_img, cx.cr_img, "cr_img");
        require_close(cross.cr_txt, cx.cr_txt, "cr_txt");
        require_close(cross.cp_img, cx.cp_img, "cp_img");
        require_close(cross.cp_txt, cx.cp_txt, "cp_txt");
        require_close(cross.vis_hit_at_k, cx.vis_hit, "vis_hit");
        require_close(cross.txt_miss_rate, cx.txt_miss, "txt_miss");
        require_close(cross.cma, cx.cma, "cma");
        require_close(cross.v_hr, cx.v_hr, "v_hr");
        require_close(cross.d_hr, cx.d_hr, "d_hr");
        if (cross.cr_img && cross.cr_txt)
            require_close(cross.delta_cr,
                          std::optional<double>(*cx.cr_img - *cx.cr_txt), "delta_cr");
        if (cross.cp_img && cross.cp_txt)
            require_close(cross.delta_cp,
                          std::optional<double>(*cx.cp_img - *cx.cp_txt), "delta_cp");

        o_cr_img.add(cx.cr_img);
        o_cr_txt.add(cx.cr_txt);
        o_cp_img.add(cx.cp_img);
        o_cp_txt.add(cx.cp_txt);
        o_vis.add(cx.vis_hit);
        o_miss.add(cx.txt_miss);
        o_cma.add(cx.cma);
        o_vhr.add(cx.v_hr);
        o_dhr.add(cx.d_hr);
        batch.push_back(std::move(r));
    }
    retrieval::Caps caps{3, 3};
    auto report = metrics::cross_modality_metrics(batch, caps);
    require_close(report.cr_img, o_cr_img.mean(), "batch cr_img");
    require_close(report.cr_txt, o_cr_txt.mean(), "batch cr_txt");
    require_close(report.cp_img, o_cp_img.mean(), "batch cp_img");
    require_close(report.cp_txt, o_cp_txt.mean(), "batch cp_txt");
    require_close(report.vis_hit_at_k, o_vis.mean(), "batch vis_hit");
    require_close(report.txt_miss_rate, o_miss.mean(), "batch txt_miss");
    require_close(report.cma, o_cma.mean(), "batch cma");
    require_close(report.v_hr, o_vhr.mean(), "batch v_hr");
    require_close(report.d_hr, o_dhr.mean(), "batch d_hr");
}

// --- criterion 3 -------------------------------------------------------------

void criterion_forced_zero_attribution() {
    std::mt19937_64 rng(333);
    generators::GeneratorOptions opt;
    opt.rule_consistent = true; // single-pass judging, reference channel off
    for (int batch_idx = 0; batch_idx < 20; ++batch_idx) {
        std::vector<checker::CheckResult> batch;
        for (std::size_t i = 0; i < 50; ++i)
            batch.push_back(generators::random_check_result(
                rng, opt, static_cast<std::size_t>(batch_idx) * 100 + i));
        retrieval::Caps caps{3, 3};
        auto report = metrics::cross_modality_metrics(batch, caps);
        if (report.v_hr)
            require(*report.v_hr == 0.0, "V-HR must be identically 0");
        if (report.d_hr)
            require(*report.d_hr == 0.0, "D-HR must be identically 0");
        for (const auto& r : batch) {
            auto m = metrics::cross_modality_record(r);
            if (m.v_hr)
                require(*m.v_hr == 0.0, "per-record V-HR must be 0");
            if (m.d_hr)
                require(*m.d_hr == 0.0, "per-record D-HR must be 0");
        }
    }
}

// --- criteria 4 and 5: retrieval ----------------------------------------------

struct FuzzWorld {
    testutil::TempDir tmp{"acc_retrieval"};
    corpus::CorpusStore corpus_store;
    std::vector<std::string> image_ids, text_ids;
    std::optional<retrieval::EmbeddingStore> images, texts;

    FuzzWorld(std::size_t n_img, std::size_t n_txt, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        auto make_store = [&](const std::string& prefix, std::size_t n, std::size_t dim,
                              std::vector<std::string>& ids, const std::string& name) {
            std::ostringstream file;
            file << "dim=" << dim << "\n";
            char buf[64];
            for (std::size_t i = 0; i < n; ++i) {
                std::snprintf(buf, sizeof(buf), "%s%04zu", prefix.c_str(), i);
                ids.push_back(buf);
                std::vector<double> v(dim);
                double norm = 0;
                for (auto& x : v) {
                    x = gauss(rng);
                    norm += x * x;
                }
                norm = std::sqrt(norm);
                file << buf;
                for (double x : v) {
                    std::snprintf(buf, sizeof(buf), "%.17g", x / norm);
                    file << '\t' << buf;
                }
                file << '\n';
            }
            auto path = testutil::write_file(tmp.path() / (name + ".emb"), file.str());
            return retrieval::build_index(path);
        };
        images.emplace(make_store("img", n_img, 16, image_ids, "img"));
        texts.emplace(make_store("txt", n_txt, 16, text_ids, "txt"));
        for (const auto& id : image_ids) {
            corpus::EvidenceItem e;
            e.evidence_id = id;
            e.modality = corpus::Modality::image;
            e.content_ref = "unused.png";
            e.caption = "caption";
            corpus_store.put_evidence(e);
        }
        for (const auto& id : text_ids) {
            corpus::EvidenceItem e;
            e.evidence_id = id;
            e.modality = corpus::Modality::text;
            e.content_ref = "passage";
            corpus_store.put_evidence(e);
        }
    }

    std::vector<std::vector<double>> store_vectors(const retrieval::EmbeddingStore& store,
                                                   const std::vector<std::string>& ids) const {
        std::vector<std::vector<double>> out;
        for (const auto& id : ids) {
            Eigen::VectorXd v = store.vector_of(id);
            out.emplace_back(v.data(), v.data() + v.size());
        }
        return out;
    }
};

void criterion_retrieval_mode_invariants() {
    std::mt19937_64 rng(444);
    std::size_t checked = 0;
    for (int world_idx = 0; world_idx < 25 && checked < 500; ++world_idx) {
        FuzzWorld world(12 + world_idx % 9, 10 + world_idx % 7,
                        9000 + static_cast<std::uint64_t>(world_idx));
        auto img_vectors = world.store_vectors(*world.images, world.image_ids);
        auto txt_vectors = world.store_vectors(*world.texts, world.text_ids);
        for (int rec_idx = 0; rec_idx < 20 && checked < 500; ++rec_idx, ++checked) {
            corpus::QueryRecord record;
            record.record_id = "r" + std::to_string(rec_idx);
            record.dataset_id = corpus::DatasetId::webqa;
            record.question = "Q?";
            record.short_answer = "A";
            std::uniform_int_distribution<std::size_t> n_gold(0, 3);
            std::set<std::string> gold_img_set, gold_txt_set;
            for (std::size_t i = 0, n = n_gold(rng); i < n; ++i)
                gold_img_set.insert(world.image_ids[rng() % world.image_ids.size()]);
            for (std::size_t i = 0, n = n_gold(rng); i < n; ++i)
                gold_txt_set.insert(world.text_ids[rng() % world.text_ids.size()]);
            record.gold_image_ids.assign(gold_img_set.begin(), gold_img_set.end());
            record.gold_text_ids.assign(gold_txt_set.begin(), gold_txt_set.end());

            retrieval::AssembleOptions options;
            auto go = retrieval::assemble_evidence(record, retrieval::RetrievalMode::gt_only,
                                                   world.corpus_store, *world.images,
                                                   *world.texts, options);
            auto gpd = retrieval::assemble_evidence(
                record, retrieval::RetrievalMode::gt_plus_distractors, world.corpus_store,
                *world.images, *world.texts, options);
            auto dos = retrieval::assemble_evidence(
                record, retrieval::RetrievalMode::distractors_only, world.corpus_store,
                *world.images, *world.texts, options);

            require(go.pack.has_value() && gpd.pack.has_value(), "GO/GPD must assemble");
            std::set<std::string> gpd_ids;
            for (const auto& e : gpd.pack->images)
                gpd_ids.insert(e.item.evidence_id);
            for (const auto& e : gpd.pack->texts)
                gpd_ids.insert(e.item.evidence_id);
            for (const auto& e : go.pack->images)
                require(gpd_ids.count(e.item.evidence_id) == 1, "GO gold not inside GPD");
            for (const auto& e : go.pack->texts)
                require(gpd_ids.count(e.item.evidence_id) == 1, "GO gold not inside GPD");

            if (dos.pack) {
                for (const auto& e : dos.pack->images)
                    require(gold_img_set.count(e.item.evidence_id) == 0, "gold id in DO pack");
                for (const auto& e : dos.pack->texts)
                    require(gold_txt_set.count(e.item.evidence_id) == 0, "gold id in DO pack");
            } else {
                require(!dos.skip_reason.empty(), "DO skip without reason");
            }

            // GPD distractors equal the exhaustive top-similarity oracle
            auto check_side = [&](const std::vector<retrieval::PackEntry>& side,
                                  const std::vector<std::string>& gold,
                                  const std::set<std::string>& gold_set,
                                  const std::vector<std::string>& all_ids,
                                  const std::vector<std::vector<double>>& all_vectors) {
                std::size_t gold_in_pack = std::min<std::size_t>(gold.size(), 3);
                for (std::size_t i = 0; i < gold_in_pack; ++i)
                    require(side[i].item.evidence_id == gold[i], "gold prefix broken");
                std::size_t slots = 3 - gold_in_pack;
                if (gold.empty() || slots == 0) {
                    require(side.size() == gold_in_pack, "unexpected distractors");
                    return;
                }
                // centroid of gold vectors, renormalized
                std::vector<double> centroid(all_vectors[0].size(), 0.0);
                for (const auto& gid : gold) {
                    std::size_t row = static_cast<std::size_t>(
                        std::find(all_ids.begin(), all_ids.end(), gid) - all_ids.begin());
                    for (std::size_t d = 0; d < centroid.size(); ++d)
                        centroid[d] += all_vectors[row][d];
                }
                double norm = 0;
                for (double x : centroid)
                    norm += x * x;
                norm = std::sqrt(norm);
                for (double& x : centroid)
                    x /= norm;
                auto expected = oracles::brute_force_top_k(all_ids, all_vectors, centroid,
                                                           slots, gold_set);
                require(side.size() == gold_in_pack + expected.size(),
                        "distractor count mismatch");
                for (std::size_t i = 0; i < expected.size(); ++i)
                    require(side[gold_in_pack + i].item.evidence_id == expected[i].id,
                            "distractor ranking mismatch");
            };
            check_side(gpd.pack->images, record.gold_image_ids, gold_img_set, world.image_ids,
                       img_vectors);
            check_side(gpd.pack->texts, record.gold_text_ids, gold_txt_set, world.text_ids,
                       txt_vectors);
        }
    }
    require(checked == 500, "expected 500 fuzz cases, got " + std::to_string(checked));
}

void criterion_exact_search_oracle() {
    for (std::size_t n : {64UL, 313UL, 1000UL}) {
        FuzzWorld world(n, 2, 7000 + n);
        auto vectors = world.store_vectors(*world.images, world.image_ids);
        for (std::size_t q = 0; q < n; q += (n / 13 + 1)) {
            const std::string& query_id = world.image_ids[q];
            auto got = retrieval::similar_items(*world.images, query_id, 25);
            auto expected =
                oracles::brute_force_top_k(world.image_ids, vectors, vectors[q], 25, {query_id});
            require(got.size() == expected.size(), "result size mismatch");
            for (std::size_t i = 0; i < got.size(); ++i)
                require(got[i].id == expected[i].id,
                        "rank " + std::to_string(i) + " differs on store of " +
                            std::to_string(n));
        }
    }
}

// --- criterion 6 -------------------------------------------------------------

int run_cli(const std::string& args) {
    std::string command = std::string("\"") + CLAIMCHECK_CLI_PATH + "\" " + args +
                          " > /dev/null 2>&1";
    return std::system(command.c_str());
}

void collect_tree(const std::filesystem::path& root,
                  std::map<std::string, std::string>& out) {
    for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file())
            continue;
        if (entry.path().filename() == "manifest.json")
            continue; // carries a timestamp by design
        out[std::filesystem::relative(entry.path(), root).generic_string()] =
            jsonl::read_text_file(entry.path());
    }
}

void criterion_determinism_replay() {
    testutil::TempDir tmp("acc_demo");
    std::filesystem::copy(CLAIMCHECK_DEMO_DIR, tmp.path() / "demo",
                          std::filesystem::copy_options::recursive);
    std::filesystem::remove_all(tmp.path() / "demo" / "cache");
    std::filesystem::remove_all(tmp.path() / "demo" / "out");
    auto cfg = (tmp.path() / "demo" / "config.json").string();

    require(run_cli("seed-demo --config \"" + cfg + "\" --out \"" +
                    (tmp.path() / "seed_out").string() + "\"") == 0,
            "seed-demo failed");

    auto start = std::chrono::steady_clock::now();
    require(run_cli("all --config \"" + cfg + "\" --backend replay --out \"" +
                    (tmp.path() / "out_a").string() + "\"") == 0,
            "first replay run failed");
    require(run_cli("all --config \"" + cfg + "\" --backend replay --out \"" +
                    (tmp.path() / "out_b").string() + "\"") == 0,
            "second replay run failed");
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    require(elapsed < 10000, "two replay runs took " + std::to_string(elapsed) + " ms");

    std::map<std::string, std::string> tree_a, tree_b;
    collect_tree(tmp.path() / "out_a", tree_a);
    collect_tree(tmp.path() / "out_b", tree_b);
    require(!tree_a.empty(), "first run produced no artifacts");
    require(tree_a.size() == tree_b.size(), "artifact sets differ");
    for (const auto& [rel, content] : tree_a) {
        auto it = tree_b.find(rel);
        require(it != tree_b.end(), "missing artifact in second run: " + rel);
        require(it->second == content, "artifact differs between runs: " + rel);
    }
    require(tree_a.count("reports/report.csv") == 1, "report.csv missing");
    require(tree_a.count("reports/report.jsonl") == 1, "report.jsonl missing");
    require(tree_a.count("reports/ambiguity_delta.csv") == 1, "ambiguity delta missing");
}

// --- criterion 7 -------------------------------------------------------------

void criterion_ambiguity_accounting() {
    auto fixture_dir = std::filesystem::path(CLAIMCHECK_TEST_DATA_DIR) / "fixtures" /
                       "ambiguity";
    auto adjudications =
        filtering::load_adjudications(fixture_dir / "adjudications.jsonl");
    require(adjudications.size() == 280, "fixture must hold 280 candidates");

    std::vector<corpus::QueryRecord> records;
    jsonl::for_each(fixture_dir / "records.jsonl", [&](std::size_t, const nlohmann::json& obj) {
        corpus::QueryRecord r;
        r.record_id = obj.at("record_id").get<std::string>();
        r.dataset_id = corpus::parse_dataset_id(obj.at("dataset").get<std::string>());
        r.question = obj.at("question").get<std::string>();
        r.short_answer = obj.at("short_answer").get<std::string>();
        if (obj.contains("evidence_imgs"))
            for (const auto& id : obj.at("evidence_imgs"))
                r.gold_image_ids.push_back(id.get<std::string>());
        records.push_back(std::move(r));
    });

    auto subset = filtering::build_ambiguity_subset(records, adjudications, 200, 7);
    require(subset.accounting.final_total == 200,
            "final total is " + std::to_string(subset.accounting.final_total));
    require(subset.accounting.text_only_total == 184,
            "text-only total is " + std::to_string(subset.accounting.text_only_total));
    require(subset.accounting.image_conditioned_total == 16,
            "image-conditioned total is " +
                std::to_string(subset.accounting.image_conditioned_total));

    std::vector<std::string> labels_a, labels_b;
    for (const auto& adj : adjudications) {
        labels_a.push_back(adj.annotator_a);
        labels_b.push_back(adj.annotator_b);
    }
    double kappa = filtering::cohen_kappa(labels_a, labels_b);
    require(std::abs(kappa - 0.74) <= 0.005,
            "kappa " + std::to_string(kappa) + " outside 0.74 +- 0.005");
}

// --- criterion 8 -------------------------------------------------------------

void criterion_delta_arithmetic() {
    reporting::ReportCell ambiguous, clear;
    ambiguous.key = {"WebQA", "model", "ambiguous", "GPD", "plain1-direct"};
    clear.key = {"WebQA", "model", "clear", "GPD", "plain1-direct"};
    ambiguous.metrics.em = 0.176;
    clear.metrics.em = 0.235;
    ambiguous.metrics.hallucination = 0.587;
    clear.metrics.hallucination = 0.492;
    ambiguous.metrics.claim_recall = 0.208;
    clear.metrics.claim_recall = 0.241;
    ambiguous.metrics.context_precision = 0.686;
    clear.metrics.context_precision = 0.702;
    auto rows = reporting::ambiguity_delta_report({ambiguous}, {clear});
    require(rows.size() == 1, "expected one delta row");
    require(reporting::render_delta(rows[0].d_em) == "-5.9", "delta EM mismatch");
    require(reporting::render_delta(rows[0].d_hallucination) == "+9.5",
            "delta hallucination mismatch");
    require(reporting::render_delta(rows[0].d_claim_recall) == "-3.3", "delta CR mismatch");
    require(reporting::render_delta(rows[0].d_context_precision) == "-1.6",
            "delta CP mismatch");
}

// --- criterion 9 -------------------------------------------------------------

void criterion_rouge_and_kappa_oracles() {
    std::mt19937_64 rng(616);
    std::uniform_int_distribution<std::size_t> len(0, 40);
    std::uniform_int_distribution<int> vocab(0, 7);
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<std::string> pred_tokens, ref_tokens;
        for (std::size_t i = 0, n = len(rng); i < n; ++i)
            pred_tokens.push_back("t" + std::to_string(vocab(rng)));
        for (std::size_t i = 0, n = len(rng); i < n; ++i)
            ref_tokens.push_back("t" + std::to_string(vocab(rng)));
        std::string pred, ref;
        for (const auto& t : pred_tokens)
            pred += t + " ";
        for (const auto& t : ref_tokens)
            ref += t + " ";
        double expected = oracles::rouge_l_oracle(pred_tokens, ref_tokens);
        require(std::abs(metrics::rouge_l(pred, ref) - expected) <= 1e-12,
                "rouge mismatch at iter " + std::to_string(iter));
    }

    std::uniform_int_distribution<int> label(0, 2);
    const std::vector<std::string> alphabet = {"A", "B", "C"};
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<std::string> a, b;
        for (int i = 0; i < 60; ++i) {
            a.push_back(alphabet[static_cast<std::size_t>(label(rng))]);
            b.push_back(alphabet[static_cast<std::size_t>(label(rng))]);
        }
        double expected = oracles::kappa_oracle(a, b);
        require(std::abs(filtering::cohen_kappa(a, b) - expected) <= 1e-12,
                "kappa mismatch at iter " + std::to_string(iter));
    }
}

// --- criterion 10 ------------------------------------------------------------

void criterion_filter_counts() {
    std::mt19937_64 rng(1010);
    std::vector<corpus::QueryRecord> records;
    filtering::SignalMap signals;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::vector<std::pair<corpus::DatasetId, int>> composition = {
        {corpus::DatasetId::webqa, 40},
        {corpus::DatasetId::chart_rag, 35},
        {corpus::DatasetId::mrag_bench, 25}};
    int counter = 0;
    for (const auto& [dataset, count] : composition) {
        for (int i = 0; i < count; ++i) {
            corpus::QueryRecord r;
            char buf[16];
            std::snprintf(buf, sizeof(buf), "f%03d", counter++);
            r.record_id = buf;
            r.dataset_id = dataset;
            r.question = "Question " + std::to_string(counter) + "?";
            r.short_answer = "answer" + std::to_string(counter);
            records.push_back(r);
            signals[r.record_id] = {unit(rng) > 0.5, unit(rng) > 0.5, unit(rng)};
        }
    }
    filtering::FilterConfig cfg;
    auto outcome = filtering::difficulty_filter(records, signals, cfg);
    std::map<corpus::DatasetId, std::size_t> dropped_per_dataset;
    std::map<std::string, corpus::DatasetId> dataset_of;
    for (const auto& r : records)
        dataset_of[r.record_id] = r.dataset_id;
    for (const auto& d : outcome.dropped)
        ++dropped_per_dataset[dataset_of[d.record_id]];
    require(dropped_per_dataset[corpus::DatasetId::webqa] == 4, "webqa drop != floor(0.1*40)");
    require(dropped_per_dataset[corpus::DatasetId::chart_rag] == 3,
            "chart drop != floor(0.1*35)");
    require(dropped_per_dataset[corpus::DatasetId::mrag_bench] == 2,
            "mrag drop != floor(0.1*25)");
    require(outcome.kept.size() + outcome.dropped.size() == records.size(),
            "stage-2 partition leaks records");

    // stage-1 reasons partition: nothing both kept and dropped, union exact
    judges::BackendConfig rule;
    rule.kind = judges::BackendKind::rule_based;
    judges::JudgeClient client(rule);
    std::vector<corpus::QueryRecord> stage1_records = records;
    stage1_records[0].question = "Is answer1 the answer1 we want?"; // verbatim drop
    stage1_records[0].short_answer = "answer1";
    auto partition = filtering::retrieval_independent_filter(stage1_records, client, cfg);
    std::set<std::string> seen;
    for (const auto& d : partition.dropped)
        require(seen.insert(d.record_id).second, "record dropped twice");
    for (const auto& k : partition.kept)
        require(seen.insert(k.record_id).second, "record both kept and dropped");
    require(seen.size() == stage1_records.size(), "stage-1 partition incomplete");
    for (const auto& d : partition.dropped)
        require(d.reason == "verbatim_in_question" || d.reason == "closed_book",
                "unexpected drop reason " + d.reason);
}

// --- criterion 11 ------------------------------------------------------------

void criterion_end_to_end_sanity() {
    corpus::CorpusStore store;
    auto add_text = [&](const std::string& id, const std::string& body) {
        corpus::EvidenceItem e;
        e.evidence_id = id;
        e.modality = corpus::Modality::text;
        e.content_ref = body;
        store.put_evidence(e);
    };
    add_text("t1", "The kite surveys the valley. The kite has a forked tail.");
    add_text("t2", "The lighthouse was built in 1901. The lighthouse is striped.");
    add_text("t3", "The chart peaks in March. The legend lists two series.");
    add_text("t4", "The marmot whistles when alarmed. The marmot digs burrows.");
    add_text("t5", "The bridge spans the river. The bridge opened in 1932.");

    judges::BackendConfig rule;
    rule.kind = judges::BackendKind::rule_based;
    judges::JudgeClient client(rule);

    struct Spec {
        const char* id;
        const char* evidence;
        const char* supported_long;
    };
    const std::vector<Spec> specs = {
        {"r1", "t1", "The kite surveys the valley. The kite has a forked tail."},
        {"r2", "t2", "The lighthouse was built in 1901. The lighthouse is striped."},
        {"r3", "t3", "The chart peaks in March. The legend lists two series."},
        {"r4", "t4", "The marmot whistles when alarmed. The marmot digs burrows."},
        {"r5", "t5", "The bridge spans the river. The bridge opened in 1932."},
    };
    for (const auto& spec : specs) {
        corpus::QueryRecord record;
        record.record_id = spec.id;
        record.dataset_id = corpus::DatasetId::webqa;
        record.question = "Describe the subject.";
        record.short_answer = "subject";
        record.gold_text_ids = {spec.evidence};
        retrieval::EvidencePack pack;
        pack.record_id = spec.id;
        pack.mode = retrieval::RetrievalMode::gt_only;
        pack.texts.push_back({*store.find_evidence(spec.evidence),
                              retrieval::Provenance::gold});

        // all claims are evidence substrings
        auto clean = checker::check_answer(record, pack, {"subject", spec.supported_long},
                                           client, {});
        auto clean_metrics = metrics::core_metrics(clean);
        require(clean_metrics.claim_count == 2, "expected two claims");
        require(clean_metrics.faithfulness && *clean_metrics.faithfulness == 1.0,
                "faithfulness must be 1.0");
        require(clean_metrics.hallucination_rate && *clean_metrics.hallucination_rate == 0.0,
                "hallucination must be 0.0");

        // one injected unsupported sentence moves hallucination to exactly 1/|C|
        std::string polluted = std::string(spec.supported_long) +
                               " Invisible dragons certified this fact.";
        auto dirty = checker::check_answer(record, pack, {"subject", polluted}, client, {});
        auto dirty_metrics = metrics::core_metrics(dirty);
        require(dirty_metrics.claim_count == 3, "expected three claims");
        require(dirty_metrics.hallucination_rate &&
                    *dirty_metrics.hallucination_rate ==
                        1.0 / static_cast<double>(dirty_metrics.claim_count),
                "hallucination must be exactly 1/|C|");
        require(*dirty_metrics.faithfulness == 2.0 / 3.0, "faithfulness must drop to 2/3");
    }
}

struct Criterion {
    int number;
    std::string name;
    std::function<void()> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "precedence-rule exhaustiveness (729 assignments, < 1 s)",
         criterion_precedence_exhaustive},
        {2, "metric oracle equivalence (1000 randomized results, 1e-12)",
         criterion_metric_oracle_equivalence},
        {3, "forced-zero attribution (V-HR = D-HR = 0)", criterion_forced_zero_attribution},
        {4, "retrieval-mode invariants (500 fuzzed cases)", criterion_retrieval_mode_invariants},
        {5, "exact-search oracle (stores up to 1000 vectors)", criterion_exact_search_oracle},
        {6, "determinism/replay on the demo corpus (< 10 s)", criterion_determinism_replay},
        {7, "ambiguity accounting (184 + 16 = 200, kappa 0.74 +- 0.005)",
         criterion_ambiguity_accounting},
        {8, "delta arithmetic (-5.9, +9.5, -3.3, -1.6)", criterion_delta_arithmetic},
        {9, "ROUGE-L and kappa oracles (100 instances, 1e-12)",
         criterion_rouge_and_kappa_oracles},
        {10, "filter counts (floor(0.10 n) per dataset; exact partitions)",
         criterion_filter_counts},
        {11, "end-to-end sanity with the rule-based judge", criterion_end_to_end_sanity},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        try {
            criterion.run();
            std::cout << "PASS criterion " << criterion.number << ": " << criterion.name
                      << "\n";
        } catch (const std::exception& e) {
            ++failures;
            std::cout << "FAIL criterion " << criterion.number << ": " << criterion.name
                      << " — " << e.what() << "\n";
        }
    }
    if (failures > 0) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all 11 criteria passed\n";
    return 0;
}
