// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#include "claimcheck/retrieval.hpp"

#include "claimcheck/error.hpp"
#include "claimcheck/jsonl.hpp"
#include "claimcheck/text.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <cstdlib>
#include <random>
#include <sstream>

namespace claimcheck::retrieval {

namespace {

constexpr double kUnitNormTolerance = 1e-6;

double clamp_score(double s) {
    return std::clamp(s, -1.0, 1.0);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

/// Top-k of `scores` rows, excluding flagged rows; (score desc, id asc).
std::vector<Scored> rank_top_k(const EmbeddingStore& store, const Eigen::VectorXd& scores,
                               const std::vector<char>& excluded, std::size_t k) {
    std::vector<Scored> candidates;
    candidates.reserve(static_cast<std::size_t>(store.size()));
    for (Eigen::Index row = 0; row < store.size(); ++row) {
        if (excluded[static_cast<std::size_t>(row)])
            continue;
        candidates.push_back({store.ids()[static_cast<std::size_t>(row)], clamp_score(scores[row])});
    }
    auto better = [](const Scored& a, const Scored& b) {
        if (a.score != b.score)
            return a.score > b.score;
        return a.id < b.id;
    };
    if (candidates.size() > k) {
        std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k),
                          candidates.end(), better);
        candidates.resize(k);
    } else {
        std::sort(candidates.begin(), candidates.end(), better);
    }
    return candidates;
}

std::vector<char> exclusion_flags(const EmbeddingStore& store, const std::set<std::string>& exclude) {
    std::vector<char> flags(static_cast<std::size_t>(store.size()), 0);
    for (Eigen::Index row = 0; row < store.size(); ++row)
        if (exclude.count(store.ids()[static_cast<std::size_t>(row)]) > 0)
            flags[static_cast<std::size_t>(row)] = 1;
    return flags;
}

} // namespace

EmbeddingStore::EmbeddingStore(std::vector<std::string> ids, RowMatrixXd vectors)
    : ids_(std::move(ids)), vectors_(std::move(vectors)) {
    if (static_cast<Eigen::Index>(ids_.size()) != vectors_.rows())
        throw Error("embedding store: id/vector count mismatch");
    row_of_.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (!row_of_.emplace(ids_[i], static_cast<Eigen::Index>(i)).second)
            throw Error("embedding store: duplicate id: " + ids_[i]);
        double norm = vectors_.row(static_cast<Eigen::Index>(i)).norm();
        if (std::abs(norm - 1.0) > kUnitNormTolerance)
            throw Error("embedding store: vector not unit-norm at id=" + ids_[i]);
    }
}

Eigen::VectorXd EmbeddingStore::vector_of(const std::string& id) const {
    auto it = row_of_.find(id);
    if (it == row_of_.end())
        throw Error("unknown embedding id: " + id);
    return vectors_.row(it->second).transpose();
}

std::string EmbeddingStore::dump() const {
    std::vector<std::size_t> order(ids_.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return ids_[a] < ids_[b]; });
    std::ostringstream out;
    out << "dim=" << dimension() << '\n';
    char buf[64];
    for (std::size_t i : order) {
        out << ids_[i];
        for (Eigen::Index c = 0; c < dimension(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", vectors_(static_cast<Eigen::Index>(i), c));
            out << '\t' << buf;
        }
        out << '\n';
    }
    return out.str();
}

EmbeddingStore build_index(const std::filesystem::path& embedding_file) {
    std::ifstream in(embedding_file);
    if (!in)
        throw Error("cannot open embedding file: " + embedding_file.string());

    std::string header;
    if (!std::getline(in, header))
        throw Error("empty embedding file: " + embedding_file.string());
    header = text::trim(header);
    if (header.rfind("dim=", 0) != 0)
        throw Error("embedding file missing dim= header: " + embedding_file.string());
    long dim = 0;
    auto [ptr, ec] = std::from_chars(header.data() + 4, header.data() + header.size(), dim);
    if (ec != std::errc() || ptr != header.data() + header.size() || dim <= 0)
        throw Error("invalid dim= header: " + header);

    std::vector<std::string> ids;
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty())
            continue;
        auto tokens = text::tokenize(line);
        const std::string& id = tokens.front();
        ids.push_back(id);
        long count = 0;
        for (std::size_t t = 1; t < tokens.size(); ++t) {
            // strtod so that nan/inf text is parsed and then rejected
            char* end = nullptr;
            double v = std::strtod(tokens[t].c_str(), &end);
            if (end != tokens[t].c_str() + tokens[t].size())
                throw Error("unparseable component at id=" + id + ": " + tokens[t]);
            if (!std::isfinite(v))
                throw Error("non-finite component at id=" + id);
            values.push_back(v);
            ++count;
        }
        if (count != dim)
            throw Error("dimension mismatch at id=" + id + ": expected " + std::to_string(dim) +
                        ", got " + std::to_string(count) + " (line " + std::to_string(line_no) +
                        ")");
    }

    RowMatrixXd mat(static_cast<Eigen::Index>(ids.size()), dim);
    for (Eigen::Index r = 0; r < mat.rows(); ++r)
        for (Eigen::Index c = 0; c < dim; ++c)
            mat(r, c) = values[static_cast<std::size_t>(r) * static_cast<std::size_t>(dim) +
                               static_cast<std::size_t>(c)];

    for (Eigen::Index r = 0; r < mat.rows(); ++r) {
        double norm = mat.row(r).norm();
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw Error("zero-norm vector at id=" + ids[static_cast<std::size_t>(r)]);
        mat.row(r) /= norm;
    }
    return EmbeddingStore(std::move(ids), std::move(mat));
}

std::vector<Scored> similar_items(const EmbeddingStore& store, const std::string& query_id,
                                  std::size_t k, const std::set<std::string>& exclude) {
    if (!store.contains(query_id))
        throw Error("unknown query id: " + query_id);
    if (k == 0)
        throw Error("k must be >= 1");
    Eigen::VectorXd query = store.vector_of(query_id);
    Eigen::VectorXd scores = store.vectors() * query;
    auto excluded = exclusion_flags(store, exclude);
    for (Eigen::Index row = 0; row < store.size(); ++row)
        if (store.ids()[static_cast<std::size_t>(row)] == query_id)
            excluded[static_cast<std::size_t>(row)] = 1;
    return rank_top_k(store, scores, excluded, k);
}

std::vector<Scored> similar_to_vector(const EmbeddingStore& store, const Eigen::VectorXd& query,
                                      std::size_t k, const std::set<std::string>& exclude) {
    if (query.size() != store.dimension())
        throw Error("query dimension mismatch: expected " + std::to_string(store.dimension()) +
                    ", got " + std::to_string(query.size()));
    Eigen::VectorXd scores = store.vectors() * query;
    auto excluded = exclusion_flags(store, exclude);
    return rank_top_k(store, scores, excluded, k);
}

std::string mode_token(RetrievalMode mode) {
    switch (mode) {
    case RetrievalMode::gt_only: return "go";
    case RetrievalMode::gt_plus_distractors: return "gpd";
    case RetrievalMode::distractors_only: return "do";
    }
    throw Error("invalid retrieval mode");
}

std::string mode_display(RetrievalMode mode) {
    switch (mode) {
    case RetrievalMode::gt_only: return "GO";
    case RetrievalMode::gt_plus_distractors: return "GPD";
    case RetrievalMode::distractors_only: return "DO";
    }
    throw Error("invalid retrieval mode");
}

RetrievalMode parse_mode(const std::string& token) {
    std::string t = text::to_lower(token);
    if (t == "go" || t == "gt_only")
        return RetrievalMode::gt_only;
    if (t == "gpd" || t == "gt_plus_distractors")
        return RetrievalMode::gt_plus_distractors;
    if (t == "do" || t == "distractors_only")
        return RetrievalMode::distractors_only;
    throw Error("unknown retrieval mode: " + token);
}

namespace {

corpus::EvidenceItem resolve_item(const corpus::CorpusStore& store, const std::string& id) {
    const corpus::EvidenceItem* item = store.find_evidence(id);
    if (item == nullptr)
        throw Error("evidence id not in corpus store: " + id);
    return *item;
}

/// Mean of the record's gold embeddings, renormalized. Empty when the record
/// has no gold evidence in this modality.
std::optional<Eigen::VectorXd> gold_centroid(const EmbeddingStore& store,
                                             const std::vector<std::string>& gold_ids) {
    if (gold_ids.empty())
        return std::nullopt;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(store.dimension());
    for (const auto& id : gold_ids)
        sum += store.vector_of(id); // throws if a gold id is missing (precondition)
    double norm = sum.norm();
    if (!(norm > 0.0))
        return std::nullopt; // gold vectors cancel out; no usable query direction
    return Eigen::VectorXd(sum / norm);
}

std::vector<Scored> pick_distractors(const EmbeddingStore& store,
                                     const Eigen::VectorXd& query,
                                     const std::set<std::string>& gold_ids, std::size_t want,
                                     const AssembleOptions& options, const std::string& record_id,
                                     corpus::Modality modality) {
    if (want == 0)
        return {};
    if (options.selection == DistractorSelection::top_k)
        return similar_to_vector(store, query, want, gold_ids);

    auto pool = similar_to_vector(store, query, want * 2, gold_ids);
    if (pool.size() <= want)
        return pool;
    std::uint64_t stream = options.seed ^ fnv1a(record_id) ^
                           (modality == corpus::Modality::image ? 0x1115afd1u : 0x2d9e2a7bu);
    std::mt19937_64 rng(stream);
    // Partial Fisher-Yates over the top-2k pool, then restore ranked order.
    // Plain modulo draws: mt19937_64 output is standardized, distributions
    // are not, and these picks must reproduce across toolchains.
    for (std::size_t i = 0; i < want; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng() % (pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(want);
    std::sort(pool.begin(), pool.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score)
            return a.score > b.score;
        return a.id < b.id;
    });
    return pool;
}

} // namespace

AssembleOutcome assemble_evidence(const corpus::QueryRecord& record, RetrievalMode mode,
                                  const corpus::CorpusStore& corpus_store,
                                  const EmbeddingStore& image_store,
                                  const EmbeddingStore& text_store,
                                  const AssembleOptions& options) {
    EvidencePack pack;
    pack.record_id = record.record_id;
    pack.mode = mode;
    pack.caps = options.caps;
    pack.sampling_seed = options.seed;

    auto fill_modality = [&](corpus::Modality modality, const EmbeddingStore& store,
                             const std::vector<std::string>& gold_ids, std::size_t cap,
                             std::vector<PackEntry>& out) -> std::optional<std::string> {
        std::set<std::string> gold_set(gold_ids.begin(), gold_ids.end());

        if (mode != RetrievalMode::distractors_only) {
            for (const auto& id : gold_ids) {
                if (out.size() >= cap)
                    break;
                out.push_back({resolve_item(corpus_store, id), Provenance::gold});
            }
        }
        if (mode == RetrievalMode::gt_only)
            return std::nullopt;

        std::size_t slots = cap > out.size() ? cap - out.size() : 0;
        auto centroid = gold_centroid(store, gold_ids);
        std::vector<Scored> picked;
        if (centroid && slots > 0)
            picked = pick_distractors(store, *centroid, gold_set, slots, options,
                                      record.record_id, modality);
        for (const auto& s : picked)
            out.push_back({resolve_item(corpus_store, s.id), Provenance::distractor});

        // DO needs distractors standing in for every modality the record has
        // gold evidence for; an empty substitute pool makes the cell unusable.
        if (mode == RetrievalMode::distractors_only && !gold_ids.empty() && out.empty())
            return "no non-gold candidates in modality " + corpus::modality_token(modality);
        return std::nullopt;
    };

    auto img_skip = fill_modality(corpus::Modality::image, image_store, record.gold_image_ids,
                                  options.caps.k_img, pack.images);
    if (img_skip)
        return {std::nullopt, *img_skip};
    auto txt_skip = fill_modality(corpus::Modality::text, text_store, record.gold_text_ids,
                                  options.caps.k_txt, pack.texts);
    if (txt_skip)
        return {std::nullopt, *txt_skip};

    return {std::move(pack), ""};
}

} // namespace claimcheck::retrieval
