// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#pragma once

#include "claimcheck/corpus.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace claimcheck::retrieval {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Immutable store of unit-norm embeddings; searches are exact.
class EmbeddingStore {
public:
    EmbeddingStore(std::vector<std::string> ids, RowMatrixXd vectors);

    Eigen::Index dimension() const { return vectors_.cols(); }
    Eigen::Index size() const { return vectors_.rows(); }

    bool contains(const std::string& id) const { return row_of_.count(id) > 0; }
    const std::vector<std::string>& ids() const { return ids_; }
    Eigen::VectorXd vector_of(const std::string& id) const;

    const RowMatrixXd& vectors() const { return vectors_; }

    /// Canonical text dump: `dim=<D>` header, then `<id>\t<floats...>` per
    /// line, ids sorted, floats printed round-trip exact.
    std::string dump() const;

private:
    std::vector<std::string> ids_;
    RowMatrixXd vectors_; // one unit-norm row per id
    std::unordered_map<std::string, Eigen::Index> row_of_;
};

struct Scored {
    std::string id;
    double score = 0.0;

    bool operator==(const Scored&) const = default;
};

/// Parses an embedding file (header `dim=<D>`, then one `<id>\t<f>...` line
/// per item), renormalizes every vector to unit length.
EmbeddingStore build_index(const std::filesystem::path& embedding_file);

/// Exact top-k by cosine against a stored item. Excludes `exclude` and the
/// query id itself; ties break by ascending id; scores clamped to [-1, 1].
std::vector<Scored> similar_items(const EmbeddingStore& store, const std::string& query_id,
                                  std::size_t k, const std::set<std::string>& exclude = {});

/// Same search against an arbitrary query vector (used for centroid queries).
std::vector<Scored> similar_to_vector(const EmbeddingStore& store, const Eigen::VectorXd& query,
                                      std::size_t k, const std::set<std::string>& exclude = {});

enum class RetrievalMode { gt_only, gt_plus_distractors, distractors_only };

std::string mode_token(RetrievalMode mode);       // "go" / "gpd" / "do"
std::string mode_display(RetrievalMode mode);     // "GO" / "GPD" / "DO"
RetrievalMode parse_mode(const std::string& token);

struct Caps {
    std::size_t k_img = 3;
    std::size_t k_txt = 3;
};

enum class Provenance { gold, distractor };

struct PackEntry {
    corpus::EvidenceItem item;
    Provenance provenance = Provenance::gold;
};

struct EvidencePack {
    std::string record_id;
    RetrievalMode mode = RetrievalMode::gt_only;
    std::vector<PackEntry> images;
    std::vector<PackEntry> texts;
    Caps caps;
    std::uint64_t sampling_seed = 0;
};

enum class DistractorSelection {
    top_k,          // deterministic top-similarity fill (default)
    sample_top_2k,  // seeded uniform sample from the top-2k candidates
};

struct AssembleOptions {
    Caps caps;
    std::uint64_t seed = 0;
    DistractorSelection selection = DistractorSelection::top_k;
};

struct AssembleOutcome {
    std::optional<EvidencePack> pack;
    std::string skip_reason; // set when the cell is unusable (DO with no candidates)
};

/// Builds the evidence shown for one record under one retrieval mode.
/// Distractor mining ranks non-gold items against the centroid of the
/// record's gold embeddings of the same modality. Deterministic given
/// (record, mode, stores, options).
AssembleOutcome assemble_evidence(const corpus::QueryRecord& record, RetrievalMode mode,
                                  const corpus::CorpusStore& corpus_store,
                                  const EmbeddingStore& image_store,
                                  const EmbeddingStore& text_store,
                                  const AssembleOptions& options);

} // namespace claimcheck::retrieval
