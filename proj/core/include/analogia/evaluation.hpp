// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "analogia/analogy.hpp"
#include "analogia/dataset.hpp"
#include "analogia/embeddings.hpp"
#include "analogia/encoder.hpp"
#include "analogia/quadgen.hpp"
#include "analogia/real.hpp"

namespace analogia {

/// 1 / rank of the first positive in a list of labels in rank order; 0 without positives.
double reciprocal_rank(std::span<const int> ranked_labels);

/// Mean of precision@rank over the positives of one ranked label list; 0 without positives.
double average_precision(std::span<const int> ranked_labels);

/// Mean reciprocal rank. Throws DomainError on empty input or a list without positives.
double mrr(std::span<const RankedList> lists);

/// Mean average precision. Same preconditions as mrr.
double map(std::span<const RankedList> lists);

/// Maps a tokenized, non-empty sentence to a vector.
using SentenceEncoder = std::function<SentenceVec(const TokenSeq&)>;

SentenceEncoder learned_encoder(EncoderParams<Real> params, const EmbeddingTable& table);

/// Unweighted mean of the token vectors, OOV tokens included.
SentenceEncoder averaging_encoder(const EmbeddingTable& table);

/// A fresh pseudo-random vector per distinct sentence. Sanity baseline.
SentenceEncoder random_encoder(std::size_t dim, std::uint64_t seed);

struct SubsetMetrics {
    std::string subset;
    std::size_t questions = 0;
    std::size_t skipped = 0;
    double map = 0.0;
    double mrr = 0.0;
};

struct MetricsReport {
    /// who, when, where, combined
    std::vector<SubsetMetrics> rows;
    /// Ranked lists of every evaluated question, in dataset order.
    std::vector<RankedList> lists;
    std::size_t quadruples_scored = 0;
    std::size_t degenerate = 0;

    const SubsetMetrics& combined() const { return rows.back(); }
    const SubsetMetrics& row(const std::string& subset) const;
};

/// Ranks the candidates of every who/when/where question by analogy to the
/// prototypes of its type. Questions without a positive candidate, without
/// prototypes of their type, or with an empty sentence are skipped and counted.
/// Other-typed questions are not part of any subset.
MetricsReport evaluate(const SentenceEncoder& encoder, const QADataset& dataset, const PrototypeSet& prototypes,
                       RankMode mode = RankMode::energy, double eps = 1e-8);

/// The averaged-word-vector baseline under the same ranking procedure.
MetricsReport baseline_rank(const QADataset& dataset, const EmbeddingTable& table, const PrototypeSet& prototypes,
                            RankMode mode = RankMode::energy);

struct SweepRow {
    std::size_t p = 0;
    double map = 0.0;
    double mrr = 0.0;
    std::vector<std::string> warnings;
};

/// Re-selects prototypes from `prototype_source` for each p (same seed) and
/// evaluates on `dataset`.
std::vector<SweepRow> sweep_prototypes(const SentenceEncoder& encoder, const QADataset& prototype_source,
                                       const QADataset& dataset, std::span<const std::size_t> p_values,
                                       std::uint64_t seed, RankMode mode = RankMode::energy);

/// `subset<TAB>questions<TAB>skipped<TAB>MAP<TAB>MRR`
std::string format_report(const MetricsReport& report);
/// `p<TAB>MAP<TAB>MRR`
std::string format_sweep(const std::vector<SweepRow>& rows);
/// `question_id<TAB>candidate_index<TAB>score<TAB>rank<TAB>best_prototype_index`
std::string format_rankings(const std::vector<RankedList>& lists);

}  // namespace analogia
