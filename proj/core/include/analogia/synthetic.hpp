// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>

#include "analogia/dataset.hpp"
#include "analogia/embeddings.hpp"

namespace analogia {

/// Toy answer-selection corpus with a learnable analogy.
///
/// Questions open with who/when/where followed by filler words. Every
/// candidate repeats one of the question's filler words and adds fillers of
/// its own plus one answer marker; the correct candidate's marker comes from
/// the pool of the question's type ("person07", "date03", "place11"), the
/// wrong ones from the pools of the other two types. Word vectors are random,
/// so marker classes are not visible to a bag-of-vectors model.
struct SyntheticConfig {
    std::size_t train_per_type = 80;
    std::size_t test_per_type = 20;
    std::size_t candidates = 4;
    std::size_t fillers = 40;
    std::size_t markers_per_type = 6;
    std::size_t embedding_dim = 32;
    std::uint64_t seed = 7;
};

struct SyntheticCorpus {
    QADataset train;
    QADataset test;
    EmbeddingTable table;
};

SyntheticCorpus make_synthetic_corpus(const SyntheticConfig& config);

}  // namespace analogia
