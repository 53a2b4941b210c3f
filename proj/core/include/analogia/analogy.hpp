// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "analogia/error.hpp"
#include "analogia/tape.hpp"

namespace analogia {

using SentenceVec = std::vector<double>;

enum class LossVariant {
    hinge,    // max(E - m, 0)^2
    literal,  // max((E - m)^2, 0), i.e. (E - m)^2
};

std::string_view to_string(LossVariant v) noexcept;
LossVariant parse_loss_variant(std::string_view name);

struct HyperParams {
    double margin = 0.0;
    LossVariant loss_variant = LossVariant::hinge;
    double l2_lambda = 0.0;
    double cosine_epsilon = 1e-8;

    /// Throws ConfigError when a field is out of range.
    void validate() const;
};

/// ||(a - b) - (c - d)||
template <typename T>
double analogical_dissimilarity(std::span<const T> a, std::span<const T> b, std::span<const T> c,
                                std::span<const T> d) {
    if (a.size() != b.size() || a.size() != c.size() || a.size() != d.size()) {
        throw DimensionError("analogical_dissimilarity: vectors of lengths " + std::to_string(a.size()) + ", " +
                             std::to_string(b.size()) + ", " + std::to_string(c.size()) + ", " +
                             std::to_string(d.size()));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double r = (static_cast<double>(a[i]) - b[i]) - (static_cast<double>(c[i]) - d[i]);
        acc += r * r;
    }
    return std::sqrt(acc);
}

inline double analogical_dissimilarity(const SentenceVec& a, const SentenceVec& b, const SentenceVec& c,
                                       const SentenceVec& d) {
    return analogical_dissimilarity<double>(a, b, c, d);
}

/// Difference of two sentence vectors.
SentenceVec shift(const SentenceVec& from, const SentenceVec& to);

struct Energy {
    double value = 0.0;
    bool degenerate = false;
};

/// Cosine of the two shifts; 0 and flagged degenerate when either norm is below eps.
Energy energy(std::span<const double> f_ab, std::span<const double> f_cd, double eps = 1e-8);

/// (1 - E)^2 for y = 1; the configured margin term for y = 0.
double contrastive_loss(double energy, int y, const HyperParams& hp);

enum class RankMode { energy, dissimilarity };

std::string_view to_string(RankMode m) noexcept;
RankMode parse_rank_mode(std::string_view name);

struct RankedEntry {
    std::size_t candidate_index = 0;
    double score = 0.0;
    std::size_t best_prototype = 0;
};

/// Candidates of one question in rank order.
struct RankedList {
    std::string question_id;
    std::vector<RankedEntry> entries;
    /// Gold labels indexed by candidate index; filled in by evaluation.
    std::vector<int> labels;
    std::size_t degenerate = 0;

    /// Gold labels in rank order.
    std::vector<int> ranked_labels() const;
};

using PrototypeVecs = std::pair<SentenceVec, SentenceVec>;

/// Scores each candidate by its best prototype (max energy or min
/// dissimilarity) and sorts, keeping original order among equal scores.
/// Throws ContractError when there are no candidates or no prototypes.
RankedList rank_candidates(const SentenceVec& question, const std::vector<SentenceVec>& candidates,
                           const std::vector<PrototypeVecs>& prototypes, RankMode mode = RankMode::energy,
                           double eps = 1e-8);

// Differentiable pieces used by training.

struct EncodedQuadruple {
    Var a, b, c, d;
    int y = 0;
};

/// Cosine energy of (a - b) and (c - d) on the tape.
template <typename T>
Var energy(Tape<T>& tape, const EncodedQuadruple& q, double eps, bool* degenerate = nullptr);

template <typename T>
Var contrastive_loss(Tape<T>& tape, Var energy, int y, const HyperParams& hp);

struct BatchLoss {
    Var loss;
    Var data_term;
    std::size_t degenerate = 0;
};

/// Mean contrastive loss over the batch plus l2_lambda * sum of squared
/// `trainable` entries. Throws ContractError on an empty batch.
template <typename T>
BatchLoss batch_loss(Tape<T>& tape, std::span<const EncodedQuadruple> batch, const HyperParams& hp,
                     std::span<const Var> trainable);

}  // namespace analogia
