// SPDX-License-Identifier: Apache-2.0
#include "analogia/analogy.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace analogia {

std::string_view to_string(LossVariant v) noexcept {
    return v == LossVariant::hinge ? "hinge" : "literal";
}

LossVariant parse_loss_variant(std::string_view name) {
    if (name == "hinge") return LossVariant::hinge;
    if (name == "literal") return LossVariant::literal;
    throw ConfigError("unknown loss variant '" + std::string(name) + "' (expected hinge or literal)");
}

std::string_view to_string(RankMode m) noexcept {
    return m == RankMode::energy ? "energy" : "dissimilarity";
}

RankMode parse_rank_mode(std::string_view name) {
    if (name == "energy") return RankMode::energy;
    if (name == "dissimilarity") return RankMode::dissimilarity;
    throw ConfigError("unknown ranking mode '" + std::string(name) + "' (expected energy or dissimilarity)");
}

void HyperParams::validate() const {
    if (!(margin >= -1.0 && margin <= 1.0)) throw ConfigError("margin must lie in [-1, 1]");
    if (!(l2_lambda >= 0.0)) throw ConfigError("l2 coefficient must be non-negative");
    if (!(cosine_epsilon > 0.0)) throw ConfigError("cosine epsilon must be positive");
}

SentenceVec shift(const SentenceVec& from, const SentenceVec& to) {
    if (from.size() != to.size()) throw DimensionError("shift: vectors differ in length");
    SentenceVec out(from.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = from[i] - to[i];
    return out;
}

Energy energy(std::span<const double> f_ab, std::span<const double> f_cd, double eps) {
    if (f_ab.size() != f_cd.size()) throw DimensionError("energy: shift vectors differ in length");
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < f_ab.size(); ++i) {
        ab += f_ab[i] * f_cd[i];
        aa += f_ab[i] * f_ab[i];
        bb += f_cd[i] * f_cd[i];
    }
    const double na = std::sqrt(aa), nb = std::sqrt(bb);
    if (na < eps || nb < eps) return {0.0, true};
    return {std::clamp(ab / (na * nb), -1.0, 1.0), false};
}

double contrastive_loss(double e, int y, const HyperParams& hp) {
    if (y != 0 && y != 1) throw ContractError("contrastive_loss: label must be 0 or 1, got " + std::to_string(y));
    if (y == 1) return (1.0 - e) * (1.0 - e);
    const double gap = e - hp.margin;
    if (hp.loss_variant == LossVariant::hinge) {
        const double h = std::max(gap, 0.0);
        return h * h;
    }
    return std::max(gap * gap, 0.0);
}

std::vector<int> RankedList::ranked_labels() const {
    std::vector<int> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(labels.at(e.candidate_index));
    return out;
}

RankedList rank_candidates(const SentenceVec& question, const std::vector<SentenceVec>& candidates,
                           const std::vector<PrototypeVecs>& prototypes, RankMode mode, double eps) {
    if (candidates.empty()) throw ContractError("rank_candidates: no candidates");
    if (prototypes.empty()) throw ContractError("rank_candidates: no prototypes");

    std::vector<SentenceVec> proto_shifts;
    proto_shifts.reserve(prototypes.size());
    for (const auto& [q, a] : prototypes) proto_shifts.push_back(shift(q, a));

    RankedList out;
    out.entries.resize(candidates.size());
    for (std::size_t j = 0; j < candidates.size(); ++j) {
        RankedEntry& entry = out.entries[j];
        entry.candidate_index = j;
        if (mode == RankMode::energy) {
            const SentenceVec target = shift(question, candidates[j]);
            entry.score = -std::numeric_limits<double>::infinity();
            for (std::size_t p = 0; p < proto_shifts.size(); ++p) {
                const Energy e = energy(proto_shifts[p], target, eps);
                if (e.degenerate) ++out.degenerate;
                if (e.value > entry.score) {
                    entry.score = e.value;
                    entry.best_prototype = p;
                }
            }
        } else {
            entry.score = std::numeric_limits<double>::infinity();
            for (std::size_t p = 0; p < prototypes.size(); ++p) {
                const double v =
                    analogical_dissimilarity(prototypes[p].first, prototypes[p].second, question, candidates[j]);
                if (v < entry.score) {
                    entry.score = v;
                    entry.best_prototype = p;
                }
            }
        }
    }

    if (mode == RankMode::energy) {
        std::stable_sort(out.entries.begin(), out.entries.end(),
                         [](const RankedEntry& x, const RankedEntry& y) { return x.score > y.score; });
    } else {
        std::stable_sort(out.entries.begin(), out.entries.end(),
                         [](const RankedEntry& x, const RankedEntry& y) { return x.score < y.score; });
    }
    return out;
}

template <typename T>
Var energy(Tape<T>& tape, const EncodedQuadruple& q, double eps, bool* degenerate) {
    const Var f_ab = tape.sub(q.a, q.b);
    const Var f_cd = tape.sub(q.c, q.d);
    return tape.cosine(f_ab, f_cd, static_cast<T>(eps), degenerate);
}

template <typename T>
Var contrastive_loss(Tape<T>& tape, Var e, int y, const HyperParams& hp) {
    if (y != 0 && y != 1) throw ContractError("contrastive_loss: label must be 0 or 1, got " + std::to_string(y));
    if (y == 1) return tape.square(tape.add_scalar(tape.scale(e, T{-1}), T{1}));
    const Var gap = tape.add_scalar(e, static_cast<T>(-hp.margin));
    if (hp.loss_variant == LossVariant::hinge) return tape.square(tape.relu(gap));
    return tape.square(gap);
}

template <typename T>
BatchLoss batch_loss(Tape<T>& tape, std::span<const EncodedQuadruple> batch, const HyperParams& hp,
                     std::span<const Var> trainable) {
    if (batch.empty()) throw ContractError("batch_loss: empty batch");
    BatchLoss out;
    std::vector<Var> terms;
    terms.reserve(batch.size());
    for (const auto& q : batch) {
        bool flat = false;
        const Var e = energy(tape, q, hp.cosine_epsilon, &flat);
        if (flat) ++out.degenerate;
        terms.push_back(contrastive_loss(tape, e, q.y, hp));
    }
    out.data_term = tape.mean(terms);
    out.loss = out.data_term;
    if (hp.l2_lambda > 0.0 && !trainable.empty()) {
        std::vector<Var> norms;
        for (Var p : trainable) norms.push_back(tape.sum(tape.square(p)));
        // mean * count == sum
        const Var total = tape.scale(tape.mean(norms), static_cast<T>(norms.size()));
        out.loss = tape.add(out.loss, tape.scale(total, static_cast<T>(hp.l2_lambda)));
    }
    return out;
}

#define ANALOGIA_INSTANTIATE(T)                                                                       \
    template Var energy<T>(Tape<T>&, const EncodedQuadruple&, double, bool*);                        \
    template Var contrastive_loss<T>(Tape<T>&, Var, int, const HyperParams&);                        \
    template BatchLoss batch_loss<T>(Tape<T>&, std::span<const EncodedQuadruple>, const HyperParams&, \
                                     std::span<const Var>);

ANALOGIA_INSTANTIATE(float)
ANALOGIA_INSTANTIATE(double)

#undef ANALOGIA_INSTANTIATE

}  // namespace analogia
