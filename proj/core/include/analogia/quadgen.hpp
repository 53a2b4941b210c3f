// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "analogia/dataset.hpp"
#include "analogia/text.hpp"

namespace analogia {

/// A question/answer pair whose relation is taken as known.
struct Prototype {
    std::string question_id;
    TokenSeq question;
    TokenSeq answer;
    WhType wh_type = WhType::Other;
};

class PrototypeSet {
public:
    std::vector<Prototype>& of(WhType type) { return by_type_[static_cast<std::size_t>(type)]; }
    const std::vector<Prototype>& of(WhType type) const { return by_type_[static_cast<std::size_t>(type)]; }

    std::size_t total() const;
    bool contains_question(const std::string& question_id) const;

    /// Human-readable notes about empty or clamped types.
    std::vector<std::string> warnings;

private:
    std::array<std::vector<Prototype>, 4> by_type_;
};

/// [a : b :: c : d] with a, c questions and b, d answers, all of one wh-type.
struct Quadruple {
    WhType wh_type = WhType::Other;
    TokenSeq a;
    TokenSeq b;
    TokenSeq c;
    TokenSeq d;
    int y = 0;
    std::string question_id;
    std::size_t prototype_index = 0;
    std::size_t candidate_index = 0;
};

/// Up to `p` prototypes per requested type, drawn by a seeded shuffle of the
/// questions that have a correct answer. The prototype answer is the first
/// label-1 candidate.
PrototypeSet select_prototypes(const QADataset& dataset, std::size_t p, std::uint64_t seed,
                               std::span<const WhType> types = kQuadrupleTypes);

/// One positive per (prototype, question, correct answer) of the same type,
/// each followed by up to `negatives_per_positive` negatives that use distinct
/// wrong answers of that question. Prototype questions are never targets.
std::vector<Quadruple> generate_training_quadruples(const QADataset& dataset, const PrototypeSet& prototypes,
                                                    std::size_t negatives_per_positive, std::uint64_t seed);

struct EvalQuadruples {
    std::vector<Quadruple> quadruples;
    bool skipped = false;
};

/// p x k unlabeled quadruples, prototype-major. Flags a skip when the
/// question's type has no prototypes.
EvalQuadruples generate_eval_quadruples(const Question& question, const std::vector<Prototype>& prototypes);

/// `wh_type<TAB>a<TAB>b<TAB>c<TAB>d<TAB>y`
std::string format_quadruples(const std::vector<Quadruple>& quadruples);

/// `wh_type<TAB>question_id<TAB>question<TAB>answer`
std::string format_prototypes(const PrototypeSet& prototypes);
PrototypeSet parse_prototypes(const std::string& text, const std::string& source = "prototypes.tsv");

}  // namespace analogia
