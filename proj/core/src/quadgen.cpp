// SPDX-License-Identifier: Apache-2.0
#include "analogia/quadgen.hpp"

#include <sstream>

#include "analogia/error.hpp"
#include "analogia/io.hpp"
#include "analogia/rng.hpp"

namespace analogia {

std::size_t PrototypeSet::total() const {
    std::size_t n = 0;
    for (const auto& list : by_type_) n += list.size();
    return n;
}

bool PrototypeSet::contains_question(const std::string& question_id) const {
    for (const auto& list : by_type_)
        for (const auto& p : list)
            if (p.question_id == question_id) return true;
    return false;
}

PrototypeSet select_prototypes(const QADataset& dataset, std::size_t p, std::uint64_t seed,
                               std::span<const WhType> types) {
    if (p == 0) throw ContractError("prototype count must be at least 1");
    PrototypeSet out;
    for (WhType type : types) {
        std::vector<std::size_t> pool;
        for (std::size_t i = 0; i < dataset.questions.size(); ++i) {
            const auto& q = dataset.questions[i];
            if (q.wh_type == type && q.has_positive()) pool.push_back(i);
        }
        if (pool.empty()) {
            out.warnings.push_back("no answerable '" + std::string(to_string(type)) + "' questions; no prototypes");
            continue;
        }
        Rng rng(stream_seed(seed, "prototypes/" + std::string(to_string(type))));
        rng.shuffle(pool);
        if (pool.size() < p) {
            out.warnings.push_back("only " + std::to_string(pool.size()) + " answerable '" +
                                   std::string(to_string(type)) + "' questions; prototype count clamped from " +
                                   std::to_string(p));
        }
        const std::size_t take = std::min(p, pool.size());
        for (std::size_t k = 0; k < take; ++k) {
            const auto& q = dataset.questions[pool[k]];
            for (const auto& c : q.candidates) {
                if (c.label == 1) {
                    out.of(type).push_back(Prototype{q.id, q.text, c.text, type});
                    break;
                }
            }
        }
    }
    return out;
}

std::vector<Quadruple> generate_training_quadruples(const QADataset& dataset, const PrototypeSet& prototypes,
                                                    std::size_t negatives_per_positive, std::uint64_t seed) {
    Rng rng(stream_seed(seed, "negatives"));
    std::vector<Quadruple> out;
    for (WhType type : {WhType::Who, WhType::When, WhType::Where, WhType::Other}) {
        const auto& protos = prototypes.of(type);
        for (std::size_t pi = 0; pi < protos.size(); ++pi) {
            const auto& proto = protos[pi];
            for (const auto& q : dataset.questions) {
                if (q.wh_type != type || prototypes.contains_question(q.id)) continue;

                std::vector<std::size_t> wrong;
                for (std::size_t j = 0; j < q.candidates.size(); ++j)
                    if (q.candidates[j].label == 0) wrong.push_back(j);

                for (std::size_t j = 0; j < q.candidates.size(); ++j) {
                    if (q.candidates[j].label != 1) continue;
                    out.push_back(Quadruple{type, proto.question, proto.answer, q.text, q.candidates[j].text, 1, q.id,
                                            pi, j});
                    // Partial Fisher-Yates: the first n slots become a uniform sample without replacement.
                    const std::size_t n = std::min(negatives_per_positive, wrong.size());
                    std::vector<std::size_t> pool = wrong;
                    for (std::size_t k = 0; k < n; ++k) {
                        const std::size_t pick = k + static_cast<std::size_t>(rng.below(pool.size() - k));
                        std::swap(pool[k], pool[pick]);
                        const std::size_t w = pool[k];
                        out.push_back(Quadruple{type, proto.question, proto.answer, q.text, q.candidates[w].text, 0,
                                                q.id, pi, w});
                    }
                }
            }
        }
    }
    return out;
}

EvalQuadruples generate_eval_quadruples(const Question& question, const std::vector<Prototype>& prototypes) {
    EvalQuadruples out;
    if (prototypes.empty()) {
        out.skipped = true;
        return out;
    }
    out.quadruples.reserve(prototypes.size() * question.candidates.size());
    for (std::size_t pi = 0; pi < prototypes.size(); ++pi) {
        for (std::size_t j = 0; j < question.candidates.size(); ++j) {
            out.quadruples.push_back(Quadruple{question.wh_type, prototypes[pi].question, prototypes[pi].answer,
                                               question.text, question.candidates[j].text, 0, question.id, pi, j});
        }
    }
    return out;
}

std::string format_quadruples(const std::vector<Quadruple>& quadruples) {
    std::ostringstream os;
    for (const auto& q : quadruples) {
        os << to_string(q.wh_type) << '\t' << join_tokens(q.a) << '\t' << join_tokens(q.b) << '\t'
           << join_tokens(q.c) << '\t' << join_tokens(q.d) << '\t' << q.y << '\n';
    }
    return os.str();
}

std::string format_prototypes(const PrototypeSet& prototypes) {
    std::ostringstream os;
    for (WhType type : {WhType::Who, WhType::When, WhType::Where, WhType::Other}) {
        for (const auto& p : prototypes.of(type)) {
            os << to_string(type) << '\t' << p.question_id << '\t' << join_tokens(p.question) << '\t'
               << join_tokens(p.answer) << '\n';
        }
    }
    return os.str();
}

PrototypeSet parse_prototypes(const std::string& text, const std::string& source) {
    PrototypeSet out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cols = split(line, '\t');
        if (cols.size() != 4) throw ParseError(source, lineno, "expected 4 tab-separated columns");
        const auto type = parse_wh_type(cols[0]);
        if (!type) throw ParseError(source, lineno, "unknown wh-type '" + std::string(cols[0]) + "'");
        out.of(*type).push_back(Prototype{std::string(cols[1]), tokenize(cols[2]), tokenize(cols[3]), *type});
    }
    return out;
}

}  // namespace analogia
