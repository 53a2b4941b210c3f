// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "../oracles.hpp"
#include "analogia/error.hpp"
#include "analogia/quadgen.hpp"

using namespace analogia;

namespace {

Question make_question(const std::string& id, const std::string& text, std::vector<std::pair<std::string, int>> cands) {
    Question q;
    q.id = id;
    q.text = tokenize(text);
    q.wh_type = classify_question(q.text);
    for (auto& [t, y] : cands) q.candidates.push_back({tokenize(t), y});
    return q;
}

// Random dataset: each question gets a type opener, 1-6 candidates, and a
// random mix of labels (sometimes none positive).
QADataset random_dataset(std::mt19937_64& gen, std::size_t n) {
    const char* openers[] = {"who", "when", "where", "what"};
    QADataset ds;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::pair<std::string, int>> cands;
        const std::size_t k = 1 + gen() % 6;
        for (std::size_t c = 0; c < k; ++c) cands.emplace_back("ans " + std::to_string(c), int(gen() % 3 == 0));
        ds.questions.push_back(
            make_question("q" + std::to_string(i), std::string(openers[gen() % 4]) + " thing " + std::to_string(i),
                          cands));
    }
    return ds;
}

}  // namespace

TEST(Prototypes, SelectsUpToPOfEachTypeWithPositives) {
    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 30; ++trial) {
        const QADataset ds = random_dataset(gen, 5 + gen() % 40);
        const std::size_t p = 1 + gen() % 8;
        const PrototypeSet protos = select_prototypes(ds, p, 99);
        for (WhType t : kQuadrupleTypes) {
            std::size_t eligible = 0;
            for (const auto& q : ds.questions) eligible += q.wh_type == t && q.has_positive();
            EXPECT_EQ(protos.of(t).size(), std::min(p, eligible));
            std::set<std::string> ids;
            for (const auto& pr : protos.of(t)) {
                EXPECT_EQ(pr.wh_type, t);
                const Question* q = ds.find(pr.question_id);
                ASSERT_NE(q, nullptr);
                // Answer is the first label-1 candidate.
                const auto first_pos = std::find_if(q->candidates.begin(), q->candidates.end(),
                                                    [](const Candidate& c) { return c.label == 1; });
                EXPECT_EQ(pr.answer, first_pos->text);
                ids.insert(pr.question_id);
            }
            EXPECT_EQ(ids.size(), protos.of(t).size());
            if (eligible < p) EXPECT_FALSE(protos.warnings.empty());
        }
        EXPECT_TRUE(protos.of(WhType::Other).empty());
    }
}

TEST(Prototypes, DeterministicPerSeed) {
    std::mt19937_64 gen(2);
    const QADataset ds = random_dataset(gen, 60);
    const auto a = format_prototypes(select_prototypes(ds, 5, 17));
    EXPECT_EQ(a, format_prototypes(select_prototypes(ds, 5, 17)));
    EXPECT_NE(a, format_prototypes(select_prototypes(ds, 5, 18)));
}

TEST(Prototypes, FormatParseRoundTrip) {
    std::mt19937_64 gen(3);
    const QADataset ds = random_dataset(gen, 40);
    const PrototypeSet protos = select_prototypes(ds, 4, 5);
    const PrototypeSet back = parse_prototypes(format_prototypes(protos));
    EXPECT_EQ(format_prototypes(back), format_prototypes(protos));
    EXPECT_EQ(back.total(), protos.total());
    EXPECT_THROW(parse_prototypes("who\tq1\tonly three\n"), ParseError);
    EXPECT_THROW(parse_prototypes("why\tq1\ta\tb\n"), ParseError);
}

TEST(TrainingQuadruples, TableTwoPair) {
    QADataset ds;
    ds.questions.push_back(make_question("p1", "Who made the rotary engine automobile?",
                                         {{"Mazda continued work on developing the Wankel rotary engine.", 1}}));
    ds.questions.push_back(make_question(
        "q1", "Who discovered prions?",
        {{"Prusiner won Nobel prize last year for discovering prions", 1}, {"Prions are proteins.", 0}}));
    PrototypeSet protos;
    protos.of(WhType::Who).push_back({"p1", ds.questions[0].text, ds.questions[0].candidates[0].text, WhType::Who});
    const auto quads = generate_training_quadruples(ds, protos, 1, 0);
    ASSERT_EQ(quads.size(), 2u);
    EXPECT_EQ(quads[0].y, 1);
    EXPECT_EQ(quads[0].a, tokenize("who made the rotary engine automobile"));
    EXPECT_EQ(quads[0].c, tokenize("who discovered prions"));
    EXPECT_EQ(quads[0].d, ds.questions[1].candidates[0].text);
    EXPECT_EQ(quads[1].y, 0);
    EXPECT_EQ(quads[1].d, ds.questions[1].candidates[1].text);
}

TEST(TrainingQuadruples, PositiveCountMatchesOracleAndTypesAgree) {
    std::mt19937_64 gen(4);
    for (int trial = 0; trial < 40; ++trial) {
        const QADataset ds = random_dataset(gen, 5 + gen() % 30);
        const PrototypeSet protos = select_prototypes(ds, 1 + gen() % 4, trial);
        const std::size_t neg = gen() % 4;
        const auto quads = generate_training_quadruples(ds, protos, neg, trial);

        std::vector<std::string> ids;
        std::vector<WhType> types;
        for (WhType t : kQuadrupleTypes)
            for (const auto& p : protos.of(t)) {
                ids.push_back(p.question_id);
                types.push_back(t);
            }
        const std::size_t positives =
            std::count_if(quads.begin(), quads.end(), [](const Quadruple& q) { return q.y == 1; });
        EXPECT_EQ(positives, oracle::count_positives(ds, ids, types));

        for (const auto& q : quads) {
            EXPECT_TRUE(q.y == 0 || q.y == 1);
            const Prototype& pr = protos.of(q.wh_type)[q.prototype_index];
            EXPECT_EQ(q.a, pr.question);
            EXPECT_EQ(q.b, pr.answer);
            const Question* target = ds.find(q.question_id);
            ASSERT_NE(target, nullptr);
            EXPECT_EQ(target->wh_type, q.wh_type);
            EXPECT_FALSE(protos.contains_question(q.question_id));
            EXPECT_EQ(target->candidates[q.candidate_index].text, q.d);
            EXPECT_EQ(target->candidates[q.candidate_index].label, q.y);
        }

        // Negatives per positive: min(neg, wrong answers), distinct within a group.
        for (std::size_t i = 0; i < quads.size();) {
            ASSERT_EQ(quads[i].y, 1);
            std::size_t j = i + 1;
            std::set<std::size_t> seen;
            while (j < quads.size() && quads[j].y == 0) {
                EXPECT_TRUE(seen.insert(quads[j].candidate_index).second);
                EXPECT_EQ(quads[j].question_id, quads[i].question_id);
                ++j;
            }
            const Question* target = ds.find(quads[i].question_id);
            const std::size_t wrong = target->candidates.size() - target->positive_count();
            EXPECT_EQ(j - i - 1, std::min(neg, wrong));
            i = j;
        }
    }
}

TEST(TrainingQuadruples, DeterministicPerSeed) {
    std::mt19937_64 gen(5);
    const QADataset ds = random_dataset(gen, 50);
    const PrototypeSet protos = select_prototypes(ds, 3, 1);
    EXPECT_EQ(format_quadruples(generate_training_quadruples(ds, protos, 2, 8)),
              format_quadruples(generate_training_quadruples(ds, protos, 2, 8)));
}

TEST(EvalQuadruples, PTimesK) {
    std::mt19937_64 gen(6);
    for (int trial = 0; trial < 30; ++trial) {
        const QADataset ds = random_dataset(gen, 20);
        const PrototypeSet protos = select_prototypes(ds, 1 + gen() % 5, trial);
        for (const auto& q : ds.questions) {
            if (q.wh_type == WhType::Other) continue;
            const auto eval = generate_eval_quadruples(q, protos.of(q.wh_type));
            if (protos.of(q.wh_type).empty()) {
                EXPECT_TRUE(eval.skipped);
                EXPECT_TRUE(eval.quadruples.empty());
                continue;
            }
            EXPECT_FALSE(eval.skipped);
            EXPECT_EQ(eval.quadruples.size(), protos.of(q.wh_type).size() * q.candidates.size());
            for (std::size_t i = 0; i < eval.quadruples.size(); ++i) {
                EXPECT_EQ(eval.quadruples[i].prototype_index, i / q.candidates.size());
                EXPECT_EQ(eval.quadruples[i].candidate_index, i % q.candidates.size());
                EXPECT_EQ(eval.quadruples[i].c, q.text);
            }
        }
    }
}

TEST(EvalQuadruples, NoPrototypesFlagsSkip) {
    const Question q = make_question("x", "where is it", {{"here", 1}});
    EXPECT_TRUE(generate_eval_quadruples(q, {}).skipped);
}
