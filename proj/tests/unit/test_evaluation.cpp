// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "../oracles.hpp"
#include "analogia/error.hpp"
#include "analogia/evaluation.hpp"
#include "analogia/synthetic.hpp"

using namespace analogia;

namespace {

RankedList list_with_labels(std::vector<int> ranked) {
    RankedList l;
    for (std::size_t i = 0; i < ranked.size(); ++i) l.entries.push_back({i, 0.0, 0});
    l.labels = std::move(ranked);
    return l;
}

}  // namespace

TEST(Metrics, WorkedExamples) {
    const std::vector<int> a{0, 1, 0, 1};
    EXPECT_DOUBLE_EQ(reciprocal_rank(a), 0.5);
    EXPECT_DOUBLE_EQ(average_precision(a), 0.5);
    const std::vector<int> b{1, 0, 0};
    EXPECT_DOUBLE_EQ(reciprocal_rank(b), 1.0);
    EXPECT_DOUBLE_EQ(average_precision(b), 1.0);
    const std::vector<int> c{0, 0, 0};
    EXPECT_DOUBLE_EQ(reciprocal_rank(c), 0.0);
    EXPECT_DOUBLE_EQ(average_precision(c), 0.0);
}

TEST(Metrics, TwoQuestionMean) {
    const std::vector<RankedList> lists{list_with_labels({0, 1, 0, 1}), list_with_labels({1, 0, 0})};
    EXPECT_DOUBLE_EQ(mrr(lists), 0.75);
    EXPECT_DOUBLE_EQ(map(lists), 0.75);
}

TEST(Metrics, Preconditions) {
    EXPECT_THROW(mrr(std::span<const RankedList>{}), DomainError);
    EXPECT_THROW(map(std::span<const RankedList>{}), DomainError);
    const std::vector<RankedList> lists{list_with_labels({0, 0})};
    EXPECT_THROW(mrr(lists), DomainError);
    EXPECT_THROW(map(lists), DomainError);
}

TEST(Metrics, MatchOracleAndBounds) {
    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<int> labels(1 + gen() % 12);
        for (auto& y : labels) y = int(gen() % 3 == 0);
        labels[gen() % labels.size()] = 1;
        const double rr = reciprocal_rank(labels), ap = average_precision(labels);
        EXPECT_NEAR(rr, oracle::reciprocal_rank(labels), 1e-15);
        EXPECT_NEAR(ap, oracle::average_precision(labels), 1e-12);
        EXPECT_GT(rr, 0.0);
        EXPECT_LE(rr, 1.0);
        EXPECT_GT(ap, 0.0);
        EXPECT_LE(ap, 1.0);
        // With a single positive, AP and RR coincide.
        if (std::count(labels.begin(), labels.end(), 1) == 1) EXPECT_DOUBLE_EQ(ap, rr);
        // Moving the first positive to the top gives RR 1.
        std::vector<int> top = labels;
        std::stable_partition(top.begin(), top.end(), [](int y) { return y == 1; });
        EXPECT_DOUBLE_EQ(reciprocal_rank(top), 1.0);
        EXPECT_DOUBLE_EQ(average_precision(top), 1.0);
    }
}

TEST(Evaluate, SkipsAndSubsets) {
    const auto corpus = make_synthetic_corpus(SyntheticConfig{6, 3, 4, 50, 5, 8, 2});
    QADataset test = corpus.test;
    // A question without positives and an other-typed question.
    Question none = test.questions[0];
    none.id = "no-positive";
    for (auto& c : none.candidates) c.label = 0;
    test.questions.push_back(none);
    Question other = test.questions[1];
    other.id = "other";
    other.text[0] = "what";
    other.wh_type = WhType::Other;
    test.questions.push_back(other);

    PrototypeSet protos = select_prototypes(corpus.train, 2, 1);
    protos.of(WhType::Where).clear();

    const auto report = evaluate(averaging_encoder(corpus.table), test, protos);
    ASSERT_EQ(report.rows.size(), 4u);
    EXPECT_EQ(report.rows[0].subset, "who");
    EXPECT_EQ(report.rows[1].subset, "when");
    EXPECT_EQ(report.rows[2].subset, "where");
    EXPECT_EQ(report.combined().subset, "combined");
    EXPECT_EQ(report.row("where").questions, 0u);
    EXPECT_EQ(report.row("where").skipped, 3u);
    const std::size_t no_pos_type_skips = test.questions[0].wh_type == WhType::Where ? 0 : 1;
    EXPECT_EQ(report.combined().skipped, 3u + no_pos_type_skips);
    EXPECT_EQ(report.combined().questions, 6u);
    EXPECT_EQ(report.lists.size(), 6u);
    EXPECT_EQ(report.quadruples_scored, 6u * 2u * 4u);
    for (const auto& l : report.lists) EXPECT_NE(l.question_id, "other");

    // Combined metrics are the question-weighted mean of the subsets.
    double weighted = 0.0;
    for (int i = 0; i < 3; ++i) weighted += report.rows[i].mrr * report.rows[i].questions;
    EXPECT_NEAR(report.combined().mrr, weighted / report.combined().questions, 1e-12);
    EXPECT_NEAR(report.combined().mrr, mrr(report.lists), 1e-12);
    EXPECT_NEAR(report.combined().map, map(report.lists), 1e-12);
}

TEST(Evaluate, LearnedEncoderDimensionMismatch) {
    const EmbeddingTable table(5, 0);
    EXPECT_THROW(learned_encoder(EncoderParams<Real>::init(4, 2, 0), table), ConfigError);
}

TEST(Evaluate, RandomEncoderIsSeeded) {
    const auto a = random_encoder(6, 3), b = random_encoder(6, 3), c = random_encoder(6, 4);
    const TokenSeq s{"who", "is"};
    EXPECT_EQ(a(s), b(s));
    EXPECT_NE(a(s), c(s));
    EXPECT_NE(a(s), a(TokenSeq{"who"}));
    EXPECT_EQ(a(s).size(), 6u);
}

TEST(Evaluate, AveragingEncoderIsMean) {
    EmbeddingTable table(2, 0);
    table.insert("a", {1, 2});
    table.insert("b", {3, -2});
    const auto v = averaging_encoder(table)(TokenSeq{"a", "b", "a"});
    EXPECT_NEAR(v[0], 5.0 / 3.0, 1e-7);
    EXPECT_NEAR(v[1], 2.0 / 3.0, 1e-7);
}

TEST(Sweep, OneRowPerP) {
    const auto corpus = make_synthetic_corpus(SyntheticConfig{5, 3, 4, 50, 5, 8, 2});
    const std::vector<std::size_t> ps{1, 2, 3, 10};
    const auto rows = sweep_prototypes(averaging_encoder(corpus.table), corpus.train, corpus.test, ps, 4);
    ASSERT_EQ(rows.size(), 4u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].p, ps[i]);
        EXPECT_GT(rows[i].mrr, 0.0);
        EXPECT_LE(rows[i].mrr, 1.0);
    }
    EXPECT_TRUE(rows[0].warnings.empty());
    EXPECT_FALSE(rows[3].warnings.empty());
    const std::string text = format_sweep(rows);
    EXPECT_EQ(text.rfind("p\tMAP\tMRR\n", 0), 0u);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
}

TEST(Format, ReportAndRankings) {
    const auto corpus = make_synthetic_corpus(SyntheticConfig{4, 2, 3, 50, 5, 8, 2});
    const auto report = baseline_rank(corpus.test, corpus.table, select_prototypes(corpus.train, 2, 1));
    const std::string text = format_report(report);
    EXPECT_EQ(text.rfind("subset\tquestions\tskipped\tMAP\tMRR\n", 0), 0u);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
    const std::string ranks = format_rankings(report.lists);
    EXPECT_EQ(std::count(ranks.begin(), ranks.end(), '\n'), 6 * 3);
}
