// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "analogia/dataset.hpp"
#include "analogia/embeddings.hpp"
#include "analogia/error.hpp"
#include "analogia/text.hpp"

using namespace analogia;
namespace fs = std::filesystem;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const fs::path dir = fs::temp_directory_path() / "analogia_text_tests";
    fs::create_directories(dir);
    const fs::path p = dir / name;
    std::ofstream(p, std::ios::binary) << content;
    return p.string();
}

}  // namespace

TEST(Tokenize, TableTwoQuestion) {
    EXPECT_EQ(tokenize("Who discovered prions?"), (TokenSeq{"who", "discovered", "prions"}));
}

TEST(Tokenize, Empty) {
    EXPECT_TRUE(tokenize("").empty());
    EXPECT_TRUE(tokenize("  \t ... ,, ").empty());
}

TEST(Tokenize, PunctuationAroundNumbers) {
    EXPECT_EQ(tokenize("On February 12, 1809,"), (TokenSeq{"on", "february", "12", "1809"}));
}

TEST(Tokenize, InnerPunctuationKept) {
    EXPECT_EQ(tokenize("Pinatubo's last [...] eruption"), (TokenSeq{"pinatubo's", "last", "eruption"}));
}

TEST(Tokenize, UnicodeWhitespaceSplits) {
    // U+00A0 no-break space and U+3000 ideographic space
    EXPECT_EQ(tokenize("Franz\xc2\xa0Kafka\xe3\x80\x80Prague"), (TokenSeq{"franz", "kafka", "prague"}));
    // Non-ASCII letters survive untouched.
    EXPECT_EQ(tokenize("Z\xc3\xbcrich!"), (TokenSeq{"z\xc3\xbcrich"}));
}

TEST(Tokenize, IdempotentOnJoinedOutput) {
    std::mt19937_64 gen(9);
    const std::string alphabet = "aBc .,;!?'\"-()\tXyZ09";
    for (int trial = 0; trial < 500; ++trial) {
        std::string raw;
        const std::size_t len = gen() % 40;
        for (std::size_t i = 0; i < len; ++i) raw.push_back(alphabet[gen() % alphabet.size()]);
        const TokenSeq once = tokenize(raw);
        EXPECT_EQ(tokenize(join_tokens(once)), once) << raw;
        for (const auto& t : once) {
            EXPECT_FALSE(t.empty());
            EXPECT_EQ(t.find(' '), std::string::npos);
        }
    }
}

TEST(Classify, WhWords) {
    EXPECT_EQ(classify_question({"where", "was", "abraham", "lincoln", "born"}), WhType::Where);
    EXPECT_EQ(classify_question({"who", "discovered", "prions"}), WhType::Who);
    EXPECT_EQ(classify_question(tokenize("When was Leonardo da Vinci born?")), WhType::When);
    EXPECT_EQ(classify_question({"what", "is", "x"}), WhType::Other);
    EXPECT_EQ(classify_question({}), WhType::Other);
    EXPECT_EQ(classify_question({"whom"}), WhType::Other);
}

TEST(Embeddings, DirectReadback) {
    const auto path = write_temp("plain.vec", "a 1.0 0.0\nb 0.0 1.0");
    const EmbeddingTable t = load_embeddings(path);
    EXPECT_EQ(t.dim(), 2u);
    EXPECT_EQ(t.lookup("a"), (std::vector<Real>{1, 0}));
    EXPECT_EQ(t.lookup("b"), (std::vector<Real>{0, 1}));
}

TEST(Embeddings, HeaderDeclaresDimension) {
    std::string content = "2 300\n";
    for (const char* tok : {"x", "y"}) {
        content += tok;
        for (int i = 0; i < 300; ++i) content += " 0.5";
        content += "\n";
    }
    const EmbeddingTable t = load_embeddings(write_temp("header.vec", content));
    EXPECT_EQ(t.dim(), 300u);
    EXPECT_EQ(t.vocab_size(), 2u);
    EXPECT_EQ(load_embeddings(write_temp("header.vec", content), 300).dim(), 300u);
}

TEST(Embeddings, RaggedRowReportsLine) {
    std::string content = "2 300\nx";
    for (int i = 0; i < 300; ++i) content += " 0.1";
    content += "\ny";
    for (int i = 0; i < 299; ++i) content += " 0.1";
    content += "\n";
    try {
        load_embeddings(write_temp("ragged.vec", content));
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Embeddings, DimensionMismatchIsConfigError) {
    EXPECT_THROW(load_embeddings(write_temp("dim.vec", "a 1 2 3\n"), 2), ConfigError);
}

TEST(Embeddings, BadNumberIsParseError) {
    EXPECT_THROW(load_embeddings(write_temp("nan.vec", "a 1 zz\n")), ParseError);
}

TEST(Embeddings, FirstDuplicateWins) {
    const EmbeddingTable t = load_embeddings(write_temp("dup.vec", "a 1 1\na 2 2\n"));
    EXPECT_EQ(t.vocab_size(), 1u);
    EXPECT_EQ(t.lookup("a"), (std::vector<Real>{1, 1}));
}

TEST(Embeddings, OovIsDeterministicAndBounded) {
    EmbeddingTable t(16, 42);
    EXPECT_EQ(t.lookup("zebra"), t.lookup("zebra"));
    EXPECT_NE(t.lookup("zebra"), t.lookup("zebras"));
    EmbeddingTable other(16, 43);
    EXPECT_NE(t.lookup("zebra"), other.lookup("zebra"));
    for (int i = 0; i < 1000; ++i) {
        for (Real v : t.lookup("oov-" + std::to_string(i))) {
            EXPECT_GE(v, -0.1f);
            EXPECT_LE(v, 0.1f);
        }
    }
}

TEST(Dataset, GroupsCandidates) {
    const auto path = write_temp("one.tsv", "q1\tWho is it?\tIt is Bob.\t1\nq1\tWho is it?\tA cat.\t0\nq1\tWho is it?\tRain.\t0\n");
    const QADataset ds = load_qa_dataset(path);
    ASSERT_EQ(ds.questions.size(), 1u);
    EXPECT_EQ(ds.questions[0].candidates.size(), 3u);
    EXPECT_EQ(ds.questions[0].wh_type, WhType::Who);
    EXPECT_EQ(ds.candidate_count(), 3u);
}

TEST(Dataset, InterleavedRowsKeepPerQuestionOrder) {
    const auto path = write_temp("inter.tsv",
                                 "a\tWhen?\tone\t0\nb\tWhere?\ttwo\t1\na\tWhen?\tthree\t1\nb\tWhere?\tfour\t0\n");
    const QADataset ds = load_qa_dataset(path);
    ASSERT_EQ(ds.questions.size(), 2u);
    EXPECT_EQ(ds.questions[0].id, "a");
    EXPECT_EQ(ds.questions[0].candidates[0].text, TokenSeq{"one"});
    EXPECT_EQ(ds.questions[0].candidates[1].text, TokenSeq{"three"});
    EXPECT_EQ(ds.questions[1].candidates[0].text, TokenSeq{"two"});
    EXPECT_EQ(ds.questions[1].candidates[1].text, TokenSeq{"four"});
}

TEST(Dataset, TableTwoWhoRows) {
    const auto path = write_temp("table2.tsv",
                                 "id\tquestion\tanswer\tlabel\n"
                                 "p1\tWho made the rotary engine automobile?\tMazda continued work on developing the "
                                 "Wankel rotary engine.\t1\n"
                                 "p2\tWho discovered prions?\tPrusiner won Nobel prize last year for discovering "
                                 "prions\t1\n");
    const QADataset ds = load_qa_dataset(path, true);
    ASSERT_EQ(ds.questions.size(), 2u);
    EXPECT_EQ(ds.questions[0].wh_type, WhType::Who);
    EXPECT_EQ(ds.questions[1].wh_type, WhType::Who);
}

TEST(Dataset, ParseErrors) {
    try {
        load_qa_dataset(write_temp("cols.tsv", "q\ta\tb\t1\nq\ta\tb\n"));
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    EXPECT_THROW(load_qa_dataset(write_temp("label.tsv", "q\ta\tb\t2\n")), ParseError);
    EXPECT_THROW(load_qa_dataset(write_temp("label2.tsv", "q\ta\tb\tyes\n")), ParseError);
}

TEST(Dataset, CandidateCountEqualsRowsAndTypesPartition) {
    std::mt19937_64 gen(21);
    const char* openers[] = {"Who", "when", "WHERE", "What", "How", "where's", "Who,"};
    for (int trial = 0; trial < 20; ++trial) {
        std::string content;
        std::size_t rows = 0;
        const int questions = 1 + static_cast<int>(gen() % 12);
        for (int q = 0; q < questions; ++q) {
            const int k = 1 + static_cast<int>(gen() % 5);
            const std::string text = std::string(openers[gen() % 7]) + " is x";
            for (int c = 0; c < k; ++c, ++rows) {
                content += "q" + std::to_string(q) + "\t" + text + "\tcand " + std::to_string(c) + "\t" +
                           std::to_string(gen() % 2) + "\n";
            }
        }
        const QADataset ds = load_qa_dataset(write_temp("rand.tsv", content));
        EXPECT_EQ(ds.candidate_count(), rows);
        EXPECT_EQ(ds.count(WhType::Who) + ds.count(WhType::When) + ds.count(WhType::Where) +
                      ds.count(WhType::Other),
                  ds.questions.size());
    }
}
