// SPDX-License-Identifier: Apache-2.0
#include "analogia/synthetic.hpp"

#include <cstdio>
#include <string>
#include <vector>

#include "analogia/error.hpp"
#include "analogia/rng.hpp"

namespace analogia {

namespace {

std::string numbered(const char* stem, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%02zu", stem, i);
    return buf;
}

constexpr const char* kMarkerStem[] = {"person", "date", "place"};

}  // namespace

SyntheticCorpus make_synthetic_corpus(const SyntheticConfig& config) {
    if (config.candidates < 2) throw ConfigError("synthetic corpus needs at least 2 candidates per question");
    if (config.fillers < 4 || config.markers_per_type == 0 || config.embedding_dim == 0) {
        throw ConfigError("synthetic corpus sizes too small");
    }

    Rng rng(stream_seed(config.seed, "synthetic"));
    auto filler = [&] { return numbered("w", static_cast<std::size_t>(rng.below(config.fillers))); };
    auto marker = [&](std::size_t type) {
        return numbered(kMarkerStem[type], static_cast<std::size_t>(rng.below(config.markers_per_type)));
    };

    SyntheticCorpus corpus;
    auto make_split = [&](QADataset& out, const char* split, std::size_t per_type) {
        for (std::size_t i = 0; i < per_type; ++i) {
            for (std::size_t type = 0; type < 3; ++type) {
                Question q;
                q.wh_type = kQuadrupleTypes[type];
                q.id = std::string(to_string(q.wh_type)) + "-" + split + "-" + numbered("", i);
                q.text.emplace_back(to_string(q.wh_type));
                const std::size_t len = 2 + static_cast<std::size_t>(rng.below(3));
                for (std::size_t k = 0; k < len; ++k) q.text.push_back(filler());

                const std::size_t correct = static_cast<std::size_t>(rng.below(config.candidates));
                for (std::size_t j = 0; j < config.candidates; ++j) {
                    Candidate c;
                    c.label = j == correct ? 1 : 0;
                    std::size_t marker_type = type;
                    if (!c.label) marker_type = (type + 1 + static_cast<std::size_t>(rng.below(2))) % 3;
                    c.text.push_back(q.text[1 + static_cast<std::size_t>(rng.below(len))]);
                    const std::size_t extra = 1 + static_cast<std::size_t>(rng.below(3));
                    for (std::size_t k = 0; k < extra; ++k) c.text.push_back(filler());
                    c.text.insert(c.text.begin() + static_cast<std::ptrdiff_t>(rng.below(c.text.size() + 1)),
                                  marker(marker_type));
                    q.candidates.push_back(std::move(c));
                }
                out.questions.push_back(std::move(q));
            }
        }
    };
    make_split(corpus.train, "train", config.train_per_type);
    make_split(corpus.test, "test", config.test_per_type);

    corpus.table = EmbeddingTable(config.embedding_dim, config.seed);
    Rng vec_rng(stream_seed(config.seed, "synthetic-vectors"));
    auto add = [&](const std::string& token) {
        std::vector<Real> v(config.embedding_dim);
        for (auto& x : v) x = static_cast<Real>(vec_rng.uniform(-1.0, 1.0));
        corpus.table.insert(token, std::move(v));
    };
    for (WhType t : kQuadrupleTypes) add(std::string(to_string(t)));
    for (std::size_t i = 0; i < config.fillers; ++i) add(numbered("w", i));
    for (std::size_t type = 0; type < 3; ++type)
        for (std::size_t i = 0; i < config.markers_per_type; ++i) add(numbered(kMarkerStem[type], i));
    return corpus;
}

}  // namespace analogia
