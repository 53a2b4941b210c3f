// SPDX-License-Identifier: Apache-2.0
#include "analogia/evaluation.hpp"

#include <cstdio>
#include <map>
#include <memory>
#include <sstream>

#include "analogia/error.hpp"
#include "analogia/io.hpp"
#include "analogia/rng.hpp"

namespace analogia {

double reciprocal_rank(std::span<const int> ranked_labels) {
    for (std::size_t r = 0; r < ranked_labels.size(); ++r) {
        if (ranked_labels[r] == 1) return 1.0 / static_cast<double>(r + 1);
    }
    return 0.0;
}

double average_precision(std::span<const int> ranked_labels) {
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t r = 0; r < ranked_labels.size(); ++r) {
        if (ranked_labels[r] == 1) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(r + 1);
        }
    }
    return hits ? sum / static_cast<double>(hits) : 0.0;
}

namespace {

template <typename Metric>
double mean_metric(std::span<const RankedList> lists, Metric metric, const char* name) {
    if (lists.empty()) throw DomainError(std::string(name) + ": no ranked lists");
    double sum = 0.0;
    for (const auto& list : lists) {
        const auto labels = list.ranked_labels();
        if (std::find(labels.begin(), labels.end(), 1) == labels.end()) {
            throw DomainError(std::string(name) + ": question '" + list.question_id + "' has no positive candidate");
        }
        sum += metric(labels);
    }
    return sum / static_cast<double>(lists.size());
}

}  // namespace

double mrr(std::span<const RankedList> lists) {
    return mean_metric(lists, [](const std::vector<int>& l) { return reciprocal_rank(l); }, "mrr");
}

double map(std::span<const RankedList> lists) {
    return mean_metric(lists, [](const std::vector<int>& l) { return average_precision(l); }, "map");
}

SentenceEncoder learned_encoder(EncoderParams<Real> params, const EmbeddingTable& table) {
    if (params.input_dim != table.dim()) {
        throw ConfigError("checkpoint expects " + std::to_string(params.input_dim) + "-dim embeddings, got " +
                          std::to_string(table.dim()));
    }
    auto shared = std::make_shared<const EncoderParams<Real>>(std::move(params));
    return [shared, &table](const TokenSeq& tokens) {
        const auto v = encode(tokens, table, *shared);
        return SentenceVec(v.begin(), v.end());
    };
}

SentenceEncoder averaging_encoder(const EmbeddingTable& table) {
    return [&table](const TokenSeq& tokens) {
        if (tokens.empty()) throw DomainError("averaging encoder: empty sentence");
        SentenceVec out(table.dim(), 0.0);
        std::vector<Real> buf(table.dim());
        for (const auto& t : tokens) {
            table.lookup_into(t, buf);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += buf[i];
        }
        for (double& v : out) v /= static_cast<double>(tokens.size());
        return out;
    };
}

SentenceEncoder random_encoder(std::size_t dim, std::uint64_t seed) {
    return [dim, seed](const TokenSeq& tokens) {
        Rng rng(fnv1a(join_tokens(tokens), splitmix64(seed)));
        SentenceVec out(dim);
        for (double& v : out) v = rng.uniform(-1.0, 1.0);
        return out;
    };
}

const SubsetMetrics& MetricsReport::row(const std::string& subset) const {
    for (const auto& r : rows)
        if (r.subset == subset) return r;
    throw ContractError("no metrics row '" + subset + "'");
}

MetricsReport evaluate(const SentenceEncoder& encoder, const QADataset& dataset, const PrototypeSet& prototypes,
                       RankMode mode, double eps) {
    MetricsReport report;
    std::map<TokenSeq, SentenceVec> cache;
    auto vec = [&](const TokenSeq& s) -> const SentenceVec& {
        auto it = cache.find(s);
        if (it == cache.end()) it = cache.emplace(s, encoder(s)).first;
        return it->second;
    };

    std::vector<std::vector<RankedList>> per_type(std::size(kQuadrupleTypes));
    std::vector<std::size_t> skipped(std::size(kQuadrupleTypes), 0);
    for (const auto& q : dataset.questions) {
        std::size_t slot = 0;
        while (slot < std::size(kQuadrupleTypes) && kQuadrupleTypes[slot] != q.wh_type) ++slot;
        if (slot == std::size(kQuadrupleTypes)) continue;

        const auto& protos = prototypes.of(q.wh_type);
        const EvalQuadruples quads = generate_eval_quadruples(q, protos);
        bool empty_sentence = q.text.empty() || q.candidates.empty();
        for (const auto& c : q.candidates) empty_sentence = empty_sentence || c.text.empty();
        if (quads.skipped || !q.has_positive() || empty_sentence) {
            ++skipped[slot];
            continue;
        }

        std::vector<PrototypeVecs> proto_vecs;
        for (const auto& p : protos) proto_vecs.emplace_back(vec(p.question), vec(p.answer));
        std::vector<SentenceVec> cand_vecs;
        for (const auto& c : q.candidates) cand_vecs.push_back(vec(c.text));

        RankedList list = rank_candidates(vec(q.text), cand_vecs, proto_vecs, mode, eps);
        list.question_id = q.id;
        for (const auto& c : q.candidates) list.labels.push_back(c.label);
        report.quadruples_scored += quads.quadruples.size();
        report.degenerate += list.degenerate;
        per_type[slot].push_back(std::move(list));
    }

    std::vector<RankedList> all;
    std::size_t all_skipped = 0;
    auto make_row = [](std::string name, const std::vector<RankedList>& lists, std::size_t skip) {
        SubsetMetrics row;
        row.subset = std::move(name);
        row.questions = lists.size();
        row.skipped = skip;
        if (!lists.empty()) {
            row.map = map(lists);
            row.mrr = mrr(lists);
        }
        return row;
    };
    for (std::size_t s = 0; s < per_type.size(); ++s) {
        report.rows.push_back(make_row(std::string(to_string(kQuadrupleTypes[s])), per_type[s], skipped[s]));
        all_skipped += skipped[s];
        all.insert(all.end(), per_type[s].begin(), per_type[s].end());
    }
    report.rows.push_back(make_row("combined", all, all_skipped));

    // Dataset order for the per-question output.
    std::map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < dataset.questions.size(); ++i) position.emplace(dataset.questions[i].id, i);
    std::stable_sort(all.begin(), all.end(), [&](const RankedList& a, const RankedList& b) {
        return position.at(a.question_id) < position.at(b.question_id);
    });
    report.lists = std::move(all);
    return report;
}

MetricsReport baseline_rank(const QADataset& dataset, const EmbeddingTable& table, const PrototypeSet& prototypes,
                            RankMode mode) {
    return evaluate(averaging_encoder(table), dataset, prototypes, mode);
}

std::vector<SweepRow> sweep_prototypes(const SentenceEncoder& encoder, const QADataset& prototype_source,
                                       const QADataset& dataset, std::span<const std::size_t> p_values,
                                       std::uint64_t seed, RankMode mode) {
    if (p_values.empty()) throw ContractError("sweep_prototypes: no prototype counts given");
    std::vector<SweepRow> rows;
    for (std::size_t p : p_values) {
        const PrototypeSet protos = select_prototypes(prototype_source, p, seed);
        const MetricsReport report = evaluate(encoder, dataset, protos, mode);
        rows.push_back(SweepRow{p, report.combined().map, report.combined().mrr, protos.warnings});
    }
    return rows;
}

namespace {

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

std::string format_report(const MetricsReport& report) {
    std::ostringstream os;
    os << "subset\tquestions\tskipped\tMAP\tMRR\n";
    for (const auto& r : report.rows) {
        os << r.subset << '\t' << r.questions << '\t' << r.skipped << '\t' << fixed(r.map) << '\t' << fixed(r.mrr)
           << '\n';
    }
    return os.str();
}

std::string format_sweep(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "p\tMAP\tMRR\n";
    for (const auto& r : rows) os << r.p << '\t' << fixed(r.map) << '\t' << fixed(r.mrr) << '\n';
    return os.str();
}

std::string format_rankings(const std::vector<RankedList>& lists) {
    std::ostringstream os;
    for (const auto& list : lists) {
        for (std::size_t r = 0; r < list.entries.size(); ++r) {
            const auto& e = list.entries[r];
            os << list.question_id << '\t' << e.candidate_index << '\t' << format_real(e.score) << '\t' << (r + 1)
               << '\t' << e.best_prototype << '\n';
        }
    }
    return os.str();
}

}  // namespace analogia
