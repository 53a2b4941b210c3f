// SPDX-License-Identifier: Apache-2.0
#include "analogia/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "analogia/error.hpp"
#include "analogia/io.hpp"

namespace analogia {

bool Question::has_positive() const {
    return positive_count() > 0;
}

std::size_t Question::positive_count() const {
    return static_cast<std::size_t>(
        std::count_if(candidates.begin(), candidates.end(), [](const Candidate& c) { return c.label == 1; }));
}

std::size_t QADataset::candidate_count() const {
    std::size_t n = 0;
    for (const auto& q : questions) n += q.candidates.size();
    return n;
}

std::size_t QADataset::count(WhType type) const {
    return static_cast<std::size_t>(
        std::count_if(questions.begin(), questions.end(), [&](const Question& q) { return q.wh_type == type; }));
}

const Question* QADataset::find(const std::string& id) const {
    for (const auto& q : questions) {
        if (q.id == id) return &q;
    }
    return nullptr;
}

QADataset load_qa_dataset(const std::string& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open dataset " + path);

    QADataset ds;
    std::unordered_map<std::string, std::size_t> index;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (lineno == 1 && has_header) continue;
        if (line.empty()) continue;

        const auto cols = split(line, '\t');
        if (cols.size() != 4) {
            throw ParseError(path, lineno, "expected 4 tab-separated columns, got " + std::to_string(cols.size()));
        }
        if (cols[0].empty()) throw ParseError(path, lineno, "empty question id");
        int label;
        if (cols[3] == "0") {
            label = 0;
        } else if (cols[3] == "1") {
            label = 1;
        } else {
            throw ParseError(path, lineno, "label must be 0 or 1, got '" + std::string(cols[3]) + "'");
        }

        const std::string id(cols[0]);
        auto [it, fresh] = index.emplace(id, ds.questions.size());
        if (fresh) {
            Question q;
            q.id = id;
            q.text = tokenize(cols[1]);
            q.wh_type = classify_question(q.text);
            ds.questions.push_back(std::move(q));
        }
        ds.questions[it->second].candidates.push_back(Candidate{tokenize(cols[2]), label});
    }
    return ds;
}

void save_qa_dataset(const QADataset& dataset, const std::string& path) {
    std::ostringstream os;
    for (const auto& q : dataset.questions) {
        for (const auto& c : q.candidates) {
            os << q.id << '\t' << join_tokens(q.text) << '\t' << join_tokens(c.text) << '\t' << c.label << '\n';
        }
    }
    write_file_atomic(path, os.str());
}

}  // namespace analogia
