// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "analogia/text.hpp"

namespace analogia {

struct Candidate {
    TokenSeq text;
    int label = 0;
};

struct Question {
    std::string id;
    TokenSeq text;
    WhType wh_type = WhType::Other;
    std::vector<Candidate> candidates;

    bool has_positive() const;
    std::size_t positive_count() const;
};

struct QADataset {
    std::vector<Question> questions;

    std::size_t candidate_count() const;
    std::size_t count(WhType type) const;
    const Question* find(const std::string& id) const;
};

/// Reads `question_id<TAB>question<TAB>candidate<TAB>label` rows. Candidates
/// are grouped by question id in file order; questions appear in order of
/// first occurrence.
QADataset load_qa_dataset(const std::string& path, bool has_header = false);

/// Writes rows back in the same format, without header.
void save_qa_dataset(const QADataset& dataset, const std::string& path);

}  // namespace analogia
