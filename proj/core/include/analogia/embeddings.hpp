// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "analogia/real.hpp"
#include "analogia/text.hpp"

namespace analogia {

/// Frozen token -> vector map. Tokens missing from the table get a
/// pseudo-random vector, uniform in [-0.1, 0.1], that depends only on the
/// table's OOV seed and the token bytes.
class EmbeddingTable {
public:
    static constexpr double kOovRange = 0.1;

    EmbeddingTable() = default;
    EmbeddingTable(std::size_t dim, std::uint64_t oov_seed = 0);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t vocab_size() const noexcept { return entries_.size(); }
    std::uint64_t oov_seed() const noexcept { return oov_seed_; }
    void set_oov_seed(std::uint64_t seed) noexcept { oov_seed_ = seed; }

    bool contains(const Token& token) const { return entries_.count(token) != 0; }

    /// Inserts unless the token is already present. Returns false for duplicates.
    bool insert(const Token& token, std::vector<Real> vec);

    std::vector<Real> lookup(const Token& token) const;
    void lookup_into(const Token& token, std::span<Real> out) const;

    /// Tokens in insertion order.
    const std::vector<Token>& tokens() const noexcept { return order_; }

private:
    std::size_t dim_ = 0;
    std::uint64_t oov_seed_ = 0;
    std::unordered_map<Token, std::vector<Real>> entries_;
    std::vector<Token> order_;
};

/// Reads the word-vector text format: an optional "count dim" header, then
/// "token v1 ... vd" rows. The first occurrence of a duplicate token wins.
/// Throws ParseError on ragged rows and ConfigError when the width differs
/// from expected_dim.
EmbeddingTable load_embeddings(const std::string& path, std::optional<std::size_t> expected_dim = std::nullopt,
                               std::uint64_t oov_seed = 0);

/// Writes a table in the same text format, with header.
void save_embeddings(const EmbeddingTable& table, const std::string& path);

}  // namespace analogia
