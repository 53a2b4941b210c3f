// SPDX-License-Identifier: Apache-2.0
#include "analogia/embeddings.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "analogia/error.hpp"
#include "analogia/io.hpp"
#include "analogia/rng.hpp"

namespace analogia {

EmbeddingTable::EmbeddingTable(std::size_t dim, std::uint64_t oov_seed) : dim_(dim), oov_seed_(oov_seed) {
    if (dim == 0) throw ConfigError("embedding dimension must be positive");
}

bool EmbeddingTable::insert(const Token& token, std::vector<Real> vec) {
    if (vec.size() != dim_) {
        throw DimensionError("embedding for '" + token + "' has " + std::to_string(vec.size()) +
                             " values, table dim is " + std::to_string(dim_));
    }
    if (entries_.count(token)) return false;
    entries_.emplace(token, std::move(vec));
    order_.push_back(token);
    return true;
}

std::vector<Real> EmbeddingTable::lookup(const Token& token) const {
    std::vector<Real> out(dim_);
    lookup_into(token, out);
    return out;
}

void EmbeddingTable::lookup_into(const Token& token, std::span<Real> out) const {
    if (out.size() != dim_) throw DimensionError("lookup buffer does not match embedding dim");
    if (auto it = entries_.find(token); it != entries_.end()) {
        std::copy(it->second.begin(), it->second.end(), out.begin());
        return;
    }
    std::uint64_t state = splitmix64(fnv1a(token, splitmix64(oov_seed_)));
    for (std::size_t i = 0; i < dim_; ++i) {
        state = splitmix64(state);
        const double u = static_cast<double>(state >> 11) * 0x1.0p-53;
        out[i] = static_cast<Real>(-kOovRange + 2.0 * kOovRange * u);
    }
}

namespace {

bool parse_size(std::string_view s, std::size_t& out) {
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::vector<std::string_view> fields_of(std::string_view line) {
    std::vector<std::string_view> out;
    for (auto f : split(line, ' ')) {
        if (!f.empty()) out.push_back(f);
    }
    return out;
}

}  // namespace

EmbeddingTable load_embeddings(const std::string& path, std::optional<std::size_t> expected_dim,
                               std::uint64_t oov_seed) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open embeddings file " + path);

    std::optional<std::size_t> dim;
    EmbeddingTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto fields = fields_of(line);
        if (fields.empty()) continue;

        if (lineno == 1 && fields.size() == 2) {
            std::size_t count = 0, header_dim = 0;
            if (parse_size(fields[0], count) && parse_size(fields[1], header_dim)) {
                if (header_dim == 0) throw ParseError(path, lineno, "header declares zero dimension");
                dim = header_dim;
                continue;
            }
        }

        const std::size_t width = fields.size() - 1;
        if (width == 0) throw ParseError(path, lineno, "row has a token but no values");
        if (!dim) dim = width;
        if (width != *dim) {
            throw ParseError(path, lineno,
                             "row has " + std::to_string(width) + " values, expected " + std::to_string(*dim));
        }
        if (table.dim() == 0) {
            if (expected_dim && *expected_dim != *dim) {
                throw ConfigError(path + ": embeddings have dimension " + std::to_string(*dim) + ", expected " +
                                  std::to_string(*expected_dim));
            }
            table = EmbeddingTable(*dim, oov_seed);
        }

        std::vector<Real> vec(width);
        for (std::size_t i = 0; i < width; ++i) {
            const auto f = fields[i + 1];
            auto res = std::from_chars(f.data(), f.data() + f.size(), vec[i]);
            if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
                throw ParseError(path, lineno, "bad number '" + std::string(f) + "'");
            }
        }
        table.insert(std::string(fields[0]), std::move(vec));
    }
    if (table.dim() == 0) {
        if (!dim) throw ParseError(path, lineno, "no embedding rows");
        if (expected_dim && *expected_dim != *dim) {
            throw ConfigError(path + ": embeddings have dimension " + std::to_string(*dim) + ", expected " +
                              std::to_string(*expected_dim));
        }
        table = EmbeddingTable(*dim, oov_seed);
    }
    return table;
}

void save_embeddings(const EmbeddingTable& table, const std::string& path) {
    std::ostringstream os;
    os << table.vocab_size() << ' ' << table.dim() << '\n';
    for (const auto& token : table.tokens()) {
        os << token;
        for (Real v : table.lookup(token)) os << ' ' << format_real(v);
        os << '\n';
    }
    write_file_atomic(path, os.str());
}

}  // namespace analogia
