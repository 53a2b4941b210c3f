// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "analogia/embeddings.hpp"
#include "analogia/tape.hpp"
#include "analogia/tensor.hpp"
#include "analogia/text.hpp"

namespace analogia {

/// Weights of one GRU direction.
///
///   z  = sigmoid(W_z x + U_z h + b_z)
///   r  = sigmoid(W_r x + U_r h + b_r)
///   h~ = tanh(W_h x + U_h (r * h) + b_h)
///   h' = (1 - z) * h + z * h~
template <typename T>
struct GruWeights {
    Tensor<T> W_z, W_r, W_h;  // hidden x input
    Tensor<T> U_z, U_r, U_h;  // hidden x hidden
    Tensor<T> b_z, b_r, b_h;  // hidden

    static GruWeights zeros(std::size_t input_dim, std::size_t hidden);
};

/// Bidirectional GRU encoder. Output dimension is 2 * hidden.
template <typename T>
struct EncoderParams {
    std::size_t input_dim = 0;
    std::size_t hidden = 0;
    GruWeights<T> forward;
    GruWeights<T> backward;

    /// Uniform in [-1/sqrt(hidden), 1/sqrt(hidden)], zero biases.
    static EncoderParams init(std::size_t input_dim, std::size_t hidden, std::uint64_t seed);
    static EncoderParams zeros(std::size_t input_dim, std::size_t hidden);

    std::size_t output_dim() const noexcept { return 2 * hidden; }

    /// Tensors in checkpoint order, named "forward.W_z", ..., "backward.b_h".
    std::vector<std::pair<std::string, Tensor<T>*>> named();
    std::vector<std::pair<std::string, const Tensor<T>*>> named() const;

    /// Throws DimensionError if any tensor has the wrong shape.
    void validate() const;

    template <typename U>
    EncoderParams<U> cast() const {
        EncoderParams<U> out = EncoderParams<U>::zeros(input_dim, hidden);
        auto src = named();
        auto dst = out.named();
        for (std::size_t i = 0; i < src.size(); ++i) *dst[i].second = src[i].second->template cast<U>();
        return out;
    }
};

/// Tape handles for one direction.
struct GruVars {
    Var W_z, W_r, W_h, U_z, U_r, U_h, b_z, b_r, b_h;
};

struct EncoderVars {
    GruVars forward;
    GruVars backward;
    std::size_t hidden = 0;

    /// All 18 handles in checkpoint order.
    std::vector<Var> all() const;
};

/// Records the weights on `tape`, as parameters when `trainable`, else as constants.
template <typename T>
GruVars bind(Tape<T>& tape, const GruWeights<T>& w, bool trainable = true);
template <typename T>
EncoderVars bind(Tape<T>& tape, const EncoderParams<T>& params, bool trainable = true);

/// One GRU step on the tape.
template <typename T>
Var gru_cell(Tape<T>& tape, Var x, Var h_prev, const GruVars& w);

/// Inverted dropout on the pooled sentence vector. Inactive unless `training`
/// and rate > 0; the mask is a pure function of `seed`.
struct DropoutSpec {
    double rate = 0.0;
    bool training = false;
    std::uint64_t seed = 0;

    bool active() const noexcept { return training && rate > 0.0; }
};

/// Multiplies `pooled` by the dropout mask for `dropout.seed`; a no-op when inactive.
template <typename T>
Var apply_dropout(Tape<T>& tape, Var pooled, const DropoutSpec& dropout);

/// Runs both directions from zero states over already-recorded token
/// vectors, concatenates per step and max-pools over time.
template <typename T>
Var encode(Tape<T>& tape, const EncoderVars& vars, std::span<const Var> inputs, const DropoutSpec& dropout = {});

/// Looks tokens up in `table` and encodes. Throws DomainError on an empty sentence.
template <typename T>
Var encode(Tape<T>& tape, const EncoderVars& vars, const TokenSeq& tokens, const EmbeddingTable& table,
           const DropoutSpec& dropout = {});

/// Inference convenience: a fresh untracked tape per call.
template <typename T>
std::vector<T> encode(const TokenSeq& tokens, const EmbeddingTable& table, const EncoderParams<T>& params,
                      const DropoutSpec& dropout = {});

/// Rank-1 tensors holding the table vectors of `tokens`, cast to T.
template <typename T>
std::vector<Tensor<T>> embed(const TokenSeq& tokens, const EmbeddingTable& table);

extern template struct GruWeights<float>;
extern template struct GruWeights<double>;
extern template struct EncoderParams<float>;
extern template struct EncoderParams<double>;

}  // namespace analogia
