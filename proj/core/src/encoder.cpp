// SPDX-License-Identifier: Apache-2.0
#include "analogia/encoder.hpp"

#include <cmath>

#include "analogia/error.hpp"
#include "analogia/rng.hpp"

namespace analogia {

template <typename T>
GruWeights<T> GruWeights<T>::zeros(std::size_t input_dim, std::size_t hidden) {
    if (input_dim == 0 || hidden == 0) throw DimensionError("GRU sizes must be positive");
    GruWeights w;
    w.W_z = w.W_r = w.W_h = Tensor<T>({hidden, input_dim});
    w.U_z = w.U_r = w.U_h = Tensor<T>({hidden, hidden});
    w.b_z = w.b_r = w.b_h = Tensor<T>({hidden});
    return w;
}

template <typename T>
EncoderParams<T> EncoderParams<T>::zeros(std::size_t input_dim, std::size_t hidden) {
    EncoderParams p;
    p.input_dim = input_dim;
    p.hidden = hidden;
    p.forward = GruWeights<T>::zeros(input_dim, hidden);
    p.backward = GruWeights<T>::zeros(input_dim, hidden);
    return p;
}

template <typename T>
EncoderParams<T> EncoderParams<T>::init(std::size_t input_dim, std::size_t hidden, std::uint64_t seed) {
    EncoderParams p = zeros(input_dim, hidden);
    const double k = 1.0 / std::sqrt(static_cast<double>(hidden));
    Rng rng(stream_seed(seed, "encoder-init"));
    for (auto& [name, tensor] : p.named()) {
        if (name.find(".b_") != std::string::npos) continue;
        for (auto& v : tensor->storage()) v = static_cast<T>(rng.uniform(-k, k));
    }
    return p;
}

template <typename T>
std::vector<std::pair<std::string, Tensor<T>*>> EncoderParams<T>::named() {
    std::vector<std::pair<std::string, Tensor<T>*>> out;
    for (auto [prefix, w] : {std::pair{"forward.", &forward}, std::pair{"backward.", &backward}}) {
        const std::string p(prefix);
        out.emplace_back(p + "W_z", &w->W_z);
        out.emplace_back(p + "W_r", &w->W_r);
        out.emplace_back(p + "W_h", &w->W_h);
        out.emplace_back(p + "U_z", &w->U_z);
        out.emplace_back(p + "U_r", &w->U_r);
        out.emplace_back(p + "U_h", &w->U_h);
        out.emplace_back(p + "b_z", &w->b_z);
        out.emplace_back(p + "b_r", &w->b_r);
        out.emplace_back(p + "b_h", &w->b_h);
    }
    return out;
}

template <typename T>
std::vector<std::pair<std::string, const Tensor<T>*>> EncoderParams<T>::named() const {
    auto mut = const_cast<EncoderParams*>(this)->named();
    std::vector<std::pair<std::string, const Tensor<T>*>> out;
    out.reserve(mut.size());
    for (auto& [n, t] : mut) out.emplace_back(n, t);
    return out;
}

template <typename T>
void EncoderParams<T>::validate() const {
    const EncoderParams ref = zeros(input_dim, hidden);
    auto want = ref.named();
    auto have = named();
    for (std::size_t i = 0; i < want.size(); ++i) {
        if (!want[i].second->same_shape(*have[i].second)) {
            throw DimensionError("encoder tensor " + have[i].first + " has shape " + have[i].second->shape_string() +
                                 ", expected " + want[i].second->shape_string());
        }
    }
}

std::vector<Var> EncoderVars::all() const {
    std::vector<Var> out;
    for (const GruVars* w : {&forward, &backward}) {
        out.insert(out.end(), {w->W_z, w->W_r, w->W_h, w->U_z, w->U_r, w->U_h, w->b_z, w->b_r, w->b_h});
    }
    return out;
}

template <typename T>
GruVars bind(Tape<T>& tape, const GruWeights<T>& w, bool trainable) {
    auto put = [&](const Tensor<T>& t) { return trainable ? tape.parameter(t) : tape.constant(t); };
    GruVars v;
    v.W_z = put(w.W_z);
    v.W_r = put(w.W_r);
    v.W_h = put(w.W_h);
    v.U_z = put(w.U_z);
    v.U_r = put(w.U_r);
    v.U_h = put(w.U_h);
    v.b_z = put(w.b_z);
    v.b_r = put(w.b_r);
    v.b_h = put(w.b_h);
    return v;
}

template <typename T>
EncoderVars bind(Tape<T>& tape, const EncoderParams<T>& params, bool trainable) {
    params.validate();
    EncoderVars v;
    v.forward = bind(tape, params.forward, trainable);
    v.backward = bind(tape, params.backward, trainable);
    v.hidden = params.hidden;
    return v;
}

template <typename T>
Var gru_cell(Tape<T>& tape, Var x, Var h_prev, const GruVars& w) {
    auto gate = [&](Var W, Var U, Var b, Var h) { return tape.add(tape.add(tape.matmul(W, x), tape.matmul(U, h)), b); };
    const Var z = tape.sigmoid(gate(w.W_z, w.U_z, w.b_z, h_prev));
    const Var r = tape.sigmoid(gate(w.W_r, w.U_r, w.b_r, h_prev));
    const Var candidate = tape.tanh(gate(w.W_h, w.U_h, w.b_h, tape.hadamard(r, h_prev)));
    const Var keep = tape.add_scalar(tape.scale(z, T{-1}), T{1});
    return tape.add(tape.hadamard(keep, h_prev), tape.hadamard(z, candidate));
}

template <typename T>
Var encode(Tape<T>& tape, const EncoderVars& vars, std::span<const Var> inputs, const DropoutSpec& dropout) {
    if (inputs.empty()) throw DomainError("encode: empty sentence");
    const std::size_t steps = inputs.size();
    const Var zero = tape.constant(Tensor<T>({vars.hidden}));

    std::vector<Var> fwd(steps), bwd(steps);
    Var h = zero;
    for (std::size_t t = 0; t < steps; ++t) fwd[t] = h = gru_cell(tape, inputs[t], h, vars.forward);
    h = zero;
    for (std::size_t t = steps; t-- > 0;) bwd[t] = h = gru_cell(tape, inputs[t], h, vars.backward);

    std::vector<Var> states(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        const Var pair[] = {fwd[t], bwd[t]};
        states[t] = tape.concat(pair);
    }
    return apply_dropout(tape, tape.maxpool_time(tape.stack_rows(states)), dropout);
}

template <typename T>
Var apply_dropout(Tape<T>& tape, Var pooled, const DropoutSpec& dropout) {
    if (!dropout.active()) return pooled;
    if (!(dropout.rate < 1.0)) throw ContractError("dropout rate must be below 1");
    const std::size_t d = tape.value(pooled).size();
    Tensor<T> mask({d});
    Rng rng(dropout.seed);
    const T keep = static_cast<T>(1.0 / (1.0 - dropout.rate));
    for (std::size_t i = 0; i < d; ++i) mask[i] = rng.uniform() < dropout.rate ? T{0} : keep;
    return tape.hadamard(pooled, tape.constant(std::move(mask)));
}

template <typename T>
std::vector<Tensor<T>> embed(const TokenSeq& tokens, const EmbeddingTable& table) {
    std::vector<Tensor<T>> out;
    out.reserve(tokens.size());
    std::vector<Real> buf(table.dim());
    for (const auto& tok : tokens) {
        table.lookup_into(tok, buf);
        out.push_back(Tensor<T>::vector(std::vector<T>(buf.begin(), buf.end())));
    }
    return out;
}

template <typename T>
Var encode(Tape<T>& tape, const EncoderVars& vars, const TokenSeq& tokens, const EmbeddingTable& table,
           const DropoutSpec& dropout) {
    if (tokens.empty()) throw DomainError("encode: empty sentence");
    std::vector<Var> inputs;
    inputs.reserve(tokens.size());
    for (auto& t : embed<T>(tokens, table)) inputs.push_back(tape.constant(std::move(t)));
    return encode(tape, vars, inputs, dropout);
}

template <typename T>
std::vector<T> encode(const TokenSeq& tokens, const EmbeddingTable& table, const EncoderParams<T>& params,
                      const DropoutSpec& dropout) {
    if (table.dim() != params.input_dim) {
        throw ConfigError("embedding dim " + std::to_string(table.dim()) + " does not match encoder input dim " +
                          std::to_string(params.input_dim));
    }
    Tape<T> tape(false);
    const EncoderVars vars = bind(tape, params, false);
    const Var out = encode(tape, vars, tokens, table, dropout);
    return tape.value(out).storage();
}

template struct GruWeights<float>;
template struct GruWeights<double>;
template struct EncoderParams<float>;
template struct EncoderParams<double>;

#define ANALOGIA_INSTANTIATE(T)                                                                                  \
    template GruVars bind<T>(Tape<T>&, const GruWeights<T>&, bool);                                          \
    template EncoderVars bind<T>(Tape<T>&, const EncoderParams<T>&, bool);                                   \
    template Var gru_cell<T>(Tape<T>&, Var, Var, const GruVars&);                                            \
    template Var apply_dropout<T>(Tape<T>&, Var, const DropoutSpec&);                                        \
    template Var encode<T>(Tape<T>&, const EncoderVars&, std::span<const Var>, const DropoutSpec&);          \
    template Var encode<T>(Tape<T>&, const EncoderVars&, const TokenSeq&, const EmbeddingTable&,             \
                           const DropoutSpec&);                                                              \
    template std::vector<T> encode<T>(const TokenSeq&, const EmbeddingTable&, const EncoderParams<T>&,       \
                                      const DropoutSpec&);                                                   \
    template std::vector<Tensor<T>> embed<T>(const TokenSeq&, const EmbeddingTable&);

ANALOGIA_INSTANTIATE(float)
ANALOGIA_INSTANTIATE(double)

#undef ANALOGIA_INSTANTIATE

}  // namespace analogia
