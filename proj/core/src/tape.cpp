// SPDX-License-Identifier: Apache-2.0
#include "analogia/tape.hpp"

#include <algorithm>
#include <cmath>

#include "analogia/error.hpp"

namespace analogia {

std::string_view to_string(OpKind kind) noexcept {
    switch (kind) {
        case OpKind::matmul: return "matmul";
        case OpKind::add: return "add";
        case OpKind::sub: return "sub";
        case OpKind::hadamard: return "hadamard";
        case OpKind::sigmoid: return "sigmoid";
        case OpKind::tanh: return "tanh";
        case OpKind::concat: return "concat";
        case OpKind::maxpool_time: return "maxpool_time";
        case OpKind::scale: return "scale";
    }
    return "unknown";
}

template <typename T>
Tensor<T> Gradients<T>::of(Var v) const {
    if (v.id >= shapes_.size()) throw ContractError("gradient requested for a variable not on this tape");
    return grads_[v.id].empty() ? Tensor<T>(shapes_[v.id]) : grads_[v.id];
}

namespace {

template <typename T>
void require_same_shape(std::string_view op, const Tensor<T>& a, const Tensor<T>& b) {
    if (!a.same_shape(b)) {
        throw DimensionError(std::string(op) + ": shapes " + a.shape_string() + " and " + b.shape_string() +
                             " do not match");
    }
}

template <typename T>
T stable_sigmoid(T x) {
    if (x >= 0) return T{1} / (T{1} + std::exp(-x));
    const T e = std::exp(x);
    return e / (T{1} + e);
}

}  // namespace

template <typename T>
const typename Tape<T>::Node& Tape<T>::node(Var v) const {
    if (v.id >= nodes_.size()) throw ContractError("variable does not belong to this tape");
    return nodes_[v.id];
}

template <typename T>
Var Tape<T>::push(Op op, Tensor<T> value, std::vector<std::size_t> inputs) {
    if (consumed_) throw StateError("tape already consumed by backward()");
    Node n;
    n.op = op;
    n.value = std::move(value);
    if (tracking_) {
        n.requires_grad = std::any_of(inputs.begin(), inputs.end(),
                                      [&](std::size_t i) { return nodes_[i].requires_grad; });
        if (n.requires_grad) n.inputs = std::move(inputs);
    }
    nodes_.push_back(std::move(n));
    return Var{nodes_.size() - 1};
}

template <typename T>
Var Tape<T>::constant(Tensor<T> value) {
    return push(Op::leaf, std::move(value), {});
}

template <typename T>
Var Tape<T>::parameter(Tensor<T> value) {
    Var v = push(Op::leaf, std::move(value), {});
    nodes_[v.id].requires_grad = tracking_;
    return v;
}

template <typename T>
const Tensor<T>& Tape<T>::value(Var v) const {
    return node(v).value;
}

template <typename T>
bool Tape<T>::requires_grad(Var v) const {
    return node(v).requires_grad;
}

template <typename T>
Var Tape<T>::apply(OpKind kind, std::span<const Var> inputs, T scalar) {
    auto arity = [&](std::size_t n) {
        if (inputs.size() != n) {
            throw ContractError(std::string(to_string(kind)) + " expects " + std::to_string(n) + " inputs, got " +
                                std::to_string(inputs.size()));
        }
    };
    switch (kind) {
        case OpKind::matmul: arity(2); return matmul(inputs[0], inputs[1]);
        case OpKind::add: arity(2); return add(inputs[0], inputs[1]);
        case OpKind::sub: arity(2); return sub(inputs[0], inputs[1]);
        case OpKind::hadamard: arity(2); return hadamard(inputs[0], inputs[1]);
        case OpKind::sigmoid: arity(1); return sigmoid(inputs[0]);
        case OpKind::tanh: arity(1); return tanh(inputs[0]);
        case OpKind::concat: return concat(inputs);
        case OpKind::maxpool_time: arity(1); return maxpool_time(inputs[0]);
        case OpKind::scale: arity(1); return scale(inputs[0], scalar);
    }
    throw ContractError("unknown op kind");
}

template <typename T>
Var Tape<T>::matmul(Var a, Var b) {
    const auto& A = node(a).value;
    const auto& B = node(b).value;
    if (A.rank() != 2 || A.cols() != B.rows()) {
        throw DimensionError("matmul: shapes " + A.shape_string() + " and " + B.shape_string() + " do not conform");
    }
    const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
    Tensor<T> C = B.rank() == 2 ? Tensor<T>({m, n}) : Tensor<T>({m});
    for (std::size_t i = 0; i < m; ++i) {
        const T* arow = A.data().data() + i * k;
        T* crow = C.data().data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const T aip = arow[p];
            const T* brow = B.data().data() + p * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
        }
    }
    return push(Op::matmul, std::move(C), {a.id, b.id});
}

template <typename T>
Var Tape<T>::add(Var a, Var b) {
    const auto& A = node(a).value;
    const auto& B = node(b).value;
    require_same_shape("add", A, B);
    Tensor<T> C = A;
    for (std::size_t i = 0; i < C.size(); ++i) C[i] += B[i];
    return push(Op::add, std::move(C), {a.id, b.id});
}

template <typename T>
Var Tape<T>::sub(Var a, Var b) {
    const auto& A = node(a).value;
    const auto& B = node(b).value;
    require_same_shape("sub", A, B);
    Tensor<T> C = A;
    for (std::size_t i = 0; i < C.size(); ++i) C[i] -= B[i];
    return push(Op::sub, std::move(C), {a.id, b.id});
}

template <typename T>
Var Tape<T>::hadamard(Var a, Var b) {
    const auto& A = node(a).value;
    const auto& B = node(b).value;
    require_same_shape("hadamard", A, B);
    Tensor<T> C = A;
    for (std::size_t i = 0; i < C.size(); ++i) C[i] *= B[i];
    return push(Op::hadamard, std::move(C), {a.id, b.id});
}

template <typename T>
Var Tape<T>::sigmoid(Var x) {
    Tensor<T> y = node(x).value;
    for (auto& v : y.storage()) v = stable_sigmoid(v);
    return push(Op::sigmoid, std::move(y), {x.id});
}

template <typename T>
Var Tape<T>::tanh(Var x) {
    Tensor<T> y = node(x).value;
    for (auto& v : y.storage()) v = std::tanh(v);
    return push(Op::tanh, std::move(y), {x.id});
}

template <typename T>
Var Tape<T>::concat(std::span<const Var> parts) {
    if (parts.empty()) throw ContractError("concat: no inputs");
    std::vector<T> out;
    std::vector<std::size_t> ids;
    for (Var p : parts) {
        const auto& v = node(p).value;
        if (v.rank() != 1) throw DimensionError("concat: expects rank-1 inputs, got " + v.shape_string());
        out.insert(out.end(), v.storage().begin(), v.storage().end());
        ids.push_back(p.id);
    }
    return push(Op::concat, Tensor<T>::vector(std::move(out)), std::move(ids));
}

template <typename T>
Var Tape<T>::stack_rows(std::span<const Var> rows) {
    if (rows.empty()) throw DomainError("stack_rows: empty time axis");
    const std::size_t d = node(rows[0]).value.size();
    std::vector<T> out;
    out.reserve(rows.size() * d);
    std::vector<std::size_t> ids;
    for (Var r : rows) {
        const auto& v = node(r).value;
        if (v.rank() != 1 || v.size() != d) {
            throw DimensionError("stack_rows: row of shape " + v.shape_string() + " does not match length " +
                                 std::to_string(d));
        }
        out.insert(out.end(), v.storage().begin(), v.storage().end());
        ids.push_back(r.id);
    }
    return push(Op::stack_rows, Tensor<T>({rows.size(), d}, std::move(out)), std::move(ids));
}

template <typename T>
Var Tape<T>::maxpool_time(Var x) {
    const auto& X = node(x).value;
    if (X.rank() != 2) throw DimensionError("maxpool_time: expects a T x d tensor, got " + X.shape_string());
    const std::size_t steps = X.rows(), d = X.cols();
    Tensor<T> y({d});
    std::vector<std::size_t> argmax(d, 0);
    for (std::size_t j = 0; j < d; ++j) {
        T best = X(0, j);
        for (std::size_t t = 1; t < steps; ++t) {
            if (X(t, j) > best) {
                best = X(t, j);
                argmax[j] = t;
            }
        }
        y[j] = best;
    }
    Var out = push(Op::maxpool_time, std::move(y), {x.id});
    nodes_[out.id].aux = std::move(argmax);
    return out;
}

template <typename T>
Var Tape<T>::scale(Var x, T factor) {
    Tensor<T> y = node(x).value;
    for (auto& v : y.storage()) v *= factor;
    Var out = push(Op::scale, std::move(y), {x.id});
    nodes_[out.id].param = factor;
    return out;
}

template <typename T>
Var Tape<T>::add_scalar(Var x, T offset) {
    Tensor<T> y = node(x).value;
    for (auto& v : y.storage()) v += offset;
    return push(Op::add_scalar, std::move(y), {x.id});
}

template <typename T>
Var Tape<T>::square(Var x) {
    Tensor<T> y = node(x).value;
    for (auto& v : y.storage()) v *= v;
    return push(Op::square, std::move(y), {x.id});
}

template <typename T>
Var Tape<T>::relu(Var x) {
    Tensor<T> y = node(x).value;
    for (auto& v : y.storage()) v = v > T{0} ? v : T{0};
    return push(Op::relu, std::move(y), {x.id});
}

template <typename T>
Var Tape<T>::sum(Var x) {
    T total{};
    for (T v : node(x).value.storage()) total += v;
    return push(Op::sum, Tensor<T>::scalar(total), {x.id});
}

template <typename T>
Var Tape<T>::dot(Var a, Var b) {
    const auto& A = node(a).value;
    const auto& B = node(b).value;
    require_same_shape("dot", A, B);
    T total{};
    for (std::size_t i = 0; i < A.size(); ++i) total += A[i] * B[i];
    return push(Op::dot, Tensor<T>::scalar(total), {a.id, b.id});
}

template <typename T>
Var Tape<T>::mean(std::span<const Var> scalars) {
    if (scalars.empty()) throw ContractError("mean: no inputs");
    T total{};
    std::vector<std::size_t> ids;
    for (Var s : scalars) {
        total += node(s).value.item();
        ids.push_back(s.id);
    }
    return push(Op::mean, Tensor<T>::scalar(total / static_cast<T>(scalars.size())), std::move(ids));
}

template <typename T>
Var Tape<T>::cosine(Var a, Var b, T eps, bool* degenerate) {
    const auto& A = node(a).value;
    const auto& B = node(b).value;
    require_same_shape("cosine", A, B);
    T ab{}, aa{}, bb{};
    for (std::size_t i = 0; i < A.size(); ++i) {
        ab += A[i] * B[i];
        aa += A[i] * A[i];
        bb += B[i] * B[i];
    }
    const T na = std::sqrt(aa), nb = std::sqrt(bb);
    const bool flat = na < eps || nb < eps;
    if (degenerate) *degenerate = flat;
    if (flat) {
        return push(Op::leaf, Tensor<T>::scalar(T{0}), {});
    }
    T c = ab / (na * nb);
    c = std::clamp(c, T{-1}, T{1});
    Var out = push(Op::cosine, Tensor<T>::scalar(c), {a.id, b.id});
    nodes_[out.id].param = na;
    nodes_[out.id].param2 = nb;
    return out;
}

template <typename T>
void Tape<T>::accumulate(std::vector<Tensor<T>>& grads, std::size_t id, const Tensor<T>& g) const {
    auto& slot = grads[id];
    if (slot.empty()) {
        slot = g;
        return;
    }
    for (std::size_t i = 0; i < slot.size(); ++i) slot[i] += g[i];
}

template <typename T>
void Tape<T>::backward_node(std::size_t id, std::vector<Tensor<T>>& grads) const {
    const Node& n = nodes_[id];
    const Tensor<T>& g = grads[id];
    const Tensor<T>& y = n.value;
    auto needs = [&](std::size_t k) { return nodes_[n.inputs[k]].requires_grad; };
    auto slot = [&](std::size_t k) -> Tensor<T>& {
        auto& s = grads[n.inputs[k]];
        if (s.empty()) s = Tensor<T>::zeros_like(nodes_[n.inputs[k]].value);
        return s;
    };

    switch (n.op) {
        case Op::leaf: break;
        case Op::matmul: {
            const auto& A = nodes_[n.inputs[0]].value;
            const auto& B = nodes_[n.inputs[1]].value;
            const std::size_t m = A.rows(), k = A.cols(), cols = B.cols();
            if (needs(0)) {
                auto& gA = slot(0);
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t p = 0; p < k; ++p) {
                        T acc{};
                        for (std::size_t j = 0; j < cols; ++j) acc += g[i * cols + j] * B[p * cols + j];
                        gA[i * k + p] += acc;
                    }
            }
            if (needs(1)) {
                auto& gB = slot(1);
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t p = 0; p < k; ++p) {
                        const T a = A[i * k + p];
                        for (std::size_t j = 0; j < cols; ++j) gB[p * cols + j] += a * g[i * cols + j];
                    }
            }
            break;
        }
        case Op::add:
            if (needs(0)) accumulate(grads, n.inputs[0], g);
            if (needs(1)) accumulate(grads, n.inputs[1], g);
            break;
        case Op::sub:
            if (needs(0)) accumulate(grads, n.inputs[0], g);
            if (needs(1)) {
                auto& s = slot(1);
                for (std::size_t i = 0; i < s.size(); ++i) s[i] -= g[i];
            }
            break;
        case Op::hadamard: {
            const auto& A = nodes_[n.inputs[0]].value;
            const auto& B = nodes_[n.inputs[1]].value;
            if (needs(0)) {
                auto& s = slot(0);
                for (std::size_t i = 0; i < s.size(); ++i) s[i] += g[i] * B[i];
            }
            if (needs(1)) {
                auto& s = slot(1);
                for (std::size_t i = 0; i < s.size(); ++i) s[i] += g[i] * A[i];
            }
            break;
        }
        case Op::sigmoid: {
            auto& s = slot(0);
            for (std::size_t i = 0; i < s.size(); ++i) s[i] += g[i] * y[i] * (T{1} - y[i]);
            break;
        }
        case Op::tanh: {
            auto& s = slot(0);
            for (std::size_t i = 0; i < s.size(); ++i) s[i] += g[i] * (T{1} - y[i] * y[i]);
            break;
        }
        case Op::concat:
        case Op::stack_rows: {
            std::size_t offset = 0;
            for (std::size_t k = 0; k < n.inputs.size(); ++k) {
                const std::size_t len = nodes_[n.inputs[k]].value.size();
                if (needs(k)) {
                    auto& s = slot(k);
                    for (std::size_t i = 0; i < len; ++i) s[i] += g[offset + i];
                }
                offset += len;
            }
            break;
        }
        case Op::maxpool_time: {
            auto& s = slot(0);
            const std::size_t d = s.cols();
            for (std::size_t j = 0; j < d; ++j) s[n.aux[j] * d + j] += g[j];
            break;
        }
        case Op::scale: {
            auto& s = slot(0);
            for (std::size_t i = 0; i < s.size(); ++i) s[i] += g[i] * n.param;
            break;
        }
        case Op::add_scalar: accumulate(grads, n.inputs[0], g); break;
        case Op::square: {
            const auto& X = nodes_[n.inputs[0]].value;
            auto& s = slot(0);
            for (std::size_t i = 0; i < s.size(); ++i) s[i] += g[i] * T{2} * X[i];
            break;
        }
        case Op::relu: {
            const auto& X = nodes_[n.inputs[0]].value;
            auto& s = slot(0);
            for (std::size_t i = 0; i < s.size(); ++i)
                if (X[i] > T{0}) s[i] += g[i];
            break;
        }
        case Op::sum: {
            auto& s = slot(0);
            for (auto& v : s.storage()) v += g[0];
            break;
        }
        case Op::dot: {
            const auto& A = nodes_[n.inputs[0]].value;
            const auto& B = nodes_[n.inputs[1]].value;
            if (needs(0)) {
                auto& s = slot(0);
                for (std::size_t i = 0; i < s.size(); ++i) s[i] += g[0] * B[i];
            }
            if (needs(1)) {
                auto& s = slot(1);
                for (std::size_t i = 0; i < s.size(); ++i) s[i] += g[0] * A[i];
            }
            break;
        }
        case Op::mean: {
            const T share = g[0] / static_cast<T>(n.inputs.size());
            for (std::size_t k = 0; k < n.inputs.size(); ++k)
                if (needs(k)) slot(k)[0] += share;
            break;
        }
        case Op::cosine: {
            // d cos / da = b / (|a||b|) - cos * a / |a|^2
            const auto& A = nodes_[n.inputs[0]].value;
            const auto& B = nodes_[n.inputs[1]].value;
            const T na = n.param, nb = n.param2, c = y[0];
            if (needs(0)) {
                auto& s = slot(0);
                for (std::size_t i = 0; i < s.size(); ++i) s[i] += g[0] * (B[i] / (na * nb) - c * A[i] / (na * na));
            }
            if (needs(1)) {
                auto& s = slot(1);
                for (std::size_t i = 0; i < s.size(); ++i) s[i] += g[0] * (A[i] / (na * nb) - c * B[i] / (nb * nb));
            }
            break;
        }
    }
}

template <typename T>
Gradients<T> Tape<T>::backward(Var loss) {
    if (consumed_) throw StateError("tape already consumed by backward()");
    if (!tracking_) throw StateError("backward() on a tape with tracking disabled");
    const auto& L = node(loss).value;
    if (!L.is_scalar()) throw ContractError("backward() needs a scalar loss, got shape " + L.shape_string());
    consumed_ = true;

    std::vector<Tensor<T>> grads(nodes_.size());
    if (nodes_[loss.id].requires_grad) grads[loss.id] = Tensor<T>::scalar(T{1});
    for (std::size_t id = loss.id + 1; id-- > 0;) {
        if (!nodes_[id].requires_grad || grads[id].empty()) continue;
        backward_node(id, grads);
    }

    std::vector<std::vector<std::size_t>> shapes;
    shapes.reserve(nodes_.size());
    for (const auto& n : nodes_) shapes.push_back(n.value.shape());
    return Gradients<T>(std::move(grads), std::move(shapes));
}

template class Gradients<float>;
template class Gradients<double>;
template class Tape<float>;
template class Tape<double>;

}  // namespace analogia
