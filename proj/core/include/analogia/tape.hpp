// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "analogia/tensor.hpp"

namespace analogia {

/// Operation kinds exposed through Tape::apply.
enum class OpKind {
    matmul,
    add,
    sub,
    hadamard,
    sigmoid,
    tanh,
    concat,
    maxpool_time,
    scale,
};

std::string_view to_string(OpKind kind) noexcept;

/// Handle to a tensor recorded on a Tape.
struct Var {
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
    std::size_t id = npos;

    bool valid() const noexcept { return id != npos; }
};

/// Result of Tape::backward: d(loss)/d(t) for every tensor on the tape.
template <typename T>
class Gradients {
public:
    Gradients() = default;
    Gradients(std::vector<Tensor<T>> grads, std::vector<std::vector<std::size_t>> shapes)
        : grads_(std::move(grads)), shapes_(std::move(shapes)) {}

    /// Gradient for `v`; a zero tensor of v's shape when v is not on a path to the loss.
    Tensor<T> of(Var v) const;

    /// True when `v` lies on a path to the loss.
    bool touched(Var v) const { return v.id < grads_.size() && !grads_[v.id].empty(); }

private:
    std::vector<Tensor<T>> grads_;
    std::vector<std::vector<std::size_t>> shapes_;
};

/// Single-use record of a forward computation.
///
/// Every op appends a node holding its value. When tracking is on, nodes that
/// depend on a parameter also remember their inputs; backward() walks the
/// nodes in exact reverse order of creation and may be called once.
template <typename T>
class Tape {
public:
    explicit Tape(bool tracking = true) : tracking_(tracking) {}

    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;
    Tape(Tape&&) noexcept = default;
    Tape& operator=(Tape&&) noexcept = default;

    /// Leaf that never receives gradient flow (frozen embeddings, masks).
    Var constant(Tensor<T> value);
    /// Leaf whose gradient is tracked.
    Var parameter(Tensor<T> value);

    const Tensor<T>& value(Var v) const;
    bool requires_grad(Var v) const;
    bool tracking() const noexcept { return tracking_; }
    bool consumed() const noexcept { return consumed_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    /// Generic entry point. `scalar` is the factor for OpKind::scale and ignored otherwise.
    Var apply(OpKind kind, std::span<const Var> inputs, T scalar = T{1});

    Var matmul(Var a, Var b);
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var hadamard(Var a, Var b);
    Var sigmoid(Var x);
    Var tanh(Var x);
    /// Joins rank-1 tensors end to end.
    Var concat(std::span<const Var> parts);
    /// Columnwise max of a T x d tensor. Ties go to the earliest row.
    Var maxpool_time(Var x);
    Var scale(Var x, T factor);

    // Helpers used by the loss and encoder.
    Var add_scalar(Var x, T offset);
    Var square(Var x);
    Var relu(Var x);
    Var sum(Var x);
    Var dot(Var a, Var b);
    /// Rank-1 tensors of equal length stacked into a (count x length) matrix.
    Var stack_rows(std::span<const Var> rows);
    /// Mean of scalar nodes.
    Var mean(std::span<const Var> scalars);
    /// Cosine of two vectors. If either norm is below eps the result is 0 with
    /// no gradient and `degenerate` (when given) is set.
    Var cosine(Var a, Var b, T eps, bool* degenerate = nullptr);

    /// Reverse pass from a scalar loss.
    /// Throws ContractError if loss is not a scalar, StateError if the tape was
    /// already consumed or records nothing.
    Gradients<T> backward(Var loss);

private:
    enum class Op {
        leaf,
        matmul,
        add,
        sub,
        hadamard,
        sigmoid,
        tanh,
        concat,
        maxpool_time,
        scale,
        add_scalar,
        square,
        relu,
        sum,
        dot,
        stack_rows,
        mean,
        cosine,
    };

    struct Node {
        Op op = Op::leaf;
        Tensor<T> value;
        std::vector<std::size_t> inputs;
        std::vector<std::size_t> aux;  // argmax rows for maxpool_time
        T param{};                     // scale factor; cached norms for cosine
        T param2{};
        bool requires_grad = false;
    };

    const Node& node(Var v) const;
    Var push(Op op, Tensor<T> value, std::vector<std::size_t> inputs);
    void accumulate(std::vector<Tensor<T>>& grads, std::size_t id, const Tensor<T>& g) const;
    void backward_node(std::size_t id, std::vector<Tensor<T>>& grads) const;

    std::vector<Node> nodes_;
    bool tracking_;
    bool consumed_ = false;
};

extern template class Gradients<float>;
extern template class Gradients<double>;
extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace analogia
