// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "analogia/encoder.hpp"
#include "analogia/error.hpp"
#include "analogia/grad_check.hpp"
#include "analogia/tape.hpp"

using namespace analogia;

namespace {

Tensor<double> random_tensor(std::mt19937_64& gen, std::vector<std::size_t> shape) {
    Tensor<double> t(shape);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : t.storage()) v = u(gen);
    return t;
}

}  // namespace

TEST(Tape, MatmulIdentity) {
    Tape<double> tape;
    Var eye = tape.constant(Tensor<double>::matrix({{1, 0}, {0, 1}}));
    Var m = tape.constant(Tensor<double>::matrix({{3, 4}, {5, 6}}));
    const Var ins[] = {eye, m};
    EXPECT_EQ(tape.value(tape.apply(OpKind::matmul, ins)), Tensor<double>::matrix({{3, 4}, {5, 6}}));
}

TEST(Tape, SigmoidOfZero) {
    Tape<float> tape;
    Var x = tape.constant(Tensor<float>::vector({0.0f}));
    EXPECT_FLOAT_EQ(tape.value(tape.sigmoid(x))[0], 0.5f);
}

TEST(Tape, MaxpoolColumnwise) {
    Tape<double> tape;
    Var x = tape.constant(Tensor<double>::matrix({{1, 5}, {3, 2}}));
    EXPECT_EQ(tape.value(tape.maxpool_time(x)), Tensor<double>::vector({3, 5}));
}

TEST(Tape, SquareGradient) {
    Tape<double> tape;
    Var x = tape.parameter(Tensor<double>::vector({3.0}));
    Var loss = tape.sum(tape.hadamard(x, x));
    auto g = tape.backward(loss);
    EXPECT_DOUBLE_EQ(g.of(x)[0], 6.0);
}

TEST(Tape, UntouchedGradientIsZero) {
    Tape<double> tape;
    Var x = tape.parameter(Tensor<double>::vector({1.0, 2.0}));
    Var w = tape.parameter(Tensor<double>::vector({4.0, -1.0}));
    Var loss = tape.sum(tape.square(x));
    auto g = tape.backward(loss);
    EXPECT_FALSE(g.touched(w));
    EXPECT_EQ(g.of(w), Tensor<double>::vector({0.0, 0.0}));
}

TEST(Tape, ShapeMismatchNamesOp) {
    Tape<double> tape;
    Var a = tape.constant(Tensor<double>::vector({1, 2}));
    Var b = tape.constant(Tensor<double>::vector({1, 2, 3}));
    try {
        tape.add(a, b);
        FAIL() << "expected DimensionError";
    } catch (const DimensionError& e) {
        EXPECT_NE(std::string(e.what()).find("add"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("[3]"), std::string::npos);
    }
    Var m = tape.constant(Tensor<double>::matrix({{1, 2, 3}}));
    EXPECT_THROW(tape.matmul(m, a), DimensionError);
}

TEST(Tape, EmptyTimeAxisIsDomainError) {
    Tape<double> tape;
    EXPECT_THROW(tape.stack_rows({}), DomainError);
    EXPECT_THROW(Tensor<double>({0, 3}), DimensionError);
}

TEST(Tape, BackwardContract) {
    Tape<double> tape;
    Var x = tape.parameter(Tensor<double>::vector({1.0, 2.0}));
    Var y = tape.square(x);
    EXPECT_THROW(tape.backward(y), ContractError);
    Var loss = tape.sum(y);
    tape.backward(loss);
    EXPECT_THROW(tape.backward(loss), StateError);
    EXPECT_THROW(tape.square(x), StateError);
}

TEST(Tape, UntrackedTapeRefusesBackward) {
    Tape<double> tape(false);
    Var x = tape.parameter(Tensor<double>::vector({1.0}));
    EXPECT_FALSE(tape.requires_grad(x));
    EXPECT_THROW(tape.backward(tape.sum(x)), StateError);
}

TEST(Tape, SubOfSelfIsZero) {
    std::mt19937_64 gen(3);
    Tape<double> tape;
    Var u = tape.constant(random_tensor(gen, {3, 4}));
    const auto& z = tape.value(tape.sub(u, u));
    for (double v : z.storage()) EXPECT_EQ(v, 0.0);
}

TEST(Tape, ConcatPreservesElementCount) {
    std::mt19937_64 gen(4);
    for (int trial = 0; trial < 20; ++trial) {
        Tape<double> tape;
        std::vector<Var> parts;
        std::size_t total = 0;
        for (int k = 0; k < 1 + trial % 4; ++k) {
            const std::size_t n = 1 + gen() % 5;
            total += n;
            parts.push_back(tape.constant(random_tensor(gen, {n})));
        }
        EXPECT_EQ(tape.value(tape.concat(parts)).size(), total);
    }
}

TEST(Tape, MaxpoolRoutesGradientToArgmax) {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t steps = 1 + gen() % 5, d = 1 + gen() % 5;
        Tape<double> tape;
        const Tensor<double> xv = random_tensor(gen, {steps, d});
        Var x = tape.parameter(xv);
        Var pooled = tape.maxpool_time(x);
        const Tensor<double> upstream = random_tensor(gen, {d});
        Var loss = tape.dot(pooled, tape.constant(upstream));
        const auto g = tape.backward(loss).of(x);
        for (std::size_t j = 0; j < d; ++j) {
            double col = 0.0;
            std::size_t nonzero = 0;
            for (std::size_t t = 0; t < steps; ++t) {
                col += g(t, j);
                if (g(t, j) != 0.0) {
                    ++nonzero;
                    EXPECT_EQ(xv(t, j), tape.value(pooled)[j]);
                }
            }
            EXPECT_DOUBLE_EQ(col, upstream[j]);
            EXPECT_LE(nonzero, 1u);
        }
    }
}

TEST(Tape, MaxpoolTieGoesToEarliestRow) {
    Tape<double> tape;
    Var x = tape.parameter(Tensor<double>::matrix({{2, 1}, {2, 1}, {0, 1}}));
    const auto g = tape.backward(tape.sum(tape.maxpool_time(x))).of(x);
    EXPECT_EQ(g, Tensor<double>::matrix({{1, 1}, {0, 0}, {0, 0}}));
}

TEST(FiniteDifference, SquareAtThree) {
    auto f = [](auto& tape, Var x) { return tape.sum(tape.hadamard(x, x)); };
    EXPECT_LT(finite_difference_check(f, Tensor<double>::vector({3.0}), 1e-4), 1e-6);
}

TEST(FiniteDifference, ConstantFunction) {
    auto f = [](auto& tape, Var x) { return tape.add_scalar(tape.scale(tape.sum(x), 0.0), 2.5); };
    EXPECT_EQ(finite_difference_check(f, Tensor<double>::vector({0.3, -1.0}), 1e-4), 0.0);
}

TEST(FiniteDifference, SumOfTanh) {
    auto f = [](auto& tape, Var x) { return tape.sum(tape.tanh(x)); };
    EXPECT_LT(finite_difference_check(f, Tensor<double>::vector({0.3, -0.7}), 1e-4), 1e-5);
}

TEST(FiniteDifference, RejectsBadInput) {
    auto f = [](auto& tape, Var x) { return tape.sum(tape.hadamard(x, x)); };
    EXPECT_THROW(finite_difference_check(f, Tensor<double>::vector({1.0}), 0.0), DomainError);
    auto blowup = [](auto& tape, Var x) { return tape.sum(tape.scale(x, 1e308)); };
    EXPECT_THROW(finite_difference_check(blowup, Tensor<double>::vector({10.0}), 1e-4), DomainError);
}

// Every differentiable op kind against central differences, in double and
// with a float analytic pass checked against the double numeric pass.
class OpGradient : public ::testing::TestWithParam<int> {};

TEST_P(OpGradient, MatchesFiniteDifferences) {
    std::mt19937_64 gen(100 + GetParam());
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t m = 1 + gen() % 5, k = 1 + gen() % 5, n = 1 + gen() % 5;
        std::vector<Tensor<double>> params;
        const int kind = GetParam();
        switch (kind) {
            case 0: params = {random_tensor(gen, {m, k}), random_tensor(gen, {k, n})}; break;
            case 1: params = {random_tensor(gen, {m, k}), random_tensor(gen, {k})}; break;
            default: params = {random_tensor(gen, {m, n}), random_tensor(gen, {m, n})}; break;
        }
        auto build = [&](auto& tape, std::span<const Var> v) {
            using T = typename std::decay_t<decltype(tape.value(v[0]))>::value_type;
            Var out;
            switch (kind) {
                case 0: out = tape.matmul(v[0], v[1]); break;
                case 1: out = tape.matmul(v[0], v[1]); break;
                case 2: out = tape.add(v[0], v[1]); break;
                case 3: out = tape.sub(v[0], v[1]); break;
                case 4: out = tape.hadamard(v[0], v[1]); break;
                case 5: out = tape.sigmoid(tape.add(v[0], v[1])); break;
                case 6: out = tape.tanh(tape.sub(v[0], v[1])); break;
                case 7: out = tape.scale(v[0], T(-1.7)); break;
                case 8: out = tape.maxpool_time(tape.add(v[0], v[1])); break;
                default: {
                    const Var a = tape.maxpool_time(v[0]);
                    const Var b = tape.maxpool_time(v[1]);
                    const Var parts[] = {a, b};
                    out = tape.concat(parts);
                    break;
                }
            }
            const auto& shape_val = tape.value(out);
            Tensor<T> w(shape_val.shape());
            for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<T>(std::sin(1.0 + i));
            return tape.dot(out, tape.constant(std::move(w)));
        };
        EXPECT_LT(check_gradients<double>(build, params, 1e-5).max_rel_error, 1e-7) << "op case " << kind;
        EXPECT_LT(check_gradients<float>(build, params, 1e-4).max_rel_error, 1e-4) << "op case " << kind;
    }
}

INSTANTIATE_TEST_SUITE_P(AllKinds, OpGradient, ::testing::Range(0, 10));

TEST(FiniteDifference, ThreeStepGruCell) {
    std::mt19937_64 gen(11);
    const std::size_t hidden = 3, in = 2;
    std::vector<Tensor<double>> params = {
        random_tensor(gen, {hidden, in}),     random_tensor(gen, {hidden, in}), random_tensor(gen, {hidden, in}),
        random_tensor(gen, {hidden, hidden}), random_tensor(gen, {hidden, hidden}),
        random_tensor(gen, {hidden, hidden}), random_tensor(gen, {hidden}),     random_tensor(gen, {hidden}),
        random_tensor(gen, {hidden}),
    };
    std::vector<Tensor<double>> xs = {random_tensor(gen, {in}), random_tensor(gen, {in}), random_tensor(gen, {in})};
    auto build = [&](auto& tape, std::span<const Var> v) {
        using T = typename std::decay_t<decltype(tape.value(v[0]))>::value_type;
        GruVars w{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]};
        Var h = tape.constant(Tensor<T>({hidden}));
        for (const auto& x : xs) h = gru_cell(tape, tape.constant(x.template cast<T>()), h, w);
        return tape.sum(tape.square(h));
    };
    EXPECT_LT(check_gradients<double>(build, params, 1e-4).max_rel_error, 1e-4);
    EXPECT_LT(check_gradients<double>(build, params, 1e-5).max_rel_error, 1e-7);
}
