// SPDX-License-Identifier: Apache-2.0
#include "analogia/diagnostics.hpp"

#include <algorithm>
#include <vector>

#include "analogia/analogy.hpp"
#include "analogia/encoder.hpp"
#include "analogia/grad_check.hpp"
#include "analogia/rng.hpp"

namespace analogia {

namespace {

Tensor<double> random_tensor(Rng& rng, std::vector<std::size_t> shape, double scale) {
    Tensor<double> t(shape);
    for (auto& v : t.storage()) v = rng.uniform(-scale, scale);
    return t;
}

}  // namespace

GradientSuiteResult run_gradient_suite(const GradientSuiteConfig& config) {
    Rng rng(stream_seed(config.seed, "gradient-suite"));
    GradientSuiteResult result;
    for (std::size_t inst = 0; inst < config.instances; ++inst) {
        const std::size_t h = 1 + rng.below(config.max_hidden);
        const std::size_t din = 1 + rng.below(config.max_input);
        std::vector<std::vector<Tensor<double>>> sentences(4);
        for (auto& s : sentences) {
            const std::size_t steps = 1 + rng.below(config.max_steps);
            for (std::size_t t = 0; t < steps; ++t) s.push_back(random_tensor(rng, {din}, 1.0));
        }
        std::vector<Tensor<double>> params;
        for (int dir = 0; dir < 2; ++dir) {
            for (int k = 0; k < 3; ++k) params.push_back(random_tensor(rng, {h, din}, 1.0));
            for (int k = 0; k < 3; ++k) params.push_back(random_tensor(rng, {h, h}, 1.0));
            for (int k = 0; k < 3; ++k) params.push_back(random_tensor(rng, {h}, 0.5));
        }
        HyperParams hp;
        hp.margin = rng.uniform(-0.5, 0.5);
        hp.loss_variant = inst % 2 ? LossVariant::literal : LossVariant::hinge;
        hp.l2_lambda = 0.01 * static_cast<double>(rng.below(4));
        const int y = static_cast<int>(rng.below(2));

        auto build = [&](auto& tape, std::span<const Var> v) {
            using T = typename std::decay_t<decltype(tape.value(v[0]))>::value_type;
            EncoderVars vars{{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]},
                             {v[9], v[10], v[11], v[12], v[13], v[14], v[15], v[16], v[17]},
                             h};
            Var enc[4];
            for (int s = 0; s < 4; ++s) {
                std::vector<Var> inputs;
                for (const auto& x : sentences[s]) inputs.push_back(tape.constant(x.template cast<T>()));
                enc[s] = encode(tape, vars, std::span<const Var>(inputs));
            }
            const EncodedQuadruple q[] = {{enc[0], enc[1], enc[2], enc[3], y}};
            return batch_loss(tape, std::span<const EncodedQuadruple>(q), hp, v).loss;
        };
        const GradCheckResult r64 = check_gradients<double>(build, params, 1e-5);
        const GradCheckResult r32 = check_gradients<float>(build, params, 1e-4);
        result.coordinates += r64.coordinates;
        result.max_rel_error_64 = std::max(result.max_rel_error_64, r64.max_rel_error);
        result.max_rel_error_32 = std::max(result.max_rel_error_32, r32.max_rel_error);
        if (!(r64.max_rel_error < config.tolerance_64) || !(r32.max_rel_error < config.tolerance_32)) {
            ++result.failures;
        }
        ++result.instances;
    }
    return result;
}

}  // namespace analogia
