// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "analogia/analogy.hpp"
#include "analogia/dataset.hpp"
#include "analogia/embeddings.hpp"
#include "analogia/encoder.hpp"
#include "analogia/quadgen.hpp"
#include "analogia/real.hpp"

namespace analogia {

struct AdamConfig {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    /// Decoupled: after the Adam update, theta -= lr * weight_decay * theta.
    double weight_decay = 0.01;
};

template <typename T>
struct AdamState {
    std::vector<Tensor<T>> first;
    std::vector<Tensor<T>> second;
    std::uint64_t step = 0;

    static AdamState for_params(std::span<const Tensor<T>* const> params);
};

/// One bias-corrected Adam update of every tensor in `params`.
/// Throws TrainingError naming `batch_id` if a gradient is not finite.
template <typename T>
void adam_step(std::span<Tensor<T>* const> params, std::span<const Tensor<T>> grads, AdamState<T>& state,
               const AdamConfig& cfg, std::string_view batch_id = {});

struct TrainConfig {
    AdamConfig adam;
    double dropout = 0.5;
    std::size_t epochs = 20;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    HyperParams hp;
    std::size_t output_dim = 300;
    std::size_t negatives_per_positive = 1;
    /// Global gradient-norm clip; 0 disables.
    double clip_norm = 0.0;

    /// Throws ConfigError.
    void validate() const;
};

struct EpochStats {
    std::size_t epoch = 0;
    double mean_loss = 0.0;
    std::size_t degenerate = 0;
    std::size_t quadruples = 0;
};

struct TrainResult {
    EncoderParams<Real> params;
    std::vector<EpochStats> log;
    std::vector<std::string> warnings;
    std::size_t dropped_quadruples = 0;
};

using EpochCallback = std::function<void(const EpochStats&)>;

/// Trains from a seeded initialization on pre-built quadruples.
/// Quadruples with an empty sentence are dropped and counted.
TrainResult train_on_quadruples(const TrainConfig& config, const std::vector<Quadruple>& quadruples,
                                const EmbeddingTable& table, const EpochCallback& on_epoch = {});

/// Generates training quadruples from `dataset` and `prototypes`, then trains.
TrainResult train(const TrainConfig& config, const QADataset& dataset, const PrototypeSet& prototypes,
                  const EmbeddingTable& table, const EpochCallback& on_epoch = {});

/// `epoch<TAB>mean_loss<TAB>degenerate<TAB>quadruples` with a header row.
std::string format_loss_log(const std::vector<EpochStats>& log);

}  // namespace analogia
