// SPDX-License-Identifier: Apache-2.0
#include "analogia/training.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "analogia/error.hpp"
#include "analogia/io.hpp"
#include "analogia/rng.hpp"

namespace analogia {

template <typename T>
AdamState<T> AdamState<T>::for_params(std::span<const Tensor<T>* const> params) {
    AdamState s;
    for (const Tensor<T>* p : params) {
        s.first.push_back(Tensor<T>::zeros_like(*p));
        s.second.push_back(Tensor<T>::zeros_like(*p));
    }
    return s;
}

template <typename T>
void adam_step(std::span<Tensor<T>* const> params, std::span<const Tensor<T>> grads, AdamState<T>& state,
               const AdamConfig& cfg, std::string_view batch_id) {
    if (params.size() != grads.size() || params.size() != state.first.size()) {
        throw ContractError("adam_step: parameter, gradient and state counts differ");
    }
    for (std::size_t k = 0; k < params.size(); ++k) {
        if (!params[k]->same_shape(grads[k])) {
            throw DimensionError("adam_step: gradient shape " + grads[k].shape_string() + " does not match parameter " +
                                 params[k]->shape_string());
        }
        if (!grads[k].all_finite()) {
            throw TrainingError("non-finite gradient in batch " + std::string(batch_id));
        }
    }

    ++state.step;
    const double t = static_cast<double>(state.step);
    const double correct1 = 1.0 - std::pow(cfg.beta1, t);
    const double correct2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t k = 0; k < params.size(); ++k) {
        Tensor<T>& theta = *params[k];
        Tensor<T>& m = state.first[k];
        Tensor<T>& v = state.second[k];
        const Tensor<T>& g = grads[k];
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double gi = g[i];
            const double mi = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gi;
            const double vi = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * gi * gi;
            m[i] = static_cast<T>(mi);
            v[i] = static_cast<T>(vi);
            const double m_hat = mi / correct1;
            const double v_hat = vi / correct2;
            double x = static_cast<double>(theta[i]) - cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
            x -= cfg.lr * cfg.weight_decay * x;
            theta[i] = static_cast<T>(x);
        }
    }
}

void TrainConfig::validate() const {
    if (!(adam.lr >= 0.0)) throw ConfigError("learning rate must be non-negative");
    if (!(adam.weight_decay >= 0.0)) throw ConfigError("weight decay must be non-negative");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
    if (batch_size == 0) throw ConfigError("batch size must be positive");
    if (output_dim == 0 || output_dim % 2 != 0) throw ConfigError("output dimension must be a positive even number");
    if (!(clip_norm >= 0.0)) throw ConfigError("clip norm must be non-negative");
    hp.validate();
}

namespace {

bool usable(const Quadruple& q) {
    return !q.a.empty() && !q.b.empty() && !q.c.empty() && !q.d.empty();
}

void clip_gradients(std::vector<Tensor<Real>>& grads, double max_norm) {
    double sq = 0.0;
    for (const auto& g : grads)
        for (Real v : g.storage()) sq += static_cast<double>(v) * v;
    const double norm = std::sqrt(sq);
    if (norm <= max_norm || norm == 0.0) return;
    const double s = max_norm / norm;
    for (auto& g : grads)
        for (Real& v : g.storage()) v = static_cast<Real>(v * s);
}

}  // namespace

TrainResult train_on_quadruples(const TrainConfig& config, const std::vector<Quadruple>& quadruples,
                                const EmbeddingTable& table, const EpochCallback& on_epoch) {
    config.validate();
    if (table.dim() == 0) throw ConfigError("embedding table is empty");

    TrainResult result;
    result.params = EncoderParams<Real>::init(table.dim(), config.output_dim / 2, stream_seed(config.seed, "init"));

    std::vector<const Quadruple*> pool;
    for (const auto& q : quadruples) {
        if (usable(q)) {
            pool.push_back(&q);
        } else {
            ++result.dropped_quadruples;
        }
    }
    if (result.dropped_quadruples) {
        result.warnings.push_back("dropped " + std::to_string(result.dropped_quadruples) +
                                  " quadruples containing an empty sentence");
    }
    if (pool.empty()) throw ContractError("no usable training quadruples");

    auto named = result.params.named();
    std::vector<Tensor<Real>*> param_ptrs;
    for (auto& [name, t] : named) param_ptrs.push_back(t);
    std::vector<const Tensor<Real>*> const_ptrs(param_ptrs.begin(), param_ptrs.end());
    AdamState<Real> adam = AdamState<Real>::for_params(const_ptrs);

    const std::uint64_t dropout_base = stream_seed(config.seed, "dropout");
    std::uint64_t dropout_counter = 0;

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        std::vector<std::size_t> order(pool.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(stream_seed(config.seed, "epoch/" + std::to_string(epoch)));
        rng.shuffle(order);

        EpochStats stats;
        stats.epoch = epoch;
        double loss_sum = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);

            Tape<Real> tape(true);
            const EncoderVars vars = bind(tape, result.params, true);
            // The encoder runs once per distinct sentence in the batch; each
            // occurrence still gets its own dropout mask on the pooled vector.
            std::map<TokenSeq, Var> encoded;
            auto pooled = [&](const TokenSeq& s) {
                auto it = encoded.find(s);
                if (it == encoded.end()) it = encoded.emplace(s, encode(tape, vars, s, table)).first;
                const DropoutSpec spec{config.dropout, true, splitmix64(dropout_base + dropout_counter++)};
                return apply_dropout(tape, it->second, spec);
            };

            std::vector<EncodedQuadruple> batch;
            batch.reserve(end - start);
            for (std::size_t i = start; i < end; ++i) {
                const Quadruple& q = *pool[order[i]];
                EncodedQuadruple e;
                e.a = pooled(q.a);
                e.b = pooled(q.b);
                e.c = pooled(q.c);
                e.d = pooled(q.d);
                e.y = q.y;
                batch.push_back(e);
            }

            const std::vector<Var> trainable = vars.all();
            const BatchLoss bl = batch_loss(tape, std::span<const EncodedQuadruple>(batch), config.hp, trainable);
            const double loss = tape.value(bl.loss).item();
            const std::string batch_id = "epoch " + std::to_string(epoch) + " batch " + std::to_string(batch_index);
            if (!std::isfinite(loss)) throw TrainingError("non-finite loss in " + batch_id);
            if (bl.degenerate == batch.size()) {
                result.warnings.push_back("all energies degenerate in " + batch_id);
            }
            stats.degenerate += bl.degenerate;
            loss_sum += loss * static_cast<double>(batch.size());

            const Gradients<Real> grads = tape.backward(bl.loss);
            std::vector<Tensor<Real>> g;
            g.reserve(trainable.size());
            for (Var v : trainable) g.push_back(grads.of(v));
            if (config.clip_norm > 0.0) clip_gradients(g, config.clip_norm);
            adam_step<Real>(param_ptrs, g, adam, config.adam, batch_id);
        }
        stats.quadruples = pool.size();
        stats.mean_loss = loss_sum / static_cast<double>(pool.size());
        result.log.push_back(stats);
        if (on_epoch) on_epoch(stats);
    }
    return result;
}

TrainResult train(const TrainConfig& config, const QADataset& dataset, const PrototypeSet& prototypes,
                  const EmbeddingTable& table, const EpochCallback& on_epoch) {
    const auto quads = generate_training_quadruples(dataset, prototypes, config.negatives_per_positive,
                                                    stream_seed(config.seed, "quadruples"));
    if (quads.empty()) throw ContractError("no training quadruples could be generated");
    return train_on_quadruples(config, quads, table, on_epoch);
}

std::string format_loss_log(const std::vector<EpochStats>& log) {
    std::ostringstream os;
    os << "epoch\tmean_loss\tdegenerate\tquadruples\n";
    for (const auto& e : log) {
        os << e.epoch << '\t' << format_real(e.mean_loss) << '\t' << e.degenerate << '\t' << e.quadruples << '\n';
    }
    return os.str();
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step<float>(std::span<Tensor<float>* const>, std::span<const Tensor<float>>, AdamState<float>&,
                               const AdamConfig&, std::string_view);
template void adam_step<double>(std::span<Tensor<double>* const>, std::span<const Tensor<double>>,
                                AdamState<double>&, const AdamConfig&, std::string_view);

}  // namespace analogia
