#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "naip/losses.hpp"
#include "naip/pairs.hpp"
#include "naip/scorer.hpp"
#include "naip/types.hpp"

namespace naip {

struct TrainConfig {
    LossKind loss = LossKind::bce;
    LossParams loss_params;
    double lr = 1e-4;
    int batch_size = 8;
    int epochs = 1;
    bool curriculum = false;
    BucketRatios curriculum_start = bucket_preset("easiest");
    BucketRatios curriculum_end = bucket_preset("moderate");
    std::uint64_t seed = 42;
    double init_scale = 0.01;

    void validate() const {
        if (lr < 0.0) throw ValidationError("train: lr must be >= 0");
        if (batch_size < 1) throw ValidationError("train: batch_size must be >= 1");
        if (epochs < 1) throw ValidationError("train: epochs must be >= 1");
        loss_params.validate();
    }
};

struct TrainResult {
    ScorerModel model;
    std::vector<double> epoch_mean_loss;
    double max_abs_output_bias_grad = 0.0;  // exactly 0: bias cancels in score diffs
};

// Mini-batch gradient descent on pairwise losses. Per pair,
// d = f(x_a) - f(x_b); the parameter gradient is grad_d times the difference
// of the two score gradients, averaged over the batch. With curriculum on,
// each batch is redrawn from the pool under the interpolated difficulty
// distribution at t = batches_done / total_batches. Fixed seed gives a
// bitwise-reproducible trajectory.
inline TrainResult train(ScorerModel model, const std::vector<PairSample>& pairs,
                         const std::map<std::string, std::vector<double>>& features,
                         const TrainConfig& cfg) {
    cfg.validate();
    if (pairs.empty()) throw ValidationError("train: no pairs");
    for (const auto& p : pairs) {
        if (!features.count(p.id_a))
            throw ValidationError("train: no features for id \"" + p.id_a + "\"");
        if (!features.count(p.id_b))
            throw ValidationError("train: no features for id \"" + p.id_b + "\"");
    }

    const std::size_t n_params = model.param_count();
    const std::size_t bias = model.output_bias_index();
    const int batches_per_epoch =
        static_cast<int>((pairs.size() + cfg.batch_size - 1) / cfg.batch_size);
    const int total_batches = cfg.epochs * batches_per_epoch;

    Rng rng(cfg.seed);
    TrainResult result;
    std::vector<double> grad(n_params);
    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), 0);
    int batches_done = 0;

    // one gradient step over a batch of pool indices; returns summed loss
    auto step = [&](const std::vector<std::size_t>& batch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double batch_loss = 0.0;
        for (std::size_t i : batch) {
            const auto& fa = features.at(pairs[i].id_a);
            const auto& fb = features.at(pairs[i].id_b);
            const double d = score(model, fa) - score(model, fb);
            const LossEval ev =
                eval_loss(cfg.loss, d, pairs[i].label_z, pairs[i].delta_signed, cfg.loss_params);
            if (!std::isfinite(ev.value) || !std::isfinite(ev.grad_d))
                throw std::runtime_error("train: non-finite loss at batch " +
                                         std::to_string(batches_done) +
                                         " (d=" + std::to_string(d) + ")");
            batch_loss += ev.value;
            const double s = ev.grad_d / static_cast<double>(batch.size());
            accumulate_score_grad(model, fa, s, grad);
            accumulate_score_grad(model, fb, -s, grad);
        }
        result.max_abs_output_bias_grad =
            std::max(result.max_abs_output_bias_grad, std::abs(grad[bias]));
        for (std::size_t k = 0; k < n_params; ++k) model.params[k] -= cfg.lr * grad[k];
        ++batches_done;
        return batch_loss;
    };

    // curriculum batches are drawn with replacement, so pre-bucket once
    std::vector<std::size_t> batch;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double epoch_loss = 0.0;
        std::size_t epoch_pairs = 0;
        if (!cfg.curriculum) rng.shuffle(order);

        for (int b = 0; b < batches_per_epoch; ++b) {
            batch.clear();
            if (cfg.curriculum) {
                const double t = static_cast<double>(batches_done) / total_batches;
                const BucketRatios r =
                    curriculum_ratios(t, cfg.curriculum_start, cfg.curriculum_end);
                batch = sample_pair_indices(pairs, r, cfg.batch_size,
                                            rng.fork(batches_done).next_u64());
            } else {
                const std::size_t lo = static_cast<std::size_t>(b) * cfg.batch_size;
                const std::size_t hi = std::min(lo + cfg.batch_size, pairs.size());
                batch.assign(order.begin() + lo, order.begin() + hi);
            }
            epoch_loss += step(batch);
            epoch_pairs += batch.size();
        }
        result.epoch_mean_loss.push_back(epoch_loss / static_cast<double>(epoch_pairs));
    }
    result.model = std::move(model);
    return result;
}

// One forward pass per paper; cost linear in paper count.
inline std::map<std::string, double> predict_all(const ScorerModel& model,
                                                 const std::vector<PaperRecord>& papers) {
    std::map<std::string, double> out;
    for (const auto& p : papers) {
        if (p.features.empty())
            throw ValidationError("predict_all: paper \"" + p.id + "\" has no features");
        out[p.id] = score(model, p.features);
    }
    return out;
}

inline std::map<std::string, std::vector<double>> feature_map(
    const std::vector<PaperRecord>& papers) {
    std::map<std::string, std::vector<double>> out;
    for (const auto& p : papers) out[p.id] = p.features;
    return out;
}

}  // namespace naip
