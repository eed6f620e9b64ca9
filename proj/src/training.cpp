// SPDX-License-Identifier: Apache-2.0
#include "promptopt/training.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "promptopt/rng.hpp"

namespace promptopt {

double LrSchedule::at(int step) const {
    if (warmup_steps > 0 && step < warmup_steps) {
        return base_lr * static_cast<double>(step + 1) / static_cast<double>(warmup_steps);
    }
    const int span = std::max(1, cosine_horizon - warmup_steps);
    double progress = static_cast<double>(step - warmup_steps) / static_cast<double>(span);
    progress = std::clamp(progress, 0.0, 1.0);
    return base_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

void TrainConfig::validate() const {
    if (lr.base_lr <= 0) throw std::invalid_argument("TrainConfig: lr must be positive");
    if (dpo_beta <= 0) throw std::invalid_argument("TrainConfig: dpo_beta must be positive");
    if (weight_decay < 0 || weight_decay >= 1) throw std::invalid_argument("TrainConfig: weight_decay in [0,1)");
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (epochs < 0) throw std::invalid_argument("TrainConfig: epochs must be >= 0");
}

TrainConfig TrainConfig::sft_defaults() {
    TrainConfig c;
    c.lr.base_lr = 2e-5;
    c.batch_size = 16;
    c.weight_decay = 0.1;
    c.beta1 = 0.9;
    c.beta2 = 0.95;
    return c;
}

TrainConfig TrainConfig::dpo_defaults() {
    TrainConfig c;
    c.lr.base_lr = 1e-5;
    c.batch_size = 32;
    c.weight_decay = 0.0;
    c.beta1 = 0.9;
    c.beta2 = 0.95;
    c.epochs = 4;
    c.dpo_beta = 0.1;
    return c;
}

std::string next_dpo_stage(const std::string& stage) {
    if (stage == "SFT") return "DPO_1";
    if (stage.rfind("DPO_", 0) == 0) {
        int k = std::stoi(stage.substr(4));
        return "DPO_" + std::to_string(k + 1);
    }
    throw std::invalid_argument("next_dpo_stage: snapshot stage must be SFT or DPO_k, got " + stage);
}

std::pair<double, GradTable> sft_loss_and_grad(const PolicyParams& params,
                                               std::span<const std::pair<TokenSeq, TokenSeq>> batch) {
    if (batch.empty()) throw std::invalid_argument("sft_loss_and_grad: empty batch");
    const double inv = 1.0 / static_cast<double>(batch.size());
    GradTable grad(params.logits.size(), 0.0);
    double loss = 0.0;
    for (const auto& [x, y] : batch) {
        loss -= log_prob(params, x, y);
        // d(-log p)/d logits = -(d log p/d logits)
        accumulate_log_prob_grad(params, x, y, -inv, grad);
    }
    return {loss * inv, std::move(grad)};
}

void optimizer_step(PolicyParams& params, AdamState& state, const GradTable& grads, int step_index,
                    const TrainConfig& cfg) {
    if (grads.size() != params.logits.size() || state.m.size() != grads.size())
        throw std::invalid_argument("optimizer_step: shape mismatch");
    const double lr = cfg.lr.at(step_index);
    const double t = static_cast<double>(step_index + 1);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    for (size_t i = 0; i < grads.size(); ++i) {
        const double g = grads[i];
        if (!std::isfinite(g))
            throw std::runtime_error("optimizer_step: non-finite gradient at entry " + std::to_string(i));
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params.logits[i] -= lr * (mhat / (std::sqrt(vhat) + cfg.adam_eps) + cfg.weight_decay * params.logits[i]);
    }
}

double bt_probability(double r_winner, double r_loser) {
    const double d = r_winner - r_loser;
    if (d >= 0) return 1.0 / (1.0 + std::exp(-d));
    const double e = std::exp(d);
    return e / (1.0 + e);
}

double implicit_reward(const PolicyParams& params, const PolicyParams& ref_params, const TokenSeq& x,
                       const TokenSeq& y, double lambda) {
    if (params.vocab_size != ref_params.vocab_size || params.vocab_hash != ref_params.vocab_hash)
        throw std::invalid_argument("implicit_reward: params and reference use different vocabularies");
    if (lambda == 0.0) return 0.0;
    return lambda * (log_prob(params, x, y) - log_prob(ref_params, x, y));
}

namespace {

// log(1 + exp(-m)), stable for both signs of m.
double softplus_neg(double m) {
    if (m > 0) return std::log1p(std::exp(-m));
    return -m + std::log1p(std::exp(m));
}

}  // namespace

std::pair<double, GradTable> dpo_loss_and_grad(const PolicyParams& params, const PolicyParams& ref_params,
                                               std::span<const PreferencePair> pairs, double lambda) {
    if (pairs.empty()) throw std::invalid_argument("dpo_loss_and_grad: empty pair set");
    const double inv = 1.0 / static_cast<double>(pairs.size());
    GradTable grad(params.logits.size(), 0.0);
    double loss = 0.0;
    for (const PreferencePair& pair : pairs) {
        if (pair.winner == pair.loser)
            throw std::invalid_argument("dpo_loss_and_grad: pair with winner == loser must be filtered upstream");
        const double margin = implicit_reward(params, ref_params, pair.input, pair.winner, lambda) -
                              implicit_reward(params, ref_params, pair.input, pair.loser, lambda);
        loss += softplus_neg(margin);
        const double w = -(1.0 - bt_probability(margin, 0.0)) * lambda * inv;
        // d loss/d theta = -(1 - sigma(margin)) * lambda * (grad logp_w - grad logp_l)
        accumulate_log_prob_grad(params, pair.input, pair.winner, w, grad);
        accumulate_log_prob_grad(params, pair.input, pair.loser, -w, grad);
    }
    return {loss * inv, std::move(grad)};
}

namespace {

// Central finite-difference spot check of a handful of gradient entries;
// used when TrainConfig::grad_check is enabled.
void spot_check_grad(const PolicyParams& params, const GradTable& grad,
                     const std::function<double(const PolicyParams&)>& loss_fn, uint64_t seed) {
    Rng rng(seed);
    const double h = 1e-5;
    for (int probe = 0; probe < 4; ++probe) {
        const size_t i = static_cast<size_t>(rng.next_int(static_cast<int>(params.logits.size())));
        PolicyParams p = params;
        p.logits[i] += h;
        const double up = loss_fn(p);
        p.logits[i] -= 2 * h;
        const double dn = loss_fn(p);
        const double fd = (up - dn) / (2 * h);
        const double denom = std::max({std::abs(fd), std::abs(grad[i]), 1e-8});
        if (std::abs(fd - grad[i]) / denom > 1e-3)
            throw std::runtime_error("grad_check: analytic/finite-difference mismatch at entry " + std::to_string(i));
    }
}

std::vector<size_t> epoch_order(size_t n, uint64_t seed, int epoch) {
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(derive_seed(seed, "shuffle", {static_cast<uint64_t>(epoch)}));
    for (size_t i = n; i > 1; --i) {
        const size_t j = static_cast<size_t>(rng.next_int(static_cast<int>(i)));
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

}  // namespace

ModelSnapshot train_sft(const PolicyParams& init_params, std::span<const std::pair<TokenSeq, TokenSeq>> dataset,
                        const TrainConfig& cfg, TrainLog* log) {
    cfg.validate();
    if (dataset.empty()) throw std::invalid_argument("train_sft: empty dataset");
    ModelSnapshot snap{init_params, "SFT", init_params.tag};
    snap.params.tag = "SFT";
    if (cfg.epochs == 0) return snap;

    AdamState state = AdamState::zeros(snap.params.logits.size());
    int step = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const std::vector<size_t> order = epoch_order(dataset.size(), cfg.seed, epoch);
        for (size_t begin = 0; begin < order.size(); begin += static_cast<size_t>(cfg.batch_size)) {
            const size_t end = std::min(order.size(), begin + static_cast<size_t>(cfg.batch_size));
            std::vector<std::pair<TokenSeq, TokenSeq>> batch;
            batch.reserve(end - begin);
            for (size_t i = begin; i < end; ++i) batch.push_back(dataset[order[i]]);
            auto [loss, grad] = sft_loss_and_grad(snap.params, batch);
            if (cfg.grad_check && step % 16 == 0) {
                spot_check_grad(snap.params, grad,
                                [&](const PolicyParams& p) { return sft_loss_and_grad(p, batch).first; },
                                derive_seed(cfg.seed, "gradcheck", {static_cast<uint64_t>(step)}));
            }
            optimizer_step(snap.params, state, grad, step, cfg);
            if (log) log->push_back({"SFT", step, cfg.lr.at(step), loss});
            ++step;
        }
    }
    return snap;
}

ModelSnapshot train_dpo(const ModelSnapshot& snapshot, std::span<const PreferencePair> pairs,
                        const TrainConfig& cfg, TrainLog* log) {
    cfg.validate();
    if (pairs.empty()) throw std::invalid_argument("train_dpo: empty pair set");
    const std::string stage = next_dpo_stage(snapshot.stage);
    const PolicyParams& ref = snapshot.params;  // frozen reference for the whole run
    ModelSnapshot out{snapshot.params, stage, snapshot.stage};
    out.params.tag = stage;
    if (cfg.epochs == 0) return out;

    AdamState state = AdamState::zeros(out.params.logits.size());
    int step = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const std::vector<size_t> order = epoch_order(pairs.size(), cfg.seed, epoch);
        for (size_t begin = 0; begin < order.size(); begin += static_cast<size_t>(cfg.batch_size)) {
            const size_t end = std::min(order.size(), begin + static_cast<size_t>(cfg.batch_size));
            std::vector<PreferencePair> batch;
            batch.reserve(end - begin);
            for (size_t i = begin; i < end; ++i) batch.push_back(pairs[order[i]]);
            auto [loss, grad] = dpo_loss_and_grad(out.params, ref, batch, cfg.dpo_beta);
            if (cfg.grad_check && step % 16 == 0) {
                spot_check_grad(out.params, grad,
                                [&](const PolicyParams& p) { return dpo_loss_and_grad(p, ref, batch, cfg.dpo_beta).first; },
                                derive_seed(cfg.seed, "gradcheck", {static_cast<uint64_t>(step)}));
            }
            optimizer_step(out.params, state, grad, step, cfg);
            if (log) log->push_back({stage, step, cfg.lr.at(step), loss});
            ++step;
        }
    }
    return out;
}

}  // namespace promptopt
