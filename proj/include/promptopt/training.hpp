// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "promptopt/policy.hpp"
#include "promptopt/tokens.hpp"

namespace promptopt {

struct LrSchedule {
    double base_lr = 2e-5;
    int warmup_steps = 10;
    int cosine_horizon = 1000;  // step count at which the cosine reaches zero

    // Linear warmup to base_lr, then cosine decay to zero at the horizon.
    double at(int step) const;
};

struct TrainConfig {
    LrSchedule lr;
    int batch_size = 16;
    double weight_decay = 0.1;
    double beta1 = 0.9;
    double beta2 = 0.95;
    double adam_eps = 1e-8;
    int epochs = 4;
    double dpo_beta = 0.1;  // the lambda of the DPO loss
    bool grad_check = false;
    uint64_t seed = 0;

    void validate() const;

    // Paper defaults for the two stages.
    static TrainConfig sft_defaults();
    static TrainConfig dpo_defaults();
};

enum class PairKind { rewrite, judgment };

struct PairProvenance {
    int iteration = 0;
    int winner_total = 0;
    int loser_total = 0;
};

struct PreferencePair {
    TokenSeq input;   // x for rewrite pairs; serialized judged context otherwise
    TokenSeq winner;  // EOS-terminated
    TokenSeq loser;   // EOS-terminated, != winner
    PairKind kind = PairKind::rewrite;
    PairProvenance provenance;
};

struct ModelSnapshot {
    PolicyParams params;
    std::string stage;   // "init", "SFT", "DPO_1", ...
    std::string parent;  // previous stage label, empty for init
};

// Stage-label chain helpers: "SFT" follows "init", "DPO_{k+1}" follows
// "DPO_k" or "SFT".
std::string next_dpo_stage(const std::string& stage);

using GradTable = std::vector<double>;  // same shape as PolicyParams::logits

// Mean negative log-likelihood over the batch plus its exact gradient.
std::pair<double, GradTable> sft_loss_and_grad(const PolicyParams& params,
                                               std::span<const std::pair<TokenSeq, TokenSeq>> batch);

struct AdamState {
    std::vector<double> m, v;
    static AdamState zeros(size_t n) { return AdamState{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)}; }
};

// One AdamW step with bias correction and decoupled weight decay, at the
// schedule's lr for step_index. Throws on non-finite gradient entries.
void optimizer_step(PolicyParams& params, AdamState& state, const GradTable& grads, int step_index,
                    const TrainConfig& cfg);

// Bradley-Terry preference probability, computed via the sigmoid of the
// reward difference.
double bt_probability(double r_winner, double r_loser);

// Delta_lambda(y|x) = lambda * (log pi_theta(y|x) - log pi_ref(y|x)).
double implicit_reward(const PolicyParams& params, const PolicyParams& ref_params, const TokenSeq& x,
                       const TokenSeq& y, double lambda);

// Mean of -log sigmoid(margin) over pairs plus its exact gradient w.r.t.
// params (the reference stays frozen). Rejects pairs with winner == loser.
std::pair<double, GradTable> dpo_loss_and_grad(const PolicyParams& params, const PolicyParams& ref_params,
                                               std::span<const PreferencePair> pairs, double lambda);

struct TrainLogRecord {
    std::string stage;
    int step = 0;
    double lr = 0.0;
    double loss = 0.0;
};

using TrainLog = std::vector<TrainLogRecord>;

ModelSnapshot train_sft(const PolicyParams& init_params, std::span<const std::pair<TokenSeq, TokenSeq>> dataset,
                        const TrainConfig& cfg, TrainLog* log = nullptr);

// Reference model = the incoming snapshot's params, frozen for the run. The
// result stage advances the DPO chain.
ModelSnapshot train_dpo(const ModelSnapshot& snapshot, std::span<const PreferencePair> pairs,
                        const TrainConfig& cfg, TrainLog* log = nullptr);

}  // namespace promptopt
