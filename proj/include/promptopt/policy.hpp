// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "promptopt/tokens.hpp"

namespace promptopt {

// Tabular first-order (bigram) autoregressive model. Rows are unnormalized
// logits indexed by the previous token; softmax is applied at use.
//
// Conditioning on a prompt x is through its boundary token only: the context
// for the first output token is the last token of x, or SEP when x is empty.
// A documented limitation of the tabular class.
struct PolicyParams {
    int vocab_size = 0;
    std::vector<double> logits;  // vocab_size * vocab_size, row-major
    uint64_t vocab_hash = 0;
    std::string tag;  // generation tag, e.g. "init", "SFT", "DPO_1"

    double at(int ctx, int next) const {
        return logits[static_cast<size_t>(ctx) * static_cast<size_t>(vocab_size) + static_cast<size_t>(next)];
    }
    double& at(int ctx, int next) {
        return logits[static_cast<size_t>(ctx) * static_cast<size_t>(vocab_size) + static_cast<size_t>(next)];
    }

    bool finite() const;

    static PolicyParams zeros(const Vocabulary& vocab, std::string tag = "init");
    static PolicyParams seeded_random(const Vocabulary& vocab, uint64_t seed, double scale = 1.0,
                                      std::string tag = "init");
};

struct DecodeConfig {
    enum class Mode { sample, beam };
    double temperature = 0.9;
    double top_p = 0.9;
    int max_len = 64;  // maximum content tokens before EOS is forced
    uint64_t seed = 0;
    Mode mode = Mode::sample;
    int beam_size = 4;
    double length_penalty = 1.0;
};

// Context row feeding the first output token.
inline int first_context(const TokenSeq& x) { return x.empty() ? Vocabulary::kSep : x.back(); }

// Softmax of one context row; entries sum to 1 within 1e-12.
std::vector<double> softmax_row(const PolicyParams& params, int ctx);
// log softmax(row ctx)[next], computed stably.
double log_softmax_at(const PolicyParams& params, int ctx, int next);

// Sum of log softmax(logits[prev])[y_j] over the positions of y (EOS
// included). y must be EOS-terminated.
double log_prob(const PolicyParams& params, const TokenSeq& x, const TokenSeq& y);

// Per-position gradient of log_prob w.r.t. logits, accumulated into grad
// (same shape as logits) with the given weight:
//   d log p / d logits[c][t] = weight * (1{t = observed} - softmax(c)[t]).
void accumulate_log_prob_grad(const PolicyParams& params, const TokenSeq& x, const TokenSeq& y,
                              double weight, std::vector<double>& grad);

// Temperature + nucleus sampling. Deterministic given cfg.seed. The result is
// always EOS-terminated with length <= max_len + 1.
TokenSeq sample(const PolicyParams& params, const TokenSeq& x, const DecodeConfig& cfg);

// Beam search over log probabilities; finished hypotheses are ranked by
// logp / |y|^length_penalty where |y| counts the terminal EOS.
TokenSeq beam_search(const PolicyParams& params, const TokenSeq& x, const DecodeConfig& cfg);

// Nucleus filter over a probability row: smallest (prob desc, id asc) prefix
// with cumulative mass >= top_p. Returns selected ids in that order.
std::vector<int> nucleus_set(const std::vector<double>& probs, double top_p);

// Checkpoint I/O: versioned binary with a vocabulary-hash header.
void save_params(const PolicyParams& params, const std::filesystem::path& file);
PolicyParams load_params(const std::filesystem::path& file);

}  // namespace promptopt
