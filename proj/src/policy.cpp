// SPDX-License-Identifier: Apache-2.0
#include "promptopt/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "promptopt/rng.hpp"

namespace promptopt {

bool PolicyParams::finite() const {
    for (double v : logits) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

PolicyParams PolicyParams::zeros(const Vocabulary& vocab, std::string tag) {
    PolicyParams p;
    p.vocab_size = vocab.size();
    p.logits.assign(static_cast<size_t>(p.vocab_size) * static_cast<size_t>(p.vocab_size), 0.0);
    p.vocab_hash = vocab.hash();
    p.tag = std::move(tag);
    return p;
}

PolicyParams PolicyParams::seeded_random(const Vocabulary& vocab, uint64_t seed, double scale, std::string tag) {
    PolicyParams p = zeros(vocab, std::move(tag));
    Rng rng(seed);
    for (double& v : p.logits) v = scale * (2.0 * rng.next_double() - 1.0);
    return p;
}

std::vector<double> softmax_row(const PolicyParams& params, int ctx) {
    const int v = params.vocab_size;
    std::vector<double> out(static_cast<size_t>(v));
    double mx = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < v; ++t) mx = std::max(mx, params.at(ctx, t));
    double sum = 0.0;
    for (int t = 0; t < v; ++t) {
        out[static_cast<size_t>(t)] = std::exp(params.at(ctx, t) - mx);
        sum += out[static_cast<size_t>(t)];
    }
    for (double& p : out) p /= sum;
    return out;
}

double log_softmax_at(const PolicyParams& params, int ctx, int next) {
    const int v = params.vocab_size;
    double mx = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < v; ++t) mx = std::max(mx, params.at(ctx, t));
    double sum = 0.0;
    for (int t = 0; t < v; ++t) sum += std::exp(params.at(ctx, t) - mx);
    return params.at(ctx, next) - mx - std::log(sum);
}

namespace {

void check_output_seq(const PolicyParams& params, const TokenSeq& y) {
    if (!eos_terminated(y)) throw std::invalid_argument("log_prob: y must be EOS-terminated");
    if (!well_formed(y, params.vocab_size)) throw std::invalid_argument("log_prob: malformed y");
}

}  // namespace

double log_prob(const PolicyParams& params, const TokenSeq& x, const TokenSeq& y) {
    check_output_seq(params, y);
    double lp = 0.0;
    int ctx = first_context(x);
    for (int t : y) {
        lp += log_softmax_at(params, ctx, t);
        ctx = t;
    }
    return lp;
}

void accumulate_log_prob_grad(const PolicyParams& params, const TokenSeq& x, const TokenSeq& y, double weight,
                              std::vector<double>& grad) {
    check_output_seq(params, y);
    const int v = params.vocab_size;
    int ctx = first_context(x);
    for (int t : y) {
        std::vector<double> p = softmax_row(params, ctx);
        double* row = grad.data() + static_cast<size_t>(ctx) * static_cast<size_t>(v);
        for (int k = 0; k < v; ++k) row[k] -= weight * p[static_cast<size_t>(k)];
        row[t] += weight;
        ctx = t;
    }
}

std::vector<int> nucleus_set(const std::vector<double>& probs, double top_p) {
    const int v = static_cast<int>(probs.size());
    std::vector<int> order(static_cast<size_t>(v));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (probs[static_cast<size_t>(a)] != probs[static_cast<size_t>(b)])
            return probs[static_cast<size_t>(a)] > probs[static_cast<size_t>(b)];
        return a < b;
    });
    std::vector<int> selected;
    double mass = 0.0;
    for (int id : order) {
        selected.push_back(id);
        mass += probs[static_cast<size_t>(id)];
        if (mass >= top_p) break;
    }
    return selected;
}

TokenSeq sample(const PolicyParams& params, const TokenSeq& x, const DecodeConfig& cfg) {
    if (cfg.mode != DecodeConfig::Mode::sample) throw std::invalid_argument("sample: cfg.mode must be sample");
    if (cfg.max_len < 1) throw std::invalid_argument("sample: max_len must be >= 1");
    const int v = params.vocab_size;
    const bool greedy = cfg.temperature <= 1e-6;
    Rng rng(cfg.seed);
    TokenSeq y;
    int ctx = first_context(x);
    for (int step = 0; step < cfg.max_len; ++step) {
        int tok;
        if (greedy) {
            tok = 0;
            for (int t = 1; t < v; ++t) {
                if (params.at(ctx, t) > params.at(ctx, tok)) tok = t;
            }
        } else {
            // Temperature applies before the nucleus filter.
            std::vector<double> probs(static_cast<size_t>(v));
            double mx = -std::numeric_limits<double>::infinity();
            for (int t = 0; t < v; ++t) mx = std::max(mx, params.at(ctx, t) / cfg.temperature);
            double sum = 0.0;
            for (int t = 0; t < v; ++t) {
                probs[static_cast<size_t>(t)] = std::exp(params.at(ctx, t) / cfg.temperature - mx);
                sum += probs[static_cast<size_t>(t)];
            }
            for (double& p : probs) p /= sum;
            std::vector<int> keep = nucleus_set(probs, cfg.top_p);
            double kept_mass = 0.0;
            for (int id : keep) kept_mass += probs[static_cast<size_t>(id)];
            double u = rng.next_double() * kept_mass;
            tok = keep.back();
            double acc = 0.0;
            for (int id : keep) {
                acc += probs[static_cast<size_t>(id)];
                if (u < acc) {
                    tok = id;
                    break;
                }
            }
        }
        if (tok == Vocabulary::kEos) {
            y.push_back(Vocabulary::kEos);
            return y;
        }
        y.push_back(tok);
        ctx = tok;
    }
    y.push_back(Vocabulary::kEos);
    return y;
}

namespace {

struct Hypothesis {
    TokenSeq tokens;
    double logp = 0.0;
    int ctx = Vocabulary::kSep;
};

double finished_score(double logp, size_t len, double length_penalty) {
    return logp / std::pow(static_cast<double>(len), length_penalty);
}

}  // namespace

TokenSeq beam_search(const PolicyParams& params, const TokenSeq& x, const DecodeConfig& cfg) {
    if (cfg.mode != DecodeConfig::Mode::beam) throw std::invalid_argument("beam_search: cfg.mode must be beam");
    if (cfg.beam_size < 1) throw std::invalid_argument("beam_search: beam_size must be >= 1");
    const int v = params.vocab_size;

    std::vector<Hypothesis> active{Hypothesis{{}, 0.0, first_context(x)}};
    TokenSeq best_tokens;
    double best_score = -std::numeric_limits<double>::infinity();
    bool have_best = false;

    struct Expansion {
        int hyp;
        int tok;
        double logp;
    };

    for (int step = 0; step < cfg.max_len && !active.empty(); ++step) {
        std::vector<Expansion> pool;
        pool.reserve(active.size() * static_cast<size_t>(v));
        for (int h = 0; h < static_cast<int>(active.size()); ++h) {
            const int ctx = active[static_cast<size_t>(h)].ctx;
            double mx = -std::numeric_limits<double>::infinity();
            for (int t = 0; t < v; ++t) mx = std::max(mx, params.at(ctx, t));
            double sum = 0.0;
            for (int t = 0; t < v; ++t) sum += std::exp(params.at(ctx, t) - mx);
            const double logz = mx + std::log(sum);
            for (int t = 0; t < v; ++t) {
                pool.push_back({h, t, active[static_cast<size_t>(h)].logp + params.at(ctx, t) - logz});
            }
        }
        // Top beam_size expansions overall; EOS expansions finish and consume
        // their slot, which keeps beam_size = 1 identical to greedy decoding.
        std::stable_sort(pool.begin(), pool.end(), [](const Expansion& a, const Expansion& b) {
            if (a.logp != b.logp) return a.logp > b.logp;
            if (a.hyp != b.hyp) return a.hyp < b.hyp;
            return a.tok < b.tok;
        });
        const size_t take = std::min(pool.size(), static_cast<size_t>(cfg.beam_size));
        std::vector<Hypothesis> next;
        for (size_t i = 0; i < take; ++i) {
            const Expansion& e = pool[i];
            const Hypothesis& h = active[static_cast<size_t>(e.hyp)];
            if (e.tok == Vocabulary::kEos) {
                TokenSeq done = h.tokens;
                done.push_back(Vocabulary::kEos);
                double s = finished_score(e.logp, done.size(), cfg.length_penalty);
                if (!have_best || s > best_score) {
                    best_score = s;
                    best_tokens = std::move(done);
                    have_best = true;
                }
            } else {
                Hypothesis nh;
                nh.tokens = h.tokens;
                nh.tokens.push_back(e.tok);
                nh.logp = e.logp;
                nh.ctx = e.tok;
                next.push_back(std::move(nh));
            }
        }
        active = std::move(next);
    }
    // Hypotheses that reach max_len content tokens take a forced EOS.
    for (const Hypothesis& h : active) {
        const double logp = h.logp + log_softmax_at(params, h.ctx, Vocabulary::kEos);
        TokenSeq done = h.tokens;
        done.push_back(Vocabulary::kEos);
        double s = finished_score(logp, done.size(), cfg.length_penalty);
        if (!have_best || s > best_score) {
            best_score = s;
            best_tokens = std::move(done);
            have_best = true;
        }
    }
    return best_tokens;
}

namespace {
constexpr char kParamsMagic[8] = {'P', 'O', 'P', 'A', 'R', 'M', '0', '1'};
}

void save_params(const PolicyParams& params, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("save_params: cannot write " + file.string());
    out.write(kParamsMagic, sizeof(kParamsMagic));
    auto write_u64 = [&](uint64_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof(v)); };
    write_u64(static_cast<uint64_t>(params.vocab_size));
    write_u64(params.vocab_hash);
    write_u64(params.tag.size());
    out.write(params.tag.data(), static_cast<std::streamsize>(params.tag.size()));
    out.write(reinterpret_cast<const char*>(params.logits.data()),
              static_cast<std::streamsize>(params.logits.size() * sizeof(double)));
    if (!out) throw std::runtime_error("save_params: write failed for " + file.string());
}

PolicyParams load_params(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("load_params: cannot open " + file.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kParamsMagic, sizeof(magic)) != 0)
        throw std::runtime_error("load_params: bad header in " + file.string());
    auto read_u64 = [&]() {
        uint64_t v = 0;
        in.read(reinterpret_cast<char*>(&v), sizeof(v));
        return v;
    };
    PolicyParams p;
    p.vocab_size = static_cast<int>(read_u64());
    p.vocab_hash = read_u64();
    const uint64_t tag_len = read_u64();
    p.tag.resize(tag_len);
    in.read(p.tag.data(), static_cast<std::streamsize>(tag_len));
    p.logits.resize(static_cast<size_t>(p.vocab_size) * static_cast<size_t>(p.vocab_size));
    in.read(reinterpret_cast<char*>(p.logits.data()),
            static_cast<std::streamsize>(p.logits.size() * sizeof(double)));
    if (!in) throw std::runtime_error("load_params: truncated file " + file.string());
    return p;
}

}  // namespace promptopt
