// SPDX-License-Identifier: Apache-2.0
#include "promptopt/judge.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

#include "promptopt/rng.hpp"

namespace promptopt {

const std::array<JudgeKind, kNumMetrics> kMetricKinds = {JudgeKind::aesthetic, JudgeKind::pick,
                                                         JudgeKind::alignment};
const std::array<const char*, kNumMetrics> kMetricNames = {"aesthetic", "pick", "relevance"};

bool is_judgment_kind(JudgeKind kind) {
    return kind == JudgeKind::aesthetic_judgment || kind == JudgeKind::pick_judgment;
}

std::pair<int, int> score_range(JudgeKind kind) {
    return is_judgment_kind(kind) ? std::pair<int, int>{1, 5} : std::pair<int, int>{0, 5};
}

const char* kind_name(JudgeKind kind) {
    switch (kind) {
        case JudgeKind::aesthetic: return "aesthetic";
        case JudgeKind::alignment: return "alignment";
        case JudgeKind::pick: return "pick";
        case JudgeKind::aesthetic_judgment: return "aesthetic_judgment";
        case JudgeKind::pick_judgment: return "pick_judgment";
    }
    return "?";
}

namespace {

void replace_all(std::string& text, const std::string& needle, const std::string& value) {
    size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        text.replace(pos, needle.size(), value);
        pos += value.size();
    }
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string clip(const std::string& s, size_t n = 80) { return s.size() <= n ? s : s.substr(0, n) + "..."; }

}  // namespace

std::string render_template(JudgeKind kind, const TemplateSlots& slots) {
    std::string out = template_text(kind);
    const bool needs_text = kind == JudgeKind::alignment || kind == JudgeKind::pick || kind == JudgeKind::pick_judgment;
    if (needs_text && !slots.text)
        throw MissingSlot(std::string("render_template: ") + kind_name(kind) + " requires a Text/Prompt slot");
    if (is_judgment_kind(kind)) {
        if (!slots.question || !slots.answers)
            throw MissingSlot(std::string("render_template: ") + kind_name(kind) +
                              " requires question and two answers");
        replace_all(out, "{{question}}", *slots.question);
        replace_all(out, "{{answer_A}}", slots.answers->first);
        replace_all(out, "{{answer_B}}", slots.answers->second);
        if (kind == JudgeKind::pick_judgment) replace_all(out, "{{prompt}}", *slots.text);
    } else if (needs_text) {
        replace_all(out, "<PROMPT>", *slots.text);
    }
    return out;
}

namespace {

// Case-insensitive substring search.
size_t ifind(const std::string& hay, const std::string& needle, size_t from = 0) {
    const std::string h = lower(hay), n = lower(needle);
    return h.find(n, from);
}

SlotResult parse_block(const std::string& raw, size_t begin, size_t end, JudgeKind kind, const char* label) {
    const std::string block = raw.substr(begin, end - begin);
    size_t score_pos = ifind(block, "score");
    if (score_pos == std::string::npos)
        throw ParseError(ParseError::Code::missing_score, clip(block),
                         std::string("parse_response: no Score marker in block ") + label);
    // First integer after the marker.
    size_t d = score_pos + 5;
    while (d < block.size() && !std::isdigit(static_cast<unsigned char>(block[d])) && block[d] != '-') ++d;
    if (d >= block.size() || (block[d] == '-' && (d + 1 >= block.size() || !std::isdigit(static_cast<unsigned char>(block[d + 1])))))
        throw ParseError(ParseError::Code::missing_score, clip(block.substr(score_pos)),
                         std::string("parse_response: no integer after Score in block ") + label);
    size_t num_end = d + (block[d] == '-' ? 1 : 0);
    while (num_end < block.size() && std::isdigit(static_cast<unsigned char>(block[num_end]))) ++num_end;
    const int score = std::stoi(block.substr(d, num_end - d));
    const auto [lo, hi] = score_range(kind);
    if (score < lo || score > hi)
        throw ParseError(ParseError::Code::score_out_of_range, block.substr(d, num_end - d),
                         std::string("parse_response: score ") + std::to_string(score) + " outside [" +
                             std::to_string(lo) + "," + std::to_string(hi) + "] in block " + label);
    SlotResult slot;
    slot.score = score;
    size_t expl_pos = ifind(block, "explanation", num_end);
    if (expl_pos != std::string::npos) {
        size_t e = expl_pos + 11;
        if (e < block.size() && block[e] == ':') ++e;
        while (e < block.size() && (block[e] == ' ' || block[e] == '*')) ++e;
        std::string text = block.substr(e);
        while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
        slot.explanation = std::move(text);
    }
    return slot;
}

}  // namespace

JudgeResponse parse_response(const std::string& raw, JudgeKind kind) {
    const bool judgment = is_judgment_kind(kind);
    const std::string head1 = judgment ? "output for answer a" : "output for image 1";
    const std::string head2 = judgment ? "output for answer b" : "output for image 2";
    const size_t pos1 = ifind(raw, head1);
    if (pos1 == std::string::npos)
        throw ParseError(ParseError::Code::missing_block, clip(raw),
                         "parse_response: missing block '" + head1 + "'");
    const size_t pos2 = ifind(raw, head2, pos1 + head1.size());
    if (pos2 == std::string::npos)
        throw ParseError(ParseError::Code::missing_block, clip(raw.substr(pos1)),
                         "parse_response: missing block '" + head2 + "'");
    JudgeResponse resp;
    resp.kind = kind;
    resp.slot1 = parse_block(raw, pos1 + head1.size(), pos2, kind, judgment ? "Answer A" : "Image 1");
    resp.slot2 = parse_block(raw, pos2 + head2.size(), raw.size(), kind, judgment ? "Answer B" : "Image 2");
    return resp;
}

std::string canonical_response(JudgeKind kind, int score1, const std::string& explanation1, int score2,
                               const std::string& explanation2) {
    const char* a = is_judgment_kind(kind) ? "Answer A" : "Image 1";
    const char* b = is_judgment_kind(kind) ? "Answer B" : "Image 2";
    std::ostringstream os;
    os << "Output for " << a << ":\nScore: " << score1 << "\nExplanation: " << explanation1 << "\n\n"
       << "Output for " << b << ":\nScore: " << score2 << "\nExplanation: " << explanation2;
    return os.str();
}

int ScoreCard::total() const {
    int t = 0;
    for (const auto& row : candidate) {
        for (int s : row) t += s;
    }
    return t;
}

int ScoreCard::original_total() const {
    int t = 0;
    for (const auto& row : original) {
        for (int s : row) t += s;
    }
    return t;
}

int JudgmentVerdict::total_a() const { return std::accumulate(answer_a.begin(), answer_a.end(), 0); }
int JudgmentVerdict::total_b() const { return std::accumulate(answer_b.begin(), answer_b.end(), 0); }

namespace {

JudgeRequest make_image_request(JudgeKind kind, const std::string& raw_prompt, const ImageHandle& first,
                                const ImageHandle& second, const ScoringConfig& cfg, uint64_t seed) {
    TemplateSlots slots;
    if (kind != JudgeKind::aesthetic) slots.text = raw_prompt;
    JudgeRequest req;
    Message msg;
    msg.parts.push_back(MessagePart::from_text(render_template(kind, slots)));
    msg.parts.push_back(MessagePart::from_image(first));
    msg.parts.push_back(MessagePart::from_image(second));
    req.messages.push_back(std::move(msg));
    req.sampling = {cfg.temperature, cfg.top_p, cfg.max_tokens};
    req.seed = seed;
    return req;
}

// One scoring call with retries; returns nullopt when retries are exhausted.
std::optional<JudgeResponse> sampled_response(JudgeBackend& backend, const JudgeRequest& base, JudgeKind kind,
                                              int retries) {
    for (int attempt = 0; attempt <= retries; ++attempt) {
        JudgeRequest req = base;
        req.seed = derive_seed(base.seed, {static_cast<uint64_t>(attempt)});
        try {
            return parse_response(backend.complete(req), kind);
        } catch (const ParseError&) {
            continue;
        }
    }
    return std::nullopt;
}

}  // namespace

ScoreCard score_candidate(JudgeBackend& backend, const std::string& raw_prompt, const ImageHandle& original,
                          const ImageHandle& candidate, const ScoringConfig& cfg) {
    ScoreCard card;
    for (int m = 0; m < kNumMetrics; ++m) {
        const JudgeKind kind = kMetricKinds[static_cast<size_t>(m)];
        for (int s = 0; s < kSamplesPerMetric; ++s) {
            const uint64_t seed = derive_seed(cfg.seed, {static_cast<uint64_t>(m), static_cast<uint64_t>(s)});
            JudgeRequest req = make_image_request(kind, raw_prompt, original, candidate, cfg, seed);
            std::optional<JudgeResponse> resp = sampled_response(backend, req, kind, cfg.parse_retries);
            if (!resp) {
                card.unscorable = true;
                return card;
            }
            int cand_score = resp->slot2.score;
            int orig_score = resp->slot1.score;
            if (cfg.swap_debias) {
                JudgeRequest swapped =
                    make_image_request(kind, raw_prompt, candidate, original, cfg, derive_seed(seed, {1u}));
                std::optional<JudgeResponse> sresp = sampled_response(backend, swapped, kind, cfg.parse_retries);
                if (!sresp) {
                    card.unscorable = true;
                    return card;
                }
                cand_score = (cand_score + sresp->slot1.score + 1) / 2;
                orig_score = (orig_score + sresp->slot2.score + 1) / 2;
            }
            card.candidate[static_cast<size_t>(m)][static_cast<size_t>(s)] = cand_score;
            card.original[static_cast<size_t>(m)][static_cast<size_t>(s)] = orig_score;
        }
    }
    return card;
}

JudgmentVerdict judge_responses(JudgeBackend& backend, const std::string& question,
                                const std::vector<ImageHandle>& images, const std::string& answer_a,
                                const std::string& answer_b, JudgeKind kind, const ScoringConfig& cfg,
                                const std::optional<std::string>& prompt) {
    if (!is_judgment_kind(kind)) throw std::invalid_argument("judge_responses: kind must be a judgment kind");
    TemplateSlots slots;
    slots.question = question;
    slots.answers = std::make_pair(answer_a, answer_b);
    if (kind == JudgeKind::pick_judgment) slots.text = prompt.value_or("");
    JudgeRequest base;
    Message msg;
    msg.parts.push_back(MessagePart::from_text(render_template(kind, slots)));
    for (const ImageHandle& h : images) msg.parts.push_back(MessagePart::from_image(h));
    base.messages.push_back(std::move(msg));
    base.sampling = {cfg.temperature, cfg.top_p, cfg.max_tokens};

    JudgmentVerdict verdict;
    for (int s = 0; s < kSamplesPerMetric; ++s) {
        JudgeRequest req = base;
        req.seed = derive_seed(cfg.seed, {0x6a7564u, static_cast<uint64_t>(s)});
        std::optional<JudgeResponse> resp = sampled_response(backend, req, kind, cfg.parse_retries);
        if (!resp)
            throw ParseError(ParseError::Code::missing_block, "",
                             "judge_responses: sample " + std::to_string(s) + " failed to parse after retries");
        verdict.answer_a[static_cast<size_t>(s)] = resp->slot1.score;
        verdict.answer_b[static_cast<size_t>(s)] = resp->slot2.score;
    }
    return verdict;
}

}  // namespace promptopt
