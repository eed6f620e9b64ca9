// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "promptopt/backends.hpp"

namespace promptopt {

enum class JudgeKind { aesthetic, alignment, pick, aesthetic_judgment, pick_judgment };

bool is_judgment_kind(JudgeKind kind);
// Inclusive score range: [0,5] for image-scoring kinds, [1,5] for judgment kinds.
std::pair<int, int> score_range(JudgeKind kind);
const char* kind_name(JudgeKind kind);

struct TemplateSlots {
    std::optional<std::string> text;      // Text/Prompt slot (alignment, pick, pick_judgment)
    std::optional<std::string> question;  // judgment kinds
    std::optional<std::pair<std::string, std::string>> answers;
};

struct MissingSlot : std::invalid_argument {
    explicit MissingSlot(const std::string& what) : std::invalid_argument(what) {}
};

// Verbatim template text for a kind, with placeholders unsubstituted.
const std::string& template_text(JudgeKind kind);

// Substitutes the slots into the stored template. Throws MissingSlot when a
// required slot is absent.
std::string render_template(JudgeKind kind, const TemplateSlots& slots);

struct SlotResult {
    int score = 0;
    std::string explanation;
};

struct JudgeResponse {
    SlotResult slot1, slot2;  // Image 1/2 or Answer A/B
    JudgeKind kind = JudgeKind::aesthetic;
};

struct ParseError : std::runtime_error {
    enum class Code { missing_block, missing_score, score_out_of_range };
    Code code;
    std::string span;  // the offending region of the raw text
    ParseError(Code c, std::string sp, const std::string& what)
        : std::runtime_error(what), code(c), span(std::move(sp)) {}
};

// Locates the two "Output for ..." blocks, extracts the first integer after
// "Score:" and the text after "Explanation:" in each. Tolerant of
// surrounding prose and markdown. Throws ParseError.
JudgeResponse parse_response(const std::string& raw, JudgeKind kind);

// The canonical well-formed response for a kind; parse_response inverts it
// exactly over the full score range.
std::string canonical_response(JudgeKind kind, int score1, const std::string& explanation1, int score2,
                               const std::string& explanation2);

// Metric order: aesthetic, pick, relevance. The relevance metric is carried
// by the alignment template on the wire.
inline constexpr int kNumMetrics = 3;
inline constexpr int kSamplesPerMetric = 3;
extern const std::array<JudgeKind, kNumMetrics> kMetricKinds;
extern const std::array<const char*, kNumMetrics> kMetricNames;

struct ScoreCard {
    // [metric][sample] integer scores for the candidate (Image 2) slot.
    std::array<std::array<int, kSamplesPerMetric>, kNumMetrics> candidate{};
    // Same layout for the original (Image 1) slot, kept for analysis.
    std::array<std::array<int, kSamplesPerMetric>, kNumMetrics> original{};
    bool unscorable = false;

    int total() const;           // sum of the 9 candidate scores, in [0, 45]
    int original_total() const;  // sum of the 9 original-slot scores
    double mean() const { return static_cast<double>(total()) / (kNumMetrics * kSamplesPerMetric); }
};

struct ScoringConfig {
    double temperature = 0.9;
    double top_p = 0.9;
    int max_tokens = 1024;
    int parse_retries = 2;   // extra attempts per call on parse failure
    bool swap_debias = false;
    uint64_t seed = 0;
};

// Renders each metric template, submits [original as Image 1, candidate as
// Image 2], and draws 3 independent samples per metric. A call that exhausts
// its parse retries marks the whole candidate unscorable.
ScoreCard score_candidate(JudgeBackend& backend, const std::string& raw_prompt, const ImageHandle& original,
                          const ImageHandle& candidate, const ScoringConfig& cfg);

struct JudgmentVerdict {
    std::array<int, kSamplesPerMetric> answer_a{};
    std::array<int, kSamplesPerMetric> answer_b{};
    int total_a() const;
    int total_b() const;
};

// 3-sample quality scoring of two answers on the 1-5 scale.
JudgmentVerdict judge_responses(JudgeBackend& backend, const std::string& question,
                                const std::vector<ImageHandle>& images, const std::string& answer_a,
                                const std::string& answer_b, JudgeKind kind, const ScoringConfig& cfg,
                                const std::optional<std::string>& prompt = std::nullopt);

}  // namespace promptopt
