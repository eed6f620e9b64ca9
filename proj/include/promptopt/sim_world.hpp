// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "promptopt/backends.hpp"
#include "promptopt/judge.hpp"

namespace promptopt {

// Deterministic simulated world standing in for the text-to-image model and
// the LVLM judge. A pure function of (world seed, request).
struct SimWorldConfig {
    uint64_t seed = 0;
    int jitter_amplitude = 1;  // integer score jitter in [-amp, amp]
    // Style words whose presence raises the aesthetic feature. Seeded from
    // the most frequent words observed in optimized prompts.
    std::set<std::string> magic_lexicon = default_magic_lexicon();

    static std::set<std::string> default_magic_lexicon();
};

class SimWorld : public JudgeBackend, public ImageBackend {
public:
    explicit SimWorld(SimWorldConfig cfg = {}) : cfg_(std::move(cfg)) {}

    const SimWorldConfig& config() const { return cfg_; }

    // Descriptor features: magic_count counts prompt tokens in the lexicon
    // (with multiplicity); overlap is the covered fraction of the reference
    // prompt's distinct tokens; noise is a seeded hash channel.
    ImageHandle generate(const ImageRequest& req) override;

    // Emits a canonical, parseable judge response for the embedded images or
    // answers. Scores derive from descriptors plus seeded jitter.
    std::string complete(const JudgeRequest& req) override;

    // Zero-jitter grades for an image, used by tests and by the meta-judge
    // as ground truth.
    int true_aesthetic(const ImageDescriptor& d) const;
    int true_relevance(const ImageDescriptor& d) const;
    int true_pick(const ImageDescriptor& d) const;

    int magic_count(const std::string& text) const;

private:
    int jitter(uint64_t seed, uint64_t channel) const;
    int judge_answer_quality(const std::string& answer, const std::vector<ImageHandle>& images,
                             JudgeKind kind) const;

    SimWorldConfig cfg_;
};

// Kind detection from rendered template text; exposed for tests.
JudgeKind detect_template_kind(const std::string& rendered);

// Extracts the substituted Answer A/B spans from a rendered judgment
// template.
std::pair<std::string, std::string> extract_answers(const std::string& rendered);

}  // namespace promptopt
