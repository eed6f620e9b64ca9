// SPDX-License-Identifier: Apache-2.0
#include "promptopt/sim_world.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "promptopt/rng.hpp"
#include "promptopt/tokens.hpp"

namespace promptopt {

std::set<std::string> SimWorldConfig::default_magic_lexicon() {
    return {"fantasy", "intricate",  "portrait", "beautiful", "highly",      "detailed",
            "realistic", "high",     "quality",  "elegant",   "illustration"};
}

int SimWorld::magic_count(const std::string& text) const {
    int count = 0;
    for (const auto& w : split_words(text)) {
        if (cfg_.magic_lexicon.count(w)) ++count;
    }
    return count;
}

ImageHandle SimWorld::generate(const ImageRequest& req) {
    if (req.steps < 1) throw std::invalid_argument("sim_generate_image: steps must be >= 1");
    ImageDescriptor d;
    d.magic_count = magic_count(req.prompt);

    const std::string& ref = req.reference_prompt.empty() ? req.prompt : req.reference_prompt;
    std::vector<std::string> cand_words = split_words(req.prompt);
    std::vector<std::string> ref_words = split_words(ref);
    std::unordered_set<std::string> cand_set(cand_words.begin(), cand_words.end());
    std::unordered_set<std::string> ref_set(ref_words.begin(), ref_words.end());
    if (ref_set.empty()) {
        d.overlap = 1.0;
    } else {
        int covered = 0;
        for (const auto& w : ref_set) covered += cand_set.count(w) ? 1 : 0;
        d.overlap = static_cast<double>(covered) / static_cast<double>(ref_set.size());
    }

    d.noise = splitmix64(cfg_.seed ^ splitmix64(req.seed) ^ fnv1a64(req.prompt));
    d.caption = req.prompt + " style " + std::to_string(std::min(d.magic_count, 5));

    ImageHandle h;
    h.id = "sim-" + std::to_string(request_hash(req) ^ cfg_.seed);
    h.sim = std::move(d);
    return h;
}

int SimWorld::true_aesthetic(const ImageDescriptor& d) const {
    return std::clamp(1 + d.magic_count, 0, 5);
}

int SimWorld::true_relevance(const ImageDescriptor& d) const {
    return std::clamp(static_cast<int>(std::lround(5.0 * d.overlap)), 0, 5);
}

int SimWorld::true_pick(const ImageDescriptor& d) const {
    return std::clamp(static_cast<int>(std::lround((true_aesthetic(d) + true_relevance(d)) / 2.0)), 0, 5);
}

int SimWorld::jitter(uint64_t seed, uint64_t channel) const {
    if (cfg_.jitter_amplitude <= 0) return 0;
    Rng rng(derive_seed(cfg_.seed, {seed, channel}));
    return rng.next_range(-cfg_.jitter_amplitude, cfg_.jitter_amplitude);
}

JudgeKind detect_template_kind(const std::string& rendered) {
    if (rendered.find("evaluate the aesthetics of two images") != std::string::npos) return JudgeKind::aesthetic;
    if (rendered.find("evaluate the alignment of two pictures") != std::string::npos) return JudgeKind::alignment;
    if (rendered.find("preferred by humans") != std::string::npos) return JudgeKind::pick;
    if (rendered.find("checking the quality of the answers") != std::string::npos) {
        return rendered.find("2. Prompt:") != std::string::npos ? JudgeKind::pick_judgment
                                                                : JudgeKind::aesthetic_judgment;
    }
    throw BackendError(BackendError::Code::bad_response, "sim judge: unrecognized template text");
}

std::pair<std::string, std::string> extract_answers(const std::string& rendered) {
    auto trim = [](std::string s) {
        size_t b = s.find_first_not_of(" \t\n\r");
        size_t e = s.find_last_not_of(" \t\n\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const size_t a_marker = rendered.find("Answer A:");
    if (a_marker == std::string::npos)
        throw BackendError(BackendError::Code::bad_response, "sim judge: no Answer A slot");
    const size_t a_start = a_marker + 9;
    const size_t b_marker = rendered.find("Answer B:", a_start);
    if (b_marker == std::string::npos)
        throw BackendError(BackendError::Code::bad_response, "sim judge: no Answer B slot");
    // The Answer B line starts after the newline that precedes its list index.
    size_t a_end = rendered.rfind('\n', b_marker);
    if (a_end == std::string::npos || a_end < a_start) a_end = b_marker;
    const size_t b_start = b_marker + 9;
    size_t b_end = rendered.find("Your task is to evaluate", b_start);
    if (b_end == std::string::npos) b_end = rendered.size();
    return {trim(rendered.substr(a_start, a_end - a_start)), trim(rendered.substr(b_start, b_end - b_start))};
}

int SimWorld::judge_answer_quality(const std::string& answer, const std::vector<ImageHandle>& images,
                                   JudgeKind kind) const {
    auto truth = [&](size_t i) {
        const ImageDescriptor& d = *images[i].sim;
        return kind == JudgeKind::pick_judgment ? true_pick(d) : true_aesthetic(d);
    };
    std::vector<int> claimed;
    try {
        JudgeResponse parsed = parse_response(answer, JudgeKind::aesthetic);
        claimed = {parsed.slot1.score, parsed.slot2.score};
    } catch (const ParseError&) {
        for (const auto& w : split_words(answer)) {
            if (w.size() == 1 && w[0] >= '0' && w[0] <= '5') claimed.push_back(w[0] - '0');
        }
    }
    if (claimed.empty() || images.empty()) return 1;  // irrelevant response
    int max_dev = 0;
    const size_t n = std::min(claimed.size(), images.size());
    for (size_t i = 0; i < n; ++i) {
        if (!images[i].sim) return 1;
        max_dev = std::max(max_dev, std::abs(claimed[i] - truth(i)));
    }
    if (max_dev == 0) return 5;
    if (max_dev == 1) return 4;
    return 2;
}

std::string SimWorld::complete(const JudgeRequest& req) {
    const std::string text = req.joined_text();
    const JudgeKind kind = detect_template_kind(text);
    std::vector<ImageHandle> images = req.images();
    if (images.empty())
        throw BackendError(BackendError::Code::bad_response, "sim judge: request embeds no image");
    for (const auto& h : images) {
        if (!h.sim)
            throw BackendError(BackendError::Code::bad_response, "sim judge: image handle lacks sim descriptor");
    }
    if (images.size() == 1) images.push_back(images[0]);

    if (!is_judgment_kind(kind)) {
        const ImageDescriptor& d1 = *images[0].sim;
        const ImageDescriptor& d2 = *images[1].sim;
        auto slot_score = [&](const ImageDescriptor& d, uint64_t metric_channel) {
            switch (kind) {
                case JudgeKind::aesthetic:
                    return std::clamp(1 + d.magic_count + jitter(req.seed, d.noise ^ metric_channel), 0, 5);
                case JudgeKind::alignment:
                    return true_relevance(d);
                default:  // pick
                    return std::clamp(static_cast<int>(std::lround(
                                          (true_aesthetic(d) + true_relevance(d)) / 2.0 +
                                          jitter(req.seed, splitmix64(d.noise) ^ metric_channel))),
                                      0, 5);
            }
        };
        auto explain = [&](const ImageDescriptor& d) {
            std::ostringstream os;
            switch (kind) {
                case JudgeKind::aesthetic:
                    os << "The composition carries " << d.magic_count
                       << " style cues; framing and lighting sit at that depth.";
                    break;
                case JudgeKind::alignment:
                    os << "The image covers " << std::lround(100.0 * d.overlap)
                       << " percent of the elements named in the text.";
                    break;
                default:
                    os << "Visual appeal and text fidelity combine to this preference level.";
                    break;
            }
            return os.str();
        };
        const int s1 = slot_score(d1, 0x11);
        const int s2 = slot_score(d2, 0x11);
        return canonical_response(kind, s1, explain(d1), s2, explain(d2));
    }

    auto [answer_a, answer_b] = extract_answers(text);
    const int base_a = judge_answer_quality(answer_a, images, kind);
    const int base_b = judge_answer_quality(answer_b, images, kind);
    const int qa = std::clamp(base_a + jitter(req.seed, 0xa), 1, 5);
    const int qb = std::clamp(base_b + jitter(req.seed, 0xb), 1, 5);
    auto explain = [](int base) {
        if (base >= 5) return std::string("The answer tracks the image facts precisely in both outputs.");
        if (base == 4) return std::string("The answer stays close to the image facts with minor drift.");
        if (base == 2) return std::string("The answer misreads the images it claims to describe.");
        return std::string("The answer does not engage with the image content.");
    };
    return canonical_response(kind, qa, explain(base_a), qb, explain(base_b));
}

}  // namespace promptopt
