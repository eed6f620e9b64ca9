// SPDX-License-Identifier: Apache-2.0
#include "promptopt/backends.hpp"

#include <sstream>

#include "promptopt/rng.hpp"

namespace promptopt {

bool JudgeRequest::has_text() const {
    for (const auto& m : messages) {
        for (const auto& p : m.parts) {
            if (p.type == MessagePart::Type::text) return true;
        }
    }
    return false;
}

std::string JudgeRequest::joined_text() const {
    std::string out;
    for (const auto& m : messages) {
        for (const auto& p : m.parts) {
            if (p.type == MessagePart::Type::text) {
                if (!out.empty()) out += '\n';
                out += p.text;
            }
        }
    }
    return out;
}

std::vector<ImageHandle> JudgeRequest::images() const {
    std::vector<ImageHandle> out;
    for (const auto& m : messages) {
        for (const auto& p : m.parts) {
            if (p.type == MessagePart::Type::image && p.image) out.push_back(*p.image);
        }
    }
    return out;
}

std::string canonical_serialize(const JudgeRequest& req) {
    std::ostringstream os;
    os << "judge|t=" << req.sampling.temperature << "|p=" << req.sampling.top_p
       << "|max=" << req.sampling.max_tokens << "|seed=" << req.seed;
    for (const auto& m : req.messages) {
        os << "|role=" << m.role;
        for (const auto& p : m.parts) {
            if (p.type == MessagePart::Type::text) {
                os << "|text=" << p.text;
            } else if (p.image) {
                os << "|image=" << p.image->id;
                if (!p.image->content_hash.empty()) os << ':' << p.image->content_hash;
            }
        }
    }
    return os.str();
}

std::string canonical_serialize(const ImageRequest& req) {
    std::ostringstream os;
    os << "image|prompt=" << req.prompt << "|ref=" << req.reference_prompt << "|steps=" << req.steps
       << "|seed=" << req.seed << "|size=" << req.size;
    return os.str();
}

uint64_t request_hash(const JudgeRequest& req) { return fnv1a64(canonical_serialize(req)); }
uint64_t request_hash(const ImageRequest& req) { return fnv1a64(canonical_serialize(req)); }

}  // namespace promptopt
