// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace promptopt {

// Deterministic image features used by the simulated world. caption is the
// sim's rendering of "what a judge model sees": the generating prompt plus a
// style-density marker.
struct ImageDescriptor {
    int magic_count = 0;
    double overlap = 1.0;
    uint64_t noise = 0;
    std::string caption;
};

struct ImageHandle {
    std::string id;
    std::optional<ImageDescriptor> sim;  // present in sim mode
    std::string content_hash;            // real mode: hash of image bytes
    std::string path;                    // real mode: storage location
};

struct ImageRequest {
    std::string prompt;
    std::string reference_prompt;  // the raw prompt; drives the overlap feature
    int steps = 20;                // denoising steps
    uint64_t seed = 0;
    std::string size = "512x512";
};

struct MessagePart {
    enum class Type { text, image };
    Type type = Type::text;
    std::string text;
    std::optional<ImageHandle> image;

    static MessagePart from_text(std::string t) { return {Type::text, std::move(t), std::nullopt}; }
    static MessagePart from_image(ImageHandle h) { return {Type::image, {}, std::move(h)}; }
};

struct Message {
    std::string role = "user";
    std::vector<MessagePart> parts;
};

struct SamplingParams {
    double temperature = 0.9;
    double top_p = 0.9;
    int max_tokens = 1024;
};

struct JudgeRequest {
    std::vector<Message> messages;
    SamplingParams sampling;
    uint64_t seed = 0;

    bool has_text() const;
    // Concatenation of all text parts.
    std::string joined_text() const;
    std::vector<ImageHandle> images() const;
};

struct BackendError : std::runtime_error {
    enum class Code { transport, timeout, rate_limited, auth, http_status, bad_response, missing_fixture };
    Code code;
    BackendError(Code c, const std::string& what) : std::runtime_error(what), code(c) {}
};

class JudgeBackend {
public:
    virtual ~JudgeBackend() = default;
    // Single text completion for a judge request.
    virtual std::string complete(const JudgeRequest& req) = 0;
};

class ImageBackend {
public:
    virtual ~ImageBackend() = default;
    virtual ImageHandle generate(const ImageRequest& req) = 0;
};

// Canonical serializations used for fixture hashing and ledger records.
std::string canonical_serialize(const JudgeRequest& req);
std::string canonical_serialize(const ImageRequest& req);
uint64_t request_hash(const JudgeRequest& req);
uint64_t request_hash(const ImageRequest& req);

}  // namespace promptopt
