// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "promptopt/backends.hpp"

namespace promptopt {

struct EndpointConfig {
    std::string base_url;        // e.g. http://localhost:8080
    std::string model;           // model name sent on the wire
    std::string auth_env;        // env var holding the bearer token; empty = none
    int deadline_ms = 30000;     // per-call deadline
    int max_retries = 3;         // retries on transport/429/5xx
    int retry_base_ms = 100;     // backoff base, doubled per attempt, jittered
    int max_inflight = 4;
};

// OpenAI-compatible chat-completion client with image inputs. Image parts are
// embedded as base64 data URLs within the message content.
class HttpJudgeBackend : public JudgeBackend {
public:
    explicit HttpJudgeBackend(EndpointConfig cfg) : cfg_(std::move(cfg)) {}
    std::string complete(const JudgeRequest& req) override;

private:
    EndpointConfig cfg_;
};

// Image-generation client: POSTs to /v1/images/generations, persists the
// returned bytes under storage_dir, and returns a content-addressed handle.
class HttpImageBackend : public ImageBackend {
public:
    HttpImageBackend(EndpointConfig cfg, std::filesystem::path storage_dir)
        : cfg_(std::move(cfg)), storage_dir_(std::move(storage_dir)) {}
    ImageHandle generate(const ImageRequest& req) override;

private:
    EndpointConfig cfg_;
    std::filesystem::path storage_dir_;
};

std::string base64_encode(const std::string& bytes);
std::string base64_decode(const std::string& text);

}  // namespace promptopt
