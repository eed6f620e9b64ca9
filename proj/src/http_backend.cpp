// SPDX-License-Identifier: Apache-2.0
#include "promptopt/http_backend.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "promptopt/rng.hpp"

namespace promptopt {

namespace {

using nlohmann::json;

constexpr char kB64Chars[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

}  // namespace

std::string base64_encode(const std::string& bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    size_t i = 0;
    while (i + 2 < bytes.size()) {
        const uint32_t v = (static_cast<uint8_t>(bytes[i]) << 16) | (static_cast<uint8_t>(bytes[i + 1]) << 8) |
                           static_cast<uint8_t>(bytes[i + 2]);
        out += kB64Chars[(v >> 18) & 63];
        out += kB64Chars[(v >> 12) & 63];
        out += kB64Chars[(v >> 6) & 63];
        out += kB64Chars[v & 63];
        i += 3;
    }
    if (i + 1 == bytes.size()) {
        const uint32_t v = static_cast<uint8_t>(bytes[i]) << 16;
        out += kB64Chars[(v >> 18) & 63];
        out += kB64Chars[(v >> 12) & 63];
        out += "==";
    } else if (i + 2 == bytes.size()) {
        const uint32_t v = (static_cast<uint8_t>(bytes[i]) << 16) | (static_cast<uint8_t>(bytes[i + 1]) << 8);
        out += kB64Chars[(v >> 18) & 63];
        out += kB64Chars[(v >> 12) & 63];
        out += kB64Chars[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

std::string base64_decode(const std::string& text) {
    auto val = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    std::string out;
    int buffer = 0, bits = 0;
    for (char c : text) {
        const int v = val(c);
        if (v < 0) continue;  // skip padding and whitespace
        buffer = (buffer << 6) | v;
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out += static_cast<char>((buffer >> bits) & 0xff);
        }
    }
    return out;
}

namespace {

std::string bearer_token(const EndpointConfig& cfg) {
    if (cfg.auth_env.empty()) return {};
    const char* tok = std::getenv(cfg.auth_env.c_str());
    return tok ? tok : std::string{};
}

// Bounded in-flight guard shared per process; simple and sufficient for the
// fan-out the pipeline performs.
class InflightGuard {
public:
    InflightGuard(std::mutex& mu, std::condition_variable& cv, int& count, int limit)
        : mu_(mu), cv_(cv), count_(count) {
        std::unique_lock lk(mu_);
        cv_.wait(lk, [&] { return count_ < limit; });
        ++count_;
    }
    ~InflightGuard() {
        {
            std::lock_guard lk(mu_);
            --count_;
        }
        cv_.notify_one();
    }

private:
    std::mutex& mu_;
    std::condition_variable& cv_;
    int& count_;
};

std::mutex g_inflight_mu;
std::condition_variable g_inflight_cv;
int g_inflight = 0;

struct HttpOutcome {
    int status = 0;
    std::string body;
    bool transport_error = false;
    bool timed_out = false;
    std::string error;
};

HttpOutcome post_once(const EndpointConfig& cfg, const std::string& path, const std::string& body) {
    httplib::Client client(cfg.base_url);
    const auto deadline = std::chrono::milliseconds(cfg.deadline_ms);
    client.set_connection_timeout(deadline);
    client.set_read_timeout(deadline);
    client.set_write_timeout(deadline);
    httplib::Headers headers;
    const std::string token = bearer_token(cfg);
    if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);

    const auto start = std::chrono::steady_clock::now();
    auto res = client.Post(path, headers, body, "application/json");
    HttpOutcome out;
    if (!res) {
        out.transport_error = true;
        const auto elapsed = std::chrono::steady_clock::now() - start;
        out.timed_out = res.error() == httplib::Error::ConnectionTimeout ||
                        res.error() == httplib::Error::Read || elapsed >= deadline;
        out.error = httplib::to_string(res.error());
        return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
}

std::string post_with_retries(const EndpointConfig& cfg, const std::string& path, const std::string& body,
                              uint64_t jitter_seed) {
    InflightGuard guard(g_inflight_mu, g_inflight_cv, g_inflight, std::max(1, cfg.max_inflight));
    Rng rng(jitter_seed);
    HttpOutcome last;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        if (attempt > 0) {
            const int backoff = cfg.retry_base_ms * (1 << (attempt - 1));
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff + rng.next_int(cfg.retry_base_ms + 1)));
        }
        last = post_once(cfg, path, body);
        if (last.transport_error) continue;
        if (last.status == 429 || last.status >= 500) continue;
        break;
    }
    if (last.transport_error) {
        if (last.timed_out)
            throw BackendError(BackendError::Code::timeout,
                               "http: deadline of " + std::to_string(cfg.deadline_ms) + "ms exceeded (" +
                                   last.error + ")");
        throw BackendError(BackendError::Code::transport, "http: transport failure: " + last.error);
    }
    if (last.status == 401 || last.status == 403)
        throw BackendError(BackendError::Code::auth, "http: authentication failed (" + std::to_string(last.status) + ")");
    if (last.status == 429)
        throw BackendError(BackendError::Code::rate_limited, "http: rate limited after retries");
    if (last.status < 200 || last.status >= 300)
        throw BackendError(BackendError::Code::http_status,
                           "http: status " + std::to_string(last.status) + ": " + last.body.substr(0, 200));
    return last.body;
}

json image_part_payload(const ImageHandle& h) {
    std::string data;
    if (!h.path.empty()) {
        std::ifstream in(h.path, std::ios::binary);
        if (!in) throw BackendError(BackendError::Code::transport, "http: cannot read image file " + h.path);
        data.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    } else if (h.sim) {
        data = h.sim->caption;  // desk-scale stand-in payload
    }
    return json{{"type", "image_url"},
                {"image_url", {{"url", "data:image/png;base64," + base64_encode(data)}}}};
}

}  // namespace

std::string HttpJudgeBackend::complete(const JudgeRequest& req) {
    json messages = json::array();
    for (const auto& m : req.messages) {
        json content = json::array();
        for (const auto& p : m.parts) {
            if (p.type == MessagePart::Type::text) {
                content.push_back({{"type", "text"}, {"text", p.text}});
            } else if (p.image) {
                content.push_back(image_part_payload(*p.image));
            }
        }
        messages.push_back({{"role", m.role}, {"content", std::move(content)}});
    }
    json body{{"model", cfg_.model},
              {"messages", std::move(messages)},
              {"temperature", req.sampling.temperature},
              {"top_p", req.sampling.top_p},
              {"max_tokens", req.sampling.max_tokens},
              {"seed", req.seed}};
    const std::string raw = post_with_retries(cfg_, "/v1/chat/completions", body.dump(), request_hash(req));
    try {
        json parsed = json::parse(raw);
        return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw BackendError(BackendError::Code::bad_response, std::string("http: malformed completion body: ") + e.what());
    }
}

ImageHandle HttpImageBackend::generate(const ImageRequest& req) {
    json body{{"model", cfg_.model}, {"prompt", req.prompt},         {"size", req.size},
              {"seed", req.seed},    {"steps", req.steps},           {"response_format", "b64_json"},
              {"n", 1}};
    const std::string raw = post_with_retries(cfg_, "/v1/images/generations", body.dump(), request_hash(req));
    std::string bytes;
    try {
        json parsed = json::parse(raw);
        bytes = base64_decode(parsed.at("data").at(0).at("b64_json").get<std::string>());
    } catch (const json::exception& e) {
        throw BackendError(BackendError::Code::bad_response, std::string("http: malformed image body: ") + e.what());
    }
    const uint64_t content_hash = fnv1a64(bytes);
    std::filesystem::create_directories(storage_dir_);
    const std::string name = "img-" + std::to_string(content_hash) + ".png";
    const std::filesystem::path path = storage_dir_ / name;
    {
        std::ofstream out(path, std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw BackendError(BackendError::Code::transport, "http: cannot persist image to " + path.string());
    }
    ImageHandle h;
    h.id = name;
    h.content_hash = std::to_string(content_hash);
    h.path = path.string();
    return h;
}

}  // namespace promptopt
