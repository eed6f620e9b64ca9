// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <string>

#include "promptopt/backends.hpp"

namespace promptopt {

// Ordered request-hash -> response store. Recording appends; replay consumes
// responses per hash in recorded order (repeating the last one once a hash's
// queue is exhausted), which makes any recorded run replayable offline.
class FixtureStore {
public:
    FixtureStore() = default;

    static FixtureStore load(const std::filesystem::path& file);
    void save(const std::filesystem::path& file) const;

    void record(uint64_t hash, std::string response);
    // Throws BackendError{missing_fixture} when the hash was never recorded.
    std::string replay(uint64_t hash);

    size_t size() const { return order_.size(); }

private:
    std::map<uint64_t, std::deque<std::string>> responses_;
    std::map<uint64_t, std::string> last_;
    std::vector<std::pair<uint64_t, std::string>> order_;  // file order
};

class RecordingJudgeBackend : public JudgeBackend {
public:
    RecordingJudgeBackend(JudgeBackend& inner, FixtureStore& store) : inner_(inner), store_(store) {}
    std::string complete(const JudgeRequest& req) override;

private:
    JudgeBackend& inner_;
    FixtureStore& store_;
};

class ReplayJudgeBackend : public JudgeBackend {
public:
    explicit ReplayJudgeBackend(FixtureStore& store) : store_(store) {}
    std::string complete(const JudgeRequest& req) override;

private:
    FixtureStore& store_;
};

// Image fixtures serialize the returned handle (descriptor included).
std::string serialize_handle(const ImageHandle& h);
ImageHandle deserialize_handle(const std::string& text);

class RecordingImageBackend : public ImageBackend {
public:
    RecordingImageBackend(ImageBackend& inner, FixtureStore& store) : inner_(inner), store_(store) {}
    ImageHandle generate(const ImageRequest& req) override;

private:
    ImageBackend& inner_;
    FixtureStore& store_;
};

class ReplayImageBackend : public ImageBackend {
public:
    explicit ReplayImageBackend(FixtureStore& store) : store_(store) {}
    ImageHandle generate(const ImageRequest& req) override;

private:
    FixtureStore& store_;
};

}  // namespace promptopt
