// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace promptopt {

// Token ids are plain ints; a sequence is well formed when every id is in
// [0, V) and EOS, if present, is the final element.
using TokenSeq = std::vector<int>;

class Vocabulary {
public:
    static constexpr int kPad = 0;
    static constexpr int kUnk = 1;
    static constexpr int kSep = 2;
    static constexpr int kEos = 3;
    static constexpr int kNumReserved = 4;

    // Builds a vocabulary from content words; reserved tokens are prepended.
    // Duplicate or reserved-colliding words are rejected.
    static Vocabulary from_words(const std::vector<std::string>& words);

    // The 64-token desk world: magic lexicon + content words + connectors +
    // digits and judge-protocol markers.
    static Vocabulary default_world();

    static Vocabulary load(const std::filesystem::path& file);
    void save(const std::filesystem::path& file) const;

    int size() const { return static_cast<int>(tokens_.size()); }
    // Returns -1 when the token string is unknown.
    int id_of(std::string_view token) const;
    const std::string& token(int id) const { return tokens_.at(static_cast<size_t>(id)); }
    bool is_reserved(int id) const { return id >= 0 && id < kNumReserved; }

    uint64_t hash() const { return hash_; }

    const std::vector<std::string>& tokens() const { return tokens_; }

private:
    Vocabulary() = default;
    void rebuild_index();

    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> index_;
    uint64_t hash_ = 0;
};

// Lowercases, splits on whitespace, trims non-alphanumeric edges from each
// word. Unknown words map to UNK. Total function: never throws.
TokenSeq tokenize(std::string_view text, const Vocabulary& vocab);

// Inverse of tokenize up to UNK loss; reserved tokens are stripped.
// Throws MalformedSequence when an id is outside [0, V).
std::string detokenize(const TokenSeq& seq, const Vocabulary& vocab);

// Word-level split used by tokenize and by the sim world's lexer.
std::vector<std::string> split_words(std::string_view text);

struct MalformedSequence : std::runtime_error {
    explicit MalformedSequence(const std::string& what) : std::runtime_error(what) {}
};

bool eos_terminated(const TokenSeq& seq);
bool well_formed(const TokenSeq& seq, int vocab_size);

// Appends EOS unless already terminated.
TokenSeq with_eos(TokenSeq seq);

}  // namespace promptopt
