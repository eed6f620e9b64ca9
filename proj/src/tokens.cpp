// SPDX-License-Identifier: Apache-2.0
#include "promptopt/tokens.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "promptopt/rng.hpp"

namespace promptopt {

namespace {

const char* kReservedNames[] = {"<pad>", "<unk>", "<sep>", "<eos>"};

std::string trim_word(std::string_view w) {
    size_t b = 0;
    size_t e = w.size();
    while (b < e && !std::isalnum(static_cast<unsigned char>(w[b])) && w[b] != '<') ++b;
    while (e > b && !std::isalnum(static_cast<unsigned char>(w[e - 1])) && w[e - 1] != '>') --e;
    std::string out(w.substr(b, e - b));
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> words;
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        if (j > i) {
            std::string w = trim_word(text.substr(i, j - i));
            if (!w.empty()) words.push_back(std::move(w));
        }
        i = j;
    }
    return words;
}

void Vocabulary::rebuild_index() {
    index_.clear();
    for (int i = 0; i < static_cast<int>(tokens_.size()); ++i) index_[tokens_[static_cast<size_t>(i)]] = i;
    uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& t : tokens_) {
        h = splitmix64(h ^ fnv1a64(t));
    }
    hash_ = h;
}

Vocabulary Vocabulary::from_words(const std::vector<std::string>& words) {
    Vocabulary v;
    for (const char* r : kReservedNames) v.tokens_.emplace_back(r);
    for (const auto& w : words) {
        if (w.empty()) throw std::invalid_argument("vocabulary: empty token");
        v.tokens_.push_back(w);
    }
    v.rebuild_index();
    if (v.index_.size() != v.tokens_.size()) throw std::invalid_argument("vocabulary: duplicate token");
    if (v.size() < 8) throw std::invalid_argument("vocabulary: need at least 8 tokens");
    return v;
}

Vocabulary Vocabulary::default_world() {
    // 4 reserved + 11 magic + 32 content + 8 connectors + 6 digits + 3 markers = 64.
    return from_words({
        // magic lexicon (style words)
        "fantasy", "intricate", "portrait", "beautiful", "highly", "detailed",
        "realistic", "high", "quality", "elegant", "illustration",
        // content words
        "castle", "dragon", "forest", "cat", "girl", "robot", "city", "mountain",
        "ocean", "knight", "garden", "sunset", "village", "wizard", "horse",
        "bridge", "river", "temple", "island", "tower", "warrior", "queen",
        "ship", "desert", "moon", "star", "bird", "flower", "house", "tree",
        "lake", "cloud",
        // connectors
        "a", "the", "of", "on", "in", "and", "with", "by",
        // digits used by the judge protocol
        "0", "1", "2", "3", "4", "5",
        // judge-protocol markers
        "style", "score", "judge",
    });
}

Vocabulary Vocabulary::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("vocabulary: cannot open " + file.string());
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (!line.empty()) words.push_back(line);
    }
    return from_words(words);
}

void Vocabulary::save(const std::filesystem::path& file) const {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("vocabulary: cannot write " + file.string());
    for (int i = kNumReserved; i < size(); ++i) out << tokens_[static_cast<size_t>(i)] << '\n';
}

int Vocabulary::id_of(std::string_view token) const {
    auto it = index_.find(std::string(token));
    return it == index_.end() ? -1 : it->second;
}

TokenSeq tokenize(std::string_view text, const Vocabulary& vocab) {
    TokenSeq ids;
    for (const auto& w : split_words(text)) {
        int id = vocab.id_of(w);
        ids.push_back(id >= 0 ? id : Vocabulary::kUnk);
    }
    return ids;
}

std::string detokenize(const TokenSeq& seq, const Vocabulary& vocab) {
    std::string out;
    for (int id : seq) {
        if (id < 0 || id >= vocab.size()) {
            throw MalformedSequence("detokenize: id " + std::to_string(id) + " outside vocabulary of size " +
                                    std::to_string(vocab.size()));
        }
        if (vocab.is_reserved(id)) continue;
        if (!out.empty()) out += ' ';
        out += vocab.token(id);
    }
    return out;
}

bool eos_terminated(const TokenSeq& seq) {
    return !seq.empty() && seq.back() == Vocabulary::kEos;
}

bool well_formed(const TokenSeq& seq, int vocab_size) {
    for (size_t i = 0; i < seq.size(); ++i) {
        if (seq[i] < 0 || seq[i] >= vocab_size) return false;
        if (seq[i] == Vocabulary::kEos && i + 1 != seq.size()) return false;
    }
    return true;
}

TokenSeq with_eos(TokenSeq seq) {
    if (!eos_terminated(seq)) seq.push_back(Vocabulary::kEos);
    return seq;
}

}  // namespace promptopt
