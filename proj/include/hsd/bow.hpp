#pragma once
// Word n-gram (n = 1..3) bag-of-words vocabulary and count vectorizer.

#include "hsd/io.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hsd {

struct Dataset;

inline constexpr int kMaxNgram = 3;
inline constexpr std::uint64_t kDefaultMinCount = 2;
inline constexpr std::size_t kDefaultMaxSize = 10000;

/// Lowercase, then split on maximal Unicode whitespace runs.
std::vector<std::string> tokenize(std::string_view text);

struct BowEntry {
    std::string ngram;  // tokens joined by a single space
    int n = 1;
    std::uint64_t count = 0;  // corpus frequency at fit time

    friend bool operator==(const BowEntry&, const BowEntry&) = default;
};

/// Entries are ordered by descending count, then ngram; index = position.
class BowVocab {
public:
    BowVocab() = default;
    BowVocab(std::vector<BowEntry> entries, std::uint64_t min_count, std::size_t max_size);

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const std::vector<BowEntry>& entries() const noexcept { return entries_; }
    std::uint64_t min_count() const noexcept { return min_count_; }
    std::size_t max_size() const noexcept { return max_size_; }

    std::optional<std::size_t> index_of(std::string_view ngram) const;

    friend bool operator==(const BowVocab& a, const BowVocab& b) { return a.entries_ == b.entries_; }

private:
    std::vector<BowEntry> entries_;
    std::uint64_t min_count_ = 1;
    std::size_t max_size_ = std::numeric_limits<std::size_t>::max();
    std::unordered_map<std::string, std::size_t> index_;
};

/// Sparse (index, count) pairs with strictly increasing indices.
struct BowVector {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;

    bool empty() const noexcept { return entries.empty(); }
    std::vector<double> dense(std::size_t dim) const;

    friend bool operator==(const BowVector&, const BowVector&) = default;
};

/// Throws ConfigError if min_count or max_size is 0.
BowVocab fit_vocab(std::span<const std::string> corpus, std::uint64_t min_count = kDefaultMinCount,
                   std::size_t max_size = kDefaultMaxSize);

BowVector vectorize(std::string_view text, const BowVocab& vocab);

/// Dense table, one column per vocab entry ("bow:<ngram>").
FeatureTable bow_table(const Dataset& dataset, const BowVocab& vocab);

// Vocab file: JSON array of {"ngram": str, "n": int, "count": int}.
std::string vocab_to_json(const BowVocab& vocab);
BowVocab parse_vocab(std::string_view content);
BowVocab load_vocab(const std::filesystem::path& path);
void save_vocab(const std::filesystem::path& path, const BowVocab& vocab);

}  // namespace hsd
