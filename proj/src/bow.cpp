#include "hsd/bow.hpp"

#include "hsd/corpus.hpp"
#include "hsd/error.hpp"
#include "hsd/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>

namespace hsd {

std::vector<std::string> tokenize(std::string_view text) { return text::lower_tokens(text); }

BowVocab::BowVocab(std::vector<BowEntry> entries, std::uint64_t min_count, std::size_t max_size)
    : entries_(std::move(entries)), min_count_(min_count), max_size_(max_size) {
    index_.reserve(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (!index_.emplace(entries_[i].ngram, i).second) {
            throw DataError("duplicate vocab entry '" + entries_[i].ngram + "'");
        }
    }
}

std::optional<std::size_t> BowVocab::index_of(std::string_view ngram) const {
    auto it = index_.find(std::string(ngram));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<double> BowVector::dense(std::size_t dim) const {
    std::vector<double> out(dim, 0.0);
    for (auto [index, count] : entries) out.at(index) = count;
    return out;
}

namespace {

// Calls fn(ngram, n) for every contiguous 1..3-gram of the token stream.
template <class Fn>
void for_each_ngram(const std::vector<std::string>& tokens, Fn&& fn) {
    std::string gram;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        gram = tokens[i];
        fn(gram, 1);
        for (int n = 2; n <= kMaxNgram && i + static_cast<std::size_t>(n) <= tokens.size(); ++n) {
            gram.push_back(' ');
            gram += tokens[i + static_cast<std::size_t>(n) - 1];
            fn(gram, n);
        }
    }
}

}  // namespace

BowVocab fit_vocab(std::span<const std::string> corpus, std::uint64_t min_count, std::size_t max_size) {
    if (min_count < 1) throw ConfigError("min_count must be >= 1");
    if (max_size < 1) throw ConfigError("max_size must be >= 1");

    std::map<std::string, std::pair<std::uint64_t, int>> counts;
    for (const auto& text : corpus) {
        for_each_ngram(tokenize(text), [&](const std::string& gram, int n) {
            auto& slot = counts[gram];
            ++slot.first;
            slot.second = n;
        });
    }

    std::vector<BowEntry> entries;
    for (auto& [gram, c] : counts) {
        if (c.first >= min_count) entries.push_back({gram, c.second, c.first});
    }
    // std::map iteration already gives lexicographic order; stable sort by count keeps it for ties.
    std::stable_sort(entries.begin(), entries.end(),
                     [](const BowEntry& a, const BowEntry& b) { return a.count > b.count; });
    if (entries.size() > max_size) entries.resize(max_size);
    return BowVocab(std::move(entries), min_count, max_size);
}

BowVector vectorize(std::string_view text, const BowVocab& vocab) {
    std::map<std::uint32_t, std::uint32_t> counts;
    for_each_ngram(tokenize(text), [&](const std::string& gram, int) {
        if (auto idx = vocab.index_of(gram)) ++counts[static_cast<std::uint32_t>(*idx)];
    });
    return BowVector{{counts.begin(), counts.end()}};
}

FeatureTable bow_table(const Dataset& dataset, const BowVocab& vocab) {
    FeatureTable table;
    table.columns.reserve(vocab.size());
    for (const auto& e : vocab.entries()) table.columns.push_back("bow:" + e.ngram);
    table.values = Matrix(dataset.size(), vocab.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        table.ids.push_back(dataset.examples[i].id);
        auto row = table.values.row(i);
        for (auto [index, count] : vectorize(dataset.examples[i].text, vocab).entries) row[index] = count;
    }
    return table;
}

std::string vocab_to_json(const BowVocab& vocab) {
    std::string out = "[";
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        const auto& e = vocab.entries()[i];
        out += i ? ",\n" : "\n";
        out += "{\"ngram\":" + nlohmann::json(e.ngram).dump() + ",\"n\":" + std::to_string(e.n) +
               ",\"count\":" + std::to_string(e.count) + "}";
    }
    out += vocab.empty() ? "]\n" : "\n]\n";
    return out;
}

BowVocab parse_vocab(std::string_view content) {
    try {
        const auto j = nlohmann::json::parse(content);
        if (!j.is_array()) throw DataError("vocab file must be a JSON array");
        std::vector<BowEntry> entries;
        std::uint64_t min_count = std::numeric_limits<std::uint64_t>::max();
        for (const auto& item : j) {
            BowEntry e{item.at("ngram").get<std::string>(), item.at("n").get<int>(), item.at("count").get<std::uint64_t>()};
            if (e.n < 1 || e.n > kMaxNgram) throw DataError("vocab entry '" + e.ngram + "' has invalid n");
            const auto toks = tokenize(e.ngram);
            std::string joined;
            for (const auto& t : toks) joined += (joined.empty() ? "" : " ") + t;
            if (static_cast<int>(toks.size()) != e.n || joined != e.ngram) {
                throw DataError("vocab entry '" + e.ngram + "' is not a normalized " + std::to_string(e.n) + "-gram");
            }
            if (e.count == 0) throw DataError("vocab entry '" + e.ngram + "' has zero count");
            min_count = std::min(min_count, e.count);
            entries.push_back(std::move(e));
        }
        for (std::size_t i = 1; i < entries.size(); ++i) {
            const auto& a = entries[i - 1];
            const auto& b = entries[i];
            if (a.count < b.count || (a.count == b.count && a.ngram >= b.ngram)) {
                throw DataError("vocab entries are not in canonical order at '" + b.ngram + "'");
            }
        }
        const std::size_t size = entries.size();
        return BowVocab(std::move(entries), size == 0 ? 1 : min_count, std::max<std::size_t>(size, 1));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("vocab file: ") + e.what());
    }
}

BowVocab load_vocab(const std::filesystem::path& path) {
    try {
        return parse_vocab(read_file(path));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void save_vocab(const std::filesystem::path& path, const BowVocab& vocab) { write_file(path, vocab_to_json(vocab)); }

}  // namespace hsd
