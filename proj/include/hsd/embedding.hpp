#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hsd {

/// Precomputed multimodal embeddings keyed by embedding id.
///
/// File format (JSONL): a header line {"dim": D} followed by one
/// {"id": str, "vector": [D floats]} per row. Row order is preserved.
class EmbeddingStore {
public:
    EmbeddingStore() = default;
    explicit EmbeddingStore(std::size_t dim) : dim_(dim) {}

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return ids_.size(); }
    const std::vector<std::string>& ids() const noexcept { return ids_; }

    /// Throws DataError on wrong length, non-finite values or a duplicate id.
    void add(std::string id, std::span<const double> vector);

    bool contains(std::string_view id) const;
    /// Throws DataError if the id is absent.
    std::span<const double> at(std::string_view id) const;

private:
    std::size_t dim_ = 0;
    std::vector<std::string> ids_;
    std::vector<double> values_;
    std::unordered_map<std::string, std::size_t> index_;
};

EmbeddingStore parse_embeddings(std::string_view content);
EmbeddingStore load_embeddings(const std::filesystem::path& path);
std::string embeddings_to_jsonl(const EmbeddingStore& store);
void write_embeddings(const std::filesystem::path& path, const EmbeddingStore& store);

}  // namespace hsd
