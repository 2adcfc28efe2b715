#include "hsd/embedding.hpp"

#include "hsd/error.hpp"
#include "hsd/io.hpp"

#include <json.hpp>

#include <cmath>

namespace hsd {

void EmbeddingStore::add(std::string id, std::span<const double> vector) {
    if (vector.size() != dim_) {
        throw DataError("embedding '" + id + "' has dim " + std::to_string(vector.size()) + ", expected " +
                        std::to_string(dim_));
    }
    for (double v : vector) {
        if (!std::isfinite(v)) throw DataError("embedding '" + id + "' has a non-finite value");
    }
    if (index_.contains(id)) throw DataError("duplicate embedding id '" + id + "'");
    index_.emplace(id, ids_.size());
    ids_.push_back(std::move(id));
    values_.insert(values_.end(), vector.begin(), vector.end());
}

bool EmbeddingStore::contains(std::string_view id) const { return index_.contains(std::string(id)); }

std::span<const double> EmbeddingStore::at(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) throw DataError("unknown embedding id '" + std::string(id) + "'");
    return {values_.data() + it->second * dim_, dim_};
}

EmbeddingStore parse_embeddings(std::string_view content) {
    const auto lines = split_lines(content);
    if (lines.empty()) throw DataError("embedding file: missing {\"dim\": D} header");

    EmbeddingStore store;
    bool have_header = false;
    std::vector<double> vec;
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const std::string where = "embedding file line " + std::to_string(n + 1) + ": ";
        if (lines[n].empty()) continue;
        try {
            const auto j = nlohmann::json::parse(lines[n]);
            if (!have_header) {
                if (!j.is_object() || !j.contains("dim")) throw DataError("missing {\"dim\": D} header");
                const auto& d = j.at("dim");
                if (!d.is_number_unsigned() || d.get<std::size_t>() == 0) throw DataError("dim must be a positive integer");
                store = EmbeddingStore(d.get<std::size_t>());
                have_header = true;
                continue;
            }
            const auto& values = j.at("vector");
            if (!values.is_array()) throw DataError("'vector' must be an array");
            vec.clear();
            for (const auto& v : values) {
                if (!v.is_number()) throw DataError("non-numeric vector entry");
                vec.push_back(v.get<double>());
            }
            store.add(j.at("id").get<std::string>(), vec);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(where + e.what());
        } catch (const DataError& e) {
            throw DataError(where + e.what());
        }
    }
    if (!have_header) throw DataError("embedding file: missing {\"dim\": D} header");
    return store;
}

EmbeddingStore load_embeddings(const std::filesystem::path& path) {
    try {
        return parse_embeddings(read_file(path));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

std::string embeddings_to_jsonl(const EmbeddingStore& store) {
    std::string out = "{\"dim\":" + std::to_string(store.dim()) + "}\n";
    for (const auto& id : store.ids()) {
        out += "{\"id\":";
        out += nlohmann::json(id).dump();
        out += ",\"vector\":[";
        const auto v = store.at(id);
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out.push_back(',');
            out += format_double(v[i]);
        }
        out += "]}\n";
    }
    return out;
}

void write_embeddings(const std::filesystem::path& path, const EmbeddingStore& store) {
    write_file(path, embeddings_to_jsonl(store));
}

}  // namespace hsd
