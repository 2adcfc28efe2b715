#pragma once
// Dataset model, JSONL ingestion and the seeded synthetic corpus generator.

#include "hsd/embedding.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hsd {

enum class Task { A, B };

/// Parses "a"/"b" (either case).
Task parse_task(std::string_view s);
std::string_view task_name(Task task);

/// Class-name table for a subtask. Class ids are the positions in class_names.
struct TaskSchema {
    Task task = Task::A;
    std::vector<std::string> class_names;
    std::optional<int> positive_class;

    static TaskSchema for_task(Task task);

    std::size_t n_classes() const noexcept { return class_names.size(); }
    /// Throws DataError for unknown names.
    int class_id(std::string_view name) const;
    bool valid(int id) const noexcept { return id >= 0 && static_cast<std::size_t>(id) < class_names.size(); }
};

struct Example {
    std::string id;
    std::string text;
    std::optional<int> label;
    std::optional<std::string> embedding_id;

    friend bool operator==(const Example&, const Example&) = default;
};

enum class Split { train, eval, test };

/// Gold or predicted class ids keyed by example id.
using LabelMap = std::map<std::string, int>;

struct Dataset {
    TaskSchema schema;
    std::vector<Example> examples;
    Split split = Split::train;

    std::size_t size() const noexcept { return examples.size(); }
    std::vector<std::string> ids() const;
    std::vector<std::string> texts() const;
    /// Labels in example order; throws DataError if any example is unlabeled.
    std::vector<int> labels() const;
    /// Throws DataError if any example is unlabeled.
    LabelMap gold() const;
};

/// Record format, one per line:
///   {"id": str, "text": str, "label": str|null, "embedding_id": str|null}
/// Errors carry the 1-based line number.
Dataset parse_dataset(std::string_view content, const TaskSchema& schema, Split split = Split::train);
Dataset load_dataset(const std::filesystem::path& path, const TaskSchema& schema, Split split = Split::train);
std::string dataset_to_jsonl(const Dataset& dataset);
void write_dataset(const std::filesystem::path& path, const Dataset& dataset);

struct SyntheticCorpus {
    Dataset dataset;
    EmbeddingStore embeddings;
};

/// Probability that a task-B example mentions an entity of its own class's type.
inline constexpr double kSyntheticEntityRate = 0.8;

/// Seeded stand-in for the shared-task data. Texts are uppercase-skewed
/// slogans drawn from class-conditional token pools (task B adds gazetteer
/// names of the class's entity type); embeddings are Gaussian around fixed
/// per-class means. Pure function of its arguments.
SyntheticCorpus generate_synthetic(std::uint64_t seed, const TaskSchema& schema, std::span<const std::size_t> counts,
                                   std::size_t embed_dim);

/// Name lists used by the task-B generator, as (label, phrases) groups in
/// PER, NORP, ORG order.
const std::vector<std::pair<std::string, std::vector<std::string>>>& synthetic_entity_lexicon();

}  // namespace hsd
