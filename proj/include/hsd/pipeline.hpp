#pragma once
// End-to-end orchestration of the two subtask pipelines.
//
// Each run writes every artifact under one output directory together with
// manifest.json listing the resolved config and file hashes. The
// manifest contains no timestamps or output paths, so identical inputs
// give byte-identical manifests.

#include "hsd/metrics.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hsd {

enum class RunKind { subtask_a, subtask_b };

/// Flat key = value settings with a fixed key set per run kind.
class PipelineConfig {
public:
    explicit PipelineConfig(RunKind kind);

    RunKind kind() const noexcept { return kind_; }

    /// Throws ConfigError for keys outside the run kind's key set.
    void set(const std::string& key, std::string value);
    /// One `key = value` per line; '#' starts a comment.
    void load_text(std::string_view content);
    void load_file(const std::filesystem::path& path);
    /// "key=value"
    void apply_override(std::string_view assignment);

    bool has(const std::string& key) const;
    /// Throws ConfigError when unset.
    const std::string& get(const std::string& key) const;
    std::optional<std::string> find(const std::string& key) const;
    long long get_int(const std::string& key) const;
    std::vector<std::string> get_list(const std::string& key) const;

    const std::map<std::string, std::string>& values() const noexcept { return values_; }

private:
    RunKind kind_;
    std::map<std::string, std::string> values_;
};

struct MemberScore {
    std::string model;
    double eval_accuracy = 0.0;
};

struct RunResult {
    MetricReport report;  // on the eval split
    std::filesystem::path manifest;
    std::vector<std::string> artifacts;  // relative to the output directory

    // subtask A
    double ensemble_accuracy = 0.0;
    std::vector<MemberScore> members;

    // subtask B
    double selected_accuracy = 0.0;
    double embeddings_only_accuracy = 0.0;
};

RunResult run_subtask_a(const PipelineConfig& config);
RunResult run_subtask_b(const PipelineConfig& config);

}  // namespace hsd
