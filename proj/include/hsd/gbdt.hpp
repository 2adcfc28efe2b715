#pragma once
// Second-order gradient-boosted decision trees for binary (logistic) and
// multiclass (softmax) classification with exact greedy split search.

#include "hsd/io.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hsd {

struct GbdtConfig {
    int rounds = 100;
    double learning_rate = 0.1;
    int max_depth = 6;
    double lambda = 1.0;
    double gamma = 0.0;
    double min_child_weight = 1.0;
    std::string preset_name = "default";

    /// Throws ConfigError when a field is out of range.
    void validate() const;

    /// Named presets: "default", "deep", "light".
    static GbdtConfig preset(std::string_view name);

    friend bool operator==(const GbdtConfig&, const GbdtConfig&) = default;
};

/// Comma-separated preset names -> configs, in order.
std::vector<GbdtConfig> parse_presets(std::string_view csv);

/// Split nodes send x <= threshold left. Leaves have feature == -1.
struct TreeNode {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;

    bool is_leaf() const noexcept { return feature < 0; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Flat tree; node 0 is the root.
struct Tree {
    std::vector<TreeNode> nodes;

    double predict(std::span<const double> row) const;
    int depth() const;
    friend bool operator==(const Tree&, const Tree&) = default;
};

struct GbdtModel {
    GbdtConfig config;
    int n_classes = 2;
    std::vector<double> base_score;  // one logit (binary) or one per class
    std::vector<Tree> trees;         // round-major; trees_per_round() per round
    std::vector<std::string> feature_names;

    int trees_per_round() const noexcept { return n_classes == 2 ? 1 : n_classes; }
    std::size_t n_features() const noexcept { return feature_names.size(); }

    friend bool operator==(const GbdtModel&, const GbdtModel&) = default;
};

/// Called after each boosting round with the round index and the training
/// probabilities at that point.
using RoundObserver = std::function<void(int round, const Matrix& train_proba)>;

/// Throws DataError on bad input data; ConfigError on an invalid config. Empty feature_names get
/// generated as f0, f1, ...
GbdtModel train_gbdt(const Matrix& X, std::span<const int> y, const GbdtConfig& config, int n_classes,
                     std::vector<std::string> feature_names = {}, const RoundObserver& observer = {});

/// Raw additive scores (logits), one column per tree-per-round.
Matrix predict_margin(const GbdtModel& model, const Matrix& X);
/// Class probabilities; binary rows are [1 - p, p].
Matrix predict_proba(const GbdtModel& model, const Matrix& X);

/// Mean negative log-likelihood of y under probability rows.
double log_loss(const Matrix& proba, std::span<const int> y);

inline constexpr int kModelFormatVersion = 1;

std::string model_to_json(const GbdtModel& model);
GbdtModel parse_model(std::string_view content);
void save_model(const std::filesystem::path& path, const GbdtModel& model);
GbdtModel load_model(const std::filesystem::path& path);

namespace detail {

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

/// Split search for one node over the given rows, exposed for oracle tests.
SplitChoice best_split(const Matrix& X, std::span<const double> grad, std::span<const double> hess,
                       std::span<const std::size_t> rows, const GbdtConfig& config);

/// Gain of sending (gl, hl) left out of a node with totals (g, h).
double split_gain(double gl, double hl, double g, double h, double lambda, double gamma);
double leaf_weight(double g, double h, double lambda);

}  // namespace detail

}  // namespace hsd
