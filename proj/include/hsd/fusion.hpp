#pragma once
// Fusion of multimodal embeddings with entity counts, and preset selection
// by validation accuracy.

#include "hsd/corpus.hpp"
#include "hsd/embedding.hpp"
#include "hsd/entfeat.hpp"
#include "hsd/gbdt.hpp"
#include "hsd/io.hpp"

#include <span>
#include <string>
#include <vector>

namespace hsd {

/// [embedding..., per, norp, org]
struct FusionVector {
    std::vector<double> values;
};

/// Throws DataError naming the example when its embedding id is missing or unresolved.
FusionVector build_fusion(const Example& example, const EmbeddingStore& store, const EntityCountVector& counts);

/// Embedding columns emb_0..emb_{d-1}, in dataset order.
FeatureTable embedding_table(const Dataset& dataset, const EmbeddingStore& store);
/// Embedding columns followed by per, norp, org. `entities` must cover the dataset ids.
FeatureTable fusion_table(const Dataset& dataset, const EmbeddingStore& store, const FeatureTable& entities);

struct LabeledMatrix {
    Matrix X;
    std::vector<int> y;
    std::vector<std::string> feature_names;
};

/// Aligns a feature table to the dataset's example order and attaches labels.
LabeledMatrix labeled(const FeatureTable& features, const Dataset& dataset);

struct PresetScore {
    std::string preset;
    std::size_t correct = 0;
    std::size_t total = 0;
    double eval_accuracy = 0.0;
};

struct SelectionReport {
    std::vector<PresetScore> scores;  // one per preset, input order
    std::size_t selected = 0;

    double selected_accuracy() const { return scores.at(selected).eval_accuracy; }
};

struct Selection {
    GbdtModel model;
    SelectionReport report;
};

/// Trains one model per preset on `train`, keeps the one with the highest
/// eval accuracy (ties -> earliest preset).
Selection train_and_select(const LabeledMatrix& train, const LabeledMatrix& eval, std::span<const GbdtConfig> presets,
                           int n_classes);

std::string selection_report_to_json(const SelectionReport& report);

}  // namespace hsd
