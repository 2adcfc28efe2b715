#include "hsd/fusion.hpp"

#include "hsd/ensemble.hpp"
#include "hsd/error.hpp"
#include "hsd/simd.hpp"

#include <json.hpp>

namespace hsd {

FusionVector build_fusion(const Example& example, const EmbeddingStore& store, const EntityCountVector& counts) {
    if (!example.embedding_id) throw DataError("example '" + example.id + "' has no embedding_id");
    if (!store.contains(*example.embedding_id)) {
        throw DataError("example '" + example.id + "': embedding id '" + *example.embedding_id + "' not found");
    }
    const auto emb = store.at(*example.embedding_id);
    FusionVector v;
    v.values.reserve(emb.size() + 3);
    v.values.assign(emb.begin(), emb.end());
    const auto c = counts.as_features();
    v.values.insert(v.values.end(), c.begin(), c.end());
    return v;
}

FeatureTable embedding_table(const Dataset& dataset, const EmbeddingStore& store) {
    FeatureTable t;
    for (std::size_t d = 0; d < store.dim(); ++d) t.columns.push_back("emb_" + std::to_string(d));
    t.values = Matrix(dataset.size(), store.dim());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto& ex = dataset.examples[i];
        t.ids.push_back(ex.id);
        const auto v = build_fusion(ex, store, {}).values;
        std::copy(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(store.dim()), t.values.row(i).begin());
    }
    return t;
}

FeatureTable fusion_table(const Dataset& dataset, const EmbeddingStore& store, const FeatureTable& entities) {
    const FeatureTable ents = entities.select(dataset.ids());
    if (ents.columns.size() != 3) throw DataError("entity table must have exactly 3 columns (per, norp, org)");
    FeatureTable t;
    for (std::size_t d = 0; d < store.dim(); ++d) t.columns.push_back("emb_" + std::to_string(d));
    t.columns.insert(t.columns.end(), {"per", "norp", "org"});
    t.values = Matrix(dataset.size(), store.dim() + 3);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto& ex = dataset.examples[i];
        const auto e = ents.values.row(i);
        for (double c : e) {
            if (c < 0.0 || c != static_cast<double>(static_cast<std::uint64_t>(c))) {
                throw DataError("entity counts for '" + ex.id + "' must be nonnegative integers");
            }
        }
        const EntityCountVector counts{static_cast<std::uint64_t>(e[0]), static_cast<std::uint64_t>(e[1]),
                                       static_cast<std::uint64_t>(e[2])};
        t.ids.push_back(ex.id);
        const auto v = build_fusion(ex, store, counts).values;
        std::copy(v.begin(), v.end(), t.values.row(i).begin());
    }
    return t;
}

LabeledMatrix labeled(const FeatureTable& features, const Dataset& dataset) {
    const FeatureTable aligned = features.select(dataset.ids());
    return {aligned.values, dataset.labels(), aligned.columns};
}

Selection train_and_select(const LabeledMatrix& train, const LabeledMatrix& eval, std::span<const GbdtConfig> presets,
                           int n_classes) {
    if (presets.empty()) throw ConfigError("at least one preset is required");
    if (eval.y.empty()) throw DataError("empty eval set");
    if (eval.X.rows() != eval.y.size()) throw DataError("eval matrix and labels differ in length");

    Selection out;
    std::vector<std::int32_t> gold(eval.y.begin(), eval.y.end());
    for (std::size_t p = 0; p < presets.size(); ++p) {
        GbdtModel model = train_gbdt(train.X, train.y, presets[p], n_classes, train.feature_names);
        const std::vector<int> pred = argmax_rows(predict_proba(model, eval.X));
        const std::size_t correct = simd::count_equal(std::span<const std::int32_t>(pred.data(), pred.size()), gold);
        PresetScore s{presets[p].preset_name, correct, gold.size(),
                      static_cast<double>(correct) / static_cast<double>(gold.size())};
        if (p == 0 || correct > out.report.scores[out.report.selected].correct) {
            out.report.selected = p;
            out.model = std::move(model);
        }
        out.report.scores.push_back(std::move(s));
    }
    return out;
}

std::string selection_report_to_json(const SelectionReport& report) {
    nlohmann::ordered_json j;
    j["selected"] = report.scores.at(report.selected).preset;
    j["selected_eval_accuracy"] = report.selected_accuracy();
    j["presets"] = nlohmann::ordered_json::array();
    for (const auto& s : report.scores) {
        j["presets"].push_back(
            {{"preset", s.preset}, {"eval_accuracy", s.eval_accuracy}, {"correct", s.correct}, {"total", s.total}});
    }
    return j.dump(2) + "\n";
}

}  // namespace hsd
