#pragma once
// Greedy forward ensemble selection (with replacement) over per-model
// validation probabilities, and weighted probability averaging.

#include "hsd/corpus.hpp"
#include "hsd/io.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hsd {

/// One model's class-probability rows keyed by example id.
class PredictionSet {
public:
    PredictionSet() = default;
    /// Throws DataError on duplicate ids or rows not summing to 1 within 1e-6.
    PredictionSet(std::string model_name, std::vector<std::string> ids, Matrix probs);

    const std::string& model_name() const noexcept { return model_name_; }
    void set_model_name(std::string name) { model_name_ = std::move(name); }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    const Matrix& probs() const noexcept { return probs_; }
    std::size_t size() const noexcept { return ids_.size(); }
    std::size_t n_classes() const noexcept { return probs_.cols(); }

    bool contains(std::string_view id) const;
    /// Throws DataError if the id is absent.
    std::span<const double> row(std::string_view id) const;
    /// Rows reordered to `order`; throws DataError naming the first missing id.
    Matrix aligned(std::span<const std::string> order) const;

    friend bool operator==(const PredictionSet& a, const PredictionSet& b) {
        return a.model_name_ == b.model_name_ && a.ids_ == b.ids_ && a.probs_ == b.probs_;
    }

private:
    std::string model_name_;
    std::vector<std::string> ids_;
    Matrix probs_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Row-wise argmax; ties go to the lowest class id.
std::vector<int> argmax_rows(const Matrix& probs);

struct EnsembleMember {
    std::string model;
    double weight = 0.0;
    std::size_t selections = 0;

    friend bool operator==(const EnsembleMember&, const EnsembleMember&) = default;
};

struct EnsembleWeights {
    std::vector<EnsembleMember> members;  // input model order
    int rounds = 0;                       // rounds run
    int rounds_used = 0;                  // length of the committed selection prefix

    friend bool operator==(const EnsembleWeights&, const EnsembleWeights&) = default;
};

inline constexpr int kDefaultEnsembleRounds = 25;

/// Runs `rounds` greedy selection rounds: each round adds the member whose
/// inclusion gives the highest bag accuracy on `gold` (ties -> lowest model
/// index). The committed bag is the longest prefix reaching the best
/// accuracy seen; weights are its selection counts over its length.
EnsembleWeights fit_weights(std::span<const PredictionSet> preds, const LabelMap& gold, int rounds = kDefaultEnsembleRounds);

/// Weighted mean of member rows, ids in the first set's order.
PredictionSet ensemble_predict(std::span<const PredictionSet> preds, const EnsembleWeights& weights,
                               std::string model_name = "ensemble");

/// Fraction of gold ids whose argmax prediction matches.
double accuracy(const PredictionSet& preds, const LabelMap& gold);

// Prediction JSONL: {"id": str, "probs": [floats]} per line.
std::string predictions_to_jsonl(const PredictionSet& preds);
PredictionSet parse_predictions(std::string_view content, std::string model_name);
/// The model name defaults to the file stem.
PredictionSet load_predictions(const std::filesystem::path& path, std::string model_name = {});
void write_predictions(const std::filesystem::path& path, const PredictionSet& preds);

// Weights file: {"rounds": T, "rounds_used": R, "members": [{"model": str, "weight": num, "selections": n}]}.
std::string weights_to_json(const EnsembleWeights& weights);
EnsembleWeights parse_weights(std::string_view content);
EnsembleWeights load_weights(const std::filesystem::path& path);
void save_weights(const std::filesystem::path& path, const EnsembleWeights& weights);

}  // namespace hsd
