#pragma once
// Confusion matrices and binary / support-weighted P, R, F1, accuracy.

#include "hsd/corpus.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hsd {

/// K x K counts; rows are gold classes, columns predicted classes.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::size_t k) : k_(k), counts_(k * k, 0) {}

    std::size_t k() const noexcept { return k_; }
    std::uint64_t at(std::size_t gold, std::size_t pred) const { return counts_.at(gold * k_ + pred); }
    void add(std::size_t gold, std::size_t pred) { ++counts_.at(gold * k_ + pred); }
    std::uint64_t total() const;
    std::uint64_t trace() const;
    std::uint64_t gold_support(std::size_t c) const;
    std::uint64_t predicted(std::size_t c) const;

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

private:
    std::size_t k_;
    std::vector<std::uint64_t> counts_;
};

/// Throws DataError unless gold and pred share a non-empty id set with classes in [0, k).
ConfusionMatrix confusion(const LabelMap& gold, const LabelMap& pred, std::size_t k);

enum class Averaging { binary, weighted };

struct MetricReport {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
    Averaging averaging = Averaging::binary;
    std::vector<std::uint64_t> support;  // gold count per class
};

/// Binary mode needs k == 2 and a positive class; 0/0 ratios are 0.
MetricReport score(const ConfusionMatrix& cm, Averaging averaging, std::optional<int> positive_class = std::nullopt);

/// Task A -> binary on the positive class, task B -> weighted.
MetricReport evaluate(const LabelMap& gold, const LabelMap& pred, const TaskSchema& schema);

/// Values in percent, rounded to 4 decimals.
std::string metric_report_to_json(const MetricReport& report);

}  // namespace hsd
