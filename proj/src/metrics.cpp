#include "hsd/metrics.hpp"

#include "hsd/error.hpp"

#include <json.hpp>

#include <cmath>

namespace hsd {

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t n = 0;
    for (auto c : counts_) n += c;
    return n;
}

std::uint64_t ConfusionMatrix::trace() const {
    std::uint64_t n = 0;
    for (std::size_t c = 0; c < k_; ++c) n += at(c, c);
    return n;
}

std::uint64_t ConfusionMatrix::gold_support(std::size_t c) const {
    std::uint64_t n = 0;
    for (std::size_t p = 0; p < k_; ++p) n += at(c, p);
    return n;
}

std::uint64_t ConfusionMatrix::predicted(std::size_t c) const {
    std::uint64_t n = 0;
    for (std::size_t g = 0; g < k_; ++g) n += at(g, c);
    return n;
}

ConfusionMatrix confusion(const LabelMap& gold, const LabelMap& pred, std::size_t k) {
    if (gold.empty()) throw DataError("confusion: no examples");
    if (gold.size() != pred.size()) {
        throw DataError("confusion: gold has " + std::to_string(gold.size()) + " ids, predictions " +
                        std::to_string(pred.size()));
    }
    ConfusionMatrix cm(k);
    auto in_range = [k](int c) { return c >= 0 && static_cast<std::size_t>(c) < k; };
    for (const auto& [id, g] : gold) {
        auto it = pred.find(id);
        if (it == pred.end()) throw DataError("confusion: no prediction for '" + id + "'");
        if (!in_range(g) || !in_range(it->second)) throw DataError("confusion: class out of range for '" + id + "'");
        cm.add(static_cast<std::size_t>(g), static_cast<std::size_t>(it->second));
    }
    return cm;
}

namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

}  // namespace

MetricReport score(const ConfusionMatrix& cm, Averaging averaging, std::optional<int> positive_class) {
    MetricReport rep;
    rep.averaging = averaging;
    const std::uint64_t n = cm.total();
    for (std::size_t c = 0; c < cm.k(); ++c) rep.support.push_back(cm.gold_support(c));
    rep.accuracy = ratio(cm.trace(), n);

    if (averaging == Averaging::binary) {
        if (cm.k() != 2) throw DataError("binary averaging needs exactly 2 classes");
        if (!positive_class || (*positive_class != 0 && *positive_class != 1)) {
            throw DataError("binary averaging needs a positive class of 0 or 1");
        }
        const auto pos = static_cast<std::size_t>(*positive_class);
        const std::uint64_t tp = cm.at(pos, pos);
        rep.precision = ratio(tp, cm.predicted(pos));
        rep.recall = ratio(tp, cm.gold_support(pos));
        rep.f1 = harmonic(rep.precision, rep.recall);
        return rep;
    }

    for (std::size_t c = 0; c < cm.k(); ++c) {
        const std::uint64_t tp = cm.at(c, c);
        const double p = ratio(tp, cm.predicted(c));
        const double r = ratio(tp, cm.gold_support(c));
        const double w = ratio(rep.support[c], n);
        rep.precision += w * p;
        rep.recall += w * r;
        rep.f1 += w * harmonic(p, r);
    }
    return rep;
}

MetricReport evaluate(const LabelMap& gold, const LabelMap& pred, const TaskSchema& schema) {
    const auto cm = confusion(gold, pred, schema.n_classes());
    return schema.task == Task::A ? score(cm, Averaging::binary, schema.positive_class) : score(cm, Averaging::weighted);
}

std::string metric_report_to_json(const MetricReport& report) {
    auto percent = [](double v) { return std::round(v * 100.0 * 1e4) / 1e4; };
    nlohmann::ordered_json j;
    j["averaging"] = report.averaging == Averaging::binary ? "binary" : "weighted";
    j["precision"] = percent(report.precision);
    j["recall"] = percent(report.recall);
    j["f1"] = percent(report.f1);
    j["accuracy"] = percent(report.accuracy);
    j["support"] = report.support;
    return j.dump(2) + "\n";
}

}  // namespace hsd
