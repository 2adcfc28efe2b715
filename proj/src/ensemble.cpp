#include "hsd/ensemble.hpp"

#include "hsd/error.hpp"
#include "hsd/simd.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace hsd {

PredictionSet::PredictionSet(std::string model_name, std::vector<std::string> ids, Matrix probs)
    : model_name_(std::move(model_name)), ids_(std::move(ids)), probs_(std::move(probs)) {
    if (ids_.size() != probs_.rows()) throw DataError("prediction set: id count does not match row count");
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (!index_.emplace(ids_[i], i).second) throw DataError("prediction set: duplicate id '" + ids_[i] + "'");
        double sum = 0.0;
        for (double p : probs_.row(i)) {
            if (!std::isfinite(p) || p < 0.0) throw DataError("prediction set: invalid probability for '" + ids_[i] + "'");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-6) throw DataError("prediction set: row '" + ids_[i] + "' does not sum to 1");
    }
}

bool PredictionSet::contains(std::string_view id) const { return index_.contains(std::string(id)); }

std::span<const double> PredictionSet::row(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) throw DataError("model '" + model_name_ + "' has no prediction for '" + std::string(id) + "'");
    return probs_.row(it->second);
}

Matrix PredictionSet::aligned(std::span<const std::string> order) const {
    Matrix out(order.size(), n_classes());
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto src = row(order[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

std::vector<int> argmax_rows(const Matrix& probs) {
    std::vector<int> out(probs.rows(), 0);
    for (std::size_t i = 0; i < probs.rows(); ++i) {
        const auto r = probs.row(i);
        std::size_t best = 0;
        for (std::size_t c = 1; c < r.size(); ++c) {
            if (r[c] > r[best]) best = c;
        }
        out[i] = static_cast<int>(best);
    }
    return out;
}

namespace {

// Shared by selection and prediction so both see identical arithmetic.
Matrix blend(std::span<const Matrix> members, std::span<const double> weights) {
    Matrix acc(members.front().rows(), members.front().cols());
    for (std::size_t m = 0; m < members.size(); ++m) {
        if (weights[m] > 0.0) simd::axpy(weights[m], members[m].data(), acc.data());
    }
    return acc;
}

std::size_t correct_count(const Matrix& probs, std::span<const std::int32_t> gold) {
    const std::vector<int> pred = argmax_rows(probs);
    return simd::count_equal(std::span<const std::int32_t>(pred.data(), pred.size()), gold);
}

void check_members(std::span<const PredictionSet> preds) {
    if (preds.empty()) throw DataError("ensemble needs at least one prediction set");
    const std::size_t k = preds.front().n_classes();
    for (const auto& p : preds) {
        if (p.n_classes() != k) throw DataError("model '" + p.model_name() + "' has a different class count");
    }
}

}  // namespace

EnsembleWeights fit_weights(std::span<const PredictionSet> preds, const LabelMap& gold, int rounds) {
    check_members(preds);
    if (gold.empty()) throw DataError("ensemble fit: empty gold set");
    if (rounds < 1) throw ConfigError("ensemble rounds must be >= 1");

    std::vector<std::string> order;
    std::vector<std::int32_t> labels;
    for (const auto& [id, label] : gold) {
        order.push_back(id);
        labels.push_back(label);
    }
    std::vector<Matrix> aligned;
    for (const auto& p : preds) {
        if (p.size() != gold.size()) {
            throw DataError("model '" + p.model_name() + "' covers " + std::to_string(p.size()) + " ids, gold has " +
                            std::to_string(gold.size()));
        }
        aligned.push_back(p.aligned(order));
    }

    const std::size_t m_count = preds.size();
    std::vector<std::size_t> counts(m_count, 0);
    std::vector<std::size_t> history;
    std::vector<std::size_t> correct_after;
    std::vector<double> w(m_count);
    for (int r = 1; r <= rounds; ++r) {
        std::size_t best_model = 0;
        std::size_t best_correct = 0;
        bool have = false;
        for (std::size_t m = 0; m < m_count; ++m) {
            ++counts[m];
            for (std::size_t j = 0; j < m_count; ++j) w[j] = static_cast<double>(counts[j]) / static_cast<double>(r);
            const std::size_t correct = correct_count(blend(aligned, w), labels);
            --counts[m];
            if (!have || correct > best_correct) {
                have = true;
                best_model = m;
                best_correct = correct;
            }
        }
        ++counts[best_model];
        history.push_back(best_model);
        correct_after.push_back(best_correct);
    }

    // Longest prefix reaching the best accuracy.
    std::size_t used = 0;
    for (std::size_t r = 0; r < correct_after.size(); ++r) {
        if (correct_after[r] >= correct_after[used]) used = r;
    }
    const std::size_t prefix = used + 1;
    std::vector<std::size_t> committed(m_count, 0);
    for (std::size_t r = 0; r < prefix; ++r) ++committed[history[r]];

    EnsembleWeights out;
    out.rounds = rounds;
    out.rounds_used = static_cast<int>(prefix);
    for (std::size_t m = 0; m < m_count; ++m) {
        out.members.push_back({preds[m].model_name(),
                               static_cast<double>(committed[m]) / static_cast<double>(prefix), committed[m]});
    }
    return out;
}

PredictionSet ensemble_predict(std::span<const PredictionSet> preds, const EnsembleWeights& weights,
                               std::string model_name) {
    check_members(preds);
    if (weights.members.size() != preds.size()) {
        throw DataError("weights list " + std::to_string(weights.members.size()) + " members but " +
                        std::to_string(preds.size()) + " prediction sets were given");
    }
    std::vector<double> w;
    for (std::size_t m = 0; m < preds.size(); ++m) {
        if (weights.members[m].model != preds[m].model_name()) {
            throw DataError("weights member " + std::to_string(m) + " is '" + weights.members[m].model +
                            "' but prediction set is '" + preds[m].model_name() + "'");
        }
        w.push_back(weights.members[m].weight);
    }
    const auto& ids = preds.front().ids();
    std::vector<Matrix> aligned;
    for (const auto& p : preds) {
        if (p.size() != ids.size()) throw DataError("model '" + p.model_name() + "' is not aligned with the first model");
        aligned.push_back(p.aligned(ids));
    }
    return PredictionSet(std::move(model_name), ids, blend(aligned, w));
}

double accuracy(const PredictionSet& preds, const LabelMap& gold) {
    if (gold.empty()) throw DataError("accuracy: empty gold set");
    std::vector<std::string> order;
    std::vector<std::int32_t> labels;
    for (const auto& [id, label] : gold) {
        order.push_back(id);
        labels.push_back(label);
    }
    return static_cast<double>(correct_count(preds.aligned(order), labels)) / static_cast<double>(gold.size());
}

// ---------------------------------------------------------------------------
// Files

std::string predictions_to_jsonl(const PredictionSet& preds) {
    std::string out;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        out += "{\"id\":" + nlohmann::json(preds.ids()[i]).dump() + ",\"probs\":[";
        const auto r = preds.probs().row(i);
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (c) out.push_back(',');
            out += format_double(r[c]);
        }
        out += "]}\n";
    }
    return out;
}

PredictionSet parse_predictions(std::string_view content, std::string model_name) {
    std::vector<std::string> ids;
    Matrix probs;
    std::vector<double> row;
    const auto lines = split_lines(content);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        if (lines[n].empty()) continue;
        try {
            const auto j = nlohmann::json::parse(lines[n]);
            ids.push_back(j.at("id").get<std::string>());
            row = j.at("probs").get<std::vector<double>>();
            if (row.empty()) throw DataError("empty probability row");
            probs.push_row(row);
        } catch (const nlohmann::json::exception& e) {
            throw DataError("prediction line " + std::to_string(n + 1) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError("prediction line " + std::to_string(n + 1) + ": " + e.what());
        }
    }
    return PredictionSet(std::move(model_name), std::move(ids), std::move(probs));
}

PredictionSet load_predictions(const std::filesystem::path& path, std::string model_name) {
    if (model_name.empty()) model_name = path.stem().string();
    try {
        return parse_predictions(read_file(path), std::move(model_name));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_predictions(const std::filesystem::path& path, const PredictionSet& preds) {
    write_file(path, predictions_to_jsonl(preds));
}

std::string weights_to_json(const EnsembleWeights& weights) {
    nlohmann::ordered_json j;
    j["rounds"] = weights.rounds;
    j["rounds_used"] = weights.rounds_used;
    j["members"] = nlohmann::ordered_json::array();
    for (const auto& m : weights.members) {
        j["members"].push_back({{"model", m.model}, {"weight", m.weight}, {"selections", m.selections}});
    }
    return j.dump(2) + "\n";
}

EnsembleWeights parse_weights(std::string_view content) {
    try {
        const auto j = nlohmann::json::parse(content);
        EnsembleWeights w;
        w.rounds = j.at("rounds").get<int>();
        w.rounds_used = j.value("rounds_used", w.rounds);
        double total = 0.0;
        for (const auto& m : j.at("members")) {
            EnsembleMember member{m.at("model").get<std::string>(), m.at("weight").get<double>(),
                                  m.value("selections", std::size_t{0})};
            if (!(member.weight >= 0.0) || !std::isfinite(member.weight)) {
                throw DataError("negative or non-finite weight for '" + member.model + "'");
            }
            total += member.weight;
            w.members.push_back(std::move(member));
        }
        if (w.members.empty()) throw DataError("weights file lists no members");
        if (std::abs(total - 1.0) > 1e-9) throw DataError("weights do not sum to 1");
        return w;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("weights file: ") + e.what());
    }
}

EnsembleWeights load_weights(const std::filesystem::path& path) {
    try {
        return parse_weights(read_file(path));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void save_weights(const std::filesystem::path& path, const EnsembleWeights& weights) {
    write_file(path, weights_to_json(weights));
}

}  // namespace hsd
