#include "hsd/gbdt.hpp"

#include "hsd/error.hpp"
#include "hsd/simd.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hsd {

void GbdtConfig::validate() const {
    if (rounds < 1) throw ConfigError("rounds must be >= 1");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw ConfigError("learning_rate must be in (0, 1]");
    if (max_depth < 1) throw ConfigError("max_depth must be >= 1");
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
    if (!(gamma >= 0.0)) throw ConfigError("gamma must be >= 0");
    if (!(min_child_weight >= 0.0)) throw ConfigError("min_child_weight must be >= 0");
}

GbdtConfig GbdtConfig::preset(std::string_view name) {
    GbdtConfig c;  // default: 100 rounds, lr 0.1, depth 6, lambda 1, gamma 0, mcw 1
    c.preset_name = std::string(name);
    if (name == "default") return c;
    if (name == "deep") {
        c.max_depth = 10;
        c.rounds = 200;
        return c;
    }
    if (name == "light") {
        c.max_depth = 3;
        c.rounds = 50;
        return c;
    }
    throw ConfigError("unknown preset '" + std::string(name) + "' (expected default, deep or light)");
}

std::vector<GbdtConfig> parse_presets(std::string_view csv) {
    std::vector<GbdtConfig> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        std::size_t end = csv.find(',', start);
        if (end == std::string_view::npos) end = csv.size();
        std::string_view name = csv.substr(start, end - start);
        while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
        while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
        if (name.empty()) throw ConfigError("empty preset name in '" + std::string(csv) + "'");
        out.push_back(GbdtConfig::preset(name));
        start = end + 1;
    }
    return out;
}

double Tree::predict(std::span<const double> row) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
        const auto& n = nodes[i];
        i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes[i].value;
}

int Tree::depth() const {
    std::vector<int> d(nodes.size(), 0);
    int deepest = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].is_leaf()) continue;
        d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
        d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
        deepest = std::max(deepest, d[i] + 1);
    }
    return deepest;
}

namespace detail {

double split_gain(double gl, double hl, double g, double h, double lambda, double gamma) {
    auto score = [lambda](double gs, double hs) { return hs + lambda > 0.0 ? gs * gs / (hs + lambda) : 0.0; };
    return score(gl, hl) + score(g - gl, h - hl) - score(g, h) - gamma;
}

double leaf_weight(double g, double h, double lambda) { return h + lambda > 0.0 ? -g / (h + lambda) : 0.0; }

}  // namespace detail

namespace {

// Threshold strictly separating a < b with a <= t < b.
double split_threshold(double a, double b) {
    const double mid = std::midpoint(a, b);
    return mid < b ? mid : a;
}

struct NodeStats {
    double g = 0.0;
    double h = 0.0;
};

NodeStats sum_stats(std::span<const double> grad, std::span<const double> hess, std::span<const std::size_t> rows) {
    NodeStats s;
    for (std::size_t r : rows) {
        s.g += grad[r];
        s.h += hess[r];
    }
    return s;
}

// Scans one feature's rows (sorted by value) and updates `best` when a
// strictly better split appears.
void scan_feature(const Matrix& X, int feature, std::span<const std::size_t> sorted, std::span<const double> grad,
                  std::span<const double> hess, const NodeStats& total, const GbdtConfig& config,
                  detail::SplitChoice& best) {
    const auto f = static_cast<std::size_t>(feature);
    double gl = 0.0;
    double hl = 0.0;
    for (std::size_t j = 0; j + 1 < sorted.size(); ++j) {
        gl += grad[sorted[j]];
        hl += hess[sorted[j]];
        const double a = X(sorted[j], f);
        const double b = X(sorted[j + 1], f);
        if (a == b) continue;
        const double hr = total.h - hl;
        if (hl < config.min_child_weight || hr < config.min_child_weight) continue;
        const double gain = detail::split_gain(gl, hl, total.g, total.h, config.lambda, config.gamma);
        if (gain > best.gain) {
            best = {true, feature, split_threshold(a, b), gain};
        }
    }
}

class TreeBuilder {
public:
    TreeBuilder(const Matrix& X, std::span<const double> grad, std::span<const double> hess, const GbdtConfig& config,
                std::span<double> row_output)
        : X_(X), grad_(grad), hess_(hess), config_(config), row_output_(row_output), go_left_(X.rows(), 0) {}

    Tree build(std::vector<std::size_t> rows, std::vector<int> features, std::vector<std::vector<std::size_t>> sorted) {
        tree_.nodes.clear();
        grow(std::move(rows), std::move(features), std::move(sorted), 0);
        return std::move(tree_);
    }

private:
    std::int32_t grow(std::vector<std::size_t> rows, std::vector<int> features,
                      std::vector<std::vector<std::size_t>> sorted, int depth) {
        const auto index = static_cast<std::int32_t>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        const NodeStats total = sum_stats(grad_, hess_, rows);

        detail::SplitChoice best;
        std::vector<int> live_features;
        std::vector<std::vector<std::size_t>> live_sorted;
        if (depth < config_.max_depth) {
            for (std::size_t k = 0; k < features.size(); ++k) {
                const auto& s = sorted[k];
                const auto f = static_cast<std::size_t>(features[k]);
                if (s.size() < 2 || X_(s.front(), f) == X_(s.back(), f)) continue;  // constant within node
                scan_feature(X_, features[k], s, grad_, hess_, total, config_, best);
                live_features.push_back(features[k]);
                live_sorted.push_back(std::move(sorted[k]));
            }
        }

        if (!best.found) {
            const double w = detail::leaf_weight(total.g, total.h, config_.lambda);
            tree_.nodes[static_cast<std::size_t>(index)].value = w;
            for (std::size_t r : rows) row_output_[r] = w;
            return index;
        }

        const auto bf = static_cast<std::size_t>(best.feature);
        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : rows) {
            const bool left = X_(r, bf) <= best.threshold;
            go_left_[r] = left;
            (left ? left_rows : right_rows).push_back(r);
        }
        std::vector<std::vector<std::size_t>> left_sorted(live_sorted.size()), right_sorted(live_sorted.size());
        for (std::size_t k = 0; k < live_sorted.size(); ++k) {
            left_sorted[k].reserve(left_rows.size());
            right_sorted[k].reserve(right_rows.size());
            for (std::size_t r : live_sorted[k]) (go_left_[r] ? left_sorted[k] : right_sorted[k]).push_back(r);
        }
        live_sorted.clear();
        rows.clear();

        const std::int32_t left = grow(std::move(left_rows), live_features, std::move(left_sorted), depth + 1);
        const std::int32_t right = grow(std::move(right_rows), std::move(live_features), std::move(right_sorted), depth + 1);
        auto& node = tree_.nodes[static_cast<std::size_t>(index)];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = left;
        node.right = right;
        return index;
    }

    const Matrix& X_;
    std::span<const double> grad_;
    std::span<const double> hess_;
    const GbdtConfig& config_;
    std::span<double> row_output_;
    std::vector<char> go_left_;
    Tree tree_;
};

// Column-major margins: margins[k][i].
void margins_to_proba(const std::vector<std::vector<double>>& margins, int n_classes, Matrix& proba) {
    const std::size_t n = margins.front().size();
    if (n_classes == 2) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = 1.0 / (1.0 + std::exp(-margins[0][i]));
            proba(i, 0) = 1.0 - p;
            proba(i, 1) = p;
        }
        return;
    }
    const auto k = static_cast<std::size_t>(n_classes);
    for (std::size_t i = 0; i < n; ++i) {
        double top = margins[0][i];
        for (std::size_t c = 1; c < k; ++c) top = std::max(top, margins[c][i]);
        double z = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            proba(i, c) = std::exp(margins[c][i] - top);
            z += proba(i, c);
        }
        for (std::size_t c = 0; c < k; ++c) proba(i, c) /= z;
    }
}

void check_finite(const Matrix& X) {
    for (std::size_t r = 0; r < X.rows(); ++r) {
        for (double v : X.row(r)) {
            if (!std::isfinite(v)) throw DataError("non-finite feature value in row " + std::to_string(r));
        }
    }
}

}  // namespace

namespace detail {

SplitChoice best_split(const Matrix& X, std::span<const double> grad, std::span<const double> hess,
                       std::span<const std::size_t> rows, const GbdtConfig& config) {
    const NodeStats total = sum_stats(grad, hess, rows);
    SplitChoice best;
    std::vector<std::size_t> sorted(rows.begin(), rows.end());
    for (std::size_t f = 0; f < X.cols(); ++f) {
        std::stable_sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) { return X(a, f) < X(b, f); });
        scan_feature(X, static_cast<int>(f), sorted, grad, hess, total, config, best);
    }
    return best;
}

}  // namespace detail

GbdtModel train_gbdt(const Matrix& X, std::span<const int> y, const GbdtConfig& config, int n_classes,
                     std::vector<std::string> feature_names, const RoundObserver& observer) {
    config.validate();
    if (X.rows() == 0) throw DataError("empty training matrix");
    if (X.rows() != y.size()) throw DataError("design matrix has " + std::to_string(X.rows()) + " rows but " +
                                              std::to_string(y.size()) + " labels");
    if (n_classes < 2) throw DataError("n_classes must be >= 2");
    for (int label : y) {
        if (label < 0 || label >= n_classes) throw DataError("label " + std::to_string(label) + " out of range");
    }
    check_finite(X);
    if (feature_names.empty()) {
        for (std::size_t f = 0; f < X.cols(); ++f) feature_names.push_back("f" + std::to_string(f));
    }
    if (feature_names.size() != X.cols()) throw DataError("feature_names size does not match column count");

    GbdtModel model;
    model.config = config;
    model.n_classes = n_classes;
    model.feature_names = std::move(feature_names);
    const auto per_round = static_cast<std::size_t>(model.trees_per_round());
    model.base_score.assign(per_round, 0.0);

    const std::size_t n = X.rows();
    std::vector<std::size_t> all_rows(n);
    std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});

    // Presort each non-constant column once; ties keep row order.
    std::vector<int> features;
    std::vector<std::vector<std::size_t>> sorted;
    for (std::size_t f = 0; f < X.cols(); ++f) {
        std::vector<std::size_t> order = all_rows;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return X(a, f) < X(b, f); });
        if (X(order.front(), f) == X(order.back(), f)) continue;
        features.push_back(static_cast<int>(f));
        sorted.push_back(std::move(order));
    }

    std::vector<std::vector<double>> margins(per_round, std::vector<double>(n));
    for (std::size_t k = 0; k < per_round; ++k) std::fill(margins[k].begin(), margins[k].end(), model.base_score[k]);
    Matrix proba(n, static_cast<std::size_t>(n_classes));
    std::vector<double> grad(n), hess(n);
    std::vector<std::vector<double>> outputs(per_round, std::vector<double>(n));

    for (int round = 0; round < config.rounds; ++round) {
        margins_to_proba(margins, n_classes, proba);
        for (std::size_t k = 0; k < per_round; ++k) {
            // Binary uses the positive-class probability; multiclass the class-k one.
            const std::size_t column = n_classes == 2 ? 1 : k;
            const int target = n_classes == 2 ? 1 : static_cast<int>(k);
            for (std::size_t i = 0; i < n; ++i) {
                const double p = proba(i, column);
                grad[i] = p - (y[i] == target ? 1.0 : 0.0);
                hess[i] = p * (1.0 - p);
            }
            TreeBuilder builder(X, grad, hess, config, outputs[k]);
            model.trees.push_back(builder.build(all_rows, features, sorted));
        }
        for (std::size_t k = 0; k < per_round; ++k) simd::axpy(config.learning_rate, outputs[k], margins[k]);
        if (observer) {
            margins_to_proba(margins, n_classes, proba);
            observer(round, proba);
        }
    }
    return model;
}

Matrix predict_margin(const GbdtModel& model, const Matrix& X) {
    if (X.cols() != model.n_features()) {
        throw DataError("input has " + std::to_string(X.cols()) + " columns, model expects " +
                        std::to_string(model.n_features()));
    }
    const auto per_round = static_cast<std::size_t>(model.trees_per_round());
    Matrix margin(X.rows(), per_round);
    for (std::size_t i = 0; i < X.rows(); ++i) {
        auto out = margin.row(i);
        std::copy(model.base_score.begin(), model.base_score.end(), out.begin());
        const auto row = X.row(i);
        for (std::size_t t = 0; t < model.trees.size(); ++t) {
            out[t % per_round] = out[t % per_round] + model.config.learning_rate * model.trees[t].predict(row);
        }
    }
    return margin;
}

Matrix predict_proba(const GbdtModel& model, const Matrix& X) {
    const Matrix margin = predict_margin(model, X);
    const auto per_round = static_cast<std::size_t>(model.trees_per_round());
    std::vector<std::vector<double>> columns(per_round, std::vector<double>(X.rows()));
    for (std::size_t i = 0; i < X.rows(); ++i) {
        for (std::size_t k = 0; k < per_round; ++k) columns[k][i] = margin(i, k);
    }
    Matrix proba(X.rows(), static_cast<std::size_t>(model.n_classes));
    if (X.rows() > 0) margins_to_proba(columns, model.n_classes, proba);
    return proba;
}

double log_loss(const Matrix& proba, std::span<const int> y) {
    if (proba.rows() != y.size() || y.empty()) throw DataError("log_loss: shape mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        total -= std::log(std::max(proba(i, static_cast<std::size_t>(y[i])), 1e-15));
    }
    return total / static_cast<double>(y.size());
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

using ojson = nlohmann::ordered_json;

ojson node_to_json(const Tree& tree, std::size_t i) {
    const auto& n = tree.nodes[i];
    if (n.is_leaf()) return ojson{{"leaf", n.value}};
    ojson j;
    j["feature"] = n.feature;
    j["threshold"] = n.threshold;
    j["left"] = node_to_json(tree, static_cast<std::size_t>(n.left));
    j["right"] = node_to_json(tree, static_cast<std::size_t>(n.right));
    return j;
}

std::int32_t node_from_json(const ojson& j, Tree& tree, std::size_t n_features, int depth, int max_depth) {
    if (depth > max_depth) throw DataError("tree deeper than max_depth");
    const auto index = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (j.contains("leaf")) {
        const double v = j.at("leaf").get<double>();
        if (!std::isfinite(v)) throw DataError("non-finite leaf value");
        tree.nodes.back().value = v;
        return index;
    }
    const auto feature = j.at("feature").get<std::int32_t>();
    if (feature < 0 || static_cast<std::size_t>(feature) >= n_features) throw DataError("split feature out of range");
    const double threshold = j.at("threshold").get<double>();
    const std::int32_t left = node_from_json(j.at("left"), tree, n_features, depth + 1, max_depth);
    const std::int32_t right = node_from_json(j.at("right"), tree, n_features, depth + 1, max_depth);
    auto& node = tree.nodes[static_cast<std::size_t>(index)];
    node.feature = feature;
    node.threshold = threshold;
    node.left = left;
    node.right = right;
    return index;
}

}  // namespace

std::string model_to_json(const GbdtModel& model) {
    ojson j;
    j["version"] = kModelFormatVersion;
    j["config"] = {{"preset_name", model.config.preset_name},
                   {"rounds", model.config.rounds},
                   {"learning_rate", model.config.learning_rate},
                   {"max_depth", model.config.max_depth},
                   {"lambda", model.config.lambda},
                   {"gamma", model.config.gamma},
                   {"min_child_weight", model.config.min_child_weight}};
    j["n_classes"] = model.n_classes;
    j["feature_names"] = model.feature_names;
    j["base_score"] = model.base_score;
    ojson trees = ojson::array();
    for (const auto& t : model.trees) trees.push_back(node_to_json(t, 0));
    j["trees"] = std::move(trees);
    return j.dump() + "\n";
}

GbdtModel parse_model(std::string_view content) {
    try {
        const auto j = ojson::parse(content);
        if (!j.is_object() || !j.contains("version")) throw DataError("model file has no version tag");
        const auto& version = j.at("version");
        if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion) {
            throw DataError("unsupported model version " + version.dump());
        }
        GbdtModel m;
        const auto& c = j.at("config");
        m.config.preset_name = c.at("preset_name").get<std::string>();
        m.config.rounds = c.at("rounds").get<int>();
        m.config.learning_rate = c.at("learning_rate").get<double>();
        m.config.max_depth = c.at("max_depth").get<int>();
        m.config.lambda = c.at("lambda").get<double>();
        m.config.gamma = c.at("gamma").get<double>();
        m.config.min_child_weight = c.at("min_child_weight").get<double>();
        try {
            m.config.validate();
        } catch (const ConfigError& e) {
            throw DataError(std::string("model config: ") + e.what());
        }
        m.n_classes = j.at("n_classes").get<int>();
        if (m.n_classes < 2) throw DataError("n_classes must be >= 2");
        m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        m.base_score = j.at("base_score").get<std::vector<double>>();
        if (m.base_score.size() != static_cast<std::size_t>(m.trees_per_round())) throw DataError("base_score size mismatch");
        const auto& trees = j.at("trees");
        const std::size_t expected = static_cast<std::size_t>(m.config.rounds) * static_cast<std::size_t>(m.trees_per_round());
        if (!trees.is_array() || trees.size() != expected) {
            throw DataError("expected " + std::to_string(expected) + " trees");
        }
        for (const auto& t : trees) {
            Tree tree;
            node_from_json(t, tree, m.feature_names.size(), 0, m.config.max_depth);
            m.trees.push_back(std::move(tree));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model file: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const GbdtModel& model) { write_file(path, model_to_json(model)); }

GbdtModel load_model(const std::filesystem::path& path) {
    try {
        return parse_model(read_file(path));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

}  // namespace hsd
