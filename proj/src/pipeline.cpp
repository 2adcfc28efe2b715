#include "hsd/pipeline.hpp"

#include "hsd/bow.hpp"
#include "hsd/corpus.hpp"
#include "hsd/ensemble.hpp"
#include "hsd/entfeat.hpp"
#include "hsd/error.hpp"
#include "hsd/fusion.hpp"
#include "hsd/gbdt.hpp"
#include "hsd/io.hpp"
#include "hsd/synfeat.hpp"

#include <json.hpp>

#include <charconv>
#include <iostream>
#include <set>

namespace hsd {

namespace {

const std::map<std::string, std::string>& defaults(RunKind kind) {
    static const std::map<std::string, std::string> a = {
        {"train", ""},         {"eval", ""},     {"test", ""},           {"out", ""},
        {"presets", "default,deep,light"},       {"rounds", "25"},       {"min_count", "2"},
        {"max_size", "10000"}, {"external_preds", ""},
    };
    static const std::map<std::string, std::string> b = {
        {"train", ""},       {"eval", ""},        {"test", ""},      {"out", ""},
        {"embeddings", ""},  {"annotations", ""}, {"gazetteer", ""}, {"presets", "default,deep,light"},
    };
    return kind == RunKind::subtask_a ? a : b;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

PipelineConfig::PipelineConfig(RunKind kind) : kind_(kind), values_(defaults(kind)) {}

void PipelineConfig::set(const std::string& key, std::string value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second = std::move(value);
}

void PipelineConfig::load_text(std::string_view content) {
    std::size_t n = 0;
    for (std::string_view line : split_lines(content)) {
        ++n;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("config line " + std::to_string(n) + ": expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw ConfigError("config line " + std::to_string(n) + ": empty key");
        set(key, std::string(trim(line.substr(eq + 1))));
    }
}

void PipelineConfig::load_file(const std::filesystem::path& path) {
    std::string content;
    try {
        content = read_file(path);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
    load_text(content);
}

void PipelineConfig::apply_override(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw ConfigError("override must be key=value: '" + std::string(assignment) + "'");
    set(std::string(trim(assignment.substr(0, eq))), std::string(trim(assignment.substr(eq + 1))));
}

bool PipelineConfig::has(const std::string& key) const {
    auto it = values_.find(key);
    return it != values_.end() && !it->second.empty();
}

const std::string& PipelineConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end() || it->second.empty()) throw ConfigError("missing required config key '" + key + "'");
    return it->second;
}

std::optional<std::string> PipelineConfig::find(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return values_.at(key);
}

long long PipelineConfig::get_int(const std::string& key) const {
    const std::string& v = get(key);
    long long out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) throw ConfigError("config key '" + key + "' is not an integer");
    return out;
}

std::vector<std::string> PipelineConfig::get_list(const std::string& key) const {
    std::vector<std::string> out;
    auto v = find(key);
    if (!v) return out;
    std::string_view rest = *v;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const auto item = trim(rest.substr(0, comma));
        if (!item.empty()) out.emplace_back(item);
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

namespace {

template <class Fn>
auto stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

// Tracks artifacts written under the run directory.
class RunDir {
public:
    explicit RunDir(std::filesystem::path root) : root_(std::move(root)) { std::filesystem::create_directories(root_); }

    const std::filesystem::path& root() const { return root_; }

    void write(const std::string& rel, const std::string& content) {
        write_file(root_ / rel, content);
        artifacts_.emplace_back(rel, sha256_hex(content));
    }

    const std::vector<std::pair<std::string, std::string>>& artifacts() const { return artifacts_; }

private:
    std::filesystem::path root_;
    std::vector<std::pair<std::string, std::string>> artifacts_;
};

void log_config(std::string_view command, const PipelineConfig& config) {
    for (const auto& [k, v] : config.values()) std::cerr << "[hsd " << command << "] " << k << " = " << v << "\n";
}

std::filesystem::path write_manifest(RunDir& dir, std::string_view command, const PipelineConfig& config,
                                     const std::vector<std::string>& input_paths, RunResult& result) {
    nlohmann::ordered_json j;
    j["command"] = command;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config.values()) {
        if (k != "out") cfg[k] = v;
    }
    j["config"] = std::move(cfg);
    j["inputs"] = nlohmann::ordered_json::array();
    for (const auto& p : input_paths) j["inputs"].push_back({{"path", p}, {"sha256", sha256_hex(read_file(p))}});
    j["artifacts"] = nlohmann::ordered_json::array();
    for (const auto& [rel, hash] : dir.artifacts()) {
        j["artifacts"].push_back({{"path", rel}, {"sha256", hash}});
        result.artifacts.push_back(rel);
    }
    const auto path = dir.root() / "manifest.json";
    write_file(path, j.dump(2) + "\n");
    return path;
}

PredictionSet member_predictions(const std::string& name, const GbdtModel& model, const FeatureTable& design) {
    return PredictionSet(name, design.ids, predict_proba(model, design.values));
}

// Restricts a prediction set to `ids`, in that order.
PredictionSet restrict_to(const PredictionSet& p, const std::vector<std::string>& ids) {
    return PredictionSet(p.model_name(), ids, p.aligned(ids));
}

LabelMap argmax_labels(const PredictionSet& p) {
    LabelMap out;
    const auto pred = argmax_rows(p.probs());
    for (std::size_t i = 0; i < p.size(); ++i) out.emplace(p.ids()[i], pred[i]);
    return out;
}

nlohmann::ordered_json metrics_json(const MetricReport& r) { return nlohmann::ordered_json::parse(metric_report_to_json(r)); }

}  // namespace

RunResult run_subtask_a(const PipelineConfig& config) {
    if (config.kind() != RunKind::subtask_a) throw ConfigError("run-a needs a subtask A config");
    const auto schema = TaskSchema::for_task(Task::A);
    const auto presets = parse_presets(config.get("presets"));
    const auto rounds = static_cast<int>(config.get_int("rounds"));
    const auto min_count = config.get_int("min_count");
    const auto max_size = config.get_int("max_size");
    if (rounds < 1 || min_count < 1 || max_size < 1) throw ConfigError("rounds, min_count and max_size must be >= 1");
    const std::string train_path = config.get("train");
    const std::string eval_path = config.get("eval");
    RunDir dir(config.get("out"));
    log_config("run-a", config);

    std::vector<std::string> inputs{train_path, eval_path};
    RunResult result;

    const Dataset train = stage("load", [&] { return load_dataset(train_path, schema, Split::train); });

    struct Features {
        BowVocab vocab;
        FeatureTable design;
    };
    auto design_for = [](const Dataset& ds, const BowVocab& vocab) {
        const FeatureTable parts[] = {syntactic_table(ds), bow_table(ds, vocab)};
        return hconcat(parts);
    };
    const Features feats = stage("features", [&] {
        Features f;
        f.vocab = fit_vocab(train.texts(), static_cast<std::uint64_t>(min_count), static_cast<std::size_t>(max_size));
        f.design = design_for(train, f.vocab);
        dir.write("vocab.json", vocab_to_json(f.vocab));
        return f;
    });

    std::vector<std::pair<std::string, GbdtModel>> models = stage("train", [&] {
        std::vector<std::pair<std::string, GbdtModel>> out;
        const auto y = train.labels();
        for (const auto& preset : presets) {
            auto model = train_gbdt(feats.design.values, y, preset, 2, feats.design.columns);
            dir.write("models/" + preset.preset_name + ".json", model_to_json(model));
            out.emplace_back("gbdt-" + preset.preset_name, std::move(model));
        }
        return out;
    });

    struct Fitted {
        Dataset eval;
        std::vector<PredictionSet> external;
        std::vector<PredictionSet> eval_preds;
        EnsembleWeights weights;
    };
    Fitted fit = stage("ensemble-fit", [&] {
        Fitted f;
        f.eval = load_dataset(eval_path, schema, Split::eval);
        const auto design = design_for(f.eval, feats.vocab);
        for (const auto& [name, model] : models) f.eval_preds.push_back(member_predictions(name, model, design));
        std::set<std::string> names;
        for (const auto& p : f.eval_preds) names.insert(p.model_name());
        for (const auto& path : config.get_list("external_preds")) {
            inputs.push_back(path);
            auto ext = load_predictions(path);
            if (ext.n_classes() != schema.n_classes()) throw DataError(path + ": expected 2 probabilities per row");
            if (!names.insert(ext.model_name()).second) throw DataError("duplicate member name '" + ext.model_name() + "'");
            f.eval_preds.push_back(restrict_to(ext, f.eval.ids()));
            f.external.push_back(std::move(ext));
        }
        for (const auto& p : f.eval_preds) dir.write("preds/eval/" + p.model_name() + ".jsonl", predictions_to_jsonl(p));
        f.weights = fit_weights(f.eval_preds, f.eval.gold(), rounds);
        dir.write("weights.json", weights_to_json(f.weights));
        return f;
    });

    const PredictionSet final_eval = stage("ensemble-predict", [&] {
        auto out = ensemble_predict(fit.eval_preds, fit.weights, "ensemble");
        dir.write("final_eval.jsonl", predictions_to_jsonl(out));
        if (auto test_path = config.find("test")) {
            inputs.push_back(*test_path);
            const Dataset test = load_dataset(*test_path, schema, Split::test);
            const auto design = design_for(test, feats.vocab);
            std::vector<PredictionSet> test_preds;
            for (const auto& [name, model] : models) test_preds.push_back(member_predictions(name, model, design));
            for (const auto& ext : fit.external) test_preds.push_back(restrict_to(ext, test.ids()));
            dir.write("final_test.jsonl", predictions_to_jsonl(ensemble_predict(test_preds, fit.weights, "ensemble")));
        }
        return out;
    });

    stage("evaluate", [&] {
        const LabelMap gold = fit.eval.gold();
        result.report = evaluate(gold, argmax_labels(final_eval), schema);
        result.ensemble_accuracy = accuracy(final_eval, gold);
        nlohmann::ordered_json j;
        j["task"] = "a";
        j["split"] = "eval";
        j["ensemble"] = metrics_json(result.report);
        j["ensemble"]["eval_accuracy_exact"] = result.ensemble_accuracy;
        j["members"] = nlohmann::ordered_json::array();
        for (const auto& p : fit.eval_preds) {
            const double acc = accuracy(p, gold);
            result.members.push_back({p.model_name(), acc});
            auto m = metrics_json(evaluate(gold, argmax_labels(p), schema));
            m["model"] = p.model_name();
            m["eval_accuracy_exact"] = acc;
            j["members"].push_back(std::move(m));
        }
        dir.write("report.json", j.dump(2) + "\n");
        return 0;
    });

    result.manifest = stage("manifest", [&] { return write_manifest(dir, "run-a", config, inputs, result); });
    return result;
}

RunResult run_subtask_b(const PipelineConfig& config) {
    if (config.kind() != RunKind::subtask_b) throw ConfigError("run-b needs a subtask B config");
    const auto schema = TaskSchema::for_task(Task::B);
    const auto presets = parse_presets(config.get("presets"));
    const std::string train_path = config.get("train");
    const std::string eval_path = config.get("eval");
    const std::string emb_path = config.get("embeddings");
    const auto annotations_path = config.find("annotations");
    const auto gazetteer_path = config.find("gazetteer");
    if (annotations_path.has_value() == gazetteer_path.has_value()) {
        throw ConfigError("run-b needs exactly one of 'annotations' or 'gazetteer'");
    }
    RunDir dir(config.get("out"));
    log_config("run-b", config);

    std::vector<std::string> inputs{train_path, eval_path, emb_path, annotations_path ? *annotations_path : *gazetteer_path};
    const auto test_path = config.find("test");
    if (test_path) inputs.push_back(*test_path);
    RunResult result;

    struct Loaded {
        Dataset train, eval;
        std::optional<Dataset> test;
        EmbeddingStore store;
    };
    const Loaded data = stage("load", [&] {
        Loaded l;
        l.train = load_dataset(train_path, schema, Split::train);
        l.eval = load_dataset(eval_path, schema, Split::eval);
        if (test_path) l.test = load_dataset(*test_path, schema, Split::test);
        l.store = load_embeddings(emb_path);
        return l;
    });

    struct Split3 {
        FeatureTable train, eval;
        std::optional<FeatureTable> test;
    };
    const Split3 entities = stage("entities", [&] {
        Split3 s;
        std::optional<AnnotationMap> annotations;
        std::optional<Gazetteer> gazetteer;
        if (annotations_path) annotations = load_annotations(*annotations_path);
        else gazetteer = load_gazetteer(*gazetteer_path);
        auto build = [&](const Dataset& ds) {
            return annotations ? entity_table(ds, *annotations) : entity_table(ds, *gazetteer);
        };
        s.train = build(data.train);
        s.eval = build(data.eval);
        dir.write("ner_train.csv", feature_table_to_csv(s.train));
        dir.write("ner_eval.csv", feature_table_to_csv(s.eval));
        if (data.test) {
            s.test = build(*data.test);
            dir.write("ner_test.csv", feature_table_to_csv(*s.test));
        }
        return s;
    });

    const Split3 fused = stage("fusion", [&] {
        Split3 s;
        s.train = fusion_table(data.train, data.store, entities.train);
        s.eval = fusion_table(data.eval, data.store, entities.eval);
        dir.write("fusion_train.csv", feature_table_to_csv(s.train));
        dir.write("fusion_eval.csv", feature_table_to_csv(s.eval));
        if (data.test) s.test = fusion_table(*data.test, data.store, *entities.test);
        return s;
    });

    const Selection selection = stage("train", [&] {
        auto sel = train_and_select(labeled(fused.train, data.train), labeled(fused.eval, data.eval), presets,
                                    static_cast<int>(schema.n_classes()));
        dir.write("model.json", model_to_json(sel.model));
        dir.write("selection.json", selection_report_to_json(sel.report));

        // Embeddings-only reference over the same presets.
        const auto emb_train = embedding_table(data.train, data.store);
        const auto emb_eval = embedding_table(data.eval, data.store);
        auto base = train_and_select(labeled(emb_train, data.train), labeled(emb_eval, data.eval), presets,
                                     static_cast<int>(schema.n_classes()));
        dir.write("selection_embeddings_only.json", selection_report_to_json(base.report));
        result.selected_accuracy = sel.report.selected_accuracy();
        result.embeddings_only_accuracy = base.report.selected_accuracy();
        return sel;
    });

    const PredictionSet eval_preds = stage("predict", [&] {
        PredictionSet p("fusion", fused.eval.ids, predict_proba(selection.model, fused.eval.values));
        dir.write("preds_eval.jsonl", predictions_to_jsonl(p));
        if (fused.test) {
            PredictionSet t("fusion", fused.test->ids, predict_proba(selection.model, fused.test->values));
            dir.write("preds_test.jsonl", predictions_to_jsonl(t));
        }
        return p;
    });

    stage("evaluate", [&] {
        const LabelMap gold = data.eval.gold();
        result.report = evaluate(gold, argmax_labels(eval_preds), schema);
        nlohmann::ordered_json j;
        j["task"] = "b";
        j["split"] = "eval";
        j["fusion"] = metrics_json(result.report);
        j["fusion"]["preset"] = selection.report.scores[selection.report.selected].preset;
        j["fusion"]["eval_accuracy_exact"] = result.selected_accuracy;
        j["embeddings_only_eval_accuracy_exact"] = result.embeddings_only_accuracy;
        dir.write("report.json", j.dump(2) + "\n");
        return 0;
    });

    result.manifest = stage("manifest", [&] { return write_manifest(dir, "run-b", config, inputs, result); });
    return result;
}

}  // namespace hsd
