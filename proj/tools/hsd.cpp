// hsd: command-line entry point for the hate-speech pipelines.
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 stage failure.

#include "hsd/bow.hpp"
#include "hsd/corpus.hpp"
#include "hsd/embedding.hpp"
#include "hsd/ensemble.hpp"
#include "hsd/entfeat.hpp"
#include "hsd/error.hpp"
#include "hsd/fusion.hpp"
#include "hsd/gbdt.hpp"
#include "hsd/io.hpp"
#include "hsd/metrics.hpp"
#include "hsd/pipeline.hpp"
#include "hsd/synfeat.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace hsd;

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitStage = 4;

// Labels decide the schema; when --task is absent try A, then B.
Dataset load_any(const std::string& path, const std::string& task) {
    if (!task.empty()) return load_dataset(path, TaskSchema::for_task(parse_task(task)));
    try {
        return load_dataset(path, TaskSchema::for_task(Task::A));
    } catch (const DataError&) {
        return load_dataset(path, TaskSchema::for_task(Task::B));
    }
}

FeatureTable load_features(const std::vector<std::string>& paths) {
    if (paths.empty()) throw ConfigError("at least one --features file is required");
    std::vector<FeatureTable> tables;
    for (const auto& p : paths) tables.push_back(load_feature_csv(p));
    return hconcat(tables);
}

std::vector<std::size_t> parse_counts(const std::string& csv) {
    std::vector<std::size_t> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        std::size_t end = csv.find(',', start);
        if (end == std::string::npos) end = csv.size();
        const std::string item = csv.substr(start, end - start);
        try {
            std::size_t used = 0;
            const long long v = std::stoll(item, &used);
            if (used != item.size() || v < 0) throw std::invalid_argument(item);
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw ConfigError("bad --counts entry '" + item + "'");
        }
        start = end + 1;
    }
    return out;
}

void write_json_text(const std::string& path, const std::string& content) { write_file(path, content); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hate-speech detection pipelines: features, boosted trees, ensembling, fusion, evaluation"};
    app.require_subcommand(1);

    // corpus synth
    auto* corpus = app.add_subcommand("corpus", "Dataset utilities");
    corpus->require_subcommand(1);
    auto* synth = corpus->add_subcommand("synth", "Generate a seeded synthetic corpus");
    std::string synth_task, synth_counts, synth_out;
    std::uint64_t synth_seed = 0;
    std::size_t synth_dim = 8;
    synth->add_option("--task", synth_task, "a or b")->required();
    synth->add_option("--seed", synth_seed)->required();
    synth->add_option("--counts", synth_counts, "per-class counts, e.g. 50,50")->required();
    synth->add_option("--embed-dim", synth_dim)->default_val(8);
    synth->add_option("--out", synth_out, "output prefix")->required();
    synth->callback([&] {
        const auto schema = TaskSchema::for_task(parse_task(synth_task));
        const auto counts = parse_counts(synth_counts);
        const auto corpus_out = generate_synthetic(synth_seed, schema, counts, synth_dim);
        write_dataset(synth_out + ".jsonl", corpus_out.dataset);
        write_embeddings(synth_out + ".emb.jsonl", corpus_out.embeddings);
        if (schema.task == Task::B) {
            Gazetteer gaz;
            for (std::size_t l = 0; l < kEntityLabels.size(); ++l) {
                for (const auto& phrase : synthetic_entity_lexicon()[l].second) gaz.add(kEntityLabels[l], phrase);
            }
            write_file(synth_out + ".gaz.json", gazetteer_to_json(gaz));
        }
    });

    // features
    auto* features = app.add_subcommand("features", "Feature extraction");
    features->require_subcommand(1);
    std::string f_in, f_out, f_task;

    auto* syntactic = features->add_subcommand("syntactic", "33-dim character-class features");
    syntactic->add_option("--in", f_in)->required();
    syntactic->add_option("--out", f_out)->required();
    syntactic->add_option("--task", f_task);
    syntactic->callback([&] { write_feature_csv(f_out, syntactic_table(load_any(f_in, f_task))); });

    auto* bow = features->add_subcommand("bow", "Word n-gram bag of words");
    bow->require_subcommand(1);
    auto* bow_fit = bow->add_subcommand("fit", "Fit a vocabulary");
    std::uint64_t min_count = kDefaultMinCount;
    std::size_t max_size = kDefaultMaxSize;
    bow_fit->add_option("--in", f_in)->required();
    bow_fit->add_option("--min-count", min_count)->default_val(kDefaultMinCount);
    bow_fit->add_option("--max-size", max_size)->default_val(kDefaultMaxSize);
    bow_fit->add_option("--out", f_out)->required();
    bow_fit->add_option("--task", f_task);
    bow_fit->callback([&] { save_vocab(f_out, fit_vocab(load_any(f_in, f_task).texts(), min_count, max_size)); });

    auto* bow_transform = bow->add_subcommand("transform", "Dense n-gram counts");
    std::string vocab_path;
    bow_transform->add_option("--vocab", vocab_path)->required();
    bow_transform->add_option("--in", f_in)->required();
    bow_transform->add_option("--out", f_out)->required();
    bow_transform->add_option("--task", f_task);
    bow_transform->callback([&] { write_feature_csv(f_out, bow_table(load_any(f_in, f_task), load_vocab(vocab_path))); });

    auto* ner = features->add_subcommand("ner", "PER/NORP/ORG entity counts");
    std::string ann_path, gaz_path;
    ner->add_option("--in", f_in)->required();
    auto* ann_opt = ner->add_option("--annotations", ann_path);
    auto* gaz_opt = ner->add_option("--gazetteer", gaz_path);
    ann_opt->excludes(gaz_opt);
    ner->add_option("--out", f_out)->required();
    ner->add_option("--task", f_task);
    ner->callback([&] {
        if (ann_path.empty() == gaz_path.empty()) throw ConfigError("give exactly one of --annotations or --gazetteer");
        const Dataset ds = load_any(f_in, f_task);
        write_feature_csv(f_out, ann_path.empty() ? entity_table(ds, load_gazetteer(gaz_path))
                                                  : entity_table(ds, load_annotations(ann_path)));
    });

    // train
    auto* train = app.add_subcommand("train", "Model training");
    train->require_subcommand(1);
    auto* train_gbdt_cmd = train->add_subcommand("gbdt", "Train one boosted-tree model");
    std::vector<std::string> feature_paths, feature_paths2;
    std::string data_path, preset_name = "default", model_out, task_name_opt;
    train_gbdt_cmd->add_option("--features", feature_paths)->required();
    train_gbdt_cmd->add_option("--features2", feature_paths2);
    train_gbdt_cmd->add_option("--data", data_path)->required();
    train_gbdt_cmd->add_option("--task", task_name_opt);
    train_gbdt_cmd->add_option("--preset", preset_name)->default_val("default");
    train_gbdt_cmd->add_option("--out", model_out)->required();
    train_gbdt_cmd->callback([&] {
        auto paths = feature_paths;
        paths.insert(paths.end(), feature_paths2.begin(), feature_paths2.end());
        const Dataset ds = load_any(data_path, task_name_opt);
        const auto m = labeled(load_features(paths), ds);
        save_model(model_out, train_gbdt(m.X, m.y, GbdtConfig::preset(preset_name),
                                         static_cast<int>(ds.schema.n_classes()), m.feature_names));
    });

    auto* train_fusion = train->add_subcommand("fusion", "Sweep presets on fusion features and select by eval accuracy");
    std::string tf_train, tf_eval, tf_train_data, tf_eval_data, tf_presets = "default,deep,light", tf_report;
    train_fusion->add_option("--train", tf_train, "fusion CSV for training")->required();
    train_fusion->add_option("--train-data", tf_train_data, "dataset JSONL with training labels")->required();
    train_fusion->add_option("--eval", tf_eval, "fusion CSV for evaluation")->required();
    train_fusion->add_option("--eval-data", tf_eval_data, "dataset JSONL with eval labels")->required();
    train_fusion->add_option("--presets", tf_presets)->default_val("default,deep,light");
    train_fusion->add_option("--out", model_out)->required();
    train_fusion->add_option("--report", tf_report)->required();
    train_fusion->callback([&] {
        const auto schema = TaskSchema::for_task(Task::B);
        const Dataset tr = load_dataset(tf_train_data, schema, Split::train);
        const Dataset ev = load_dataset(tf_eval_data, schema, Split::eval);
        const auto presets = parse_presets(tf_presets);
        const auto sel = train_and_select(labeled(load_feature_csv(tf_train), tr), labeled(load_feature_csv(tf_eval), ev),
                                          presets, static_cast<int>(schema.n_classes()));
        save_model(model_out, sel.model);
        write_json_text(tf_report, selection_report_to_json(sel.report));
    });

    // predict
    auto* predict = app.add_subcommand("predict", "Class probabilities from a saved model");
    std::string model_in, preds_out;
    predict->add_option("--model", model_in)->required();
    predict->add_option("--features", feature_paths)->required();
    predict->add_option("--out", preds_out)->required();
    predict->callback([&] {
        const auto model = load_model(model_in);
        const auto table = load_features(feature_paths);
        if (table.columns != model.feature_names) throw DataError("feature columns do not match the model's feature_names");
        write_predictions(preds_out, PredictionSet(std::filesystem::path(model_in).stem().string(), table.ids,
                                                   predict_proba(model, table.values)));
    });

    // ensemble
    auto* ensemble = app.add_subcommand("ensemble", "Greedy weighted ensembling");
    ensemble->require_subcommand(1);
    std::vector<std::string> pred_paths;
    std::string gold_path, weights_path, ens_task = "a";
    int ens_rounds = kDefaultEnsembleRounds;
    auto* ens_fit = ensemble->add_subcommand("fit", "Fit member weights on labeled eval data");
    ens_fit->add_option("--preds", pred_paths)->required();
    ens_fit->add_option("--gold", gold_path)->required();
    ens_fit->add_option("--task", ens_task)->default_val("a");
    ens_fit->add_option("--rounds", ens_rounds)->default_val(kDefaultEnsembleRounds);
    ens_fit->add_option("--out", weights_path)->required();
    ens_fit->callback([&] {
        const Dataset gold = load_dataset(gold_path, TaskSchema::for_task(parse_task(ens_task)), Split::eval);
        std::vector<PredictionSet> preds;
        for (const auto& p : pred_paths) {
            const auto set = load_predictions(p);
            preds.emplace_back(set.model_name(), gold.ids(), set.aligned(gold.ids()));
        }
        save_weights(weights_path, fit_weights(preds, gold.gold(), ens_rounds));
    });
    auto* ens_predict = ensemble->add_subcommand("predict", "Weighted average of member predictions");
    ens_predict->add_option("--preds", pred_paths)->required();
    ens_predict->add_option("--weights", weights_path)->required();
    ens_predict->add_option("--out", preds_out)->required();
    ens_predict->callback([&] {
        std::vector<PredictionSet> preds;
        for (const auto& p : pred_paths) preds.push_back(load_predictions(p));
        write_predictions(preds_out, ensemble_predict(preds, load_weights(weights_path)));
    });

    // fuse
    auto* fuse = app.add_subcommand("fuse", "Concatenate embeddings with entity counts");
    std::string emb_path, ner_path;
    fuse->add_option("--data", data_path)->required();
    fuse->add_option("--embeddings", emb_path)->required();
    fuse->add_option("--ner", ner_path)->required();
    fuse->add_option("--out", f_out)->required();
    fuse->add_option("--task", f_task);
    fuse->callback([&] {
        write_feature_csv(f_out, fusion_table(load_any(data_path, f_task), load_embeddings(emb_path), load_feature_csv(ner_path)));
    });

    // evaluate
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Binary (task a) or weighted (task b) metrics");
    std::string eval_task, pred_path, report_out;
    evaluate_cmd->add_option("--task", eval_task)->required();
    evaluate_cmd->add_option("--gold", gold_path)->required();
    evaluate_cmd->add_option("--pred", pred_path)->required();
    evaluate_cmd->add_option("--out", report_out)->required();
    evaluate_cmd->callback([&] {
        const auto schema = TaskSchema::for_task(parse_task(eval_task));
        const Dataset gold = load_dataset(gold_path, schema, Split::eval);
        const auto preds = load_predictions(pred_path);
        if (preds.n_classes() != schema.n_classes()) throw DataError("prediction rows have the wrong class count");
        LabelMap pred;
        const auto best = argmax_rows(preds.probs());
        for (std::size_t i = 0; i < preds.size(); ++i) pred.emplace(preds.ids()[i], best[i]);
        const auto report = evaluate(gold.gold(), pred, schema);
        write_file(report_out, metric_report_to_json(report));
        std::cout << metric_report_to_json(report);
    });

    // run-a / run-b
    std::string run_config;
    std::vector<std::string> overrides;
    auto add_run = [&](const char* name, const char* help, RunKind kind) {
        auto* cmd = app.add_subcommand(name, help);
        cmd->add_option("--config", run_config, "key = value file");
        cmd->add_option("--set", overrides, "key=value override (repeatable)");
        cmd->callback([&, kind, name] {
            PipelineConfig cfg(kind);
            if (!run_config.empty()) cfg.load_file(run_config);
            for (const auto& o : overrides) cfg.apply_override(o);
            const RunResult r = kind == RunKind::subtask_a ? run_subtask_a(cfg) : run_subtask_b(cfg);
            std::cerr << "[hsd " << name << "] manifest: " << r.manifest.string() << "\n";
            std::cout << metric_report_to_json(r.report);
        });
    };
    add_run("run-a", "Subtask A: syntactic + BoW boosted trees, greedy ensemble", RunKind::subtask_a);
    add_run("run-b", "Subtask B: embeddings + entity counts fusion, preset selection", RunKind::subtask_b);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const StageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStage;
    }
    return 0;
}
