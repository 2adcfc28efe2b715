// Acceptance runner: one PASS/FAIL line per criterion, exit 1 on any FAIL.
// Usage: acceptance [work-dir]

#include "hsd/bow.hpp"
#include "hsd/corpus.hpp"
#include "hsd/embedding.hpp"
#include "hsd/ensemble.hpp"
#include "hsd/entfeat.hpp"
#include "hsd/error.hpp"
#include "hsd/gbdt.hpp"
#include "hsd/io.hpp"
#include "hsd/metrics.hpp"
#include "hsd/pipeline.hpp"
#include "hsd/synfeat.hpp"
#include "support/gbdt_oracle.hpp"
#include "support/synfeat_oracle.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace hsd;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    // Records the first failure only; later checks still run.
    void expect(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail.str({});
            detail << "failed: " << what;
        }
    }
};

struct Criterion {
    std::string name;
    double limit_s;  // <= 0: untimed
    std::function<void(Outcome&)> run;
};

fs::path g_work;

// ---- syntactic features

void syntactic_oracle(Outcome& o) {
    std::size_t matched = 0;
    for (const auto& c : oracle::kSynfeatCases) {
        const auto v = extract_syntactic(c.text);
        bool same = true;
        for (std::size_t i = 0; i < kSyntacticDim; ++i) same = same && v[i] == c.expected[i];
        o.expect(same, std::string("oracle case \"") + c.text + "\"");
        matched += same;
    }
    o.expect(std::size(oracle::kSynfeatCases) == 20, "oracle table size");
    std::mt19937_64 rng(1234);
    std::size_t violations = 0;
    for (int i = 0; i < 10000; ++i) {
        const std::string why = oracle::invariant_violation(oracle::random_text(rng));
        if (!why.empty()) {
            o.expect(false, "invariant " + why);
            ++violations;
        }
    }
    if (o.pass) o.detail << matched << "/20 oracle strings exact on 33 dims, 10000 fuzz strings, 0 violations";
}

// ---- worked example

void worked_example(Outcome& o) {
    Gazetteer g;
    g.add(EntityLabel::PER, "putin");
    g.add(EntityLabel::PER, "adolf");
    g.add(EntityLabel::NORP, "russian");
    g.add(EntityLabel::ORG, "nato");
    const auto counts = count_entities(gazetteer_recognize("STOP RUSSIAN AGRESSOR ADOLF PUTIN HANDS OFF UKRAINE", g));
    const EntityCountVector want{2, 1, 0};
    o.expect(counts == want, "entity vector");
    if (o.pass) o.detail << "entity vector [2,1,0]";
}

// ---- gbdt

void gbdt_oracle(Outcome& o) {
    std::size_t instances = 0;
    for (const auto& [features, values] : {std::pair<std::size_t, std::size_t>{1, 4}, {2, 2}, {2, 3}}) {
        const auto r = oracle::exhaust(features, values, 8);
        o.expect(r.mismatches == 0, "stump oracle: " + r.first_mismatch);
        instances += r.instances;
    }

    Matrix X(0, 1);
    for (double v : {1.0, 2.0, 3.0, 4.0}) X.push_row(std::vector<double>{v});
    const std::vector<int> y = {0, 0, 1, 1};
    const auto stump = train_gbdt(X, y, oracle::stump_config(0.0, 0.0), 2);
    const auto& nodes = stump.trees.at(0).nodes;
    o.expect(nodes.size() == 3 && nodes[1].value == -2.0 && nodes[2].value == 2.0, "hand stump leaves");
    const Matrix p = predict_proba(stump, X);
    for (std::size_t i = 0; i < 4; ++i) {
        o.expect(std::abs(p(i, 1) - (i < 2 ? 0.11920 : 0.88080)) <= 1e-5, "hand stump probabilities");
    }

    const std::vector<std::size_t> counts = {150, 150};
    const auto c = generate_synthetic(17, TaskSchema::for_task(Task::A), counts, 4);
    const auto vocab = fit_vocab(c.dataset.texts());
    const FeatureTable parts[] = {syntactic_table(c.dataset), bow_table(c.dataset, vocab)};
    const auto labels = c.dataset.labels();
    std::vector<double> losses;
    train_gbdt(hconcat(parts).values, labels, GbdtConfig::preset("default"), 2, {},
               [&](int, const Matrix& proba) { losses.push_back(log_loss(proba, labels)); });
    o.expect(losses.size() == 100, "100 rounds");
    for (std::size_t r = 1; r < losses.size(); ++r) o.expect(losses[r] <= losses[r - 1], "log-loss increased");
    if (o.pass) {
        o.detail << instances << " enumerated stumps match, hand stump ±2.0 / 0.11920 / 0.88080, log-loss "
                 << losses.front() << " -> " << losses.back() << " non-increasing";
    }
}

// ---- ensemble

Matrix binary_rows(std::initializer_list<double> p1) {
    Matrix m(0, 2);
    for (double p : p1) m.push_row(std::vector<double>{1.0 - p, p});
    return m;
}

void ensemble_dominance(Outcome& o) {
    const std::vector<std::string> ids = {"i0", "i1", "i2"};
    const LabelMap gold = {{"i0", 1}, {"i1", 0}, {"i2", 1}};
    const PredictionSet ab[] = {PredictionSet("A", ids, binary_rows({0.9, 0.2, 0.4})),
                                PredictionSet("B", ids, binary_rows({0.45, 0.4, 0.9}))};
    const auto w = fit_weights(ab, gold, 3);
    o.expect(w.members.size() == 2 && w.members[0].weight == 2.0 / 3.0 && w.members[1].weight == 1.0 / 3.0,
             "A/B fixture weights");

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    double worst_margin = 1.0;
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 10 + rng() % 40, k = 2 + rng() % 3, models = 1 + rng() % 6;
        std::vector<std::string> rids;
        std::vector<int> y;
        LabelMap g;
        for (std::size_t i = 0; i < n; ++i) {
            rids.push_back("x" + std::to_string(i));
            y.push_back(static_cast<int>(rng() % k));
            g[rids.back()] = y.back();
        }
        std::vector<PredictionSet> preds;
        for (std::size_t m = 0; m < models; ++m) {
            Matrix probs(n, k);
            const double skill = u(rng) * 2.0;
            for (std::size_t i = 0; i < n; ++i) {
                double sum = 0.0;
                for (std::size_t c = 0; c < k; ++c) {
                    probs(i, c) = u(rng) + (static_cast<int>(c) == y[i] ? skill * u(rng) : 0.0);
                    sum += probs(i, c);
                }
                for (std::size_t c = 0; c < k; ++c) probs(i, c) /= sum;
            }
            preds.emplace_back("m" + std::to_string(m), rids, std::move(probs));
        }
        const auto fit = fit_weights(preds, g);
        o.expect(fit_weights(preds, g) == fit, "bit-determinism");
        const double ens = accuracy(ensemble_predict(preds, fit), g);
        for (const auto& p : preds) worst_margin = std::min(worst_margin, ens - accuracy(p, g));
    }
    o.expect(worst_margin >= 0.0, "ensemble below a member");
    if (o.pass) o.detail << "A/B weights [2/3, 1/3], 50 random instances, min(ensemble - best member) = " << worst_margin;
}

// ---- metrics

LabelMap label_map(std::initializer_list<int> ys) {
    LabelMap m;
    int i = 0;
    for (int y : ys) m["e" + std::to_string(i++)] = y;
    return m;
}

void metrics_identities(Outcome& o) {
    const auto r = score(confusion(label_map({1, 1, 0, 1, 0}), label_map({1, 1, 1, 0, 0}), 2), Averaging::binary, 1);
    o.expect(r.precision == 2.0 / 3.0 && r.recall == 2.0 / 3.0, "hand fixture P/R");
    o.expect(std::abs(r.f1 - 2.0 / 3.0) < 1e-15, "hand fixture F1");
    o.expect(r.accuracy == 0.6, "hand fixture accuracy");

    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t k = 3 + rng() % 4, n = 1 + rng() % 200;
        LabelMap gold, pred;
        for (std::size_t i = 0; i < n; ++i) {
            const std::string id = "x" + std::to_string(i);
            gold[id] = static_cast<int>(rng() % k);
            pred[id] = rng() % 3 == 0 ? gold[id] : static_cast<int>(rng() % k);
        }
        const auto m = score(confusion(gold, pred, k), Averaging::weighted);
        worst = std::max(worst, std::abs(m.recall - m.accuracy));
    }
    o.expect(worst <= 1e-12, "weighted recall vs accuracy");
    if (o.pass) o.detail << "P=R=F1=2/3 acc=0.6, 100 multiclass fixtures max |recall - acc| = " << worst;
}

// ---- end to end

struct Splits {
    fs::path train, eval, test, embeddings, gazetteer;
};

Splits write_splits(const fs::path& dir, Task task, std::size_t train_per_class, std::size_t eval_per_class) {
    fs::create_directories(dir);
    const auto schema = TaskSchema::for_task(task);
    Splits s{dir / "train.jsonl", dir / "eval.jsonl", dir / "test.jsonl", dir / "embeddings.jsonl", dir / "gazetteer.json"};
    EmbeddingStore all(16);
    const std::tuple<std::uint64_t, fs::path, std::size_t> parts[] = {
        {11, s.train, train_per_class}, {12, s.eval, eval_per_class}, {13, s.test, eval_per_class}};
    for (const auto& [seed, path, per_class] : parts) {
        const std::vector<std::size_t> counts(schema.n_classes(), per_class);
        auto c = generate_synthetic(seed, schema, counts, 16);
        for (const auto& id : c.embeddings.ids()) all.add(id, c.embeddings.at(id));
        if (path == s.test) {
            for (auto& ex : c.dataset.examples) ex.label.reset();
        }
        write_dataset(path, c.dataset);
    }
    write_embeddings(s.embeddings, all);
    Gazetteer g;
    for (const auto& [label, phrases] : synthetic_entity_lexicon()) {
        for (const auto& p : phrases) g.add(*parse_entity_label(label), p);
    }
    write_file(s.gazetteer, gazetteer_to_json(g));
    return s;
}

bool same_bytes(const fs::path& a, const fs::path& b) { return read_file(a) == read_file(b); }

void end_to_end(Outcome& o) {
    const auto a = write_splits(g_work / "corpus_a", Task::A, 200, 60);
    const auto b = write_splits(g_work / "corpus_b", Task::B, 120, 40);

    std::vector<RunResult> ra, rb;
    for (const char* run : {"run1", "run2"}) {
        PipelineConfig ca(RunKind::subtask_a);
        ca.set("train", a.train.string());
        ca.set("eval", a.eval.string());
        ca.set("test", a.test.string());
        ca.set("out", (g_work / "a" / run).string());
        ra.push_back(run_subtask_a(ca));

        PipelineConfig cb(RunKind::subtask_b);
        cb.set("train", b.train.string());
        cb.set("eval", b.eval.string());
        cb.set("test", b.test.string());
        cb.set("embeddings", b.embeddings.string());
        cb.set("gazetteer", b.gazetteer.string());
        cb.set("out", (g_work / "b" / run).string());
        rb.push_back(run_subtask_b(cb));
    }
    for (const char* f : {"manifest.json", "final_eval.jsonl", "final_test.jsonl"}) {
        o.expect(same_bytes(g_work / "a" / "run1" / f, g_work / "a" / "run2" / f), std::string("run-a ") + f);
    }
    for (const char* f : {"manifest.json", "preds_eval.jsonl", "preds_test.jsonl"}) {
        o.expect(same_bytes(g_work / "b" / "run1" / f, g_work / "b" / "run2" / f), std::string("run-b ") + f);
    }
    for (const auto& m : ra[0].members) o.expect(ra[0].ensemble_accuracy >= m.eval_accuracy, "ensemble below " + m.model);
    o.expect(rb[0].selected_accuracy >= rb[0].embeddings_only_accuracy - 0.02, "fusion below embeddings-only - 0.02");
    if (o.pass) {
        double best_member = 0.0;
        for (const auto& m : ra[0].members) best_member = std::max(best_member, m.eval_accuracy);
        o.detail << "byte-identical reruns; run-a ensemble " << ra[0].ensemble_accuracy << " >= best member " << best_member
                 << "; run-b fusion " << rb[0].selected_accuracy << " vs embeddings-only " << rb[0].embeddings_only_accuracy;
    }
}

// ---- format round-trips

void round_trips(Outcome& o) {
    const fs::path dir = g_work / "roundtrip";
    fs::create_directories(dir);
    const auto schema = TaskSchema::for_task(Task::B);
    const std::vector<std::size_t> counts = {30, 30, 30};
    const auto c = generate_synthetic(5, schema, counts, 8);

    write_dataset(dir / "d.jsonl", c.dataset);
    const Dataset ds = load_dataset(dir / "d.jsonl", schema);
    o.expect(ds.examples == c.dataset.examples && dataset_to_jsonl(ds) == dataset_to_jsonl(c.dataset), "dataset");

    const auto vocab = fit_vocab(c.dataset.texts());
    save_vocab(dir / "v.json", vocab);
    const auto vocab2 = load_vocab(dir / "v.json");
    o.expect(vocab2 == vocab && bow_table(ds, vocab2).values == bow_table(ds, vocab).values, "vocab");

    write_embeddings(dir / "e.jsonl", c.embeddings);
    const auto emb = load_embeddings(dir / "e.jsonl");
    bool emb_same = emb.ids() == c.embeddings.ids() && emb.dim() == c.embeddings.dim();
    for (const auto& id : emb.ids()) {
        const auto x = emb.at(id), y = c.embeddings.at(id);
        emb_same = emb_same && std::equal(x.begin(), x.end(), y.begin(), y.end());
    }
    o.expect(emb_same && embeddings_to_jsonl(emb) == embeddings_to_jsonl(c.embeddings), "embeddings");

    const FeatureTable parts[] = {syntactic_table(ds), bow_table(ds, vocab)};
    const auto X = hconcat(parts);
    const auto model = train_gbdt(X.values, ds.labels(), GbdtConfig::preset("light"), 3, X.columns);
    save_model(dir / "m.json", model);
    const auto model2 = load_model(dir / "m.json");
    o.expect(model2 == model && predict_proba(model2, X.values) == predict_proba(model, X.values), "model");

    const PredictionSet p1("light", ds.ids(), predict_proba(model, X.values));
    const PredictionSet p2("uniform", ds.ids(), Matrix(ds.size(), 3, 1.0 / 3.0));
    write_predictions(dir / "p.jsonl", p1);
    const auto p1b = load_predictions(dir / "p.jsonl", "light");
    o.expect(p1b == p1 && predictions_to_jsonl(p1b) == predictions_to_jsonl(p1), "predictions");

    const PredictionSet members[] = {p1, p2};
    const auto w = fit_weights(members, ds.gold());
    save_weights(dir / "w.json", w);
    const auto w2 = load_weights(dir / "w.json");
    o.expect(w2 == w && ensemble_predict(members, w2).probs() == ensemble_predict(members, w).probs(), "weights");
    if (o.pass) o.detail << "dataset, vocab, model, weights, embeddings, predictions reload bit-identically";
}

}  // namespace

int main(int argc, char** argv) {
    g_work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "hsd_acceptance";
    fs::remove_all(g_work);
    fs::create_directories(g_work);

    const Criterion criteria[] = {
        {"syntactic-oracle", 5.0, syntactic_oracle},
        {"worked-example", 1.0, worked_example},
        {"gbdt-oracle", 30.0, gbdt_oracle},
        {"ensemble-dominance", 10.0, ensemble_dominance},
        {"metrics-identities", 0.0, metrics_identities},
        {"end-to-end", 120.0, end_to_end},
        {"format-round-trips", 0.0, round_trips},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.expect(false, std::string("exception: ") + e.what());
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit_s > 0 && s >= c.limit_s) {
            o.pass = false;
            o.detail << " [over time limit]";
        }
        failures += !o.pass;
        char timing[64];
        if (c.limit_s > 0) {
            std::snprintf(timing, sizeof timing, "%.2fs < %.0fs", s, c.limit_s);
        } else {
            std::snprintf(timing, sizeof timing, "%.2fs", s);
        }
        std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << " (" << timing << "): " << o.detail.str() << std::endl;
    }
    std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
    return failures == 0 ? 0 : 1;
}
