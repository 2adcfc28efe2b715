#include "hsd/corpus.hpp"

#include "hsd/error.hpp"
#include "hsd/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>
#include <unordered_set>

namespace hsd {

Task parse_task(std::string_view s) {
    if (s == "a" || s == "A") return Task::A;
    if (s == "b" || s == "B") return Task::B;
    throw ConfigError("unknown task '" + std::string(s) + "' (expected a or b)");
}

std::string_view task_name(Task task) { return task == Task::A ? "a" : "b"; }

TaskSchema TaskSchema::for_task(Task task) {
    if (task == Task::A) return {Task::A, {"No Hate Speech", "Hate Speech"}, 1};
    return {Task::B, {"Individual", "Community", "Organization"}, std::nullopt};
}

int TaskSchema::class_id(std::string_view name) const {
    for (std::size_t i = 0; i < class_names.size(); ++i) {
        if (class_names[i] == name) return static_cast<int>(i);
    }
    throw DataError("unknown class name '" + std::string(name) + "' for task " + std::string(task_name(task)));
}

std::vector<std::string> Dataset::ids() const {
    std::vector<std::string> out;
    out.reserve(examples.size());
    for (const auto& e : examples) out.push_back(e.id);
    return out;
}

std::vector<std::string> Dataset::texts() const {
    std::vector<std::string> out;
    out.reserve(examples.size());
    for (const auto& e : examples) out.push_back(e.text);
    return out;
}

std::vector<int> Dataset::labels() const {
    std::vector<int> out;
    out.reserve(examples.size());
    for (const auto& e : examples) {
        if (!e.label) throw DataError("example '" + e.id + "' has no label");
        out.push_back(*e.label);
    }
    return out;
}

LabelMap Dataset::gold() const {
    LabelMap out;
    for (const auto& e : examples) {
        if (!e.label) throw DataError("example '" + e.id + "' has no label");
        out.emplace(e.id, *e.label);
    }
    return out;
}

namespace {

std::optional<std::string> optional_string(const nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw DataError(std::string("'") + key + "' must be a string or null");
    return it->get<std::string>();
}

}  // namespace

Dataset parse_dataset(std::string_view content, const TaskSchema& schema, Split split) {
    Dataset ds{schema, {}, split};
    std::unordered_set<std::string> seen;
    const auto lines = split_lines(content);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        if (lines[n].empty()) continue;
        try {
            const auto j = nlohmann::json::parse(lines[n]);
            if (!j.is_object()) throw DataError("record must be a JSON object");
            Example ex;
            const auto& id = j.at("id");
            if (!id.is_string() || id.get_ref<const std::string&>().empty()) throw DataError("'id' must be a nonempty string");
            ex.id = id.get<std::string>();
            const auto& text = j.at("text");
            if (!text.is_string()) throw DataError("'text' must be a string");
            ex.text = text.get<std::string>();
            if (auto label = optional_string(j, "label")) ex.label = schema.class_id(*label);
            ex.embedding_id = optional_string(j, "embedding_id");
            if (!seen.insert(ex.id).second) throw DataError("duplicate id '" + ex.id + "'");
            ds.examples.push_back(std::move(ex));
        } catch (const nlohmann::json::exception& e) {
            throw DataError("line " + std::to_string(n + 1) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError("line " + std::to_string(n + 1) + ": " + e.what());
        }
    }
    return ds;
}

Dataset load_dataset(const std::filesystem::path& path, const TaskSchema& schema, Split split) {
    try {
        return parse_dataset(read_file(path), schema, split);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

std::string dataset_to_jsonl(const Dataset& dataset) {
    std::string out;
    auto quoted = [](const std::string& s) { return nlohmann::json(s).dump(); };
    for (const auto& ex : dataset.examples) {
        out += "{\"id\":" + quoted(ex.id);
        out += ",\"text\":" + quoted(ex.text);
        out += ",\"label\":";
        out += ex.label ? quoted(dataset.schema.class_names.at(static_cast<std::size_t>(*ex.label))) : "null";
        out += ",\"embedding_id\":";
        out += ex.embedding_id ? quoted(*ex.embedding_id) : "null";
        out += "}\n";
    }
    return out;
}

void write_dataset(const std::filesystem::path& path, const Dataset& dataset) {
    write_file(path, dataset_to_jsonl(dataset));
}

// ---------------------------------------------------------------------------
// Synthetic corpus

namespace {

// std:: distributions are implementation-defined; only the engine is not.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    bool bernoulli(double p) { return uniform() < p; }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

    double normal() {
        if (spare_) {
            const double v = *spare_;
            spare_.reset();
            return v;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

    template <class T>
    const T& pick(const std::vector<T>& v) {
        return v[below(v.size())];
    }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

using Pool = std::vector<std::string>;

const Pool kSharedA = {"STOP", "THE", "WAR", "NOW", "WE", "ARE", "ALL", "PEOPLE", "UKRAINE", "RUSSIA",
                       "WORLD", "TODAY", "THIS", "IS", "OUR", "FIGHT", "FOR", "NO", "MORE", "TIME"};
const std::vector<Pool> kClassPoolsA = {
    {"PEACE", "SUPPORT", "HELP", "HOPE", "FREEDOM", "LOVE", "SOLIDARITY", "UNITY", "PRAY", "STAND", "TOGETHER", "CARE"},
    {"KILL", "DESTROY", "SCUM", "TRAITORS", "INVADERS", "ANIMALS", "DIE", "BURN", "FILTH", "VERMIN", "ENEMY", "HATE"},
};

const Pool kSharedB = {"STOP", "DOWN", "WITH", "SHAME", "ON", "LIARS", "OUT", "NO", "MORE", "WAR", "ENOUGH", "BLOOD", "HANDS", "OFF"};
const std::vector<Pool> kClassPoolsB = {
    {"HIM", "HE", "MAN", "DICTATOR", "CRIMINAL"},
    {"THEY", "PEOPLE", "NATION", "THEM", "FOLK"},
    {"REGIME", "GOVERNMENT", "ALLIANCE", "MILITARY", "ARMY"},
};

std::string apply_case(const std::string& token, Rng& rng, double upper_rate) {
    if (rng.bernoulli(upper_rate)) return token;
    std::string out = token;
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (rng.bernoulli(0.5) && !out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out;
}

std::string uppercase(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

std::string text_task_a(int cls, Rng& rng) {
    const auto& own = kClassPoolsA[static_cast<std::size_t>(cls)];
    const auto& other = kClassPoolsA[static_cast<std::size_t>(1 - cls)];
    const double upper_rate = cls == 1 ? 0.85 : 0.6;
    const double bang_rate = cls == 1 ? 0.25 : 0.06;
    const std::size_t length = 5 + rng.below(6);
    std::vector<std::string> tokens;
    for (std::size_t i = 0; i < length; ++i) {
        const double u = rng.uniform();
        std::string tok = u < 0.45 ? rng.pick(own) : u < 0.55 ? rng.pick(other) : rng.pick(kSharedA);
        tok = apply_case(tok, rng, upper_rate);
        if (rng.bernoulli(bang_rate)) tok += "!";
        if (cls == 0 && rng.bernoulli(0.05)) tok = "#" + tok;
        tokens.push_back(std::move(tok));
    }
    return join(tokens);
}

std::string text_task_b(int cls, Rng& rng) {
    const auto& lexicon = synthetic_entity_lexicon();
    const std::size_t length = 4 + rng.below(5);
    std::vector<std::string> tokens;
    for (std::size_t i = 0; i < length; ++i) {
        const auto& pool = rng.bernoulli(0.2) ? kClassPoolsB[static_cast<std::size_t>(cls)] : kSharedB;
        tokens.push_back(apply_case(rng.pick(pool), rng, 0.8));
    }
    auto insert = [&](std::size_t type) {
        const std::string name = uppercase(rng.pick(lexicon[type].second));
        tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(rng.below(tokens.size() + 1)), name);
    };
    for (std::size_t type = 0; type < lexicon.size(); ++type) {
        const double rate = type == static_cast<std::size_t>(cls) ? kSyntheticEntityRate : 0.15;
        if (rng.bernoulli(rate)) {
            insert(type);
            if (type == static_cast<std::size_t>(cls) && rng.bernoulli(0.3)) insert(type);
        }
    }
    return join(tokens);
}

}  // namespace

const std::vector<std::pair<std::string, std::vector<std::string>>>& synthetic_entity_lexicon() {
    static const std::vector<std::pair<std::string, std::vector<std::string>>> lexicon = {
        {"PER", {"putin", "adolf", "zelensky", "biden", "lavrov", "shoigu", "medvedev", "trump"}},
        {"NORP", {"russian", "ukrainian", "american", "chechen", "belarusian", "european", "orthodox", "muslim"}},
        {"ORG", {"nato", "kremlin", "wagner", "gazprom", "pentagon", "duma", "united nations", "red cross"}},
    };
    return lexicon;
}

SyntheticCorpus generate_synthetic(std::uint64_t seed, const TaskSchema& schema, std::span<const std::size_t> counts,
                                   std::size_t embed_dim) {
    if (counts.size() != schema.n_classes()) {
        throw ConfigError("expected " + std::to_string(schema.n_classes()) + " class counts, got " +
                          std::to_string(counts.size()));
    }
    if (std::any_of(counts.begin(), counts.end(), [](std::size_t c) { return c == 0; })) {
        throw ConfigError("class counts must be positive");
    }
    if (embed_dim < 2) throw ConfigError("embed_dim must be at least 2");

    Rng rng(seed);
    std::vector<int> labels;
    for (std::size_t c = 0; c < counts.size(); ++c) labels.insert(labels.end(), counts[c], static_cast<int>(c));
    for (std::size_t i = labels.size(); i > 1; --i) std::swap(labels[i - 1], labels[rng.below(i)]);

    const std::size_t k = schema.n_classes();
    const double noise = schema.task == Task::A ? 1.0 : 1.2;

    SyntheticCorpus out{Dataset{schema, {}, Split::train}, EmbeddingStore(embed_dim)};
    std::vector<double> vec(embed_dim);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int cls = labels[i];
        char suffix[32];
        std::snprintf(suffix, sizeof suffix, "-%05zu", i);
        Example ex;
        ex.id = "s" + std::to_string(seed) + suffix;
        ex.embedding_id = "e" + std::to_string(seed) + suffix;
        ex.label = cls;
        ex.text = schema.task == Task::A ? text_task_a(cls, rng) : text_task_b(cls, rng);
        for (std::size_t d = 0; d < embed_dim; ++d) {
            const double mean = d % k == static_cast<std::size_t>(cls) ? 1.0 : 0.0;
            vec[d] = mean + noise * rng.normal();
        }
        out.embeddings.add(*ex.embedding_id, vec);
        out.dataset.examples.push_back(std::move(ex));
    }
    return out;
}

}  // namespace hsd
