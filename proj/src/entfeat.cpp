#include "hsd/entfeat.hpp"

#include "hsd/bow.hpp"
#include "hsd/corpus.hpp"
#include "hsd/error.hpp"

#include <json.hpp>

#include <algorithm>

namespace hsd {

std::string_view entity_label_name(EntityLabel label) {
    switch (label) {
        case EntityLabel::PER: return "PER";
        case EntityLabel::NORP: return "NORP";
        case EntityLabel::ORG: return "ORG";
    }
    return "?";
}

std::optional<EntityLabel> parse_entity_label(std::string_view name) {
    for (EntityLabel l : kEntityLabels) {
        if (entity_label_name(l) == name) return l;
    }
    return std::nullopt;
}

EntityCountVector count_entities(std::span<const EntitySpan> spans) {
    EntityCountVector c;
    for (const auto& s : spans) {
        switch (s.label) {
            case EntityLabel::PER: ++c.per; break;
            case EntityLabel::NORP: ++c.norp; break;
            case EntityLabel::ORG: ++c.org; break;
        }
    }
    return c;
}

namespace {

std::string join_tokens(std::span<const std::string> tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

}  // namespace

void Gazetteer::add(EntityLabel label, std::string_view phrase) {
    const auto tokens = tokenize(phrase);
    if (tokens.empty()) throw DataError("gazetteer: empty phrase under " + std::string(entity_label_name(label)));
    std::string key = join_tokens(tokens);
    const auto slot = static_cast<std::size_t>(label);
    if (!index_[slot].emplace(key, phrases_[slot].size()).second) {
        throw DataError("gazetteer: duplicate phrase '" + key + "' under " + std::string(entity_label_name(label)));
    }
    phrases_[slot].push_back(std::move(key));
    longest_ = std::max(longest_, tokens.size());
}

std::optional<EntityLabel> Gazetteer::lookup(std::string_view joined_tokens) const {
    const std::string key(joined_tokens);
    for (EntityLabel l : kEntityLabels) {
        if (index_[static_cast<std::size_t>(l)].contains(key)) return l;
    }
    return std::nullopt;
}

Gazetteer parse_gazetteer(std::string_view content) {
    try {
        const auto j = nlohmann::json::parse(content);
        if (!j.is_object()) throw DataError("gazetteer must be a JSON object");
        Gazetteer gaz;
        for (const auto& [key, phrases] : j.items()) {
            const auto label = parse_entity_label(key);
            if (!label) throw DataError("gazetteer: unknown label '" + key + "'");
            for (const auto& p : phrases) gaz.add(*label, p.get<std::string>());
        }
        return gaz;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("gazetteer: ") + e.what());
    }
}

Gazetteer load_gazetteer(const std::filesystem::path& path) {
    try {
        return parse_gazetteer(read_file(path));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

std::string gazetteer_to_json(const Gazetteer& gaz) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (EntityLabel l : kEntityLabels) j[std::string(entity_label_name(l))] = gaz.phrases(l);
    return j.dump(2) + "\n";
}

std::vector<EntitySpan> gazetteer_recognize(std::string_view text, const Gazetteer& gaz, std::string_view example_id) {
    const auto tokens = tokenize(text);
    std::vector<EntitySpan> spans;
    std::size_t i = 0;
    while (i < tokens.size()) {
        std::size_t matched = 0;
        const std::size_t max_len = std::min(gaz.longest_phrase(), tokens.size() - i);
        for (std::size_t len = max_len; len >= 1; --len) {
            std::string key = join_tokens(std::span(tokens).subspan(i, len));
            if (auto label = gaz.lookup(key)) {
                spans.push_back({std::string(example_id), *label, static_cast<std::int64_t>(i),
                                 static_cast<std::int64_t>(i + len), std::move(key)});
                matched = len;
                break;
            }
        }
        i += matched ? matched : 1;
    }
    return spans;
}

AnnotationMap parse_annotations(std::string_view content) {
    AnnotationMap out;
    const auto lines = split_lines(content);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        if (lines[n].empty()) continue;
        try {
            const auto j = nlohmann::json::parse(lines[n]);
            EntitySpan span;
            span.example_id = j.at("example_id").get<std::string>();
            span.start_token = j.at("start_token").get<std::int64_t>();
            span.end_token = j.at("end_token").get<std::int64_t>();
            span.surface = j.value("surface", std::string());
            if (span.start_token < 0 || span.end_token < 0) throw DataError("negative token offset");
            if (span.start_token >= span.end_token) throw DataError("start_token must be < end_token");
            const auto label = parse_entity_label(j.at("label").get<std::string>());
            if (!label) continue;
            span.label = *label;
            out[span.example_id].push_back(std::move(span));
        } catch (const nlohmann::json::exception& e) {
            throw DataError("annotation line " + std::to_string(n + 1) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError("annotation line " + std::to_string(n + 1) + ": " + e.what());
        }
    }
    return out;
}

AnnotationMap load_annotations(const std::filesystem::path& path) {
    try {
        return parse_annotations(read_file(path));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

namespace {

FeatureTable empty_entity_table(const Dataset& dataset) {
    FeatureTable t;
    t.columns = {"per", "norp", "org"};
    t.ids = dataset.ids();
    t.values = Matrix(dataset.size(), 3);
    return t;
}

void set_counts(FeatureTable& t, std::size_t row, const EntityCountVector& c) {
    const auto f = c.as_features();
    std::copy(f.begin(), f.end(), t.values.row(row).begin());
}

}  // namespace

FeatureTable entity_table(const Dataset& dataset, const AnnotationMap& annotations) {
    FeatureTable t = empty_entity_table(dataset);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        auto it = annotations.find(dataset.examples[i].id);
        if (it != annotations.end()) set_counts(t, i, count_entities(it->second));
    }
    return t;
}

FeatureTable entity_table(const Dataset& dataset, const Gazetteer& gaz) {
    FeatureTable t = empty_entity_table(dataset);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto& ex = dataset.examples[i];
        set_counts(t, i, count_entities(gazetteer_recognize(ex.text, gaz, ex.id)));
    }
    return t;
}

}  // namespace hsd
