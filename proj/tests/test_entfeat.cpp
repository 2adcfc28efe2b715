#include "hsd/corpus.hpp"
#include "hsd/entfeat.hpp"
#include "hsd/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace hsd;

namespace {

Gazetteer fixture_gazetteer() {
    Gazetteer g;
    g.add(EntityLabel::PER, "putin");
    g.add(EntityLabel::PER, "adolf");
    g.add(EntityLabel::NORP, "russian");
    g.add(EntityLabel::ORG, "nato");
    return g;
}

EntityCountVector counts(std::string_view text, const Gazetteer& g) {
    const auto spans = gazetteer_recognize(text, g);
    return count_entities(spans);
}

EntitySpan span(EntityLabel l, std::int64_t s, std::int64_t e) { return {"x", l, s, e, ""}; }

}  // namespace

TEST_CASE("worked sentence yields [2,1,0]") {
    const auto g = fixture_gazetteer();
    CHECK(counts("STOP RUSSIAN AGRESSOR ADOLF PUTIN HANDS OFF UKRAINE", g) == EntityCountVector{2, 1, 0});
    CHECK(counts("stop russian agressor adolf putin hands off ukraine", g) == EntityCountVector{2, 1, 0});
    const auto spans = gazetteer_recognize("STOP RUSSIAN AGRESSOR ADOLF PUTIN HANDS OFF UKRAINE", g, "ex");
    REQUIRE(spans.size() == 3);
    CHECK(spans[0] == EntitySpan{"ex", EntityLabel::NORP, 1, 2, "russian"});
    CHECK(spans[1] == EntitySpan{"ex", EntityLabel::PER, 3, 4, "adolf"});
    CHECK(spans[2] == EntitySpan{"ex", EntityLabel::PER, 4, 5, "putin"});
}

TEST_CASE("recognizer cases") {
    const auto g = fixture_gazetteer();
    CHECK(counts("nato nato", g) == EntityCountVector{0, 0, 2});
    CHECK(gazetteer_recognize("", g).empty());
}

TEST_CASE("count_entities") {
    CHECK(count_entities({}) == EntityCountVector{});
    const std::vector<EntitySpan> s = {span(EntityLabel::PER, 0, 1), span(EntityLabel::ORG, 1, 2),
                                       span(EntityLabel::ORG, 1, 3), span(EntityLabel::ORG, 5, 6)};
    CHECK(count_entities(s) == EntityCountVector{1, 0, 3});
    auto p = s;
    std::mt19937_64 rng(1);
    for (int i = 0; i < 10; ++i) {
        std::shuffle(p.begin(), p.end(), rng);
        CHECK(count_entities(p) == count_entities(s));
    }
}

TEST_CASE("longest match and label priority") {
    Gazetteer g;
    g.add(EntityLabel::ORG, "red cross");
    g.add(EntityLabel::NORP, "red");
    g.add(EntityLabel::ORG, "united nations");
    g.add(EntityLabel::PER, "United");
    g.add(EntityLabel::NORP, "united");
    auto s = gazetteer_recognize("the Red Cross and united nations united", g);
    REQUIRE(s.size() == 3);
    CHECK(s[0].label == EntityLabel::ORG);
    CHECK(s[0].surface == "red cross");
    CHECK(s[1].label == EntityLabel::ORG);
    CHECK(s[2].label == EntityLabel::PER);
    CHECK(s[2].start_token == 6);
}

TEST_CASE("gazetteer invariants") {
    Gazetteer g;
    g.add(EntityLabel::PER, "a b");
    CHECK_THROWS_AS(g.add(EntityLabel::PER, "A  B"), DataError);
    CHECK_NOTHROW(g.add(EntityLabel::ORG, "a b"));
    CHECK_THROWS_AS(g.add(EntityLabel::PER, "  "), DataError);
    CHECK(g.longest_phrase() == 2);
    const auto back = parse_gazetteer(gazetteer_to_json(g));
    CHECK(back.phrases(EntityLabel::PER) == g.phrases(EntityLabel::PER));
    CHECK(back.phrases(EntityLabel::ORG) == g.phrases(EntityLabel::ORG));
    CHECK_THROWS_AS(parse_gazetteer("{\"PER\":[\"x\",\"x\"]}"), DataError);
    CHECK_THROWS_AS(parse_gazetteer("[1]"), DataError);
}

TEST_CASE("recognizer properties on random texts") {
    Gazetteer g;
    for (const auto& [label, phrases] : synthetic_entity_lexicon()) {
        for (const auto& p : phrases) g.add(*parse_entity_label(label), p);
    }
    static const char* words[] = {"putin", "nato", "red", "cross", "united", "nations", "stop", "war", "russian"};
    std::mt19937_64 rng(9);
    auto text = [&] {
        std::string s;
        for (int i = 0, n = static_cast<int>(rng() % 12); i < n; ++i) s += std::string(words[rng() % std::size(words)]) + " ";
        return s;
    };
    for (int rep = 0; rep < 500; ++rep) {
        const std::string a = text(), b = text();
        const auto spans = gazetteer_recognize(a, g);
        for (std::size_t i = 0; i < spans.size(); ++i) {
            REQUIRE(spans[i].start_token < spans[i].end_token);
            if (i > 0) REQUIRE(spans[i - 1].end_token <= spans[i].start_token);
        }
        const auto ca = counts(a, g), cb = counts(b, g), cab = counts(a + " | " + b, g);
        REQUIRE(cab == EntityCountVector{ca.per + cb.per, ca.norp + cb.norp, ca.org + cb.org});
    }
}

TEST_CASE("annotations") {
    const auto m = parse_annotations(
        "{\"example_id\":\"e1\",\"label\":\"PER\",\"start_token\":0,\"end_token\":1,\"surface\":\"putin\"}\n"
        "{\"example_id\":\"e1\",\"label\":\"LOC\",\"start_token\":2,\"end_token\":3,\"surface\":\"kyiv\"}\n"
        "{\"example_id\":\"e2\",\"label\":\"GPE\",\"start_token\":0,\"end_token\":1,\"surface\":\"kyiv\"}\n");
    REQUIRE(m.size() == 1);
    CHECK(m.at("e1").size() == 1);
    CHECK(parse_annotations("").empty());
    CHECK_THROWS_AS(
        parse_annotations("{\"example_id\":\"e\",\"label\":\"PER\",\"start_token\":-1,\"end_token\":1,\"surface\":\"\"}\n"),
        DataError);
    CHECK_THROWS_AS(
        parse_annotations("{\"example_id\":\"e\",\"label\":\"PER\",\"start_token\":2,\"end_token\":2,\"surface\":\"\"}\n"),
        DataError);
    CHECK_THROWS_AS(parse_annotations("{\"example_id\":\"e\"\n"), DataError);
}

TEST_CASE("entity tables") {
    Dataset ds;
    ds.schema = TaskSchema::for_task(Task::B);
    ds.examples = {{"w", "STOP RUSSIAN AGRESSOR ADOLF PUTIN HANDS OFF UKRAINE", std::nullopt, std::nullopt},
                   {"z", "nothing here", std::nullopt, std::nullopt}};
    const auto t = entity_table(ds, fixture_gazetteer());
    CHECK(t.columns == std::vector<std::string>{"per", "norp", "org"});
    CHECK(t.values(0, 0) == 2);
    CHECK(t.values(0, 1) == 1);
    CHECK(t.values(0, 2) == 0);
    CHECK(t.values(1, 0) == 0);

    AnnotationMap ann;
    ann["z"] = {EntitySpan{"z", EntityLabel::ORG, 0, 1, "nothing"}};
    const auto u = entity_table(ds, ann);
    CHECK(u.values(0, 0) == 0);
    CHECK(u.values(1, 2) == 1);
}
