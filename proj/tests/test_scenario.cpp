// SPDX-License-Identifier: Apache-2.0
#include "famlens/dialogue.hpp"
#include "famlens/error.hpp"
#include "famlens/fsio.hpp"
#include "famlens/scenario.hpp"

#include <doctest.h>

#include "helpers.hpp"

using namespace famlens;

TEST_CASE("dialogue CSV round-trips exactly") {
    Dialogue d = test::make_dialogue(10, "s01");
    d.turns[2].narrator_note = "holds back a complaint, with a \"quoted\" phrase";
    d.turns[5].narrator_note = "multi\nline note";
    const std::string bytes = serialize_dialogue_csv(d);
    const Dialogue back = parse_dialogue_csv(bytes, "s01");
    CHECK(back == d);
    CHECK(serialize_dialogue_csv(back) == bytes);
}

TEST_CASE("dialogue validation enforces alternation and indexing") {
    Dialogue d = test::make_dialogue(4);
    SUBCASE("valid") { CHECK_NOTHROW(validate_dialogue(d)); }
    SUBCASE("broken alternation") {
        d.turns[1].speaker = Speaker::parent;
        CHECK_THROWS_AS(validate_dialogue(d), Error);
    }
    SUBCASE("non-consecutive indices") {
        d.turns[3].index = 9;
        CHECK_THROWS_AS(validate_dialogue(d), Error);
    }
    SUBCASE("indices must start at 1") {
        for (auto& t : d.turns) {
            ++t.index;
        }
        CHECK_THROWS_AS(validate_dialogue(d), Error);
    }
    SUBCASE("empty content") {
        d.turns[0].content.clear();
        CHECK_THROWS_AS(validate_dialogue(d), Error);
    }
    SUBCASE("empty narrator note") {
        d.turns[0].narrator_note = "";
        CHECK_THROWS_AS(validate_dialogue(d), Error);
    }
    SUBCASE("a child may start") {
        for (auto& t : d.turns) {
            t.speaker = other(t.speaker);
        }
        CHECK_NOTHROW(validate_dialogue(d));
    }
}

TEST_CASE("dialogue CSV parser reports the offending line") {
    const std::string bytes = "index,speaker,content,narrator_note\n"
                              "1,parent,hello,\n"
                              "zero,child,hi,\n";
    CHECK_THROWS_WITH_AS(parse_dialogue_csv(bytes, "x"),
                         doctest::Contains("line 3"), Error);
    CHECK_THROWS_AS(parse_dialogue_csv("index,speaker,content,narrator_note\n1,robot,hi,\n", "x"),
                    Error);
}

TEST_CASE("dialogue CSV parser rejects a wrong header") {
    CHECK_THROWS_AS(parse_dialogue_csv("a,b,c,d\n1,parent,x,\n", "x"), Error);
}

TEST_CASE("scenario metadata round-trips") {
    const std::string bytes = read_text_file(test::metas_dir() / "s01.meta");
    const ScenarioMetadata meta = load_scenario_metadata(bytes);
    CHECK(meta.scenario_id == "s01");
    CHECK(meta.child_persona.age == 9);
    CHECK(meta.parent_persona.gender == Gender::male);
    CHECK(meta.suppression.present);
    CHECK(*meta.suppression.category == SuppressionCategory::anxiety);
    const ScenarioMetadata back = load_scenario_metadata(serialize_scenario_metadata(meta));
    CHECK(back == meta);
}

TEST_CASE("scenario metadata validation") {
    ScenarioMetadata m = load_scenario_metadata(read_text_file(test::metas_dir() / "s01.meta"));
    SUBCASE("bias strength above range") {
        m.bias.strength = 6;
        CHECK_THROWS_AS(validate_scenario_metadata(m), Error);
    }
    SUBCASE("bias strength below range") {
        m.bias.strength = 0;
        CHECK_THROWS_AS(validate_scenario_metadata(m), Error);
    }
    SUBCASE("child age must be positive") {
        m.child_persona.age = 0;
        CHECK_THROWS_AS(validate_scenario_metadata(m), Error);
    }
    SUBCASE("suppression present needs category and strength") {
        m.suppression.category.reset();
        CHECK_THROWS_AS(validate_scenario_metadata(m), Error);
    }
    SUBCASE("suppression absent must not carry a category") {
        m.suppression.present = false;
        CHECK_THROWS_AS(validate_scenario_metadata(m), Error);
    }
    SUBCASE("topic other requires text") {
        m.topic.kind = Topic::Kind::other;
        m.topic.other_text.clear();
        CHECK_THROWS_AS(validate_scenario_metadata(m), Error);
    }
}

TEST_CASE("every shipped scenario meta loads") {
    int count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(test::metas_dir())) {
        if (entry.path().extension() != ".meta") {
            continue;
        }
        const ScenarioMetadata meta = load_scenario_metadata(read_text_file(entry.path()));
        CHECK(meta.scenario_id == entry.path().stem().string());
        CHECK(meta.suppression.present);
        ++count;
    }
    CHECK(count == 30);
}

TEST_CASE("suppression category order is canonical") {
    CHECK(to_string(kSuppressionCategories[0]) == "anxiety");
    CHECK(to_string(kSuppressionCategories[1]) == "emotional");
    CHECK(to_string(kSuppressionCategories[2]) == "fear");
    CHECK(to_string(kSuppressionCategories[3]) == "social");
    CHECK(to_string(kSuppressionCategories[4]) == "behavioral");
    CHECK(to_string(kSuppressionCategories[5]) == "self_esteem");
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(suppression_category_index(kSuppressionCategories[i]) == i);
        CHECK(parse_suppression_category(to_string(kSuppressionCategories[i])) ==
              kSuppressionCategories[i]);
    }
    CHECK_THROWS_AS(parse_suppression_category("sadness"), Error);
}

TEST_CASE("bias category prompt block carries the example expressions") {
    const std::string block = bias_category_prompt_block();
    CHECK(block.find("Why can't you be like your sibling?") != std::string::npos);
    for (const auto& info : bias_category_table()) {
        CHECK(block.find(info.display_name) != std::string::npos);
    }
}

TEST_CASE("situation reports serialize and parse") {
    const SituationReport child = test::make_child_report();
    const SituationReport adult = test::make_adult_report();
    CHECK(parse_report_json(serialize_report_json(child)) == child);
    CHECK(parse_report_json(serialize_report_json(adult)) == adult);
}

TEST_CASE("report rendering excludes the scenario id") {
    SituationReport a = test::make_child_report("one");
    SituationReport b = test::make_child_report("two");
    CHECK(render_report_text(a) == render_report_text(b));
}

TEST_CASE("report validation rejects out-of-range detection values") {
    SUBCASE("suppression intensity") {
        SuppressionReport r = test::make_suppression_report();
        r.s = 6;
        CHECK_THROWS_AS(validate_report(r), Error);
        r.s = 0;
        CHECK_THROWS_AS(validate_report(r), Error);
    }
    SUBCASE("suppression confidence") {
        SuppressionReport r = test::make_suppression_report();
        r.c = 1.3;
        CHECK_THROWS_AS(validate_report(r), Error);
        r.c = -0.1;
        CHECK_THROWS_AS(validate_report(r), Error);
    }
    SUBCASE("attribute age") {
        AttributeReport r = test::make_attribute_report();
        r.age = 0;
        CHECK_THROWS_AS(validate_report(r), Error);
    }
    SUBCASE("bias confidence") {
        BiasReport r = test::make_bias_report();
        r.c = 2.0;
        CHECK_THROWS_AS(validate_report(r), Error);
    }
}
