// SPDX-License-Identifier: Apache-2.0
#include "famlens/detection.hpp"
#include "famlens/error.hpp"
#include "famlens/scripted.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <atomic>
#include <mutex>

using namespace famlens;
using famlens::test::make_dialogue;

namespace {

PromptLibrary load_prompts() { return PromptLibrary(famlens::test::prompts_en_dir()); }

} // namespace

TEST_CASE("detect_suppression parses the scripted reply") {
    const PromptLibrary prompts = load_prompts();
    ScriptedChatProvider chat = ScriptedChatProvider::from_map(
        {{"detect_suppression",
          R"({"s": 4, "suppression_type": "anxiety", "reason": "hides worry", "c": 0.85})"}});
    const AgentContext ctx{chat, prompts};

    const SuppressionReport report = detect_suppression(ctx, make_dialogue(4));
    CHECK(report.s == 4);
    CHECK(report.suppression_type == SuppressionCategory::anxiety);
    CHECK(report.reason == "hides worry");
    CHECK(report.c == doctest::Approx(0.85));
}

TEST_CASE("detect_suppression tolerates prose around the JSON object") {
    const PromptLibrary prompts = load_prompts();
    ScriptedChatProvider chat = ScriptedChatProvider::from_map(
        {{"detect_suppression", "Here is my assessment:\n```json\n"
                                R"({"s": 2, "suppression_type": "fear", "reason": "r", "c": 0.5})"
                                "\n```"}});
    const AgentContext ctx{chat, prompts};
    const SuppressionReport report = detect_suppression(ctx, make_dialogue(4));
    CHECK(report.s == 2);
    CHECK(report.suppression_type == SuppressionCategory::fear);
}

TEST_CASE("detection repairs once then succeeds") {
    const PromptLibrary prompts = load_prompts();
    std::atomic<int> calls{0};
    std::vector<std::string> corrections;
    std::mutex mu;
    CallbackChatProvider chat([&](const ChatRequest& req) {
        const int n = ++calls;
        if (n == 1) {
            return std::string(R"({"s": 7, "suppression_type": "anxiety", "reason": "r", "c": 0.5})");
        }
        std::lock_guard<std::mutex> lock(mu);
        corrections.push_back(req.messages.back().content);
        return std::string(R"({"s": 5, "suppression_type": "anxiety", "reason": "r", "c": 0.5})");
    });
    const AgentContext ctx{chat, prompts};

    const SuppressionReport report = detect_suppression(ctx, make_dialogue(4));
    CHECK(report.s == 5);
    CHECK(calls.load() == 2);
    REQUIRE(corrections.size() == 1);
    CHECK(corrections[0] ==
          "Your previous reply was invalid: field 's' must lie in [1,5]. "
          "Reply again with only the corrected JSON object and no other text.");
}

TEST_CASE("detection violations exhaust into validation errors") {
    const PromptLibrary prompts = load_prompts();

    struct Case {
        const char* reply;
        const char* violation;
    };
    const Case cases[] = {
        {R"({"s": 7, "suppression_type": "anxiety", "reason": "r", "c": 0.5})",
         "field 's' must lie in [1,5]"},
        {R"({"s": 3, "suppression_type": "sadness", "reason": "r", "c": 0.5})",
         "field 'suppression_type' must be one of:"},
        {R"({"s": 3, "suppression_type": "anxiety", "reason": "r", "c": 1.3})",
         "field 'c' must lie in [0,1]"},
        {R"({"s": 3, "suppression_type": "anxiety", "c": 0.5})", "missing field 'reason'"},
    };
    for (const Case& c : cases) {
        CAPTURE(c.reply);
        std::atomic<int> calls{0};
        CallbackChatProvider chat([&](const ChatRequest&) {
            ++calls;
            return std::string(c.reply);
        });
        const AgentContext ctx{chat, prompts, 2};
        try {
            detect_suppression(ctx, make_dialogue(4));
            FAIL("expected a validation error for: ", c.reply);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::validation);
            CHECK(std::string(e.what()).find("after 3 attempts") != std::string::npos);
            CHECK(std::string(e.what()).find(c.violation) != std::string::npos);
        }
        CHECK(calls.load() == 3);
    }
}

TEST_CASE("estimate_attributes parses and validates the reply") {
    const PromptLibrary prompts = load_prompts();
    ScriptedChatProvider chat = ScriptedChatProvider::from_map(
        {{"estimate_attributes",
          R"({"gender": "female", "age": 11, "background": "middle school student"})"}});
    const AgentContext ctx{chat, prompts};
    const AttributeReport report = estimate_attributes(ctx, make_dialogue(4));
    CHECK(report.gender == Gender::female);
    CHECK(report.age == 11);
    CHECK(report.background == "middle school student");
}

TEST_CASE("estimate_attributes rejects bad age and gender after repairs") {
    const PromptLibrary prompts = load_prompts();
    for (const std::string reply :
         {std::string(R"({"gender": "male", "age": 0, "background": "b"})"),
          std::string(R"({"gender": "robot", "age": 9, "background": "b"})"),
          std::string(R"({"gender": "male", "age": 9.5, "background": "b"})")}) {
        CAPTURE(reply);
        std::atomic<int> calls{0};
        CallbackChatProvider chat([&](const ChatRequest&) {
            ++calls;
            return reply;
        });
        const AgentContext ctx{chat, prompts, 1};
        CHECK_THROWS_AS(estimate_attributes(ctx, make_dialogue(4)), Error);
        CHECK(calls.load() == 2);
    }
}

TEST_CASE("describe_bias seeds the prompt with every bias category") {
    const PromptLibrary prompts = load_prompts();
    std::string seen_user;
    std::mutex mu;
    CallbackChatProvider chat([&](const ChatRequest& req) {
        std::lock_guard<std::mutex> lock(mu);
        seen_user = req.messages.front().content;
        return std::string(R"({"bias_description": "expects obedience", "c": 0.9})");
    });
    const AgentContext ctx{chat, prompts};

    const BiasReport report = describe_bias(ctx, make_dialogue(4));
    CHECK(report.bias_description == "expects obedience");
    CHECK(report.c == doctest::Approx(0.9));
    for (const char* name : {"Academic Excellence", "Gender Norms", "Social Comparison",
                             "Self-replication", "Role-based Expectation",
                             "Self-esteem Projection"}) {
        CAPTURE(name);
        CHECK(seen_user.find(name) != std::string::npos);
    }
    CHECK(seen_user.find("1. parent:") != std::string::npos);
}

TEST_CASE("compose carries detection fields verbatim") {
    const PromptLibrary prompts = load_prompts();
    ScriptedChatProvider chat = ScriptedChatProvider::from_map(
        {{"compose_child_report", "Child-facing summary."},
         {"compose_adult_report", "Adult-facing summary."}});
    const AgentContext ctx{chat, prompts};
    const Dialogue d = make_dialogue(4, "s42");

    const SuppressionReport sup = famlens::test::make_suppression_report();
    const BiasReport bias = famlens::test::make_bias_report();
    const AttributeReport attr = famlens::test::make_attribute_report();

    const SituationReport child = compose_child_report(ctx, d, sup, attr);
    CHECK(child.audience == Audience::child);
    CHECK(child.scenario_id == "s42");
    CHECK(child.summary == "Child-facing summary.");
    REQUIRE(std::holds_alternative<SuppressionReport>(child.source_detection));
    CHECK(std::get<SuppressionReport>(child.source_detection) == sup);
    CHECK(child.attributes == attr);

    const SituationReport adult = compose_adult_report(ctx, d, bias, attr);
    CHECK(adult.audience == Audience::adult);
    REQUIRE(std::holds_alternative<BiasReport>(adult.source_detection));
    CHECK(std::get<BiasReport>(adult.source_detection) == bias);
    CHECK(adult.attributes == attr);
}

TEST_CASE("analyze produces both reports and is deterministic across caps") {
    const PromptLibrary prompts = load_prompts();
    ScriptedChatProvider chat(famlens::test::scripted_dir());
    const Dialogue d = make_dialogue(6, "s01");

    AgentContext ctx{chat, prompts, 2, 1};
    const AnalysisResult serial = analyze(ctx, d);
    ctx.concurrency_cap = 4;
    const AnalysisResult parallel = analyze(ctx, d);

    CHECK(serial == parallel);
    CHECK(serial.child.audience == Audience::child);
    CHECK(serial.adult.audience == Audience::adult);
    CHECK(std::holds_alternative<SuppressionReport>(serial.child.source_detection));
    CHECK(std::holds_alternative<BiasReport>(serial.adult.source_detection));
    CHECK_FALSE(serial.child.summary.empty());
    CHECK_FALSE(serial.adult.summary.empty());
}

TEST_CASE("analyze names the failing stage") {
    const PromptLibrary prompts = load_prompts();
    ScriptedChatProvider chat = ScriptedChatProvider::from_map(
        {{"detect_suppression", "not a json object"},
         {"estimate_attributes", R"({"gender": "male", "age": 9, "background": "b"})"},
         {"describe_bias", R"({"bias_description": "d", "c": 0.9})"}});
    const AgentContext ctx{chat, prompts, 1, 4};
    try {
        analyze(ctx, make_dialogue(4));
        FAIL("expected a validation error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::validation);
        CHECK(std::string(e.what()).find("stage 'detect_suppression'") != std::string::npos);
    }
}

TEST_CASE("analyze reports the lowest-index failing stage when several fail") {
    const PromptLibrary prompts = load_prompts();
    ScriptedChatProvider chat = ScriptedChatProvider::from_map(
        {{"detect_suppression", "garbage"},
         {"estimate_attributes", "garbage"},
         {"describe_bias", "garbage"}});
    const AgentContext ctx{chat, prompts, 0, 4};
    for (int round = 0; round < 5; ++round) {
        try {
            analyze(ctx, make_dialogue(4));
            FAIL("expected a validation error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("stage 'detect_suppression'") != std::string::npos);
        }
    }
}

TEST_CASE("analyze rejects an invalid dialogue before any provider call") {
    const PromptLibrary prompts = load_prompts();
    std::atomic<int> calls{0};
    CallbackChatProvider chat([&](const ChatRequest&) {
        ++calls;
        return std::string("unused");
    });
    const AgentContext ctx{chat, prompts};
    Dialogue d = make_dialogue(4);
    d.turns[1].speaker = d.turns[0].speaker;
    CHECK_THROWS_AS(analyze(ctx, d), Error);
    CHECK(calls.load() == 0);
}
