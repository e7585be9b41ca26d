#include "sreval/json_codec.hpp"
#include "sreval/log.hpp"

#include <doctest.h>

#include <random>

using namespace sreval;

namespace {

struct captured_warnings {
    std::vector<std::string> messages;
    scoped_warning_sink sink{[this](std::string_view m) { messages.emplace_back(m); }};
};

std::vector<repair_rule> rules_of(std::string_view text) { return repair(text).second.applied; }

}  // namespace

TEST_CASE("parse_strict reads a well-formed report") {
    const auto r = parse_strict(
        R"({"positive":[{"name":"edema","probability":2,"level":"mild","location":"in the left lung"}],"negative":["pneumonia"]})");
    REQUIRE(r.positives.size() == 1);
    CHECK(r.positives[0].name == "edema");
    CHECK(r.positives[0].probability == probability_score(2));
    CHECK(r.positives[0].level == severity_level::mild);
    CHECK(r.positives[0].location == "in the left lung");
    CHECK(r.negatives == std::vector<std::string>{"pneumonia"});
}

TEST_CASE("parse_strict reports the syntax error offset") {
    const std::string text = R"({"positive": [})";
    try {
        (void)parse_strict(text);
        FAIL("expected syntax_error");
    } catch (const syntax_error& e) {
        CHECK(e.offset() == text.find('}'));
    }
}

TEST_CASE("parse_strict on the empty report") {
    const auto r = parse_strict(R"({"positive":[],"negative":[]})");
    CHECK(r.positives.empty());
    CHECK(r.negatives.empty());
}

TEST_CASE("parse_strict schema errors") {
    CHECK_THROWS_AS((void)parse_strict(R"([1,2])"), report_schema_error);
    CHECK_THROWS_AS((void)parse_strict(R"({})"), report_schema_error);
    CHECK_THROWS_AS((void)parse_strict(R"({"positive":{},"negative":[]})"), report_schema_error);
    CHECK_THROWS_AS((void)parse_strict(R"({"positive":[{"name":"a","level":"huge"}],"negative":[]})"),
                    report_schema_error);
    try {
        (void)parse_strict(R"({"positive":[{"name":"edema","probability":5}],"negative":["edema", 3]})");
        FAIL("expected schema error");
    } catch (const report_schema_error& e) {
        bool bad_enum = false;
        bool conflict = false;
        bool non_string = false;
        for (const auto& i : e.issues()) {
            bad_enum |= i.path == "positives[0].probability" && i.kind == issue_kind::bad_enum;
            conflict |= i.path == "negatives[0]" && i.kind == issue_kind::cross_list_conflict;
            non_string |= i.path == "negatives[1]";
        }
        CHECK(bad_enum);
        CHECK(conflict);
        CHECK(non_string);
    }
}

TEST_CASE("parse_strict reads a missing list as empty") {
    const auto r = parse_strict(R"({"positive":[{"name":"edema"}]})");
    CHECK(r.positives.size() == 1);
    CHECK(r.negatives.empty());
    CHECK(parse_strict(R"({"negative":["edema"]})").positives.empty());
}

TEST_CASE("parse_strict coerces and warns") {
    captured_warnings w;
    const auto r = parse_strict(
        R"({"positive":[{"name":"edema","probability":"2","extra":1},{"name":"a","probability":3.0}],"negative":[],"notes":"x"})");
    CHECK(r.positives[0].probability == probability_score(2));
    CHECK(r.positives[1].probability == probability_score(3));
    CHECK(w.messages.size() >= 3);
    CHECK_THROWS_AS(
        (void)parse_strict(R"({"positive":[{"name":"edema","probability":"two"}],"negative":[]})"),
        report_schema_error);
    CHECK_THROWS_AS(
        (void)parse_strict(R"({"positive":[{"name":"edema","probability":2.5}],"negative":[]})"),
        report_schema_error);
}

TEST_CASE("parse_strict replaces invalid UTF-8 and warns") {
    captured_warnings w;
    const std::string text = "{\"positive\":[],\"negative\":[\"ede\xffma\"]}";
    const auto r = parse_strict(text);
    REQUIRE(r.negatives.size() == 1);
    CHECK(r.negatives[0] == "ede\xEF\xBF\xBDma");
    CHECK_FALSE(w.messages.empty());
}

TEST_CASE("repair examples") {
    auto [fixed, log] = repair("{'positive': [], 'negative': []}");
    CHECK(log.applied == std::vector<repair_rule>{repair_rule::single_quotes});
    CHECK(parse_strict(fixed).positives.empty());

    const std::string valid = R"({"positive":[],"negative":["edema"]})";
    auto [same, none] = repair(valid);
    CHECK(same == valid);
    CHECK(none.applied.empty());

    auto [balanced, log2] = repair(R"({"positive":[{"name":"edema")");
    const auto r = parse_strict(balanced);
    REQUIRE(r.positives.size() == 1);
    CHECK(r.positives[0].name == "edema");
    CHECK(log2.applied == std::vector<repair_rule>{repair_rule::balance_brackets});
}

TEST_CASE("repair rule identifiers") {
    CHECK(to_string(repair_rule::strip_wrapper) == "strip-wrapper");
    CHECK(to_string(repair_rule::drop_truncated) == "drop-truncated");
    CHECK(rules_of("```json\n{\"positive\":[],\"negative\":[]}\n```") ==
          std::vector<repair_rule>{repair_rule::strip_wrapper});
    CHECK(rules_of("{positive: [], negative: []}") ==
          std::vector<repair_rule>{repair_rule::bare_keys});
    CHECK(rules_of(R"({"positive": [], "negative": ["a",],})") ==
          std::vector<repair_rule>{repair_rule::trailing_commas});
}

TEST_CASE("repair drops a truncated trailing element") {
    auto [text, log] = repair(R"({"positive":[{"name":"edema","probability":2},{"name":"atel)");
    const auto r = parse_strict(text);
    CHECK_FALSE(log.exhausted);
    REQUIRE_FALSE(r.positives.empty());
    CHECK(r.positives[0].name == "edema");
    CHECK(r.positives.size() == 1);
}

TEST_CASE("repair drops a string cut off by the end of input") {
    const auto r = parse_strict(repair(R"({"positive": [], "negative": ["edema", "pneum)").first);
    CHECK(r.negatives == std::vector<std::string>{"edema"});
    const auto kept = parse_strict(repair(R"({"positive": [{"name": "edema"}], "negative": ["a"], "notes": "x)").first);
    CHECK(kept.negatives == std::vector<std::string>{"a"});
}

TEST_CASE("repair keeps content after an inner brace when the object is unclosed") {
    auto [text, log] = repair("```json\n{\"positive\": [{\"name\": \"edema\"}], \"negative\": [\"mass\",\n```");
    const auto r = parse_strict(text);
    CHECK(r.positives.size() == 1);
    CHECK(r.negatives == std::vector<std::string>{"mass"});
    CHECK(log.applied.front() == repair_rule::strip_wrapper);
}

TEST_CASE("repair gives up on hopeless input and returns it unchanged") {
    auto [text, log] = repair("the model refused to answer");
    CHECK(log.exhausted);
    CHECK(text == "the model refused to answer");
}

TEST_CASE("repair is idempotent on arbitrary byte soup") {
    std::mt19937_64 rng(11);
    const std::string alphabet = "{}[]\"':, abnp\n`";
    for (int trial = 0; trial < 3000; ++trial) {
        std::string text;
        const auto len = rng() % 40;
        for (std::size_t i = 0; i < len; ++i) {
            text.push_back(alphabet[rng() % alphabet.size()]);
        }
        const std::string once = repair(text).first;
        CHECK(repair(once).first == once);
    }
}

TEST_CASE("parse_lenient") {
    const std::string valid = R"({"positive":[{"name":"edema"}],"negative":[]})";
    const auto strict = parse_strict(valid);
    const auto lenient = parse_lenient(valid);
    CHECK(lenient.report == strict);
    CHECK(lenient.log.applied.empty());

    const auto quoted = parse_lenient("{'positive': [{'name': 'edema', 'level': 'mild'}], 'negative': ['pneumonia']}");
    CHECK(quoted.log.applied == std::vector<repair_rule>{repair_rule::single_quotes});
    REQUIRE(quoted.report.positives.size() == 1);
    CHECK(quoted.report.positives[0].level == severity_level::mild);
    CHECK(quoted.report.negatives == std::vector<std::string>{"pneumonia"});

    CHECK_THROWS_AS((void)parse_lenient(R"("hello")"), unparseable_error);
}

TEST_CASE("serialize") {
    CHECK(serialize(structured_report{}) == R"({"positive":[],"negative":[]})");
    structured_report r{{{"Edema", probability_score(2), severity_level::mild, std::nullopt},
                         {"atelectasis", std::nullopt, severity_level::unspecified,
                          std::string("in the left lower lobe")}},
                        {"pneumonia"}};
    CHECK(serialize(r) ==
          R"({"positive":[{"name":"atelectasis","level":"unspecified","location":"in the left lower lobe"},{"name":"edema","probability":2,"level":"mild"}],"negative":["pneumonia"]})");
    CHECK(parse_strict(serialize(r)) == canonical_form(r));
}

TEST_CASE("serialize rejects invalid reports") {
    structured_report r{{{"edema", std::nullopt, severity_level::mild, std::nullopt}}, {"edema"}};
    CHECK_THROWS_AS((void)serialize(r), schema_error);
}

TEST_CASE("is_json_object") {
    CHECK(is_json_object("{}"));
    CHECK_FALSE(is_json_object("[]"));
    CHECK_FALSE(is_json_object("{"));
}
