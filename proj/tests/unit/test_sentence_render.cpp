#include "sreval/sentence_render.hpp"

#include "sreval/lexicon.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace sreval;

TEST_CASE("render_positive") {
    CHECK(render_positive({"atelectasis", probability_score(2), severity_level::mild,
                           std::string("in the left lower lobe")}) ==
          "there may be mild atelectasis in the left lower lobe.");
    CHECK(render_positive({"cardiomegaly", probability_score(3), severity_level::unspecified,
                           std::nullopt}) == "there is cardiomegaly.");
    CHECK(render_positive({"edema", probability_score(1), severity_level::moderate,
                           std::nullopt}) == "there might be moderate edema.");
    // An absent probability renders as an assertion.
    CHECK(render_positive({"edema", std::nullopt, severity_level::unspecified, std::nullopt}) ==
          "there is edema.");
}

TEST_CASE("render_negative") {
    CHECK(render_negative("pneumonia") == "no evidence of pneumonia.");
    CHECK(render_negative("pleural effusion") == "no evidence of pleural effusion.");
}

TEST_CASE("render_report") {
    CHECK(render_report(structured_report{}) == "");
    const structured_report r{{{"Edema", probability_score(3), severity_level::unspecified,
                                std::nullopt}},
                              {"pneumonia"}};
    CHECK(render_report(r) == "there is edema. no evidence of pneumonia.");
}

TEST_CASE("hedge table from the lexicon") {
    CHECK(hedge_table::from_lexicon_json(keyword_lexicon::default_lexicon_json()) == hedge_table{});
    CHECK(hedge_table::from_lexicon_json(R"({"diseases": []})") == hedge_table{});
    const auto custom = hedge_table::from_lexicon_json(
        R"({"hedge_render": {"1": {"hedge": "possibly", "verb": "is"}, "2": {"hedge": "probably", "verb": "is"}, "3": {"verb": "is"}}})");
    CHECK(render_positive({"edema", probability_score(1), severity_level::unspecified,
                           std::nullopt},
                          custom) == "there possibly is edema.");
    CHECK_THROWS_AS(hedge_table::from_lexicon_json(R"({"hedge_render": {"1": {"verb": "is"}}})"),
                    lexicon_error);
    CHECK_THROWS_AS(hedge_table::from_lexicon_json("{"), lexicon_error);
}

TEST_CASE("render is injective and clean on random canonical reports") {
    std::mt19937_64 rng(17);
    const auto& diseases = keyword_lexicon::default_lexicon().data().diseases;
    const std::vector<std::string> locations{"in the left lung", "in the right lower lobe",
                                             "in both lungs"};
    std::map<std::string, structured_report> seen;
    for (int trial = 0; trial < 2000; ++trial) {
        structured_report r;
        std::set<std::string> used;
        const auto n = rng() % 4;
        for (std::size_t i = 0; i < n; ++i) {
            const std::string& name = diseases[rng() % diseases.size()].canonical;
            if (!used.insert(name).second) {
                continue;
            }
            if (rng() % 2 == 0) {
                r.negatives.push_back(name);
                continue;
            }
            positive_finding f{name, probability_score(static_cast<int>(1 + rng() % 3)),
                               static_cast<severity_level>(rng() % 4), std::nullopt};
            if (rng() % 2 == 0) {
                f.location = locations[rng() % locations.size()];
            }
            r.positives.push_back(f);
        }
        const structured_report c = canonical_form(r);
        const std::string text = render_report(c);
        CHECK(text.find("  ") == std::string::npos);
        CHECK(text.find(" .") == std::string::npos);
        const auto [it, inserted] = seen.emplace(text, c);
        if (!inserted) {
            CHECK(it->second == c);
        }
    }
}
