#include "sreval/sentence_render.hpp"

#include "sreval/lexicon.hpp"
#include "sreval/text.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace sreval {

using json = nlohmann::json;

hedge_table::hedge_table()
    : rows_{hedge_phrase{"might", "be"}, hedge_phrase{"may", "be"}, hedge_phrase{"", "is"}} {}

hedge_table::hedge_table(std::array<hedge_phrase, 3> rows) : rows_(std::move(rows)) {
    for (auto& row : rows_) {
        row.hedge = collapse_whitespace(row.hedge);
        row.verb = collapse_whitespace(row.verb);
        if (row.verb.empty()) {
            throw lexicon_error("hedge_render rows need a verb");
        }
    }
}

hedge_table hedge_table::from_lexicon_json(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw lexicon_error(std::string("lexicon is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("hedge_render")) {
        return hedge_table();
    }
    const json& table = doc.at("hedge_render");
    std::array<hedge_phrase, 3> rows;
    for (int p = 1; p <= 3; ++p) {
        const std::string key = std::to_string(p);
        if (!table.contains(key)) {
            throw lexicon_error("hedge_render is missing probability " + key);
        }
        try {
            const json& row = table.at(key);
            rows[static_cast<std::size_t>(p - 1)] =
                hedge_phrase{row.value("hedge", std::string()), row.at("verb").get<std::string>()};
        } catch (const json::exception& e) {
            throw lexicon_error("malformed hedge_render row " + key + ": " + e.what());
        }
    }
    return hedge_table(std::move(rows));
}

hedge_table hedge_table::from_lexicon_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw lexicon_error("cannot open lexicon file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_lexicon_json(buffer.str());
}

std::string render_positive(const positive_finding& finding, const hedge_table& table) {
    const hedge_phrase& phrase = table.at(finding.probability.value_or(probability_score(3)));
    std::string sentence = "there";
    auto append = [&sentence](std::string_view word) {
        const std::string w = collapse_whitespace(word);
        if (!w.empty()) {
            sentence.push_back(' ');
            sentence += w;
        }
    };
    append(phrase.hedge);
    append(phrase.verb);
    if (finding.level != severity_level::unspecified) {
        append(to_string(finding.level));
    }
    append(finding.name);
    if (finding.location) {
        append(*finding.location);
    }
    sentence.push_back('.');
    return sentence;
}

std::string render_negative(std::string_view name) {
    return "no evidence of " + std::string(name) + ".";
}

std::string render_report(const structured_report& report, const hedge_table& table) {
    const structured_report canonical = canonical_form(report);
    std::string text;
    auto add = [&text](const std::string& sentence) {
        if (!text.empty()) {
            text.push_back(' ');
        }
        text += sentence;
    };
    for (const auto& f : canonical.positives) {
        add(render_positive(f, table));
    }
    for (const auto& n : canonical.negatives) {
        add(render_negative(n));
    }
    return text;
}

}  // namespace sreval
