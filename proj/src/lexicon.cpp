#include "sreval/lexicon.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

namespace sreval {

using json = nlohmann::json;

// Defined in the generated default_lexicon_data.cpp.
extern const std::string_view kDefaultLexiconJson;

// =============================================================================
// phrase_table
// =============================================================================

void phrase_table::add(const token_list& phrase, int payload) {
    if (phrase.empty()) {
        return;
    }
    auto& bucket = by_first_[phrase.front()];
    bucket.push_back({phrase, payload});
    std::stable_sort(bucket.begin(), bucket.end(), [](const entry& a, const entry& b) {
        return a.phrase.size() > b.phrase.size();
    });
}

std::optional<phrase_table::match> phrase_table::longest_at(const token_list& tokens,
                                                            std::size_t pos) const {
    if (pos >= tokens.size()) {
        return std::nullopt;
    }
    const auto it = by_first_.find(tokens[pos]);
    if (it == by_first_.end()) {
        return std::nullopt;
    }
    for (const entry& e : it->second) {
        if (pos + e.phrase.size() > tokens.size()) {
            continue;
        }
        if (std::equal(e.phrase.begin(), e.phrase.end(),
                       tokens.begin() + static_cast<std::ptrdiff_t>(pos))) {
            return match{{pos, pos + e.phrase.size()}, e.payload};
        }
    }
    return std::nullopt;
}

std::vector<phrase_table::match> phrase_table::scan(const token_list& tokens) const {
    std::vector<match> matches;
    std::size_t pos = 0;
    while (pos < tokens.size()) {
        if (auto m = longest_at(tokens, pos)) {
            pos = m->span.end;
            matches.push_back(*m);
        } else {
            ++pos;
        }
    }
    return matches;
}

// =============================================================================
// keyword_lexicon
// =============================================================================

namespace {

bool is_lowercase(std::string_view s) {
    return std::none_of(s.begin(), s.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

token_list checked_tokens(std::string_view surface, std::string_view list) {
    if (!is_lowercase(surface)) {
        throw lexicon_error("surface form '" + std::string(surface) + "' in " +
                            std::string(list) + " is not lowercase");
    }
    token_list tokens = tokenize(surface);
    if (tokens.empty()) {
        throw lexicon_error("empty surface form in " + std::string(list));
    }
    return tokens;
}

void insert_unique(std::set<token_list>& seen, const token_list& tokens, std::string_view surface,
                   std::string_view list) {
    if (!seen.insert(tokens).second) {
        throw lexicon_error("duplicate surface form '" + std::string(surface) + "' in " +
                            std::string(list));
    }
}

template <typename T>
T required(const json& doc, const char* key) {
    if (!doc.contains(key)) {
        throw lexicon_error(std::string("lexicon is missing key '") + key + "'");
    }
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw lexicon_error(std::string("lexicon key '") + key + "' is malformed: " + e.what());
    }
}

}  // namespace

keyword_lexicon::keyword_lexicon(lexicon_data data) : data_(std::move(data)) {
    if (data_.diseases.empty()) {
        throw lexicon_error("lexicon has no diseases");
    }

    std::set<token_list> seen;
    std::set<std::string> canonicals;
    for (std::size_t i = 0; i < data_.diseases.size(); ++i) {
        disease_entry& d = data_.diseases[i];
        if (normalize_name(d.canonical) != d.canonical || d.canonical.empty()) {
            throw lexicon_error("disease name '" + d.canonical + "' is not canonical");
        }
        if (!canonicals.insert(d.canonical).second) {
            throw lexicon_error("duplicate disease '" + d.canonical + "'");
        }
        std::set<std::string> own(d.synonyms.begin(), d.synonyms.end());
        if (own.size() != d.synonyms.size()) {
            throw lexicon_error("duplicate synonym for disease '" + d.canonical + "'");
        }
        std::vector<std::string> surfaces = d.synonyms;
        if (own.count(d.canonical) == 0) {
            surfaces.insert(surfaces.begin(), d.canonical);
        }
        for (const std::string& surface : surfaces) {
            token_list tokens = checked_tokens(surface, "diseases");
            insert_unique(seen, tokens, surface, "diseases");
            diseases_.add(tokens, static_cast<int>(i));
        }
    }

    seen.clear();
    for (const auto& [surface, score] : data_.hedges) {
        if (score < 1 || score > 3) {
            throw lexicon_error("hedge '" + surface + "' maps to " + std::to_string(score) +
                                ", outside {1, 2, 3}");
        }
        token_list tokens = checked_tokens(surface, "hedges");
        insert_unique(seen, tokens, surface, "hedges");
        hedges_.add(tokens, static_cast<int>(hedge_values_.size()));
        hedge_values_.push_back(score);
    }

    seen.clear();
    for (const auto& [surface, level_name] : data_.severities) {
        const auto level = parse_severity(level_name);
        if (!level || *level == severity_level::unspecified) {
            throw lexicon_error("severity '" + surface + "' maps to unknown level '" +
                                level_name + "'");
        }
        token_list tokens = checked_tokens(surface, "severities");
        insert_unique(seen, tokens, surface, "severities");
        severities_.add(tokens, static_cast<int>(severity_values_.size()));
        severity_values_.push_back(*level);
    }

    seen.clear();
    for (std::size_t i = 0; i < data_.locations.size(); ++i) {
        token_list tokens = checked_tokens(data_.locations[i], "locations");
        insert_unique(seen, tokens, data_.locations[i], "locations");
        locations_.add(tokens, static_cast<int>(i));
    }

    seen.clear();
    for (std::size_t i = 0; i < data_.negation_cues.size(); ++i) {
        token_list tokens = checked_tokens(data_.negation_cues[i], "negation_cues");
        insert_unique(seen, tokens, data_.negation_cues[i], "negation_cues");
        negation_cues_.add(tokens, static_cast<int>(i));
    }
}

keyword_lexicon keyword_lexicon::from_json(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw lexicon_error(std::string("lexicon is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw lexicon_error("lexicon must be a JSON object");
    }

    lexicon_data data;
    const json diseases = required<json>(doc, "diseases");
    if (!diseases.is_array()) {
        throw lexicon_error("lexicon key 'diseases' must be an array");
    }
    for (const json& item : diseases) {
        if (!item.is_object() || !item.contains("canonical")) {
            throw lexicon_error("each disease needs a 'canonical' name");
        }
        disease_entry entry;
        try {
            entry.canonical = item.at("canonical").get<std::string>();
            if (item.contains("synonyms")) {
                entry.synonyms = item.at("synonyms").get<std::vector<std::string>>();
            }
        } catch (const json::exception& e) {
            throw lexicon_error(std::string("malformed disease entry: ") + e.what());
        }
        data.diseases.push_back(std::move(entry));
    }
    data.hedges = required<std::map<std::string, int>>(doc, "hedges");
    data.severities = required<std::map<std::string, std::string>>(doc, "severities");
    data.locations = required<std::vector<std::string>>(doc, "locations");
    data.negation_cues = required<std::vector<std::string>>(doc, "negation_cues");
    return keyword_lexicon(std::move(data));
}

keyword_lexicon keyword_lexicon::from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw lexicon_error("cannot open lexicon file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json(buffer.str());
}

const keyword_lexicon& keyword_lexicon::default_lexicon() {
    static const keyword_lexicon lexicon = from_json(kDefaultLexiconJson);
    return lexicon;
}

std::string_view keyword_lexicon::default_lexicon_json() {
    return kDefaultLexiconJson;
}

const std::string& keyword_lexicon::disease_name(int payload) const {
    return data_.diseases.at(static_cast<std::size_t>(payload)).canonical;
}

severity_level keyword_lexicon::severity(int payload) const {
    return severity_values_.at(static_cast<std::size_t>(payload));
}

probability_score keyword_lexicon::hedge_score(int payload) const {
    return probability_score(hedge_values_.at(static_cast<std::size_t>(payload)));
}

std::string keyword_lexicon::to_canonical_json() const {
    json doc = json::object();
    json diseases = json::array();
    for (const auto& d : data_.diseases) {
        diseases.push_back({{"canonical", d.canonical}, {"synonyms", d.synonyms}});
    }
    doc["diseases"] = std::move(diseases);
    doc["hedges"] = data_.hedges;
    doc["severities"] = data_.severities;
    doc["locations"] = data_.locations;
    doc["negation_cues"] = data_.negation_cues;
    return doc.dump();
}

std::string keyword_lexicon::fingerprint() const {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : to_canonical_json()) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kHex[hash & 0xF];
        hash >>= 4;
    }
    return out;
}

}  // namespace sreval
