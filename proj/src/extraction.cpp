#include "sreval/extraction.hpp"

#include "sreval/log.hpp"

#include <algorithm>
#include <map>

namespace sreval {

// =============================================================================
// Location rewriting
// =============================================================================

std::string identity_rewriter::rewrite(std::string_view phrase) const {
    return std::string(phrase);
}

std::vector<rule_rewriter::rule> rule_rewriter::default_rules() {
    return {
        // Vague "lung <side> <zone>" orderings.
        {R"(^lung (left|right) (upper|middle|lower)$)", "in the $2 zone of the $1 lung"},
        {R"(^(left|right) lung (upper|middle|lower)$)", "in the $2 zone of the $1 lung"},
        {R"(^(upper|middle|lower) (left|right) lung$)", "in the $1 zone of the $2 lung"},
        {R"(^(left|right) (upper|middle|lower) zone$)", "in the $2 zone of the $1 lung"},
        {R"(^both lungs$)", "in both lungs"},
        // Bare anatomical noun phrases get a preposition.
        {R"(^(?:the )?(?!(?:in|at|of|within|along|near|on|over|throughout) )(.*\b(?:lobe|lobes|lung|lungs|base|bases|apex|apices|zone|hemithorax|angle|region|lingula))$)",
         "in the $1"},
    };
}

rule_rewriter::rule_rewriter() : rule_rewriter(default_rules()) {}

rule_rewriter::rule_rewriter(std::vector<rule> rules) {
    rules_.reserve(rules.size());
    for (auto& r : rules) {
        rules_.emplace_back(std::regex(r.pattern, std::regex::ECMAScript), std::move(r.format));
    }
}

std::string rule_rewriter::rewrite(std::string_view phrase) const {
    const std::string normalized = collapse_whitespace(phrase);
    for (const auto& [pattern, format] : rules_) {
        if (std::regex_match(normalized, pattern)) {
            return std::regex_replace(normalized, pattern, format);
        }
    }
    return std::string(phrase);
}

std::string rephrase_location(std::string_view phrase, const location_rewriter& rewriter) {
    try {
        std::string out = rewriter.rewrite(phrase);
        if (tokenize(out).empty()) {
            log_warning("location rewriter returned an empty phrase for '" +
                        std::string(phrase) + "'; keeping the original");
            return std::string(phrase);
        }
        return out;
    } catch (const std::exception& e) {
        log_warning("location rewriter failed on '" + std::string(phrase) + "': " + e.what() +
                    "; keeping the original");
        return std::string(phrase);
    }
}

// =============================================================================
// Per-sentence steps
// =============================================================================

std::size_t span_distance(token_span a, token_span b) noexcept {
    if (a.end <= b.begin) {
        return b.begin - a.end + 1;
    }
    if (b.end <= a.begin) {
        return a.begin - b.end + 1;
    }
    return 0;
}

namespace {

bool overlaps(token_span a, token_span b) {
    return a.begin < b.end && b.begin < a.end;
}

// Nearest candidate to span, preceding candidates winning ties.
template <typename Match>
const Match* nearest(const std::vector<Match>& candidates, token_span span,
                     std::size_t max_distance) {
    const Match* best = nullptr;
    std::size_t best_distance = 0;
    for (const Match& m : candidates) {
        if (overlaps(m.span, span)) {
            continue;
        }
        const std::size_t d = span_distance(m.span, span);
        if (d > max_distance) {
            continue;
        }
        const bool precedes = m.span.end <= span.begin;
        if (best == nullptr || d < best_distance ||
            (d == best_distance && precedes && best->span.end > span.begin)) {
            best = &m;
            best_distance = d;
        }
    }
    return best;
}

}  // namespace

std::vector<disease_mention> find_disease_mentions(const token_list& sentence,
                                                   const keyword_lexicon& lexicon) {
    std::vector<disease_mention> out;
    for (const auto& m : lexicon.diseases().scan(sentence)) {
        out.push_back({lexicon.disease_name(m.payload), m.span});
    }
    return out;
}

bool is_scope_breaker(std::string_view token) noexcept {
    return token == "," || token == ";" || token == "but" || token == "however" ||
           token == "although";
}

bool detect_negation(const token_list& sentence, token_span span, const keyword_lexicon& lexicon) {
    for (const auto& cue : lexicon.negation_cues().scan(sentence)) {
        if (cue.span.end > span.begin) {
            break;
        }
        const bool broken = std::any_of(
            sentence.begin() + static_cast<std::ptrdiff_t>(cue.span.end),
            sentence.begin() + static_cast<std::ptrdiff_t>(span.begin),
            [](const std::string& t) { return is_scope_breaker(t); });
        if (!broken) {
            return true;
        }
    }
    return false;
}

probability_score extract_probability(const token_list& sentence, token_span span,
                                      const keyword_lexicon& lexicon) {
    const auto hedges = lexicon.hedges().scan(sentence);
    if (const auto* best = nearest(hedges, span, sentence.size())) {
        return lexicon.hedge_score(best->payload);
    }
    return probability_score(3);
}

severity_level extract_severity(const token_list& sentence, token_span span,
                                const keyword_lexicon& lexicon, std::size_t window) {
    const auto keywords = lexicon.severities().scan(sentence);
    if (const auto* best = nearest(keywords, span, window)) {
        return lexicon.severity(best->payload);
    }
    return severity_level::unspecified;
}

std::optional<std::string> extract_location(const token_list& sentence, token_span span,
                                            const keyword_lexicon& lexicon) {
    std::vector<token_span> mentions;
    for (const auto& m : lexicon.diseases().scan(sentence)) {
        mentions.push_back(m.span);
    }
    if (std::find(mentions.begin(), mentions.end(), span) == mentions.end()) {
        mentions.push_back(span);
    }

    std::optional<token_span> chosen;
    for (const auto& loc : lexicon.locations().scan(sentence)) {
        const token_span* owner = nullptr;
        std::size_t owner_distance = 0;
        for (const token_span& m : mentions) {
            if (overlaps(m, loc.span)) {
                continue;
            }
            const std::size_t d = span_distance(m, loc.span);
            const bool before = m.end <= loc.span.begin;
            if (owner == nullptr || d < owner_distance ||
                (d == owner_distance && before && owner->end > loc.span.begin)) {
                owner = &m;
                owner_distance = d;
            }
        }
        if (owner == nullptr || !(*owner == span)) {
            continue;
        }
        if (!chosen || loc.span.size() > chosen->size()) {
            chosen = loc.span;
        }
    }
    if (!chosen) {
        return std::nullopt;
    }
    return join_tokens(token_list(sentence.begin() + static_cast<std::ptrdiff_t>(chosen->begin),
                                  sentence.begin() + static_cast<std::ptrdiff_t>(chosen->end)));
}

// =============================================================================
// Whole-report extraction
// =============================================================================

std::vector<mention> extract_mentions(std::string_view text, const keyword_lexicon& lexicon,
                                      const location_rewriter& rewriter,
                                      const extraction_options& options) {
    std::vector<mention> out;
    const auto sentences = segment_sentences(text);
    for (std::size_t s = 0; s < sentences.size(); ++s) {
        const token_list tokens = tokenize(sentences[s]);
        for (const auto& found : find_disease_mentions(tokens, lexicon)) {
            mention m;
            m.name = found.name;
            m.sentence_index = s;
            m.span = found.span;
            m.negated = detect_negation(tokens, found.span, lexicon);
            if (!m.negated) {
                m.probability = extract_probability(tokens, found.span, lexicon);
                m.level = extract_severity(tokens, found.span, lexicon, options.severity_window);
                if (auto raw = extract_location(tokens, found.span, lexicon)) {
                    m.location = rephrase_location(*raw, rewriter);
                }
            }
            out.push_back(std::move(m));
        }
    }
    return out;
}

structured_report extract_report(std::string_view text, const keyword_lexicon& lexicon,
                                 const location_rewriter& rewriter,
                                 const extraction_options& options) {
    struct merged {
        bool asserted = false;
        positive_finding finding;
    };
    std::map<std::string, merged> by_name;

    for (const mention& m : extract_mentions(text, lexicon, rewriter, options)) {
        auto [it, inserted] = by_name.try_emplace(m.name);
        merged& entry = it->second;
        if (inserted) {
            entry.finding.name = m.name;
        }
        if (m.negated) {
            continue;
        }
        positive_finding& f = entry.finding;
        if (!entry.asserted) {
            entry.asserted = true;
            f.probability = m.probability;
            f.level = m.level;
            f.location = m.location;
            continue;
        }
        if (!f.probability || m.probability > *f.probability) {
            f.probability = m.probability;
        }
        if (f.level == severity_level::unspecified) {
            f.level = m.level;
        }
        if (!f.location) {
            f.location = m.location;
        }
    }

    structured_report report;
    for (auto& [name, entry] : by_name) {
        if (entry.asserted) {
            report.positives.push_back(std::move(entry.finding));
        } else {
            report.negatives.push_back(name);
        }
    }
    return canonical_form(report);
}

}  // namespace sreval
