#include "sreval/s_score.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace sreval {

void detail_weights::check() const {
    for (double w : {probability, level, location}) {
        if (!std::isfinite(w) || w < 0.0) {
            throw std::invalid_argument("detail weights must be finite and non-negative");
        }
    }
    if (std::fabs(probability + level + location - 1.0) > 1e-9) {
        throw std::invalid_argument("detail weights must sum to 1");
    }
}

double set_f1(const std::set<std::string>& reference, const std::set<std::string>& hypothesis) {
    if (reference.empty() && hypothesis.empty()) {
        return 1.0;
    }
    if (reference.empty() || hypothesis.empty()) {
        return 0.0;
    }
    std::size_t common = 0;
    for (const auto& name : hypothesis) {
        common += reference.count(name);
    }
    if (common == 0) {
        return 0.0;
    }
    const double precision = static_cast<double>(common) / static_cast<double>(hypothesis.size());
    const double recall = static_cast<double>(common) / static_cast<double>(reference.size());
    return 2.0 * precision * recall / (precision + recall);
}

namespace {

std::set<std::string> positive_names(const structured_report& r) {
    std::set<std::string> names;
    for (const auto& f : r.positives) {
        names.insert(normalize_name(f.name));
    }
    return names;
}

std::set<std::string> negative_names(const structured_report& r) {
    std::set<std::string> names;
    for (const auto& n : r.negatives) {
        names.insert(normalize_name(n));
    }
    return names;
}

std::map<std::string, const positive_finding*> index_positives(const structured_report& r) {
    std::map<std::string, const positive_finding*> index;
    for (const auto& f : r.positives) {
        index.emplace(normalize_name(f.name), &f);
    }
    return index;
}

}  // namespace

p_score_result p_score(const structured_report& reference, const structured_report& hypothesis) {
    p_score_result result;
    result.pos = set_f1(positive_names(reference), positive_names(hypothesis));
    result.neg = set_f1(negative_names(reference), negative_names(hypothesis));
    result.combined = (result.pos + result.neg) / 2.0;
    return result;
}

double s_prob(std::optional<probability_score> reference,
              std::optional<probability_score> hypothesis) {
    if (!hypothesis) {
        return 0.0;
    }
    const int ref = reference ? reference->value() : 3;
    const double gap = static_cast<double>(ref - hypothesis->value()) / 2.0;
    return 1.0 - gap * gap;
}

double s_level(severity_level reference, severity_level hypothesis) {
    return reference == hypothesis ? 1.0 : 0.0;
}

double s_loc(const std::optional<std::string>& reference,
             const std::optional<std::string>& hypothesis, const bleu_config& config) {
    if (!reference && !hypothesis) {
        return 1.0;
    }
    if (!hypothesis || !reference) {
        return 0.0;
    }
    const token_list ref = tokenize(*reference);
    const token_list hyp = tokenize(*hypothesis);
    if (ref.empty()) {
        return hyp.empty() ? 1.0 : 0.0;
    }
    return bleu(ref, hyp, config);
}

d_score_result d_score(const structured_report& reference, const structured_report& hypothesis,
                       const detail_weights& weights, const bleu_config& config) {
    weights.check();
    const auto ref = index_positives(reference);
    const auto hyp = index_positives(hypothesis);

    std::set<std::string> names;
    for (const auto& [name, _] : ref) {
        names.insert(name);
    }
    for (const auto& [name, _] : hyp) {
        names.insert(name);
    }

    d_score_result result;
    if (names.empty()) {
        result.score = 1.0;
        return result;
    }

    double total = 0.0;
    for (const auto& name : names) {
        finding_score row;
        row.name = name;
        const auto r = ref.find(name);
        const auto h = hyp.find(name);
        if (r != ref.end() && h != hyp.end()) {
            row.matched = true;
            row.s_prob = s_prob(r->second->probability, h->second->probability);
            row.s_level = s_level(r->second->level, h->second->level);
            row.s_loc = s_loc(r->second->location, h->second->location, config);
            total += weights.probability * row.s_prob + weights.level * row.s_level +
                     weights.location * row.s_loc;
        }
        result.per_finding.push_back(std::move(row));
    }
    result.score = std::clamp(total / static_cast<double>(names.size()), 0.0, 1.0);
    return result;
}

score_breakdown s_score(const structured_report& reference, const structured_report& hypothesis,
                        const detail_weights& weights, const bleu_config& config) {
    const p_score_result p = p_score(reference, hypothesis);
    d_score_result d = d_score(reference, hypothesis, weights, config);

    score_breakdown out;
    out.p_score_pos = p.pos;
    out.p_score_neg = p.neg;
    out.p_score = p.combined;
    out.d_score = d.score;
    out.s_score = (p.combined + d.score) / 2.0;
    out.per_finding = std::move(d.per_finding);
    return out;
}

corpus_evaluation evaluate_corpus(std::vector<report_pair> pairs, const detail_weights& weights,
                                  const bleu_config& config) {
    weights.check();
    config.check();
    std::sort(pairs.begin(), pairs.end(),
              [](const report_pair& a, const report_pair& b) { return a.id < b.id; });
    const auto dup = std::adjacent_find(pairs.begin(), pairs.end(),
                                        [](const report_pair& a, const report_pair& b) {
                                            return a.id == b.id;
                                        });
    if (dup != pairs.end()) {
        throw std::invalid_argument("duplicate report id '" + dup->id + "'");
    }

    corpus_evaluation out;
    out.reports.reserve(pairs.size());
    corpus_means sums;
    for (const auto& pair : pairs) {
        score_breakdown b = s_score(pair.reference, pair.hypothesis, weights, config);
        sums.p_score_pos += b.p_score_pos;
        sums.p_score_neg += b.p_score_neg;
        sums.p_score += b.p_score;
        sums.d_score += b.d_score;
        sums.s_score += b.s_score;
        out.reports.emplace_back(pair.id, std::move(b));
    }
    if (!pairs.empty()) {
        const auto n = static_cast<double>(pairs.size());
        out.means = corpus_means{sums.p_score_pos / n, sums.p_score_neg / n, sums.p_score / n,
                                 sums.d_score / n, sums.s_score / n};
    }
    return out;
}

}  // namespace sreval
