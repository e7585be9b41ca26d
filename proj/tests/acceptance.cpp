// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "cli.hpp"

#include "sreval/corpus_io.hpp"
#include "sreval/correlation.hpp"
#include "sreval/extraction.hpp"
#include "sreval/json_codec.hpp"
#include "sreval/lexicon.hpp"
#include "sreval/log.hpp"
#include "sreval/nlg_metrics.hpp"
#include "sreval/s_score.hpp"
#include "sreval/sentence_render.hpp"

#include "oracles/oracles.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace sreval;

namespace {

using rng_t = std::mt19937_64;
using clock_type = std::chrono::steady_clock;

const std::string kFixtures = SREVAL_FIXTURE_DIR;

struct outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<outcome()>& body) {
    outcome o;
    const auto start = clock_type::now();
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("unexpected exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(clock_type::now() - start).count();
    if (!o.pass) {
        ++failures;
    }
    std::ostringstream line;
    line << (o.pass ? "PASS" : "FAIL") << "  " << name << "  (" << o.detail;
    line.precision(2);
    line << std::fixed << "; " << seconds << " s)";
    std::cout << line.str() << std::endl;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t pick(rng_t& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

// ---------------------------------------------------------------------------
// Random reports over the default vocabulary
// ---------------------------------------------------------------------------

const std::vector<std::string>& disease_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& d : keyword_lexicon::default_lexicon().data().diseases) {
            out.push_back(d.canonical);
        }
        return out;
    }();
    return names;
}

const std::vector<std::string>& location_phrases() {
    static const std::vector<std::string> phrases = [] {
        std::set<std::string> out;
        const rule_rewriter rules;
        for (const auto& loc : keyword_lexicon::default_lexicon().data().locations) {
            out.insert(rephrase_location(loc, rules));
        }
        return std::vector<std::string>(out.begin(), out.end());
    }();
    return phrases;
}

struct report_shape {
    std::size_t max_positives = 5;
    std::size_t max_negatives = 5;
    bool fully_specified = false;
    std::size_t vocabulary = 0;  ///< 0 = all diseases
};

structured_report random_report(rng_t& rng, const report_shape& shape) {
    const auto& names = disease_names();
    const std::size_t vocab = shape.vocabulary == 0 ? names.size() : shape.vocabulary;
    std::vector<std::size_t> order(vocab);
    for (std::size_t i = 0; i < vocab; ++i) {
        order[i] = i;
    }
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t n_pos = pick(rng, shape.max_positives + 1);
    const std::size_t n_neg = std::min(pick(rng, shape.max_negatives + 1), vocab - std::min(vocab, n_pos));
    structured_report r;
    std::size_t next = 0;
    for (std::size_t i = 0; i < n_pos && next < vocab; ++i, ++next) {
        positive_finding f;
        f.name = names[order[next]];
        if (shape.fully_specified || pick(rng, 4) != 0) {
            f.probability = probability_score(static_cast<int>(1 + pick(rng, 3)));
        }
        f.level = static_cast<severity_level>(pick(rng, 4));
        if (shape.fully_specified || pick(rng, 2) == 0) {
            f.location = location_phrases()[pick(rng, location_phrases().size())];
        }
        r.positives.push_back(std::move(f));
    }
    for (std::size_t i = 0; i < n_neg && next < vocab; ++i, ++next) {
        r.negatives.push_back(names[order[next]]);
    }
    std::shuffle(r.positives.begin(), r.positives.end(), rng);
    std::shuffle(r.negatives.begin(), r.negatives.end(), rng);
    return r;
}

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

outcome identity_law() {
    rng_t rng(101);
    const auto start = clock_type::now();
    std::size_t bad = 0;
    for (int i = 0; i < 500; ++i) {
        const structured_report r = random_report(rng, {6, 6, true, 0});
        if (s_score(r, r).s_score != 1.0) {
            ++bad;
        }
    }
    const double seconds = std::chrono::duration<double>(clock_type::now() - start).count();
    return {bad == 0 && seconds < 5.0,
            "500 reports, " + std::to_string(bad) + " with s_score != 1.0"};
}

outcome bounds() {
    rng_t rng(202);
    std::size_t bad = 0;
    for (int i = 0; i < 5000; ++i) {
        const report_shape shape{5, 5, false, 8};
        const structured_report ref = random_report(rng, shape);
        const structured_report hyp = random_report(rng, shape);
        const score_breakdown b = s_score(ref, hyp);
        bool ok = in_unit(b.p_score_pos) && in_unit(b.p_score_neg) && in_unit(b.p_score) &&
                  in_unit(b.d_score) && in_unit(b.s_score);
        for (const auto& f : b.per_finding) {
            ok = ok && in_unit(f.s_prob) && in_unit(f.s_level) && in_unit(f.s_loc);
        }
        bad += ok ? 0 : 1;
    }
    return {bad == 0, "5000 pairs, " + std::to_string(bad) + " out of bounds"};
}

std::set<std::string> positive_set(const structured_report& r) {
    std::set<std::string> out;
    for (const auto& f : r.positives) {
        out.insert(f.name);
    }
    return out;
}

std::set<std::string> negative_set(const structured_report& r) {
    return {r.negatives.begin(), r.negatives.end()};
}

outcome p_score_oracle() {
    rng_t rng(303);
    std::size_t bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const report_shape shape{5, 5, false, 10};
        const structured_report ref = random_report(rng, shape);
        const structured_report hyp = random_report(rng, shape);
        const p_score_result got = p_score(ref, hyp);
        const double pos = oracle::f1_indicator(positive_set(ref), positive_set(hyp));
        const double neg = oracle::f1_indicator(negative_set(ref), negative_set(hyp));
        if (got.pos != pos || got.neg != neg || got.combined != (pos + neg) / 2.0) {
            ++bad;
        }
    }
    return {bad == 0, "1000 pairs, " + std::to_string(bad) + " mismatches (exact)"};
}

outcome gating_law() {
    rng_t rng(404);
    std::size_t bad = 0;
    std::size_t perturbed = 0;
    for (int i = 0; i < 500; ++i) {
        const report_shape shape{5, 3, false, 8};
        const structured_report ref = random_report(rng, shape);
        const structured_report hyp = random_report(rng, shape);
        const auto hyp_names = positive_set(hyp);
        structured_report changed = ref;
        for (auto& f : changed.positives) {
            if (hyp_names.count(f.name) != 0) {
                continue;
            }
            ++perturbed;
            f.probability = pick(rng, 4) == 0
                                ? std::nullopt
                                : std::optional(probability_score(static_cast<int>(1 + pick(rng, 3))));
            f.level = static_cast<severity_level>(pick(rng, 4));
            f.location = pick(rng, 3) == 0
                             ? std::nullopt
                             : std::optional(location_phrases()[pick(rng, location_phrases().size())]);
        }
        if (d_score(ref, hyp).score != d_score(changed, hyp).score) {
            ++bad;
        }
    }
    return {bad == 0 && perturbed > 0, "500 pairs, " + std::to_string(perturbed) +
                                           " unmatched findings perturbed, " + std::to_string(bad) +
                                           " d_score changes"};
}

outcome bleu_oracle() {
    rng_t rng(505);
    const token_list vocab{"in", "the", "left", "right", "lower", "upper", "lobe", "lung"};
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        token_list ref(1 + pick(rng, 12));
        token_list hyp(1 + pick(rng, 12));
        for (auto& t : ref) {
            t = vocab[pick(rng, vocab.size())];
        }
        for (auto& t : hyp) {
            t = vocab[pick(rng, vocab.size())];
        }
        worst = std::max(worst, std::abs(bleu(ref, hyp, bleu_config::location()) -
                                         oracle::bleu(ref, hyp, 4, true, true)));
        worst = std::max(worst, std::abs(bleu(ref, hyp, bleu_config::standard(4)) -
                                         oracle::bleu(ref, hyp, 4, false, false)));
    }
    std::ostringstream d;
    d << "100 pairs x 2 configs, max |diff| = " << worst;
    return {worst <= 1e-9, d.str()};
}

outcome correlation_oracle() {
    rng_t rng(606);
    double worst = 0.0;
    int vectors = 0;
    while (vectors < 200) {
        const std::size_t n = 2 + pick(rng, 49);
        const unsigned levels = vectors % 2 == 0 ? 5U : 1000000U;
        std::vector<double> x(n);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = static_cast<double>(rng() % levels) / 4.0;
            y[i] = static_cast<double>(rng() % levels) / 4.0;
        }
        const auto constant = [](const std::vector<double>& v) {
            return std::all_of(v.begin(), v.end(), [&](double a) { return a == v[0]; });
        };
        if (constant(x) || constant(y)) {
            continue;
        }
        ++vectors;
        worst = std::max(worst, std::abs(kendall_tau_b(x, y) - oracle::kendall_tau_b(x, y)));
        worst = std::max(worst, std::abs(spearman(x, y) - oracle::spearman(x, y)));
    }
    std::ostringstream d;
    d << "200 vector pairs (half with heavy ties), max |diff| = " << worst;
    return {worst <= 1e-12, d.str()};
}

outcome repair_corpus() {
    scoped_warning_sink quiet([](std::string_view) {});
    std::vector<std::string> problems;
    std::size_t malformed = 0;
    std::size_t valid = 0;

    std::istringstream bad(read_file(kFixtures + "/repair/malformed.jsonl"));
    for (std::string line; std::getline(bad, line);) {
        const auto doc = nlohmann::json::parse(line);
        const std::string id = doc["case"];
        const std::string input = doc["input"];
        ++malformed;
        const auto [once, log] = repair(input);
        if (repair(once).first != once) {
            problems.push_back(id + " not idempotent");
        }
        try {
            const structured_report got = parse_strict(once);
            const structured_report expected = parse_strict(doc["expected"].dump());
            if (canonical_form(got) != canonical_form(expected)) {
                problems.push_back(id + " parsed to " + serialize(got));
            }
        } catch (const std::exception& e) {
            problems.push_back(id + " does not strict-parse: " + e.what());
        }
    }

    std::istringstream good(read_file(kFixtures + "/repair/valid.jsonl"));
    for (std::string line; std::getline(good, line);) {
        const auto doc = nlohmann::json::parse(line);
        const std::string id = doc["case"];
        const std::string input = doc["input"];
        ++valid;
        const auto [once, log] = repair(input);
        if (once != input || !log.applied.empty()) {
            problems.push_back(id + " changed by repair");
        }
        if (repair(once).first != once) {
            problems.push_back(id + " not idempotent");
        }
    }

    std::string detail = std::to_string(malformed) + " malformed + " + std::to_string(valid) +
                         " valid fixtures";
    for (const auto& p : problems) {
        detail += "; " + p;
    }
    return {problems.empty() && malformed == 20 && valid == 10, detail};
}

outcome round_trip() {
    rng_t rng(707);
    const keyword_lexicon& lex = keyword_lexicon::default_lexicon();
    const rule_rewriter rules;
    std::size_t name_misses = 0;
    std::size_t findings = 0;
    std::size_t detail_hits = 0;
    std::size_t location_hits = 0;
    for (int i = 0; i < 300; ++i) {
        structured_report r = canonical_form(random_report(rng, {6, 6, false, 0}));
        for (auto& f : r.positives) {
            // Rendering writes an absent probability as an assertion.
            if (!f.probability) {
                f.probability = probability_score(3);
            }
        }
        const structured_report back = extract_report(render_report(r), lex, rules);
        if (positive_set(back) != positive_set(r) || negative_set(back) != negative_set(r)) {
            ++name_misses;
            continue;
        }
        for (std::size_t k = 0; k < r.positives.size(); ++k) {
            ++findings;
            const auto& a = r.positives[k];
            const auto& b = back.positives[k];
            if (a.probability == b.probability && a.level == b.level) {
                ++detail_hits;
            }
            if (a.location == b.location) {
                ++location_hits;
            }
        }
    }
    const bool pass = name_misses == 0 && detail_hits == findings;
    return {pass, "300 reports, " + std::to_string(name_misses) + " name-set mismatches, " +
                      std::to_string(detail_hits) + "/" + std::to_string(findings) +
                      " findings with probability+level recovered (locations " +
                      std::to_string(location_hits) + "/" + std::to_string(findings) + ")"};
}

// Hypothesis with k clinical errors of k distinct types, each on a distinct
// positive finding.
structured_report perturb(const structured_report& ref, int k, rng_t& rng) {
    structured_report hyp = ref;
    std::vector<std::size_t> targets(hyp.positives.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        targets[i] = i;
    }
    std::shuffle(targets.begin(), targets.end(), rng);
    std::set<std::string> used = positive_set(ref);
    used.insert(ref.negatives.begin(), ref.negatives.end());
    std::vector<std::size_t> to_negate;
    std::array<int, 4> types{0, 1, 2, 3};
    std::shuffle(types.begin(), types.end(), rng);
    for (int e = 0; e < k; ++e) {
        positive_finding& f = hyp.positives[targets[static_cast<std::size_t>(e)]];
        switch (types[static_cast<std::size_t>(e)]) {
            case 0: {  // wrong name
                std::string name;
                do {
                    name = disease_names()[pick(rng, disease_names().size())];
                } while (used.count(name) != 0);
                used.insert(name);
                f.name = name;
                break;
            }
            case 1:  // flipped polarity
                to_negate.push_back(targets[static_cast<std::size_t>(e)]);
                break;
            case 2:  // wrong severity
                f.level = static_cast<severity_level>(
                    (static_cast<int>(f.level) + 1 + static_cast<int>(pick(rng, 3))) % 4);
                break;
            default: {  // wrong location
                const auto& phrases = location_phrases();
                std::string loc;
                do {
                    loc = phrases[pick(rng, phrases.size())];
                } while (f.location && loc == *f.location);
                f.location = loc;
                break;
            }
        }
    }
    std::sort(to_negate.rbegin(), to_negate.rend());
    for (std::size_t index : to_negate) {
        hyp.negatives.push_back(hyp.positives[index].name);
        hyp.positives.erase(hyp.positives.begin() + static_cast<std::ptrdiff_t>(index));
    }
    return canonical_form(hyp);
}

outcome perturbed_corpus_correlation() {
    rng_t rng(808);
    const auto start = clock_type::now();
    std::vector<double> rating;
    std::vector<double> s;
    std::vector<double> b4;
    for (int i = 0; i < 200; ++i) {
        structured_report ref;
        do {
            ref = canonical_form(random_report(rng, {6, 4, true, 0}));
        } while (ref.positives.size() < 4);
        const int k = i % 5;
        const structured_report hyp = perturb(ref, k, rng);
        rating.push_back(-static_cast<double>(k));
        s.push_back(s_score(ref, hyp).s_score);
        b4.push_back(bleu(tokenize(render_report(ref)), tokenize(render_report(hyp)),
                          bleu_config::standard(4)));
    }
    const double tau_s = kendall_tau_b(s, rating);
    const double tau_b = kendall_tau_b(b4, rating);
    const double rho_s = spearman(s, rating);
    const double rho_b = spearman(b4, rating);
    const double seconds = std::chrono::duration<double>(clock_type::now() - start).count();
    std::ostringstream d;
    d.precision(3);
    d << std::fixed << "S-Score tau_b " << tau_s << " rho " << rho_s << "; BLEU-4 tau_b "
      << tau_b << " rho " << rho_b;
    return {tau_s >= 0.8 && tau_s > tau_b && seconds < 30.0, d.str()};
}

outcome golden_evaluate() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("sreval-golden-" + std::to_string(rng_t(std::random_device{}())()));
    fs::create_directories(dir);
    const std::string refs = kFixtures + "/golden/refs.jsonl";
    const std::string hyps = kFixtures + "/golden/hyps.jsonl";
    std::vector<std::string> stdout_runs;
    for (const char* name : {"run1.jsonl", "run2.jsonl"}) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = cli::run({"evaluate", refs, hyps, "--out", (dir / name).string(), "--nlg"},
                                  out, err);
        if (code != 0) {
            fs::remove_all(dir);
            return {false, "evaluate exited " + std::to_string(code) + ": " + err.str()};
        }
        stdout_runs.push_back(out.str());
    }
    const std::string r1 = read_file(dir / "run1.jsonl");
    const std::string r2 = read_file(dir / "run2.jsonl");
    const std::string s1 = read_file(dir / "run1.summary.json");
    const std::string s2 = read_file(dir / "run2.summary.json");
    const std::string golden = read_file(kFixtures + "/golden/results.jsonl");
    const std::string golden_summary = read_file(kFixtures + "/golden/results.summary.json");
    const std::string golden_stdout = read_file(kFixtures + "/golden/stdout.txt");
    const std::size_t lines = static_cast<std::size_t>(std::count(r1.begin(), r1.end(), '\n'));

    // Per-line scores must also agree with direct library calls.
    std::size_t disagreements = 0;
    const auto ref_records = read_corpus(refs, record_kind::structured).records;
    const auto hyp_records = read_corpus(hyps, record_kind::structured).records;
    const auto paired = pair_by_id(ref_records, hyp_records);
    const auto results = read_results(dir / "run1.jsonl");
    for (const auto& [ref, hyp] : paired.paired) {
        if (results.at(ref.id).at("s_score") != s_score(*ref.report, *hyp.report).s_score) {
            ++disagreements;
        }
    }
    fs::remove_all(dir);

    const bool deterministic = r1 == r2 && s1 == s2 && stdout_runs[0] == stdout_runs[1];
    const bool matches = r1 == golden && s1 == golden_summary && stdout_runs[0] == golden_stdout;
    return {deterministic && matches && lines == 25 && disagreements == 0,
            std::to_string(lines) + " pairs; repeat runs " +
                (deterministic ? "byte-identical" : "DIFFER") + "; golden files " +
                (matches ? "match" : "DIFFER") + "; " + std::to_string(disagreements) +
                " score disagreements with the library"};
}

}  // namespace

int main() {
    report("identity law", identity_law);
    report("bounds", bounds);
    report("p-score oracle", p_score_oracle);
    report("gating law", gating_law);
    report("bleu oracle", bleu_oracle);
    report("correlation oracle", correlation_oracle);
    report("repair corpus", repair_corpus);
    report("round trip", round_trip);
    report("rating correlation on perturbed corpus", perturbed_corpus_correlation);
    report("golden evaluate determinism", golden_evaluate);
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
