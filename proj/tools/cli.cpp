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
#include "sreval/text.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

namespace sreval::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

class usage_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct options {
    std::string lexicon_path;
    std::string weights_text;
    int bleu_max_n = 4;
    std::string smoothing = "add1";
    bool lenient = false;
    std::string rewriter = "rules";
    std::string out_path;
    std::string refs_kind = "structured";
    std::string hyps_kind = "structured";
    std::string input_kind = "structured";
    bool nlg = false;
    bool tau_a = false;

    std::string input;
    std::string second_input;
};

// Resolved, fully concrete configuration.
struct run_config {
    std::shared_ptr<const keyword_lexicon> lexicon;
    hedge_table hedges;
    detail_weights weights;
    bleu_config bleu;
    std::unique_ptr<location_rewriter> rewriter;
};

std::string fixed(double value, int digits) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*f", digits, value);
    return buffer;
}

detail_weights parse_weights(const std::string& text) {
    std::vector<double> values;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception&) {
            throw usage_error("--weights expects three numbers P,L,LOC (got '" + text + "')");
        }
    }
    if (values.size() != 3) {
        throw usage_error("--weights expects three numbers P,L,LOC (got '" + text + "')");
    }
    detail_weights weights{values[0], values[1], values[2]};
    try {
        weights.check();
    } catch (const std::invalid_argument& e) {
        throw usage_error(std::string("--weights: ") + e.what());
    }
    return weights;
}

void require_file(const std::string& path, std::string_view what) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
        throw io_error(std::string(what) + " not found: " + path);
    }
}

run_config resolve(const options& opt) {
    run_config cfg;
    if (opt.lexicon_path.empty()) {
        cfg.lexicon = std::shared_ptr<const keyword_lexicon>(&keyword_lexicon::default_lexicon(),
                                                              [](const keyword_lexicon*) {});
        cfg.hedges = hedge_table::from_lexicon_json(keyword_lexicon::default_lexicon_json());
    } else {
        require_file(opt.lexicon_path, "lexicon file");
        cfg.lexicon = std::make_shared<const keyword_lexicon>(
            keyword_lexicon::from_file(opt.lexicon_path));
        cfg.hedges = hedge_table::from_lexicon_file(opt.lexicon_path);
    }
    if (!opt.weights_text.empty()) {
        cfg.weights = parse_weights(opt.weights_text);
    }
    cfg.bleu.max_n = opt.bleu_max_n;
    cfg.bleu.smoothing = opt.smoothing == "none" ? bleu_smoothing::none : bleu_smoothing::add_one;
    try {
        cfg.bleu.check();
    } catch (const std::invalid_argument& e) {
        throw usage_error(std::string("--bleu-max-n: ") + e.what());
    }
    if (opt.rewriter == "identity") {
        cfg.rewriter = std::make_unique<identity_rewriter>();
    } else {
        cfg.rewriter = std::make_unique<rule_rewriter>();
    }
    return cfg;
}

record_kind parse_kind(const std::string& text) {
    return text == "text" ? record_kind::free_text : record_kind::structured;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw io_error("cannot write " + path);
    }
    out << content;
    out.flush();
    if (!out) {
        throw io_error("error while writing " + path);
    }
}

// Reports per-line errors; returns true when there were any.
bool report_line_errors(const std::string& path, const corpus_read_result& result,
                        std::ostream& err) {
    for (const auto& e : result.errors) {
        err << path << ":" << e.line << ": " << e.message << "\n";
    }
    return !result.errors.empty();
}

structured_report as_report(const corpus_record& record, const run_config& cfg) {
    if (record.report) {
        return *record.report;
    }
    return extract_report(record.payload, *cfg.lexicon, *cfg.rewriter);
}

std::string as_text(const corpus_record& record, const run_config& cfg) {
    if (record.kind == record_kind::free_text) {
        return record.payload;
    }
    return render_report(*record.report, cfg.hedges);
}

int finish(bool had_data_errors, const options& opt, std::ostream& err) {
    if (!had_data_errors) {
        return kExitOk;
    }
    if (opt.lenient) {
        err << "warning: some records were skipped (--lenient)\n";
        return kExitOk;
    }
    return kExitData;
}

// -----------------------------------------------------------------------------

int cmd_repair(const options& opt, std::ostream& out, std::ostream& err) {
    require_file(opt.input, "input file");
    std::ifstream in(opt.input, std::ios::binary);
    if (!in) {
        throw io_error("cannot open " + opt.input);
    }
    std::string repaired_lines;
    std::string sidecar;
    std::string line;
    std::size_t number = 0;
    std::size_t ok = 0;
    std::size_t failed = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (collapse_whitespace(line).empty()) {
            continue;
        }
        auto [text, log] = repair(line);
        ordered_json entry = ordered_json::object();
        entry["line"] = number;
        ordered_json rules = ordered_json::array();
        for (repair_rule rule : log.applied) {
            rules.push_back(std::string(to_string(rule)));
        }
        entry["applied"] = std::move(rules);
        entry["original_length"] = log.original_length;
        entry["repaired_length"] = log.repaired_length;
        std::optional<std::string> error;
        if (log.exhausted) {
            error = "unrepairable output";
        } else {
            try {
                (void)parse_strict(text);
            } catch (const report_schema_error& e) {
                error = "invalid report";
                for (const auto& issue : e.issues()) {
                    *error += "; " + std::string(to_string(issue.kind)) + " at " + issue.path;
                }
            } catch (const codec_error& e) {
                error = e.what();
            }
        }
        if (error) {
            ++failed;
            entry["status"] = "failed";
            entry["error"] = *error;
            err << opt.input << ":" << number << ": " << *error << "\n";
        } else {
            ++ok;
            entry["status"] = log.applied.empty() ? "valid" : "repaired";
            repaired_lines += text;
            repaired_lines.push_back('\n');
        }
        sidecar += entry.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
        sidecar.push_back('\n');
    }
    if (in.bad()) {
        throw io_error("error while reading " + opt.input);
    }
    fs::path sidecar_path(opt.out_path);
    sidecar_path.replace_extension(".repair.jsonl");
    write_text_file(opt.out_path, repaired_lines);
    write_text_file(sidecar_path.string(), sidecar);
    out << "repaired " << ok << " line(s), " << failed << " failed\n";
    return finish(failed > 0, opt, err);
}

int cmd_extract(const options& opt, std::ostream& out, std::ostream& err) {
    const run_config cfg = resolve(opt);
    require_file(opt.input, "input file");
    const corpus_read_result corpus = read_corpus(opt.input, record_kind::free_text);
    const bool had_errors = report_line_errors(opt.input, corpus, err);
    std::string lines;
    for (const auto& record : corpus.records) {
        const structured_report report =
            extract_report(record.payload, *cfg.lexicon, *cfg.rewriter);
        ordered_json doc = ordered_json::object();
        doc["id"] = record.id;
        doc["report"] = ordered_json::parse(serialize(report));
        lines += doc.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
        lines.push_back('\n');
    }
    write_text_file(opt.out_path, lines);
    out << "extracted " << corpus.records.size() << " report(s)\n";
    return finish(had_errors, opt, err);
}

int cmd_render(const options& opt, std::ostream& out, std::ostream& err) {
    const run_config cfg = resolve(opt);
    require_file(opt.input, "input file");
    const corpus_read_result corpus = read_corpus(opt.input, record_kind::structured);
    const bool had_errors = report_line_errors(opt.input, corpus, err);
    std::string lines;
    for (const auto& record : corpus.records) {
        ordered_json doc = ordered_json::object();
        doc["id"] = record.id;
        doc["text"] = render_report(*record.report, cfg.hedges);
        lines += doc.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
        lines.push_back('\n');
    }
    write_text_file(opt.out_path, lines);
    out << "rendered " << corpus.records.size() << " report(s)\n";
    return finish(had_errors, opt, err);
}

nlg_scores score_text(const std::string& reference, const std::string& hypothesis) {
    const token_list ref = tokenize(reference);
    const token_list hyp = tokenize(hypothesis);
    nlg_scores s;
    if (ref.empty()) {
        // No reference n-grams: only an empty hypothesis matches.
        const double v = hyp.empty() ? 1.0 : 0.0;
        return {v, v, v, v, v, v};
    }
    s.bleu1 = bleu(ref, hyp, bleu_config::standard(1));
    s.bleu2 = bleu(ref, hyp, bleu_config::standard(2));
    s.bleu3 = bleu(ref, hyp, bleu_config::standard(3));
    s.bleu4 = bleu(ref, hyp, bleu_config::standard(4));
    s.rouge_l = rouge_l(ref, hyp);
    s.meteor = meteor_lite(ref, hyp);
    return s;
}

int cmd_evaluate(const options& opt, std::ostream& out, std::ostream& err) {
    const run_config cfg = resolve(opt);
    require_file(opt.input, "references file");
    require_file(opt.second_input, "hypotheses file");
    const corpus_read_result refs = read_corpus(opt.input, parse_kind(opt.refs_kind));
    const corpus_read_result hyps = read_corpus(opt.second_input, parse_kind(opt.hyps_kind));
    bool had_errors = report_line_errors(opt.input, refs, err);
    had_errors = report_line_errors(opt.second_input, hyps, err) || had_errors;

    const pairing paired = pair_by_id(refs.records, hyps.records);
    for (const auto& id : paired.missing_in_hyp) {
        err << "unpaired id '" << id << "': no hypothesis\n";
    }
    for (const auto& id : paired.missing_in_ref) {
        err << "unpaired id '" << id << "': no reference\n";
    }
    had_errors = had_errors || !paired.missing_in_hyp.empty() || !paired.missing_in_ref.empty();

    std::vector<report_pair> pairs;
    std::vector<nlg_scores> nlg;
    for (const auto& [ref, hyp] : paired.paired) {
        pairs.push_back({ref.id, as_report(ref, cfg), as_report(hyp, cfg)});
        if (opt.nlg) {
            nlg.push_back(score_text(as_text(ref, cfg), as_text(hyp, cfg)));
        }
    }
    const corpus_evaluation evaluation = evaluate_corpus(std::move(pairs), cfg.weights, cfg.bleu);

    run_summary_config summary;
    summary.weights = cfg.weights;
    summary.bleu = cfg.bleu;
    summary.lexicon_fingerprint = cfg.lexicon->fingerprint();
    summary.extra["refs_kind"] = opt.refs_kind;
    summary.extra["hyps_kind"] = opt.hyps_kind;
    summary.extra["rewriter"] = opt.rewriter;
    summary.extra["nlg"] = opt.nlg ? "on" : "off";
    write_results(evaluation, summary, opt.out_path, opt.nlg ? &nlg : nullptr);

    out << "pairs   " << evaluation.reports.size() << "\n";
    if (evaluation.means) {
        out << "P-Score " << fixed(evaluation.means->p_score, 3) << "\n";
        out << "D-Score " << fixed(evaluation.means->d_score, 3) << "\n";
        out << "S-Score " << fixed(evaluation.means->s_score, 3) << "\n";
    } else {
        out << "S-Score n/a (no pairs)\n";
    }
    return finish(had_errors, opt, err);
}

int cmd_stats(const options& opt, std::ostream& out, std::ostream& err) {
    require_file(opt.input, "input file");
    const corpus_read_result corpus = read_corpus(opt.input, record_kind::structured);
    const bool had_errors = report_line_errors(opt.input, corpus, err);
    std::vector<structured_report> reports;
    for (const auto& record : corpus.records) {
        reports.push_back(*record.report);
    }
    const corpus_stats stats = compute_corpus_stats(reports);

    out << "reports                 " << stats.reports << "\n";
    out << "positive findings       " << stats.positive_findings << "\n";
    out << "negative findings       " << stats.negative_findings << "\n";
    out << "probability 1/2/3/none  " << stats.probability_histogram[0] << " / "
        << stats.probability_histogram[1] << " / " << stats.probability_histogram[2] << " / "
        << stats.probability_absent << "\n";
    for (auto level : {severity_level::unspecified, severity_level::mild,
                       severity_level::moderate, severity_level::severe}) {
        const auto it = stats.level_histogram.find(level);
        std::string label = "level " + std::string(to_string(level));
        label.resize(24, ' ');
        out << label << (it == stats.level_histogram.end() ? 0 : it->second) << "\n";
    }
    out << "location presence rate  " << fixed(stats.location_presence_rate(), 3) << "\n";
    for (const auto& [name, count] : stats.disease_frequency) {
        std::string label = "  " + name;
        if (label.size() < 24) {
            label.resize(24, ' ');
        } else {
            label.push_back(' ');
        }
        out << label << count << "\n";
    }
    if (!opt.out_path.empty()) {
        write_text_file(opt.out_path, stats_json(stats));
    }
    return finish(had_errors, opt, err);
}

int cmd_correlate(const options& opt, std::ostream& out, std::ostream& err) {
    require_file(opt.input, "results file");
    require_file(opt.second_input, "ratings file");
    const auto results = read_results(opt.input);
    const auto ratings = read_ratings(opt.second_input);
    std::vector<std::string> missing;
    const std::vector<rated_sample> samples = join_ratings(results, ratings, &missing);
    for (const auto& id : missing) {
        err << "id '" << id << "' has no counterpart in the other file\n";
    }
    if (samples.size() < 2) {
        err << "error: correlation needs at least two joined ids (got " << samples.size()
            << ")\n";
        return kExitData;
    }
    const kendall_variant variant = opt.tau_a ? kendall_variant::tau_a : kendall_variant::tau_b;
    const std::vector<correlation_row> rows = correlate_metrics(samples, variant);

    const std::string kendall_label = opt.tau_a ? "kendall_tau_a" : "kendall_tau_b";
    out << "metric            " << kendall_label << "   spearman\n";
    ordered_json doc = ordered_json::object();
    doc["samples"] = samples.size();
    doc["kendall_variant"] = opt.tau_a ? "tau-a" : "tau-b";
    ordered_json json_rows = ordered_json::array();
    for (const auto& row : rows) {
        std::string label = row.metric;
        if (label.size() < 18) {
            label.resize(18, ' ');
        } else {
            label.push_back(' ');
        }
        ordered_json r = ordered_json::object();
        r["metric"] = row.metric;
        if (row.error) {
            out << label << "n/a (" << *row.error << ")\n";
            r["kendall"] = nullptr;
            r["spearman"] = nullptr;
            r["error"] = *row.error;
        } else {
            std::string k = fixed(*row.kendall, 4);
            k.resize(16, ' ');
            out << label << k << fixed(*row.spearman, 4) << "\n";
            r["kendall"] = *row.kendall;
            r["spearman"] = *row.spearman;
        }
        json_rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(json_rows);
    if (!opt.out_path.empty()) {
        write_text_file(opt.out_path,
                        doc.dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n");
    }
    return finish(!missing.empty(), opt, err);
}

void add_scoring_flags(CLI::App* cmd, options& opt) {
    cmd->add_option("--weights", opt.weights_text, "detail weights P,L,LOC (non-negative, sum 1)");
    cmd->add_option("--bleu-max-n", opt.bleu_max_n, "location BLEU order (1-4)")
        ->check(CLI::Range(1, 4));
    cmd->add_option("--smoothing", opt.smoothing, "location BLEU smoothing")
        ->check(CLI::IsMember({"none", "add1"}));
}

void add_lexicon_flags(CLI::App* cmd, options& opt) {
    cmd->add_option("--lexicon", opt.lexicon_path, "lexicon JSON file (default: bundled)");
    cmd->add_option("--rewriter", opt.rewriter, "location rephraser")
        ->check(CLI::IsMember({"rules", "identity"}));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    scoped_warning_sink sink([&err](std::string_view message) {
        err << "warning: " << message << "\n";
    });

    options opt;
    CLI::App app{"Structured radiology report evaluation"};
    app.name("sreval");
    app.require_subcommand(1);

    CLI::App* repair_cmd = app.add_subcommand("repair", "repair raw model output lines");
    repair_cmd->add_option("raw", opt.input, "raw output, one per line")->required();
    repair_cmd->add_option("--out", opt.out_path, "repaired lines")->required();
    repair_cmd->add_flag("--lenient", opt.lenient, "exit 0 despite failed lines");

    CLI::App* extract_cmd = app.add_subcommand("extract", "extract structured reports from text");
    extract_cmd->add_option("corpus", opt.input, "free-text corpus (.jsonl)")->required();
    extract_cmd->add_option("--out", opt.out_path, "structured corpus")->required();
    extract_cmd->add_flag("--lenient", opt.lenient, "exit 0 despite bad lines");
    add_lexicon_flags(extract_cmd, opt);

    CLI::App* render_cmd = app.add_subcommand("render", "render structured reports as sentences");
    render_cmd->add_option("corpus", opt.input, "structured corpus (.jsonl)")->required();
    render_cmd->add_option("--out", opt.out_path, "text corpus")->required();
    render_cmd->add_option("--lexicon", opt.lexicon_path, "lexicon JSON with hedge_render");
    render_cmd->add_flag("--lenient", opt.lenient, "exit 0 despite bad lines");

    CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "score hypotheses against references");
    evaluate_cmd->add_option("refs", opt.input, "reference corpus")->required();
    evaluate_cmd->add_option("hyps", opt.second_input, "hypothesis corpus")->required();
    evaluate_cmd->add_option("--out", opt.out_path, "per-report results (.jsonl)")->required();
    evaluate_cmd->add_option("--refs-kind", opt.refs_kind, "reference input kind")
        ->check(CLI::IsMember({"structured", "text"}));
    evaluate_cmd->add_option("--hyps-kind", opt.hyps_kind, "hypothesis input kind")
        ->check(CLI::IsMember({"structured", "text"}));
    evaluate_cmd->add_flag("--nlg", opt.nlg, "add BLEU/ROUGE-L/METEOR on report text");
    evaluate_cmd->add_flag("--lenient", opt.lenient, "exit 0 despite unpaired or bad records");
    add_lexicon_flags(evaluate_cmd, opt);
    add_scoring_flags(evaluate_cmd, opt);

    CLI::App* stats_cmd = app.add_subcommand("stats", "corpus statistics");
    stats_cmd->add_option("corpus", opt.input, "structured corpus (.jsonl)")->required();
    stats_cmd->add_option("--out", opt.out_path, "summary JSON");
    stats_cmd->add_flag("--lenient", opt.lenient, "exit 0 despite bad lines");

    CLI::App* correlate_cmd = app.add_subcommand("correlate", "correlate metrics with ratings");
    correlate_cmd->add_option("results", opt.input, "results from evaluate")->required();
    correlate_cmd->add_option("ratings", opt.second_input, "ratings (.jsonl)")->required();
    correlate_cmd->add_option("--out", opt.out_path, "correlation table JSON");
    correlate_cmd->add_flag("--tau-a", opt.tau_a, "use Kendall tau-a instead of tau-b");
    correlate_cmd->add_flag("--lenient", opt.lenient, "exit 0 despite unmatched ids");

    std::vector<std::string> argv_storage{"sreval"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_storage) {
        argv.push_back(a.c_str());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (repair_cmd->parsed()) {
            return cmd_repair(opt, out, err);
        }
        if (extract_cmd->parsed()) {
            return cmd_extract(opt, out, err);
        }
        if (render_cmd->parsed()) {
            return cmd_render(opt, out, err);
        }
        if (evaluate_cmd->parsed()) {
            return cmd_evaluate(opt, out, err);
        }
        if (stats_cmd->parsed()) {
            return cmd_stats(opt, out, err);
        }
        return cmd_correlate(opt, out, err);
    } catch (const usage_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const io_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
}

}  // namespace sreval::cli
