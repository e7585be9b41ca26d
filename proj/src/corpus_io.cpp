#include "sreval/corpus_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace sreval {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(record_kind kind) noexcept {
    return kind == record_kind::structured ? "structured" : "free-text";
}

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw io_error("cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw io_error("error while reading " + path.string());
    }
    return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw io_error("cannot write " + path.string());
    }
    out << content;
    out.flush();
    if (!out) {
        throw io_error("error while writing " + path.string());
    }
}

// Splits on '\n', dropping a trailing '\r'. Returns (1-based line number, text).
std::vector<std::pair<std::size_t, std::string_view>> split_lines(std::string_view content) {
    std::vector<std::pair<std::size_t, std::string_view>> lines;
    std::size_t number = 0;
    std::size_t start = 0;
    while (start <= content.size()) {
        std::size_t end = content.find('\n', start);
        if (end == std::string_view::npos) {
            end = content.size();
        }
        ++number;
        std::string_view line = content.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        lines.emplace_back(number, line);
        if (end == content.size()) {
            break;
        }
        start = end + 1;
    }
    return lines;
}

bool is_blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(),
                       [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

std::optional<std::string> read_id(const json& doc) {
    if (!doc.contains("id")) {
        return std::nullopt;
    }
    const json& id = doc.at("id");
    if (id.is_string()) {
        return id.get<std::string>();
    }
    if (id.is_number_integer()) {
        return id.dump();
    }
    return std::nullopt;
}

std::string describe_issues(const std::vector<validation_issue>& issues) {
    std::string out;
    for (const auto& issue : issues) {
        if (!out.empty()) {
            out += "; ";
        }
        out += std::string(to_string(issue.kind)) + " at " + issue.path + ": " + issue.message;
    }
    return out;
}

corpus_record parse_record(const json& doc, record_kind kind) {
    corpus_record record;
    record.kind = kind;
    if (kind == record_kind::free_text) {
        if (!doc.contains("text") || !doc.at("text").is_string()) {
            throw std::runtime_error("expected a string field 'text'");
        }
        record.payload = doc.at("text").get<std::string>();
        return record;
    }

    if (!doc.contains("report")) {
        throw std::runtime_error("expected a field 'report'");
    }
    const json& report = doc.at("report");
    try {
        if (report.is_object()) {
            record.report = parse_strict(report.dump(-1, ' ', false, json::error_handler_t::replace));
        } else if (report.is_string()) {
            lenient_result parsed = parse_lenient(report.get<std::string>());
            record.report = std::move(parsed.report);
            record.repairs = std::move(parsed.log.applied);
        } else {
            throw std::runtime_error("'report' must be an object or a string");
        }
    } catch (const report_schema_error& e) {
        throw std::runtime_error("invalid report: " + describe_issues(e.issues()));
    }
    record.payload = serialize(*record.report);
    return record;
}

}  // namespace

corpus_read_result parse_corpus(std::string_view content, record_kind expected_kind) {
    corpus_read_result result;
    std::map<std::string, std::size_t> first_line;
    std::size_t non_blank = 0;

    for (const auto& [number, line] : split_lines(content)) {
        if (is_blank(line)) {
            continue;
        }
        ++non_blank;
        const json doc = json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (!doc.is_object()) {
            result.errors.push_back({number, "line is not a JSON object"});
            continue;
        }
        const std::optional<std::string> id = read_id(doc);
        if (!id || id->empty()) {
            result.errors.push_back({number, "missing or empty 'id'"});
            continue;
        }
        if (const auto [it, inserted] = first_line.emplace(*id, number); !inserted) {
            throw corpus_error("duplicate id '" + *id + "' on line " + std::to_string(number) +
                               " (first seen on line " + std::to_string(it->second) + ")");
        }
        try {
            corpus_record record = parse_record(doc, expected_kind);
            record.id = *id;
            result.records.push_back(std::move(record));
        } catch (const std::exception& e) {
            result.errors.push_back({number, e.what()});
        }
    }

    if (non_blank > 0 && result.records.empty()) {
        std::string what = "no line of the corpus could be read";
        if (!result.errors.empty()) {
            what += " (line " + std::to_string(result.errors.front().line) + ": " +
                    result.errors.front().message + ")";
        }
        throw corpus_error(what);
    }
    return result;
}

corpus_read_result read_corpus(const std::filesystem::path& path, record_kind expected_kind) {
    const std::string content = read_file(path);
    try {
        return parse_corpus(content, expected_kind);
    } catch (const corpus_error& e) {
        throw corpus_error(path.string() + ": " + e.what());
    }
}

pairing pair_by_id(const std::vector<corpus_record>& refs, const std::vector<corpus_record>& hyps) {
    std::map<std::string, const corpus_record*> ref_index;
    std::map<std::string, const corpus_record*> hyp_index;
    for (const auto& r : refs) {
        ref_index.emplace(r.id, &r);
    }
    for (const auto& h : hyps) {
        hyp_index.emplace(h.id, &h);
    }
    pairing out;
    for (const auto& [id, ref] : ref_index) {
        const auto it = hyp_index.find(id);
        if (it == hyp_index.end()) {
            out.missing_in_hyp.push_back(id);
        } else {
            out.paired.emplace_back(*ref, *it->second);
        }
    }
    for (const auto& [id, _] : hyp_index) {
        if (ref_index.count(id) == 0) {
            out.missing_in_ref.push_back(id);
        }
    }
    return out;
}

// =============================================================================
// Results
// =============================================================================

std::filesystem::path summary_path_for(const std::filesystem::path& results) {
    std::filesystem::path summary = results;
    summary.replace_extension(".summary.json");
    return summary;
}

std::string result_line(const std::string& id, const score_breakdown& b, const nlg_scores* nlg) {
    ordered_json doc = ordered_json::object();
    doc["id"] = id;
    doc["p_score_pos"] = b.p_score_pos;
    doc["p_score_neg"] = b.p_score_neg;
    doc["p_score"] = b.p_score;
    doc["d_score"] = b.d_score;
    doc["s_score"] = b.s_score;
    ordered_json rows = ordered_json::array();
    for (const auto& row : b.per_finding) {
        ordered_json r = ordered_json::object();
        r["name"] = row.name;
        r["matched"] = row.matched;
        r["s_prob"] = row.s_prob;
        r["s_level"] = row.s_level;
        r["s_loc"] = row.s_loc;
        rows.push_back(std::move(r));
    }
    doc["per_finding"] = std::move(rows);
    if (nlg != nullptr) {
        doc["nlg"] = {{"bleu1", nlg->bleu1},   {"bleu2", nlg->bleu2},
                      {"bleu3", nlg->bleu3},   {"bleu4", nlg->bleu4},
                      {"rouge_l", nlg->rouge_l}, {"meteor", nlg->meteor}};
    }
    return doc.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

std::string summary_json(const corpus_evaluation& evaluation, const run_summary_config& config) {
    ordered_json doc = ordered_json::object();
    doc["count"] = evaluation.reports.size();
    if (evaluation.means) {
        const corpus_means& m = *evaluation.means;
        doc["means"] = {{"p_score_pos", m.p_score_pos},
                        {"p_score_neg", m.p_score_neg},
                        {"p_score", m.p_score},
                        {"d_score", m.d_score},
                        {"s_score", m.s_score}};
    } else {
        doc["means"] = nullptr;
    }
    ordered_json cfg = ordered_json::object();
    cfg["weights"] = {{"probability", config.weights.probability},
                      {"level", config.weights.level},
                      {"location", config.weights.location}};
    cfg["bleu"] = {{"max_n", config.bleu.max_n},
                   {"smoothing", std::string(to_string(config.bleu.smoothing))},
                   {"clip_max_n_to_lengths", config.bleu.clip_max_n_to_lengths}};
    cfg["lexicon_fingerprint"] = config.lexicon_fingerprint;
    for (const auto& [key, value] : config.extra) {
        cfg[key] = value;
    }
    doc["config"] = std::move(cfg);
    return doc.dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n";
}

void write_results(const corpus_evaluation& evaluation, const run_summary_config& config,
                   const std::filesystem::path& path, const std::vector<nlg_scores>* nlg) {
    if (nlg != nullptr && nlg->size() != evaluation.reports.size()) {
        throw std::invalid_argument("nlg scores are not aligned with the evaluated reports");
    }
    std::string lines;
    for (std::size_t i = 0; i < evaluation.reports.size(); ++i) {
        const auto& [id, breakdown] = evaluation.reports[i];
        lines += result_line(id, breakdown, nlg != nullptr ? &(*nlg)[i] : nullptr);
        lines.push_back('\n');
    }
    write_file(path, lines);
    write_file(summary_path_for(path), summary_json(evaluation, config));
}

std::map<std::string, std::map<std::string, double>> read_results(
    const std::filesystem::path& path) {
    const std::string content = read_file(path);
    std::map<std::string, std::map<std::string, double>> out;
    for (const auto& [number, line] : split_lines(content)) {
        if (is_blank(line)) {
            continue;
        }
        const json doc = json::parse(line, nullptr, /*allow_exceptions=*/false);
        const std::optional<std::string> id = doc.is_object() ? read_id(doc) : std::nullopt;
        if (!id) {
            throw corpus_error(path.string() + ": line " + std::to_string(number) +
                               " is not a result record with an id");
        }
        std::map<std::string, double> metrics;
        for (const auto& [key, value] : doc.items()) {
            if (value.is_number()) {
                metrics[key] = value.get<double>();
            } else if (key == "nlg" && value.is_object()) {
                for (const auto& [sub, v] : value.items()) {
                    if (v.is_number()) {
                        metrics["nlg." + sub] = v.get<double>();
                    }
                }
            }
        }
        if (!out.emplace(*id, std::move(metrics)).second) {
            throw corpus_error(path.string() + ": duplicate id '" + *id + "' on line " +
                               std::to_string(number));
        }
    }
    return out;
}

std::map<std::string, double> read_ratings(const std::filesystem::path& path) {
    const std::string content = read_file(path);
    std::map<std::string, double> out;
    for (const auto& [number, line] : split_lines(content)) {
        if (is_blank(line)) {
            continue;
        }
        const json doc = json::parse(line, nullptr, /*allow_exceptions=*/false);
        const std::optional<std::string> id = doc.is_object() ? read_id(doc) : std::nullopt;
        if (!id || !doc.contains("rating") || !doc.at("rating").is_number()) {
            throw corpus_error(path.string() + ": line " + std::to_string(number) +
                               " needs an 'id' and a numeric 'rating'");
        }
        if (!out.emplace(*id, doc.at("rating").get<double>()).second) {
            throw corpus_error(path.string() + ": duplicate id '" + *id + "' on line " +
                               std::to_string(number));
        }
    }
    return out;
}

std::vector<rated_sample> join_ratings(
    const std::map<std::string, std::map<std::string, double>>& results,
    const std::map<std::string, double>& ratings, std::vector<std::string>* missing) {
    std::vector<rated_sample> samples;
    for (const auto& [id, metrics] : results) {
        const auto it = ratings.find(id);
        if (it == ratings.end()) {
            if (missing != nullptr) {
                missing->push_back(id);
            }
            continue;
        }
        samples.push_back({id, metrics, it->second});
    }
    if (missing != nullptr) {
        for (const auto& [id, _] : ratings) {
            if (results.count(id) == 0) {
                missing->push_back(id);
            }
        }
    }
    return samples;
}

// =============================================================================
// Statistics
// =============================================================================

double corpus_stats::location_presence_rate() const noexcept {
    if (positive_findings == 0) {
        return 0.0;
    }
    return static_cast<double>(located_findings) / static_cast<double>(positive_findings);
}

corpus_stats& corpus_stats::operator+=(const corpus_stats& other) {
    reports += other.reports;
    positive_findings += other.positive_findings;
    negative_findings += other.negative_findings;
    for (const auto& [name, count] : other.disease_frequency) {
        disease_frequency[name] += count;
    }
    for (std::size_t i = 0; i < probability_histogram.size(); ++i) {
        probability_histogram[i] += other.probability_histogram[i];
    }
    probability_absent += other.probability_absent;
    for (const auto& [level, count] : other.level_histogram) {
        level_histogram[level] += count;
    }
    located_findings += other.located_findings;
    return *this;
}

corpus_stats compute_corpus_stats(const std::vector<structured_report>& reports) {
    corpus_stats stats;
    for (const auto& report : reports) {
        ++stats.reports;
        stats.negative_findings += report.negatives.size();
        for (const auto& f : report.positives) {
            ++stats.positive_findings;
            ++stats.disease_frequency[normalize_name(f.name)];
            if (f.probability) {
                ++stats.probability_histogram[static_cast<std::size_t>(f.probability->value() - 1)];
            } else {
                ++stats.probability_absent;
            }
            ++stats.level_histogram[f.level];
            if (f.location) {
                ++stats.located_findings;
            }
        }
    }
    return stats;
}

std::string stats_json(const corpus_stats& stats) {
    ordered_json doc = ordered_json::object();
    doc["reports"] = stats.reports;
    doc["positive_findings"] = stats.positive_findings;
    doc["negative_findings"] = stats.negative_findings;
    ordered_json diseases = ordered_json::object();
    for (const auto& [name, count] : stats.disease_frequency) {
        diseases[name] = count;
    }
    doc["disease_frequency"] = std::move(diseases);
    doc["probability_histogram"] = {{"1", stats.probability_histogram[0]},
                                    {"2", stats.probability_histogram[1]},
                                    {"3", stats.probability_histogram[2]},
                                    {"absent", stats.probability_absent}};
    ordered_json levels = ordered_json::object();
    for (auto level : {severity_level::unspecified, severity_level::mild,
                       severity_level::moderate, severity_level::severe}) {
        const auto it = stats.level_histogram.find(level);
        levels[std::string(to_string(level))] = it == stats.level_histogram.end() ? 0 : it->second;
    }
    doc["level_histogram"] = std::move(levels);
    doc["location_presence_rate"] = stats.location_presence_rate();
    return doc.dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n";
}

}  // namespace sreval
