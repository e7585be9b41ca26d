#include "sreval/nlg_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace sreval {

ngram_counts ngrams(const token_list& tokens, std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("n-gram order must be at least 1");
    }
    ngram_counts counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        ++counts[token_list(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                            tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
    }
    return counts;
}

std::string_view to_string(bleu_smoothing smoothing) noexcept {
    return smoothing == bleu_smoothing::add_one ? "add1" : "none";
}

void bleu_config::check() const {
    if (max_n < 1 || max_n > 4) {
        throw std::invalid_argument("BLEU max_n must be in 1..4, got " + std::to_string(max_n));
    }
}

double bleu(const token_list& reference, const token_list& hypothesis, const bleu_config& config) {
    config.check();
    if (reference.empty()) {
        throw std::invalid_argument("BLEU needs a non-empty reference");
    }
    if (hypothesis.empty()) {
        return 0.0;
    }

    std::size_t order = static_cast<std::size_t>(config.max_n);
    if (config.clip_max_n_to_lengths) {
        order = std::min({order, hypothesis.size(), reference.size()});
    }

    double log_sum = 0.0;
    for (std::size_t n = 1; n <= order; ++n) {
        const ngram_counts hyp = ngrams(hypothesis, n);
        const ngram_counts ref = ngrams(reference, n);
        std::size_t matches = 0;
        for (const auto& [gram, count] : hyp) {
            if (const auto it = ref.find(gram); it != ref.end()) {
                matches += std::min(count, it->second);
            }
        }
        const std::size_t total = hypothesis.size() >= n ? hypothesis.size() - n + 1 : 0;
        double precision = 0.0;
        if (config.smoothing == bleu_smoothing::add_one && n >= 2) {
            precision = (static_cast<double>(matches) + 1.0) / (static_cast<double>(total) + 1.0);
        } else if (total > 0) {
            precision = static_cast<double>(matches) / static_cast<double>(total);
        }
        if (precision == 0.0) {
            return 0.0;
        }
        log_sum += std::log(precision);
    }

    const double geometric_mean = std::exp(log_sum / static_cast<double>(order));
    const double brevity =
        hypothesis.size() < reference.size()
            ? std::exp(1.0 - static_cast<double>(reference.size()) /
                                 static_cast<double>(hypothesis.size()))
            : 1.0;
    return geometric_mean * brevity;
}

std::size_t lcs_length(const token_list& a, const token_list& b) {
    std::vector<std::size_t> row(b.size() + 1, 0);
    for (const auto& x : a) {
        std::size_t diagonal = 0;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t above = row[j];
            row[j] = x == b[j - 1] ? diagonal + 1 : std::max(row[j], row[j - 1]);
            diagonal = above;
        }
    }
    return row[b.size()];
}

double rouge_l(const token_list& reference, const token_list& hypothesis) {
    if (reference.empty() && hypothesis.empty()) {
        return 1.0;
    }
    if (reference.empty() || hypothesis.empty()) {
        return 0.0;
    }
    const auto lcs = static_cast<double>(lcs_length(reference, hypothesis));
    if (lcs == 0.0) {
        return 0.0;
    }
    const double precision = lcs / static_cast<double>(hypothesis.size());
    const double recall = lcs / static_cast<double>(reference.size());
    const double beta2 = kRougeBeta * kRougeBeta;
    return (1.0 + beta2) * precision * recall / (recall + beta2 * precision);
}

double meteor_lite(const token_list& reference, const token_list& hypothesis) {
    if (reference.empty() || hypothesis.empty()) {
        return 0.0;
    }
    // alignment[i] = reference index matched by hypothesis token i.
    std::vector<std::ptrdiff_t> alignment(hypothesis.size(), -1);
    std::vector<bool> used(reference.size(), false);
    std::size_t matches = 0;
    for (std::size_t i = 0; i < hypothesis.size(); ++i) {
        for (std::size_t j = 0; j < reference.size(); ++j) {
            if (!used[j] && reference[j] == hypothesis[i]) {
                used[j] = true;
                alignment[i] = static_cast<std::ptrdiff_t>(j);
                ++matches;
                break;
            }
        }
    }
    if (matches == 0) {
        return 0.0;
    }

    std::size_t chunks = 0;
    std::ptrdiff_t previous_hyp = -2;
    std::ptrdiff_t previous_ref = -2;
    for (std::size_t i = 0; i < hypothesis.size(); ++i) {
        if (alignment[i] < 0) {
            continue;
        }
        const auto hyp_index = static_cast<std::ptrdiff_t>(i);
        if (hyp_index != previous_hyp + 1 || alignment[i] != previous_ref + 1) {
            ++chunks;
        }
        previous_hyp = hyp_index;
        previous_ref = alignment[i];
    }

    const double m = static_cast<double>(matches);
    const double precision = m / static_cast<double>(hypothesis.size());
    const double recall = m / static_cast<double>(reference.size());
    const double fmean = 10.0 * precision * recall / (recall + 9.0 * precision);
    const double fragmentation = static_cast<double>(chunks) / m;
    const double penalty = 0.5 * fragmentation * fragmentation * fragmentation;
    return fmean * (1.0 - penalty);
}

}  // namespace sreval
