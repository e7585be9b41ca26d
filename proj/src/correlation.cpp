#include "sreval/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>

namespace sreval {

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw correlation_error("correlation inputs differ in length (" +
                                std::to_string(x.size()) + " vs " + std::to_string(y.size()) +
                                ")");
    }
    if (x.size() < 2) {
        throw correlation_error("correlation needs at least two points");
    }
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(x.begin(), x.end(), finite) || !std::all_of(y.begin(), y.end(), finite)) {
        throw correlation_error("correlation inputs must be finite");
    }
}

// Pairs sharing a value, summed over runs of equal values in a sorted range.
template <typename It, typename Eq>
std::uint64_t tied_pairs(It first, It last, Eq equal) {
    std::uint64_t total = 0;
    while (first != last) {
        It run_end = std::next(first);
        while (run_end != last && equal(*first, *run_end)) {
            ++run_end;
        }
        const auto t = static_cast<std::uint64_t>(std::distance(first, run_end));
        total += t * (t - 1) / 2;
        first = run_end;
    }
    return total;
}

// Sorts values ascending and returns the number of inversions removed.
std::uint64_t merge_sort_inversions(std::vector<double>& values, std::vector<double>& buffer,
                                    std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) {
        return 0;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t swaps = merge_sort_inversions(values, buffer, lo, mid) +
                          merge_sort_inversions(values, buffer, mid, hi);
    std::size_t i = lo;
    std::size_t j = mid;
    std::size_t k = lo;
    while (i < mid && j < hi) {
        if (values[j] < values[i]) {
            buffer[k++] = values[j++];
            swaps += mid - i;
        } else {
            buffer[k++] = values[i++];
        }
    }
    while (i < mid) {
        buffer[k++] = values[i++];
    }
    while (j < hi) {
        buffer[k++] = values[j++];
    }
    std::copy(buffer.begin() + static_cast<std::ptrdiff_t>(lo),
              buffer.begin() + static_cast<std::ptrdiff_t>(hi),
              values.begin() + static_cast<std::ptrdiff_t>(lo));
    return swaps;
}

}  // namespace

std::vector<double> rank_average_ties(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && values[order[j]] == values[order[i]]) {
            ++j;
        }
        // Positions i..j-1 (0-based) share the mean 1-based rank.
        const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) {
            ranks[order[k]] = rank;
        }
        i = j;
    }
    return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y);
    const auto n = static_cast<double>(x.size());
    const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw degenerate_input_error("correlation is undefined for a constant vector");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y);
    const std::vector<double> rx = rank_average_ties(x);
    const std::vector<double> ry = rank_average_ties(y);
    return pearson(rx, ry);
}

double kendall_tau(std::span<const double> x, std::span<const double> y, kendall_variant variant) {
    check_pair(x, y);
    const std::size_t n = x.size();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
    });

    const std::uint64_t ties_x = tied_pairs(order.begin(), order.end(),
                                            [&](std::size_t a, std::size_t b) { return x[a] == x[b]; });
    const std::uint64_t ties_xy =
        tied_pairs(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] == x[b] && y[a] == y[b]; });

    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        ys[i] = y[order[i]];
    }
    std::vector<double> buffer(n);
    const std::uint64_t discordant = merge_sort_inversions(ys, buffer, 0, n);
    const std::uint64_t ties_y =
        tied_pairs(ys.begin(), ys.end(), [](double a, double b) { return a == b; });

    const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    if (ties_x == total || ties_y == total) {
        throw degenerate_input_error("correlation is undefined for a constant vector");
    }
    // Pairs tied on neither side are either concordant or discordant.
    const auto untied = static_cast<double>(total - ties_x - ties_y + ties_xy);
    const double c_minus_d = untied - 2.0 * static_cast<double>(discordant);

    double tau = 0.0;
    if (variant == kendall_variant::tau_a) {
        tau = c_minus_d / static_cast<double>(total);
    } else {
        tau = c_minus_d / std::sqrt(static_cast<double>(total - ties_x) *
                                    static_cast<double>(total - ties_y));
    }
    return std::clamp(tau, -1.0, 1.0);
}

std::vector<correlation_row> correlate_metrics(const std::vector<rated_sample>& samples,
                                               kendall_variant variant) {
    if (samples.size() < 2) {
        throw correlation_error("need at least two rated samples");
    }
    std::set<std::string> metrics;
    for (const auto& s : samples) {
        for (const auto& [name, _] : s.metric_scores) {
            if (name.empty()) {
                throw correlation_error("metric names must be non-empty (sample '" + s.id + "')");
            }
            metrics.insert(name);
        }
    }

    std::vector<double> ratings;
    ratings.reserve(samples.size());
    for (const auto& s : samples) {
        ratings.push_back(s.external_rating);
    }

    std::vector<correlation_row> rows;
    for (const auto& metric : metrics) {
        std::vector<double> scores;
        scores.reserve(samples.size());
        for (const auto& s : samples) {
            const auto it = s.metric_scores.find(metric);
            if (it == s.metric_scores.end()) {
                throw correlation_error("sample '" + s.id + "' has no score for metric '" +
                                        metric + "'");
            }
            scores.push_back(it->second);
        }
        correlation_row row;
        row.metric = metric;
        try {
            row.kendall = kendall_tau(scores, ratings, variant);
            row.spearman = spearman(scores, ratings);
        } catch (const degenerate_input_error& e) {
            row.kendall.reset();
            row.spearman.reset();
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace sreval
