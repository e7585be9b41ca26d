/**
 * @file correlation.hpp
 * @brief Rank correlation between metric scores and external quality ratings.
 */

#ifndef SREVAL_CORRELATION_HPP
#define SREVAL_CORRELATION_HPP

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sreval {

/// Length mismatch, fewer than two points, or non-finite values.
class correlation_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A constant input vector; the coefficient is undefined.
class degenerate_input_error : public correlation_error {
public:
    using correlation_error::correlation_error;
};

/// 1-based ranks; tied values share the mean of their positions.
[[nodiscard]] std::vector<double> rank_average_ties(std::span<const double> values);

[[nodiscard]] double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of tie-averaged ranks.
[[nodiscard]] double spearman(std::span<const double> x, std::span<const double> y);

enum class kendall_variant {
    tau_b,  ///< (C - D) / sqrt((N0 - Tx)(N0 - Ty))
    tau_a,  ///< (C - D) / N0, no tie correction
};

/// O(n log n) Kendall tau via merge-sort inversion counting.
[[nodiscard]] double kendall_tau(std::span<const double> x, std::span<const double> y,
                                 kendall_variant variant = kendall_variant::tau_b);

inline double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
    return kendall_tau(x, y, kendall_variant::tau_b);
}

struct rated_sample {
    std::string id;
    std::map<std::string, double> metric_scores;
    double external_rating = 0.0;
};

struct correlation_row {
    std::string metric;
    std::optional<double> kendall;
    std::optional<double> spearman;
    std::optional<std::string> error;  ///< set instead of the coefficients for degenerate input
};

/**
 * @brief One row per metric, sorted by metric name.
 *
 * Throws correlation_error for fewer than two samples, non-finite values or
 * a metric missing from some sample. A constant metric yields a row with
 * error set rather than an exception.
 */
[[nodiscard]] std::vector<correlation_row> correlate_metrics(
    const std::vector<rated_sample>& samples, kendall_variant variant = kendall_variant::tau_b);

}  // namespace sreval

#endif  // SREVAL_CORRELATION_HPP
