#ifndef ADAPT_PREPROCESS_HPP
#define ADAPT_PREPROCESS_HPP

#include <string>
#include <vector>

#include "adapt/error.hpp"

namespace adapt {

struct PreprocessConfig {
    int diff_order = 1;
    int smooth_window = 3;
    int lag_count = 5;
    // When set, diff/smooth/lag are each computed on the raw series instead
    // of composing diff -> smooth -> lag.
    bool independent_columns = false;
};

struct PreprocessedSeries {
    std::vector<double> timestamps;
    std::vector<double> value;
    std::vector<double> diff;
    std::vector<double> smooth;
    std::vector<std::vector<double>> lags; // lags[k-1] is lag_k
    int dropped_prefix = 0;
};

/// output[i] = input[i] - input[i-order]; the first `order` entries are NaN.
std::vector<double> difference(const std::vector<double>& series, int order);

/// Trailing rolling mean over `window` entries; first window-1 entries are NaN.
std::vector<double> smooth(const std::vector<double>& series, int window);

/// Columns lag_1..lag_count, where lag_k[i] = series[i-k] (NaN for i < k).
std::vector<std::vector<double>> lag(const std::vector<double>& series, int count);

PreprocessedSeries run_pipeline(const std::vector<double>& series,
                                const std::vector<double>& timestamps,
                                const PreprocessConfig& config);

std::string preprocessed_to_csv(const PreprocessedSeries& s, const std::string& subject_id,
                                const std::string& metric);

} // namespace adapt

#endif
