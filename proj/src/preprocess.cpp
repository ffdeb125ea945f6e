#include "adapt/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adapt/trace.hpp"

namespace adapt {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::vector<double> difference(const std::vector<double>& series, int order) {
    if (order < 0) throw Error(Errc::InvalidConfig, "difference order must be >= 0");
    if (static_cast<int>(series.size()) <= order)
        throw Error(Errc::SeriesTooShort,
                    "difference needs length > " + std::to_string(order) + ", got " +
                        std::to_string(series.size()));
    std::vector<double> out(series.size(), kNaN);
    for (std::size_t i = order; i < series.size(); ++i)
        out[i] = series[i] - series[i - order];
    if (order == 0) out = series;
    return out;
}

std::vector<double> smooth(const std::vector<double>& series, int window) {
    if (window < 1) throw Error(Errc::InvalidConfig, "smooth window must be >= 1");
    std::vector<double> out(series.size(), kNaN);
    // windows containing NaN (e.g. a difference prefix) stay NaN, so the mean
    // is computed per window rather than with a running sum
    std::size_t w = static_cast<std::size_t>(window);
    for (std::size_t i = w - 1; i < series.size(); ++i) {
        double acc = 0.0;
        for (std::size_t j = i + 1 - w; j <= i; ++j) acc += series[j];
        if (!std::isnan(acc)) out[i] = acc / window;
    }
    return out;
}

std::vector<std::vector<double>> lag(const std::vector<double>& series, int count) {
    if (count < 0) throw Error(Errc::InvalidConfig, "lag count must be >= 0");
    std::vector<std::vector<double>> out;
    out.reserve(count);
    for (int k = 1; k <= count; ++k) {
        std::vector<double> col(series.size(), kNaN);
        for (std::size_t i = k; i < series.size(); ++i)
            col[i] = series[i - k];
        out.push_back(std::move(col));
    }
    return out;
}

PreprocessedSeries run_pipeline(const std::vector<double>& series,
                                const std::vector<double>& timestamps,
                                const PreprocessConfig& cfg) {
    if (series.size() != timestamps.size())
        throw Error(Errc::LengthMismatch, "series and timestamps differ in length");
    int prefix;
    if (cfg.independent_columns)
        prefix = std::max({cfg.diff_order, cfg.smooth_window - 1, cfg.lag_count});
    else
        prefix = cfg.diff_order + (cfg.smooth_window - 1) + cfg.lag_count;
    if (static_cast<int>(series.size()) <= prefix)
        throw Error(Errc::SeriesTooShort,
                    "pipeline needs length > " + std::to_string(prefix) + ", got " +
                        std::to_string(series.size()));

    std::vector<double> diffed = cfg.diff_order > 0 ? difference(series, cfg.diff_order) : series;
    std::vector<double> smoothed;
    std::vector<std::vector<double>> lagged;
    if (cfg.independent_columns) {
        smoothed = smooth(series, cfg.smooth_window);
        lagged = lag(series, cfg.lag_count);
    } else {
        // NaN prefix of the diff column propagates through the rolling mean.
        smoothed = smooth(diffed, cfg.smooth_window);
        lagged = lag(smoothed, cfg.lag_count);
    }

    PreprocessedSeries out;
    out.dropped_prefix = prefix;
    std::size_t n = series.size();
    for (std::size_t i = prefix; i < n; ++i) {
        out.timestamps.push_back(timestamps[i]);
        out.value.push_back(series[i]);
        out.diff.push_back(diffed[i]);
        out.smooth.push_back(smoothed[i]);
    }
    out.lags.resize(lagged.size());
    for (std::size_t k = 0; k < lagged.size(); ++k)
        for (std::size_t i = prefix; i < n; ++i)
            out.lags[k].push_back(lagged[k][i]);
    return out;
}

std::string preprocessed_to_csv(const PreprocessedSeries& s, const std::string& subject_id,
                                const std::string& metric) {
    std::string out = "timestamp_h,subject_id,metric,value,diff,smooth";
    for (std::size_t k = 1; k <= s.lags.size(); ++k)
        out += ",lag_" + std::to_string(k);
    out += '\n';
    for (std::size_t i = 0; i < s.timestamps.size(); ++i) {
        out += format_double(s.timestamps[i]);
        out += ',' + subject_id + ',' + metric;
        out += ',' + format_double(s.value[i]);
        out += ',' + format_double(s.diff[i]);
        out += ',' + format_double(s.smooth[i]);
        for (const auto& col : s.lags)
            out += ',' + format_double(col[i]);
        out += '\n';
    }
    return out;
}

} // namespace adapt
