#include "adapt/anomaly.hpp"

#include <algorithm>
#include <cmath>

namespace adapt {

const char* resource_name(Resource r) { return r == Resource::Core ? "CORE" : "MEM"; }

void AnomalyConfig::validate() const {
    if (theta_core <= 0.0 || theta_core > 100.0 || theta_mem <= 0.0 || theta_mem > 100.0)
        throw Error(Errc::InvalidConfig, "thresholds must lie in (0, 100]");
    if (retrain_interval_s < 500 || retrain_interval_s > 3600)
        throw Error(Errc::InvalidConfig, "retrain interval must lie in [500, 3600] s");
    if (train_window_h <= 0.0)
        throw Error(Errc::InvalidConfig, "train window must be positive");
}

double raw_anomaly(const MonitoringSample& sample) {
    if (sample.metric != Metric::CoreUtilPct && sample.metric != Metric::MemUtilPct)
        throw Error(Errc::WrongMetric,
                    std::string("raw_anomaly needs a utilization metric, got ") +
                        metric_name(sample.metric));
    return sample.value;
}

double normalize_score(double raw, double train_min, double train_max) {
    if (train_min > train_max)
        throw Error(Errc::InvalidConfig, "train_min exceeds train_max");
    if (train_min == train_max) return 0.0;
    double s = (raw - train_min) / (train_max - train_min);
    return std::clamp(s, 0.0, 1.0);
}

AnomalyReport evaluate(const std::vector<MonitoringSample>& history, const ClusterModel& model,
                       const AnomalyConfig& config, double t, Resource resource) {
    config.validate();
    Metric wanted = resource == Resource::Core ? Metric::CoreUtilPct : Metric::MemUtilPct;

    const MonitoringSample* current = nullptr;
    std::vector<const MonitoringSample*> window;
    double window_start = t - config.train_window_h;
    for (const auto& s : history) {
        if (s.metric != wanted) continue;
        if (s.timestamp_h <= t) current = &s;
        if (s.timestamp_h >= window_start && s.timestamp_h < t) window.push_back(&s);
    }
    if (!current)
        throw Error(Errc::InsufficientHistory, "no utilization sample at or before t");
    if (window.empty())
        throw Error(Errc::InsufficientHistory, "no training samples in the trailing window");

    double util = raw_anomaly(*current);
    Point2 p{current->timestamp_h, util};
    UtilizationClass label = classify(model, p);

    AnomalyReport report;
    report.device_id = current->subject_id;
    report.timestamp_h = current->timestamp_h;
    report.resource = resource;
    report.cluster_label = label;
    if (config.score_mode == ScoreMode::Utilization) {
        report.raw_score = util;
        double lo = window.front()->value, hi = window.front()->value;
        for (const auto* s : window) {
            lo = std::min(lo, s->value);
            hi = std::max(hi, s->value);
        }
        report.norm_score = normalize_score(util, lo, hi);
    } else {
        auto dist = [&](const Point2& q) {
            return std::sqrt(squared_distance(model.centroids[nearest_centroid(model.centroids, q)], q));
        };
        report.raw_score = dist(p);
        double lo = 0.0, hi = 0.0;
        bool first = true;
        for (const auto* s : window) {
            double d = dist({s->timestamp_h, s->value});
            if (first) { lo = hi = d; first = false; }
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        report.norm_score = normalize_score(report.raw_score, lo, hi);
    }
    // overutilization requires both the cluster label and threshold exceedance
    report.is_anomalous = (label == UtilizationClass::Over) && util > config.theta(resource);
    return report;
}

bool retrain_schedule(long long now_s, long long last_train_s, const AnomalyConfig& config) {
    if (now_s < last_train_s)
        throw Error(Errc::InvalidConfig, "now precedes the last training instant");
    return now_s - last_train_s >= config.retrain_interval_s;
}

std::string reports_to_csv(const std::vector<AnomalyReport>& reports) {
    std::string out = "timestamp_h,device_id,resource,raw,norm,cluster,anomalous\n";
    for (const auto& r : reports) {
        out += format_double(r.timestamp_h);
        out += ',' + r.device_id;
        out += ',';
        out += resource_name(r.resource);
        out += ',' + format_double(r.raw_score);
        out += ',' + format_double(r.norm_score);
        out += ',';
        out += r.cluster_label == UtilizationClass::Over ? "OVER" : "FULL_UNDER";
        out += ',';
        out += r.is_anomalous ? '1' : '0';
        out += '\n';
    }
    return out;
}

} // namespace adapt
