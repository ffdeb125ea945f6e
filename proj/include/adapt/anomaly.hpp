#ifndef ADAPT_ANOMALY_HPP
#define ADAPT_ANOMALY_HPP

#include <string>
#include <vector>

#include "adapt/clustering.hpp"
#include "adapt/trace.hpp"

namespace adapt {

enum class Resource { Core, Mem };

const char* resource_name(Resource r);

enum class ScoreMode { Utilization, Distance };

struct AnomalyConfig {
    double theta_core = 73.0;         // percent
    double theta_mem = 73.0;          // percent
    int retrain_interval_s = 3600;    // within [500, 3600]
    double train_window_h = 1440.0;   // trailing window the model was fitted on
    ScoreMode score_mode = ScoreMode::Utilization;

    double theta(Resource r) const { return r == Resource::Core ? theta_core : theta_mem; }
    void validate() const;
};

struct AnomalyReport {
    std::string device_id;
    double timestamp_h = 0.0;
    Resource resource = Resource::Core;
    double raw_score = 0.0;
    double norm_score = 0.0;
    UtilizationClass cluster_label = UtilizationClass::FullUnder;
    bool is_anomalous = false;
};

/// Identity on the utilization value; anything but a utilization metric is
/// rejected.
double raw_anomaly(const MonitoringSample& sample);

/// Min-max rescaling with training-window extrema, clamped to [0, 1].
/// Degenerate window (min == max) scores 0.
double normalize_score(double raw, double train_min, double train_max);

/// History must hold the device's utilization samples for `resource`, sorted
/// by time, covering the trailing train_window_h before t plus the sample at
/// t itself. The model is assumed fitted on that same window.
AnomalyReport evaluate(const std::vector<MonitoringSample>& history, const ClusterModel& model,
                       const AnomalyConfig& config, double t, Resource resource);

/// True iff a full retrain interval has elapsed.
bool retrain_schedule(long long now_s, long long last_train_s, const AnomalyConfig& config);

std::string reports_to_csv(const std::vector<AnomalyReport>& reports);

} // namespace adapt

#endif
