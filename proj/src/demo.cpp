#include "adapt/demo.hpp"

#include <algorithm>
#include <random>

namespace adapt {

FleetConfig demo_fleet() {
    FleetConfig fleet;
    fleet.devices = {{"d0", 8, 16.0}, {"d1", 8, 16.0}};
    fleet.services = {
        {"m0", 4.0, 4.0, "d0", 1},
        {"m1", 2.0, 2.0, "d1", 1},
        {"m2", 3.0, 3.0, "d0", 1},
    };
    return fleet;
}

std::vector<WorkedExampleRow> demo_worked_example() {
    const double core_now[] = {4.0, 2.0, 3.0};
    const double core_pred[] = {3.0, 2.0, 3.0};
    std::vector<WorkedExampleRow> rows;
    auto fleet = demo_fleet();
    for (std::size_t i = 0; i < fleet.services.size(); ++i) {
        WorkedExampleRow row;
        row.service_id = fleet.services[i].service_id;
        row.core_now = core_now[i];
        row.core_pred = core_pred[i];
        row.current_replicas = fleet.services[i].initial_replicas;
        row.target_replicas =
            replica_target(row.current_replicas, row.core_now, row.core_pred, 10);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<MonitoringSample> demo_device_trace(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> noise(-0.8, 0.8);
    std::vector<MonitoringSample> samples;
    for (int h = 0; h < 1440; ++h) {
        double base = h < 717 ? 71.21 : 74.43;
        double u = std::clamp(base + noise(rng), 0.0, 100.0);
        samples.push_back({static_cast<double>(h), "d0", Metric::CoreUtilPct, u});
    }
    return samples;
}

std::vector<MonitoringSample> demo_training_trace(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mem_dist(0.5, 8.5);
    std::normal_distribution<double> noise(0.0, 0.02);
    std::vector<MonitoringSample> samples;
    for (int h = 0; h < 1000; ++h) {
        double t = static_cast<double>(h);
        double mem = mem_dist(rng);
        double core = std::max(0.1, mem + noise(rng));
        samples.push_back({t, "svc", Metric::MemReqGb, mem});
        samples.push_back({t, "svc", Metric::CoreReq, core});
    }
    return samples;
}

std::vector<MonitoringSample> demo_scenario_trace() {
    std::vector<MonitoringSample> samples;
    for (int s = 0; s < 48; ++s) {
        double t = static_cast<double>(s);
        double m0_core;
        if (s < 12) {
            m0_core = 2.3 + 0.02 * s; // 70.0% .. 72.75% on d0 with m2
        } else if (s % 2 == 0) {
            int h = (s - 12) / 2;
            m0_core = std::min(3.6 + 0.06 * h, 4.4); // hot: 86.25% .. 96.25%
        } else {
            m0_core = 2.5; // cool: 72.5%
        }
        samples.push_back({t, "m0", Metric::CoreReq, m0_core});
        samples.push_back({t, "m0", Metric::MemReqGb, 3.0});
        samples.push_back({t, "m1", Metric::CoreReq, 2.0});
        samples.push_back({t, "m1", Metric::MemReqGb, 2.0});
        samples.push_back({t, "m2", Metric::CoreReq, 3.3});
        samples.push_back({t, "m2", Metric::MemReqGb, 3.5});
    }
    return samples;
}

SimConfig demo_sim_config(std::uint64_t seed) {
    SimConfig config;
    config.horizon = 48;
    config.slot_hours = 1.0;
    config.max_replicas = 10;
    config.min_train_points = 4;
    config.seed = seed;
    config.anomaly.theta_core = 73.0;
    config.anomaly.theta_mem = 73.0;
    config.anomaly.retrain_interval_s = 3600;
    config.anomaly.train_window_h = 1440.0;
    return config;
}

} // namespace adapt
