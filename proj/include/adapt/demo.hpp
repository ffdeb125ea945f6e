#ifndef ADAPT_DEMO_HPP
#define ADAPT_DEMO_HPP

#include <cstdint>
#include <vector>

#include "adapt/fleet.hpp"
#include "adapt/trace.hpp"

namespace adapt {

/// Bundled example data: a two-device fleet running three microservices, a
/// long single-device utilization trace, a MEM->CORE training trace, and a
/// 48-slot demand scenario where the first device runs hot.

FleetConfig demo_fleet();

struct WorkedExampleRow {
    std::string service_id;
    double core_now = 0.0;
    double core_pred = 0.0;
    int current_replicas = 1;
    int target_replicas = 1;
};

/// Replica targets for the demo fleet with predicted CORE requirements
/// (3, 2, 3) against current requirements (4, 2, 3).
std::vector<WorkedExampleRow> demo_worked_example();

/// 1440 hourly CORE utilization samples for device d0: a low regime around
/// 71.2% followed by a high regime around 74.4%.
std::vector<MonitoringSample> demo_device_trace(std::uint64_t seed);

/// 1000 paired MEM_REQ_GB / CORE_REQ samples with CORE tracking MEM.
std::vector<MonitoringSample> demo_training_trace(std::uint64_t seed);

/// 48 slots of per-service demand streams; device d0's CORE utilization sits
/// at 70-73% for the first 12 slots, then alternates hot (86-96%) and cool.
std::vector<MonitoringSample> demo_scenario_trace();

SimConfig demo_sim_config(std::uint64_t seed);

} // namespace adapt

#endif
