#ifndef ADAPT_FLEET_HPP
#define ADAPT_FLEET_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "adapt/anomaly.hpp"
#include "adapt/replica_ml.hpp"
#include "adapt/trace.hpp"

namespace adapt {

/// (service_id, replica_index) -> device_id
using Schedule = std::map<std::pair<std::string, int>, std::string>;

struct ReplicaPlan {
    std::string service_id;
    int current_replicas = 1;
    double core_now = 0.0;
    double core_pred = 0.0;
    int target_replicas = 1;
};

struct DeviceLoad {
    double core_pct = 0.0;
    double mem_pct = 0.0;
};

struct FleetState {
    FleetConfig fleet;
    Schedule schedule;
    std::map<std::string, int> replicas;          // effective (placed) replica count
    std::map<std::string, double> core_demand;    // total demand per service
    std::map<std::string, double> mem_demand;
    std::map<std::string, bool> anomalous;        // per device, at the current slot
    double time_h = 0.0;

    static FleetState initial(const FleetConfig& fleet);
};

/// ceil(r_now * core_now / core_pred) clamped to [1, max_replicas]; a
/// vanishing prediction clamps to max_replicas.
int replica_target(int r_now, double core_now, double core_pred, int max_replicas);

/// Per-device utilization percentages; a service's demand divides evenly
/// across its replicas. CORE may exceed 100 (overload), MEM is a hard
/// placement constraint elsewhere.
std::map<std::string, DeviceLoad> compute_utilization(const FleetState& state);

struct PlacementResult {
    std::vector<std::string> errors; // CAPACITY_EXHAUSTED notes, plan partially applied
};

/// Applies replica plans to the schedule. New replicas go one at a time to
/// the non-anomalous device with the lowest resulting CORE utilization that
/// still fits the per-replica MEM share; reductions remove from the
/// highest-utilization device first. Existing placements stay put.
PlacementResult place_replicas(FleetState& state, const std::vector<ReplicaPlan>& plans);

struct SimConfig {
    AnomalyConfig anomaly;
    int horizon = 24;             // slots
    double slot_hours = 1.0;
    int max_replicas = 10;
    int min_train_points = 4;     // slots of history before the detector arms
    std::uint64_t seed = 0;
    KmeansOptions kmeans;
};

struct SlotRecord {
    double t = 0.0;
    bool failed = false;
    std::string error;
    std::map<std::string, DeviceLoad> util_before;   // current schedule, this slot's demands
    std::map<std::string, DeviceLoad> util_after;    // after applying this slot's plans
    std::map<std::string, DeviceLoad> util_baseline; // replica counts frozen at initial
    std::vector<AnomalyReport> reports;
    std::vector<ReplicaPlan> plans;
    std::vector<std::string> placement_errors;
};

struct SimResult {
    std::vector<SlotRecord> slots;
    FleetState final_state;
    long long adapted_replica_slots = 0;  // total replicas summed over slots
    long long baseline_replica_slots = 0;
};

SimResult run_adaptation_loop(const std::vector<MonitoringSample>& trace,
                              const FleetConfig& fleet, const Regressor& model,
                              const SimConfig& config);

std::string utilization_to_csv(const SimResult& result);
std::string plans_to_csv(const SimResult& result);
std::string sim_reports_to_csv(const SimResult& result);

} // namespace adapt

#endif
