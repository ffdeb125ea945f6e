#include "adapt/fleet.hpp"

#include <algorithm>
#include <cmath>

namespace adapt {

FleetState FleetState::initial(const FleetConfig& fleet) {
    FleetState state;
    state.fleet = fleet;
    for (const auto& s : fleet.services) {
        state.replicas[s.service_id] = s.initial_replicas;
        state.core_demand[s.service_id] = s.core_req;
        state.mem_demand[s.service_id] = s.mem_req_gb;
        for (int r = 0; r < s.initial_replicas; ++r)
            state.schedule[{s.service_id, r}] = s.initial_device;
    }
    for (const auto& d : fleet.devices)
        state.anomalous[d.device_id] = false;
    return state;
}

int replica_target(int r_now, double core_now, double core_pred, int max_replicas) {
    constexpr double eps = 1e-6; // cores
    double denom = std::max(core_pred, eps);
    double raw = std::ceil(static_cast<double>(r_now) * core_now / denom);
    if (raw > static_cast<double>(max_replicas)) return max_replicas;
    return std::max(1, static_cast<int>(raw));
}

namespace {

struct DeviceUse {
    double cores = 0.0;
    double mem = 0.0;
};

std::map<std::string, DeviceUse> device_usage(const FleetState& state) {
    std::map<std::string, DeviceUse> use;
    for (const auto& d : state.fleet.devices)
        use[d.device_id];
    for (const auto& [key, device] : state.schedule) {
        const auto& service_id = key.first;
        auto it = use.find(device);
        if (it == use.end())
            throw Error(Errc::UnknownDevice, "schedule references unknown device '" + device + "'");
        int r = state.replicas.at(service_id);
        it->second.cores += state.core_demand.at(service_id) / r;
        it->second.mem += state.mem_demand.at(service_id) / r;
    }
    return use;
}

} // namespace

std::map<std::string, DeviceLoad> compute_utilization(const FleetState& state) {
    auto use = device_usage(state);
    std::map<std::string, DeviceLoad> out;
    for (const auto& d : state.fleet.devices) {
        const auto& u = use.at(d.device_id);
        out[d.device_id] = {100.0 * u.cores / d.cores, 100.0 * u.mem / d.mem_gb};
    }
    return out;
}

namespace {

// MEM use of every device under a hypothetical replica count for one service.
bool mem_feasible_everywhere(const FleetState& state, const std::string& service_id,
                             int new_count, const Schedule& schedule) {
    std::map<std::string, double> mem;
    for (const auto& [key, device] : schedule) {
        int r = key.first == service_id ? new_count : state.replicas.at(key.first);
        mem[device] += state.mem_demand.at(key.first) / r;
    }
    for (const auto& d : state.fleet.devices) {
        auto it = mem.find(d.device_id);
        if (it != mem.end() && it->second > d.mem_gb + 1e-9) return false;
    }
    return true;
}

} // namespace

PlacementResult place_replicas(FleetState& state, const std::vector<ReplicaPlan>& plans) {
    PlacementResult result;
    for (const auto& plan : plans) {
        if (!state.fleet.find_service(plan.service_id))
            throw Error(Errc::UnknownService, "plan for unknown service '" + plan.service_id + "'");

        // grow one replica at a time
        while (state.replicas.at(plan.service_id) < plan.target_replicas) {
            int cur = state.replicas.at(plan.service_id);
            int next = cur + 1;
            double core_share = state.core_demand.at(plan.service_id) / next;
            double mem_share = state.mem_demand.at(plan.service_id) / next;

            const DeviceSpec* best = nullptr;
            double best_util = 0.0;
            for (const auto& d : state.fleet.devices) {
                if (state.anomalous.at(d.device_id)) continue;
                // usage under the prospective count, with the new replica on d
                double cores = core_share, mem = mem_share;
                for (const auto& [key, device] : state.schedule) {
                    if (device != d.device_id) continue;
                    int r = key.first == plan.service_id ? next : state.replicas.at(key.first);
                    cores += state.core_demand.at(key.first) / r;
                    mem += state.mem_demand.at(key.first) / r;
                }
                if (mem > d.mem_gb + 1e-9) continue; // MEM is a hard constraint
                double util = 100.0 * cores / d.cores;
                if (!best || util < best_util) { // ties keep the lowest-indexed device
                    best = &d;
                    best_util = util;
                }
            }
            if (!best) {
                result.errors.push_back(std::string(errc_name(Errc::CapacityExhausted)) +
                                        ": no feasible device for " + plan.service_id +
                                        " replica " + std::to_string(cur));
                break;
            }
            state.schedule[{plan.service_id, cur}] = best->device_id;
            state.replicas[plan.service_id] = next;
        }

        // shrink from the highest-utilization device first
        while (state.replicas.at(plan.service_id) > plan.target_replicas) {
            int cur = state.replicas.at(plan.service_id);
            auto util = compute_utilization(state);
            // candidate replicas ordered by host utilization, then by index
            std::vector<std::pair<int, std::string>> hosted;
            for (const auto& [key, device] : state.schedule)
                if (key.first == plan.service_id) hosted.emplace_back(key.second, device);
            std::stable_sort(hosted.begin(), hosted.end(),
                             [&](const auto& a, const auto& b) {
                                 return util.at(a.second).core_pct > util.at(b.second).core_pct;
                             });
            bool removed = false;
            for (const auto& [ridx, device] : hosted) {
                Schedule trial = state.schedule;
                trial.erase({plan.service_id, ridx});
                if (!mem_feasible_everywhere(state, plan.service_id, cur - 1, trial)) continue;
                // reindex the remaining replicas to 0..cur-2
                Schedule rebuilt;
                int next_idx = 0;
                for (const auto& [key, dev] : trial) {
                    if (key.first == plan.service_id)
                        rebuilt[{plan.service_id, next_idx++}] = dev;
                    else
                        rebuilt[key] = dev;
                }
                state.schedule = std::move(rebuilt);
                state.replicas[plan.service_id] = cur - 1;
                removed = true;
                break;
            }
            if (!removed) {
                result.errors.push_back(std::string(errc_name(Errc::CapacityExhausted)) +
                                        ": cannot shrink " + plan.service_id +
                                        " below " + std::to_string(cur) +
                                        " replicas without violating MEM capacity");
                break;
            }
        }
    }
    return result;
}

namespace {

// last sample at or before t for the (subject, metric) stream
const MonitoringSample* last_sample(const std::vector<MonitoringSample>& trace,
                                    const std::string& subject, Metric metric, double t) {
    const MonitoringSample* found = nullptr;
    for (const auto& s : trace)
        if (s.subject_id == subject && s.metric == metric && s.timestamp_h <= t)
            found = &s;
    return found;
}

} // namespace

SimResult run_adaptation_loop(const std::vector<MonitoringSample>& trace,
                              const FleetConfig& fleet, const Regressor& model,
                              const SimConfig& config) {
    config.anomaly.validate();
    SimResult result;
    FleetState state = FleetState::initial(fleet);
    FleetState baseline = FleetState::initial(fleet);

    // monitored utilization history per device, fed to the clustering model
    std::map<std::string, std::vector<MonitoringSample>> history;
    struct DetectorState {
        bool trained = false;
        ClusterModel core_model;
        ClusterModel mem_model;
        long long last_train_s = 0;
        bool ever_trained = false;
    };
    std::map<std::string, DetectorState> detectors;

    for (int slot = 0; slot < config.horizon; ++slot) {
        double t = slot * config.slot_hours;
        long long now_s = static_cast<long long>(t * 3600.0);
        SlotRecord rec;
        rec.t = t;
        try {
            // current demands from the trace, falling back to the static spec
            for (const auto& s : fleet.services) {
                const auto* core = last_sample(trace, s.service_id, Metric::CoreReq, t);
                const auto* mem = last_sample(trace, s.service_id, Metric::MemReqGb, t);
                state.core_demand[s.service_id] = core ? core->value : s.core_req;
                state.mem_demand[s.service_id] = mem ? mem->value : s.mem_req_gb;
                baseline.core_demand[s.service_id] = state.core_demand[s.service_id];
                baseline.mem_demand[s.service_id] = state.mem_demand[s.service_id];
            }
            state.time_h = baseline.time_h = t;
            rec.util_before = compute_utilization(state);
            rec.util_baseline = compute_utilization(baseline);

            // append this slot's monitored utilization to each device history
            for (const auto& d : fleet.devices) {
                const auto& load = rec.util_before.at(d.device_id);
                history[d.device_id].push_back(
                    {t, d.device_id, Metric::CoreUtilPct, std::min(load.core_pct, 100.0)});
                history[d.device_id].push_back(
                    {t, d.device_id, Metric::MemUtilPct, std::min(load.mem_pct, 100.0)});
            }

            // retrain and evaluate per device
            for (const auto& d : fleet.devices) {
                auto& det = detectors[d.device_id];
                auto& hist = history[d.device_id];
                bool due = !det.ever_trained ||
                           retrain_schedule(now_s, det.last_train_s, config.anomaly);
                if (due && slot >= config.min_train_points) {
                    auto fit_resource = [&](Metric metric) {
                        std::vector<Point2> pts;
                        double start = t - config.anomaly.train_window_h;
                        for (const auto& s : hist)
                            if (s.metric == metric && s.timestamp_h < t &&
                                s.timestamp_h >= start)
                                pts.push_back({s.timestamp_h, s.value});
                        return kmeans_fit(pts, 2, config.seed, config.kmeans);
                    };
                    try {
                        det.core_model = fit_resource(Metric::CoreUtilPct);
                        det.mem_model = fit_resource(Metric::MemUtilPct);
                        det.trained = true;
                        det.ever_trained = true;
                        det.last_train_s = now_s;
                    } catch (const Error&) {
                        // not enough distinct history yet; stay untrained
                    }
                }
                bool dev_anomalous = false;
                if (det.trained) {
                    auto core_rep =
                        evaluate(hist, det.core_model, config.anomaly, t, Resource::Core);
                    auto mem_rep =
                        evaluate(hist, det.mem_model, config.anomaly, t, Resource::Mem);
                    dev_anomalous = core_rep.is_anomalous || mem_rep.is_anomalous;
                    rec.reports.push_back(std::move(core_rep));
                    rec.reports.push_back(std::move(mem_rep));
                }
                state.anomalous[d.device_id] = dev_anomalous;
            }

            // plan replicas for services touching anomalous devices
            for (const auto& s : fleet.services) {
                bool touches = false;
                for (const auto& [key, device] : state.schedule)
                    if (key.first == s.service_id && state.anomalous.at(device)) {
                        touches = true;
                        break;
                    }
                if (!touches) continue;
                ReplicaPlan plan;
                plan.service_id = s.service_id;
                plan.current_replicas = state.replicas.at(s.service_id);
                plan.core_now = state.core_demand.at(s.service_id);
                plan.core_pred = model.predict({state.mem_demand.at(s.service_id)});
                plan.target_replicas = replica_target(plan.current_replicas, plan.core_now,
                                                      plan.core_pred, config.max_replicas);
                rec.plans.push_back(plan);
            }

            if (!rec.plans.empty()) {
                auto placed = place_replicas(state, rec.plans);
                rec.placement_errors = std::move(placed.errors);
            }
            rec.util_after = compute_utilization(state);
        } catch (const Error& e) {
            rec.failed = true;
            rec.error = e.what();
            rec.util_after = rec.util_before;
        }
        for (const auto& [sid, r] : state.replicas) result.adapted_replica_slots += r;
        for (const auto& [sid, r] : baseline.replicas) result.baseline_replica_slots += r;
        result.slots.push_back(std::move(rec));
    }
    result.final_state = std::move(state);
    return result;
}

std::string utilization_to_csv(const SimResult& result) {
    std::string out =
        "timestamp_h,device_id,core_pct,mem_pct,baseline_core_pct,baseline_mem_pct,anomalous\n";
    for (const auto& slot : result.slots) {
        for (const auto& [device, load] : slot.util_after) {
            bool anom = false;
            for (const auto& r : slot.reports)
                if (r.device_id == device && r.is_anomalous) anom = true;
            const auto& base = slot.util_baseline.at(device);
            out += format_double(slot.t) + ',' + device + ',' + format_double(load.core_pct) +
                   ',' + format_double(load.mem_pct) + ',' + format_double(base.core_pct) + ',' +
                   format_double(base.mem_pct) + ',' + (anom ? '1' : '0') + '\n';
        }
    }
    return out;
}

std::string plans_to_csv(const SimResult& result) {
    std::string out =
        "timestamp_h,service_id,current_replicas,core_now,core_pred,target_replicas\n";
    for (const auto& slot : result.slots)
        for (const auto& p : slot.plans)
            out += format_double(slot.t) + ',' + p.service_id + ',' +
                   std::to_string(p.current_replicas) + ',' + format_double(p.core_now) + ',' +
                   format_double(p.core_pred) + ',' + std::to_string(p.target_replicas) + '\n';
    return out;
}

std::string sim_reports_to_csv(const SimResult& result) {
    std::vector<AnomalyReport> all;
    for (const auto& slot : result.slots)
        for (const auto& r : slot.reports) all.push_back(r);
    return reports_to_csv(all);
}

} // namespace adapt
