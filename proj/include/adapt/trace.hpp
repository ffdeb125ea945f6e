#ifndef ADAPT_TRACE_HPP
#define ADAPT_TRACE_HPP

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "adapt/error.hpp"

namespace adapt {

enum class Metric {
    CoreUtilPct,
    MemUtilPct,
    CoreReq,
    MemReqGb,
    Replicas,
};

const char* metric_name(Metric m);
Metric metric_from_name(const std::string& name); // throws MalformedRow on unknown spelling

/// One timestamped observation for a device or microservice.
/// Timestamps are fractional hours since trace start.
struct MonitoringSample {
    double timestamp_h = 0.0;
    std::string subject_id;
    Metric metric = Metric::CoreUtilPct;
    double value = 0.0;

    bool operator==(const MonitoringSample&) const = default;
};

struct DeviceSpec {
    std::string device_id;
    int cores = 1;
    double mem_gb = 1.0;
};

struct MicroserviceSpec {
    std::string service_id;
    double core_req = 1.0;
    double mem_req_gb = 1.0;
    std::string initial_device;
    int initial_replicas = 1;
};

struct FleetConfig {
    std::vector<DeviceSpec> devices;
    std::vector<MicroserviceSpec> services;

    const DeviceSpec* find_device(const std::string& id) const;
    const MicroserviceSpec* find_service(const std::string& id) const;
};

// CSV schema: header `timestamp_h,subject_id,metric,value`.
std::vector<MonitoringSample> parse_trace_csv(const std::string& path);
std::vector<MonitoringSample> parse_trace_csv_stream(std::istream& in, const std::string& origin);

void validate_samples(const std::vector<MonitoringSample>& samples, const std::string& origin);

std::string trace_to_csv(const std::vector<MonitoringSample>& samples);
void write_trace_csv(const std::string& path, const std::vector<MonitoringSample>& samples);

struct PrometheusSummary {
    std::size_t emitted = 0;
    std::size_t skipped_unknown_metric = 0;
    std::size_t comment_lines = 0;
};

/// Parses Prometheus text exposition format. Only metric names present in
/// metric_map are emitted; the `instance` (or `container`) label becomes the
/// subject id; timestamps are converted from ms to hours relative to the
/// earliest emitted sample.
std::vector<MonitoringSample> parse_prometheus_text(
    const std::string& body,
    const std::unordered_map<std::string, Metric>& metric_map,
    PrometheusSummary* summary = nullptr);

FleetConfig load_fleet_json(const std::string& path);
std::string fleet_to_json(const FleetConfig& fleet);

/// Shortest representation that round-trips through parsing.
std::string format_double(double v);

} // namespace adapt

#endif
