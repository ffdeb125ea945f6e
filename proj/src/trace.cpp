#include "adapt/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

namespace adapt {

const char* errc_name(Errc c) {
    switch (c) {
    case Errc::MalformedRow: return "MALFORMED_ROW";
    case Errc::NonMonotonicTimestamp: return "NON_MONOTONIC_TIMESTAMP";
    case Errc::OutOfRangeValue: return "OUT_OF_RANGE_VALUE";
    case Errc::UnparseableLine: return "UNPARSEABLE_LINE";
    case Errc::MissingSubjectLabel: return "MISSING_SUBJECT_LABEL";
    case Errc::SeriesTooShort: return "SERIES_TOO_SHORT";
    case Errc::KExceedsPoints: return "K_EXCEEDS_POINTS";
    case Errc::EmptyInput: return "EMPTY_INPUT";
    case Errc::CurveTooShort: return "CURVE_TOO_SHORT";
    case Errc::ModelNotBinary: return "MODEL_NOT_BINARY";
    case Errc::WrongMetric: return "WRONG_METRIC";
    case Errc::InsufficientHistory: return "INSUFFICIENT_HISTORY";
    case Errc::EmptyDataset: return "EMPTY_DATASET";
    case Errc::Diverged: return "DIVERGED";
    case Errc::DimensionMismatch: return "DIMENSION_MISMATCH";
    case Errc::LengthMismatch: return "LENGTH_MISMATCH";
    case Errc::ZeroActual: return "ZERO_ACTUAL";
    case Errc::UnknownDevice: return "UNKNOWN_DEVICE";
    case Errc::UnknownService: return "UNKNOWN_SERVICE";
    case Errc::CapacityExhausted: return "CAPACITY_EXHAUSTED";
    case Errc::UnknownSubcommand: return "UNKNOWN_SUBCOMMAND";
    case Errc::InvalidConfig: return "INVALID_CONFIG";
    case Errc::IoError: return "IO_ERROR";
    }
    return "UNKNOWN";
}

const char* metric_name(Metric m) {
    switch (m) {
    case Metric::CoreUtilPct: return "CORE_UTIL_PCT";
    case Metric::MemUtilPct: return "MEM_UTIL_PCT";
    case Metric::CoreReq: return "CORE_REQ";
    case Metric::MemReqGb: return "MEM_REQ_GB";
    case Metric::Replicas: return "REPLICAS";
    }
    return "?";
}

Metric metric_from_name(const std::string& name) {
    if (name == "CORE_UTIL_PCT") return Metric::CoreUtilPct;
    if (name == "MEM_UTIL_PCT") return Metric::MemUtilPct;
    if (name == "CORE_REQ") return Metric::CoreReq;
    if (name == "MEM_REQ_GB") return Metric::MemReqGb;
    if (name == "REPLICAS") return Metric::Replicas;
    throw Error(Errc::MalformedRow, "unknown metric '" + name + "'");
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

const DeviceSpec* FleetConfig::find_device(const std::string& id) const {
    for (const auto& d : devices)
        if (d.device_id == id) return &d;
    return nullptr;
}

const MicroserviceSpec* FleetConfig::find_service(const std::string& id) const {
    for (const auto& s : services)
        if (s.service_id == id) return &s;
    return nullptr;
}

namespace {

bool parse_real(const std::string& s, double& out) {
    auto first = s.data();
    auto last = s.data() + s.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

void check_value_range(const MonitoringSample& s, const std::string& where) {
    switch (s.metric) {
    case Metric::CoreUtilPct:
    case Metric::MemUtilPct:
        if (s.value < 0.0 || s.value > 100.0)
            throw Error(Errc::OutOfRangeValue,
                        where + ": " + std::string(metric_name(s.metric)) + " = " +
                            format_double(s.value) + " outside [0, 100]");
        break;
    case Metric::Replicas:
        if (s.value < 0.0 || s.value != std::floor(s.value))
            throw Error(Errc::OutOfRangeValue,
                        where + ": REPLICAS = " + format_double(s.value) +
                            " must be a non-negative integer");
        break;
    case Metric::CoreReq:
    case Metric::MemReqGb:
        if (s.value < 0.0)
            throw Error(Errc::OutOfRangeValue,
                        where + ": " + std::string(metric_name(s.metric)) + " = " +
                            format_double(s.value) + " must be >= 0");
        break;
    }
}

} // namespace

void validate_samples(const std::vector<MonitoringSample>& samples, const std::string& origin) {
    std::map<std::pair<std::string, Metric>, double> last_ts;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        std::string where = origin + " sample " + std::to_string(i);
        if (s.timestamp_h < 0.0)
            throw Error(Errc::OutOfRangeValue, where + ": negative timestamp");
        check_value_range(s, where);
        auto key = std::make_pair(s.subject_id, s.metric);
        auto it = last_ts.find(key);
        if (it != last_ts.end() && s.timestamp_h <= it->second)
            throw Error(Errc::NonMonotonicTimestamp,
                        where + ": timestamp " + format_double(s.timestamp_h) +
                            " not after " + format_double(it->second) + " for stream (" +
                            s.subject_id + ", " + metric_name(s.metric) + ")");
        last_ts[key] = s.timestamp_h;
    }
}

std::vector<MonitoringSample> parse_trace_csv_stream(std::istream& in, const std::string& origin) {
    std::vector<MonitoringSample> samples;
    std::string line;
    std::size_t row = 0;
    if (!std::getline(in, line))
        throw Error(Errc::MalformedRow, origin + ": empty file, header required");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "timestamp_h,subject_id,metric,value")
        throw Error(Errc::MalformedRow, origin + ": bad header '" + line + "'");
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_row(line);
        std::string where = origin + " row " + std::to_string(row);
        if (fields.size() != 4)
            throw Error(Errc::MalformedRow, where + ": expected 4 fields, got " +
                                                std::to_string(fields.size()));
        MonitoringSample s;
        if (!parse_real(fields[0], s.timestamp_h))
            throw Error(Errc::MalformedRow, where + ": bad timestamp '" + fields[0] + "'");
        s.subject_id = fields[1];
        if (s.subject_id.empty())
            throw Error(Errc::MalformedRow, where + ": empty subject_id");
        try {
            s.metric = metric_from_name(fields[2]);
        } catch (const Error&) {
            throw Error(Errc::MalformedRow, where + ": unknown metric '" + fields[2] + "'");
        }
        if (!parse_real(fields[3], s.value))
            throw Error(Errc::MalformedRow, where + ": bad value '" + fields[3] + "'");
        samples.push_back(std::move(s));
    }
    validate_samples(samples, origin);
    return samples;
}

std::vector<MonitoringSample> parse_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open trace file '" + path + "'");
    return parse_trace_csv_stream(in, path);
}

std::string trace_to_csv(const std::vector<MonitoringSample>& samples) {
    std::string out = "timestamp_h,subject_id,metric,value\n";
    for (const auto& s : samples) {
        out += format_double(s.timestamp_h);
        out += ',';
        out += s.subject_id;
        out += ',';
        out += metric_name(s.metric);
        out += ',';
        out += format_double(s.value);
        out += '\n';
    }
    return out;
}

void write_trace_csv(const std::string& path, const std::vector<MonitoringSample>& samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot write '" + path + "'");
    out << trace_to_csv(samples);
}

namespace {

struct PromLine {
    std::string name;
    std::map<std::string, std::string> labels;
    double value = 0.0;
    double timestamp_ms = 0.0;
    bool has_timestamp = false;
};

// `name{key="value",...} value [timestamp_ms]`
PromLine parse_prom_line(const std::string& line, std::size_t lineno) {
    PromLine out;
    std::size_t i = 0;
    auto fail = [&](const std::string& why) -> Error {
        return Error(Errc::UnparseableLine,
                     "line " + std::to_string(lineno) + ": " + why + ": " + line);
    };
    auto is_name_char = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':';
    };
    while (i < line.size() && is_name_char(line[i])) ++i;
    if (i == 0) throw fail("missing metric name");
    out.name = line.substr(0, i);
    if (i < line.size() && line[i] == '{') {
        ++i;
        while (i < line.size() && line[i] != '}') {
            std::size_t kstart = i;
            while (i < line.size() && line[i] != '=') ++i;
            if (i >= line.size()) throw fail("unterminated label");
            std::string key = line.substr(kstart, i - kstart);
            ++i;
            if (i >= line.size() || line[i] != '"') throw fail("label value not quoted");
            ++i;
            std::string val;
            while (i < line.size() && line[i] != '"') {
                if (line[i] == '\\' && i + 1 < line.size()) {
                    ++i;
                    if (line[i] == 'n') val.push_back('\n');
                    else val.push_back(line[i]);
                } else {
                    val.push_back(line[i]);
                }
                ++i;
            }
            if (i >= line.size()) throw fail("unterminated label value");
            ++i;
            out.labels[key] = val;
            if (i < line.size() && line[i] == ',') ++i;
        }
        if (i >= line.size()) throw fail("unterminated label set");
        ++i;
    }
    std::istringstream rest(line.substr(i));
    std::string vtok, ttok, extra;
    if (!(rest >> vtok)) throw fail("missing sample value");
    if (!parse_real(vtok, out.value)) throw fail("bad sample value '" + vtok + "'");
    if (rest >> ttok) {
        if (!parse_real(ttok, out.timestamp_ms)) throw fail("bad timestamp '" + ttok + "'");
        out.has_timestamp = true;
        if (rest >> extra) throw fail("trailing garbage");
    }
    return out;
}

} // namespace

std::vector<MonitoringSample> parse_prometheus_text(
    const std::string& body,
    const std::unordered_map<std::string, Metric>& metric_map,
    PrometheusSummary* summary) {
    PrometheusSummary local;
    std::vector<MonitoringSample> samples;
    std::vector<double> ts_ms;
    std::istringstream in(body);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        if (line[start] == '#') {
            ++local.comment_lines;
            continue;
        }
        PromLine pl = parse_prom_line(line.substr(start), lineno);
        auto it = metric_map.find(pl.name);
        if (it == metric_map.end()) {
            ++local.skipped_unknown_metric;
            continue;
        }
        std::string subject;
        if (auto l = pl.labels.find("instance"); l != pl.labels.end()) subject = l->second;
        else if (auto c = pl.labels.find("container"); c != pl.labels.end()) subject = c->second;
        if (subject.empty())
            throw Error(Errc::MissingSubjectLabel,
                        "line " + std::to_string(lineno) +
                            ": mapped metric '" + pl.name + "' lacks instance/container label");
        MonitoringSample s;
        s.subject_id = subject;
        s.metric = it->second;
        s.value = pl.value;
        samples.push_back(std::move(s));
        ts_ms.push_back(pl.has_timestamp ? pl.timestamp_ms : 0.0);
        ++local.emitted;
    }
    if (!samples.empty()) {
        double t0 = *std::min_element(ts_ms.begin(), ts_ms.end());
        for (std::size_t i = 0; i < samples.size(); ++i)
            samples[i].timestamp_h = (ts_ms[i] - t0) / 3.6e6;
    }
    if (summary) *summary = local;
    return samples;
}

FleetConfig load_fleet_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open fleet file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidConfig, path + ": " + e.what());
    }
    FleetConfig fleet;
    try {
        for (const auto& d : j.at("devices")) {
            DeviceSpec spec;
            spec.device_id = d.at("device_id").get<std::string>();
            spec.cores = d.at("cores").get<int>();
            spec.mem_gb = d.at("mem_gb").get<double>();
            if (spec.cores < 1)
                throw Error(Errc::InvalidConfig, path + ": device " + spec.device_id + " cores < 1");
            if (spec.mem_gb <= 0.0)
                throw Error(Errc::InvalidConfig, path + ": device " + spec.device_id + " mem_gb <= 0");
            fleet.devices.push_back(std::move(spec));
        }
        for (const auto& s : j.at("services")) {
            MicroserviceSpec spec;
            spec.service_id = s.at("service_id").get<std::string>();
            spec.core_req = s.at("core_req").get<double>();
            spec.mem_req_gb = s.at("mem_req_gb").get<double>();
            spec.initial_device = s.at("initial_device").get<std::string>();
            spec.initial_replicas = s.at("initial_replicas").get<int>();
            if (spec.core_req <= 0.0 || spec.mem_req_gb <= 0.0 || spec.initial_replicas < 1)
                throw Error(Errc::InvalidConfig, path + ": service " + spec.service_id + " invalid requirements");
            if (!fleet.find_device(spec.initial_device))
                throw Error(Errc::UnknownDevice,
                            path + ": service " + spec.service_id + " placed on unknown device '" +
                                spec.initial_device + "'");
            fleet.services.push_back(std::move(spec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidConfig, path + ": " + e.what());
    }
    return fleet;
}

std::string fleet_to_json(const FleetConfig& fleet) {
    nlohmann::json j;
    j["devices"] = nlohmann::json::array();
    for (const auto& d : fleet.devices)
        j["devices"].push_back({{"device_id", d.device_id}, {"cores", d.cores}, {"mem_gb", d.mem_gb}});
    j["services"] = nlohmann::json::array();
    for (const auto& s : fleet.services)
        j["services"].push_back({{"service_id", s.service_id},
                                 {"core_req", s.core_req},
                                 {"mem_req_gb", s.mem_req_gb},
                                 {"initial_device", s.initial_device},
                                 {"initial_replicas", s.initial_replicas}});
    return j.dump(2) + "\n";
}

} // namespace adapt
