#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <unordered_map>

#include <CLI11.hpp>
#include <json.hpp>

#include "adapt/anomaly.hpp"
#include "adapt/clustering.hpp"
#include "adapt/demo.hpp"
#include "adapt/fleet.hpp"
#include "adapt/preprocess.hpp"
#include "adapt/replica_ml.hpp"
#include "adapt/trace.hpp"

namespace fs = std::filesystem;
using namespace adapt;

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot write '" + path + "'");
    out << content;
}

const MonitoringSample* last_at(const std::vector<MonitoringSample>& trace,
                                const std::string& subject, Metric metric, double t) {
    const MonitoringSample* found = nullptr;
    for (const auto& s : trace)
        if (s.subject_id == subject && s.metric == metric && s.timestamp_h <= t)
            found = &s;
    return found;
}

// Streaming detector over one trace: retrains a k=2 model on the trailing
// window per (device, resource) stream and reports every evaluable sample.
std::vector<AnomalyReport> detect_over_trace(const std::vector<MonitoringSample>& samples,
                                             const AnomalyConfig& config, std::uint64_t seed,
                                             const KmeansOptions& opts) {
    constexpr int kMinTrainPoints = 4;
    std::vector<AnomalyReport> reports;
    std::map<std::pair<std::string, Metric>, std::vector<MonitoringSample>> streams;
    for (const auto& s : samples)
        if (s.metric == Metric::CoreUtilPct || s.metric == Metric::MemUtilPct)
            streams[{s.subject_id, s.metric}].push_back(s);
    for (auto& [key, stream] : streams) {
        Resource resource = key.second == Metric::CoreUtilPct ? Resource::Core : Resource::Mem;
        ClusterModel model;
        bool trained = false;
        long long last_train_s = 0;
        for (std::size_t i = 0; i < stream.size(); ++i) {
            double t = stream[i].timestamp_h;
            long long now_s = static_cast<long long>(t * 3600.0);
            if (i >= kMinTrainPoints &&
                (!trained || retrain_schedule(now_s, last_train_s, config))) {
                std::vector<Point2> pts;
                for (std::size_t j = 0; j < i; ++j)
                    if (stream[j].timestamp_h >= t - config.train_window_h)
                        pts.push_back({stream[j].timestamp_h, stream[j].value});
                try {
                    model = kmeans_fit(pts, 2, seed, opts);
                    trained = true;
                    last_train_s = now_s;
                } catch (const Error&) {
                    // fewer than two distinct points so far
                }
            }
            if (!trained) continue;
            std::vector<MonitoringSample> window(stream.begin(), stream.begin() + i + 1);
            reports.push_back(evaluate(window, model, config, t, resource));
        }
    }
    return reports;
}

struct MetricRow {
    double mae_v = 0.0, mape_v = 0.0, rmse_v = 0.0, train_time_s = 0.0;
};

MetricRow eval_model(RegressorKind kind, const Regressor& reference, const Dataset& data) {
    auto [train, test] = data.chronological_split();
    auto t0 = std::chrono::steady_clock::now();
    Regressor fitted;
    switch (kind) {
    case RegressorKind::Gbr:
        fitted = fit_gbr(train, std::get<GbrModel>(reference.model).config);
        break;
    case RegressorKind::Br:
        fitted = fit_br(train, std::get<BrModel>(reference.model).config);
        break;
    case RegressorKind::Mlp:
        fitted = fit_mlp(train, std::get<MlpModel>(reference.model).config);
        break;
    }
    auto t1 = std::chrono::steady_clock::now();
    auto pred = fitted.predict_all(test.x);
    MetricRow row;
    row.mae_v = mae(pred, test.y);
    row.mape_v = mape(pred, test.y);
    row.rmse_v = rmse(pred, test.y);
    row.train_time_s = std::chrono::duration<double>(t1 - t0).count();
    return row;
}

std::uint64_t seed_from_env() {
    if (const char* env = std::getenv("ADAPT_SEED"))
        return std::strtoull(env, nullptr, 10);
    return 42;
}

void apply_config_file(CLI::App* sub, const std::string& path, std::uint64_t& seed) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidConfig, path + ": " + e.what());
    }
    // flags win over config file values
    if (j.contains("seed") && sub->count("--seed") == 0) seed = j["seed"].get<std::uint64_t>();
    for (auto& [key, value] : j.items()) {
        if (key == "seed") continue;
        std::string flag = "--" + key;
        for (auto& c : flag)
            if (c == '_') c = '-';
        auto* opt = sub->get_option_no_throw(flag);
        if (!opt || opt->count() > 0) continue;
        opt->add_result(value.is_string() ? value.get<std::string>() : value.dump());
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ADApt: edge-device anomaly detection and microservice replica prediction"};
    app.require_subcommand(1);

    std::uint64_t seed = seed_from_env();
    std::string config_path;

    // ---- ingest
    auto* ingest = app.add_subcommand("ingest", "Parse and validate a monitoring trace");
    std::string in_trace, in_prom, in_out;
    std::vector<std::string> in_map;
    ingest->add_option("--trace", in_trace, "trace CSV file");
    ingest->add_option("--prometheus", in_prom, "Prometheus text exposition snapshot");
    ingest->add_option("--map", in_map, "Prometheus name=METRIC mapping (repeatable)");
    ingest->add_option("--out", in_out, "write canonical CSV here");

    // ---- preprocess
    auto* pre = app.add_subcommand("preprocess", "Difference, smooth, and lag a series");
    std::string pp_trace, pp_subject, pp_metric = "CORE_UTIL_PCT", pp_out;
    PreprocessConfig pp_cfg;
    pre->add_option("--trace", pp_trace, "trace CSV file")->required();
    pre->add_option("--subject", pp_subject, "subject id (default: first in trace)");
    pre->add_option("--metric", pp_metric, "metric name");
    pre->add_option("--diff", pp_cfg.diff_order, "difference order");
    pre->add_option("--smooth", pp_cfg.smooth_window, "smoothing window");
    pre->add_option("--lags", pp_cfg.lag_count, "number of lag columns");
    pre->add_flag("--independent-columns", pp_cfg.independent_columns,
                  "compute each column on the raw series");
    pre->add_option("--out", pp_out, "output CSV path");

    // ---- elbow
    auto* elbow = app.add_subcommand("elbow", "Distortion curve and elbow selection");
    std::string el_trace, el_subject, el_metric = "CORE_UTIL_PCT", el_out;
    int el_kmin = 1, el_kmax = 10;
    elbow->add_option("--trace", el_trace, "trace CSV file")->required();
    elbow->add_option("--subject", el_subject, "subject id (default: first in trace)");
    elbow->add_option("--metric", el_metric, "metric name");
    elbow->add_option("--k-min", el_kmin, "smallest k");
    elbow->add_option("--k-max", el_kmax, "largest k");
    elbow->add_option("--seed", seed, "random seed");
    elbow->add_option("--out", el_out, "write the distortion table here");

    // ---- detect
    auto* detect = app.add_subcommand("detect", "Anomaly reports over a utilization trace");
    std::string dt_trace, dt_out, dt_score = "utilization";
    AnomalyConfig dt_cfg;
    int dt_k = 2;
    detect->add_option("--trace", dt_trace, "trace CSV file")->required();
    detect->add_option("--k", dt_k, "number of clusters (must be 2)");
    detect->add_option("--theta", dt_cfg.theta_core, "CORE threshold, percent");
    detect->add_option("--theta-mem", dt_cfg.theta_mem, "MEM threshold, percent");
    detect->add_option("--retrain-interval", dt_cfg.retrain_interval_s, "seconds between refits");
    detect->add_option("--train-window", dt_cfg.train_window_h, "trailing window, hours");
    detect->add_option("--score", dt_score, "utilization|distance");
    detect->add_option("--seed", seed, "random seed");
    detect->add_option("--out", dt_out, "output CSV path");

    // ---- train-predictor
    auto* train = app.add_subcommand("train-predictor", "Fit a MEM->CORE regressor");
    std::string tp_model = "gbr", tp_trace, tp_out = "model.json";
    GbrConfig tp_gbr;
    BrConfig tp_br;
    MlpConfig tp_mlp;
    double tp_fraction = 0.8;
    int tp_lags = 0;
    bool tp_no_bootstrap = false;
    train->add_option("--model", tp_model, "gbr|br|mlp")->required();
    train->add_option("--trace", tp_trace, "trace CSV file")->required();
    train->add_option("--out", tp_out, "model JSON path");
    train->add_option("--estimators", tp_gbr.n_estimators, "GBR/BR estimator count");
    train->add_option("--learning-rate", tp_gbr.learning_rate, "GBR/MLP learning rate");
    train->add_option("--depth", tp_gbr.max_depth, "tree depth limit");
    train->add_option("--min-leaf", tp_gbr.min_samples_leaf, "minimum samples per leaf");
    train->add_option("--max-samples", tp_br.max_samples_fraction, "BR bootstrap fraction");
    train->add_flag("--no-bootstrap", tp_no_bootstrap, "BR trees see the full data");
    train->add_option("--hidden", tp_mlp.hidden_units, "MLP hidden units");
    train->add_option("--epochs", tp_mlp.epochs, "MLP epochs");
    train->add_option("--batch", tp_mlp.batch_size, "MLP batch size");
    train->add_option("--lags", tp_lags, "append lagged MEM features");
    train->add_option("--train-fraction", tp_fraction, "chronological train fraction");
    train->add_option("--seed", seed, "random seed");

    // ---- eval
    auto* eval_cmd = app.add_subcommand("eval", "Error metrics of a model on a trace");
    std::string ev_model, ev_trace, ev_out;
    eval_cmd->add_option("--model", ev_model, "model JSON path")->required();
    eval_cmd->add_option("--trace", ev_trace, "trace CSV file")->required();
    eval_cmd->add_option("--out", ev_out, "write mae,mape,rmse here (no timing)");

    // ---- predict-replicas
    auto* predict = app.add_subcommand("predict-replicas", "Replica targets for a fleet");
    std::string pr_model, pr_fleet, pr_trace, pr_out;
    double pr_at = 0.0;
    int pr_max = 10;
    predict->add_option("--model", pr_model, "model JSON path")->required();
    predict->add_option("--fleet", pr_fleet, "fleet JSON path")->required();
    predict->add_option("--trace", pr_trace, "trace CSV for current demands");
    predict->add_option("--at", pr_at, "evaluation time, hours");
    predict->add_option("--max-replicas", pr_max, "replica ceiling");
    predict->add_option("--out", pr_out, "output CSV path");

    // ---- simulate
    auto* sim = app.add_subcommand("simulate", "Run the adaptation loop over a trace");
    std::string sm_fleet, sm_trace, sm_model, sm_dir = "sim_out";
    SimConfig sm_cfg;
    sim->add_option("--fleet", sm_fleet, "fleet JSON path")->required();
    sim->add_option("--trace", sm_trace, "trace CSV file")->required();
    sim->add_option("--model", sm_model, "model JSON path")->required();
    sim->add_option("--theta", sm_cfg.anomaly.theta_core, "CORE threshold, percent");
    sim->add_option("--theta-mem", sm_cfg.anomaly.theta_mem, "MEM threshold, percent");
    sim->add_option("--retrain-interval", sm_cfg.anomaly.retrain_interval_s, "seconds");
    sim->add_option("--train-window", sm_cfg.anomaly.train_window_h, "hours");
    sim->add_option("--horizon", sm_cfg.horizon, "number of slots");
    sim->add_option("--slot-hours", sm_cfg.slot_hours, "slot duration, hours");
    sim->add_option("--max-replicas", sm_cfg.max_replicas, "replica ceiling");
    sim->add_option("--seed", seed, "random seed");
    sim->add_option("--out-dir", sm_dir, "output directory");

    // ---- demo
    auto* demo = app.add_subcommand("demo", "Bundled end-to-end example scenario");
    std::string dm_dir = "demo_out";
    demo->add_option("--out-dir", dm_dir, "output directory");
    demo->add_option("--seed", seed, "random seed");

    for (auto* sub : app.get_subcommands({}))
        sub->add_option("--config", config_path, "JSON config file (flags win)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        bool help = std::string(e.get_name()).rfind("CallForHelp", 0) == 0 ||
                    std::string(e.get_name()).rfind("CallForAllHelp", 0) == 0;
        return help ? 0 : 1;
    }

    try {
        auto* sub = app.get_subcommands().front();
        if (!config_path.empty()) apply_config_file(sub, config_path, seed);

        if (sub == ingest) {
            std::vector<MonitoringSample> samples;
            if (!in_trace.empty()) {
                samples = parse_trace_csv(in_trace);
                std::cout << "parsed " << samples.size() << " samples from " << in_trace << "\n";
            } else if (!in_prom.empty()) {
                std::unordered_map<std::string, Metric> map;
                for (const auto& m : in_map) {
                    auto eq = m.find('=');
                    if (eq == std::string::npos)
                        throw Error(Errc::InvalidConfig, "--map expects name=METRIC, got " + m);
                    map[m.substr(0, eq)] = metric_from_name(m.substr(eq + 1));
                }
                std::ifstream in(in_prom);
                if (!in) throw Error(Errc::IoError, "cannot open '" + in_prom + "'");
                std::string body((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
                PrometheusSummary summary;
                samples = parse_prometheus_text(body, map, &summary);
                std::cout << "parsed " << summary.emitted << " samples ("
                          << summary.skipped_unknown_metric << " unknown-metric lines skipped)\n";
            } else {
                throw Error(Errc::InvalidConfig, "ingest needs --trace or --prometheus");
            }
            if (!in_out.empty()) write_trace_csv(in_out, samples);
        } else if (sub == pre) {
            auto samples = parse_trace_csv(pp_trace);
            if (pp_subject.empty() && !samples.empty()) pp_subject = samples.front().subject_id;
            Metric metric = metric_from_name(pp_metric);
            std::vector<double> series, times;
            for (const auto& s : samples)
                if (s.subject_id == pp_subject && s.metric == metric) {
                    series.push_back(s.value);
                    times.push_back(s.timestamp_h);
                }
            auto result = run_pipeline(series, times, pp_cfg);
            auto csv = preprocessed_to_csv(result, pp_subject, pp_metric);
            if (pp_out.empty()) std::cout << csv;
            else write_file(pp_out, csv);
            std::cerr << "dropped_prefix=" << result.dropped_prefix << " rows="
                      << result.timestamps.size() << "\n";
        } else if (sub == elbow) {
            auto samples = parse_trace_csv(el_trace);
            if (el_subject.empty() && !samples.empty()) el_subject = samples.front().subject_id;
            Metric metric = metric_from_name(el_metric);
            std::vector<Point2> points;
            for (const auto& s : samples)
                if (s.subject_id == el_subject && s.metric == metric)
                    points.push_back({s.timestamp_h, s.value});
            auto curve = distortion_curve(points, el_kmin, el_kmax, seed);
            std::string csv = "k,distortion\n";
            for (const auto& [k, d] : curve)
                csv += std::to_string(k) + ',' + format_double(d) + '\n';
            std::cout << csv;
            if (!el_out.empty()) write_file(el_out, csv);
            auto pick = elbow_k(curve);
            std::cout << "selected k=" << pick.k
                      << (pick.low_confidence ? " (low confidence)" : "") << "\n";
        } else if (sub == detect) {
            if (dt_k != 2)
                throw Error(Errc::ModelNotBinary, "detect supports --k 2 only");
            dt_cfg.score_mode =
                dt_score == "distance" ? ScoreMode::Distance : ScoreMode::Utilization;
            if (dt_score != "distance" && dt_score != "utilization")
                throw Error(Errc::InvalidConfig, "--score must be utilization or distance");
            auto samples = parse_trace_csv(dt_trace);
            auto reports = detect_over_trace(samples, dt_cfg, seed, {});
            auto csv = reports_to_csv(reports);
            if (dt_out.empty()) std::cout << csv;
            else write_file(dt_out, csv);
        } else if (sub == train) {
            auto kind = regressor_kind_from_name(tp_model);
            auto data = dataset_from_trace(parse_trace_csv(tp_trace), tp_fraction, tp_lags);
            auto [train_split, test_split] = data.chronological_split();
            Regressor model;
            switch (kind) {
            case RegressorKind::Gbr:
                model = fit_gbr(train_split, tp_gbr);
                break;
            case RegressorKind::Br:
                tp_br.n_estimators = train->count("--estimators") ? tp_gbr.n_estimators
                                                                  : tp_br.n_estimators;
                tp_br.max_depth = tp_gbr.max_depth;
                tp_br.min_samples_leaf = tp_gbr.min_samples_leaf;
                tp_br.bootstrap = !tp_no_bootstrap;
                tp_br.seed = seed;
                model = fit_br(train_split, tp_br);
                break;
            case RegressorKind::Mlp:
                if (train->count("--learning-rate")) tp_mlp.learning_rate = tp_gbr.learning_rate;
                tp_mlp.seed = seed;
                model = fit_mlp(train_split, tp_mlp);
                break;
            }
            save_regressor(tp_out, model);
            std::cout << "trained " << tp_model << " on " << train_split.size()
                      << " rows, wrote " << tp_out << "\n";
        } else if (sub == eval_cmd) {
            auto reference = load_regressor(ev_model);
            auto data = dataset_from_trace(parse_trace_csv(ev_trace));
            auto row = eval_model(reference.kind, reference, data);
            std::cout << "mae,mape,rmse,train_time_s\n"
                      << format_double(row.mae_v) << ',' << format_double(row.mape_v) << ','
                      << format_double(row.rmse_v) << ',' << format_double(row.train_time_s)
                      << "\n";
            if (!ev_out.empty())
                write_file(ev_out, "mae,mape,rmse\n" + format_double(row.mae_v) + ',' +
                                       format_double(row.mape_v) + ',' +
                                       format_double(row.rmse_v) + '\n');
        } else if (sub == predict) {
            auto model = load_regressor(pr_model);
            auto fleet = load_fleet_json(pr_fleet);
            std::vector<MonitoringSample> samples;
            if (!pr_trace.empty()) samples = parse_trace_csv(pr_trace);
            std::string csv =
                "service_id,current_replicas,core_now,core_pred,target_replicas\n";
            for (const auto& s : fleet.services) {
                const auto* core = last_at(samples, s.service_id, Metric::CoreReq, pr_at);
                const auto* mem = last_at(samples, s.service_id, Metric::MemReqGb, pr_at);
                double core_now = core ? core->value : s.core_req;
                double mem_now = mem ? mem->value : s.mem_req_gb;
                double core_pred = model.predict({mem_now});
                int target = replica_target(s.initial_replicas, core_now, core_pred, pr_max);
                csv += s.service_id + ',' + std::to_string(s.initial_replicas) + ',' +
                       format_double(core_now) + ',' + format_double(core_pred) + ',' +
                       std::to_string(target) + '\n';
            }
            std::cout << csv;
            if (!pr_out.empty()) write_file(pr_out, csv);
        } else if (sub == sim) {
            sm_cfg.seed = seed;
            auto fleet = load_fleet_json(sm_fleet);
            auto samples = parse_trace_csv(sm_trace);
            auto model = load_regressor(sm_model);
            auto result = run_adaptation_loop(samples, fleet, model, sm_cfg);
            fs::create_directories(sm_dir);
            write_file(sm_dir + "/utilization.csv", utilization_to_csv(result));
            write_file(sm_dir + "/anomalies.csv", sim_reports_to_csv(result));
            write_file(sm_dir + "/plans.csv", plans_to_csv(result));
            std::cout << "simulated " << result.slots.size() << " slots; replica-slots adapted="
                      << result.adapted_replica_slots
                      << " baseline=" << result.baseline_replica_slots << "\n";
        } else if (sub == demo) {
            fs::create_directories(dm_dir);
            std::cout << "worked example (current cores -> predicted cores => replicas):\n";
            for (const auto& row : demo_worked_example())
                std::cout << "  " << row.service_id << ": " << format_double(row.core_now)
                          << " -> " << format_double(row.core_pred) << " => "
                          << row.current_replicas << " -> " << row.target_replicas << "\n";

            auto fleet = demo_fleet();
            write_file(dm_dir + "/fleet.json", fleet_to_json(fleet));
            auto device_trace = demo_device_trace(seed);
            write_trace_csv(dm_dir + "/device_trace.csv", device_trace);
            auto training_trace = demo_training_trace(seed);
            write_trace_csv(dm_dir + "/training_trace.csv", training_trace);
            auto scenario = demo_scenario_trace();
            write_trace_csv(dm_dir + "/scenario_trace.csv", scenario);

            std::vector<Point2> points;
            for (const auto& s : device_trace)
                points.push_back({s.timestamp_h, s.value});
            auto curve = distortion_curve(points, 1, 10, seed);
            auto pick = elbow_k(curve);
            std::cout << "elbow on the 1440 h utilization trace: k=" << pick.k << "\n";

            auto data = dataset_from_trace(training_trace);
            auto [train_split, test_split] = data.chronological_split();
            auto model = fit_gbr(train_split, GbrConfig{});
            save_regressor(dm_dir + "/model.json", model);
            auto pred = model.predict_all(test_split.x);
            std::cout << "GBR held-out mae=" << format_double(mae(pred, test_split.y)) << "\n";

            SimConfig cfg = demo_sim_config(seed);
            auto result = run_adaptation_loop(scenario, fleet, model, cfg);
            write_file(dm_dir + "/utilization.csv", utilization_to_csv(result));
            write_file(dm_dir + "/anomalies.csv", sim_reports_to_csv(result));
            write_file(dm_dir + "/plans.csv", plans_to_csv(result));

            int within = 0, hot = 0;
            double red_lo = 1e9, red_hi = -1e9;
            for (const auto& slot : result.slots) {
                const auto& after = slot.util_after.at("d0");
                const auto& base = slot.util_baseline.at("d0");
                if (after.core_pct <= cfg.anomaly.theta_core) ++within;
                if (base.core_pct > cfg.anomaly.theta_core) {
                    ++hot;
                    double red = base.core_pct - after.core_pct;
                    red_lo = std::min(red_lo, red);
                    red_hi = std::max(red_hi, red);
                }
            }
            std::cout << "d0 within threshold in " << within << "/" << result.slots.size()
                      << " slots; reduction on hot slots ";
            if (hot > 0)
                std::cout << format_double(red_lo) << ".." << format_double(red_hi) << " pp over "
                          << hot << " slots\n";
            else
                std::cout << "n/a\n";
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == Errc::IoError ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
