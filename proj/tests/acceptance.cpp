// Acceptance gate: one line per criterion, nonzero exit if any fails.
// argv[1] is the path to the adapt CLI binary.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "adapt/clustering.hpp"
#include "adapt/demo.hpp"
#include "adapt/fleet.hpp"
#include "adapt/replica_ml.hpp"

namespace fs = std::filesystem;
using namespace adapt;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, bool ok, double secs, const std::string& note) {
    std::cout << "[" << idx << "] " << name << ": " << (ok ? "PASS" : "FAIL") << " ("
              << secs << " s)";
    if (!note.empty()) std::cout << " - " << note;
    std::cout << "\n";
    if (!ok) ++g_failures;
}

double elapsed(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

int run_cmd(const std::string& cmd) {
    int rc = std::system(cmd.c_str());
    return rc == -1 ? -1 : WEXITSTATUS(rc);
}

// ---- criterion 1: worked example through the CLI demo

void criterion_demo(const std::string& cli) {
    auto t0 = Clock::now();
    fs::path dir = "acc_demo";
    fs::remove_all(dir);
    fs::create_directories(dir);
    int rc = run_cmd(cli + " demo --seed 42 --out-dir " + dir.string() + " > " +
                     (dir / "stdout.txt").string() + " 2>&1");
    double secs = elapsed(t0);
    std::string out = read_file(dir / "stdout.txt");
    bool ok = rc == 0 && out.find("m0: 4 -> 3 => 1 -> 2") != std::string::npos &&
              out.find("m1: 2 -> 2 => 1 -> 1") != std::string::npos &&
              out.find("m2: 3 -> 3 => 1 -> 1") != std::string::npos && secs < 1.0;
    report(1, "demo replica targets (2,1,1)", ok, secs,
           rc != 0 ? "demo exited " + std::to_string(rc)
                   : (secs >= 1.0 ? "too slow" : ""));
}

// ---- criterion 2: k-means vs exhaustive 2-partition optimum

double brute_force_two_cluster_cost(const std::vector<Point2>& points) {
    std::size_t n = points.size();
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
        Point2 mean[2] = {};
        int count[2] = {};
        for (std::size_t i = 0; i < n; ++i) {
            int side = (mask >> i) & 1u;
            mean[side].t += points[i].t;
            mean[side].u += points[i].u;
            ++count[side];
        }
        for (int s : {0, 1}) {
            mean[s].t /= count[s];
            mean[s].u /= count[s];
        }
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            cost += squared_distance(points[i], mean[(mask >> i) & 1u]);
        best = std::min(best, cost);
    }
    return best;
}

bool fixed_point_holds(const std::vector<Point2>& points, const ClusterModel& model) {
    for (std::size_t i = 0; i < points.size(); ++i)
        if (model.assignments[i] != nearest_centroid(model.centroids, points[i]))
            return false;
    for (int c = 0; c < model.k; ++c) {
        Point2 mean{};
        int count = 0;
        for (std::size_t i = 0; i < points.size(); ++i)
            if (model.assignments[i] == c) {
                mean.t += points[i].t;
                mean.u += points[i].u;
                ++count;
            }
        if (count == 0) return false;
        if (std::abs(model.centroids[c].t - mean.t / count) > 1e-9) return false;
        if (std::abs(model.centroids[c].u - mean.u / count) > 1e-9) return false;
    }
    return true;
}

void criterion_kmeans_oracle() {
    auto t0 = Clock::now();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> val(0.0, 20.0);
    std::uniform_int_distribution<int> n_dist(3, 8);
    int bad = 0;
    for (int trial = 0; trial < 200; ++trial) {
        int n = n_dist(rng);
        std::vector<Point2> points;
        for (int i = 0; i < n; ++i) points.push_back({val(rng), val(rng)});
        auto model = kmeans_fit(points, 2, trial);
        double optimum = brute_force_two_cluster_cost(points);
        double tol = 1e-9 * std::max(1.0, optimum);
        if (std::abs(model.distortion - optimum) > tol || !fixed_point_holds(points, model))
            ++bad;
    }
    double secs = elapsed(t0);
    report(2, "k-means matches the exhaustive two-partition optimum (200 instances)",
           bad == 0 && secs < 10.0, secs,
           bad ? std::to_string(bad) + " instances off optimum" : "");
}

// ---- criterion 3: elbow at k=2 on two separated blobs

void criterion_elbow() {
    auto t0 = Clock::now();
    int hits = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::mt19937_64 rng(5000 + trial);
        std::normal_distribution<double> noise(0.0, 1.0);
        std::vector<Point2> points;
        for (int i = 0; i < 60; ++i) points.push_back({noise(rng), noise(rng)});
        for (int i = 0; i < 60; ++i) points.push_back({30 + noise(rng), 30 + noise(rng)});
        auto curve = distortion_curve(points, 1, 10, trial);
        if (elbow_k(curve).k == 2) ++hits;
    }
    double secs = elapsed(t0);
    report(3, "elbow selects k=2 on two-blob data", hits >= 95 && secs < 30.0, secs,
           std::to_string(hits) + "/100 trials");
}

// ---- criterion 4: error-metric oracles

void criterion_metric_oracles() {
    auto t0 = Clock::now();
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> val(-10.0, 10.0);
    std::uniform_int_distribution<int> n_dist(1, 50);
    bool ok = true;
    for (int trial = 0; trial < 1000 && ok; ++trial) {
        int n = n_dist(rng);
        std::vector<double> pred(n), actual(n);
        for (int i = 0; i < n; ++i) {
            pred[i] = val(rng);
            double a = val(rng);
            actual[i] = std::abs(a) < 0.5 ? (a < 0 ? a - 0.5 : a + 0.5) : a;
        }
        double mae_o = 0.0, mape_o = 0.0, rmse_o = 0.0;
        for (int i = 0; i < n; ++i) {
            mae_o += std::abs(pred[i] - actual[i]);
            mape_o += std::abs((actual[i] - pred[i]) / actual[i]);
            rmse_o += (pred[i] - actual[i]) * (pred[i] - actual[i]);
        }
        mae_o /= n;
        mape_o /= n;
        rmse_o = std::sqrt(rmse_o / n);
        double m = mae(pred, actual), p = mape(pred, actual), r = rmse(pred, actual);
        if (std::abs(m - mae_o) > 1e-12 * std::max(1.0, mae_o)) ok = false;
        if (std::abs(p - mape_o) > 1e-12 * std::max(1.0, mape_o)) ok = false;
        if (std::abs(r - rmse_o) > 1e-12 * std::max(1.0, rmse_o)) ok = false;
        if (r < m - 1e-12) ok = false;
    }
    report(4, "mae/mape/rmse match direct-formula oracles (1000 vectors)", ok, elapsed(t0),
           "");
}

// ---- criterion 5: GBR loss curve + fit quality, MLP gradient check

void criterion_training_properties() {
    auto t0 = Clock::now();
    bool ok = true;
    std::string note;

    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> val(0.0, 10.0);
    for (int trial = 0; trial < 20 && ok; ++trial) {
        Dataset data;
        int n = 30 + trial;
        for (int i = 0; i < n; ++i) {
            double x = val(rng);
            data.x.push_back({x});
            data.y.push_back(std::sin(x) * 3 + val(rng) * 0.2);
        }
        auto model = fit_gbr(data, {});
        for (std::size_t i = 1; i < model.train_loss_curve.size(); ++i)
            if (model.train_loss_curve[i] > model.train_loss_curve[i - 1] + 1e-9) {
                ok = false;
                note = "GBR stage loss increased";
            }
    }

    if (ok) {
        Dataset lin;
        for (int i = 0; i < 50; ++i) {
            lin.x.push_back({0.2 * i});
            lin.y.push_back(2.0 * 0.2 * i + 1.0);
        }
        auto model = fit_gbr(lin, {});
        double mean = 0.0;
        for (double y : lin.y) mean += y;
        mean /= lin.y.size();
        double var = 0.0;
        for (double y : lin.y) var += (y - mean) * (y - mean);
        double sd = std::sqrt(var / lin.y.size());
        if (rmse(model.predict_all(lin.x), lin.y) >= 0.05 * sd) {
            ok = false;
            note = "GBR does not fit noiseless linear data";
        }
    }

    if (ok) {
        int hidden = 4, dim = 2;
        int n_params = hidden * dim + hidden + hidden + 1;
        std::mt19937_64 prng(3);
        std::normal_distribution<double> pn(0.0, 0.5);
        std::vector<double> params(n_params);
        for (auto& p : params) p = pn(prng);
        std::vector<std::vector<double>> x{{0.3, -1.2}, {1.1, 0.4}, {-0.7, 0.9}};
        std::vector<double> y{0.5, -0.2, 1.3};
        std::vector<double> grad;
        MlpModel::loss_and_grad(params, hidden, dim, x, y, &grad);
        double eps = 1e-6;
        for (int i = 0; i < n_params && ok; ++i) {
            auto plus = params, minus = params;
            plus[i] += eps;
            minus[i] -= eps;
            double fd = (MlpModel::loss_and_grad(plus, hidden, dim, x, y, nullptr) -
                         MlpModel::loss_and_grad(minus, hidden, dim, x, y, nullptr)) /
                        (2 * eps);
            if (std::abs(fd - grad[i]) > 1e-5 * std::max(1.0, std::abs(fd))) {
                ok = false;
                note = "MLP gradient mismatch at param " + std::to_string(i);
            }
        }
    }

    report(5, "GBR loss monotone + linear fit, MLP gradients match finite differences", ok,
           elapsed(t0), note);
}

// ---- criterion 6: model ordering on a synthetic MEM->CORE trace

void criterion_model_ordering() {
    auto t0 = Clock::now();
    int wins = 0;
    std::ostringstream detail;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::mt19937_64 rng(900 + seed);
        std::uniform_real_distribution<double> mem(0.5, 8.5);
        std::normal_distribution<double> noise(0.0, 0.1);
        Dataset data;
        for (int i = 0; i < 1000; ++i) {
            // memory requests come in 0.5 GB increments
            double m = 0.5 * std::round(mem(rng) / 0.5);
            data.x.push_back({m});
            data.y.push_back(m + noise(rng));
        }
        auto [train, test] = data.chronological_split();
        BrConfig br_cfg;
        br_cfg.seed = seed;
        MlpConfig mlp_cfg;
        mlp_cfg.seed = seed;
        double gbr_mae = mae(fit_gbr(train, {}).predict_all(test.x), test.y);
        double br_mae = mae(fit_br(train, br_cfg).predict_all(test.x), test.y);
        double mlp_mae = mae(fit_mlp(train, mlp_cfg).predict_all(test.x), test.y);
        if (gbr_mae < br_mae && gbr_mae < mlp_mae) ++wins;
    }
    double secs = elapsed(t0);
    report(6, "GBR beats BR and MLP on held-out MAE", wins >= 8 && secs < 60.0, secs,
           std::to_string(wins) + "/10 seeds");
}

// ---- criterion 7: adaptation pulls the hot device under the threshold

void criterion_adaptation() {
    auto t0 = Clock::now();
    auto fleet = demo_fleet();
    auto model = fit_gbr(dataset_from_trace(demo_training_trace(42)), {});
    auto result = run_adaptation_loop(demo_scenario_trace(), fleet, model,
                                      demo_sim_config(42));
    int within = 0, hot = 0;
    bool reductions_ok = true;
    for (const auto& slot : result.slots) {
        if (slot.util_after.at("d0").core_pct <= 73.0) ++within;
        double base = slot.util_baseline.at("d0").core_pct;
        if (base > 73.0) {
            ++hot;
            double red = base - slot.util_after.at("d0").core_pct;
            if (red < 14.0 || red > 28.0) reductions_ok = false;
        }
    }
    double secs = elapsed(t0);
    int slots = static_cast<int>(result.slots.size());
    bool ok = hot > 0 && reductions_ok && within * 10 >= slots * 9 && secs < 10.0;
    report(7, "hot device held at <=73% with 14-28pp reductions", ok, secs,
           std::to_string(within) + "/" + std::to_string(slots) + " slots within, " +
               std::to_string(hot) + " hot slots");
}

// ---- criterion 8: byte-identical reruns of every subcommand

void criterion_determinism(const std::string& cli) {
    auto t0 = Clock::now();
    std::string note;
    bool ok = true;

    auto populate = [&](const fs::path& dir) {
        fs::remove_all(dir);
        fs::create_directories(dir / "sim");
        std::string d = dir.string();
        std::vector<std::string> cmds = {
            " demo --seed 7 --out-dir " + d + " > " + d + "/demo_stdout.txt",
            " ingest --trace " + d + "/scenario_trace.csv --out " + d + "/ingest.csv",
            " preprocess --trace " + d + "/device_trace.csv --out " + d + "/pp.csv",
            " elbow --trace " + d + "/device_trace.csv --seed 7 --out " + d + "/elbow.csv",
            " detect --trace " + d + "/device_trace.csv --seed 7 --out " + d + "/detect.csv",
            " train-predictor --model mlp --trace " + d + "/training_trace.csv --seed 7 --out " +
                d + "/model_mlp.json",
            " predict-replicas --model " + d + "/model.json --fleet " + d +
                "/fleet.json --trace " + d + "/scenario_trace.csv --at 12 --out " + d +
                "/pred.csv",
            " eval --model " + d + "/model.json --trace " + d + "/training_trace.csv --out " +
                d + "/eval.csv > /dev/null",
            " simulate --fleet " + d + "/fleet.json --trace " + d +
                "/scenario_trace.csv --model " + d + "/model.json --seed 7 --out-dir " + d +
                "/sim > /dev/null",
        };
        for (const auto& c : cmds) {
            int rc = run_cmd(cli + c + " 2>&1");
            if (rc != 0) {
                ok = false;
                note = "command exited " + std::to_string(rc) + ":" + c;
                return;
            }
        }
    };

    populate("acc_a");
    if (ok) populate("acc_b");

    if (ok) {
        std::vector<std::string> files = {
            "demo_stdout.txt", "fleet.json",    "device_trace.csv", "training_trace.csv",
            "scenario_trace.csv", "model.json", "utilization.csv",  "anomalies.csv",
            "plans.csv",       "ingest.csv",    "pp.csv",           "elbow.csv",
            "detect.csv",      "model_mlp.json", "pred.csv",        "eval.csv",
            "sim/utilization.csv", "sim/anomalies.csv", "sim/plans.csv",
        };
        for (const auto& f : files) {
            std::string a = read_file(fs::path("acc_a") / f);
            std::string b = read_file(fs::path("acc_b") / f);
            if (a.empty() || a != b) {
                ok = false;
                note = (a.empty() ? "missing/empty output " : "mismatch in ") + f;
                break;
            }
        }
    }
    report(8, "reruns produce byte-identical output files", ok, elapsed(t0), note);
}

// ---- criterion 9: conservation + MEM capacity under fuzzing

void criterion_fuzz_invariants() {
    auto t0 = Clock::now();
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    bool ok = true;
    std::string note;
    for (int trial = 0; trial < 1000 && ok; ++trial) {
        FleetConfig fleet;
        int nd = 1 + static_cast<int>(unit(rng) * 5);
        for (int d = 0; d < nd; ++d)
            fleet.devices.push_back({"d" + std::to_string(d),
                                     2 + static_cast<int>(unit(rng) * 14),
                                     16.0 + unit(rng) * 24.0});
        int ns = 1 + static_cast<int>(unit(rng) * 6);
        for (int s = 0; s < ns; ++s)
            fleet.services.push_back({"m" + std::to_string(s), 0.2 + unit(rng) * 4.0,
                                      0.5 + unit(rng) * 1.5, fleet.devices[s % nd].device_id,
                                      1});
        auto state = FleetState::initial(fleet);
        for (auto& [device, flag] : state.anomalous)
            flag = unit(rng) < 0.35;
        for (const auto& s : fleet.services) {
            state.core_demand[s.service_id] = 0.2 + unit(rng) * 5.0;
            state.mem_demand[s.service_id] = 0.5 + unit(rng) * 2.0;
        }
        std::vector<ReplicaPlan> plans;
        for (const auto& s : fleet.services) {
            if (unit(rng) < 0.3) continue;
            ReplicaPlan plan;
            plan.service_id = s.service_id;
            plan.current_replicas = state.replicas.at(s.service_id);
            plan.core_now = state.core_demand.at(s.service_id);
            plan.core_pred = 0.2 + unit(rng) * 5.0;
            plan.target_replicas =
                replica_target(plan.current_replicas, plan.core_now, plan.core_pred, 8);
            plans.push_back(plan);
        }

        auto total_core = [&](const FleetState& st) {
            double total = 0.0;
            for (const auto& [device, load] : compute_utilization(st))
                total += load.core_pct / 100.0 * st.fleet.find_device(device)->cores;
            return total;
        };
        double before = total_core(state);
        place_replicas(state, plans);
        double after = total_core(state);
        if (std::abs(after - before) > 1e-9 * std::max(1.0, before)) {
            ok = false;
            note = "demand not conserved in trial " + std::to_string(trial);
        }
        for (const auto& [device, load] : compute_utilization(state))
            if (load.mem_pct > 100.0 + 1e-9) {
                ok = false;
                note = "MEM capacity violated on " + device + " in trial " +
                       std::to_string(trial);
            }
    }
    report(9, "placement conserves demand and never violates MEM capacity (1000 fuzz runs)",
           ok, elapsed(t0), note);
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance_tests <path-to-adapt-cli>\n";
        return 2;
    }
    std::string cli = argv[1];

    criterion_demo(cli);
    criterion_kmeans_oracle();
    criterion_elbow();
    criterion_metric_oracles();
    criterion_training_properties();
    criterion_model_ordering();
    criterion_adaptation();
    criterion_determinism(cli);
    criterion_fuzz_invariants();

    if (g_failures) {
        std::cout << g_failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
