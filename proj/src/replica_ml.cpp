#include "adapt/replica_ml.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>

#include <json.hpp>

namespace adapt {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double mse_of(const std::vector<double>& pred, const std::vector<double>& actual) {
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        double d = pred[i] - actual[i];
        acc += d * d;
    }
    return acc / static_cast<double>(pred.size());
}

} // namespace

void Dataset::validate() const {
    if (x.size() != y.size())
        throw Error(Errc::LengthMismatch, "feature and target counts differ");
    if (y.size() < 2) throw Error(Errc::EmptyDataset, "dataset needs at least 2 rows");
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw Error(Errc::InvalidConfig, "train_fraction must lie in (0, 1)");
    std::size_t dim = x.front().size();
    for (const auto& row : x)
        if (row.size() != dim)
            throw Error(Errc::DimensionMismatch, "ragged feature rows");
}

std::pair<Dataset, Dataset> Dataset::chronological_split() const {
    validate();
    std::size_t n_train = static_cast<std::size_t>(train_fraction * static_cast<double>(size()));
    n_train = std::clamp<std::size_t>(n_train, 1, size() - 1);
    Dataset train, test;
    train.train_fraction = test.train_fraction = train_fraction;
    train.x.assign(x.begin(), x.begin() + n_train);
    train.y.assign(y.begin(), y.begin() + n_train);
    test.x.assign(x.begin() + n_train, x.end());
    test.y.assign(y.begin() + n_train, y.end());
    return {std::move(train), std::move(test)};
}

// ---------------------------------------------------------------- tree

RegressionTree RegressionTree::fit(const std::vector<std::vector<double>>& x,
                                   const std::vector<double>& y, int max_depth,
                                   int min_samples_leaf) {
    if (y.empty()) throw Error(Errc::EmptyDataset, "tree fit on empty data");
    RegressionTree tree;
    std::vector<std::size_t> idx(y.size());
    std::iota(idx.begin(), idx.end(), 0);
    tree.build(x, y, idx, 0, idx.size(), 0, max_depth, std::max(1, min_samples_leaf));
    return tree;
}

int RegressionTree::build(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                          std::vector<std::size_t>& idx, std::size_t begin, std::size_t end,
                          int depth, int max_depth, int min_samples_leaf) {
    std::size_t n = end - begin;
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        sum += y[idx[i]];
        sum2 += y[idx[i]] * y[idx[i]];
    }
    double node_mean = sum / static_cast<double>(n);
    double node_sse = sum2 - sum * sum / static_cast<double>(n);

    int node_id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{-1, 0.0, -1, -1, node_mean});

    if (depth >= max_depth || n < 2 * static_cast<std::size_t>(min_samples_leaf) ||
        node_sse <= 1e-12)
        return node_id;

    std::size_t dim = x.front().size();
    int best_feature = -1;
    double best_threshold = 0.0;
    double best_cost = node_sse;
    std::vector<std::size_t> order(idx.begin() + begin, idx.begin() + end);
    for (std::size_t f = 0; f < dim; ++f) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return x[a][f] < x[b][f]; });
        double ls = 0.0, ls2 = 0.0;
        for (std::size_t p = 1; p < n; ++p) {
            double v = y[order[p - 1]];
            ls += v;
            ls2 += v * v;
            if (x[order[p - 1]][f] == x[order[p]][f]) continue; // no boundary here
            if (p < static_cast<std::size_t>(min_samples_leaf) ||
                n - p < static_cast<std::size_t>(min_samples_leaf))
                continue;
            double rs = sum - ls, rs2 = sum2 - ls2;
            double cost = (ls2 - ls * ls / static_cast<double>(p)) +
                          (rs2 - rs * rs / static_cast<double>(n - p));
            if (cost < best_cost - 1e-12) {
                best_cost = cost;
                best_feature = static_cast<int>(f);
                best_threshold = 0.5 * (x[order[p - 1]][f] + x[order[p]][f]);
            }
        }
    }
    if (best_feature < 0) return node_id;

    auto mid = std::stable_partition(idx.begin() + begin, idx.begin() + end, [&](std::size_t i) {
        return x[i][best_feature] <= best_threshold;
    });
    std::size_t split = static_cast<std::size_t>(mid - idx.begin());
    if (split == begin || split == end) return node_id; // degenerate, keep leaf

    nodes_[node_id].feature = best_feature;
    nodes_[node_id].threshold = best_threshold;
    int left = build(x, y, idx, begin, split, depth + 1, max_depth, min_samples_leaf);
    int right = build(x, y, idx, split, end, depth + 1, max_depth, min_samples_leaf);
    nodes_[node_id].left = left;
    nodes_[node_id].right = right;
    return node_id;
}

double RegressionTree::predict(const std::vector<double>& row) const {
    int cur = 0;
    while (nodes_[cur].feature >= 0) {
        if (static_cast<std::size_t>(nodes_[cur].feature) >= row.size())
            throw Error(Errc::DimensionMismatch, "feature row shorter than tree expects");
        cur = row[nodes_[cur].feature] <= nodes_[cur].threshold ? nodes_[cur].left
                                                                : nodes_[cur].right;
    }
    return nodes_[cur].value;
}

// ---------------------------------------------------------------- GBR

double GbrModel::predict(const std::vector<double>& row) const {
    if (row.size() != feature_dim)
        throw Error(Errc::DimensionMismatch, "expected " + std::to_string(feature_dim) +
                                                 " features, got " + std::to_string(row.size()));
    double out = intercept;
    for (const auto& t : trees)
        out += config.learning_rate * t.predict(row);
    return out;
}

Regressor fit_gbr(const Dataset& data, const GbrConfig& cfg) {
    data.validate();
    GbrModel model;
    model.config = cfg;
    model.feature_dim = data.feature_dim();
    model.intercept = mean_of(data.y);

    std::size_t n = data.size();
    std::vector<double> pred(n, model.intercept);
    std::vector<double> residual(n);

    Regressor reg;
    reg.kind = RegressorKind::Gbr;
    reg.train_loss_curve.push_back(mse_of(pred, data.y));
    for (int m = 0; m < cfg.n_estimators; ++m) {
        for (std::size_t i = 0; i < n; ++i)
            residual[i] = data.y[i] - pred[i];
        RegressionTree tree =
            RegressionTree::fit(data.x, residual, cfg.max_depth, cfg.min_samples_leaf);
        for (std::size_t i = 0; i < n; ++i)
            pred[i] += cfg.learning_rate * tree.predict(data.x[i]);
        model.trees.push_back(std::move(tree));
        reg.train_loss_curve.push_back(mse_of(pred, data.y));
    }
    reg.model = std::move(model);
    return reg;
}

// ---------------------------------------------------------------- BR

double BrModel::predict(const std::vector<double>& row) const {
    auto preds = tree_predictions(row);
    return std::accumulate(preds.begin(), preds.end(), 0.0) / static_cast<double>(preds.size());
}

std::vector<double> BrModel::tree_predictions(const std::vector<double>& row) const {
    if (row.size() != feature_dim)
        throw Error(Errc::DimensionMismatch, "expected " + std::to_string(feature_dim) +
                                                 " features, got " + std::to_string(row.size()));
    std::vector<double> out;
    out.reserve(trees.size());
    for (const auto& t : trees)
        out.push_back(t.predict(row));
    return out;
}

Regressor fit_br(const Dataset& data, const BrConfig& cfg) {
    data.validate();
    if (cfg.n_estimators < 1) throw Error(Errc::InvalidConfig, "n_estimators must be >= 1");
    BrModel model;
    model.config = cfg;
    model.feature_dim = data.feature_dim();

    std::size_t n = data.size();
    std::size_t sample_size =
        std::max<std::size_t>(1, static_cast<std::size_t>(
                                     std::ceil(cfg.max_samples_fraction * static_cast<double>(n))));
    for (int t = 0; t < cfg.n_estimators; ++t) {
        std::vector<std::vector<double>> bx;
        std::vector<double> by;
        if (cfg.bootstrap) {
            std::mt19937_64 rng(splitmix64(cfg.seed + static_cast<std::uint64_t>(t)));
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            bx.reserve(sample_size);
            by.reserve(sample_size);
            for (std::size_t i = 0; i < sample_size; ++i) {
                std::size_t j = pick(rng);
                bx.push_back(data.x[j]);
                by.push_back(data.y[j]);
            }
        } else {
            bx = data.x;
            by = data.y;
        }
        model.trees.push_back(RegressionTree::fit(bx, by, cfg.max_depth, cfg.min_samples_leaf));
    }

    Regressor reg;
    reg.kind = RegressorKind::Br;
    // training loss of the growing ensemble, one entry per estimator
    std::vector<double> pred(n);
    std::vector<double> acc(n, 0.0);
    for (std::size_t t = 0; t < model.trees.size(); ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            acc[i] += model.trees[t].predict(data.x[i]);
            pred[i] = acc[i] / static_cast<double>(t + 1);
        }
        reg.train_loss_curve.push_back(mse_of(pred, data.y));
    }
    reg.model = std::move(model);
    return reg;
}

// ---------------------------------------------------------------- MLP

namespace {

void mlp_forward(const std::vector<double>& params, int hidden, int dim,
                 const std::vector<double>& x, std::vector<double>& pre, double& out) {
    const double* w1 = params.data();
    const double* b1 = w1 + static_cast<std::size_t>(hidden) * dim;
    const double* w2 = b1 + hidden;
    const double* b2 = w2 + hidden;
    out = *b2;
    pre.resize(hidden);
    for (int j = 0; j < hidden; ++j) {
        double a = b1[j];
        for (int i = 0; i < dim; ++i)
            a += w1[static_cast<std::size_t>(j) * dim + i] * x[i];
        pre[j] = a;
        out += w2[j] * std::max(0.0, a);
    }
}

} // namespace

double MlpModel::loss_and_grad(const std::vector<double>& params, int hidden, int dim,
                               const std::vector<std::vector<double>>& x,
                               const std::vector<double>& y, std::vector<double>* grad) {
    std::size_t batch = x.size();
    if (grad) grad->assign(params.size(), 0.0);
    const double* w2 = params.data() + static_cast<std::size_t>(hidden) * dim + hidden;
    double loss = 0.0;
    std::vector<double> pre;
    for (std::size_t b = 0; b < batch; ++b) {
        double out;
        mlp_forward(params, hidden, dim, x[b], pre, out);
        double err = out - y[b];
        loss += err * err;
        if (!grad) continue;
        double dout = 2.0 * err / static_cast<double>(batch);
        double* g1 = grad->data();
        double* gb1 = g1 + static_cast<std::size_t>(hidden) * dim;
        double* g2 = gb1 + hidden;
        double* gb2 = g2 + hidden;
        *gb2 += dout;
        for (int j = 0; j < hidden; ++j) {
            double h = std::max(0.0, pre[j]);
            g2[j] += dout * h;
            if (pre[j] > 0.0) {
                double dpre = dout * w2[j];
                gb1[j] += dpre;
                for (int i = 0; i < dim; ++i)
                    g1[static_cast<std::size_t>(j) * dim + i] += dpre * x[b][i];
            }
        }
    }
    return loss / static_cast<double>(batch);
}

double MlpModel::predict(const std::vector<double>& row) const {
    if (row.size() != feature_dim)
        throw Error(Errc::DimensionMismatch, "expected " + std::to_string(feature_dim) +
                                                 " features, got " + std::to_string(row.size()));
    std::vector<double> z(row.size());
    for (std::size_t i = 0; i < row.size(); ++i)
        z[i] = (row[i] - x_mean[i]) / x_std[i];
    std::vector<double> pre;
    double out;
    mlp_forward(params, config.hidden_units, static_cast<int>(feature_dim), z, pre, out);
    return out * y_std + y_mean;
}

Regressor fit_mlp(const Dataset& data, const MlpConfig& cfg) {
    data.validate();
    if (cfg.hidden_units < 1 || cfg.epochs < 1 || cfg.batch_size < 1)
        throw Error(Errc::InvalidConfig, "bad MLP configuration");
    std::size_t n = data.size();
    int dim = static_cast<int>(data.feature_dim());
    int hidden = cfg.hidden_units;

    MlpModel model;
    model.config = cfg;
    model.feature_dim = data.feature_dim();
    model.x_mean.assign(dim, 0.0);
    model.x_std.assign(dim, 0.0);
    for (const auto& row : data.x)
        for (int i = 0; i < dim; ++i)
            model.x_mean[i] += row[i];
    for (int i = 0; i < dim; ++i)
        model.x_mean[i] /= static_cast<double>(n);
    for (const auto& row : data.x)
        for (int i = 0; i < dim; ++i) {
            double d = row[i] - model.x_mean[i];
            model.x_std[i] += d * d;
        }
    for (int i = 0; i < dim; ++i) {
        model.x_std[i] = std::sqrt(model.x_std[i] / static_cast<double>(n));
        if (model.x_std[i] == 0.0) model.x_std[i] = 1.0;
    }
    // targets stay in raw units: the network learns the output scale itself,
    // only the features are standardized
    model.y_mean = 0.0;
    model.y_std = 1.0;

    std::vector<std::vector<double>> xs(n, std::vector<double>(dim));
    std::vector<double> ys(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (int i = 0; i < dim; ++i)
            xs[r][i] = (data.x[r][i] - model.x_mean[i]) / model.x_std[i];
        ys[r] = data.y[r];
    }

    std::mt19937_64 rng(splitmix64(cfg.seed));
    std::normal_distribution<double> norm(0.0, 1.0);
    std::size_t n_params = static_cast<std::size_t>(hidden) * dim + 2 * hidden + 1;
    model.params.assign(n_params, 0.0);
    double w1_scale = std::sqrt(2.0 / dim);
    double w2_scale = std::sqrt(1.0 / hidden);
    for (int j = 0; j < hidden * dim; ++j) model.params[j] = norm(rng) * w1_scale;
    for (int j = 0; j < hidden; ++j)
        model.params[static_cast<std::size_t>(hidden) * dim + hidden + j] = norm(rng) * w2_scale;

    Regressor reg;
    reg.kind = RegressorKind::Mlp;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> grad;
    std::vector<std::vector<double>> bx;
    std::vector<double> by;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            std::size_t stop = std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
            bx.clear();
            by.clear();
            for (std::size_t i = start; i < stop; ++i) {
                bx.push_back(xs[order[i]]);
                by.push_back(ys[order[i]]);
            }
            MlpModel::loss_and_grad(model.params, hidden, dim, bx, by, &grad);
            for (std::size_t p = 0; p < n_params; ++p)
                model.params[p] -= cfg.learning_rate * grad[p];
        }
        double epoch_loss = MlpModel::loss_and_grad(model.params, hidden, dim, xs, ys, nullptr);
        if (!std::isfinite(epoch_loss))
            throw Error(Errc::Diverged, "training loss became non-finite at epoch " +
                                            std::to_string(epoch));
        reg.train_loss_curve.push_back(epoch_loss);
    }
    reg.model = std::move(model);
    return reg;
}

// ---------------------------------------------------------------- wrapper

const char* regressor_kind_name(RegressorKind k) {
    switch (k) {
    case RegressorKind::Gbr: return "gbr";
    case RegressorKind::Br: return "br";
    case RegressorKind::Mlp: return "mlp";
    }
    return "?";
}

RegressorKind regressor_kind_from_name(const std::string& name) {
    if (name == "gbr") return RegressorKind::Gbr;
    if (name == "br") return RegressorKind::Br;
    if (name == "mlp") return RegressorKind::Mlp;
    throw Error(Errc::InvalidConfig, "unknown model kind '" + name + "'");
}

double Regressor::predict(const std::vector<double>& row) const {
    return std::visit([&](const auto& m) { return m.predict(row); }, model);
}

std::vector<double> Regressor::predict_all(const std::vector<std::vector<double>>& rows) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows)
        out.push_back(predict(r));
    return out;
}

// ---------------------------------------------------------------- metrics

namespace {
void check_lengths(const std::vector<double>& pred, const std::vector<double>& actual) {
    if (pred.size() != actual.size())
        throw Error(Errc::LengthMismatch, "prediction and actual lengths differ");
    if (pred.empty()) throw Error(Errc::LengthMismatch, "empty prediction vectors");
}
} // namespace

double mae(const std::vector<double>& pred, const std::vector<double>& actual) {
    check_lengths(pred, actual);
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        acc += std::abs(pred[i] - actual[i]);
    return acc / static_cast<double>(pred.size());
}

double mape(const std::vector<double>& pred, const std::vector<double>& actual) {
    check_lengths(pred, actual);
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (actual[i] == 0.0)
            throw Error(Errc::ZeroActual, "actual value 0 at index " + std::to_string(i));
        acc += std::abs((pred[i] - actual[i]) / actual[i]);
    }
    return acc / static_cast<double>(pred.size());
}

double rmse(const std::vector<double>& pred, const std::vector<double>& actual) {
    check_lengths(pred, actual);
    return std::sqrt(mse_of(pred, actual));
}

Dataset dataset_from_trace(const std::vector<MonitoringSample>& samples, double train_fraction,
                           int lag_count) {
    // (timestamp, service) -> (mem, core)
    std::map<std::pair<double, std::string>, std::pair<double, double>> rows;
    std::map<std::pair<double, std::string>, int> seen; // 1 = mem, 2 = core
    for (const auto& s : samples) {
        if (s.metric != Metric::MemReqGb && s.metric != Metric::CoreReq) continue;
        auto key = std::make_pair(s.timestamp_h, s.subject_id);
        if (s.metric == Metric::MemReqGb) {
            rows[key].first = s.value;
            seen[key] |= 1;
        } else {
            rows[key].second = s.value;
            seen[key] |= 2;
        }
    }
    // per-service chronological MEM history for lag features
    std::map<std::string, std::vector<double>> mem_history;
    Dataset data;
    data.train_fraction = train_fraction;
    for (const auto& [key, vals] : rows) {
        if (seen[key] != 3) continue; // need both metrics at this instant
        auto& hist = mem_history[key.second];
        hist.push_back(vals.first);
        if (static_cast<int>(hist.size()) <= lag_count) continue;
        std::vector<double> row{vals.first};
        for (int k = 1; k <= lag_count; ++k)
            row.push_back(hist[hist.size() - 1 - k]);
        data.x.push_back(std::move(row));
        data.y.push_back(vals.second);
    }
    if (data.y.size() < 2)
        throw Error(Errc::EmptyDataset,
                    "trace yields " + std::to_string(data.y.size()) +
                        " paired MEM/CORE rows, need at least 2");
    return data;
}

// ---------------------------------------------------------------- JSON

namespace {

nlohmann::json tree_to_json(const RegressionTree& tree) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : tree.nodes())
        nodes.push_back({{"f", n.feature},
                         {"t", n.threshold},
                         {"l", n.left},
                         {"r", n.right},
                         {"v", n.value}});
    return nodes;
}

RegressionTree tree_from_json(const nlohmann::json& j) {
    std::vector<RegressionTree::Node> nodes;
    for (const auto& n : j) {
        RegressionTree::Node node;
        node.feature = n.at("f").get<int>();
        node.threshold = n.at("t").get<double>();
        node.left = n.at("l").get<int>();
        node.right = n.at("r").get<int>();
        node.value = n.at("v").get<double>();
        nodes.push_back(node);
    }
    RegressionTree tree;
    tree.set_nodes(std::move(nodes));
    return tree;
}

} // namespace

std::string regressor_to_json(const Regressor& reg) {
    nlohmann::json j;
    j["kind"] = regressor_kind_name(reg.kind);
    j["train_loss_curve"] = reg.train_loss_curve;
    if (reg.kind == RegressorKind::Gbr) {
        const auto& m = std::get<GbrModel>(reg.model);
        j["config"] = {{"n_estimators", m.config.n_estimators},
                       {"learning_rate", m.config.learning_rate},
                       {"max_depth", m.config.max_depth},
                       {"min_samples_leaf", m.config.min_samples_leaf}};
        j["intercept"] = m.intercept;
        j["feature_dim"] = m.feature_dim;
        j["trees"] = nlohmann::json::array();
        for (const auto& t : m.trees) j["trees"].push_back(tree_to_json(t));
    } else if (reg.kind == RegressorKind::Br) {
        const auto& m = std::get<BrModel>(reg.model);
        j["config"] = {{"n_estimators", m.config.n_estimators},
                       {"max_samples_fraction", m.config.max_samples_fraction},
                       {"bootstrap", m.config.bootstrap},
                       {"max_depth", m.config.max_depth},
                       {"min_samples_leaf", m.config.min_samples_leaf},
                       {"seed", m.config.seed}};
        j["feature_dim"] = m.feature_dim;
        j["trees"] = nlohmann::json::array();
        for (const auto& t : m.trees) j["trees"].push_back(tree_to_json(t));
    } else {
        const auto& m = std::get<MlpModel>(reg.model);
        j["config"] = {{"hidden_units", m.config.hidden_units},
                       {"epochs", m.config.epochs},
                       {"batch_size", m.config.batch_size},
                       {"learning_rate", m.config.learning_rate},
                       {"seed", m.config.seed}};
        j["feature_dim"] = m.feature_dim;
        j["params"] = m.params;
        j["x_mean"] = m.x_mean;
        j["x_std"] = m.x_std;
        j["y_mean"] = m.y_mean;
        j["y_std"] = m.y_std;
    }
    return j.dump(2) + "\n";
}

Regressor regressor_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidConfig, std::string("bad model JSON: ") + e.what());
    }
    Regressor reg;
    try {
        reg.kind = regressor_kind_from_name(j.at("kind").get<std::string>());
        reg.train_loss_curve = j.at("train_loss_curve").get<std::vector<double>>();
        const auto& c = j.at("config");
        if (reg.kind == RegressorKind::Gbr) {
            GbrModel m;
            m.config.n_estimators = c.at("n_estimators").get<int>();
            m.config.learning_rate = c.at("learning_rate").get<double>();
            m.config.max_depth = c.at("max_depth").get<int>();
            m.config.min_samples_leaf = c.at("min_samples_leaf").get<int>();
            m.intercept = j.at("intercept").get<double>();
            m.feature_dim = j.at("feature_dim").get<std::size_t>();
            for (const auto& t : j.at("trees")) m.trees.push_back(tree_from_json(t));
            reg.model = std::move(m);
        } else if (reg.kind == RegressorKind::Br) {
            BrModel m;
            m.config.n_estimators = c.at("n_estimators").get<int>();
            m.config.max_samples_fraction = c.at("max_samples_fraction").get<double>();
            m.config.bootstrap = c.at("bootstrap").get<bool>();
            m.config.max_depth = c.at("max_depth").get<int>();
            m.config.min_samples_leaf = c.at("min_samples_leaf").get<int>();
            m.config.seed = c.at("seed").get<std::uint64_t>();
            m.feature_dim = j.at("feature_dim").get<std::size_t>();
            for (const auto& t : j.at("trees")) m.trees.push_back(tree_from_json(t));
            reg.model = std::move(m);
        } else {
            MlpModel m;
            m.config.hidden_units = c.at("hidden_units").get<int>();
            m.config.epochs = c.at("epochs").get<int>();
            m.config.batch_size = c.at("batch_size").get<int>();
            m.config.learning_rate = c.at("learning_rate").get<double>();
            m.config.seed = c.at("seed").get<std::uint64_t>();
            m.feature_dim = j.at("feature_dim").get<std::size_t>();
            m.params = j.at("params").get<std::vector<double>>();
            m.x_mean = j.at("x_mean").get<std::vector<double>>();
            m.x_std = j.at("x_std").get<std::vector<double>>();
            m.y_mean = j.at("y_mean").get<double>();
            m.y_std = j.at("y_std").get<double>();
            reg.model = std::move(m);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidConfig, std::string("bad model JSON: ") + e.what());
    }
    return reg;
}

void save_regressor(const std::string& path, const Regressor& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot write '" + path + "'");
    out << regressor_to_json(model);
}

Regressor load_regressor(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot open model file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return regressor_from_json(text);
}

} // namespace adapt
