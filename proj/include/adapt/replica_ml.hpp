#ifndef ADAPT_REPLICA_ML_HPP
#define ADAPT_REPLICA_ML_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "adapt/error.hpp"
#include "adapt/trace.hpp"

namespace adapt {

/// Feature rows (MEM requirement, optionally lagged history) and CORE targets.
struct Dataset {
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    double train_fraction = 0.8;

    std::size_t size() const { return y.size(); }
    std::size_t feature_dim() const { return x.empty() ? 0 : x.front().size(); }
    void validate() const;

    /// Chronological split: the earliest train_fraction of rows train, the
    /// rest test. Rows are assumed time-ordered.
    std::pair<Dataset, Dataset> chronological_split() const;
};

struct GbrConfig {
    int n_estimators = 15;
    double learning_rate = 0.4;
    int max_depth = 3;
    int min_samples_leaf = 2;
};

struct BrConfig {
    int n_estimators = 50;
    double max_samples_fraction = 1.0; // >1 oversamples with replacement
    bool bootstrap = true;
    int max_depth = 3;
    int min_samples_leaf = 2;
    std::uint64_t seed = 0;
};

struct MlpConfig {
    int hidden_units = 16;
    int epochs = 25;
    int batch_size = 16;
    double learning_rate = 0.01;
    std::uint64_t seed = 0;
};

/// Axis-aligned binary regression tree; splits minimize the weighted child
/// sum of squared errors.
class RegressionTree {
public:
    struct Node {
        int feature = -1; // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double value = 0.0;
    };

    static RegressionTree fit(const std::vector<std::vector<double>>& x,
                              const std::vector<double>& y, int max_depth,
                              int min_samples_leaf);

    double predict(const std::vector<double>& row) const;

    const std::vector<Node>& nodes() const { return nodes_; }
    void set_nodes(std::vector<Node> nodes) { nodes_ = std::move(nodes); }

private:
    int build(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
              std::vector<std::size_t>& idx, std::size_t begin, std::size_t end, int depth,
              int max_depth, int min_samples_leaf);

    std::vector<Node> nodes_;
};

struct GbrModel {
    GbrConfig config;
    double intercept = 0.0;
    std::vector<RegressionTree> trees;
    std::size_t feature_dim = 0;

    double predict(const std::vector<double>& row) const;
};

struct BrModel {
    BrConfig config;
    std::vector<RegressionTree> trees;
    std::size_t feature_dim = 0;

    double predict(const std::vector<double>& row) const;
    std::vector<double> tree_predictions(const std::vector<double>& row) const;
};

struct MlpModel {
    MlpConfig config;
    std::size_t feature_dim = 0;
    // flat layout: W1 (hidden x dim), b1 (hidden), W2 (hidden), b2 (1)
    std::vector<double> params;
    std::vector<double> x_mean, x_std;
    double y_mean = 0.0;
    double y_std = 1.0;

    double predict(const std::vector<double>& row) const;

    /// Mean squared error and its gradient on a batch in standardized space.
    static double loss_and_grad(const std::vector<double>& params, int hidden, int dim,
                                const std::vector<std::vector<double>>& x,
                                const std::vector<double>& y, std::vector<double>* grad);
};

enum class RegressorKind { Gbr, Br, Mlp };

const char* regressor_kind_name(RegressorKind k);
RegressorKind regressor_kind_from_name(const std::string& name);

struct Regressor {
    RegressorKind kind = RegressorKind::Gbr;
    std::variant<GbrModel, BrModel, MlpModel> model;
    std::vector<double> train_loss_curve; // per stage (GBR) or per epoch (MLP)

    double predict(const std::vector<double>& row) const;
    std::vector<double> predict_all(const std::vector<std::vector<double>>& rows) const;
};

Regressor fit_gbr(const Dataset& data, const GbrConfig& cfg);
Regressor fit_br(const Dataset& data, const BrConfig& cfg);
Regressor fit_mlp(const Dataset& data, const MlpConfig& cfg);

double mae(const std::vector<double>& pred, const std::vector<double>& actual);
/// Returned as a fraction, not percent.
double mape(const std::vector<double>& pred, const std::vector<double>& actual);
double rmse(const std::vector<double>& pred, const std::vector<double>& actual);

/// Pairs each service's MEM_REQ_GB observation with the CORE_REQ observation
/// at the same timestamp; rows ordered by (timestamp, service_id). With
/// lag_count > 0, lagged MEM values are appended as extra features.
Dataset dataset_from_trace(const std::vector<MonitoringSample>& samples,
                           double train_fraction = 0.8, int lag_count = 0);

std::string regressor_to_json(const Regressor& model);
Regressor regressor_from_json(const std::string& text);
void save_regressor(const std::string& path, const Regressor& model);
Regressor load_regressor(const std::string& path);

} // namespace adapt

#endif
