#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vecseg/eval/metrics.hpp"
#include "vecseg/gat/model.hpp"

namespace vecseg {

struct LabeledGraph {
    std::string id;
    GraphTensors tensors;
};

enum class OptimizerKind { Adam, Sgd };

struct TrainConfig {
    OptimizerKind optimizer = OptimizerKind::Adam;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int epochs = 50;
    int batch_size = 4;
    std::uint64_t seed = 0;
    std::array<double, 3> head_weights{1.0, 1.0, 1.0};
    int jobs = 1;
    int eval_level = 3;  // level used for validation wF1
    bool track_train_metrics = false;
    bool early_stopping = false;
    int patience = 10;
    std::string divergence_checkpoint;  // written before DivergedLoss is thrown, when set
};

struct EpochMetrics {
    int epoch = 0;
    double train_loss = 0.0;
    std::optional<double> train_accuracy;
    std::optional<double> train_wf1;
    std::optional<double> val_loss;
    std::optional<double> val_wf1;
};

/// Adam or plain SGD over the parameter blocks of a GatModel.
class Optimizer {
public:
    Optimizer(const GatModel& shape, const TrainConfig& cfg);
    void step(GatModel& model, const GatModel& grad);
    long long steps() const { return t_; }

private:
    TrainConfig cfg_;
    GatModel m_;
    GatModel v_;
    long long t_ = 0;
};

/// Mean loss and gradient over a batch. Per-graph work may run on `jobs`
/// threads; the sum is taken in drawing-id order.
LossResult batch_gradients(const GatModel& model, const std::vector<const LabeledGraph*>& batch,
                           std::array<double, 3> head_weights, int jobs = 1);

struct TrainResult {
    std::vector<EpochMetrics> history;
    bool stopped_early = false;
};

/// Return false from the callback to stop after that epoch.
using EpochCallback = std::function<bool(const EpochMetrics&, const GatModel&)>;

/// Deterministic for a seed with jobs=1 (and with any jobs count, since
/// summation order is fixed). Throws DivergedLoss after restoring the last
/// good parameters into `model`.
TrainResult train_loop(GatModel& model, const std::vector<LabeledGraph>& train, const std::vector<LabeledGraph>& val,
                       const TrainConfig& cfg, const EpochCallback& on_epoch = {});

/// Per-feature mean and 1/std over all nodes (and edges) of the given graphs;
/// constant columns keep scale 1.
void fit_input_scaling(GatModel& model, const std::vector<LabeledGraph>& graphs);

ConfusionAccumulator confusion(const GatModel& model, const std::vector<LabeledGraph>& graphs, int level, int jobs = 1);
ClassificationReport evaluate(const GatModel& model, const std::vector<LabeledGraph>& graphs, int level,
                              const std::vector<std::string>& names = {}, int jobs = 1);
double mean_loss(const GatModel& model, const std::vector<LabeledGraph>& graphs, std::array<double, 3> head_weights);

/// Binary container: magic, version, JSON header (dims, level sizes, block
/// shapes, free-form metadata), then float64 arrays in row-major order.
void save_checkpoint(const GatModel& model, const std::string& path, const std::map<std::string, std::string>& meta = {});
GatModel load_checkpoint(const std::string& path, std::map<std::string, std::string>* meta = nullptr);

}  // namespace vecseg
