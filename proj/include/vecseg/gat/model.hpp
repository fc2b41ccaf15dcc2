#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vecseg/graph/graph.hpp"

namespace vecseg {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

struct GatLayerParams {
    Matrix phi_s;  // d_out x d_in
    Matrix phi_t;  // d_out x d_in
    Matrix phi_e;  // d_out x kEdgeFeatureCount
    Vector a;      // d_out
    double leaky_slope = 0.2;

    int d_in() const { return static_cast<int>(phi_s.cols()); }
    int d_out() const { return static_cast<int>(phi_s.rows()); }
    static GatLayerParams zeros(int d_in, int d_out, double leaky_slope = 0.2);
};

struct GatModel {
    int d_in = 0;
    int d_h = 0;
    std::array<int, 3> level_sizes{0, 0, 0};
    GatLayerParams layer1;
    GatLayerParams layer2;
    std::array<Matrix, 3> head_w;  // |L_k| x d_h
    std::array<Vector, 3> head_b;
    // Fixed input standardization x' = (x - shift) * scale, fitted on the
    // training set; not trained and not counted as weights.
    Vector node_shift, node_scale;  // d_in
    Vector edge_shift, edge_scale;  // kEdgeFeatureCount

    static GatModel zeros(int d_in, int d_h, std::array<int, 3> level_sizes, double leaky_slope = 0.2);
};

/// Glorot-uniform matrices, zero biases; deterministic for a seed.
GatModel init_model(int d_in, int d_h, std::array<int, 3> level_sizes, std::uint64_t seed, double leaky_slope = 0.2);

std::int64_t parameter_count(const GatModel& model);
std::int64_t parameter_count(int d_in, int d_h, std::array<int, 3> level_sizes);

/// Every parameter array in a fixed order, for optimizers and checkpoints.
struct ParamBlock {
    std::string name;
    int rows = 0;
    int cols = 0;
    std::span<double> values;
};
std::vector<ParamBlock> param_blocks(GatModel& model);
std::vector<std::span<const double>> param_blocks(const GatModel& model);
/// The four standardization vectors, stored next to the weights in checkpoints.
std::vector<ParamBlock> scaling_blocks(GatModel& model);

/// Node features plus arcs grouped by target, self arc first in each group.
struct GraphTensors {
    Matrix x;           // n x d_in
    Matrix edge_feats;  // m x kEdgeFeatureCount, one row per undirected edge
    std::vector<int> offsets;  // n+1, arcs of target i are [offsets[i], offsets[i+1])
    std::vector<int> source;   // arc -> source node j (== i for the self arc)
    std::vector<int> edge;     // arc -> row of edge_feats, -1 for the self arc
    std::vector<LabelTriple> labels;  // empty when unlabeled

    int node_count() const { return static_cast<int>(x.rows()); }
    int arc_count() const { return static_cast<int>(source.size()); }
};

/// Standardized copy of x and edge features; offsets/labels unchanged.
GraphTensors apply_scaling(const GatModel& model, const GraphTensors& g);

/// Each undirected edge becomes two arcs carrying the same edge vector.
/// Throws NonFiniteInput, and UnlabeledNode when require_labels is set.
GraphTensors to_tensors(const DrawingGraph& graph, bool require_labels = false);

/// Same arc layout from explicit parts.
GraphTensors make_tensors(Matrix x, const std::vector<std::pair<int, int>>& undirected_edges, Matrix edge_feats);

struct LayerTrace {
    Matrix s;       // n x d_out, X Phi_s^T
    Matrix t;       // n x d_out, X Phi_t^T
    Matrix e;       // m x d_out, E Phi_e^T
    Vector score;   // per arc, before softmax
    Vector alpha;   // per arc
    Matrix out;     // n x d_out
};

struct ForwardTrace {
    GraphTensors input;  // standardized graph seen by layer 1
    LayerTrace layer1;
    Matrix hidden;  // ReLU(layer1.out)
    LayerTrace layer2;
    std::array<Matrix, 3> logits;
    std::array<Matrix, 3> probs;
};

double leaky_relu(double v, double slope);

/// x * w^T where each output row depends only on its input row, bit for bit
/// (a blocked GEMM's result can depend on the row's position).
Matrix project_rows(const Matrix& x, const Matrix& w);

/// Max-shifted softmax over the arcs of one target node.
void attention_softmax(std::span<const double> scores, std::span<double> alpha);

LayerTrace layer_forward(const GatLayerParams& layer, const Matrix& x, const GraphTensors& g);

/// Returns d_in-side gradient; parameter gradients are added into `grad`.
Matrix layer_backward(const GatLayerParams& layer, const Matrix& x, const GraphTensors& g, const LayerTrace& trace,
                      const Matrix& d_out, GatLayerParams& grad, bool need_input_grad = true);

ForwardTrace model_forward(const GatModel& model, const GraphTensors& g);

/// Row-wise argmax of each head.
std::vector<LabelTriple> predict(const ForwardTrace& trace);

struct LossResult {
    double loss = 0.0;
    std::array<double, 3> head_loss{};
    GatModel grad;
};

inline constexpr double kLogClamp = 1e-12;

/// Weighted sum of mean cross-entropies, with exact gradients.
LossResult loss_and_gradients(const GatModel& model, const GraphTensors& g, std::array<double, 3> head_weights = {1, 1, 1});
double loss_only(const GatModel& model, const GraphTensors& g, std::array<double, 3> head_weights = {1, 1, 1});

}  // namespace vecseg
