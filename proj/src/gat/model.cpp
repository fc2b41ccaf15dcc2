#include "vecseg/gat/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "vecseg/error.hpp"
#include "vecseg/random.hpp"

namespace vecseg {

GatLayerParams GatLayerParams::zeros(int d_in, int d_out, double leaky_slope) {
    GatLayerParams p;
    p.phi_s = Matrix::Zero(d_out, d_in);
    p.phi_t = Matrix::Zero(d_out, d_in);
    p.phi_e = Matrix::Zero(d_out, kEdgeFeatureCount);
    p.a = Vector::Zero(d_out);
    p.leaky_slope = leaky_slope;
    return p;
}

GatModel GatModel::zeros(int d_in, int d_h, std::array<int, 3> level_sizes, double leaky_slope) {
    if (d_in < 1 || d_h < 1) throw Error(ErrorKind::InvalidArgument, "model dimensions must be positive");
    GatModel m;
    m.d_in = d_in;
    m.d_h = d_h;
    m.level_sizes = level_sizes;
    m.layer1 = GatLayerParams::zeros(d_in, d_h, leaky_slope);
    m.layer2 = GatLayerParams::zeros(d_h, d_h, leaky_slope);
    for (std::size_t k = 0; k < 3; ++k) {
        if (level_sizes[k] < 1) throw Error(ErrorKind::InvalidArgument, "level sizes must be positive");
        m.head_w[k] = Matrix::Zero(level_sizes[k], d_h);
        m.head_b[k] = Vector::Zero(level_sizes[k]);
    }
    m.node_shift = Vector::Zero(d_in);
    m.node_scale = Vector::Ones(d_in);
    m.edge_shift = Vector::Zero(kEdgeFeatureCount);
    m.edge_scale = Vector::Ones(kEdgeFeatureCount);
    return m;
}

namespace {

void glorot(std::span<double> values, int fan_in, int fan_out, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : values) v = (2.0 * uniform01(rng) - 1.0) * limit;
}

}  // namespace

GatModel init_model(int d_in, int d_h, std::array<int, 3> level_sizes, std::uint64_t seed, double leaky_slope) {
    GatModel m = GatModel::zeros(d_in, d_h, level_sizes, leaky_slope);
    std::mt19937_64 rng(seed);
    for (ParamBlock& b : param_blocks(m)) {
        if (b.name.ends_with(".b")) continue;
        if (b.name.ends_with(".a")) glorot(b.values, b.rows, 1, rng);
        else glorot(b.values, b.cols, b.rows, rng);
    }
    return m;
}

std::int64_t parameter_count(int d_in, int d_h, std::array<int, 3> level_sizes) {
    const std::int64_t in = d_in, h = d_h;
    std::int64_t total = h * (2 * in + kEdgeFeatureCount + 1) + h * (2 * h + kEdgeFeatureCount + 1);
    for (int s : level_sizes) total += static_cast<std::int64_t>(s) * (h + 1);
    return total;
}

std::int64_t parameter_count(const GatModel& model) {
    std::int64_t total = 0;
    for (const auto& b : param_blocks(model)) total += static_cast<std::int64_t>(b.size());
    return total;
}

namespace {

template <typename M>
auto span_of(M& m) {
    return std::span(m.data(), static_cast<std::size_t>(m.size()));
}

}  // namespace

std::vector<ParamBlock> param_blocks(GatModel& m) {
    std::vector<ParamBlock> out;
    auto add_layer = [&](const std::string& prefix, GatLayerParams& l) {
        out.push_back({prefix + ".phi_s", static_cast<int>(l.phi_s.rows()), static_cast<int>(l.phi_s.cols()), span_of(l.phi_s)});
        out.push_back({prefix + ".phi_t", static_cast<int>(l.phi_t.rows()), static_cast<int>(l.phi_t.cols()), span_of(l.phi_t)});
        out.push_back({prefix + ".phi_e", static_cast<int>(l.phi_e.rows()), static_cast<int>(l.phi_e.cols()), span_of(l.phi_e)});
        out.push_back({prefix + ".a", static_cast<int>(l.a.size()), 1, span_of(l.a)});
    };
    add_layer("layer1", m.layer1);
    add_layer("layer2", m.layer2);
    for (std::size_t k = 0; k < 3; ++k) {
        out.push_back({fmt::format("head{}.w", k + 1), static_cast<int>(m.head_w[k].rows()),
                       static_cast<int>(m.head_w[k].cols()), span_of(m.head_w[k])});
    }
    for (std::size_t k = 0; k < 3; ++k) {
        out.push_back({fmt::format("head{}.b", k + 1), static_cast<int>(m.head_b[k].size()), 1, span_of(m.head_b[k])});
    }
    return out;
}

std::vector<std::span<const double>> param_blocks(const GatModel& model) {
    std::vector<std::span<const double>> out;
    for (const ParamBlock& b : param_blocks(const_cast<GatModel&>(model))) out.emplace_back(b.values);
    return out;
}

GraphTensors make_tensors(Matrix x, const std::vector<std::pair<int, int>>& undirected_edges, Matrix edge_feats) {
    const int n = static_cast<int>(x.rows());
    if (edge_feats.rows() != static_cast<Eigen::Index>(undirected_edges.size()) ||
        (edge_feats.rows() > 0 && edge_feats.cols() != kEdgeFeatureCount)) {
        throw Error(ErrorKind::DimensionMismatch, "edge feature rows must match edges, 10 columns each");
    }
    if (!x.allFinite() || !edge_feats.allFinite()) throw Error(ErrorKind::NonFiniteInput, "graph tensors contain NaN/inf");
    std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < undirected_edges.size(); ++k) {
        const auto [a, b] = undirected_edges[k];
        if (a < 0 || b < 0 || a >= n || b >= n || a == b) {
            throw Error(ErrorKind::InvalidArgument, fmt::format("bad edge ({}, {})", a, b));
        }
        adj[static_cast<std::size_t>(a)].emplace_back(b, static_cast<int>(k));
        adj[static_cast<std::size_t>(b)].emplace_back(a, static_cast<int>(k));
    }
    GraphTensors g;
    g.x = std::move(x);
    g.edge_feats = edge_feats.rows() > 0 ? std::move(edge_feats) : Matrix(0, kEdgeFeatureCount);
    g.offsets.reserve(static_cast<std::size_t>(n) + 1);
    g.offsets.push_back(0);
    // Neighbours ordered by content, not by id, so sums run in the same order
    // after any relabelling (bitwise permutation equivariance). Arcs that tie
    // on content contribute identical terms.
    const auto row_less = [](const Matrix& m, int r1, int r2) {
        const double* a = m.data() + static_cast<Eigen::Index>(r1) * m.cols();
        const double* b = m.data() + static_cast<Eigen::Index>(r2) * m.cols();
        return std::lexicographical_compare(a, a + m.cols(), b, b + m.cols());
    };
    const auto arc_less = [&](const std::pair<int, int>& p, const std::pair<int, int>& q) {
        if (row_less(g.edge_feats, p.second, q.second)) return true;
        if (row_less(g.edge_feats, q.second, p.second)) return false;
        if (row_less(g.x, p.first, q.first)) return true;
        if (row_less(g.x, q.first, p.first)) return false;
        return p < q;
    };
    for (int i = 0; i < n; ++i) {
        auto& nbrs = adj[static_cast<std::size_t>(i)];
        std::sort(nbrs.begin(), nbrs.end(), arc_less);
        g.source.push_back(i);
        g.edge.push_back(-1);
        for (const auto& [j, k] : nbrs) {
            g.source.push_back(j);
            g.edge.push_back(k);
        }
        g.offsets.push_back(static_cast<int>(g.source.size()));
    }
    return g;
}

GraphTensors to_tensors(const DrawingGraph& graph, bool require_labels) {
    const int n = static_cast<int>(graph.nodes.size());
    const int d = graph.feature_dimension();
    Matrix x(n, d);
    for (int i = 0; i < n; ++i) {
        const auto& f = graph.nodes[static_cast<std::size_t>(i)].features;
        if (static_cast<int>(f.size()) != d) {
            throw Error(ErrorKind::DimensionMismatch, fmt::format("node {} has {} features, expected {}", i, f.size(), d));
        }
        for (int c = 0; c < d; ++c) x(i, c) = f[static_cast<std::size_t>(c)];
    }
    std::vector<std::pair<int, int>> edges;
    Matrix ef(static_cast<Eigen::Index>(graph.edges.size()), kEdgeFeatureCount);
    for (std::size_t k = 0; k < graph.edges.size(); ++k) {
        edges.emplace_back(graph.edges[k].src, graph.edges[k].dst);
        for (int c = 0; c < kEdgeFeatureCount; ++c) ef(static_cast<Eigen::Index>(k), c) = graph.edges[k].features.values[static_cast<std::size_t>(c)];
    }
    GraphTensors g = make_tensors(std::move(x), edges, std::move(ef));
    bool all = true;
    for (const GraphNode& node : graph.nodes) all = all && node.label.has_value();
    if (all) {
        for (const GraphNode& node : graph.nodes) g.labels.push_back(*node.label);
    } else if (require_labels) {
        throw Error(ErrorKind::UnlabeledNode, fmt::format("graph '{}' has unlabeled nodes", graph.drawing_id));
    }
    return g;
}

double leaky_relu(double v, double slope) { return v > 0.0 ? v : slope * v; }

Matrix project_rows(const Matrix& x, const Matrix& w) {
    if (x.cols() != w.cols()) throw Error(ErrorKind::DimensionMismatch, "projection width mismatch");
    const Eigen::Index n = x.rows(), d_in = x.cols(), d_out = w.rows();
    const Matrix wt = w.transpose();
    Matrix y = Matrix::Zero(n, d_out);
    // Every y(r, c) sums over k in the same sequential order whatever r is;
    // blocks of rows only share the loads of wt.
    constexpr Eigen::Index kBlock = 8;
    for (Eigen::Index r0 = 0; r0 < n; r0 += kBlock) {
        const Eigen::Index r1 = std::min(n, r0 + kBlock);
        for (Eigen::Index k = 0; k < d_in; ++k) {
            const double* wk = wt.data() + k * d_out;
            for (Eigen::Index r = r0; r < r1; ++r) {
                const double xv = x(r, k);
                if (xv == 0.0) continue;
                double* yr = y.data() + r * d_out;
                for (Eigen::Index c = 0; c < d_out; ++c) yr[c] += xv * wk[c];
            }
        }
    }
    return y;
}

void attention_softmax(std::span<const double> scores, std::span<double> alpha) {
    if (scores.empty()) return;
    const double mx = *std::max_element(scores.begin(), scores.end());
    double sum = 0.0;
    for (std::size_t k = 0; k < scores.size(); ++k) sum += (alpha[k] = std::exp(scores[k] - mx));
    for (double& v : alpha) v /= sum;
}

LayerTrace layer_forward(const GatLayerParams& layer, const Matrix& x, const GraphTensors& g) {
    if (x.cols() != layer.d_in() || x.rows() != g.node_count()) {
        throw Error(ErrorKind::DimensionMismatch,
                    fmt::format("layer expects {} input features, got {}", layer.d_in(), x.cols()));
    }
    if (!x.allFinite()) throw Error(ErrorKind::NonFiniteInput, "non-finite node features");
    const int n = g.node_count();
    const int d = layer.d_out();
    LayerTrace tr;
    tr.s = project_rows(x, layer.phi_s);
    tr.t = project_rows(x, layer.phi_t);
    tr.e = project_rows(g.edge_feats, layer.phi_e);
    tr.score.resize(g.arc_count());
    tr.alpha.resize(g.arc_count());
    tr.out = Matrix::Zero(n, d);
    const double slope = layer.leaky_slope;
    const double* a = layer.a.data();
    for (int i = 0; i < n; ++i) {
        const int lo = g.offsets[static_cast<std::size_t>(i)], hi = g.offsets[static_cast<std::size_t>(i) + 1];
        const double* si = tr.s.row(i).data();
        double mx = -std::numeric_limits<double>::infinity();
        for (int k = lo; k < hi; ++k) {
            const double* tj = tr.t.row(g.source[static_cast<std::size_t>(k)]).data();
            const int ek = g.edge[static_cast<std::size_t>(k)];
            const double* e = ek >= 0 ? tr.e.row(ek).data() : nullptr;
            double sc = 0.0;
            for (int c = 0; c < d; ++c) {
                const double z = si[c] + tj[c] + (e ? e[c] : 0.0);
                sc += a[c] * leaky_relu(z, slope);
            }
            tr.score[k] = sc;
            mx = std::max(mx, sc);
        }
        if (!std::isfinite(mx)) throw Error(ErrorKind::NonFiniteInput, fmt::format("non-finite attention score at node {}", i));
        attention_softmax(std::span<const double>(tr.score.data() + lo, static_cast<std::size_t>(hi - lo)),
                          std::span<double>(tr.alpha.data() + lo, static_cast<std::size_t>(hi - lo)));
        auto out = tr.out.row(i);
        out = tr.alpha[lo] * tr.s.row(i);
        for (int k = lo + 1; k < hi; ++k) out += tr.alpha[k] * tr.t.row(g.source[static_cast<std::size_t>(k)]);
    }
    return tr;
}

Matrix layer_backward(const GatLayerParams& layer, const Matrix& x, const GraphTensors& g, const LayerTrace& tr,
                      const Matrix& d_out, GatLayerParams& grad, bool need_input_grad) {
    const int n = g.node_count();
    const int d = layer.d_out();
    const double slope = layer.leaky_slope;
    Matrix ds = Matrix::Zero(n, d);
    Matrix dt = Matrix::Zero(n, d);
    Matrix de = Matrix::Zero(g.edge_feats.rows(), d);
    Vector& da = grad.a;
    const double* a = layer.a.data();
    std::vector<double> dalpha;
    for (int i = 0; i < n; ++i) {
        const int lo = g.offsets[static_cast<std::size_t>(i)], hi = g.offsets[static_cast<std::size_t>(i) + 1];
        const auto go = d_out.row(i);
        dalpha.assign(static_cast<std::size_t>(hi - lo), 0.0);
        // out_i = alpha_self * S_i + sum alpha_k * T_j
        dalpha[0] = go.dot(tr.s.row(i));
        ds.row(i) += tr.alpha[lo] * go;
        for (int k = lo + 1; k < hi; ++k) {
            const int j = g.source[static_cast<std::size_t>(k)];
            dalpha[static_cast<std::size_t>(k - lo)] = go.dot(tr.t.row(j));
            dt.row(j) += tr.alpha[k] * go;
        }
        double mean = 0.0;
        for (int k = lo; k < hi; ++k) mean += tr.alpha[k] * dalpha[static_cast<std::size_t>(k - lo)];
        const double* si = tr.s.row(i).data();
        for (int k = lo; k < hi; ++k) {
            const double dscore = tr.alpha[k] * (dalpha[static_cast<std::size_t>(k - lo)] - mean);
            if (dscore == 0.0) continue;
            const int j = g.source[static_cast<std::size_t>(k)];
            const int ek = g.edge[static_cast<std::size_t>(k)];
            const double* tj = tr.t.row(j).data();
            const double* e = ek >= 0 ? tr.e.row(ek).data() : nullptr;
            double* dsi = ds.row(i).data();
            double* dtj = dt.row(j).data();
            double* dek = ek >= 0 ? de.row(ek).data() : nullptr;
            for (int c = 0; c < d; ++c) {
                const double z = si[c] + tj[c] + (e ? e[c] : 0.0);
                da[c] += dscore * leaky_relu(z, slope);
                const double dz = dscore * a[c] * (z > 0.0 ? 1.0 : slope);
                dsi[c] += dz;
                dtj[c] += dz;
                if (dek) dek[c] += dz;
            }
        }
    }
    grad.phi_s.noalias() += ds.transpose() * x;
    grad.phi_t.noalias() += dt.transpose() * x;
    if (g.edge_feats.rows() > 0) grad.phi_e.noalias() += de.transpose() * g.edge_feats;
    if (!need_input_grad) return {};
    Matrix dx = ds * layer.phi_s;
    dx.noalias() += dt * layer.phi_t;
    return dx;
}

namespace {

Matrix softmax_rows(const Matrix& logits) {
    Matrix p(logits.rows(), logits.cols());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const double mx = logits.row(i).maxCoeff();
        double sum = 0.0;
        for (Eigen::Index c = 0; c < logits.cols(); ++c) sum += (p(i, c) = std::exp(logits(i, c) - mx));
        p.row(i) /= sum;
    }
    return p;
}

}  // namespace

std::vector<ParamBlock> scaling_blocks(GatModel& model) {
    std::vector<ParamBlock> out;
    auto add = [&](std::string name, Vector& v) {
        out.push_back({std::move(name), static_cast<int>(v.size()), 1, std::span<double>(v.data(), static_cast<std::size_t>(v.size()))});
    };
    add("scaling.node_shift", model.node_shift);
    add("scaling.node_scale", model.node_scale);
    add("scaling.edge_shift", model.edge_shift);
    add("scaling.edge_scale", model.edge_scale);
    return out;
}

GraphTensors apply_scaling(const GatModel& model, const GraphTensors& g) {
    if (g.x.cols() != model.d_in) {
        throw Error(ErrorKind::DimensionMismatch,
                    fmt::format("model expects {} node features, graph has {}", model.d_in, g.x.cols()));
    }
    GraphTensors s = g;
    if (model.node_shift.size() == model.d_in) {
        s.x.rowwise() -= model.node_shift.transpose();
        s.x.array().rowwise() *= model.node_scale.transpose().array();
    }
    if (model.edge_shift.size() == kEdgeFeatureCount && s.edge_feats.rows() > 0) {
        s.edge_feats.rowwise() -= model.edge_shift.transpose();
        s.edge_feats.array().rowwise() *= model.edge_scale.transpose().array();
    }
    return s;
}

ForwardTrace model_forward(const GatModel& model, const GraphTensors& g) {
    ForwardTrace tr;
    tr.input = apply_scaling(model, g);
    const GraphTensors& in = tr.input;
    tr.layer1 = layer_forward(model.layer1, in.x, in);
    tr.hidden = tr.layer1.out.cwiseMax(0.0);
    tr.layer2 = layer_forward(model.layer2, tr.hidden, in);
    for (std::size_t k = 0; k < 3; ++k) {
        tr.logits[k] = project_rows(tr.layer2.out, model.head_w[k]);
        tr.logits[k].rowwise() += model.head_b[k].transpose();
        tr.probs[k] = softmax_rows(tr.logits[k]);
    }
    return tr;
}

std::vector<LabelTriple> predict(const ForwardTrace& trace) {
    const Eigen::Index n = trace.probs[0].rows();
    std::vector<LabelTriple> out(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < 3; ++k) {
            Eigen::Index best = 0;
            trace.probs[k].row(i).maxCoeff(&best);
            out[static_cast<std::size_t>(i)][k] = static_cast<int>(best);
        }
    }
    return out;
}

namespace {

void check_labels(const GatModel& model, const GraphTensors& g) {
    if (static_cast<int>(g.labels.size()) != g.node_count()) {
        throw Error(ErrorKind::UnlabeledNode, "every node needs an (l1, l2, l3) label");
    }
    for (const LabelTriple& y : g.labels) {
        for (std::size_t k = 0; k < 3; ++k) {
            if (y[k] < 0 || y[k] >= model.level_sizes[k]) {
                throw Error(ErrorKind::InvalidArgument,
                            fmt::format("label {} out of range for level {} (size {})", y[k], k + 1, model.level_sizes[k]));
            }
        }
    }
}

}  // namespace

double loss_only(const GatModel& model, const GraphTensors& g, std::array<double, 3> head_weights) {
    check_labels(model, g);
    const ForwardTrace tr = model_forward(model, g);
    const int n = g.node_count();
    double loss = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        double ce = 0.0;
        for (int i = 0; i < n; ++i) ce -= std::log(std::max(tr.probs[k](i, g.labels[static_cast<std::size_t>(i)][k]), kLogClamp));
        loss += head_weights[k] * ce / n;
    }
    return loss;
}

LossResult loss_and_gradients(const GatModel& model, const GraphTensors& g, std::array<double, 3> head_weights) {
    check_labels(model, g);
    const ForwardTrace tr = model_forward(model, g);
    const int n = g.node_count();
    LossResult r;
    r.grad = GatModel::zeros(model.d_in, model.d_h, model.level_sizes, model.layer1.leaky_slope);
    Matrix d_trunk = Matrix::Zero(n, model.d_h);
    for (std::size_t k = 0; k < 3; ++k) {
        Matrix dlogits = tr.probs[k];
        double ce = 0.0;
        for (int i = 0; i < n; ++i) {
            const int y = g.labels[static_cast<std::size_t>(i)][k];
            const double p = tr.probs[k](i, y);
            if (p < kLogClamp) {
                // clamped: this node's term is constant
                ce -= std::log(kLogClamp);
                dlogits.row(i).setZero();
            } else {
                ce -= std::log(p);
                dlogits(i, y) -= 1.0;
            }
        }
        r.head_loss[k] = ce / n;
        r.loss += head_weights[k] * r.head_loss[k];
        dlogits *= head_weights[k] / n;
        r.grad.head_w[k].noalias() += dlogits.transpose() * tr.layer2.out;
        r.grad.head_b[k] += dlogits.colwise().sum().transpose();
        d_trunk.noalias() += dlogits * model.head_w[k];
    }
    Matrix d_hidden = layer_backward(model.layer2, tr.hidden, tr.input, tr.layer2, d_trunk, r.grad.layer2);
    d_hidden.array() *= (tr.layer1.out.array() > 0.0).cast<double>();
    layer_backward(model.layer1, tr.input.x, tr.input, tr.layer1, d_hidden, r.grad.layer1, false);
    return r;
}

}  // namespace vecseg
