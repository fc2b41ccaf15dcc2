#include "vecseg/gat/train.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include <fmt/format.h>

#include "json.hpp"
#include "vecseg/error.hpp"
#include "vecseg/parallel.hpp"
#include "vecseg/random.hpp"

namespace vecseg {

Optimizer::Optimizer(const GatModel& shape, const TrainConfig& cfg)
    : cfg_(cfg),
      m_(GatModel::zeros(shape.d_in, shape.d_h, shape.level_sizes)),
      v_(GatModel::zeros(shape.d_in, shape.d_h, shape.level_sizes)) {}

void Optimizer::step(GatModel& model, const GatModel& grad) {
    ++t_;
    auto params = param_blocks(model);
    const auto grads = param_blocks(grad);
    if (cfg_.optimizer == OptimizerKind::Sgd) {
        for (std::size_t b = 0; b < params.size(); ++b)
            for (std::size_t i = 0; i < params[b].values.size(); ++i) params[b].values[i] -= cfg_.lr * grads[b][i];
        return;
    }
    auto ms = param_blocks(m_);
    auto vs = param_blocks(v_);
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t b = 0; b < params.size(); ++b) {
        auto p = params[b].values;
        auto m = ms[b].values;
        auto v = vs[b].values;
        const auto g = grads[b];
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
            v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
            p[i] -= cfg_.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg_.eps);
        }
    }
}

namespace {

void add_into(GatModel& acc, const GatModel& g, double scale) {
    auto a = param_blocks(acc);
    const auto b = param_blocks(g);
    for (std::size_t k = 0; k < a.size(); ++k)
        for (std::size_t i = 0; i < a[k].values.size(); ++i) a[k].values[i] += scale * b[k][i];
}

bool all_finite(const GatModel& m) {
    for (const auto& block : param_blocks(m))
        for (double v : block)
            if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace

LossResult batch_gradients(const GatModel& model, const std::vector<const LabeledGraph*>& batch,
                           std::array<double, 3> head_weights, int jobs) {
    if (batch.empty()) throw Error(ErrorKind::InvalidArgument, "empty batch");
    std::vector<const LabeledGraph*> ordered = batch;
    std::stable_sort(ordered.begin(), ordered.end(), [](const LabeledGraph* a, const LabeledGraph* b) { return a->id < b->id; });
    std::vector<std::optional<LossResult>> parts(ordered.size());
    parallel_for(ordered.size(), jobs, [&](std::size_t i) { parts[i] = loss_and_gradients(model, ordered[i]->tensors, head_weights); });
    LossResult total;
    total.grad = GatModel::zeros(model.d_in, model.d_h, model.level_sizes, model.layer1.leaky_slope);
    const double scale = 1.0 / static_cast<double>(ordered.size());
    for (const auto& part : parts) {
        total.loss += scale * part->loss;
        for (std::size_t k = 0; k < 3; ++k) total.head_loss[k] += scale * part->head_loss[k];
        add_into(total.grad, part->grad, scale);
    }
    return total;
}

void fit_input_scaling(GatModel& model, const std::vector<LabeledGraph>& graphs) {
    auto fit = [](const auto& matrices, Eigen::Index cols, Vector& shift, Vector& scale) {
        Eigen::Index rows = 0;
        Vector sum = Vector::Zero(cols);
        for (const Matrix* m : matrices) {
            sum += m->colwise().sum().transpose();
            rows += m->rows();
        }
        shift = Vector::Zero(cols);
        scale = Vector::Ones(cols);
        if (rows == 0) return;
        shift = sum / static_cast<double>(rows);
        Vector sq = Vector::Zero(cols);
        for (const Matrix* m : matrices) sq += (m->rowwise() - shift.transpose()).array().square().colwise().sum().matrix().transpose();
        for (Eigen::Index c = 0; c < cols; ++c) {
            const double sd = std::sqrt(sq[c] / static_cast<double>(rows));
            scale[c] = sd > 1e-12 ? 1.0 / sd : 1.0;
        }
    };
    std::vector<const Matrix*> xs, es;
    for (const LabeledGraph& g : graphs) {
        if (g.tensors.x.cols() != model.d_in) {
            throw Error(ErrorKind::DimensionMismatch, fmt::format("graph {} has {} features, model expects {}", g.id,
                                                                  g.tensors.x.cols(), model.d_in));
        }
        xs.push_back(&g.tensors.x);
        if (g.tensors.edge_feats.rows() > 0) es.push_back(&g.tensors.edge_feats);
    }
    fit(xs, model.d_in, model.node_shift, model.node_scale);
    fit(es, kEdgeFeatureCount, model.edge_shift, model.edge_scale);
}

ConfusionAccumulator confusion(const GatModel& model, const std::vector<LabeledGraph>& graphs, int level, int jobs) {
    if (level < 1 || level > 3) throw Error(ErrorKind::InvalidArgument, "level must be 1, 2 or 3");
    const auto k = static_cast<std::size_t>(level - 1);
    std::vector<std::optional<ConfusionAccumulator>> parts(graphs.size());
    parallel_for(graphs.size(), jobs, [&](std::size_t gi) {
        const GraphTensors& g = graphs[gi].tensors;
        if (static_cast<int>(g.labels.size()) != g.node_count()) {
            throw Error(ErrorKind::UnlabeledNode, fmt::format("graph '{}' is not labeled", graphs[gi].id));
        }
        const auto pred = predict(model_forward(model, g));
        ConfusionAccumulator acc(model.level_sizes[k]);
        for (std::size_t i = 0; i < pred.size(); ++i) acc.add(g.labels[i][k], pred[i][k]);
        parts[gi] = std::move(acc);
    });
    ConfusionAccumulator total(model.level_sizes[k]);
    for (const auto& p : parts) total.merge(*p);
    return total;
}

ClassificationReport evaluate(const GatModel& model, const std::vector<LabeledGraph>& graphs, int level,
                              const std::vector<std::string>& names, int jobs) {
    return make_report(confusion(model, graphs, level, jobs), names);
}

double mean_loss(const GatModel& model, const std::vector<LabeledGraph>& graphs, std::array<double, 3> head_weights) {
    if (graphs.empty()) return 0.0;
    double total = 0.0;
    for (const LabeledGraph& g : graphs) total += loss_only(model, g.tensors, head_weights);
    return total / static_cast<double>(graphs.size());
}

TrainResult train_loop(GatModel& model, const std::vector<LabeledGraph>& train, const std::vector<LabeledGraph>& val,
                       const TrainConfig& cfg, const EpochCallback& on_epoch) {
    if (train.empty()) throw Error(ErrorKind::InvalidArgument, "training set is empty");
    if (cfg.batch_size < 1) throw Error(ErrorKind::InvalidArgument, "batch size must be >= 1");
    Optimizer opt(model, cfg);
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    GatModel last_good = model;
    GatModel best = model;
    double best_score = -1.0;
    int since_best = 0;
    TrainResult result;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[bounded(rng, i)]);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
            std::vector<const LabeledGraph*> batch;
            for (std::size_t i = start; i < std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size)); ++i)
                batch.push_back(&train[order[i]]);
            const LossResult r = batch_gradients(model, batch, cfg.head_weights, cfg.jobs);
            loss_sum += r.loss * static_cast<double>(batch.size());
            if (std::isfinite(r.loss) && all_finite(r.grad)) opt.step(model, r.grad);
            if (!std::isfinite(r.loss) || !all_finite(model)) {
                model = last_good;
                if (!cfg.divergence_checkpoint.empty()) {
                    save_checkpoint(model, cfg.divergence_checkpoint, {{"diverged_at_epoch", std::to_string(epoch)}});
                }
                throw Error(ErrorKind::DivergedLoss,
                            fmt::format("non-finite loss or parameters in epoch {}; restored parameters from epoch {}", epoch,
                                        epoch - 1));
            }
        }
        last_good = model;

        EpochMetrics m;
        m.epoch = epoch;
        m.train_loss = loss_sum / static_cast<double>(train.size());
        if (cfg.track_train_metrics) {
            const ClassificationReport rep = evaluate(model, train, cfg.eval_level, {}, cfg.jobs);
            m.train_accuracy = rep.accuracy;
            m.train_wf1 = weighted_f1(rep);
        }
        if (!val.empty()) {
            m.val_loss = mean_loss(model, val, cfg.head_weights);
            m.val_wf1 = weighted_f1(evaluate(model, val, cfg.eval_level, {}, cfg.jobs));
        }
        result.history.push_back(m);

        bool keep_going = on_epoch ? on_epoch(m, model) : true;
        if (cfg.early_stopping && m.val_wf1) {
            if (*m.val_wf1 > best_score) {
                best_score = *m.val_wf1;
                best = model;
                since_best = 0;
            } else if (++since_best >= cfg.patience) {
                model = best;
                result.stopped_early = true;
                keep_going = false;
            }
        }
        if (!keep_going) {
            result.stopped_early = result.stopped_early || epoch < cfg.epochs;
            break;
        }
    }
    return result;
}

namespace {

constexpr char kMagic[8] = {'V', 'G', 'N', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
T swap_bytes(T v) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
}

template <typename T>
void write_le(std::ostream& out, T v) {
    if constexpr (std::endian::native == std::endian::big) v = swap_bytes(v);
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T read_le(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw Error(ErrorKind::BadFormat, "checkpoint truncated");
    if constexpr (std::endian::native == std::endian::big) v = swap_bytes(v);
    return v;
}

}  // namespace

void save_checkpoint(const GatModel& model, const std::string& path, const std::map<std::string, std::string>& meta) {
    nlohmann::ordered_json h;
    h["format"] = "vecseg-gat";
    h["version"] = kVersion;
    h["d_in"] = model.d_in;
    h["d_h"] = model.d_h;
    h["level_sizes"] = model.level_sizes;
    h["leaky_slope"] = model.layer1.leaky_slope;
    h["blocks"] = nlohmann::ordered_json::array();
    GatModel copy = model;
    std::vector<ParamBlock> blocks = param_blocks(copy);
    for (ParamBlock& b : scaling_blocks(copy)) blocks.push_back(std::move(b));
    for (const ParamBlock& b : blocks) h["blocks"].push_back({{"name", b.name}, {"rows", b.rows}, {"cols", b.cols}});
    h["meta"] = meta;
    const std::string header = h.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write checkpoint " + path);
    out.write(kMagic, sizeof kMagic);
    write_le<std::uint32_t>(out, kVersion);
    write_le<std::uint64_t>(out, header.size());
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    for (const ParamBlock& b : blocks)
        for (double v : b.values) write_le(out, std::bit_cast<std::uint64_t>(v));
    if (!out) throw Error(ErrorKind::Io, "failed writing checkpoint " + path);
}

GatModel load_checkpoint(const std::string& path, std::map<std::string, std::string>* meta) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open checkpoint " + path);
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw Error(ErrorKind::BadFormat, path + " is not a checkpoint");
    const auto version = read_le<std::uint32_t>(in);
    if (version != kVersion) throw Error(ErrorKind::BadFormat, fmt::format("unsupported checkpoint version {}", version));
    const auto len = read_le<std::uint64_t>(in);
    if (len > (1u << 26)) throw Error(ErrorKind::BadFormat, "checkpoint header too large");
    std::string header(len, '\0');
    in.read(header.data(), static_cast<std::streamsize>(len));
    if (!in) throw Error(ErrorKind::BadFormat, "checkpoint header truncated");
    GatModel model;
    try {
        const auto h = nlohmann::json::parse(header);
        model = GatModel::zeros(h.at("d_in").get<int>(), h.at("d_h").get<int>(),
                                h.at("level_sizes").get<std::array<int, 3>>(), h.at("leaky_slope").get<double>());
        model.layer2.leaky_slope = model.layer1.leaky_slope;
        auto blocks = param_blocks(model);
        for (ParamBlock& b : scaling_blocks(model)) blocks.push_back(std::move(b));
        const auto& hb = h.at("blocks");
        if (hb.size() != blocks.size()) throw Error(ErrorKind::BadFormat, "checkpoint block count mismatch");
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            if (hb[i].at("name").get<std::string>() != blocks[i].name || hb[i].at("rows").get<int>() != blocks[i].rows ||
                hb[i].at("cols").get<int>() != blocks[i].cols) {
                throw Error(ErrorKind::BadFormat, fmt::format("checkpoint block {} has unexpected shape", i));
            }
        }
        if (meta) *meta = h.value("meta", std::map<std::string, std::string>{});
        for (ParamBlock& b : blocks)
            for (double& v : b.values) v = std::bit_cast<double>(read_le<std::uint64_t>(in));
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorKind::BadFormat, std::string("checkpoint header: ") + ex.what());
    }
    return model;
}

}  // namespace vecseg
