#include "doctest.h"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <random>

#include "vecseg/error.hpp"
#include "vecseg/gat/model.hpp"
#include "vecseg/gat/train.hpp"
#include "vecseg/synth/corpus.hpp"

using namespace vecseg;

namespace {

Matrix random_matrix(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
    return m;
}

struct Toy {
    Matrix x;
    std::vector<std::pair<int, int>> edges;
    Matrix e;
};

Toy random_toy(int n, int d_in, double density, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Toy t;
    t.x = random_matrix(n, d_in, rng);
    std::bernoulli_distribution keep(density);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (keep(rng)) t.edges.emplace_back(i, j);
    t.e = random_matrix(static_cast<int>(t.edges.size()), kEdgeFeatureCount, rng);
    return t;
}

GatLayerParams random_layer(int d_in, int d_out, std::mt19937_64& rng) {
    GatLayerParams p = GatLayerParams::zeros(d_in, d_out);
    p.phi_s = random_matrix(d_out, d_in, rng, 0.5);
    p.phi_t = random_matrix(d_out, d_in, rng, 0.5);
    p.phi_e = random_matrix(d_out, kEdgeFeatureCount, rng, 0.5);
    p.a = random_matrix(d_out, 1, rng).col(0);
    return p;
}

// Independent dense evaluation: loops over an n x n adjacency, no shift.
Matrix dense_layer(const GatLayerParams& p, const Toy& t, std::vector<std::vector<double>>* alpha_out = nullptr) {
    const int n = static_cast<int>(t.x.rows()), d = p.d_out(), d_in = p.d_in();
    std::vector<std::vector<int>> edge_of(n, std::vector<int>(n, -1));
    for (std::size_t k = 0; k < t.edges.size(); ++k) {
        edge_of[t.edges[k].first][t.edges[k].second] = static_cast<int>(k);
        edge_of[t.edges[k].second][t.edges[k].first] = static_cast<int>(k);
    }
    auto proj = [&](const Matrix& w, int row) {
        std::vector<double> v(d, 0.0);
        for (int c = 0; c < d; ++c)
            for (int k = 0; k < d_in; ++k) v[c] += w(c, k) * t.x(row, k);
        return v;
    };
    Matrix out = Matrix::Zero(n, d);
    if (alpha_out) alpha_out->assign(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        const auto si = proj(p.phi_s, i);
        std::vector<double> w(n, 0.0);
        double total = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j != i && edge_of[i][j] < 0) continue;
            const auto tj = proj(p.phi_t, j);
            double score = 0.0;
            for (int c = 0; c < d; ++c) {
                double z = si[c] + tj[c];
                if (j != i)
                    for (int m = 0; m < kEdgeFeatureCount; ++m) z += p.phi_e(c, m) * t.e(edge_of[i][j], m);
                score += p.a[c] * (z > 0 ? z : 0.2 * z);
            }
            w[j] = std::exp(score);
            total += w[j];
        }
        for (int j = 0; j < n; ++j) {
            if (w[j] == 0.0) continue;
            const double alpha = w[j] / total;
            if (alpha_out) (*alpha_out)[i][j] = alpha;
            const auto v = j == i ? si : proj(p.phi_t, j);
            for (int c = 0; c < d; ++c) out(i, c) += alpha * v[c];
        }
    }
    return out;
}

GraphTensors tensors(const Toy& t) { return make_tensors(t.x, t.edges, t.e); }

double row_sum(const Vector& alpha, const GraphTensors& g, int i) {
    double s = 0.0;
    for (int k = g.offsets[i]; k < g.offsets[i + 1]; ++k) s += alpha[k];
    return s;
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no exception");
    return ErrorKind::Io;
}

// Small labelled graph built by the real pipeline (n_max=1 keeps d_in at 23).
GraphTensors small_labelled_graph(int nodes, std::uint64_t seed, std::array<int, 3> sizes) {
    GraphConfig cfg;
    cfg.k_neighbors = 2;
    cfg.random_fraction = 0.3;
    cfg.seed = seed;
    cfg.features.n_max = 1;
    std::mt19937_64 rng(seed);
    std::vector<std::optional<LabelTriple>> labels;
    for (int i = 0; i < nodes; ++i) {
        labels.push_back(LabelTriple{static_cast<int>(rng() % sizes[0]), static_cast<int>(rng() % sizes[1]),
                                     static_cast<int>(rng() % sizes[2])});
    }
    return to_tensors(build_graph(random_paths(nodes, seed), cfg, "fd", &labels), true);
}

}  // namespace

TEST_CASE("attention: isolated node and self path") {
    std::mt19937_64 rng(1);
    Toy t{random_matrix(1, 4, rng), {}, Matrix(0, kEdgeFeatureCount)};
    const GatLayerParams p = random_layer(4, 3, rng);
    const GraphTensors g = tensors(t);
    const LayerTrace tr = layer_forward(p, t.x, g);
    CHECK(tr.alpha.size() == 1);
    CHECK(tr.alpha[0] == 1.0);
    const Matrix expect = t.x * p.phi_s.transpose();
    CHECK((tr.out - expect).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("attention: symmetric neighbours share weight") {
    // edge vectors equal to the self arc's (zero)
    Toy t{Matrix::Constant(3, 4, 0.7), {{0, 1}, {0, 2}}, Matrix::Zero(2, kEdgeFeatureCount)};
    std::mt19937_64 rng(2);
    const GatLayerParams p = random_layer(4, 5, rng);
    const GraphTensors g = tensors(t);
    const LayerTrace tr = layer_forward(p, t.x, g);
    for (int k = g.offsets[0]; k < g.offsets[1]; ++k) CHECK(tr.alpha[k] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("attention: softmax shift invariance and stability") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> s(1 + trial % 7);
        for (double& v : s) v = u(rng);
        std::vector<double> a(s.size()), b(s.size());
        attention_softmax(s, a);
        const double c = u(rng) * 100.0;
        std::vector<double> shifted = s;
        for (double& v : shifted) v += c;
        attention_softmax(shifted, b);
        for (std::size_t k = 0; k < s.size(); ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-12);
    }
    std::vector<double> big{1000.0, 999.0}, out(2);
    attention_softmax(big, out);
    CHECK(out[0] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-14));
}

TEST_CASE("layer: zero projections give zero output") {
    const Toy t = random_toy(6, 5, 0.5, 4);
    GatLayerParams p = GatLayerParams::zeros(5, 4);
    std::mt19937_64 rng(4);
    p.phi_e = random_matrix(4, kEdgeFeatureCount, rng);
    p.a = random_matrix(4, 1, rng).col(0);
    CHECK(layer_forward(p, t.x, tensors(t)).out.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("layer: dense oracle") {
    for (std::uint64_t seed = 10; seed < 15; ++seed) {
        const Toy t = random_toy(5, 6, 0.5, seed);
        std::mt19937_64 rng(seed * 7);
        const GatLayerParams p = random_layer(6, 4, rng);
        const GraphTensors g = tensors(t);
        const LayerTrace tr = layer_forward(p, t.x, g);
        std::vector<std::vector<double>> alpha;
        const Matrix expect = dense_layer(p, t, &alpha);
        CHECK((tr.out - expect).cwiseAbs().maxCoeff() <= 1e-10);
        for (int i = 0; i < g.node_count(); ++i) {
            CHECK(std::abs(row_sum(tr.alpha, g, i) - 1.0) <= 1e-9);
            for (int k = g.offsets[i]; k < g.offsets[i + 1]; ++k)
                CHECK(std::abs(tr.alpha[k] - alpha[i][g.source[k]]) <= 1e-10);
        }
    }
}

TEST_CASE("arcs: self first, both directions share the edge vector") {
    const Toy t = random_toy(7, 3, 0.4, 20);
    const GraphTensors g = tensors(t);
    CHECK(g.arc_count() == 7 + 2 * static_cast<int>(t.edges.size()));
    for (int i = 0; i < 7; ++i) {
        CHECK(g.source[g.offsets[i]] == i);
        CHECK(g.edge[g.offsets[i]] == -1);
        for (int k = g.offsets[i] + 1; k < g.offsets[i + 1]; ++k) {
            const auto [a, b] = t.edges[g.edge[k]];
            CHECK(((a == i && b == g.source[k]) || (b == i && a == g.source[k])));
        }
    }
}

TEST_CASE("model: zero parameters give uniform heads") {
    const Toy t = random_toy(6, 5, 0.5, 30);
    const GatModel m = GatModel::zeros(5, 4, {3, 7, 11});
    const ForwardTrace tr = model_forward(m, tensors(t));
    for (int h = 0; h < 3; ++h) {
        const double expect = 1.0 / m.level_sizes[h];
        CHECK((tr.probs[h].array() - expect).abs().maxCoeff() <= 1e-15);
    }
}

TEST_CASE("model: probabilities and attention rows sum to one") {
    for (std::uint64_t seed = 40; seed < 45; ++seed) {
        const Toy t = random_toy(9, 8, 0.3, seed);
        const GatModel m = init_model(8, 6, {3, 7, 11}, seed);
        const GraphTensors g = tensors(t);
        const ForwardTrace tr = model_forward(m, g);
        for (int h = 0; h < 3; ++h)
            CHECK((tr.probs[h].rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-9);
        for (int i = 0; i < g.node_count(); ++i) {
            CHECK(std::abs(row_sum(tr.layer1.alpha, g, i) - 1.0) <= 1e-9);
            CHECK(std::abs(row_sum(tr.layer2.alpha, g, i) - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("model: isolated node follows the self path") {
    Toy t = random_toy(4, 5, 1.0, 50);
    std::erase_if(t.edges, [](auto e) { return e.first == 3 || e.second == 3; });
    t.e.conservativeResize(static_cast<Eigen::Index>(t.edges.size()), kEdgeFeatureCount);
    const GatModel m = init_model(5, 6, {2, 3, 4}, 50);
    const ForwardTrace tr = model_forward(m, tensors(t));
    const Vector h = (m.layer1.phi_s * t.x.row(3).transpose()).cwiseMax(0.0);
    const Vector trunk = m.layer2.phi_s * h;
    CHECK((tr.layer2.out.row(3).transpose() - trunk).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("model: permutation equivariance is exact") {
    for (std::uint64_t seed = 60; seed < 66; ++seed) {
        const Toy t = random_toy(6, 7, 0.5, seed);
        std::vector<int> perm(6);
        std::iota(perm.begin(), perm.end(), 0);
        std::mt19937_64 rng(seed);
        std::shuffle(perm.begin(), perm.end(), rng);

        Toy p;
        p.x = Matrix(6, 7);
        for (int i = 0; i < 6; ++i) p.x.row(perm[i]) = t.x.row(i);
        std::vector<int> order(t.edges.size());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        p.e = Matrix(t.e.rows(), t.e.cols());
        for (std::size_t k = 0; k < order.size(); ++k) {
            auto [a, b] = t.edges[order[k]];
            p.edges.emplace_back(std::min(perm[a], perm[b]), std::max(perm[a], perm[b]));
            p.e.row(static_cast<Eigen::Index>(k)) = t.e.row(order[k]);
        }

        const GatModel m = init_model(7, 5, {3, 4, 6}, seed);
        const ForwardTrace a = model_forward(m, tensors(t));
        const ForwardTrace b = model_forward(m, tensors(p));
        bool exact = true;
        for (int h = 0; h < 3; ++h)
            for (int i = 0; i < 6; ++i) exact = exact && a.probs[h].row(i) == b.probs[h].row(perm[i]);
        for (int i = 0; i < 6; ++i) exact = exact && a.layer2.out.row(i) == b.layer2.out.row(perm[i]);
        CHECK(exact);
    }
}

TEST_CASE("loss: perfect and uniform predictions") {
    const Toy t = random_toy(5, 4, 0.5, 70);
    GraphTensors g = tensors(t);
    g.labels.assign(5, LabelTriple{1, 2, 0});
    GatModel m = GatModel::zeros(4, 3, {3, 4, 5});
    const std::array<double, 3> w{1.0, 2.0, 0.5};
    CHECK(loss_only(m, g, w) == doctest::Approx(std::log(3.0) + 2.0 * std::log(4.0) + 0.5 * std::log(5.0)).epsilon(1e-14));

    m.head_b[0][1] = 60.0;
    m.head_b[1][2] = 60.0;
    m.head_b[2][0] = 60.0;
    const LossResult r = loss_and_gradients(m, g, w);
    CHECK(r.loss <= 1e-6);
    CHECK(r.loss >= 0.0);
}

TEST_CASE("loss: analytic gradients match central differences") {
    const std::array<int, 3> sizes{3, 7, 11};
    const std::array<double, 3> w{1.0, 0.7, 1.3};
    for (std::uint64_t seed : {101, 202, 303}) {
        const int nodes = 5 + static_cast<int>(seed % 6);
        const GraphTensors g = small_labelled_graph(nodes, seed, sizes);
        GatModel m = init_model(g.x.cols(), 8, sizes, seed);
        fit_input_scaling(m, {LabeledGraph{"fd", g}});
        // non-zero biases so every block is exercised
        std::mt19937_64 rng(seed);
        for (auto& b : m.head_b) b = random_matrix(static_cast<int>(b.size()), 1, rng, 0.3).col(0);

        LossResult r = loss_and_gradients(m, g, w);
        const auto analytic = param_blocks(std::as_const(r.grad));
        auto blocks = param_blocks(m);
        const double eps = 1e-5;
        // A central difference cannot resolve changes below a few ulps of the
        // loss; gradients under that floor are compared absolutely.
        const double resolution = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, r.loss) / (2 * eps);
        double worst = 0.0;
        std::string worst_at;
        int resolved = 0, total = 0;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            for (std::size_t k = 0; k < blocks[b].values.size(); ++k) {
                double& v = blocks[b].values[k];
                const double keep = v;
                v = keep + eps;
                const double up = loss_only(m, g, w);
                v = keep - eps;
                const double down = loss_only(m, g, w);
                v = keep;
                const double fd = (up - down) / (2 * eps);
                const double an = analytic[b][k];
                const double scale = std::max({std::abs(fd), std::abs(an), resolution / 1e-4});
                const double rel = std::abs(fd - an) / scale;
                ++total;
                resolved += std::max(std::abs(fd), std::abs(an)) >= resolution / 1e-4;
                if (rel > worst) {
                    worst = rel;
                    worst_at = blocks[b].name + "[" + std::to_string(k) + "]";
                }
            }
        }
        MESSAGE("seed ", seed, ": loss ", r.loss, ", ", resolved, "/", total, " gradients above the difference floor ", resolution / 1e-4,
                ", worst relative error ", worst);
        INFO("seed ", seed, " nodes ", nodes, " worst at ", worst_at);
        CHECK(worst < 1e-4);
    }
}

TEST_CASE("parameter count") {
    CHECK(parameter_count(269, 8, {3, 12, 43}) == 5130);
    const GatModel m = init_model(269, 8, {3, 12, 43}, 1);
    CHECK(parameter_count(m) == 5130);
    std::int64_t total = 0;
    for (const auto& b : param_blocks(m)) total += static_cast<std::int64_t>(b.size());
    CHECK(total == 5130);

    const std::int64_t base = parameter_count(100, 16, {3, 7, 11});
    CHECK(parameter_count(101, 16, {3, 7, 11}) > base);
    CHECK(parameter_count(100, 17, {3, 7, 11}) > base);
    CHECK(parameter_count(100, 32, {3, 7, 11}) > 2 * base);
    CHECK(parameter_count(100, 16, {4, 7, 11}) > base);
    CHECK(parameter_count(100, 16, {3, 8, 11}) > base);
    CHECK(parameter_count(100, 16, {3, 7, 12}) > base);
}

TEST_CASE("errors") {
    const Toy t = random_toy(5, 4, 0.5, 90);
    const GraphTensors g = tensors(t);
    const GatModel m = init_model(4, 3, {2, 3, 4}, 1);
    CHECK(kind_of([&] { loss_and_gradients(m, g); }) == ErrorKind::UnlabeledNode);
    const GatModel wrong = init_model(5, 3, {2, 3, 4}, 1);
    CHECK(kind_of([&] { model_forward(wrong, g); }) == ErrorKind::DimensionMismatch);
    Matrix bad = t.x;
    bad(2, 1) = std::nan("");
    CHECK(kind_of([&] { make_tensors(bad, t.edges, t.e); }) == ErrorKind::NonFiniteInput);

    DrawingGraph dg = build_graph(random_paths(4, 1), {});
    CHECK(kind_of([&] { to_tensors(dg, true); }) == ErrorKind::UnlabeledNode);
    CHECK_NOTHROW(to_tensors(dg, false));
}
