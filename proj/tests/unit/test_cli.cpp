#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "vecseg/cli/commands.hpp"
#include "vecseg/error.hpp"
#include "vecseg/graph/graph.hpp"

using namespace vecseg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("vecseg_cli_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& rel) const { return (path / rel).string(); }
};

void write(const std::string& file, std::string_view text) {
    fs::create_directories(fs::path(file).parent_path());
    std::ofstream(file, std::ios::binary) << text;
}

std::string read(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

constexpr std::string_view kToy = R"svg(<svg xmlns="http://www.w3.org/2000/svg">
  <g data-layer="grid" transform="translate(10 5)"><path d="M 0 0 L 100 0"/></g>
  <g data-layer="window"><rect x="5" y="5" width="20" height="3" fill="none" stroke="#0000ff"/></g>
  <g data-layer="door_swing"><path d="M 40 40 A 10 10 0 0 1 50 50" fill="none"/></g>
</svg>)svg";

}  // namespace

TEST_CASE("normalize: valid, bad, empty") {
    TempDir t("norm");
    write(t / "in/a.svg", kToy);
    std::ostringstream out, err;
    CHECK(cmd_normalize({{t / "in/a.svg"}, t / "out1", false, 1}, out, err) == kExitOk);
    CHECK(fs::exists(t / "out1/a.svg"));
    CHECK(out.str().find("1 processed, 0 failed") != std::string::npos);

    write(t / "in/b.svg", "<svg><path d='M 0 0 L 1 1'/>");  // unclosed
    std::ostringstream out2, err2;
    CHECK(cmd_normalize({{t / "in"}, t / "out2", true, 2}, out2, err2) == kExitOk);
    CHECK(out2.str().find("1 processed, 1 failed") != std::string::npos);
    CHECK(out2.str().find("b.svg") != std::string::npos);
    CHECK(read(t / "out2/normalize.log").find("FAIL") != std::string::npos);
    std::ostringstream out3, err3;
    CHECK(cmd_normalize({{t / "in"}, t / "out3", false, 1}, out3, err3) == kExitInput);

    fs::create_directories(t / "empty");
    std::ostringstream out4, err4;
    CHECK(cmd_normalize({{t / "empty"}, t / "out4", false, 1}, out4, err4) == kExitOk);
    CHECK(out4.str().find("0 processed") != std::string::npos);
}

TEST_CASE("graph: labels, determinism, job-count independence") {
    TempDir t("graph");
    write(t / "in/toy.svg", kToy);
    SynthOptions so{t / "in", 3, 5, 0.0, false};
    std::ostringstream sink;
    cmd_synth(so, sink, sink);

    GraphOptions g;
    g.inputs = {t / "in"};
    g.config.label_map = t / "in/labels.tsv";
    g.config.graph.features.n_max = 4;
    g.with_labels = true;
    g.out_dir = t / "a";
    CHECK(cmd_graph(g, sink, sink) == kExitOk);
    g.out_dir = t / "b";
    g.jobs = 3;
    CHECK(cmd_graph(g, sink, sink) == kExitOk);

    const DrawingGraph toy = load_graph(t / "a/graphs/toy.json");
    CHECK(toy.nodes.size() == 3);
    CHECK(toy.edges.size() == 3);
    REQUIRE(toy.nodes[0].label);
    CHECK((*toy.nodes[0].label)[2] == 1);  // grid
    CHECK((*toy.nodes[2].label)[2] == 6);  // door swing
    for (const char* f : {"manifest.json", "graphs/toy.json", "graphs/synth_0002.json", "config.toml", "labels.tsv"})
        CHECK_MESSAGE(read(t / (std::string("a/") + f)) == read(t / (std::string("b/") + f)), f);
    CHECK(read(t / "a/manifest.json").find("\"synthetic\"") != std::string::npos);

    // unknown layer without a matching leaf
    write(t / "bad/x.svg", R"(<svg><g data-layer="A_NOPE"><path d="M 0 0 L 1 1"/></g></svg>)");
    g.inputs = {t / "bad"};
    g.out_dir = t / "c";
    try {
        cmd_graph(g, sink, sink);
        FAIL("expected UnknownLeaf");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnknownLeaf);
    }
}

TEST_CASE("train, eval, predict, filter") {
    TempDir t("train");
    std::ostringstream sink;
    cmd_synth({t / "svg", 10, 1, 0.0, false}, sink, sink);
    GraphOptions g;
    g.inputs = {t / "svg"};
    g.config.label_map = t / "svg/labels.tsv";
    g.config.graph.features.n_max = 2;
    g.with_labels = true;
    g.out_dir = t / "ds";
    REQUIRE(cmd_graph(g, sink, sink) == kExitOk);

    TrainOptions tr;
    tr.dataset = t / "ds";
    tr.out_dir = t / "run";
    tr.config = g.config;
    tr.config.hidden = 16;
    tr.config.train.epochs = 3;
    tr.quiet = true;
    std::ostringstream out;
    REQUIRE(cmd_train(tr, out, sink) == kExitOk);
    CHECK(out.str().starts_with("parameter_count: "));
    CHECK(out.str().find("F1-score") != std::string::npos);
    for (const char* f : {"model.ckpt", "config.toml", "split.json", "metrics.jsonl", "report.txt", "report.json"})
        CHECK_MESSAGE(fs::exists(t / (std::string("run/") + f)), f);

    // the emitted config reproduces the run
    TrainOptions again = tr;
    again.out_dir = t / "run2";
    again.config = load_config(t / "run/config.toml");
    REQUIRE(cmd_train(again, sink, sink) == kExitOk);
    CHECK(read(t / "run/model.ckpt") == read(t / "run2/model.ckpt"));

    std::ostringstream ev;
    CHECK(cmd_eval({t / "run/model.ckpt", t / "ds", 3, "test", "", t / "ev.json", 1}, ev, sink) == kExitOk);
    CHECK(ev.str().find("Precision     Recall   F1-score    Support") != std::string::npos);
    CHECK(ev.str().find("door swing") != std::string::npos);
    CHECK(ev.str().find("wF1 without 'other'") != std::string::npos);
    CHECK(read(t / "ev.json").find("wf1_excluding_background") != std::string::npos);
    std::ostringstream ev1;
    CHECK(cmd_eval({t / "run/model.ckpt", t / "ds", 1, "", "", "", 2}, ev1, sink) == kExitOk);
    CHECK(ev1.str().find("Elements") != std::string::npos);

    PredictOptions pr;
    pr.checkpoint = t / "run/model.ckpt";
    pr.svg = t / "svg/synth_0000.svg";
    pr.out_svg = t / "pred.svg";
    CHECK(cmd_predict(pr, sink, sink) == kExitOk);
    const std::string svg = read(t / "pred.svg");
    CHECK(svg.find("data-l3=") != std::string::npos);
    CHECK(read(t / "pred.tsv").starts_with("path_id\tl1\tl2\tl3\tclass\n"));

    std::ostringstream fo;
    CHECK(cmd_filter({t / "ds/graphs/synth_0001.json", "contiguous == 1", t / "f.json"}, fo, sink) == kExitOk);
    const DrawingGraph full = load_graph(t / "ds/graphs/synth_0001.json");
    const DrawingGraph kept = load_graph(t / "f.json");
    CHECK(kept.nodes.size() == full.nodes.size());
    CHECK(kept.edges.size() < full.edges.size());
    for (const GraphEdge& e : kept.edges) CHECK(e.features[EdgeFeature::Contiguous] == 1.0);
}

TEST_CASE("exit code mapping") {
    std::ostringstream err;
    CHECK(report_failure(err, Error(ErrorKind::MalformedMarkup, "x")) == kExitInput);
    CHECK(report_failure(err, Error(ErrorKind::DimensionMismatch, "x")) == kExitInternal);
    CHECK(report_failure(err, std::logic_error("x")) == kExitInternal);
    CHECK(err.str().find("error: ") == 0);
}
