#include "vecseg/synth/corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "vecseg/random.hpp"

namespace vecseg {

namespace {

constexpr std::string_view kSyntheticTsv =
    "# provenance: synthetic\n"
    "# catch-all: other\n"
    "# level1-names: Others|Elements|Grid\n"
    "leaf_id\tname\tl1\tl2\tl3\tdisplay\tgroup\n"
    "0\tother\t0\t0\t0\tother\tother\n"
    "1\tgrid\t2\t1\t1\tgrid axis\tgrid\n"
    "2\twall_load_bearing\t1\t2\t2\tload-bearing wall\twalls\n"
    "3\twall_partition\t1\t2\t3\tpartition wall\twalls\n"
    "4\twindow\t1\t3\t4\twindow\topenings\n"
    "5\tdoor_leaf\t1\t3\t5\tdoor leaf\topenings\n"
    "6\tdoor_swing\t1\t3\t6\tdoor swing\topenings\n"
    "7\tcolumn\t1\t4\t7\tcolumn\tcolumns\n"
    "8\tdimension_line\t1\t5\t8\tdimension line\tdimensions\n"
    "9\tdimension_tick\t1\t5\t9\tdimension tick\tdimensions\n"
    "10\tfurniture\t1\t6\t10\tfurniture\tfurniture\n";

constexpr std::array<std::string_view, kSynthClassCount> kLayerNames = {
    "other",  "grid",      "wall_load_bearing", "wall_partition", "window", "door_leaf",
    "door_swing", "column", "dimension_line",   "dimension_tick", "furniture"};

struct ClassStyle {
    std::string_view stroke;
    double width;
    std::string_view fill;
};

constexpr std::array<ClassStyle, kSynthClassCount> kStyles = {{
    {"#7f7f7f", 0.5, "none"},
    {"#d04040", 0.35, "none"},
    {"#000000", 1.0, "#404040"},
    {"#202020", 0.7, "none"},
    {"#2060d0", 0.5, "none"},
    {"#20a040", 0.5, "none"},
    {"#20a040", 0.35, "none"},
    {"#000000", 1.0, "#000000"},
    {"#a0a000", 0.25, "none"},
    {"#a0a000", 0.5, "none"},
    {"#8040a0", 0.5, "none"},
}};

// FloorplanCAD leaf ids (0-based) used by the FloorplanCAD-style writer.
constexpr int kFpSingleDoor = 0, kFpWindow = 6, kFpBed = 11, kFpChair = 12, kFpTable = 13, kFpWall = 32;

struct Item {
    SynthClass cls;
    std::string geom;  // element name + geometry attributes
    int floorplancad = -1;
};

std::string num(double v) { return fmt::format("{:.3f}", v); }

std::string line(Vec2 a, Vec2 b) {
    return fmt::format("line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"", num(a.x), num(a.y), num(b.x), num(b.y));
}

std::string polygon(std::initializer_list<Vec2> pts) {
    std::string s = "polygon points=\"";
    bool first = true;
    for (Vec2 p : pts) {
        if (!first) s += ' ';
        s += num(p.x) + "," + num(p.y);
        first = false;
    }
    return s + "\"";
}

std::string polyline(const std::vector<Vec2>& pts) {
    std::string s = "polyline points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) s += (i ? " " : "") + num(pts[i].x) + "," + num(pts[i].y);
    return s + "\"";
}

Vec2 perp(Vec2 u) { return {-u.y, u.x}; }

struct Plan {
    std::vector<Item> items;
};

class PlanBuilder {
public:
    PlanBuilder(std::uint64_t seed, const SynthConfig& cfg) : rng_(seed), cfg_(cfg) {}

    Plan build() {
        w_ = uniform(rng_, 700.0, 1200.0);
        h_ = uniform(rng_, 500.0, 900.0);
        grid();
        outer_walls();
        partitions();
        columns();
        dimensions();
        furniture();
        other();
        return std::move(plan_);
    }

private:
    void add(SynthClass cls, std::string geom, int fp = -1) { plan_.items.push_back({cls, std::move(geom), fp}); }

    void grid() {
        const int nx = uniform_int(rng_, 3, 5), ny = uniform_int(rng_, 3, 4);
        for (int i = 0; i < nx; ++i) xs_.push_back(w_ * i / (nx - 1));
        for (int i = 0; i < ny; ++i) ys_.push_back(h_ * i / (ny - 1));
        for (double x : xs_) {
            add(SynthClass::Grid, line({x, -120}, {x, h_ + 120}));
            add(SynthClass::Grid, fmt::format("circle cx=\"{}\" cy=\"-140\" r=\"18\"", num(x)));
        }
        for (double y : ys_) {
            add(SynthClass::Grid, line({-120, y}, {w_ + 120, y}));
            add(SynthClass::Grid, fmt::format("circle cx=\"-140\" cy=\"{}\" r=\"18\"", num(y)));
        }
    }

    // Openings of the given widths spread along [lo, hi]; sorted, disjoint.
    std::vector<std::pair<double, double>> openings(double lo, double hi, int count, double wmin, double wmax) {
        std::vector<std::pair<double, double>> out;
        const double slot = (hi - lo) / count;
        for (int i = 0; i < count; ++i) {
            const double width = std::min(uniform(rng_, wmin, wmax), 0.7 * slot);
            const double start = lo + i * slot + uniform(rng_, 0.1 * slot, 0.9 * slot - width);
            out.emplace_back(start, start + width);
        }
        return out;
    }

    static std::vector<std::pair<double, double>> solid(double lo, double hi,
                                                        const std::vector<std::pair<double, double>>& gaps) {
        std::vector<std::pair<double, double>> out;
        double at = lo;
        for (auto [a, b] : gaps) {
            out.emplace_back(at, a);
            at = b;
        }
        out.emplace_back(at, hi);
        return out;
    }

    void outer_walls() {
        const double t = 25.0;
        struct Side { Vec2 origin, u, n; double len; };  // n points inward
        const std::array<Side, 4> sides = {{
            {{0, 0}, {1, 0}, {0, 1}, w_},
            {{0, h_}, {1, 0}, {0, -1}, w_},
            {{0, t}, {0, 1}, {1, 0}, h_ - 2 * t},
            {{w_, t}, {0, 1}, {-1, 0}, h_ - 2 * t},
        }};
        for (const Side& s : sides) {
            const Vec2 o = s.origin, n = s.n;
            const auto gaps = openings(40, s.len - 40, uniform_int(rng_, 1, 2), 90, 160);
            for (auto [a, b] : solid(0, s.len, gaps)) {
                const Vec2 p0 = o + s.u * a, p1 = o + s.u * b;
                add(SynthClass::LoadBearingWall, polygon({p0, p1, p1 + n * t, p0 + n * t}), kFpWall);
            }
            for (auto [a, b] : gaps)
                for (double f : {0.0, 0.5, 1.0}) {
                    add(SynthClass::Window, line(o + s.u * a + n * (t * f), o + s.u * b + n * (t * f)), kFpWindow);
                }
        }
    }

    void door(Vec2 hinge, Vec2 u, Vec2 n, double width) {
        const Vec2 leaf_end = hinge + n * width, closed_end = hinge + u * width;
        add(SynthClass::DoorLeaf, line(hinge, leaf_end), kFpSingleDoor);
        const int sweep = cross(n, u) > 0 ? 1 : 0;
        add(SynthClass::DoorSwing,
            fmt::format("path d=\"M {} {} A {} {} 0 0 {} {} {}\"", num(leaf_end.x), num(leaf_end.y), num(width),
                        num(width), sweep, num(closed_end.x), num(closed_end.y)),
            kFpSingleDoor);
    }

    void wall_run(Vec2 start, Vec2 u, double len) {
        const double t = 10.0;
        const Vec2 n = perp(u);
        const auto gaps = openings(20, len - 20, 1, 75, 95);
        for (auto [a, b] : solid(0, len, gaps)) {
            for (double side : {-0.5, 0.5}) {
                add(SynthClass::PartitionWall, line(start + u * a + n * (t * side), start + u * b + n * (t * side)),
                    kFpWall);
            }
        }
        for (auto [a, b] : gaps) {
            const bool flip = uniform01(rng_) < 0.5;
            door(start + u * a, u, flip ? n * -1.0 : n, b - a);
        }
    }

    void partitions() {
        const double t = 25.0;
        const int nv = uniform_int(rng_, 1, 2);
        std::vector<double> vx;
        for (int i = 0; i < nv; ++i) vx.push_back(w_ * (i + 1) / (nv + 1) + uniform(rng_, -0.08, 0.08) * w_);
        for (double x : vx) wall_run({x, t}, {0, 1}, h_ - 2 * t);
        if (uniform01(rng_) < 0.7) {
            const double y = uniform(rng_, 0.35, 0.65) * h_;
            wall_run({t, y}, {1, 0}, vx.front() - t - 5);
        }
    }

    void columns() {
        const bool round = uniform01(rng_) < 0.5;
        for (std::size_t i = 1; i + 1 < xs_.size(); ++i)
            for (std::size_t j = 1; j + 1 < ys_.size(); ++j) {
                const double x = xs_[i], y = ys_[j];
                if (round) {
                    add(SynthClass::Column, fmt::format("circle cx=\"{}\" cy=\"{}\" r=\"15\"", num(x), num(y)));
                } else {
                    add(SynthClass::Column, fmt::format("rect x=\"{}\" y=\"{}\" width=\"30\" height=\"30\"",
                                                        num(x - 15), num(y - 15)));
                }
            }
    }

    void dimensions() {
        const double off = -60.0;
        for (std::size_t i = 0; i + 1 < xs_.size(); ++i) add(SynthClass::DimensionLine, line({xs_[i], off}, {xs_[i + 1], off}));
        for (double x : xs_) add(SynthClass::DimensionTick, line({x - 8, off + 8}, {x + 8, off - 8}));
        for (std::size_t i = 0; i + 1 < ys_.size(); ++i) add(SynthClass::DimensionLine, line({off, ys_[i]}, {off, ys_[i + 1]}));
        for (double y : ys_) add(SynthClass::DimensionTick, line({off - 8, y + 8}, {off + 8, y - 8}));
    }

    // Each piece gets its own translate/rotate so element transforms are exercised.
    void furniture() {
        const int count = uniform_int(rng_, 3, 7);
        for (int i = 0; i < count; ++i) {
            const Vec2 c{uniform(rng_, 0.15, 0.85) * w_, uniform(rng_, 0.15, 0.85) * h_};
            const std::string tf =
                fmt::format(" transform=\"translate({},{}) rotate({})\"", num(c.x), num(c.y), num(uniform(rng_, 0, 360)));
            switch (uniform_int(rng_, 0, 2)) {
                case 0: {
                    const double w = uniform(rng_, 80, 160), h = uniform(rng_, 60, 100);
                    add(SynthClass::Furniture,
                        fmt::format("rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"", num(-w / 2), num(-h / 2),
                                    num(w), num(h)) + tf,
                        kFpTable);
                    for (double sx : {-1.0, 1.0}) {
                        add(SynthClass::Furniture,
                            fmt::format("circle cx=\"{}\" cy=\"0\" r=\"{}\"", num(sx * (w / 2 + 25)), num(18)) + tf,
                            kFpChair);
                    }
                    break;
                }
                case 1:
                    add(SynthClass::Furniture, "rect x=\"-45\" y=\"-100\" width=\"90\" height=\"200\" rx=\"6\"" + tf, kFpBed);
                    add(SynthClass::Furniture, "rect x=\"-35\" y=\"-92\" width=\"70\" height=\"30\"" + tf, kFpBed);
                    break;
                default:
                    add(SynthClass::Furniture, "circle cx=\"0\" cy=\"0\" r=\"22\"" + tf, kFpChair);
                    break;
            }
        }
    }

    void other() {
        int count = uniform_int(rng_, 5, 15);
        if (cfg_.imbalance > 0.0) {
            std::array<int, kSynthClassCount> counts{};
            for (const Item& it : plan_.items) ++counts[static_cast<int>(it.cls)];
            int rarest = 1 << 30;
            for (int c = 1; c < kSynthClassCount; ++c)
                if (counts[c] > 0) rarest = std::min(rarest, counts[c]);
            count = std::max(1, static_cast<int>(std::lround(cfg_.imbalance * rarest)));
        }
        for (int i = 0; i < count; ++i) {
            const Vec2 at{uniform(rng_, -100, w_ + 100), uniform(rng_, -100, h_ + 100)};
            if (uniform01(rng_) < 0.6) {
                // short scribble, like annotation text
                std::vector<Vec2> pts{at};
                const int k = uniform_int(rng_, 2, 5);
                for (int j = 0; j < k; ++j) pts.push_back(pts.back() + Vec2{uniform(rng_, 2, 10), uniform(rng_, -8, 8)});
                add(SynthClass::Other, polyline(pts));
            } else {
                const Vec2 c1 = at + Vec2{uniform(rng_, -60, 60), uniform(rng_, -60, 60)};
                const Vec2 c2 = at + Vec2{uniform(rng_, -60, 60), uniform(rng_, -60, 60)};
                const Vec2 end = at + Vec2{uniform(rng_, -80, 80), uniform(rng_, -80, 80)};
                add(SynthClass::Other, fmt::format("path d=\"M {} {} C {} {} {} {} {} {}\"", num(at.x), num(at.y),
                                                   num(c1.x), num(c1.y), num(c2.x), num(c2.y), num(end.x), num(end.y)));
            }
        }
    }

    std::mt19937_64 rng_;
    SynthConfig cfg_;
    double w_ = 0, h_ = 0;
    std::vector<double> xs_, ys_;
    Plan plan_;
};

std::string style_attrs(const Item& item, std::mt19937_64& rng, double noise) {
    const ClassStyle& st = kStyles[static_cast<std::size_t>(item.cls)];
    std::string_view stroke = st.stroke;
    if (noise > 0.0 && uniform01(rng) < noise) stroke = kStyles[bounded(rng, kSynthClassCount)].stroke;
    return fmt::format(" stroke=\"{}\" stroke-width=\"{}\" fill=\"{}\"", stroke, st.width, st.fill);
}

std::string outer_transform(std::mt19937_64& rng, bool enabled) {
    if (!enabled) return {};
    return fmt::format(" transform=\"translate({},{}) rotate({}) scale({})\"", num(uniform(rng, -500, 500)),
                       num(uniform(rng, -500, 500)), 90 * uniform_int(rng, 0, 3), num(uniform(rng, 0.5, 2.0)));
}

constexpr std::string_view kHeader = "<svg xmlns=\"http://www.w3.org/2000/svg\">\n";

}  // namespace

std::string_view synthetic_label_tsv() { return kSyntheticTsv; }

LabelMap synthetic_label_map() { return parse_label_map(kSyntheticTsv, "synthetic"); }

std::string synth_floorplan_svg(std::uint64_t seed, const SynthConfig& cfg) {
    const Plan plan = PlanBuilder(seed, cfg).build();
    std::mt19937_64 rng(seed ^ 0x5eedf00dULL);
    std::string out(kHeader);
    out += "<g" + outer_transform(rng, cfg.outer_transform) + ">\n";
    for (int c = 0; c < kSynthClassCount; ++c) {
        out += fmt::format("<g data-layer=\"{}\">\n", kLayerNames[static_cast<std::size_t>(c)]);
        for (const Item& it : plan.items)
            if (static_cast<int>(it.cls) == c) out += "<" + it.geom + style_attrs(it, rng, cfg.style_noise) + "/>\n";
        out += "</g>\n";
    }
    out += "</g>\n</svg>\n";
    return out;
}

std::string synth_floorplancad_svg(std::uint64_t seed, const SynthConfig& cfg) {
    const Plan plan = PlanBuilder(seed, cfg).build();
    std::mt19937_64 rng(seed ^ 0x5eedf00dULL);
    std::string out(kHeader);
    out += "<g" + outer_transform(rng, cfg.outer_transform) + ">\n";
    int instance = 0;
    for (const Item& it : plan.items) {
        std::string extra;
        if (it.floorplancad >= 0) extra = fmt::format(" semantic-id=\"{}\" instance-id=\"{}\"", it.floorplancad + 1, instance++);
        out += "<" + it.geom + style_attrs(it, rng, cfg.style_noise) + extra + "/>\n";
    }
    out += "</g>\n</svg>\n";
    return out;
}

std::vector<NormalizedPath> random_paths(int count, std::uint64_t seed, double extent) {
    std::mt19937_64 rng(seed);
    auto pt = [&] { return Vec2{uniform(rng, 0, extent), uniform(rng, 0, extent)}; };
    const std::array<StyleAttributes, 3> styles = {{
        {false, {0, 0, 0}, 1.0},
        {true, {0.8, 0.1, 0.1}, 0.5},
        {false, {0.1, 0.3, 0.9}, 2.0},
    }};
    std::vector<NormalizedPath> out;
    for (int i = 0; i < count; ++i) {
        NormalizedPath p;
        p.path_id = i;
        p.style = styles[bounded(rng, styles.size())];
        auto& c = p.commands;
        c.push_back(PathCommand::move_to(pt()));
        switch (uniform_int(rng, 0, 6)) {
            case 0: c.push_back(PathCommand::line_to(pt())); break;
            case 1:
                for (int k = uniform_int(rng, 2, 5); k > 0; --k) c.push_back(PathCommand::line_to(pt()));
                break;
            case 2: c.push_back(PathCommand::cubic_to(pt(), pt(), pt())); break;
            case 3: c.push_back(PathCommand::quad_to(pt(), pt())); break;
            case 4:
                c.push_back(PathCommand::arc_to(uniform(rng, 0.05, 0.5) * extent, uniform(rng, 0.05, 0.5) * extent,
                                                uniform(rng, 0, 180), uniform01(rng) < 0.5, uniform01(rng) < 0.5, pt()));
                break;
            case 5: {
                const Vec2 o = c.front().end_point();
                const double w = uniform(rng, 0.02, 0.3) * extent, h = uniform(rng, 0.02, 0.3) * extent;
                c.push_back(PathCommand::line_to(o + Vec2{w, 0}));
                c.push_back(PathCommand::line_to(o + Vec2{w, h}));
                c.push_back(PathCommand::line_to(o + Vec2{0, h}));
                c.push_back(PathCommand::close());
                break;
            }
            default: {
                c.push_back(PathCommand::line_to(pt()));
                c.push_back(PathCommand::cubic_to(pt(), pt(), pt()));
                c.push_back(PathCommand::arc_to(uniform(rng, 0.1, 0.4) * extent, uniform(rng, 0.1, 0.4) * extent,
                                                uniform(rng, 0, 180), false, uniform01(rng) < 0.5, pt()));
                c.push_back(PathCommand::close());
                break;
            }
        }
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace vecseg
