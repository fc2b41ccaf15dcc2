#include "vecseg/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "json.hpp"
#include "vecseg/error.hpp"
#include "vecseg/random.hpp"

namespace vecseg {

ConfusionAccumulator::ConfusionAccumulator(int categories) {
    if (categories < 1) throw Error(ErrorKind::InvalidArgument, "need at least one category");
    tp_.assign(static_cast<std::size_t>(categories), 0);
    fp_ = tp_;
    fn_ = tp_;
}

void ConfusionAccumulator::add(int y_true, int y_pred) {
    const int n = categories();
    if (y_true < 0 || y_true >= n || y_pred < 0 || y_pred >= n) {
        throw Error(ErrorKind::InvalidArgument, fmt::format("category out of range: true={} pred={} (n={})", y_true, y_pred, n));
    }
    ++total_;
    if (y_true == y_pred) {
        ++correct_;
        ++tp_[static_cast<std::size_t>(y_true)];
    } else {
        ++fn_[static_cast<std::size_t>(y_true)];
        ++fp_[static_cast<std::size_t>(y_pred)];
    }
}

void ConfusionAccumulator::add(std::span<const int> y_true, std::span<const int> y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw Error(ErrorKind::LengthMismatch, fmt::format("{} true labels vs {} predictions", y_true.size(), y_pred.size()));
    }
    for (std::size_t i = 0; i < y_true.size(); ++i) add(y_true[i], y_pred[i]);
}

void ConfusionAccumulator::merge(const ConfusionAccumulator& other) {
    if (other.categories() != categories()) throw Error(ErrorKind::DimensionMismatch, "category counts differ");
    for (std::size_t c = 0; c < tp_.size(); ++c) {
        tp_[c] += other.tp_[c];
        fp_[c] += other.fp_[c];
        fn_[c] += other.fn_[c];
    }
    total_ += other.total_;
    correct_ += other.correct_;
}

namespace {

double ratio(std::int64_t num, std::int64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ClassificationReport make_report(const ConfusionAccumulator& acc, const std::vector<std::string>& names) {
    ClassificationReport r;
    r.total = acc.total();
    r.accuracy = ratio(acc.correct(), acc.total());
    std::int64_t support_sum = 0;
    for (int c = 0; c < acc.categories(); ++c) {
        CategoryRow row;
        row.id = c;
        row.name = static_cast<std::size_t>(c) < names.size() ? names[static_cast<std::size_t>(c)] : std::to_string(c);
        row.precision = ratio(acc.tp(c), acc.tp(c) + acc.fp(c));
        row.recall = ratio(acc.tp(c), acc.tp(c) + acc.fn(c));
        const double pr = row.precision + row.recall;
        row.f1 = pr == 0.0 ? 0.0 : 2.0 * row.precision * row.recall / pr;
        row.support = acc.tp(c) + acc.fn(c);
        support_sum += row.support;
        r.rows.push_back(std::move(row));
    }
    const double k = static_cast<double>(r.rows.size());
    for (const CategoryRow& row : r.rows) {
        r.macro.precision += row.precision / k;
        r.macro.recall += row.recall / k;
        r.macro.f1 += row.f1 / k;
        if (support_sum > 0) {
            const double w = static_cast<double>(row.support) / static_cast<double>(support_sum);
            r.weighted.precision += w * row.precision;
            r.weighted.recall += w * row.recall;
            r.weighted.f1 += w * row.f1;
        }
    }
    return r;
}

ClassificationReport classification_report(std::span<const int> y_true, std::span<const int> y_pred, int categories,
                                           const std::vector<std::string>& names) {
    ConfusionAccumulator acc(categories);
    acc.add(y_true, y_pred);
    return make_report(acc, names);
}

double weighted_f1_excluding(const ClassificationReport& report, int category) {
    double num = 0.0;
    std::int64_t den = 0;
    for (const CategoryRow& row : report.rows) {
        if (row.id == category) continue;
        num += static_cast<double>(row.support) * row.f1;
        den += row.support;
    }
    if (den == 0) throw Error(ErrorKind::EmptyReport, "no supported categories");
    return num / static_cast<double>(den);
}

double weighted_f1(const ClassificationReport& report) { return weighted_f1_excluding(report, -1); }

double macro_f1(const ClassificationReport& report) {
    if (report.rows.empty()) throw Error(ErrorKind::EmptyReport, "report has no categories");
    return report.macro.f1;
}

std::string format_report(const ClassificationReport& report, std::string_view title) {
    std::size_t w = 12;
    for (const CategoryRow& row : report.rows) w = std::max(w, row.name.size());
    std::string out;
    if (!title.empty()) out += fmt::format("{}\n", title);
    out += fmt::format("{:>{}}  {:>9}  {:>9}  {:>9}  {:>9}\n", "Class", w, "Precision", "Recall", "F1-score", "Support");
    for (const CategoryRow& row : report.rows) {
        out += fmt::format("{:>{}}  {:>9.2f}  {:>9.2f}  {:>9.2f}  {:>9}\n", row.name, w, row.precision, row.recall, row.f1,
                           row.support);
    }
    out += '\n';
    out += fmt::format("{:>{}}  {:>9}  {:>9}  {:>9.2f}  {:>9}\n", "accuracy", w, "", "", report.accuracy, report.total);
    out += fmt::format("{:>{}}  {:>9.2f}  {:>9.2f}  {:>9.2f}  {:>9}\n", "macro avg", w, report.macro.precision,
                       report.macro.recall, report.macro.f1, report.total);
    out += fmt::format("{:>{}}  {:>9.2f}  {:>9.2f}  {:>9.2f}  {:>9}\n", "weighted avg", w, report.weighted.precision,
                       report.weighted.recall, report.weighted.f1, report.total);
    return out;
}

std::string report_to_json(const ClassificationReport& report) {
    nlohmann::ordered_json j;
    j["rows"] = nlohmann::ordered_json::array();
    for (const CategoryRow& row : report.rows) {
        j["rows"].push_back({{"id", row.id},
                             {"name", row.name},
                             {"precision", row.precision},
                             {"recall", row.recall},
                             {"f1", row.f1},
                             {"support", row.support}});
    }
    j["accuracy"] = report.accuracy;
    j["macro"] = {{"precision", report.macro.precision}, {"recall", report.macro.recall}, {"f1", report.macro.f1}};
    j["weighted"] = {{"precision", report.weighted.precision}, {"recall", report.weighted.recall}, {"f1", report.weighted.f1}};
    j["total"] = report.total;
    return j.dump(2);
}

DatasetSplit split_dataset(std::size_t count, std::array<double, 3> ratios, std::uint64_t seed) {
    for (double r : ratios)
        if (!(r >= 0.0)) throw Error(ErrorKind::InvalidArgument, "split ratios must be non-negative");
    if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) {
        throw Error(ErrorKind::InvalidArgument, "split ratios must sum to 1");
    }
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = count; i > 1; --i) std::swap(order[i - 1], order[bounded(rng, i)]);
    const auto n_train = std::min(count, static_cast<std::size_t>(std::llround(ratios[0] * static_cast<double>(count))));
    const auto n_val = std::min(count - n_train, static_cast<std::size_t>(std::llround(ratios[1] * static_cast<double>(count))));
    DatasetSplit s;
    s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.val.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
    for (auto* part : {&s.train, &s.val, &s.test}) std::sort(part->begin(), part->end());
    return s;
}

}  // namespace vecseg
