#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vecseg {

class ConfusionAccumulator {
public:
    explicit ConfusionAccumulator(int categories);

    void add(int y_true, int y_pred);
    void add(std::span<const int> y_true, std::span<const int> y_pred);
    void merge(const ConfusionAccumulator& other);

    int categories() const { return static_cast<int>(tp_.size()); }
    std::int64_t tp(int c) const { return tp_[static_cast<std::size_t>(c)]; }
    std::int64_t fp(int c) const { return fp_[static_cast<std::size_t>(c)]; }
    std::int64_t fn(int c) const { return fn_[static_cast<std::size_t>(c)]; }
    std::int64_t total() const { return total_; }
    std::int64_t correct() const { return correct_; }

private:
    std::vector<std::int64_t> tp_, fp_, fn_;
    std::int64_t total_ = 0;
    std::int64_t correct_ = 0;
};

struct CategoryRow {
    int id = 0;
    std::string name;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::int64_t support = 0;
};

struct AverageRow {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct ClassificationReport {
    std::vector<CategoryRow> rows;  // sorted by id
    double accuracy = 0.0;
    AverageRow macro;
    AverageRow weighted;
    std::int64_t total = 0;
};

/// Zero denominators give 0. Names default to the category id.
ClassificationReport make_report(const ConfusionAccumulator& acc, const std::vector<std::string>& names = {});

/// Throws LengthMismatch, InvalidArgument for out-of-range categories.
ClassificationReport classification_report(std::span<const int> y_true, std::span<const int> y_pred, int categories,
                                           const std::vector<std::string>& names = {});

/// Support-weighted F1. Throws EmptyReport when no category has support.
double weighted_f1(const ClassificationReport& report);
/// Same, with one category (the background class) left out.
double weighted_f1_excluding(const ClassificationReport& report, int category);
double macro_f1(const ClassificationReport& report);

std::string format_report(const ClassificationReport& report, std::string_view title = {});
std::string report_to_json(const ClassificationReport& report);

struct DatasetSplit {
    std::vector<std::size_t> train, val, test;
};

/// Drawing-level split. Counts round train and val to nearest, test takes
/// the rest. Deterministic given seed.
DatasetSplit split_dataset(std::size_t count, std::array<double, 3> ratios, std::uint64_t seed);

}  // namespace vecseg
