#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace waferbench {

// One wafer's sensor trace. label is +1 (normal) or -1 (abnormal).
struct TimeSeriesRecord {
    int label = 1;
    std::vector<double> values;
    std::size_t source_index = 0;  // 0-based row within its split file

    bool operator==(const TimeSeriesRecord&) const = default;
};

struct SplitDataset {
    std::vector<TimeSeriesRecord> train;
    std::vector<TimeSeriesRecord> test;
    std::size_t series_length = 0;
};

struct ClassBalance {
    double train_normal_fraction = 0.0;
    double test_normal_fraction = 0.0;
};

// Parses one UCR split file. Each non-empty line is `label<delim>v1...<delim>vL`.
// With no delimiter given, comma is tried first and tab second; other
// whitespace runs are accepted as a last resort (older UCR releases).
// When series_length is set, rows longer than it are truncated to the
// first series_length samples; shorter rows are an error.
std::vector<TimeSeriesRecord> load_ucr_split(const std::filesystem::path& path,
                                             std::optional<char> delimiter = std::nullopt,
                                             std::optional<std::size_t> series_length = std::nullopt);

// Loads both splits and checks they share one series length.
SplitDataset load_ucr(const std::filesystem::path& train_path, const std::filesystem::path& test_path,
                      std::optional<char> delimiter = std::nullopt,
                      std::optional<std::size_t> series_length = std::nullopt);

ClassBalance class_balance(const SplitDataset& d);

// Fraction of +1 labels.
double normal_fraction(const std::vector<TimeSeriesRecord>& records);

// Largest |value| over a split.
double max_abs_value(const std::vector<TimeSeriesRecord>& records);

// Multiplies every value by target_max_abs / max|train value|. The same factor
// is applied to the test split, so test values may exceed the target.
SplitDataset scale_inputs(const SplitDataset& d, double target_max_abs);

// Scale factor scale_inputs would use.
double scale_factor(const SplitDataset& d, double target_max_abs);

// Writes records in the UCR row format with round-trip precision.
void write_ucr_split(const std::filesystem::path& path, const std::vector<TimeSeriesRecord>& records,
                     char delimiter = ',');

// Locates <dir>/Wafer_TRAIN{.tsv,.txt,} and the matching TEST file.
std::optional<std::pair<std::filesystem::path, std::filesystem::path>> find_wafer_files(
    const std::filesystem::path& dir);

}  // namespace waferbench
