#include "waferbench/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

#include "waferbench/errors.hpp"

namespace waferbench {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line, std::optional<char> delimiter) {
    std::vector<std::string_view> out;
    if (delimiter) {
        std::size_t start = 0;
        while (true) {
            const auto pos = line.find(*delimiter, start);
            out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
            if (pos == std::string_view::npos) break;
            start = pos + 1;
        }
        return out;
    }
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

std::optional<char> detect_delimiter(std::string_view line) {
    if (line.find(',') != std::string_view::npos) return ',';
    if (line.find('\t') != std::string_view::npos) return '\t';
    return std::nullopt;
}

double parse_number(std::string_view tok, const std::string& where) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (!tok.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (tok.empty() || ec != std::errc() || ptr != last) {
        throw DatasetError(where + ": non-numeric token '" + std::string(tok) + "'");
    }
    return v;
}

int parse_label(std::string_view tok, const std::string& where) {
    const double v = parse_number(tok, where);
    if (v == 1.0) return 1;
    if (v == -1.0) return -1;
    throw DatasetError(where + ": unknown label value '" + std::string(tok) + "'");
}

}  // namespace

std::vector<TimeSeriesRecord> load_ucr_split(const std::filesystem::path& path, std::optional<char> delimiter,
                                             std::optional<std::size_t> series_length) {
    std::ifstream in(path);
    if (!in) throw DatasetError("cannot open " + path.string());

    std::vector<TimeSeriesRecord> records;
    std::optional<std::size_t> row_length;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty()) continue;
        if (!delimiter) delimiter = detect_delimiter(body);

        const std::string where = path.string() + ":" + std::to_string(line_no);
        const auto fields = split_fields(body, delimiter);
        if (fields.size() < 2) throw DatasetError(where + ": row has no samples");
        const std::size_t n = fields.size() - 1;
        if (row_length && *row_length != n) {
            throw DatasetError(where + ": ragged row (" + std::to_string(n) + " samples, expected " +
                               std::to_string(*row_length) + ")");
        }
        row_length = n;

        TimeSeriesRecord rec;
        rec.label = parse_label(fields[0], where);
        rec.source_index = records.size();
        const std::size_t keep = series_length ? *series_length : n;
        if (keep > n) {
            throw DatasetError(where + ": row has " + std::to_string(n) + " samples, fewer than series length " +
                               std::to_string(keep));
        }
        rec.values.reserve(keep);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = parse_number(fields[i + 1], where);
            if (i < keep) rec.values.push_back(v);
        }
        records.push_back(std::move(rec));
    }
    return records;
}

SplitDataset load_ucr(const std::filesystem::path& train_path, const std::filesystem::path& test_path,
                      std::optional<char> delimiter, std::optional<std::size_t> series_length) {
    if (!std::filesystem::exists(train_path)) throw DatasetError("missing file " + train_path.string());
    if (!std::filesystem::exists(test_path)) throw DatasetError("missing file " + test_path.string());
    if (std::filesystem::equivalent(train_path, test_path)) {
        throw DatasetError("train and test must be distinct files");
    }

    SplitDataset d;
    d.train = load_ucr_split(train_path, delimiter, series_length);
    d.test = load_ucr_split(test_path, delimiter, series_length);
    if (d.train.empty()) throw DatasetError("empty training split " + train_path.string());
    if (d.test.empty()) throw DatasetError("empty test split " + test_path.string());
    d.series_length = d.train.front().values.size();
    if (d.test.front().values.size() != d.series_length) {
        throw DatasetError("train and test series lengths differ");
    }
    return d;
}

double normal_fraction(const std::vector<TimeSeriesRecord>& records) {
    if (records.empty()) throw DatasetError("class balance of an empty split");
    const auto normal = std::count_if(records.begin(), records.end(), [](const auto& r) { return r.label == 1; });
    return static_cast<double>(normal) / static_cast<double>(records.size());
}

ClassBalance class_balance(const SplitDataset& d) {
    return {normal_fraction(d.train), normal_fraction(d.test)};
}

double max_abs_value(const std::vector<TimeSeriesRecord>& records) {
    double m = 0.0;
    for (const auto& r : records) {
        for (double v : r.values) m = std::max(m, std::abs(v));
    }
    return m;
}

double scale_factor(const SplitDataset& d, double target_max_abs) {
    if (!(target_max_abs > 0.0)) throw DatasetError("scale target must be positive");
    if (d.train.empty()) throw DatasetError("cannot scale an empty dataset");
    const double m = max_abs_value(d.train);
    if (m == 0.0) throw DatasetError("training data is all zero; scale factor undefined");
    return target_max_abs / m;
}

SplitDataset scale_inputs(const SplitDataset& d, double target_max_abs) {
    const double s = scale_factor(d, target_max_abs);
    const double train_max = max_abs_value(d.train);
    SplitDataset out = d;
    // The train maximum maps to the target exactly; rounding of v*s must not
    // push any train value past it.
    for (auto& r : out.train) {
        for (double& v : r.values) {
            const double scaled = v * s;
            v = (std::abs(v) == train_max || std::abs(scaled) > target_max_abs)
                    ? std::copysign(target_max_abs, v)
                    : scaled;
        }
    }
    for (auto& r : out.test) {
        for (double& v : r.values) v *= s;
    }
    return out;
}

void write_ucr_split(const std::filesystem::path& path, const std::vector<TimeSeriesRecord>& records,
                     char delimiter) {
    std::ofstream out(path);
    if (!out) throw DatasetError("cannot write " + path.string());
    char buf[32];
    for (const auto& r : records) {
        out << r.label;
        for (double v : r.values) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << delimiter << buf;
        }
        out << '\n';
    }
    if (!out) throw DatasetError("write failed for " + path.string());
}

std::optional<std::pair<std::filesystem::path, std::filesystem::path>> find_wafer_files(
    const std::filesystem::path& dir) {
    for (const char* ext : {".tsv", ".txt", ""}) {
        auto train = dir / (std::string("Wafer_TRAIN") + ext);
        auto test = dir / (std::string("Wafer_TEST") + ext);
        if (std::filesystem::is_regular_file(train) && std::filesystem::is_regular_file(test)) {
            return std::make_pair(train, test);
        }
    }
    return std::nullopt;
}

}  // namespace waferbench
