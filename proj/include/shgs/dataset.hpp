#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "shgs/common.hpp"

namespace shgs {

// Cells left empty in the file become their own category level.
inline constexpr const char* kMissingLevel = "<missing>";

// A categorical CSV as loaded: predictor cells kept verbatim as text,
// the target column separated out. The target must be binary.
struct RawDataset {
    std::vector<std::string> predictor_names;
    std::vector<std::vector<std::string>> rows;  // aligned with predictor_names
    std::string target_name;
    std::vector<std::string> target_values;

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_predictors() const { return predictor_names.size(); }

    std::size_t count_target(const std::string& category) const {
        std::size_t c = 0;
        for (const auto& v : target_values) c += (v == category);
        return c;
    }
};

struct PredictorBlock {
    std::string name;
    std::size_t offset = 0;               // first feature column of this predictor
    std::vector<std::string> levels;      // ordered by first appearance
};

struct EncodedDataset {
    Eigen::MatrixXd features;             // n x d, entries in {0,1}, one-hot per predictor
    std::vector<int> labels;              // 0/1, 1 = positive class
    std::vector<PredictorBlock> column_map;

    std::size_t n_rows() const { return static_cast<std::size_t>(features.rows()); }
    std::size_t n_features() const { return static_cast<std::size_t>(features.cols()); }
    std::size_t n_positive() const {
        std::size_t c = 0;
        for (int y : labels) c += (y != 0);
        return c;
    }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace detail

// Parses a plain comma-separated file: first line header, no quoting.
// The named target column may sit at any position; every other column is a
// categorical predictor. Empty cells are renamed to kMissingLevel.
inline RawDataset parse_dataset(std::istream& in, const std::string& target_name,
                                const std::string& origin = "<stream>") {
    std::string line;
    if (!std::getline(in, line) || detail::split_csv_line(line).empty() || line.empty())
        throw data_error(origin + ": no header");

    const auto header = detail::split_csv_line(line);
    std::size_t target_col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == target_name) target_col = i;
    if (target_col == header.size())
        throw data_error(origin + ": header lacks target column '" + target_name + "'");

    RawDataset raw;
    raw.target_name = target_name;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (i != target_col) raw.predictor_names.push_back(header[i]);

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != header.size())
            throw data_error(origin + ": line " + std::to_string(line_no) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(header.size()));
        std::vector<std::string> predictors;
        predictors.reserve(header.size() - 1);
        for (std::size_t i = 0; i < fields.size(); ++i) {
            std::string v = fields[i].empty() ? std::string(kMissingLevel) : fields[i];
            if (i == target_col)
                raw.target_values.push_back(std::move(v));
            else
                predictors.push_back(std::move(v));
        }
        raw.rows.push_back(std::move(predictors));
    }

    std::vector<std::string> categories;
    for (const auto& v : raw.target_values)
        if (std::find(categories.begin(), categories.end(), v) == categories.end())
            categories.push_back(v);
    if (categories.size() != 2)
        throw data_error(origin + ": target column '" + target_name + "' has " +
                         std::to_string(categories.size()) + " distinct values, need exactly 2");
    return raw;
}

inline RawDataset load_dataset(const std::filesystem::path& path, const std::string& target_name) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open dataset file: " + path.string());
    return parse_dataset(in, target_name, path.string());
}

// Full one-hot: k columns per k-level predictor, levels ordered by first
// appearance in the file. labels[i] = 1 iff row i's target equals
// positive_label.
inline EncodedDataset encode_one_hot(const RawDataset& raw, const std::string& positive_label) {
    if (raw.count_target(positive_label) == 0)
        throw data_error("positive label '" + positive_label + "' not present in target column");

    EncodedDataset enc;
    enc.column_map.reserve(raw.n_predictors());
    std::size_t d = 0;
    for (std::size_t p = 0; p < raw.n_predictors(); ++p) {
        PredictorBlock block;
        block.name = raw.predictor_names[p];
        for (const auto& row : raw.rows) {
            const auto& v = row[p];
            if (std::find(block.levels.begin(), block.levels.end(), v) == block.levels.end())
                block.levels.push_back(v);
        }
        block.offset = d;
        d += block.levels.size();
        enc.column_map.push_back(std::move(block));
    }

    enc.features = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(raw.n_rows()),
                                         static_cast<Eigen::Index>(d));
    enc.labels.resize(raw.n_rows());
    for (std::size_t i = 0; i < raw.n_rows(); ++i) {
        for (std::size_t p = 0; p < raw.n_predictors(); ++p) {
            const auto& block = enc.column_map[p];
            const auto& v = raw.rows[i][p];
            const auto it = std::find(block.levels.begin(), block.levels.end(), v);
            const std::size_t col = block.offset + static_cast<std::size_t>(it - block.levels.begin());
            enc.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col)) = 1.0;
        }
        enc.labels[i] = (raw.target_values[i] == positive_label) ? 1 : 0;
    }
    return enc;
}

}  // namespace shgs
