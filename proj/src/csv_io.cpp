#include "advda/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "advda/errors.hpp"

namespace advda {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

namespace {

bool is_missing(const std::string& cell) {
    return cell.empty() || cell == "NA" || cell == "nan" || cell == "NaN";
}

double parse_number(const std::string& cell, std::size_t line_no, const std::string& column) {
    double v = 0.0;
    const char* begin = cell.data();
    const char* end = cell.data() + cell.size();
    while (begin < end && *begin == ' ') {
        ++begin;
    }
    if (begin < end && *begin == '+') {
        ++begin;
    }
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw DataError("line " + std::to_string(line_no) + ": cannot parse '" + cell + "' in column '" + column + "'");
    }
    return v;
}

}  // namespace

LoadResult load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line.empty()) {
        throw DataError(path.string() + ": empty file");
    }
    const auto header = split_csv_line(line);

    std::vector<std::string> label_cols = schema.label_columns;
    if (label_cols.empty()) {
        for (std::size_t j = 0; j < schema.task.label_columns(); ++j) {
            label_cols.push_back("y" + std::to_string(j));
        }
    }
    if (label_cols.size() != schema.task.label_columns()) {
        throw DataError("task " + schema.task.to_string() + " needs " +
                        std::to_string(schema.task.label_columns()) + " label column(s)");
    }
    auto find_col = [&](const std::string& name) -> std::optional<std::size_t> {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            return std::nullopt;
        }
        return static_cast<std::size_t>(it - header.begin());
    };
    std::vector<std::size_t> label_idx;
    for (const auto& name : label_cols) {
        auto idx = find_col(name);
        if (!idx) {
            throw DataError(path.string() + ": missing label column '" + name + "'");
        }
        label_idx.push_back(*idx);
    }
    std::optional<std::size_t> group_idx;
    if (schema.group_column) {
        group_idx = find_col(*schema.group_column);
        if (!group_idx && *schema.group_column != "group") {
            throw DataError(path.string() + ": missing group column '" + *schema.group_column + "'");
        }
    }
    std::vector<std::size_t> feature_idx;
    std::vector<std::string> feature_names;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const bool is_label = std::find(label_idx.begin(), label_idx.end(), c) != label_idx.end();
        if (!is_label && (!group_idx || c != *group_idx)) {
            feature_idx.push_back(c);
            feature_names.push_back(header[c]);
        }
    }

    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<std::string> groups;
    std::vector<std::pair<std::size_t, std::size_t>> missing;  // (row, feature)
    std::size_t line_no = 1;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw DataError(path.string() + ": line " + std::to_string(line_no) + " has " +
                            std::to_string(cells.size()) + " cells, expected " + std::to_string(header.size()));
        }
        bool row_missing = false;
        for (std::size_t f = 0; f < feature_idx.size(); ++f) {
            const auto& cell = cells[feature_idx[f]];
            if (is_missing(cell)) {
                missing.emplace_back(row, f);
                row_missing = true;
                xs.push_back(0.0);
            } else {
                xs.push_back(parse_number(cell, line_no, header[feature_idx[f]]));
            }
        }
        if (row_missing && schema.missing == MissingPolicy::Reject) {
            throw DataError(path.string() + ": line " + std::to_string(line_no) + " has a missing feature cell");
        }
        for (auto c : label_idx) {
            if (is_missing(cells[c])) {
                throw DataError(path.string() + ": line " + std::to_string(line_no) + " has a missing label");
            }
            ys.push_back(parse_number(cells[c], line_no, header[c]));
        }
        if (group_idx) {
            groups.push_back(cells[*group_idx]);
        }
        ++row;
    }
    if (row == 0) {
        throw DataError(path.string() + ": no data rows");
    }

    const std::size_t d = feature_idx.size();
    if (!missing.empty()) {
        std::vector<double> sum(d, 0.0);
        std::vector<std::size_t> count(d, 0);
        std::vector<bool> is_gap(row * d, false);
        for (auto [r, f] : missing) {
            is_gap[r * d + f] = true;
        }
        for (std::size_t r = 0; r < row; ++r) {
            for (std::size_t f = 0; f < d; ++f) {
                if (!is_gap[r * d + f]) {
                    sum[f] += xs[r * d + f];
                    ++count[f];
                }
            }
        }
        for (auto [r, f] : missing) {
            if (count[f] == 0) {
                throw DataError(path.string() + ": column '" + feature_names[f] + "' has no observed values");
            }
            xs[r * d + f] = sum[f] / static_cast<double>(count[f]);
        }
    }

    LoadResult result;
    result.imputed_cells = missing.size();
    result.data.X = Matrix(row, d, std::move(xs));
    result.data.Y = Matrix(row, label_idx.size(), std::move(ys));
    result.data.task = schema.task;
    result.data.feature_names = std::move(feature_names);
    if (group_idx) {
        result.data.group = std::move(groups);
    }
    try {
        result.data.validate();
    } catch (const InvalidInput& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return result;
}

namespace {

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

}  // namespace

void save_csv(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t j = 0; j < data.d(); ++j) {
        out << (j ? "," : "") << quote_if_needed(data.feature_names[j]);
    }
    for (std::size_t k = 0; k < data.Y.cols(); ++k) {
        out << (data.d() + k ? "," : "") << "y" << k;
    }
    if (data.group) {
        out << ",group";
    }
    out << '\n';
    for (std::size_t i = 0; i < data.n(); ++i) {
        for (std::size_t j = 0; j < data.d(); ++j) {
            out << (j ? "," : "") << data.X(i, j);
        }
        for (std::size_t k = 0; k < data.Y.cols(); ++k) {
            out << (data.d() + k ? "," : "") << data.Y(i, k);
        }
        if (data.group) {
            out << ',' << quote_if_needed((*data.group)[i]);
        }
        out << '\n';
    }
}

}  // namespace advda
