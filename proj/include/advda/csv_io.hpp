#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "advda/dataset.hpp"

namespace advda {

enum class MissingPolicy { ImputeMean, Reject };

/// Which CSV columns carry labels and groups. Every other column is a
/// numeric feature. Empty label_columns means y0..y{k-1} for the task.
struct CsvSchema {
    TaskKind task = TaskKind::binary();
    std::vector<std::string> label_columns;
    std::optional<std::string> group_column = "group";
    MissingPolicy missing = MissingPolicy::ImputeMean;
};

struct LoadResult {
    Dataset data;
    std::size_t imputed_cells = 0;
};

// Missing cells are empty, "NA" or "nan". A declared group column that is
// absent from the header is an error only when the schema requires it via
// a non-default name.
LoadResult load_csv(const std::filesystem::path& path, const CsvSchema& schema);

/// Header: feature names, y0..y{k-1}, then `group` when present. Values are
/// written with 17 significant digits.
void save_csv(const Dataset& data, const std::filesystem::path& path);

// Splits one CSV line; double-quoted fields may contain commas.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace advda
