#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "advda/core_model.hpp"

namespace advda {

struct SavedModel {
    HeadBank bank;
    std::vector<std::string> feature_names;
};

/// Text format, version 1:
///
///   advda-model 1
///   task <binary | multiclass:C | multilabel:k>
///   features <d>
///   <one feature name per line>
///   heads <H>
///   <one line per head: d weights then the bias, 17 significant digits>
void write_model(std::ostream& out, const SavedModel& model);
SavedModel read_model(std::istream& in);

void save_model(const SavedModel& model, const std::filesystem::path& path);
SavedModel load_model(const std::filesystem::path& path);

}  // namespace advda
