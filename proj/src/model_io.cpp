#include "advda/model_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "advda/errors.hpp"

namespace advda {

namespace {

constexpr const char* kMagic = "advda-model";
constexpr int kVersion = 1;

std::string expect_line(std::istream& in, const char* what) {
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError(std::string("model file truncated before ") + what);
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return line;
}

std::string expect_key(const std::string& line, const std::string& key) {
    if (line.rfind(key + " ", 0) != 0) {
        throw DataError("model file: expected '" + key + "' line, found '" + line + "'");
    }
    return line.substr(key.size() + 1);
}

std::size_t parse_count(const std::string& text) {
    try {
        std::size_t pos = 0;
        const auto v = std::stoul(text, &pos);
        if (pos != text.size()) {
            throw std::invalid_argument(text);
        }
        return v;
    } catch (const std::logic_error&) {
        throw DataError("model file: bad count '" + text + "'");
    }
}

}  // namespace

void write_model(std::ostream& out, const SavedModel& model) {
    out << kMagic << ' ' << kVersion << '\n';
    out << "task " << model.bank.task().to_string() << '\n';
    out << "features " << model.feature_names.size() << '\n';
    for (const auto& name : model.feature_names) {
        out << name << '\n';
    }
    out << "heads " << model.bank.num_heads() << '\n';
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto& head : model.bank.heads()) {
        for (std::size_t k = 0; k < head.size(); ++k) {
            out << (k ? " " : "") << head.theta()[k];
        }
        out << '\n';
    }
}

SavedModel read_model(std::istream& in) {
    const auto header = expect_line(in, "header");
    if (header != std::string(kMagic) + " " + std::to_string(kVersion)) {
        throw DataError("not a version-" + std::to_string(kVersion) + " model file: '" + header + "'");
    }
    TaskKind task = TaskKind::binary();
    try {
        task = TaskKind::parse(expect_key(expect_line(in, "task"), "task"));
    } catch (const InvalidInput& e) {
        throw DataError(std::string("model file: ") + e.what());
    }
    const auto d = parse_count(expect_key(expect_line(in, "features"), "features"));
    SavedModel model;
    for (std::size_t j = 0; j < d; ++j) {
        model.feature_names.push_back(expect_line(in, "feature names"));
    }
    const auto h = parse_count(expect_key(expect_line(in, "heads"), "heads"));
    std::vector<ModelParams> heads;
    for (std::size_t j = 0; j < h; ++j) {
        std::istringstream row(expect_line(in, "head weights"));
        std::vector<double> theta;
        double v = 0.0;
        while (row >> v) {
            theta.push_back(v);
        }
        if (!row.eof() || theta.size() != d + 1) {
            throw DataError("model file: head " + std::to_string(j) + " needs " + std::to_string(d + 1) + " numbers");
        }
        heads.emplace_back(std::move(theta));
    }
    try {
        model.bank = HeadBank(task, std::move(heads));
    } catch (const InvalidInput& e) {
        throw DataError(std::string("model file: ") + e.what());
    }
    return model;
}

void save_model(const SavedModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    write_model(out, model);
}

SavedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    return read_model(in);
}

}  // namespace advda
