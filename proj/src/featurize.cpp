#include "advda/featurize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "advda/csv_io.hpp"
#include "advda/errors.hpp"

namespace advda {

void TimeSeriesEpisode::validate() const {
    if (!(length_hours > 0.0) || !std::isfinite(length_hours)) {
        throw InvalidInput("episode length must be positive");
    }
    for (const auto& series : variables) {
        double prev = 0.0;
        for (const auto& m : series) {
            if (!(m.time_hours >= prev)) {
                throw InvalidInput("measurement times must be nonnegative and nondecreasing");
            }
            if (m.time_hours > length_hours) {
                throw InvalidInput("measurement time beyond episode length");
            }
            if (!std::isfinite(m.value)) {
                throw InvalidInput("non-finite measurement value");
            }
            prev = m.time_hours;
        }
    }
}

std::array<double, 2> window_bounds(Window w, double length) {
    switch (w) {
    case Window::Full:
        return {0.0, length};
    case Window::First10:
        return {0.0, 0.10 * length};
    case Window::First25:
        return {0.0, 0.25 * length};
    case Window::First50:
        return {0.0, 0.50 * length};
    case Window::Last50:
        return {length - 0.50 * length, length};
    case Window::Last25:
        return {length - 0.25 * length, length};
    case Window::Last10:
        return {length - 0.10 * length, length};
    }
    return {0.0, length};
}

const char* window_name(Window w) {
    switch (w) {
    case Window::Full:
        return "full";
    case Window::First10:
        return "first10";
    case Window::First25:
        return "first25";
    case Window::First50:
        return "first50";
    case Window::Last50:
        return "last50";
    case Window::Last25:
        return "last25";
    case Window::Last10:
        return "last10";
    }
    return "?";
}

const char* stat_name(Stat s) {
    switch (s) {
    case Stat::Min:
        return "min";
    case Stat::Max:
        return "max";
    case Stat::Mean:
        return "mean";
    case Stat::Std:
        return "std";
    case Stat::Skew:
        return "skew";
    case Stat::Count:
        return "count";
    }
    return "?";
}

namespace {

void window_stats(const std::vector<Measurement>& series, double begin, double end, double fill, double* out) {
    // series is sorted by time, so the window is a contiguous range
    auto lo = std::lower_bound(series.begin(), series.end(), begin,
                               [](const Measurement& m, double t) { return m.time_hours < t; });
    auto hi = std::upper_bound(series.begin(), series.end(), end,
                               [](double t, const Measurement& m) { return t < m.time_hours; });
    const auto count = static_cast<std::size_t>(std::max<std::ptrdiff_t>(hi - lo, 0));
    if (count == 0) {
        std::fill(out, out + 5, fill);
        out[5] = 0.0;
        return;
    }
    double mn = lo->value;
    double mx = lo->value;
    double sum = 0.0;
    for (auto it = lo; it != hi; ++it) {
        mn = std::min(mn, it->value);
        mx = std::max(mx, it->value);
        sum += it->value;
    }
    const double n = static_cast<double>(count);
    const double mean = sum / n;
    double m2 = 0.0;
    double m3 = 0.0;
    for (auto it = lo; it != hi; ++it) {
        const double dev = it->value - mean;
        m2 += dev * dev;
        m3 += dev * dev * dev;
    }
    m2 /= n;
    m3 /= n;
    out[0] = mn;
    out[1] = mx;
    out[2] = mean;
    out[3] = std::sqrt(m2);
    out[4] = (count < 3 || m2 == 0.0) ? 0.0 : m3 / std::pow(m2, 1.5);
    out[5] = n;
}

}  // namespace

std::vector<double> featurize_timeseries(const TimeSeriesEpisode& episode, double empty_fill) {
    episode.validate();
    std::vector<double> out(episode.variables.size() * kFeaturesPerVariable);
    for (std::size_t v = 0; v < episode.variables.size(); ++v) {
        for (std::size_t w = 0; w < kWindows.size(); ++w) {
            const auto [begin, end] = window_bounds(kWindows[w], episode.length_hours);
            window_stats(episode.variables[v], begin, end, empty_fill,
                         out.data() + v * kFeaturesPerVariable + w * kStats.size());
        }
    }
    return out;
}

std::vector<std::string> timeseries_feature_names(std::size_t num_variables) {
    std::vector<std::string> names;
    names.reserve(num_variables * kFeaturesPerVariable);
    for (std::size_t v = 0; v < num_variables; ++v) {
        for (auto w : kWindows) {
            for (auto s : kStats) {
                names.push_back("v" + std::to_string(v) + "_" + window_name(w) + "_" + stat_name(s));
            }
        }
    }
    return names;
}

TimeSeriesEpisode load_episode_csv(const std::filesystem::path& path, std::size_t num_variables,
                                   double length_hours) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError(path.string() + ": empty file");
    }
    const auto header = split_csv_line(line);
    if (header != std::vector<std::string>{"variable", "time_hours", "value"}) {
        throw DataError(path.string() + ": expected header variable,time_hours,value");
    }
    TimeSeriesEpisode ep;
    ep.length_hours = length_hours;
    ep.variables.resize(num_variables);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto cells = split_csv_line(line);
        if (cells.size() != 3) {
            throw DataError(path.string() + ": line " + std::to_string(line_no) + " needs 3 cells");
        }
        try {
            std::size_t pos = 0;
            const auto var = std::stoul(cells[0], &pos);
            if (pos != cells[0].size() || var >= num_variables) {
                throw DataError("variable index out of range");
            }
            ep.variables[var].push_back({std::stod(cells[1]), std::stod(cells[2])});
        } catch (const std::logic_error&) {
            throw DataError(path.string() + ": line " + std::to_string(line_no) + " is not numeric");
        } catch (const DataError& e) {
            throw DataError(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    for (auto& series : ep.variables) {
        std::stable_sort(series.begin(), series.end(),
                         [](const Measurement& a, const Measurement& b) { return a.time_hours < b.time_hours; });
    }
    try {
        ep.validate();
    } catch (const InvalidInput& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return ep;
}

}  // namespace advda
