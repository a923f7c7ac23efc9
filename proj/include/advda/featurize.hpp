#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace advda {

struct Measurement {
    double time_hours;
    double value;
};

/// One ICU episode: per-variable measurement lists over [0, length_hours].
struct TimeSeriesEpisode {
    double length_hours = 0.0;
    std::vector<std::vector<Measurement>> variables;
    std::optional<double> los_hours;
    std::vector<double> labels;

    void validate() const;
};

enum class Window { Full, First10, First25, First50, Last50, Last25, Last10 };
enum class Stat { Min, Max, Mean, Std, Skew, Count };

inline constexpr std::array<Window, 7> kWindows{Window::Full,   Window::First10, Window::First25, Window::First50,
                                               Window::Last50, Window::Last25,  Window::Last10};
inline constexpr std::array<Stat, 6> kStats{Stat::Min, Stat::Max, Stat::Mean, Stat::Std, Stat::Skew, Stat::Count};
inline constexpr std::size_t kFeaturesPerVariable = kWindows.size() * kStats.size();

// Closed time interval [begin, end] of a window within an episode of the given length.
std::array<double, 2> window_bounds(Window w, double length_hours);

const char* window_name(Window w);
const char* stat_name(Stat s);

/// Feature layout: index = variable * 42 + window * 6 + stat. Windows with no
/// measurements produce count 0 and `empty_fill` for the other statistics.
/// Std and skew are population moments; skew is 0 below 3 samples or at zero spread.
std::vector<double> featurize_timeseries(const TimeSeriesEpisode& episode, double empty_fill = 0.0);

std::vector<std::string> timeseries_feature_names(std::size_t num_variables);

/// Reads an episode CSV with columns variable,time_hours,value. The variable
/// column holds an integer index in [0, num_variables).
TimeSeriesEpisode load_episode_csv(const std::filesystem::path& path, std::size_t num_variables,
                                   double length_hours);

}  // namespace advda
