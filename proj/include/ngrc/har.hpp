#pragma once

// Loader for the UCI HAR smartphone dataset (raw inertial-signal layout).

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ngrc {

inline constexpr std::size_t kAxisCount = 3;
inline constexpr std::size_t kHarWindowLength = 128;
inline constexpr int kHarClassCount = 6;
inline constexpr std::size_t kHarTrainWindows = 7352;
inline constexpr std::size_t kHarTestWindows = 2947;

/// Activity names in label order (label 1 is "walking").
inline const std::array<std::string, kHarClassCount> kHarClassNames = {
    "walking", "walking-upstairs", "walking-downstairs",
    "sitting", "standing",         "laying",
};

enum class Split { Train, Test };

std::string_view split_name(Split split) noexcept;

/// One labeled sample. Row 0/1/2 hold the x/y/z axis, column t holds time step t+1.
struct Window {
    Eigen::Matrix3Xd samples;
    int label = 1;

    std::size_t steps() const noexcept { return static_cast<std::size_t>(samples.cols()); }
    bool operator==(const Window& other) const;
};

/// Throws InvalidWindow if a sample is non-finite or the label is outside 1..6.
void validate_window(const Window& window);

struct Dataset {
    std::vector<Window> windows;
    Split split = Split::Train;
    std::vector<std::string> class_names{kHarClassNames.begin(), kHarClassNames.end()};

    std::size_t size() const noexcept { return windows.size(); }
    bool empty() const noexcept { return windows.empty(); }
    std::vector<int> labels() const;
    bool operator==(const Dataset& other) const = default;
};

/// Reads `<root>/<split>/Inertial Signals/total_acc_{x,y,z}_<split>.txt` and
/// `<root>/<split>/y_<split>.txt`. Window order follows file row order.
Dataset load_har_split(const std::filesystem::path& root, Split split);

/// Writes a dataset back into the canonical layout. Values are printed with
/// the shortest representation that parses back to the same double.
void write_har_split(const std::filesystem::path& root, const Dataset& dataset);

struct AxisSummary {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
};

struct DigestOptions {
    /// Also summarize the per-sample Euclidean magnitude sqrt(x^2+y^2+z^2).
    bool include_magnitude = false;
};

struct DatasetDigest {
    std::size_t windows = 0;
    std::vector<std::size_t> class_counts;  // index 0 is label 1
    std::array<AxisSummary, kAxisCount> axes{};
    bool has_magnitude = false;
    AxisSummary magnitude{};
};

DatasetDigest dataset_digest(const Dataset& dataset, const DigestOptions& options = {});

} // namespace ngrc
