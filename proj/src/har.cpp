#include "ngrc/har.hpp"

#include "ngrc/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace ngrc {

namespace fs = std::filesystem;

namespace {

constexpr std::array<char, kAxisCount> kAxisLetters = {'x', 'y', 'z'};

bool is_blank(char c) noexcept
{
    return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(ErrorCode::MissingFile, "cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return std::move(buffer).str();
}

/// Splits into lines and drops trailing lines that contain only whitespace.
std::vector<std::string_view> split_lines(std::string_view text)
{
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    while (!lines.empty() && std::all_of(lines.back().begin(), lines.back().end(), is_blank)) {
        lines.pop_back();
    }
    return lines;
}

std::vector<double> parse_reals(std::string_view line, const fs::path& file, std::size_t row)
{
    std::vector<double> values;
    values.reserve(kHarWindowLength);
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (true) {
        while (p < end && is_blank(*p)) {
            ++p;
        }
        if (p == end) {
            break;
        }
        double value = 0.0;
        const char* token = p;
        if (*p == '+') {
            ++p;
        }
        auto [next, ec] = std::from_chars(p, end, value);
        if (ec != std::errc{} || (next < end && !is_blank(*next))) {
            const char* stop = token;
            while (stop < end && !is_blank(*stop)) {
                ++stop;
            }
            raise(ErrorCode::MalformedRow, file.string() + " row " + std::to_string(row + 1) +
                                               ": cannot parse '" + std::string(token, stop) + "'");
        }
        if (!std::isfinite(value)) {
            raise(ErrorCode::MalformedRow,
                  file.string() + " row " + std::to_string(row + 1) + ": non-finite value");
        }
        values.push_back(value);
        p = next;
    }
    return values;
}

int parse_label(std::string_view line, const fs::path& file, std::size_t row)
{
    auto first = std::find_if_not(line.begin(), line.end(), is_blank);
    auto last = std::find_if_not(line.rbegin(), line.rend(), is_blank).base();
    if (first >= last) {
        raise(ErrorCode::BadLabel, file.string() + " row " + std::to_string(row + 1) + ": empty label");
    }
    int label = 0;
    auto [next, ec] = std::from_chars(&*first, &*first + (last - first), label);
    if (ec != std::errc{} || next != &*first + (last - first)) {
        raise(ErrorCode::BadLabel, file.string() + " row " + std::to_string(row + 1) + ": '" +
                                       std::string(first, last) + "' is not an integer label");
    }
    if (label < 1 || label > kHarClassCount) {
        raise(ErrorCode::BadLabel, file.string() + " row " + std::to_string(row + 1) + ": label " +
                                       std::to_string(label) + " outside 1..6");
    }
    return label;
}

fs::path axis_file(const fs::path& root, Split split, std::size_t axis)
{
    const std::string name(split_name(split));
    return root / name / "Inertial Signals" /
           ("total_acc_" + std::string(1, kAxisLetters[axis]) + "_" + name + ".txt");
}

fs::path label_file(const fs::path& root, Split split)
{
    const std::string name(split_name(split));
    return root / name / ("y_" + name + ".txt");
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        raise(ErrorCode::Io, "cannot write " + path.string());
    }
    out << text;
    if (!out) {
        raise(ErrorCode::Io, "write failed for " + path.string());
    }
}

void append_shortest(std::string& out, double value)
{
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    out.append(buf.data(), end);
}

} // namespace

std::string_view split_name(Split split) noexcept
{
    return split == Split::Train ? "train" : "test";
}

bool Window::operator==(const Window& other) const
{
    return label == other.label && samples.cols() == other.samples.cols() &&
           samples == other.samples;
}

void validate_window(const Window& window)
{
    if (window.label < 1 || window.label > kHarClassCount) {
        raise(ErrorCode::InvalidWindow, "label " + std::to_string(window.label) + " outside 1..6");
    }
    if (!window.samples.allFinite()) {
        raise(ErrorCode::InvalidWindow, "window contains non-finite samples");
    }
}

std::vector<int> Dataset::labels() const
{
    std::vector<int> out;
    out.reserve(windows.size());
    for (const auto& w : windows) {
        out.push_back(w.label);
    }
    return out;
}

Dataset load_har_split(const fs::path& root, Split split)
{
    for (std::size_t a = 0; a < kAxisCount; ++a) {
        if (!fs::exists(axis_file(root, split, a))) {
            raise(ErrorCode::MissingFile, axis_file(root, split, a).string() + " does not exist");
        }
    }
    const auto labels_path = label_file(root, split);
    if (!fs::exists(labels_path)) {
        raise(ErrorCode::MissingFile, labels_path.string() + " does not exist");
    }

    const std::string label_text = read_file(labels_path);
    const auto label_lines = split_lines(label_text);
    const std::size_t count = label_lines.size();

    Dataset dataset;
    dataset.split = split;
    dataset.windows.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
        dataset.windows[k].label = parse_label(label_lines[k], labels_path, k);
        dataset.windows[k].samples.resize(kAxisCount, kHarWindowLength);
    }

    for (std::size_t a = 0; a < kAxisCount; ++a) {
        const auto path = axis_file(root, split, a);
        const std::string text = read_file(path);
        const auto lines = split_lines(text);
        if (lines.size() != count) {
            raise(ErrorCode::RowCountMismatch, path.string() + " has " + std::to_string(lines.size()) +
                                                   " rows but " + labels_path.string() + " has " +
                                                   std::to_string(count));
        }
        for (std::size_t k = 0; k < count; ++k) {
            const auto values = parse_reals(lines[k], path, k);
            if (values.size() != kHarWindowLength) {
                raise(ErrorCode::MalformedRow, path.string() + " row " + std::to_string(k + 1) + ": " +
                                                   std::to_string(values.size()) + " values, expected " +
                                                   std::to_string(kHarWindowLength));
            }
            for (std::size_t t = 0; t < kHarWindowLength; ++t) {
                dataset.windows[k].samples(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(t)) =
                    values[t];
            }
        }
    }
    return dataset;
}

void write_har_split(const fs::path& root, const Dataset& dataset)
{
    const std::string name(split_name(dataset.split));
    std::error_code ec;
    fs::create_directories(root / name / "Inertial Signals", ec);
    if (ec) {
        raise(ErrorCode::Io, "cannot create " + (root / name).string() + ": " + ec.message());
    }

    for (std::size_t a = 0; a < kAxisCount; ++a) {
        std::string text;
        for (const auto& w : dataset.windows) {
            for (Eigen::Index t = 0; t < w.samples.cols(); ++t) {
                text.push_back(' ');
                append_shortest(text, w.samples(static_cast<Eigen::Index>(a), t));
            }
            text.push_back('\n');
        }
        write_text(axis_file(root, dataset.split, a), text);
    }

    std::string labels;
    for (const auto& w : dataset.windows) {
        labels += std::to_string(w.label);
        labels.push_back('\n');
    }
    write_text(label_file(root, dataset.split), labels);
}

DatasetDigest dataset_digest(const Dataset& dataset, const DigestOptions& options)
{
    if (dataset.empty()) {
        raise(ErrorCode::EmptyDataset, "cannot digest an empty dataset");
    }

    DatasetDigest digest;
    digest.windows = dataset.size();
    digest.class_counts.assign(kHarClassCount, 0);

    constexpr double inf = std::numeric_limits<double>::infinity();
    std::array<double, kAxisCount> sums{};
    for (auto& axis : digest.axes) {
        axis.min = inf;
        axis.max = -inf;
    }
    double mag_sum = 0.0;
    digest.magnitude = {inf, -inf, 0.0};
    std::size_t samples = 0;

    for (const auto& w : dataset.windows) {
        if (w.label >= 1 && w.label <= kHarClassCount) {
            ++digest.class_counts[static_cast<std::size_t>(w.label - 1)];
        }
        for (std::size_t a = 0; a < kAxisCount; ++a) {
            const auto row = w.samples.row(static_cast<Eigen::Index>(a));
            digest.axes[a].min = std::min(digest.axes[a].min, row.minCoeff());
            digest.axes[a].max = std::max(digest.axes[a].max, row.maxCoeff());
            sums[a] += row.sum();
        }
        if (options.include_magnitude) {
            const Eigen::RowVectorXd mag = w.samples.colwise().norm();
            digest.magnitude.min = std::min(digest.magnitude.min, mag.minCoeff());
            digest.magnitude.max = std::max(digest.magnitude.max, mag.maxCoeff());
            mag_sum += mag.sum();
        }
        samples += w.steps();
    }

    const double n = static_cast<double>(samples);
    for (std::size_t a = 0; a < kAxisCount; ++a) {
        digest.axes[a].mean = sums[a] / n;
    }
    digest.has_magnitude = options.include_magnitude;
    if (options.include_magnitude) {
        digest.magnitude.mean = mag_sum / n;
    } else {
        digest.magnitude = {};
    }
    return digest;
}

} // namespace ngrc
