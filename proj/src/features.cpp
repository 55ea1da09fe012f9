#include "ngrc/features.hpp"

#include "ngrc/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

namespace ngrc {

namespace {

using Index = Eigen::Index;

constexpr std::array<std::pair<Index, Index>, 3> kAxisPairs = {{{0, 1}, {1, 2}, {0, 2}}};

std::string trim(std::string_view s)
{
    auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) {
        return {};
    }
    auto last = s.find_last_not_of(" \t");
    return std::string(s.substr(first, last - first + 1));
}

} // namespace

std::string_view family_name(FeatureFamily family) noexcept
{
    switch (family) {
    case FeatureFamily::Lin: return "lin";
    case FeatureFamily::Nls: return "nls";
    case FeatureFamily::Nlq: return "nlq";
    case FeatureFamily::Nlcq: return "nlcq";
    case FeatureFamily::Nlcs: return "nlcs";
    case FeatureFamily::Nlt: return "nlt";
    }
    return "?";
}

std::optional<FeatureFamily> parse_family(std::string_view name) noexcept
{
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (auto f : kAllFamilies) {
        if (lower == family_name(f)) {
            return f;
        }
    }
    // "nlc" (cross cube) is another spelling of the triple product.
    if (lower == "nlc") {
        return FeatureFamily::Nlt;
    }
    return std::nullopt;
}

int family_degree(FeatureFamily family) noexcept
{
    switch (family) {
    case FeatureFamily::Lin: return 1;
    case FeatureFamily::Nlt: return 3;
    default: return 2;
    }
}

std::size_t family_dimension(FeatureFamily family, std::size_t steps, std::size_t axes)
{
    if (axes != kAxisCount) {
        raise(ErrorCode::UnsupportedAxes, "only 3-axis input is supported, got " + std::to_string(axes));
    }
    if (steps < 2) {
        raise(ErrorCode::DegenerateWindow, "need at least 2 time steps, got " + std::to_string(steps));
    }
    switch (family) {
    case FeatureFamily::Lin: return axes * steps;
    case FeatureFamily::Nls: return axes * (steps - 1);
    case FeatureFamily::Nlq: return axes * steps;
    case FeatureFamily::Nlcq: return 3 * steps;
    case FeatureFamily::Nlcs: return 6 * (steps - 1);
    case FeatureFamily::Nlt: return steps;
    }
    return 0;
}

void write_family(const Eigen::Matrix3Xd& samples, FeatureFamily family, double weight,
                  Eigen::Ref<Eigen::VectorXd> out)
{
    const Index steps = samples.cols();
    const auto expected = family_dimension(family, static_cast<std::size_t>(steps));
    if (static_cast<std::size_t>(out.size()) != expected) {
        raise(ErrorCode::DimensionMismatch, "output block for " + std::string(family_name(family)) +
                                                " has length " + std::to_string(out.size()) +
                                                ", expected " + std::to_string(expected));
    }

    Index k = 0;
    switch (family) {
    case FeatureFamily::Lin:
        for (Index a = 0; a < 3; ++a) {
            for (Index t = steps - 1; t >= 0; --t) {
                out[k++] = weight * samples(a, t);
            }
        }
        break;
    case FeatureFamily::Nls:
        for (Index a = 0; a < 3; ++a) {
            for (Index t = steps - 1; t >= 1; --t) {
                out[k++] = weight * (samples(a, t) * samples(a, t - 1));
            }
        }
        break;
    case FeatureFamily::Nlq:
        for (Index a = 0; a < 3; ++a) {
            for (Index t = steps - 1; t >= 0; --t) {
                out[k++] = weight * (samples(a, t) * samples(a, t));
            }
        }
        break;
    case FeatureFamily::Nlcq:
        for (auto [a, b] : kAxisPairs) {
            for (Index t = steps - 1; t >= 0; --t) {
                out[k++] = weight * (samples(a, t) * samples(b, t));
            }
        }
        break;
    case FeatureFamily::Nlcs:
        for (auto [a, b] : kAxisPairs) {
            for (Index t = steps - 1; t >= 1; --t) {
                out[k++] = weight * (samples(a, t) * samples(b, t - 1));
                out[k++] = weight * (samples(a, t - 1) * samples(b, t));
            }
        }
        break;
    case FeatureFamily::Nlt:
        for (Index t = steps - 1; t >= 0; --t) {
            out[k++] = weight * (samples(0, t) * samples(1, t) * samples(2, t));
        }
        break;
    }
}

Eigen::VectorXd gen_family(const Window& window, FeatureFamily family)
{
    validate_window(window);
    Eigen::VectorXd out(static_cast<Index>(family_dimension(family, window.steps())));
    write_family(window.samples, family, 1.0, out);
    return out;
}

FeatureConfig FeatureConfig::uniform(std::vector<FeatureFamily> families, bool include_bias)
{
    FeatureConfig config;
    config.families = std::move(families);
    config.include_bias = include_bias;
    config.normalize();
    for (auto f : config.families) {
        config.weights[f] = 1.0;
    }
    return config;
}

double FeatureConfig::weight(FeatureFamily family) const
{
    auto it = weights.find(family);
    return it == weights.end() ? 1.0 : it->second;
}

void FeatureConfig::set_weight(FeatureFamily family, double value)
{
    weights[family] = value;
}

bool FeatureConfig::enabled(FeatureFamily family) const
{
    return std::find(families.begin(), families.end(), family) != families.end();
}

void FeatureConfig::normalize()
{
    std::sort(families.begin(), families.end());
    families.erase(std::unique(families.begin(), families.end()), families.end());
}

void FeatureConfig::validate() const
{
    if (!std::is_sorted(families.begin(), families.end()) ||
        std::adjacent_find(families.begin(), families.end()) != families.end()) {
        raise(ErrorCode::InvalidConfig, "feature families must be unique and in canonical order");
    }
    if (families.empty() && !include_bias) {
        raise(ErrorCode::EmptyConfig, "no feature families enabled and no bias");
    }
    for (auto f : families) {
        const double w = weight(f);
        if (!std::isfinite(w) || w < 0.0) {
            raise(ErrorCode::InvalidConfig,
                  "weight of " + std::string(family_name(f)) + " must be finite and nonnegative");
        }
    }
    if (!std::isfinite(lambda) || lambda < 0.0) {
        raise(ErrorCode::InvalidConfig, "lambda must be finite and nonnegative");
    }
}

std::size_t FeatureLayout::dimension() const noexcept
{
    std::size_t n = bias ? 1 : 0;
    for (const auto& b : blocks) {
        n += b.length;
    }
    return n;
}

const LayoutBlock* FeatureLayout::find(std::string_view name) const noexcept
{
    for (const auto& b : blocks) {
        if (b.name == name) {
            return &b;
        }
    }
    return nullptr;
}

std::string FeatureLayout::describe() const
{
    std::ostringstream os;
    bool first = true;
    for (const auto& b : blocks) {
        os << (first ? "" : ",") << b.name << ":" << b.offset << ":" << b.length << ":" << b.weight;
        first = false;
    }
    if (bias) {
        os << (first ? "" : ",") << "bias:" << (dimension() - 1) << ":1:1";
    }
    return os.str();
}

FeatureLayout make_layout(const FeatureConfig& config, std::size_t steps)
{
    FeatureLayout layout;
    std::size_t offset = 0;
    for (auto f : config.families) {
        const auto length = family_dimension(f, steps);
        layout.blocks.push_back({std::string(family_name(f)), offset, length, config.weight(f)});
        offset += length;
    }
    layout.bias = config.include_bias;
    return layout;
}

Eigen::VectorXd build_feature_vector(const Window& window, const FeatureConfig& config)
{
    config.validate();
    validate_window(window);
    const auto layout = make_layout(config, window.steps());
    Eigen::VectorXd out(static_cast<Index>(layout.dimension()));
    for (std::size_t i = 0; i < config.families.size(); ++i) {
        const auto& block = layout.blocks[i];
        write_family(window.samples, config.families[i], block.weight,
                     out.segment(static_cast<Index>(block.offset), static_cast<Index>(block.length)));
    }
    if (layout.bias) {
        out[out.size() - 1] = 1.0;
    }
    return out;
}

std::size_t common_steps(const Dataset& dataset)
{
    if (dataset.empty()) {
        raise(ErrorCode::EmptyDataset, "dataset has no windows");
    }
    const auto steps = dataset.windows.front().steps();
    for (std::size_t j = 1; j < dataset.size(); ++j) {
        if (dataset.windows[j].steps() != steps) {
            raise(ErrorCode::HeterogeneousWindows, "window " + std::to_string(j) + " has " +
                                                       std::to_string(dataset.windows[j].steps()) +
                                                       " steps, expected " + std::to_string(steps));
        }
    }
    return steps;
}

FeatureMatrix build_feature_matrix(const Dataset& dataset, const FeatureConfig& config)
{
    config.validate();
    const auto steps = common_steps(dataset);

    FeatureMatrix matrix;
    matrix.layout = make_layout(config, steps);
    matrix.values.resize(static_cast<Index>(matrix.layout.dimension()), static_cast<Index>(dataset.size()));
    for (std::size_t j = 0; j < dataset.size(); ++j) {
        const auto& window = dataset.windows[j];
        validate_window(window);
        auto column = matrix.values.col(static_cast<Index>(j));
        for (std::size_t i = 0; i < config.families.size(); ++i) {
            const auto& block = matrix.layout.blocks[i];
            write_family(window.samples, config.families[i], block.weight,
                         column.segment(static_cast<Index>(block.offset), static_cast<Index>(block.length)));
        }
        if (matrix.layout.bias) {
            column[column.size() - 1] = 1.0;
        }
    }
    return matrix;
}

std::vector<FeatureFamily> named_feature_set(int id)
{
    using F = FeatureFamily;
    switch (id) {
    case 1: return {F::Lin, F::Nls, F::Nlq, F::Nlcs, F::Nlt};
    case 2: return {F::Lin, F::Nls, F::Nlq, F::Nlcs};
    case 3: return {F::Lin, F::Nls, F::Nlcq};
    case 4: return {F::Lin, F::Nlcs};
    case 5: return {F::Lin, F::Nls, F::Nlq, F::Nlt};
    case 6: return {F::Lin, F::Nls, F::Nlq};
    case 7: return {F::Lin, F::Nls};
    case 8: return {F::Lin};
    case 9: return {F::Lin, F::Nlcq};
    case 10: return {kAllFamilies.begin(), kAllFamilies.end()};
    default: raise(ErrorCode::UnknownFeatureSet, "feature set #" + std::to_string(id) + " is not in 1..10");
    }
}

std::vector<FeatureFamily> parse_feature_set(std::string_view text)
{
    const std::string s = trim(text);
    std::string_view digits = s;
    if (!digits.empty() && digits.front() == '#') {
        digits.remove_prefix(1);
    }
    if (!digits.empty() && std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        int id = 0;
        std::from_chars(digits.data(), digits.data() + digits.size(), id);
        return named_feature_set(id);
    }

    std::vector<FeatureFamily> families;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto end = s.find_first_of(",+", start);
        if (end == std::string::npos) {
            end = s.size();
        }
        const auto token = trim(std::string_view(s).substr(start, end - start));
        auto family = parse_family(token);
        if (!family) {
            raise(ErrorCode::UnknownFamily, "unknown feature family '" + token + "'");
        }
        families.push_back(*family);
        start = end + 1;
    }
    std::sort(families.begin(), families.end());
    families.erase(std::unique(families.begin(), families.end()), families.end());
    return families;
}

std::string feature_set_label(const std::vector<FeatureFamily>& families)
{
    std::string out;
    for (auto f : families) {
        if (!out.empty()) {
            out += '+';
        }
        out += family_name(f);
    }
    return out;
}

void write_feature_csv(std::ostream& out, const FeatureMatrix& matrix)
{
    out << "# rows=" << matrix.values.rows() << " cols=" << matrix.values.cols()
        << " layout=" << matrix.layout.describe() << '\n';
    std::array<char, 32> buf{};
    for (Index i = 0; i < matrix.values.rows(); ++i) {
        for (Index j = 0; j < matrix.values.cols(); ++j) {
            auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), matrix.values(i, j));
            if (j > 0) {
                out << ',';
            }
            out.write(buf.data(), end - buf.data());
        }
        out << '\n';
    }
}

} // namespace ngrc
