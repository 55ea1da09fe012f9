#pragma once

// Next-generation reservoir features: linear delay terms plus sparse
// polynomial monomial families computed directly from a window.

#include "ngrc/har.hpp"

#include <Eigen/Core>

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ngrc {

/// Monomial families, declared in canonical concatenation order.
///
///   Lin   a_i                                   A*T
///   Nls   a_i a_{i-1}        (same axis)        A*(T-1)
///   Nlq   a_i a_i            (same axis)        A*T
///   Nlcq  a_i b_i            (x-y, y-z, x-z)    3*T
///   Nlcs  a_i b_{i-1}, a_{i-1} b_i              6*(T-1)
///   Nlt   x_i y_i z_i                           T
enum class FeatureFamily { Lin, Nls, Nlq, Nlcq, Nlcs, Nlt };

inline constexpr std::array<FeatureFamily, 6> kAllFamilies = {
    FeatureFamily::Lin,  FeatureFamily::Nls,  FeatureFamily::Nlq,
    FeatureFamily::Nlcq, FeatureFamily::Nlcs, FeatureFamily::Nlt,
};

std::string_view family_name(FeatureFamily family) noexcept;
std::optional<FeatureFamily> parse_family(std::string_view name) noexcept;

/// Polynomial degree of every monomial in the family (1, 2 or 3).
int family_degree(FeatureFamily family) noexcept;

/// Number of monomials a family produces for a window of `steps` samples per axis.
/// Only three-axis input is defined.
std::size_t family_dimension(FeatureFamily family, std::size_t steps, std::size_t axes = kAxisCount);

/// Writes the family's monomials, multiplied by `weight`, into `out`.
/// Order: axis (or axis pair) outer, time index descending from the latest sample inner.
/// For Nlcs each time step contributes a_i b_{i-1} followed by a_{i-1} b_i.
void write_family(const Eigen::Matrix3Xd& samples, FeatureFamily family, double weight,
                  Eigen::Ref<Eigen::VectorXd> out);

Eigen::VectorXd gen_family(const Window& window, FeatureFamily family);

struct FeatureConfig {
    /// Enabled families; kept sorted in canonical order without duplicates.
    std::vector<FeatureFamily> families;
    std::map<FeatureFamily, double> weights;
    double lambda = 1e-3;
    bool include_bias = false;

    /// Enabled families with weight 1.0 each.
    static FeatureConfig uniform(std::vector<FeatureFamily> families, bool include_bias = false);

    /// Weight of an enabled family; families without an explicit weight default to 1.0.
    double weight(FeatureFamily family) const;
    void set_weight(FeatureFamily family, double weight);
    bool enabled(FeatureFamily family) const;

    /// Sorts/deduplicates families and checks weights and lambda.
    void normalize();
    void validate() const;
};

/// One contiguous block of the feature vector. `name` is a family name for
/// polynomial features, or any other block label (e.g. reservoir states).
struct LayoutBlock {
    std::string name;
    std::size_t offset = 0;
    std::size_t length = 0;
    double weight = 1.0;

    bool operator==(const LayoutBlock&) const = default;
};

struct FeatureLayout {
    std::vector<LayoutBlock> blocks;
    bool bias = false;

    std::size_t dimension() const noexcept;
    const LayoutBlock* find(std::string_view name) const noexcept;
    std::string describe() const;
    bool operator==(const FeatureLayout&) const = default;
};

FeatureLayout make_layout(const FeatureConfig& config, std::size_t steps);

Eigen::VectorXd build_feature_vector(const Window& window, const FeatureConfig& config);

/// Column j holds the total feature vector of window j.
struct FeatureMatrix {
    Eigen::MatrixXd values;
    FeatureLayout layout;

    std::size_t dimension() const noexcept { return static_cast<std::size_t>(values.rows()); }
    std::size_t sample_count() const noexcept { return static_cast<std::size_t>(values.cols()); }
};

/// Checks that all windows share one step count and returns it.
std::size_t common_steps(const Dataset& dataset);

FeatureMatrix build_feature_matrix(const Dataset& dataset, const FeatureConfig& config);

/// Feature sets #1..#10 of the ablation study.
std::vector<FeatureFamily> named_feature_set(int id);

/// Parses "#3", "3", or a comma separated family list such as "lin,nls,nlcq".
std::vector<FeatureFamily> parse_feature_set(std::string_view text);
std::string feature_set_label(const std::vector<FeatureFamily>& families);

/// Debug dump: a '#'-prefixed header with the layout, then one CSV line per feature row.
void write_feature_csv(std::ostream& out, const FeatureMatrix& matrix);

} // namespace ngrc
