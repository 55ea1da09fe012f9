#pragma once

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ngrc {

/// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;
    std::vector<std::string> class_names;

    std::int64_t total() const { return counts.sum(); }
    std::size_t classes() const noexcept { return static_cast<std::size_t>(counts.rows()); }

    /// Each row divided by its row sum, in percent. Empty rows stay zero.
    Eigen::MatrixXd row_percentages() const;
    std::vector<std::int64_t> row_sums() const;
};

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted, int classes,
                          std::vector<std::string> class_names = {});

double accuracy(const ConfusionMatrix& cm);

/// Diagonal over row sum per class; classes without samples report 0.
std::vector<double> per_class_accuracy(const ConfusionMatrix& cm);

/// Aligned text table with counts and row percentages.
std::string render_confusion(const ConfusionMatrix& cm);

nlohmann::json confusion_to_json(const ConfusionMatrix& cm);

} // namespace ngrc
