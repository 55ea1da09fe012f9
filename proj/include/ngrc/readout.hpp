#pragma once

// Closed-form ridge readout: W_out = Y O^T (O O^T + lambda I)^-1.

#include "ngrc/features.hpp"

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ngrc {

/// S x M one-hot class matrix; row s of column j is 1 iff sample j has label s+1.
struct TargetMatrix {
    Eigen::MatrixXd values;

    std::size_t classes() const noexcept { return static_cast<std::size_t>(values.rows()); }
    std::size_t sample_count() const noexcept { return static_cast<std::size_t>(values.cols()); }
};

TargetMatrix one_hot(std::span<const int> labels, int classes);

struct ReadoutModel {
    Eigen::MatrixXd w_out;  // S x N
    double lambda = 0.0;
    FeatureLayout layout;
    std::vector<std::string> class_names;

    std::size_t classes() const noexcept { return static_cast<std::size_t>(w_out.rows()); }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(w_out.cols()); }
};

/// O O^T for a feature-by-sample matrix (full symmetric result).
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& features);

/// Solves W (G + lambda I) = C for W with a Cholesky factorization of the
/// regularized Gram matrix. `gram` is O O^T (N x N), `cross` is Y O^T (S x N).
/// Throws SingularSystem when the factorization fails or, for lambda = 0,
/// when the system is numerically rank deficient.
Eigen::MatrixXd solve_ridge(const Eigen::MatrixXd& gram, const Eigen::MatrixXd& cross, double lambda);

ReadoutModel train_readout(const FeatureMatrix& features, const TargetMatrix& targets, double lambda,
                           std::vector<std::string> class_names = {});

Eigen::MatrixXd predict_scores(const ReadoutModel& model, const FeatureMatrix& features);

/// 1-based argmax per column; ties go to the smallest class index.
std::vector<int> classify(const Eigen::MatrixXd& scores);

nlohmann::json model_to_json(const ReadoutModel& model);
ReadoutModel model_from_json(const nlohmann::json& doc);
void save_model(const std::filesystem::path& path, const ReadoutModel& model);
ReadoutModel load_model(const std::filesystem::path& path);

} // namespace ngrc
