#pragma once

// Block-structured training design shared by the NG-RC and ESN experiments.
//
// Feature blocks are stored unweighted for both splits. Gram blocks B_a B_b^T
// are computed once per block pair and reused for any selection of blocks and
// weights, so an ablation over feature sets touches the raw data only once.
// Training windows are split into a fit part and a trailing holdout part used
// to choose lambda; the full-train Gram matrix is the sum of both parts.

#include "ngrc/features.hpp"
#include "ngrc/readout.hpp"

#include <Eigen/Core>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ngrc {

inline constexpr double kDefaultHoldoutFraction = 0.2;

struct BlockSelection {
    struct Entry {
        std::size_t block = 0;
        double weight = 1.0;
    };
    std::vector<Entry> blocks;
    bool bias = false;
};

class BlockDesign {
public:
    BlockDesign(std::vector<int> train_labels, std::vector<int> test_labels, std::vector<std::string> class_names,
                double holdout_fraction = kDefaultHoldoutFraction);

    /// Adds a feature block (rows = features, columns = windows) and returns its index.
    std::size_t add_block(std::string name, Eigen::MatrixXd train, Eigen::MatrixXd test);
    std::optional<std::size_t> find_block(std::string_view name) const;
    const std::string& block_name(std::size_t index) const { return blocks_.at(index).name; }
    std::size_t block_rows(std::size_t index) const;

    std::size_t train_count() const noexcept { return train_labels_.size(); }
    std::size_t test_count() const noexcept { return test_labels_.size(); }
    std::size_t fit_count() const noexcept { return fit_count_; }
    std::size_t holdout_count() const noexcept { return train_count() - fit_count_; }
    int classes() const noexcept { return static_cast<int>(class_names_.size()); }
    const std::vector<std::string>& class_names() const noexcept { return class_names_; }
    const std::vector<int>& train_labels() const noexcept { return train_labels_; }
    const std::vector<int>& test_labels() const noexcept { return test_labels_; }

    FeatureLayout layout(const BlockSelection& selection) const;

    /// Regularization-free normal equations: O O^T and Y O^T over either the
    /// fit part only or the whole training split.
    Eigen::MatrixXd gram(const BlockSelection& selection, bool fit_part_only) const;
    Eigen::MatrixXd cross(const BlockSelection& selection, bool fit_part_only) const;

    Eigen::MatrixXd holdout_scores(const Eigen::MatrixXd& w_out, const BlockSelection& selection) const;
    Eigen::MatrixXd test_scores(const Eigen::MatrixXd& w_out, const BlockSelection& selection) const;

    /// Assembled weighted feature matrix for the test split (debugging and cross-checks).
    FeatureMatrix assemble_test(const BlockSelection& selection) const;
    FeatureMatrix assemble_train(const BlockSelection& selection) const;

private:
    struct Block {
        std::string name;
        Eigen::MatrixXd train;
        Eigen::MatrixXd test;
    };
    struct PairGram {
        Eigen::MatrixXd fit;
        Eigen::MatrixXd rest;
    };
    struct BlockCross {
        Eigen::MatrixXd fit;
        Eigen::MatrixXd rest;
    };

    const PairGram& pair_gram(std::size_t a, std::size_t b) const;
    const BlockCross& block_cross(std::size_t a) const;
    void check_selection(const BlockSelection& selection) const;
    Eigen::MatrixXd scores(const Eigen::MatrixXd& w_out, const BlockSelection& selection, bool holdout) const;
    FeatureMatrix assemble(const BlockSelection& selection, bool train) const;

    std::vector<int> train_labels_;
    std::vector<int> test_labels_;
    std::vector<std::string> class_names_;
    std::size_t fit_count_ = 0;
    std::vector<Block> blocks_;
    Eigen::MatrixXd targets_;  // one-hot for the training split
    mutable std::map<std::pair<std::size_t, std::size_t>, PairGram> gram_cache_;
    mutable std::map<std::size_t, BlockCross> cross_cache_;
};

struct LambdaRun {
    double lambda = 0.0;
    std::optional<double> holdout_accuracy;
    std::optional<double> test_accuracy;
    std::vector<int> test_predictions;  // filled when evaluated on test
    std::string failure;                // non-empty if the solve failed
};

struct FitOptions {
    /// Also train on the full split and score the test split for every lambda.
    bool evaluate_every_lambda = false;
};

struct FitResult {
    ReadoutModel model;
    std::vector<int> test_predictions;
    Eigen::MatrixXd test_scores;
    std::vector<LambdaRun> runs;
    std::size_t selected = 0;
    double train_seconds = 0.0;
    double predict_seconds = 0.0;

    double lambda() const { return model.lambda; }
};

/// Trains the readout for each lambda. With more than one lambda the winner is
/// the best holdout accuracy (ties go to the larger lambda); the returned model
/// is then retrained on the whole training split.
FitResult fit_readout(const BlockDesign& design, const BlockSelection& selection, const std::vector<double>& lambdas,
                      const FitOptions& options = {});

/// `count` log-spaced values from `lo` to `hi` inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

/// Default lambda search grid: 1e-6, 1e-5, ..., 1e2.
std::vector<double> default_lambda_grid();

} // namespace ngrc
