#include "ngrc/design.hpp"

#include "ngrc/error.hpp"

#include <chrono>
#include <cmath>

namespace ngrc {

namespace {

using Index = Eigen::Index;
using Clock = std::chrono::steady_clock;

constexpr const char* kBiasName = "bias";

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double fraction_correct(const std::vector<int>& truth, const std::vector<int>& predicted, std::size_t offset = 0)
{
    if (predicted.empty()) {
        return 0.0;
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        hits += truth[offset + i] == predicted[i] ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

} // namespace

BlockDesign::BlockDesign(std::vector<int> train_labels, std::vector<int> test_labels,
                         std::vector<std::string> class_names, double holdout_fraction)
    : train_labels_(std::move(train_labels))
    , test_labels_(std::move(test_labels))
    , class_names_(std::move(class_names))
{
    if (train_labels_.empty()) {
        raise(ErrorCode::EmptyDataset, "training split has no windows");
    }
    if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
        raise(ErrorCode::InvalidConfig, "holdout fraction must lie in [0, 1)");
    }
    const auto holdout = static_cast<std::size_t>(std::floor(holdout_fraction * static_cast<double>(train_labels_.size())));
    fit_count_ = train_labels_.size() - holdout;
    targets_ = one_hot(train_labels_, classes()).values;
    // Validate test labels up front so scoring never sees an out-of-range class.
    one_hot(test_labels_, classes());

    blocks_.push_back({kBiasName, Eigen::MatrixXd::Ones(1, static_cast<Index>(train_count())),
                       Eigen::MatrixXd::Ones(1, static_cast<Index>(test_count()))});
}

std::size_t BlockDesign::add_block(std::string name, Eigen::MatrixXd train, Eigen::MatrixXd test)
{
    if (static_cast<std::size_t>(train.cols()) != train_count() ||
        static_cast<std::size_t>(test.cols()) != test_count() || train.rows() != test.rows()) {
        raise(ErrorCode::DimensionMismatch, "block '" + name + "' has shape " + std::to_string(train.rows()) + "x" +
                                                std::to_string(train.cols()) + " / " + std::to_string(test.rows()) +
                                                "x" + std::to_string(test.cols()));
    }
    if (name == kBiasName || find_block(name)) {
        raise(ErrorCode::InvalidConfig, "duplicate block name '" + name + "'");
    }
    if (!train.allFinite() || !test.allFinite()) {
        raise(ErrorCode::NonFiniteInput, "block '" + name + "' contains non-finite values");
    }
    blocks_.push_back({std::move(name), std::move(train), std::move(test)});
    return blocks_.size() - 1;
}

std::optional<std::size_t> BlockDesign::find_block(std::string_view name) const
{
    for (std::size_t i = 1; i < blocks_.size(); ++i) {
        if (blocks_[i].name == name) {
            return i;
        }
    }
    return std::nullopt;
}

std::size_t BlockDesign::block_rows(std::size_t index) const
{
    return static_cast<std::size_t>(blocks_.at(index).train.rows());
}

void BlockDesign::check_selection(const BlockSelection& selection) const
{
    if (selection.blocks.empty() && !selection.bias) {
        raise(ErrorCode::EmptyConfig, "no feature blocks selected");
    }
    for (const auto& e : selection.blocks) {
        if (e.block == 0 || e.block >= blocks_.size()) {
            raise(ErrorCode::InvalidConfig, "unknown block index " + std::to_string(e.block));
        }
        if (!std::isfinite(e.weight) || e.weight < 0.0) {
            raise(ErrorCode::InvalidConfig, "block weight must be finite and nonnegative");
        }
    }
}

FeatureLayout BlockDesign::layout(const BlockSelection& selection) const
{
    check_selection(selection);
    FeatureLayout layout;
    std::size_t offset = 0;
    for (const auto& e : selection.blocks) {
        const auto rows = block_rows(e.block);
        layout.blocks.push_back({blocks_[e.block].name, offset, rows, e.weight});
        offset += rows;
    }
    layout.bias = selection.bias;
    return layout;
}

const BlockDesign::PairGram& BlockDesign::pair_gram(std::size_t a, std::size_t b) const
{
    auto key = std::make_pair(a, b);
    auto it = gram_cache_.find(key);
    if (it != gram_cache_.end()) {
        return it->second;
    }
    const auto fit = static_cast<Index>(fit_count_);
    const auto rest = static_cast<Index>(holdout_count());
    const auto& A = blocks_[a].train;
    const auto& B = blocks_[b].train;
    PairGram pg;
    pg.fit.noalias() = A.leftCols(fit) * B.leftCols(fit).transpose();
    pg.rest.noalias() = A.rightCols(rest) * B.rightCols(rest).transpose();
    return gram_cache_.emplace(key, std::move(pg)).first->second;
}

const BlockDesign::BlockCross& BlockDesign::block_cross(std::size_t a) const
{
    auto it = cross_cache_.find(a);
    if (it != cross_cache_.end()) {
        return it->second;
    }
    const auto fit = static_cast<Index>(fit_count_);
    const auto rest = static_cast<Index>(holdout_count());
    const auto& A = blocks_[a].train;
    BlockCross bc;
    bc.fit.noalias() = targets_.leftCols(fit) * A.leftCols(fit).transpose();
    bc.rest.noalias() = targets_.rightCols(rest) * A.rightCols(rest).transpose();
    return cross_cache_.emplace(a, std::move(bc)).first->second;
}

namespace {

/// Flattens a selection into (block index, weight, offset) triples with the bias last.
struct Placed {
    std::size_t block;
    double weight;
    Index offset;
    Index rows;
};

} // namespace

Eigen::MatrixXd BlockDesign::gram(const BlockSelection& selection, bool fit_part_only) const
{
    const auto lay = layout(selection);
    std::vector<Placed> placed;
    for (std::size_t i = 0; i < selection.blocks.size(); ++i) {
        placed.push_back({selection.blocks[i].block, selection.blocks[i].weight,
                          static_cast<Index>(lay.blocks[i].offset), static_cast<Index>(lay.blocks[i].length)});
    }
    if (selection.bias) {
        placed.push_back({0, 1.0, static_cast<Index>(lay.dimension() - 1), 1});
    }

    const auto n = static_cast<Index>(lay.dimension());
    Eigen::MatrixXd g(n, n);
    for (const auto& p : placed) {
        for (const auto& q : placed) {
            if (q.offset < p.offset) {
                continue;
            }
            const bool swapped = p.block > q.block;
            const auto& pg = swapped ? pair_gram(q.block, p.block) : pair_gram(p.block, q.block);
            const double scale = p.weight * q.weight;
            auto dst = g.block(p.offset, q.offset, p.rows, q.rows);
            if (fit_part_only) {
                if (swapped) {
                    dst = scale * pg.fit.transpose();
                } else {
                    dst = scale * pg.fit;
                }
            } else {
                if (swapped) {
                    dst = scale * (pg.fit + pg.rest).transpose();
                } else {
                    dst = scale * (pg.fit + pg.rest);
                }
            }
            if (q.offset != p.offset) {
                g.block(q.offset, p.offset, q.rows, p.rows) = dst.transpose();
            }
        }
    }
    return g;
}

Eigen::MatrixXd BlockDesign::cross(const BlockSelection& selection, bool fit_part_only) const
{
    const auto lay = layout(selection);
    Eigen::MatrixXd c(classes(), static_cast<Index>(lay.dimension()));
    auto fill = [&](std::size_t block, double weight, Index offset, Index rows) {
        const auto& bc = block_cross(block);
        if (fit_part_only) {
            c.middleCols(offset, rows) = weight * bc.fit;
        } else {
            c.middleCols(offset, rows) = weight * (bc.fit + bc.rest);
        }
    };
    for (std::size_t i = 0; i < selection.blocks.size(); ++i) {
        fill(selection.blocks[i].block, selection.blocks[i].weight, static_cast<Index>(lay.blocks[i].offset),
             static_cast<Index>(lay.blocks[i].length));
    }
    if (selection.bias) {
        fill(0, 1.0, static_cast<Index>(lay.dimension() - 1), 1);
    }
    return c;
}

Eigen::MatrixXd BlockDesign::scores(const Eigen::MatrixXd& w_out, const BlockSelection& selection, bool holdout) const
{
    const auto lay = layout(selection);
    if (static_cast<std::size_t>(w_out.cols()) != lay.dimension() || w_out.rows() != classes()) {
        raise(ErrorCode::DimensionMismatch, "readout weights do not match the selected blocks");
    }
    const auto cols = static_cast<Index>(holdout ? holdout_count() : test_count());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(classes(), cols);
    auto add = [&](std::size_t block, double weight, Index offset, Index rows) {
        const auto& b = blocks_[block];
        const Eigen::MatrixXd w = weight * w_out.middleCols(offset, rows);
        if (holdout) {
            out.noalias() += w * b.train.rightCols(cols);
        } else {
            out.noalias() += w * b.test;
        }
    };
    for (std::size_t i = 0; i < selection.blocks.size(); ++i) {
        add(selection.blocks[i].block, selection.blocks[i].weight, static_cast<Index>(lay.blocks[i].offset),
            static_cast<Index>(lay.blocks[i].length));
    }
    if (selection.bias) {
        add(0, 1.0, static_cast<Index>(lay.dimension() - 1), 1);
    }
    return out;
}

Eigen::MatrixXd BlockDesign::holdout_scores(const Eigen::MatrixXd& w_out, const BlockSelection& selection) const
{
    return scores(w_out, selection, true);
}

Eigen::MatrixXd BlockDesign::test_scores(const Eigen::MatrixXd& w_out, const BlockSelection& selection) const
{
    return scores(w_out, selection, false);
}

FeatureMatrix BlockDesign::assemble(const BlockSelection& selection, bool train) const
{
    FeatureMatrix m;
    m.layout = layout(selection);
    const auto cols = static_cast<Index>(train ? train_count() : test_count());
    m.values.resize(static_cast<Index>(m.layout.dimension()), cols);
    for (std::size_t i = 0; i < selection.blocks.size(); ++i) {
        const auto& b = blocks_[selection.blocks[i].block];
        m.values.middleRows(static_cast<Index>(m.layout.blocks[i].offset), static_cast<Index>(m.layout.blocks[i].length)) =
            selection.blocks[i].weight * (train ? b.train : b.test);
    }
    if (selection.bias) {
        m.values.bottomRows(1).setOnes();
    }
    return m;
}

FeatureMatrix BlockDesign::assemble_test(const BlockSelection& selection) const
{
    return assemble(selection, false);
}

FeatureMatrix BlockDesign::assemble_train(const BlockSelection& selection) const
{
    return assemble(selection, true);
}

FitResult fit_readout(const BlockDesign& design, const BlockSelection& selection, const std::vector<double>& lambdas,
                      const FitOptions& options)
{
    if (lambdas.empty()) {
        raise(ErrorCode::InvalidConfig, "lambda grid is empty");
    }
    for (double l : lambdas) {
        if (!std::isfinite(l) || l < 0.0) {
            raise(ErrorCode::InvalidConfig, "lambda values must be finite and nonnegative");
        }
    }
    const bool select = lambdas.size() > 1;
    if (select && (design.holdout_count() == 0 || design.fit_count() == 0)) {
        raise(ErrorCode::InvalidConfig, "lambda selection needs a nonempty holdout; training split has " +
                                            std::to_string(design.train_count()) + " windows");
    }

    FitResult result;
    result.runs.resize(lambdas.size());
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        result.runs[i].lambda = lambdas[i];
    }

    const auto train_start = Clock::now();
    if (select) {
        const Eigen::MatrixXd g_fit = design.gram(selection, true);
        const Eigen::MatrixXd c_fit = design.cross(selection, true);
        for (auto& run : result.runs) {
            try {
                const Eigen::MatrixXd w = solve_ridge(g_fit, c_fit, run.lambda);
                const auto predicted = classify(design.holdout_scores(w, selection));
                run.holdout_accuracy = fraction_correct(design.train_labels(), predicted, design.fit_count());
            } catch (const Error& e) {
                if (e.error_class() != ErrorClass::Numeric) {
                    throw;
                }
                run.failure = e.what();
            }
        }
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < result.runs.size(); ++i) {
            const auto& acc = result.runs[i].holdout_accuracy;
            if (acc && (!best || *acc > *result.runs[*best].holdout_accuracy ||
                        (*acc == *result.runs[*best].holdout_accuracy &&
                         result.runs[i].lambda > result.runs[*best].lambda))) {
                best = i;
            }
        }
        if (!best) {
            raise(ErrorCode::SingularSystem, "every lambda in the grid failed on the holdout split");
        }
        result.selected = *best;
    }

    const Eigen::MatrixXd g_full = design.gram(selection, false);
    const Eigen::MatrixXd c_full = design.cross(selection, false);
    const double chosen = lambdas[result.selected];

    ReadoutModel model;
    model.w_out = solve_ridge(g_full, c_full, chosen);
    model.lambda = chosen;
    model.layout = design.layout(selection);
    model.class_names = design.class_names();
    result.train_seconds = seconds_since(train_start);

    const auto predict_start = Clock::now();
    result.test_scores = design.test_scores(model.w_out, selection);
    result.test_predictions = classify(result.test_scores);
    result.predict_seconds = seconds_since(predict_start);
    result.model = std::move(model);

    auto& chosen_run = result.runs[result.selected];
    chosen_run.test_predictions = result.test_predictions;
    chosen_run.test_accuracy = fraction_correct(design.test_labels(), result.test_predictions);

    if (options.evaluate_every_lambda) {
        for (std::size_t i = 0; i < result.runs.size(); ++i) {
            if (i == result.selected) {
                continue;
            }
            auto& run = result.runs[i];
            try {
                const Eigen::MatrixXd w = solve_ridge(g_full, c_full, run.lambda);
                run.test_predictions = classify(design.test_scores(w, selection));
                run.test_accuracy = fraction_correct(design.test_labels(), run.test_predictions);
            } catch (const Error& e) {
                if (e.error_class() != ErrorClass::Numeric) {
                    throw;
                }
                if (run.failure.empty()) {
                    run.failure = e.what();
                }
            }
        }
    }
    return result;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count)
{
    if (count == 0 || !(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
        raise(ErrorCode::InvalidConfig, "log grid needs 0 < lo <= hi and at least one point");
    }
    if (count == 1) {
        return {lo};
    }
    std::vector<double> grid(count);
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t i = 0; i < count; ++i) {
        grid[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

std::vector<double> default_lambda_grid()
{
    return {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2};
}

} // namespace ngrc
