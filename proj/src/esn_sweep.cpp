#include "ngrc/design.hpp"
#include "ngrc/error.hpp"
#include "ngrc/esn.hpp"

#include <chrono>

namespace ngrc {

std::vector<SweepPoint> node_sweep(const Dataset& train, const Dataset& test, const std::vector<std::size_t>& node_counts,
                                   const ReservoirSpec& base, const SweepOptions& options)
{
    using Clock = std::chrono::steady_clock;

    if (node_counts.empty()) {
        raise(ErrorCode::InvalidConfig, "node sweep needs at least one node count");
    }
    if (options.seeds.empty()) {
        raise(ErrorCode::InvalidConfig, "node sweep needs at least one seed");
    }
    if (train.empty() || test.empty()) {
        raise(ErrorCode::EmptyDataset, "node sweep needs nonempty train and test splits");
    }
    for (auto n : node_counts) {
        ReservoirSpec spec = base;
        spec.nodes = n;
        spec.validate();
    }

    std::vector<SweepPoint> points;
    for (auto n : node_counts) {
        SweepPoint point;
        point.nodes = n;
        for (auto seed : options.seeds) {
            ReservoirSpec spec = base;
            spec.nodes = n;
            spec.seed = seed;

            SeedRun run;
            run.seed = seed;
            const auto feature_start = Clock::now();
            const Reservoir reservoir = build_reservoir(spec);
            Eigen::MatrixXd train_states = reservoir_features(reservoir, train);
            Eigen::MatrixXd test_states = reservoir_features(reservoir, test);
            run.feature_seconds = std::chrono::duration<double>(Clock::now() - feature_start).count();

            const auto rows = static_cast<Eigen::Index>(n);
            BlockDesign design(train.labels(), test.labels(), train.class_names);
            const auto mean_block = design.add_block("state_mean", train_states.topRows(rows), test_states.topRows(rows));
            const auto final_block =
                design.add_block("state_final", train_states.bottomRows(rows), test_states.bottomRows(rows));
            train_states.resize(0, 0);
            test_states.resize(0, 0);

            BlockSelection selection;
            selection.blocks = {{mean_block, 1.0}, {final_block, 1.0}};
            const FitResult fit = fit_readout(design, selection, options.lambdas);

            const auto truth = test.labels();
            run.confusion = confusion(truth, fit.test_predictions, static_cast<int>(test.class_names.size()),
                                      test.class_names);
            run.accuracy = accuracy(run.confusion);
            run.lambda = fit.lambda();
            run.train_seconds = fit.train_seconds;
            run.predict_seconds = fit.predict_seconds;
            point.runs.push_back(run);
            if (options.on_run) {
                options.on_run(point, point.runs.back());
            }
        }
        double sum = 0.0;
        for (const auto& r : point.runs) {
            sum += r.accuracy;
        }
        point.mean_accuracy = sum / static_cast<double>(point.runs.size());
        points.push_back(std::move(point));
    }
    return points;
}

} // namespace ngrc
