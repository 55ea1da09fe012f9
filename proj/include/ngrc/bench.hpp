#pragma once

// Experiment harness for the HAR benchmark: NG-RC runs, feature-set ablation,
// weighted families, lambda sweeps and reservoir node sweeps.

#include "ngrc/design.hpp"
#include "ngrc/esn.hpp"
#include "ngrc/features.hpp"
#include "ngrc/har.hpp"
#include "ngrc/metrics.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ngrc {

std::string_view tool_version() noexcept;

enum class Mode { Ngrc, Ablate, WeightedNgrc, EsnSweep, LambdaSweep };
enum class ReportFormat { Json, Csv };

std::string_view mode_name(Mode mode) noexcept;

/// (w_lin, w_nls, w_nlq, w_nlcs, w_nlt) = (1.0, 1.8, 2.0, 1.4, 0.4), used with feature set #1.
std::map<FeatureFamily, double> tuned_family_weights();

struct ExperimentConfig {
    std::filesystem::path data_root;
    Mode mode = Mode::Ngrc;
    std::vector<FeatureFamily> families = named_feature_set(1);
    std::optional<int> feature_set_id = 1;
    std::map<FeatureFamily, double> weights;  // empty: uniform
    std::vector<double> lambdas = default_lambda_grid();
    bool include_bias = false;
    std::optional<ReservoirSpec> reservoir;
    std::vector<std::size_t> nodes;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    std::filesystem::path output;
    ReportFormat format = ReportFormat::Json;

    /// Mode-specific checks; throws InvalidConfig / MissingWeight.
    void validate() const;
    std::string feature_label() const;
    nlohmann::json to_json() const;
};

ExperimentConfig config_from_json(const nlohmann::json& doc);

struct RunTimings {
    double feature_seconds = 0.0;
    double train_seconds = 0.0;
    double predict_seconds = 0.0;
};

struct RunReport {
    std::string label;
    std::optional<int> feature_set_id;
    std::vector<FeatureFamily> families;
    std::map<FeatureFamily, double> weights;
    bool include_bias = false;
    FeatureLayout layout;
    double lambda = 0.0;
    std::vector<LambdaRun> lambda_curve;
    double accuracy = 0.0;
    ConfusionMatrix confusion;
    RunTimings timings;
    std::size_t train_windows = 0;
    std::size_t test_windows = 0;
    std::string failure;  // set when the solve for this lambda failed

    nlohmann::json to_json() const;
};

struct AblationResult {
    std::vector<RunReport> runs;  // feature sets #1..#10 in order
    std::size_t best = 0;         // index into runs
};

struct LambdaSweepResult {
    std::vector<RunReport> runs;  // one per lambda, each trained on the full training split
    double selected_lambda = 0.0;
    std::size_t selected = 0;
};

/// Shared state for NG-RC runs over one train/test pair: every family block is
/// computed once and Gram blocks are cached across runs.
class NgrcBench {
public:
    NgrcBench(const Dataset& train, const Dataset& test);

    RunReport run(const std::vector<FeatureFamily>& families, const std::map<FeatureFamily, double>& weights,
                  const std::vector<double>& lambdas, bool include_bias = false,
                  std::optional<int> feature_set_id = std::nullopt);

    AblationResult ablate(const std::vector<double>& lambdas, bool include_bias = false,
                          const std::function<void(const RunReport&)>& on_run = {});

    LambdaSweepResult lambda_sweep(const std::vector<FeatureFamily>& families,
                                   const std::map<FeatureFamily, double>& weights, const std::vector<double>& lambdas,
                                   bool include_bias = false, std::optional<int> feature_set_id = std::nullopt);

    /// Fits with a fixed lambda and returns the test predictions (no report).
    std::vector<int> predict(const std::vector<FeatureFamily>& families, const std::map<FeatureFamily, double>& weights,
                             double lambda, bool include_bias = false);

    const BlockDesign& design() const noexcept { return *design_; }

private:
    BlockSelection select(const std::vector<FeatureFamily>& families, const std::map<FeatureFamily, double>& weights,
                          bool include_bias) const;
    RunReport make_report(const std::vector<FeatureFamily>& families, const std::map<FeatureFamily, double>& weights,
                          bool include_bias, std::optional<int> feature_set_id, const FitResult& fit,
                          const LambdaRun& run) const;

    std::unique_ptr<BlockDesign> design_;
    std::map<FeatureFamily, std::size_t> block_of_;
    std::map<FeatureFamily, double> build_seconds_;
    std::vector<int> test_labels_;
    std::vector<std::string> class_names_;
};

struct HarSplits {
    Dataset train;
    Dataset test;
};

HarSplits load_har(const std::filesystem::path& root);

/// Runs the configured experiment and returns the report document.
nlohmann::json run_experiment(const ExperimentConfig& config, const HarSplits& data, std::ostream* progress = nullptr);

/// One CSV row per run (or per node/seed for reservoir sweeps), with a header line.
std::string report_to_csv(const nlohmann::json& report);

/// Copy of a report with every "timings" object removed.
nlohmann::json strip_timings(const nlohmann::json& report);

nlohmann::json digest_to_json(const DatasetDigest& digest, const std::vector<std::string>& class_names);

} // namespace ngrc
