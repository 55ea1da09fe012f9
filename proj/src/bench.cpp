#include "ngrc/bench.hpp"

#include "ngrc/error.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#ifndef NGRC_VERSION
#define NGRC_VERSION "0.0.0"
#endif

namespace ngrc {

namespace {

using Index = Eigen::Index;
using Clock = std::chrono::steady_clock;

nlohmann::json optional_number(const std::optional<double>& v)
{
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json weights_to_json(const std::vector<FeatureFamily>& families, const std::map<FeatureFamily, double>& weights)
{
    nlohmann::json out = nlohmann::json::object();
    for (auto f : families) {
        auto it = weights.find(f);
        out[std::string(family_name(f))] = it == weights.end() ? 1.0 : it->second;
    }
    return out;
}

nlohmann::json curve_to_json(const std::vector<LambdaRun>& curve)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : curve) {
        nlohmann::json point = {{"lambda", r.lambda},
                                {"holdout_accuracy", optional_number(r.holdout_accuracy)},
                                {"test_accuracy", optional_number(r.test_accuracy)}};
        if (!r.failure.empty()) {
            point["failure"] = r.failure;
        }
        out.push_back(std::move(point));
    }
    return out;
}

std::vector<FeatureFamily> canonical(std::vector<FeatureFamily> families)
{
    std::sort(families.begin(), families.end());
    families.erase(std::unique(families.begin(), families.end()), families.end());
    return families;
}

std::string label_for(const std::vector<FeatureFamily>& families, std::optional<int> id)
{
    return id ? "#" + std::to_string(*id) + " " + feature_set_label(families) : feature_set_label(families);
}

std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        out += c == '"' ? std::string("\"\"") : std::string(1, c);
    }
    return out + "\"";
}

std::string csv_number(const nlohmann::json& v)
{
    return v.is_null() ? std::string() : v.dump();
}

} // namespace

std::string_view tool_version() noexcept
{
    return NGRC_VERSION;
}

std::string_view mode_name(Mode mode) noexcept
{
    switch (mode) {
    case Mode::Ngrc: return "run";
    case Mode::Ablate: return "ablate";
    case Mode::WeightedNgrc: return "weighted";
    case Mode::EsnSweep: return "esn-sweep";
    case Mode::LambdaSweep: return "lambda-sweep";
    }
    return "?";
}

std::map<FeatureFamily, double> tuned_family_weights()
{
    return {{FeatureFamily::Lin, 1.0},
            {FeatureFamily::Nls, 1.8},
            {FeatureFamily::Nlq, 2.0},
            {FeatureFamily::Nlcs, 1.4},
            {FeatureFamily::Nlt, 0.4}};
}

void ExperimentConfig::validate() const
{
    if (lambdas.empty()) {
        raise(ErrorCode::InvalidConfig, "lambda grid is empty");
    }
    for (double l : lambdas) {
        if (!std::isfinite(l) || l < 0.0) {
            raise(ErrorCode::InvalidConfig, "lambda values must be finite and nonnegative");
        }
    }
    if (mode != Mode::Ablate && mode != Mode::EsnSweep && families.empty() && !include_bias) {
        raise(ErrorCode::EmptyConfig, "no feature families selected");
    }
    for (const auto& [f, w] : weights) {
        if (!std::isfinite(w) || w < 0.0) {
            raise(ErrorCode::InvalidConfig, "weight of " + std::string(family_name(f)) + " must be finite and nonnegative");
        }
    }
    if (mode == Mode::WeightedNgrc) {
        if (weights.empty()) {
            raise(ErrorCode::MissingWeight, "weighted mode needs family weights");
        }
        for (auto f : families) {
            if (!weights.count(f)) {
                raise(ErrorCode::MissingWeight, "no weight given for enabled family " + std::string(family_name(f)));
            }
        }
    }
    if (mode == Mode::EsnSweep) {
        if (!reservoir) {
            raise(ErrorCode::InvalidConfig, "esn-sweep needs a reservoir specification");
        }
        if (nodes.empty()) {
            raise(ErrorCode::InvalidConfig, "esn-sweep needs a nonempty node list");
        }
        if (seeds.empty()) {
            raise(ErrorCode::InvalidConfig, "esn-sweep needs at least one seed");
        }
        for (auto n : nodes) {
            ReservoirSpec spec = *reservoir;
            spec.nodes = n;
            spec.validate();
        }
    }
}

std::string ExperimentConfig::feature_label() const
{
    return label_for(families, feature_set_id);
}

nlohmann::json ExperimentConfig::to_json() const
{
    nlohmann::json families_json = nlohmann::json::array();
    for (auto f : families) {
        families_json.push_back(family_name(f));
    }
    nlohmann::json weights_json = nlohmann::json::object();
    for (const auto& [f, w] : weights) {
        weights_json[std::string(family_name(f))] = w;
    }
    nlohmann::json doc = {
        {"data_root", data_root.string()},
        {"mode", mode_name(mode)},
        {"feature_set", feature_set_id ? nlohmann::json(*feature_set_id) : nlohmann::json(nullptr)},
        {"families", families_json},
        {"weights", weights_json},
        {"lambdas", lambdas},
        {"include_bias", include_bias},
        {"holdout_fraction", kDefaultHoldoutFraction},
        {"nodes", nodes},
        {"seeds", seeds},
        {"format", format == ReportFormat::Json ? "json" : "csv"},
    };
    doc["reservoir"] = reservoir ? spec_to_json(*reservoir) : nlohmann::json(nullptr);
    return doc;
}

ExperimentConfig config_from_json(const nlohmann::json& doc)
{
    try {
        ExperimentConfig cfg;
        cfg.data_root = doc.at("data_root").get<std::string>();
        const auto mode = doc.at("mode").get<std::string>();
        bool known = false;
        for (auto m : {Mode::Ngrc, Mode::Ablate, Mode::WeightedNgrc, Mode::EsnSweep, Mode::LambdaSweep}) {
            if (mode == mode_name(m)) {
                cfg.mode = m;
                known = true;
            }
        }
        if (!known) {
            raise(ErrorCode::InvalidConfig, "unknown mode '" + mode + "'");
        }
        cfg.feature_set_id = doc.at("feature_set").is_null() ? std::nullopt
                                                              : std::optional<int>(doc.at("feature_set").get<int>());
        cfg.families.clear();
        for (const auto& name : doc.at("families")) {
            auto f = parse_family(name.get<std::string>());
            if (!f) {
                raise(ErrorCode::UnknownFamily, "unknown family " + name.dump());
            }
            cfg.families.push_back(*f);
        }
        cfg.weights.clear();
        for (const auto& [name, w] : doc.at("weights").items()) {
            auto f = parse_family(name);
            if (!f) {
                raise(ErrorCode::UnknownFamily, "unknown family " + name);
            }
            cfg.weights[*f] = w.get<double>();
        }
        cfg.lambdas = doc.at("lambdas").get<std::vector<double>>();
        cfg.include_bias = doc.at("include_bias").get<bool>();
        cfg.nodes = doc.at("nodes").get<std::vector<std::size_t>>();
        cfg.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
        cfg.format = doc.at("format").get<std::string>() == "csv" ? ReportFormat::Csv : ReportFormat::Json;
        if (!doc.at("reservoir").is_null()) {
            cfg.reservoir = spec_from_json(doc.at("reservoir"));
        }
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::InvalidConfig, std::string("malformed configuration: ") + e.what());
    }
}

nlohmann::json RunReport::to_json() const
{
    nlohmann::json families_json = nlohmann::json::array();
    for (auto f : families) {
        families_json.push_back(family_name(f));
    }
    nlohmann::json dims = nlohmann::json::object();
    for (const auto& b : layout.blocks) {
        dims[b.name] = b.length;
    }
    if (layout.bias) {
        dims["bias"] = 1;
    }
    dims["total"] = layout.dimension();

    nlohmann::json doc = {
        {"label", label},
        {"feature_set", feature_set_id ? nlohmann::json(*feature_set_id) : nlohmann::json(nullptr)},
        {"families", families_json},
        {"weights", weights_to_json(families, weights)},
        {"include_bias", include_bias},
        {"dimensions", dims},
        {"lambda", lambda},
        {"lambda_curve", curve_to_json(lambda_curve)},
        {"train_windows", train_windows},
        {"test_windows", test_windows},
        {"timings",
         {{"feature_build_s", timings.feature_seconds},
          {"train_s", timings.train_seconds},
          {"predict_s", timings.predict_seconds}}},
    };
    if (failure.empty()) {
        doc["accuracy"] = accuracy;
        doc["per_class_accuracy"] = per_class_accuracy(confusion);
        doc["confusion"] = confusion_to_json(confusion);
    } else {
        doc["accuracy"] = nullptr;
        doc["failure"] = failure;
    }
    return doc;
}

NgrcBench::NgrcBench(const Dataset& train, const Dataset& test)
    : test_labels_(test.labels())
    , class_names_(train.class_names)
{
    const auto steps = common_steps(train);
    if (common_steps(test) != steps) {
        raise(ErrorCode::HeterogeneousWindows, "train and test windows differ in length");
    }
    design_ = std::make_unique<BlockDesign>(train.labels(), test.labels(), class_names_);

    auto block_for = [&](const Dataset& d, FeatureFamily f) {
        Eigen::MatrixXd m(static_cast<Index>(family_dimension(f, steps)), static_cast<Index>(d.size()));
        for (std::size_t j = 0; j < d.size(); ++j) {
            validate_window(d.windows[j]);
            write_family(d.windows[j].samples, f, 1.0, m.col(static_cast<Index>(j)));
        }
        return m;
    };
    for (auto f : kAllFamilies) {
        const auto start = Clock::now();
        Eigen::MatrixXd tr = block_for(train, f);
        Eigen::MatrixXd te = block_for(test, f);
        build_seconds_[f] = std::chrono::duration<double>(Clock::now() - start).count();
        block_of_[f] = design_->add_block(std::string(family_name(f)), std::move(tr), std::move(te));
    }
}

BlockSelection NgrcBench::select(const std::vector<FeatureFamily>& families,
                                 const std::map<FeatureFamily, double>& weights, bool include_bias) const
{
    BlockSelection selection;
    for (auto f : canonical(families)) {
        auto it = weights.find(f);
        selection.blocks.push_back({block_of_.at(f), it == weights.end() ? 1.0 : it->second});
    }
    selection.bias = include_bias;
    return selection;
}

RunReport NgrcBench::make_report(const std::vector<FeatureFamily>& families,
                                 const std::map<FeatureFamily, double>& weights, bool include_bias,
                                 std::optional<int> feature_set_id, const FitResult& fit, const LambdaRun& run) const
{
    RunReport report;
    report.families = canonical(families);
    report.label = label_for(report.families, feature_set_id);
    report.feature_set_id = feature_set_id;
    for (auto f : report.families) {
        auto it = weights.find(f);
        report.weights[f] = it == weights.end() ? 1.0 : it->second;
        report.timings.feature_seconds += build_seconds_.at(f);
    }
    report.include_bias = include_bias;
    report.layout = fit.model.layout;
    report.lambda = run.lambda;
    report.lambda_curve = fit.runs;
    for (auto& r : report.lambda_curve) {
        r.test_predictions.clear();
    }
    report.train_windows = design_->train_count();
    report.test_windows = design_->test_count();
    report.timings.train_seconds = fit.train_seconds;
    report.timings.predict_seconds = fit.predict_seconds;
    if (run.test_predictions.empty()) {
        report.failure = run.failure.empty() ? "not evaluated" : run.failure;
        return report;
    }
    report.confusion = confusion(test_labels_, run.test_predictions, static_cast<int>(class_names_.size()), class_names_);
    report.accuracy = accuracy(report.confusion);
    return report;
}

RunReport NgrcBench::run(const std::vector<FeatureFamily>& families, const std::map<FeatureFamily, double>& weights,
                         const std::vector<double>& lambdas, bool include_bias, std::optional<int> feature_set_id)
{
    const auto selection = select(families, weights, include_bias);
    const FitResult fit = fit_readout(*design_, selection, lambdas);
    return make_report(families, weights, include_bias, feature_set_id, fit, fit.runs[fit.selected]);
}

AblationResult NgrcBench::ablate(const std::vector<double>& lambdas, bool include_bias,
                                 const std::function<void(const RunReport&)>& on_run)
{
    AblationResult result;
    for (int id = 1; id <= 10; ++id) {
        result.runs.push_back(run(named_feature_set(id), {}, lambdas, include_bias, id));
        if (on_run) {
            on_run(result.runs.back());
        }
        if (result.runs.back().accuracy > result.runs[result.best].accuracy) {
            result.best = result.runs.size() - 1;
        }
    }
    return result;
}

LambdaSweepResult NgrcBench::lambda_sweep(const std::vector<FeatureFamily>& families,
                                          const std::map<FeatureFamily, double>& weights,
                                          const std::vector<double>& lambdas, bool include_bias,
                                          std::optional<int> feature_set_id)
{
    const auto selection = select(families, weights, include_bias);
    FitOptions options;
    options.evaluate_every_lambda = true;
    const FitResult fit = fit_readout(*design_, selection, lambdas, options);

    LambdaSweepResult result;
    for (const auto& run : fit.runs) {
        result.runs.push_back(make_report(families, weights, include_bias, feature_set_id, fit, run));
    }
    result.selected = fit.selected;
    result.selected_lambda = fit.lambda();
    return result;
}

std::vector<int> NgrcBench::predict(const std::vector<FeatureFamily>& families,
                                    const std::map<FeatureFamily, double>& weights, double lambda, bool include_bias)
{
    return fit_readout(*design_, select(families, weights, include_bias), {lambda}).test_predictions;
}

HarSplits load_har(const std::filesystem::path& root)
{
    return {load_har_split(root, Split::Train), load_har_split(root, Split::Test)};
}

nlohmann::json run_experiment(const ExperimentConfig& config, const HarSplits& data, std::ostream* progress)
{
    config.validate();
    nlohmann::json doc = {
        {"tool", "ngrc"},
        {"version", tool_version()},
        {"mode", mode_name(config.mode)},
        {"config", config.to_json()},
    };
    auto note = [&](const std::string& line) {
        if (progress) {
            *progress << line << std::endl;
        }
    };

    switch (config.mode) {
    case Mode::Ngrc:
    case Mode::WeightedNgrc: {
        NgrcBench bench(data.train, data.test);
        const auto report =
            bench.run(config.families, config.weights, config.lambdas, config.include_bias, config.feature_set_id);
        note(report.label + ": accuracy " + std::to_string(report.accuracy) + " (lambda " +
             std::to_string(report.lambda) + ")");
        doc["runs"] = nlohmann::json::array({report.to_json()});
        doc["accuracy"] = report.accuracy;
        break;
    }
    case Mode::Ablate: {
        NgrcBench bench(data.train, data.test);
        const auto result = bench.ablate(config.lambdas, config.include_bias, [&](const RunReport& r) {
            note(r.label + ": accuracy " + std::to_string(r.accuracy) + " (lambda " + std::to_string(r.lambda) + ")");
        });
        nlohmann::json runs = nlohmann::json::array();
        for (const auto& r : result.runs) {
            runs.push_back(r.to_json());
        }
        doc["runs"] = runs;
        const auto& best = result.runs[result.best];
        doc["best"] = {{"feature_set", *best.feature_set_id}, {"label", best.label}, {"accuracy", best.accuracy}};
        break;
    }
    case Mode::LambdaSweep: {
        NgrcBench bench(data.train, data.test);
        const auto result = bench.lambda_sweep(config.families, config.weights, config.lambdas, config.include_bias,
                                               config.feature_set_id);
        nlohmann::json runs = nlohmann::json::array();
        for (const auto& r : result.runs) {
            note("lambda " + std::to_string(r.lambda) + ": accuracy " + std::to_string(r.accuracy));
            runs.push_back(r.to_json());
        }
        doc["runs"] = runs;
        doc["selected_lambda"] = result.selected_lambda;
        doc["selected_index"] = result.selected;
        break;
    }
    case Mode::EsnSweep: {
        SweepOptions options;
        options.seeds = config.seeds;
        options.lambdas = config.lambdas;
        options.on_run = [&](const SweepPoint& point, const SeedRun& run) {
            note("nodes " + std::to_string(point.nodes) + " seed " + std::to_string(run.seed) + ": accuracy " +
                 std::to_string(run.accuracy));
        };
        const auto points = node_sweep(data.train, data.test, config.nodes, *config.reservoir, options);
        nlohmann::json points_json = nlohmann::json::array();
        for (const auto& p : points) {
            nlohmann::json runs = nlohmann::json::array();
            for (const auto& r : p.runs) {
                runs.push_back({{"seed", r.seed},
                                {"accuracy", r.accuracy},
                                {"lambda", r.lambda},
                                {"per_class_accuracy", per_class_accuracy(r.confusion)},
                                {"confusion", confusion_to_json(r.confusion)},
                                {"timings",
                                 {{"feature_build_s", r.feature_seconds},
                                  {"train_s", r.train_seconds},
                                  {"predict_s", r.predict_seconds}}}});
            }
            points_json.push_back({{"nodes", p.nodes}, {"mean_accuracy", p.mean_accuracy}, {"runs", runs}});
        }
        doc["points"] = points_json;
        break;
    }
    }
    return doc;
}

std::string report_to_csv(const nlohmann::json& report)
{
    std::ostringstream os;
    const auto mode = report.at("mode").get<std::string>();
    if (mode == "esn-sweep") {
        os << "mode,nodes,seed,lambda,accuracy,mean_accuracy\n";
        for (const auto& p : report.at("points")) {
            for (const auto& r : p.at("runs")) {
                os << mode << ',' << p.at("nodes").dump() << ',' << r.at("seed").dump() << ','
                   << csv_number(r.at("lambda")) << ',' << csv_number(r.at("accuracy")) << ','
                   << csv_number(p.at("mean_accuracy")) << '\n';
            }
        }
        return os.str();
    }
    os << "mode,label,feature_set,families,weights,include_bias,dimension,lambda,accuracy,train_windows,test_windows\n";
    for (const auto& r : report.at("runs")) {
        std::string families;
        for (const auto& f : r.at("families")) {
            families += (families.empty() ? "" : "+") + f.get<std::string>();
        }
        std::string weights;
        for (const auto& [name, w] : r.at("weights").items()) {
            weights += (weights.empty() ? "" : " ") + name + "=" + w.dump();
        }
        os << mode << ',' << csv_escape(r.at("label").get<std::string>()) << ','
           << (r.at("feature_set").is_null() ? std::string() : r.at("feature_set").dump()) << ',' << families << ','
           << csv_escape(weights) << ',' << (r.at("include_bias").get<bool>() ? "true" : "false") << ','
           << r.at("dimensions").at("total").dump() << ',' << csv_number(r.at("lambda")) << ','
           << csv_number(r.at("accuracy")) << ',' << r.at("train_windows").dump() << ',' << r.at("test_windows").dump()
           << '\n';
    }
    return os.str();
}

nlohmann::json strip_timings(const nlohmann::json& report)
{
    if (report.is_object()) {
        nlohmann::json out = nlohmann::json::object();
        for (const auto& [key, value] : report.items()) {
            if (key != "timings") {
                out[key] = strip_timings(value);
            }
        }
        return out;
    }
    if (report.is_array()) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& v : report) {
            out.push_back(strip_timings(v));
        }
        return out;
    }
    return report;
}

nlohmann::json digest_to_json(const DatasetDigest& digest, const std::vector<std::string>& class_names)
{
    nlohmann::json counts = nlohmann::json::object();
    for (std::size_t s = 0; s < digest.class_counts.size(); ++s) {
        const std::string name = s < class_names.size() ? class_names[s] : "class-" + std::to_string(s + 1);
        counts[name] = digest.class_counts[s];
    }
    auto axis = [](const AxisSummary& a) { return nlohmann::json{{"min", a.min}, {"max", a.max}, {"mean", a.mean}}; };
    nlohmann::json doc = {{"windows", digest.windows},
                          {"class_counts", counts},
                          {"axes", {{"x", axis(digest.axes[0])}, {"y", axis(digest.axes[1])}, {"z", axis(digest.axes[2])}}}};
    if (digest.has_magnitude) {
        doc["magnitude"] = axis(digest.magnitude);
    }
    return doc;
}

} // namespace ngrc
