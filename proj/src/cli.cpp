#include "ngrc/cli.hpp"

#include "ngrc/error.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>

namespace ngrc {

namespace {

namespace fs = std::filesystem;

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto end = s.find(sep, start);
        parts.push_back(trim(s.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start)));
        if (end == std::string_view::npos) {
            break;
        }
        start = end + 1;
    }
    return parts;
}

double parse_double(const std::string& token, std::string_view what)
{
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (first != last && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (token.empty() || ec != std::errc{} || ptr != last) {
        raise(ErrorCode::InvalidConfig, "cannot parse " + std::string(what) + " '" + token + "'");
    }
    return value;
}

template <class Int>
std::vector<Int> parse_int_list(std::string_view text, std::string_view what)
{
    std::vector<Int> out;
    if (trim(text).empty()) {
        return out;
    }
    for (const auto& token : split(text, ',')) {
        Int value{};
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
            raise(ErrorCode::InvalidConfig, "cannot parse " + std::string(what) + " '" + token + "'");
        }
        out.push_back(value);
    }
    return out;
}

/// Options shared by the experiment subcommands.
struct CliOptions {
    std::string data;
    std::string features = "#1";
    std::string weights;
    std::string lambda = "auto";
    std::string nodes;
    std::size_t k = 4;
    double p = 0.5;
    double rho = 8.41;
    double input_scale = 1.0;
    double leak = 1.0;
    std::size_t washout = 8;
    std::string seeds = "1,2,3";
    std::string out;
    std::string format = "json";
    bool bias = false;
    std::string config;
};

void add_common(CLI::App* cmd, CliOptions& o)
{
    cmd->add_option("--data", o.data, "UCI HAR dataset root (contains train/ and test/)")->required();
    cmd->add_option("--lambda", o.lambda, "ridge parameter: value, list a,b,c, log range min:max:steps, or auto");
    cmd->add_option("--out", o.out, "report path (default: stdout)");
    cmd->add_option("--format", o.format, "report format")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--config", o.config, "file with key = value lines mirroring these flags");
}

void add_feature_options(CLI::App* cmd, CliOptions& o)
{
    cmd->add_option("--features", o.features, "feature set #1..#10 or family list lin,nls,nlq,nlcq,nlcs,nlt");
    cmd->add_option("--weights", o.weights, "family weights, e.g. lin=1.0,nls=1.8");
    cmd->add_flag("--bias", o.bias, "append a constant feature");
}

void add_reservoir_options(CLI::App* cmd, CliOptions& o)
{
    cmd->add_option("--nodes", o.nodes, "comma separated reservoir sizes");
    cmd->add_option("--k", o.k, "ring neighbours per side");
    cmd->add_option("--p", o.p, "rewiring probability");
    cmd->add_option("--rho", o.rho, "target spectral radius");
    cmd->add_option("--input-scale", o.input_scale, "input weight range");
    cmd->add_option("--leak", o.leak, "leak rate in (0, 1]");
    cmd->add_option("--washout", o.washout, "initial steps excluded from the state mean");
    cmd->add_option("--seeds", o.seeds, "comma separated reservoir seeds");
}

ExperimentConfig to_config(const CliOptions& o, Mode mode)
{
    ExperimentConfig cfg;
    cfg.mode = mode;
    cfg.data_root = o.data;
    cfg.lambdas = parse_lambda_spec(o.lambda);
    cfg.include_bias = o.bias;
    cfg.output = o.out;
    cfg.format = o.format == "csv" ? ReportFormat::Csv : ReportFormat::Json;

    const std::string features = trim(o.features);
    cfg.families = parse_feature_set(features);
    cfg.feature_set_id.reset();
    if (!features.empty() && (features.front() == '#' || std::isdigit(static_cast<unsigned char>(features.front())))) {
        cfg.feature_set_id = std::stoi(features.front() == '#' ? features.substr(1) : features);
    }
    if (!o.weights.empty()) {
        cfg.weights = parse_weight_spec(o.weights);
    } else if (mode == Mode::WeightedNgrc) {
        cfg.weights = tuned_family_weights();
    }

    if (mode == Mode::EsnSweep) {
        ReservoirSpec spec;
        spec.degree = o.k;
        spec.rewire = o.p;
        spec.target_rho = o.rho;
        spec.input_scale = o.input_scale;
        spec.leak_rate = o.leak;
        spec.washout = o.washout;
        cfg.reservoir = spec;
        cfg.nodes = parse_int_list<std::size_t>(o.nodes, "node count");
        cfg.seeds = parse_int_list<std::uint64_t>(o.seeds, "seed");
    }
    return cfg;
}

void write_output(const std::string& text, const std::string& path, std::ostream& out)
{
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path);
    if (!file) {
        raise(ErrorCode::Io, "cannot write " + path);
    }
    file << text;
    if (!file) {
        raise(ErrorCode::Io, "write failed for " + path);
    }
}

int exit_code_for(const Error& e)
{
    switch (e.error_class()) {
    case ErrorClass::Config: return kExitConfig;
    case ErrorClass::Data: return kExitData;
    case ErrorClass::Numeric: return kExitNumeric;
    }
    return kExitNumeric;
}

/// Inserts the contents of every `--config <file>` right after the subcommand
/// so that flags given on the command line take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args)
{
    std::vector<std::string> rest;
    std::vector<std::string> from_files;
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string path;
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
            continue;
        }
        auto extra = read_config_file(path);
        from_files.insert(from_files.end(), extra.begin(), extra.end());
    }
    if (from_files.empty() || rest.empty()) {
        return rest;
    }
    std::vector<std::string> merged{rest.front()};
    merged.insert(merged.end(), from_files.begin(), from_files.end());
    merged.insert(merged.end(), rest.begin() + 1, rest.end());
    return merged;
}

} // namespace

std::vector<double> parse_lambda_spec(std::string_view text)
{
    const std::string s = trim(text);
    if (s.empty() || s == "auto") {
        return default_lambda_grid();
    }
    if (s.find(':') != std::string::npos) {
        const auto parts = split(s, ':');
        if (parts.size() != 3) {
            raise(ErrorCode::InvalidConfig, "lambda range must be min:max:steps, got '" + s + "'");
        }
        const double lo = parse_double(parts[0], "lambda");
        const double hi = parse_double(parts[1], "lambda");
        const auto steps = parse_int_list<std::size_t>(parts[2], "lambda step count");
        if (steps.size() != 1 || steps[0] == 0) {
            raise(ErrorCode::InvalidConfig, "lambda step count must be positive");
        }
        return log_grid(lo, hi, steps[0]);
    }
    std::vector<double> values;
    for (const auto& token : split(s, ',')) {
        const double v = parse_double(token, "lambda");
        if (!std::isfinite(v) || v < 0.0) {
            raise(ErrorCode::InvalidConfig, "lambda must be finite and nonnegative");
        }
        values.push_back(v);
    }
    return values;
}

std::map<FeatureFamily, double> parse_weight_spec(std::string_view text)
{
    std::map<FeatureFamily, double> weights;
    for (const auto& item : split(text, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            raise(ErrorCode::InvalidConfig, "weight entry '" + item + "' is not family=value");
        }
        const auto name = trim(std::string_view(item).substr(0, eq));
        const auto family = parse_family(name);
        if (!family) {
            raise(ErrorCode::UnknownFamily, "unknown feature family '" + name + "'");
        }
        const double w = parse_double(trim(std::string_view(item).substr(eq + 1)), "weight");
        if (!std::isfinite(w) || w < 0.0) {
            raise(ErrorCode::InvalidConfig, "weight of " + name + " must be finite and nonnegative");
        }
        weights[*family] = w;
    }
    return weights;
}

std::vector<std::string> read_config_file(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        raise(ErrorCode::InvalidConfig, "cannot open config file " + path.string());
    }
    std::vector<std::string> args;
    std::string line;
    while (std::getline(in, line)) {
        const std::string s = trim(line);
        if (s.empty() || s.front() == '#') {
            continue;
        }
        auto sep = s.find_first_of("= \t");
        std::string key = trim(std::string_view(s).substr(0, sep));
        std::string value = sep == std::string::npos ? std::string() : trim(std::string_view(s).substr(sep + 1));
        if (!value.empty() && value.front() == '=') {
            value = trim(std::string_view(value).substr(1));
        }
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        if (key.rfind("--", 0) != 0) {
            key = "--" + key;
        }
        if (value.empty() || value == "true") {
            args.push_back(key);
        } else if (value != "false") {
            args.push_back(key);
            args.push_back(value);
        }
    }
    return args;
}

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Next-generation reservoir computing benchmark on the UCI HAR dataset", "ngrc"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tool_version()));

    CliOptions opts;
    auto* run = app.add_subcommand("run", "train and evaluate one NG-RC feature configuration");
    auto* ablate = app.add_subcommand("ablate", "evaluate feature sets #1..#10");
    auto* weighted = app.add_subcommand("weighted", "NG-RC with per-family weights (default 1.0,1.8,2.0,1.4,0.4 on #1)");
    auto* esn = app.add_subcommand("esn-sweep", "small-world echo state network accuracy versus node count");
    auto* lambda = app.add_subcommand("lambda-sweep", "test and holdout accuracy for every lambda of a grid");
    auto* digest = app.add_subcommand("digest", "per-class counts and per-axis ranges of a dataset");

    for (auto* cmd : {run, ablate, weighted, esn, lambda}) {
        add_common(cmd, opts);
    }
    for (auto* cmd : {run, weighted, lambda}) {
        add_feature_options(cmd, opts);
    }
    ablate->add_flag("--bias", opts.bias, "append a constant feature");
    add_reservoir_options(esn, opts);

    std::string digest_split = "both";
    bool magnitude = false;
    digest->add_option("--data", opts.data, "UCI HAR dataset root")->required();
    digest->add_option("--split", digest_split, "train, test or both")->check(CLI::IsMember({"train", "test", "both"}));
    digest->add_flag("--magnitude", magnitude, "also summarize the Euclidean magnitude of each sample");
    digest->add_option("--out", opts.out, "report path (default: stdout)");

    try {
        auto args = expand_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    } catch (const Error& e) {
        err << "configuration: " << e.what() << '\n';
        return exit_code_for(e);
    }

    std::string stage = "configuration";
    try {
        if (digest->parsed()) {
            stage = "loading dataset";
            nlohmann::json doc = nlohmann::json::object();
            for (auto split : {Split::Train, Split::Test}) {
                if (digest_split != "both" && digest_split != split_name(split)) {
                    continue;
                }
                const auto d = load_har_split(opts.data, split);
                DigestOptions options;
                options.include_magnitude = magnitude;
                doc[std::string(split_name(split))] = digest_to_json(dataset_digest(d, options), d.class_names);
            }
            write_output(doc.dump(2) + "\n", opts.out, out);
            return kExitOk;
        }

        Mode mode = Mode::Ngrc;
        if (ablate->parsed()) {
            mode = Mode::Ablate;
        } else if (weighted->parsed()) {
            mode = Mode::WeightedNgrc;
        } else if (esn->parsed()) {
            mode = Mode::EsnSweep;
        } else if (lambda->parsed()) {
            mode = Mode::LambdaSweep;
        }
        const ExperimentConfig cfg = to_config(opts, mode);
        cfg.validate();

        stage = "loading dataset";
        const HarSplits data = load_har(cfg.data_root);
        err << "loaded " << data.train.size() << " training and " << data.test.size() << " test windows\n";

        stage = std::string(mode_name(mode));
        const nlohmann::json report = run_experiment(cfg, data, &err);

        if (mode == Mode::Ngrc || mode == Mode::WeightedNgrc) {
            const auto& r = report.at("runs").at(0);
            if (r.contains("confusion")) {
                ConfusionMatrix cm;
                cm.class_names = r.at("confusion").at("class_names").get<std::vector<std::string>>();
                const auto& counts = r.at("confusion").at("counts");
                cm.counts.resize(static_cast<Eigen::Index>(counts.size()), static_cast<Eigen::Index>(counts.size()));
                for (std::size_t i = 0; i < counts.size(); ++i) {
                    for (std::size_t j = 0; j < counts.size(); ++j) {
                        cm.counts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                            counts.at(i).at(j).get<std::int64_t>();
                    }
                }
                err << render_confusion(cm);
            }
        }

        stage = "writing report";
        const std::string text = cfg.format == ReportFormat::Csv ? report_to_csv(report) : report.dump(2) + "\n";
        write_output(text, opts.out, out);
        return kExitOk;
    } catch (const Error& e) {
        err << stage << ": " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << stage << ": " << e.what() << '\n';
        return kExitNumeric;
    }
}

} // namespace ngrc
