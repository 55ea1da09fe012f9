#pragma once

// Conventional reservoir-computing baseline: a leaky-tanh echo state network on
// a Watts-Strogatz small-world reservoir, read out by the same ridge solver.

#include "ngrc/har.hpp"
#include "ngrc/metrics.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <utility>
#include <vector>

namespace ngrc {

struct ReservoirSpec {
    std::size_t nodes = 1000;
    std::size_t degree = 4;     // k: each node links to its k nearest ring neighbours on each side
    double rewire = 0.5;        // p
    double target_rho = 8.41;
    double input_scale = 1.0;
    double leak_rate = 1.0;
    std::size_t washout = 8;
    std::uint64_t seed = 1;

    void validate() const;
    bool operator==(const ReservoirSpec&) const = default;
};

nlohmann::json spec_to_json(const ReservoirSpec& spec);
ReservoirSpec spec_from_json(const nlohmann::json& doc);

/// Undirected simple graph; every edge stored once as (lo, hi), sorted.
struct SmallWorldGraph {
    std::size_t nodes = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

    std::size_t edge_count() const noexcept { return edges.size(); }
    std::vector<std::size_t> degrees() const;
    bool has_edge(std::uint32_t a, std::uint32_t b) const;
};

/// Ring lattice of `nodes` vertices with `degree` neighbours per side, then each
/// lattice edge (u, u+j) has its far endpoint moved with probability `rewire` to
/// a uniformly drawn node, rejecting self-loops and duplicates.
SmallWorldGraph build_small_world(std::size_t nodes, std::size_t degree, double rewire, std::uint64_t seed);

struct SpectralOptions {
    std::size_t block_size = 16;
    std::size_t max_iterations = 200000;
    double tolerance = 1e-13;
    std::uint64_t seed = 0x5eed;
};

struct SpectralEstimate {
    double radius = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
};

/// Largest eigenvalue modulus by block power (subspace) iteration with
/// Rayleigh-Ritz extraction, which also resolves complex-conjugate and
/// near-degenerate dominant eigenvalues.
SpectralEstimate estimate_spectral_radius(const Eigen::MatrixXd& matrix, const SpectralOptions& options = {});
SpectralEstimate estimate_spectral_radius(const Eigen::SparseMatrix<double, Eigen::RowMajor>& matrix,
                                          const SpectralOptions& options = {});

/// As above, but throws NonConvergence (with the best estimate in the message).
double spectral_radius(const Eigen::MatrixXd& matrix, const SpectralOptions& options = {});
double spectral_radius(const Eigen::SparseMatrix<double, Eigen::RowMajor>& matrix,
                       const SpectralOptions& options = {});

struct Reservoir {
    Eigen::SparseMatrix<double, Eigen::RowMajor> w_res;
    Eigen::MatrixX3d w_in;
    ReservoirSpec spec;
    SmallWorldGraph graph;
    std::size_t reseeds = 0;  // extra weight draws needed after a degenerate draw

    std::size_t nodes() const noexcept { return static_cast<std::size_t>(w_res.rows()); }
};

Reservoir build_reservoir(const ReservoirSpec& spec);

/// Drives the reservoir from a zero state and returns [mean of states after the
/// washout ; final state] (length 2n).
Eigen::VectorXd run_reservoir(const Reservoir& reservoir, const Window& window);

/// Column j is run_reservoir of window j.
Eigen::MatrixXd reservoir_features(const Reservoir& reservoir, const Dataset& dataset);

nlohmann::json reservoir_to_json(const Reservoir& reservoir);
Reservoir reservoir_from_json(const nlohmann::json& doc);

struct SeedRun {
    std::uint64_t seed = 0;
    double accuracy = 0.0;
    double lambda = 0.0;
    ConfusionMatrix confusion;
    double feature_seconds = 0.0;
    double train_seconds = 0.0;
    double predict_seconds = 0.0;
};

struct SweepPoint {
    std::size_t nodes = 0;
    std::vector<SeedRun> runs;
    double mean_accuracy = 0.0;
};

struct SweepOptions {
    std::vector<std::uint64_t> seeds{1, 2, 3};
    std::vector<double> lambdas{1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2};
    /// Called after each (nodes, seed) run; useful for progress output.
    std::function<void(const SweepPoint&, const SeedRun&)> on_run;
};

/// Accuracy as a function of reservoir size. For every node count and seed a
/// reservoir is built from `base` (nodes and seed overridden), both splits are
/// mapped to state features and the ridge readout is trained and evaluated.
std::vector<SweepPoint> node_sweep(const Dataset& train, const Dataset& test, const std::vector<std::size_t>& node_counts,
                                   const ReservoirSpec& base, const SweepOptions& options = {});

} // namespace ngrc
