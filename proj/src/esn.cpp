#include "ngrc/esn.hpp"

#include "ngrc/error.hpp"
#include "ngrc/random.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ngrc {

namespace {

using Index = Eigen::Index;
using SparseRM = Eigen::SparseMatrix<double, Eigen::RowMajor>;

constexpr std::uint64_t kWeightStream = 0x9E3779B97F4A7C15ULL;
constexpr std::size_t kMaxReseeds = 8;

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& block)
{
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(block);
    return qr.householderQ() * Eigen::MatrixXd::Identity(block.rows(), block.cols());
}

template <class Apply>
SpectralEstimate subspace_iteration(Index n, const Apply& apply, const SpectralOptions& options)
{
    SpectralEstimate est;
    if (n == 0) {
        est.converged = true;
        return est;
    }
    const Index m = std::min<Index>(n, static_cast<Index>(std::max<std::size_t>(options.block_size, 1)));

    Rng rng(options.seed);
    Eigen::MatrixXd q(n, m);
    for (Index j = 0; j < m; ++j) {
        for (Index i = 0; i < n; ++i) {
            q(i, j) = rng.uniform(-1.0, 1.0);
        }
    }
    q = orthonormal_basis(q);

    double previous = -1.0;
    std::size_t streak = 0;
    Eigen::MatrixXd z(n, m);
    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
        apply(q, z);
        const Eigen::MatrixXd h = q.transpose() * z;
        Eigen::EigenSolver<Eigen::MatrixXd> small(h, false);
        double ritz = 0.0;
        if (small.info() == Eigen::Success) {
            ritz = small.eigenvalues().cwiseAbs().maxCoeff();
        }
        if (!std::isfinite(ritz)) {
            raise(ErrorCode::NonFiniteInput, "spectral radius iteration produced non-finite values");
        }
        est.radius = ritz;
        est.iterations = it;

        const double znorm = z.norm();
        if (znorm == 0.0) {
            // A annihilates the whole block: the nilpotent part dominates, radius is 0.
            est.radius = 0.0;
            est.converged = true;
            return est;
        }
        const double change = std::abs(ritz - previous);
        streak = (previous >= 0.0 && change <= options.tolerance * std::max(ritz, 1e-300)) ? streak + 1 : 0;
        if (streak >= 3) {
            est.converged = true;
            return est;
        }
        previous = ritz;
        q = orthonormal_basis(z);
    }
    return est;
}

double require_converged(const SpectralEstimate& est)
{
    if (!est.converged) {
        std::ostringstream os;
        os.precision(17);
        os << "no convergence after " << est.iterations << " iterations; best estimate " << est.radius;
        raise(ErrorCode::NonConvergence, os.str());
    }
    return est.radius;
}

} // namespace

void ReservoirSpec::validate() const
{
    if (nodes == 0) {
        raise(ErrorCode::InvalidSpec, "reservoir needs at least one node");
    }
    if (2 * degree >= nodes) {
        raise(ErrorCode::InvalidDegree, "2k must be below the node count (k=" + std::to_string(degree) +
                                            ", n=" + std::to_string(nodes) + ")");
    }
    if (!(rewire >= 0.0 && rewire <= 1.0)) {
        raise(ErrorCode::InvalidProbability, "rewiring probability must lie in [0, 1]");
    }
    if (!(target_rho > 0.0) || !std::isfinite(target_rho)) {
        raise(ErrorCode::InvalidSpec, "target spectral radius must be positive");
    }
    if (!(input_scale > 0.0) || !std::isfinite(input_scale)) {
        raise(ErrorCode::InvalidSpec, "input scale must be positive");
    }
    if (!(leak_rate > 0.0 && leak_rate <= 1.0)) {
        raise(ErrorCode::InvalidSpec, "leak rate must lie in (0, 1]");
    }
}

nlohmann::json spec_to_json(const ReservoirSpec& spec)
{
    return {{"nodes", spec.nodes},           {"k", spec.degree},
            {"p", spec.rewire},              {"rho", spec.target_rho},
            {"input_scale", spec.input_scale}, {"leak_rate", spec.leak_rate},
            {"washout", spec.washout},       {"seed", spec.seed}};
}

ReservoirSpec spec_from_json(const nlohmann::json& doc)
{
    ReservoirSpec spec;
    spec.nodes = doc.at("nodes").get<std::size_t>();
    spec.degree = doc.at("k").get<std::size_t>();
    spec.rewire = doc.at("p").get<double>();
    spec.target_rho = doc.at("rho").get<double>();
    spec.input_scale = doc.at("input_scale").get<double>();
    spec.leak_rate = doc.at("leak_rate").get<double>();
    spec.washout = doc.at("washout").get<std::size_t>();
    spec.seed = doc.at("seed").get<std::uint64_t>();
    return spec;
}

std::vector<std::size_t> SmallWorldGraph::degrees() const
{
    std::vector<std::size_t> deg(nodes, 0);
    for (auto [a, b] : edges) {
        ++deg[a];
        ++deg[b];
    }
    return deg;
}

bool SmallWorldGraph::has_edge(std::uint32_t a, std::uint32_t b) const
{
    const auto key = std::make_pair(std::min(a, b), std::max(a, b));
    return std::binary_search(edges.begin(), edges.end(), key);
}

SmallWorldGraph build_small_world(std::size_t nodes, std::size_t degree, double rewire, std::uint64_t seed)
{
    if (2 * degree >= nodes) {
        raise(ErrorCode::InvalidDegree,
              "2k must be below n (k=" + std::to_string(degree) + ", n=" + std::to_string(nodes) + ")");
    }
    if (!(rewire >= 0.0 && rewire <= 1.0)) {
        raise(ErrorCode::InvalidProbability, "rewiring probability must lie in [0, 1]");
    }

    using Node = std::uint32_t;
    std::vector<std::vector<Node>> adjacency(nodes);
    auto connected = [&](Node a, Node b) {
        const auto& list = adjacency[a];
        return std::find(list.begin(), list.end(), b) != list.end();
    };
    auto link = [&](Node a, Node b) {
        adjacency[a].push_back(b);
        adjacency[b].push_back(a);
    };
    auto unlink = [&](Node a, Node b) {
        auto& la = adjacency[a];
        la.erase(std::find(la.begin(), la.end(), b));
        auto& lb = adjacency[b];
        lb.erase(std::find(lb.begin(), lb.end(), a));
    };

    for (std::size_t j = 1; j <= degree; ++j) {
        for (std::size_t u = 0; u < nodes; ++u) {
            link(static_cast<Node>(u), static_cast<Node>((u + j) % nodes));
        }
    }

    Rng rng(seed);
    for (std::size_t j = 1; j <= degree; ++j) {
        for (std::size_t ui = 0; ui < nodes; ++ui) {
            const auto u = static_cast<Node>(ui);
            const auto v = static_cast<Node>((ui + j) % nodes);
            if (!(rng.uniform01() < rewire)) {
                continue;
            }
            if (adjacency[u].size() >= nodes - 1) {
                continue;
            }
            Node w = 0;
            do {
                w = static_cast<Node>(rng.below(nodes));
            } while (w == u || connected(u, w));
            unlink(u, v);
            link(u, w);
        }
    }

    SmallWorldGraph graph;
    graph.nodes = nodes;
    for (std::size_t a = 0; a < nodes; ++a) {
        for (Node b : adjacency[a]) {
            if (a < b) {
                graph.edges.emplace_back(static_cast<Node>(a), b);
            }
        }
    }
    std::sort(graph.edges.begin(), graph.edges.end());
    return graph;
}

SpectralEstimate estimate_spectral_radius(const Eigen::MatrixXd& matrix, const SpectralOptions& options)
{
    if (matrix.rows() != matrix.cols()) {
        raise(ErrorCode::DimensionMismatch, "spectral radius needs a square matrix");
    }
    if (!matrix.allFinite()) {
        raise(ErrorCode::NonFiniteInput, "matrix has non-finite entries");
    }
    return subspace_iteration(
        matrix.rows(), [&](const Eigen::MatrixXd& q, Eigen::MatrixXd& z) { z.noalias() = matrix * q; }, options);
}

SpectralEstimate estimate_spectral_radius(const SparseRM& matrix, const SpectralOptions& options)
{
    if (matrix.rows() != matrix.cols()) {
        raise(ErrorCode::DimensionMismatch, "spectral radius needs a square matrix");
    }
    for (Index k = 0; k < matrix.nonZeros(); ++k) {
        if (!std::isfinite(matrix.valuePtr()[k])) {
            raise(ErrorCode::NonFiniteInput, "matrix has non-finite entries");
        }
    }
    return subspace_iteration(
        matrix.rows(), [&](const Eigen::MatrixXd& q, Eigen::MatrixXd& z) { z.noalias() = matrix * q; }, options);
}

double spectral_radius(const Eigen::MatrixXd& matrix, const SpectralOptions& options)
{
    return require_converged(estimate_spectral_radius(matrix, options));
}

double spectral_radius(const SparseRM& matrix, const SpectralOptions& options)
{
    return require_converged(estimate_spectral_radius(matrix, options));
}

Reservoir build_reservoir(const ReservoirSpec& spec)
{
    spec.validate();
    Reservoir reservoir;
    reservoir.spec = spec;
    reservoir.graph = build_small_world(spec.nodes, spec.degree, spec.rewire, spec.seed);

    const auto n = static_cast<Index>(spec.nodes);
    Rng rng(spec.seed ^ kWeightStream);
    for (std::size_t attempt = 0; attempt <= kMaxReseeds; ++attempt) {
        std::vector<Eigen::Triplet<double>> triplets;
        triplets.reserve(2 * reservoir.graph.edge_count());
        for (auto [a, b] : reservoir.graph.edges) {
            triplets.emplace_back(a, b, rng.uniform(-1.0, 1.0));
            triplets.emplace_back(b, a, rng.uniform(-1.0, 1.0));
        }
        SparseRM w(n, n);
        w.setFromTriplets(triplets.begin(), triplets.end());
        w.makeCompressed();

        const double rho = spectral_radius(w);
        if (rho > 0.0 && std::isfinite(rho)) {
            w *= spec.target_rho / rho;
            reservoir.w_res = std::move(w);
            reservoir.reseeds = attempt;
            break;
        }
        if (attempt == kMaxReseeds) {
            raise(ErrorCode::ZeroSpectralRadius,
                  "reservoir weights have zero spectral radius after " + std::to_string(kMaxReseeds + 1) + " draws");
        }
    }

    reservoir.w_in.resize(n, 3);
    for (Index i = 0; i < n; ++i) {
        for (Index a = 0; a < 3; ++a) {
            reservoir.w_in(i, a) = rng.uniform(-spec.input_scale, spec.input_scale);
        }
    }
    return reservoir;
}

Eigen::VectorXd run_reservoir(const Reservoir& reservoir, const Window& window)
{
    validate_window(window);
    const auto& spec = reservoir.spec;
    const auto steps = static_cast<Index>(window.steps());
    if (static_cast<Index>(spec.washout) >= steps) {
        raise(ErrorCode::InvalidSpec, "washout " + std::to_string(spec.washout) + " must be below the window length " +
                                          std::to_string(steps));
    }
    const Index n = reservoir.w_res.rows();
    const double leak = spec.leak_rate;

    Eigen::VectorXd state = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd drive(n);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
    for (Index t = 0; t < steps; ++t) {
        drive.noalias() = reservoir.w_res * state;
        drive.noalias() += reservoir.w_in * window.samples.col(t);
        if (leak == 1.0) {
            state = drive.array().tanh();
        } else {
            state = (1.0 - leak) * state.array() + leak * drive.array().tanh();
        }
        if (!state.allFinite()) {
            raise(ErrorCode::NonFiniteState, "reservoir state diverged at time step " + std::to_string(t + 1));
        }
        // Time step t+1 contributes to the mean once it is past the washout.
        if (t + 1 > static_cast<Index>(spec.washout)) {
            sum += state;
        }
    }

    Eigen::VectorXd features(2 * n);
    features.head(n) = sum / static_cast<double>(steps - static_cast<Index>(spec.washout));
    features.tail(n) = state;
    return features;
}

Eigen::MatrixXd reservoir_features(const Reservoir& reservoir, const Dataset& dataset)
{
    const auto n = static_cast<Index>(reservoir.nodes());
    Eigen::MatrixXd out(2 * n, static_cast<Index>(dataset.size()));
    for (std::size_t j = 0; j < dataset.size(); ++j) {
        out.col(static_cast<Index>(j)) = run_reservoir(reservoir, dataset.windows[j]);
    }
    return out;
}

nlohmann::json reservoir_to_json(const Reservoir& reservoir)
{
    nlohmann::json entries = nlohmann::json::array();
    for (Index r = 0; r < reservoir.w_res.outerSize(); ++r) {
        for (SparseRM::InnerIterator it(reservoir.w_res, r); it; ++it) {
            entries.push_back({it.row(), it.col(), it.value()});
        }
    }
    nlohmann::json w_in = nlohmann::json::array();
    for (Index i = 0; i < reservoir.w_in.rows(); ++i) {
        w_in.push_back({reservoir.w_in(i, 0), reservoir.w_in(i, 1), reservoir.w_in(i, 2)});
    }
    nlohmann::json edges = nlohmann::json::array();
    for (auto [a, b] : reservoir.graph.edges) {
        edges.push_back({a, b});
    }
    return {{"format", "ngrc-reservoir"}, {"version", 1},      {"spec", spec_to_json(reservoir.spec)},
            {"edges", edges},             {"w_res", entries}, {"w_in", w_in},
            {"reseeds", reservoir.reseeds}};
}

Reservoir reservoir_from_json(const nlohmann::json& doc)
{
    try {
        if (doc.at("format").get<std::string>() != "ngrc-reservoir" || doc.at("version").get<int>() != 1) {
            raise(ErrorCode::InvalidConfig, "unsupported reservoir format");
        }
        Reservoir r;
        r.spec = spec_from_json(doc.at("spec"));
        r.spec.validate();
        r.reseeds = doc.at("reseeds").get<std::size_t>();
        const auto n = static_cast<Index>(r.spec.nodes);
        r.graph.nodes = r.spec.nodes;
        for (const auto& e : doc.at("edges")) {
            r.graph.edges.emplace_back(e.at(0).get<std::uint32_t>(), e.at(1).get<std::uint32_t>());
        }
        std::vector<Eigen::Triplet<double>> triplets;
        for (const auto& e : doc.at("w_res")) {
            triplets.emplace_back(e.at(0).get<Index>(), e.at(1).get<Index>(), e.at(2).get<double>());
        }
        r.w_res.resize(n, n);
        r.w_res.setFromTriplets(triplets.begin(), triplets.end());
        r.w_res.makeCompressed();
        const auto& w_in = doc.at("w_in");
        if (static_cast<Index>(w_in.size()) != n) {
            raise(ErrorCode::DimensionMismatch, "w_in row count disagrees with the node count");
        }
        r.w_in.resize(n, 3);
        for (Index i = 0; i < n; ++i) {
            for (Index a = 0; a < 3; ++a) {
                r.w_in(i, a) = w_in.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(a)).get<double>();
            }
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::InvalidConfig, std::string("malformed reservoir: ") + e.what());
    }
}

} // namespace ngrc
