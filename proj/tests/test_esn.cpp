#include "ngrc/error.hpp"
#include "ngrc/esn.hpp"

#include "support/oracles.hpp"
#include "support/synthetic.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace ngrc;

TEST_CASE("p = 0 gives the ring lattice")
{
    const auto g = build_small_world(20, 3, 0.0, 1);
    CHECK(g.edge_count() == 60);
    for (std::uint32_t u = 0; u < 20; ++u) {
        for (std::uint32_t j = 1; j <= 3; ++j) {
            CHECK(g.has_edge(u, (u + j) % 20));
        }
    }
    for (auto d : g.degrees()) CHECK(d == 6);
}

TEST_CASE("edge count is n k for random draws")
{
    std::mt19937_64 gen(77);
    for (int draw = 0; draw < 20; ++draw) {
        const std::size_t k = 1 + gen() % 5;
        const std::size_t n = 2 * k + 1 + gen() % 200;
        const double p = static_cast<double>(gen() % 1001) / 1000.0;
        const auto g = build_small_world(n, k, p, gen());
        CAPTURE(n);
        CAPTURE(k);
        CAPTURE(p);
        CHECK(g.edge_count() == n * k);
        std::set<std::pair<std::uint32_t, std::uint32_t>> unique(g.edges.begin(), g.edges.end());
        CHECK(unique.size() == g.edges.size());
        for (auto [a, b] : g.edges) CHECK(a < b);
    }
}

TEST_CASE("p = 1 leaves few ring edges")
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const std::size_t n = 1000, k = 4;
        const auto g = build_small_world(n, k, 1.0, seed);
        std::size_t ring = 0;
        for (auto [a, b] : g.edges) {
            const auto gap = std::min<std::size_t>(b - a, n - (b - a));
            if (gap <= k) ++ring;
        }
        CHECK(static_cast<double>(ring) / static_cast<double>(g.edge_count()) < 0.02);
    }
}

TEST_CASE("graph argument validation")
{
    CHECK_THROWS_AS(build_small_world(8, 4, 0.1, 1), Error);
    CHECK_THROWS_AS(build_small_world(20, 2, 1.5, 1), Error);
    CHECK(build_small_world(20, 2, 0.3, 5).edges == build_small_world(20, 2, 0.3, 5).edges);
}

TEST_CASE("spectral radius of small known matrices")
{
    Eigen::MatrixXd d = Eigen::Vector3d(1, -3, 2).asDiagonal();
    CHECK(spectral_radius(d) == doctest::Approx(3.0).epsilon(1e-12));

    Eigen::MatrixXd rot(2, 2);
    rot << 0, -1,
           1, 0;
    CHECK(spectral_radius(rot) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spectral radius agrees with a dense eigensolver")
{
    std::mt19937_64 gen(4242);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXd m(50, 50);
        for (auto& v : m.reshaped()) v = u(gen);
        const double expected = testing::dense_spectral_radius(m);
        CHECK(std::abs(spectral_radius(m) - expected) <= 1e-8 * expected);
        const Eigen::SparseMatrix<double, Eigen::RowMajor> sparse = m.sparseView();
        CHECK(std::abs(spectral_radius(sparse) - expected) <= 1e-8 * expected);
    }
}

TEST_CASE("built reservoir hits the target radius")
{
    for (double target : {1.0, 8.41}) {
        ReservoirSpec spec;
        spec.nodes = 200;
        spec.target_rho = target;
        spec.seed = 3;
        const auto r = build_reservoir(spec);
        const double rho = testing::dense_spectral_radius(Eigen::MatrixXd(r.w_res));
        CHECK(std::abs(rho - target) / target <= 1e-6);
        CHECK(r.w_res.nonZeros() == static_cast<Eigen::Index>(2 * r.graph.edge_count()));
        CHECK(r.w_in.rows() == 200);
        CHECK(r.w_in.cwiseAbs().maxCoeff() <= spec.input_scale);
    }
}

TEST_CASE("reservoir runs are deterministic and bounded")
{
    ReservoirSpec spec;
    spec.nodes = 100;
    const auto r = build_reservoir(spec);
    const auto d = testing::synthetic_har(2, 128, Split::Train, 5);
    const auto a = run_reservoir(r, d.windows[0]);
    CHECK(a.size() == 200);
    CHECK(a == run_reservoir(build_reservoir(spec), d.windows[0]));
    CHECK(a.cwiseAbs().maxCoeff() < 1.0);

    Window zero;
    zero.samples = Eigen::Matrix3Xd::Zero(3, 128);
    CHECK(run_reservoir(r, zero).isZero(0.0));

    const auto m = reservoir_features(r, d);
    CHECK(m.cols() == 2);
    CHECK(m.col(1) == run_reservoir(r, d.windows[1]));
}

TEST_CASE("memoryless reservoir is tanh of the input drive")
{
    ReservoirSpec spec;
    spec.nodes = 30;
    auto r = build_reservoir(spec);
    r.w_res.setZero();
    const auto d = testing::synthetic_har(1, 16, Split::Train, 8);
    const auto& s = d.windows[0].samples;
    const auto f = run_reservoir(r, d.windows[0]);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(30);
    for (Eigen::Index t = 8; t < 16; ++t) {
        mean += (r.w_in * s.col(t)).array().tanh().matrix();
    }
    mean /= 8.0;
    CHECK((f.head(30) - mean).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((f.tail(30) - (r.w_in * s.col(15)).array().tanh().matrix()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("invalid specs")
{
    ReservoirSpec spec;
    spec.leak_rate = 0.0;
    CHECK_THROWS_AS(spec.validate(), Error);
    spec = {};
    spec.nodes = 50;
    spec.washout = 200;
    const auto r = build_reservoir([] {
        ReservoirSpec s;
        s.nodes = 50;
        return s;
    }());
    Reservoir bad = r;
    bad.spec.washout = 128;
    Window w;
    w.samples = Eigen::Matrix3Xd::Ones(3, 128);
    CHECK_THROWS_AS(run_reservoir(bad, w), Error);
}

TEST_CASE("spec and reservoir json round trip")
{
    ReservoirSpec spec;
    spec.nodes = 40;
    spec.seed = 9;
    CHECK(spec_from_json(spec_to_json(spec)) == spec);
    const auto r = build_reservoir(spec);
    const auto back = reservoir_from_json(reservoir_to_json(r));
    CHECK(Eigen::MatrixXd(back.w_res) == Eigen::MatrixXd(r.w_res));
    CHECK(back.w_in == r.w_in);
}

TEST_CASE("node sweep on synthetic data")
{
    const auto train = testing::synthetic_har(120, 32, Split::Train, 1);
    const auto test = testing::synthetic_har(60, 32, Split::Test, 2);
    ReservoirSpec base;
    SweepOptions opts;
    opts.seeds = {1, 2};
    const auto points = node_sweep(train, test, {20, 40}, base, opts);
    REQUIRE(points.size() == 2);
    CHECK(points[1].nodes == 40);
    CHECK(points[0].runs.size() == 2);
    CHECK(points[0].runs[0].confusion.total() == 60);
    CHECK(points[0].mean_accuracy == doctest::Approx((points[0].runs[0].accuracy + points[0].runs[1].accuracy) / 2));
    CHECK_THROWS_AS(node_sweep(train, test, {}, base, opts), Error);
}
