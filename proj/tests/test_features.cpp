#include "ngrc/error.hpp"
#include "ngrc/features.hpp"

#include "support/synthetic.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

using namespace ngrc;
using F = FeatureFamily;

namespace {

Window make_window(std::initializer_list<double> x, std::initializer_list<double> y, std::initializer_list<double> z)
{
    Window w;
    w.samples.resize(3, static_cast<Eigen::Index>(x.size()));
    Eigen::Index t = 0;
    for (double v : x) w.samples(0, t++) = v;
    t = 0;
    for (double v : y) w.samples(1, t++) = v;
    t = 0;
    for (double v : z) w.samples(2, t++) = v;
    return w;
}

// Sample (a, t) gets the (a*T + t)-th prime so that every product identifies its monomial.
Window prime_window(Eigen::Index steps)
{
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47};
    Window w;
    w.samples.resize(3, steps);
    for (Eigen::Index a = 0; a < 3; ++a) {
        for (Eigen::Index t = 0; t < steps; ++t) {
            w.samples(a, t) = primes[a * steps + t];
        }
    }
    return w;
}

std::multiset<long> as_multiset(const Eigen::VectorXd& v)
{
    std::multiset<long> out;
    for (double x : v) out.insert(std::lround(x));
    return out;
}

} // namespace

TEST_CASE("family dimensions at T=128")
{
    CHECK(family_dimension(F::Lin, 128) == 384);
    CHECK(family_dimension(F::Nls, 128) == 381);
    CHECK(family_dimension(F::Nlq, 128) == 384);
    CHECK(family_dimension(F::Nlcq, 128) == 384);
    CHECK(family_dimension(F::Nlcs, 128) == 762);
    CHECK(family_dimension(F::Nlt, 128) == 128);
    CHECK(family_dimension(F::Nlcq, 2) == 6);

    std::size_t all = 0;
    for (auto f : kAllFamilies) all += family_dimension(f, 128);
    CHECK(all == 2423);

    const auto layout = make_layout(FeatureConfig::uniform(named_feature_set(1)), 128);
    CHECK(layout.dimension() == 2039);
    CHECK(make_layout(FeatureConfig::uniform(named_feature_set(10)), 128).dimension() == 2423);
    CHECK(make_layout(FeatureConfig::uniform(named_feature_set(1), true), 128).dimension() == 2040);
}

TEST_CASE("family dimension rejects bad shapes")
{
    CHECK_THROWS_AS(family_dimension(F::Lin, 128, 2), Error);
    CHECK_THROWS_AS(family_dimension(F::Nls, 1), Error);
}

TEST_CASE("monomial families match brute-force enumeration")
{
    for (Eigen::Index steps = 2; steps <= 4; ++steps) {
        const auto w = prime_window(steps);
        auto var = [&](int a, int t) { return std::lround(w.samples(a, t)); };

        std::multiset<long> nlcs, nls, nlcq, nlt;
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                for (int t = 0; t < steps; ++t) {
                    for (int s = 0; s < steps; ++s) {
                        if (a < b && std::abs(t - s) == 1) nlcs.insert(var(a, t) * var(b, s));
                        if (a == b && t == s + 1) nls.insert(var(a, t) * var(a, s));
                        if (a < b && t == s) nlcq.insert(var(a, t) * var(b, t));
                    }
                }
            }
        }
        for (int t = 0; t < steps; ++t) nlt.insert(var(0, t) * var(1, t) * var(2, t));

        CAPTURE(steps);
        CHECK(std::set<long>(nlcs.begin(), nlcs.end()).size() == nlcs.size());
        CHECK(as_multiset(gen_family(w, F::Nlcs)) == nlcs);
        CHECK(nlcs.size() == family_dimension(F::Nlcs, static_cast<std::size_t>(steps)));
        CHECK(as_multiset(gen_family(w, F::Nls)) == nls);
        CHECK(as_multiset(gen_family(w, F::Nlcq)) == nlcq);
        CHECK(as_multiset(gen_family(w, F::Nlt)) == nlt);
    }
}

TEST_CASE("family examples")
{
    Window ones;
    ones.samples = Eigen::Matrix3Xd::Ones(3, 128);
    CHECK(gen_family(ones, F::Nlq) == Eigen::VectorXd::Ones(384));

    const auto w = make_window({2, 3}, {0, 0}, {0, 0});
    CHECK(gen_family(w, F::Nls) == Eigen::Vector3d(6, 0, 0));

    const auto v = make_window({1, 2}, {3, 4}, {5, 6});
    CHECK(gen_family(v, F::Nlt) == Eigen::Vector2d(48, 15));
    CHECK(gen_family(v, F::Lin) == (Eigen::VectorXd(6) << 2, 1, 4, 3, 6, 5).finished());
    // pairs (x,y), (y,z), (x,z); a_i b_{i-1} then a_{i-1} b_i
    CHECK(gen_family(v, F::Nlcs) ==
          (Eigen::VectorXd(6) << 2 * 3, 1 * 4, 4 * 5, 3 * 6, 2 * 5, 1 * 6).finished());
}

TEST_CASE("homogeneity of every family")
{
    const auto d = testing::synthetic_har(3, 12, Split::Train, 7);
    for (const auto& w : d.windows) {
        for (double c : {-2.0, 0.5, 3.0}) {
            Window scaled = w;
            scaled.samples *= c;
            for (auto f : kAllFamilies) {
                const double factor = std::pow(c, family_degree(f));
                const Eigen::VectorXd expected = factor * gen_family(w, f);
                const Eigen::VectorXd got = gen_family(scaled, f);
                CHECK((got - expected).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + expected.cwiseAbs().maxCoeff()));
            }
        }
    }
}

TEST_CASE("zero window gives zero features and bias stays one")
{
    Window zero;
    zero.samples = Eigen::Matrix3Xd::Zero(3, 128);
    auto cfg = FeatureConfig::uniform(named_feature_set(10), true);
    const auto v = build_feature_vector(zero, cfg);
    REQUIRE(v.size() == 2424);
    CHECK(v.head(2423).isZero(0.0));
    CHECK(v[2423] == 1.0);
}

TEST_CASE("weights scale exactly one block")
{
    const auto d = testing::synthetic_har(1, 128, Split::Train, 3);
    auto cfg = FeatureConfig::uniform(named_feature_set(1));
    const auto base = build_feature_vector(d.windows[0], cfg);
    cfg.set_weight(F::Nlq, 2.0);
    const auto doubled = build_feature_vector(d.windows[0], cfg);
    const auto layout = make_layout(cfg, 128);
    const auto* nlq = layout.find("nlq");
    REQUIRE(nlq != nullptr);
    for (Eigen::Index i = 0; i < base.size(); ++i) {
        const bool inside = static_cast<std::size_t>(i) >= nlq->offset &&
                            static_cast<std::size_t>(i) < nlq->offset + nlq->length;
        CHECK(doubled[i] == (inside ? 2.0 * base[i] : base[i]));
    }
}

TEST_CASE("feature vectors are deterministic and ordered canonically")
{
    const auto d = testing::synthetic_har(2, 16, Split::Train, 11);
    FeatureConfig cfg;
    cfg.families = {F::Nlt, F::Lin, F::Nls};
    cfg.normalize();
    const auto layout = make_layout(cfg, 16);
    REQUIRE(layout.blocks.size() == 3);
    CHECK(layout.blocks[0].name == "lin");
    CHECK(layout.blocks[1].name == "nls");
    CHECK(layout.blocks[2].name == "nlt");
    CHECK(build_feature_vector(d.windows[1], cfg) == build_feature_vector(d.windows[1], cfg));

    const auto m = build_feature_matrix(d, cfg);
    CHECK(m.sample_count() == 2);
    CHECK(m.values.col(1) == build_feature_vector(d.windows[1], cfg));
}

TEST_CASE("named feature sets")
{
    CHECK(named_feature_set(9) == std::vector<F>{F::Lin, F::Nlcq});
    CHECK(named_feature_set(8) == std::vector<F>{F::Lin});
    CHECK(named_feature_set(10).size() == 6);
    CHECK_THROWS_AS(named_feature_set(0), Error);
    CHECK_THROWS_AS(named_feature_set(11), Error);
    CHECK(parse_feature_set("#3") == named_feature_set(3));
    CHECK(parse_feature_set("lin+nls") == named_feature_set(7));
    CHECK(parse_feature_set("lin,nlc") == std::vector<F>{F::Lin, F::Nlt});
    CHECK(feature_set_label(named_feature_set(9)) == "lin+nlcq");
}

TEST_CASE("config validation")
{
    FeatureConfig empty;
    CHECK_THROWS_AS(empty.validate(), Error);
    auto cfg = FeatureConfig::uniform({F::Lin});
    cfg.lambda = -1.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("heterogeneous windows are rejected")
{
    auto d = testing::synthetic_har(2, 16, Split::Train, 1);
    d.windows[1].samples.conservativeResize(3, 12);
    try {
        common_steps(d);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::HeterogeneousWindows);
    }
}

TEST_CASE("feature csv header")
{
    const auto d = testing::synthetic_har(2, 4, Split::Train, 1);
    const auto m = build_feature_matrix(d, FeatureConfig::uniform({F::Lin}));
    std::ostringstream out;
    write_feature_csv(out, m);
    CHECK(out.str().rfind("# rows=", 0) == 0);
}
