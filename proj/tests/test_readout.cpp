#include "ngrc/error.hpp"
#include "ngrc/readout.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>

using namespace ngrc;

namespace {

FeatureMatrix raw(Eigen::MatrixXd values)
{
    FeatureMatrix m;
    m.values = std::move(values);
    return m;
}

TargetMatrix random_targets(std::mt19937_64& gen, int classes, Eigen::Index samples)
{
    std::vector<int> labels(static_cast<std::size_t>(samples));
    std::uniform_int_distribution<int> pick(1, classes);
    for (auto& l : labels) l = pick(gen);
    return one_hot(labels, classes);
}

} // namespace

TEST_CASE("ridge matches gradient descent on a small problem")
{
    std::mt19937_64 gen(5);
    std::normal_distribution<double> g;
    Eigen::MatrixXd o(5, 8);
    for (auto& v : o.reshaped()) v = g(gen);
    const auto y = random_targets(gen, 3, 8);
    const auto model = train_readout(raw(o), y, 0.1);
    const auto oracle = testing::ridge_gradient_descent(o, y.values, 0.1);
    CHECK(testing::relative_frobenius(model.w_out, oracle) < 1e-6);
}

TEST_CASE("ridge matches long-double normal equations on random instances")
{
    std::mt19937_64 gen(2024);
    std::normal_distribution<double> g;
    const double lambdas[] = {0.0, 0.1, 10.0};
    for (int inst = 0; inst < 50; ++inst) {
        const int n = 1 + static_cast<int>(gen() % 10);
        const int m = n + static_cast<int>(gen() % static_cast<unsigned>(21 - n));
        const int s = 1 + static_cast<int>(gen() % 4);
        const double lambda = lambdas[inst % 3];
        Eigen::MatrixXd o(n, m);
        for (auto& v : o.reshaped()) v = g(gen);
        const auto y = random_targets(gen, s, m);
        const auto model = train_readout(raw(o), y, lambda);
        const auto oracle = testing::ridge_normal_equations(o, y.values, lambda);
        CAPTURE(inst);
        CHECK(testing::relative_frobenius(model.w_out, oracle) < 1e-8);
    }
}

TEST_CASE("readout norm shrinks as lambda grows")
{
    std::mt19937_64 gen(9);
    std::normal_distribution<double> g;
    Eigen::MatrixXd o(6, 30);
    for (auto& v : o.reshaped()) v = g(gen);
    const auto y = random_targets(gen, 4, 30);
    double previous = std::numeric_limits<double>::infinity();
    for (double lambda : {1e-3, 1.0, 1e3}) {
        const double norm = train_readout(raw(o), y, lambda).w_out.norm();
        CHECK(norm < previous);
        previous = norm;
    }
}

TEST_CASE("ridge solution satisfies the normal equations")
{
    std::mt19937_64 gen(17);
    std::normal_distribution<double> g;
    Eigen::MatrixXd o(7, 25);
    for (auto& v : o.reshaped()) v = g(gen);
    const auto y = random_targets(gen, 3, 25);
    const double lambda = 0.5;
    const auto w = train_readout(raw(o), y, lambda).w_out;
    const Eigen::MatrixXd residual = w * (o * o.transpose() + lambda * Eigen::MatrixXd::Identity(7, 7)) -
                                     y.values * o.transpose();
    CHECK(residual.norm() < 1e-10 * (y.values * o.transpose()).norm());
}

TEST_CASE("sample permutation leaves the readout unchanged")
{
    std::mt19937_64 gen(23);
    std::normal_distribution<double> g;
    Eigen::MatrixXd o(5, 20);
    for (auto& v : o.reshaped()) v = g(gen);
    const auto y = random_targets(gen, 3, 20);
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(20);
    perm.setIdentity();
    std::shuffle(perm.indices().data(), perm.indices().data() + 20, gen);
    const auto a = train_readout(raw(o), y, 0.01).w_out;
    TargetMatrix yp{y.values * perm};
    const auto b = train_readout(raw(o * perm), yp, 0.01).w_out;
    CHECK(testing::relative_frobenius(b, a) < 1e-12);
}

TEST_CASE("common rescaling of features and lambda keeps decisions")
{
    std::mt19937_64 gen(31);
    std::normal_distribution<double> g;
    Eigen::MatrixXd o(8, 60), test(8, 40);
    for (auto& v : o.reshaped()) v = g(gen);
    for (auto& v : test.reshaped()) v = g(gen);
    const auto y = random_targets(gen, 4, 60);
    const double c = 7.0;
    const auto a = train_readout(raw(o), y, 0.3);
    const auto b = train_readout(raw(c * o), y, 0.3 * c * c);
    CHECK(classify(a.w_out * test) == classify(b.w_out * (c * test)));
}

TEST_CASE("lambda zero on a rank-deficient system is singular")
{
    Eigen::MatrixXd o(3, 10);
    o.setOnes();
    const auto y = one_hot(std::vector<int>(10, 1), 2);
    try {
        train_readout(raw(o), y, 0.0);
        FAIL("expected SingularSystem");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingularSystem);
        CHECK(e.error_class() == ErrorClass::Numeric);
    }
    CHECK_NOTHROW(train_readout(raw(o), y, 1e-3));
}

TEST_CASE("non-finite and mismatched inputs")
{
    Eigen::MatrixXd o = Eigen::MatrixXd::Ones(2, 3);
    o(0, 0) = std::nan("");
    const auto y = one_hot(std::vector<int>{1, 2, 1}, 2);
    CHECK_THROWS_AS(train_readout(raw(o), y, 1.0), Error);
    CHECK_THROWS_AS(train_readout(raw(Eigen::MatrixXd::Ones(2, 4)), y, 1.0), Error);
}

TEST_CASE("one-hot round trip")
{
    const std::vector<int> labels{1, 4, 6, 2, 2, 5, 3};
    const auto t = one_hot(labels, 6);
    CHECK(t.classes() == 6);
    CHECK(t.values.colwise().sum().isOnes(0.0));
    CHECK(classify(t.values) == labels);
    CHECK_THROWS_AS(one_hot(std::vector<int>{0}, 6), Error);
    CHECK_THROWS_AS(one_hot(std::vector<int>{7}, 6), Error);
}

TEST_CASE("classify ties and non-finite scores")
{
    Eigen::MatrixXd s(3, 2);
    s << 1, 0,
         1, 2,
         0, 2;
    CHECK(classify(s) == std::vector<int>{1, 2});
    s(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(classify(s), Error);
}

TEST_CASE("model json round trip and layout check")
{
    std::mt19937_64 gen(3);
    std::normal_distribution<double> g;
    Eigen::MatrixXd o(4, 12);
    for (auto& v : o.reshaped()) v = g(gen);
    FeatureMatrix f = raw(o);
    f.layout.blocks.push_back({"lin", 0, 4, 1.0});
    const auto model = train_readout(f, random_targets(gen, 3, 12), 0.1, {"a", "b", "c"});

    const auto path = std::filesystem::temp_directory_path() / "ngrc_model_test.json";
    save_model(path, model);
    const auto back = load_model(path);
    std::filesystem::remove(path);
    CHECK(back.w_out == model.w_out);
    CHECK(back.lambda == model.lambda);
    CHECK(back.layout == model.layout);
    CHECK(back.class_names == model.class_names);

    FeatureMatrix other = f;
    other.layout.blocks[0].name = "nlq";
    CHECK_THROWS_AS(predict_scores(model, other), Error);
}
