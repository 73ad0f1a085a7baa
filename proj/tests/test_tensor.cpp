#include <doctest.h>

#include <cmath>

#include "girnet/params.hpp"
#include "girnet/tensor.hpp"

using namespace girnet;

namespace {

// Independent oracle: triple-loop matrix product, no Eigen involved.
Tensor matmul_naive(const Tensor& a, const Tensor& b) {
    Tensor out({a.rows(), b.cols()});
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (Index k = 0; k < a.cols(); ++k) acc += a.at(i, k) * b.at(k, j);
            out.at(i, j) = acc;
        }
    return out;
}

} // namespace

TEST_CASE("matmul identity and hand arithmetic") {
    Tensor eye = Tensor::matrix({{1, 0}, {0, 1}});
    Tensor v = Tensor::matrix({{3}, {4}});
    Tensor r = matmul(eye, v);
    CHECK(r.at(0, 0) == 3.0);
    CHECK(r.at(1, 0) == 4.0);

    Tensor a = Tensor::matrix({{1, 2}});
    Tensor b = Tensor::matrix({{3}, {4}});
    CHECK(matmul(a, b).at(0, 0) == 11.0);
}

TEST_CASE("matmul matches naive triple loop on random inputs") {
    Rng rng(7);
    for (int round = 0; round < 20; ++round) {
        const Index p = rng.uniform_int(1, 16);
        const Index q = rng.uniform_int(1, 16);
        const Index r = rng.uniform_int(1, 16);
        Tensor a({p, q}), b({q, r});
        for (Index i = 0; i < a.size(); ++i) a[i] = rng.uniform(-2.0, 2.0);
        for (Index i = 0; i < b.size(); ++i) b[i] = rng.uniform(-2.0, 2.0);
        Tensor got = matmul(a, b);
        Tensor want = matmul_naive(a, b);
        for (Index i = 0; i < got.size(); ++i) CHECK(std::fabs(got[i] - want[i]) < 1e-12);
    }
}

TEST_CASE("matmul shape mismatch names both shapes") {
    Tensor a({2, 3}), b({4, 2});
    CHECK_THROWS_WITH_AS(matmul(a, b), doctest::Contains("[2x3]"), DimensionError);
}

TEST_CASE("matrix-vector product gives rank-1 result") {
    Tensor a = Tensor::matrix({{1, 2}, {3, 4}});
    Tensor x = Tensor::vector({1, 1});
    Tensor r = matmul(a, x);
    CHECK(r.rank() == 1);
    CHECK(r[0] == 3.0);
    CHECK(r[1] == 7.0);
}

TEST_CASE("sigmoid and tanh basics") {
    CHECK(sigmoid(Tensor::scalar(0.0))[0] == 0.5);
    CHECK(girnet::tanh(Tensor::scalar(0.0))[0] == 0.0);
    for (double x : {-2.0, -1.0, 0.5}) {
        const double lhs = sigmoid(Tensor::scalar(-x))[0];
        const double rhs = 1.0 - sigmoid(Tensor::scalar(x))[0];
        CHECK(std::fabs(lhs - rhs) < 1e-15);
    }
}

TEST_CASE("softmax analytic values and stability") {
    Tensor a = softmax(Tensor::vector({0, 0}));
    CHECK(a[0] == doctest::Approx(0.5).epsilon(1e-12));

    Tensor b = softmax(Tensor::vector({std::log(2.0), 0, 0}));
    CHECK(b[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(b[1] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(b[2] == doctest::Approx(0.25).epsilon(1e-12));

    Tensor c = softmax(Tensor::vector({1000, 0}));
    CHECK(c.all_finite());
    CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("softmax is a probability vector for arbitrary logits") {
    Rng rng(13);
    for (int round = 0; round < 200; ++round) {
        const Index k = rng.uniform_int(1, 9);
        Tensor x({k});
        const bool extreme = (round % 4 == 0);
        const double mag = extreme ? 1e3 : 5.0;
        for (Index i = 0; i < k; ++i) x[i] = rng.uniform(-mag, mag);
        Tensor p = softmax(x);
        double sum = 0.0;
        for (Index i = 0; i < k; ++i) {
            // exp of a hugely negative shifted logit rounds to the nearest
            // representable double, which is 0; moderate logits stay strictly
            // inside (0, 1).
            if (extreme)
                CHECK(p[i] >= 0.0);
            else
                CHECK(p[i] > 0.0);
            CHECK(p[i] < 1.0 + 1e-12);
            sum += p[i];
        }
        CHECK(std::fabs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("softmax_columns matches per-column softmax") {
    Tensor x = Tensor::matrix({{1, 1000}, {0, 0}});
    Tensor p = softmax_columns(x);
    Tensor c0 = softmax(Tensor::vector({1, 0}));
    CHECK(p.at(0, 0) == doctest::Approx(c0[0]).epsilon(1e-15));
    CHECK(p.at(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("apply_mask zeroes masked rows only") {
    Tensor states = Tensor::matrix({{1, 2}, {3, 4}, {5, 6}});
    Tensor id = apply_mask(states, Tensor::vector({1, 1, 1}));
    for (Index i = 0; i < states.size(); ++i) CHECK(id[i] == states[i]);

    Tensor zeroed = apply_mask(states, Tensor::vector({0, 0, 0}));
    for (Index i = 0; i < zeroed.size(); ++i) CHECK(zeroed[i] == 0.0);

    Tensor partial = apply_mask(states, Tensor::vector({1, 0, 1}));
    CHECK(partial.at(1, 0) == 0.0);
    CHECK(partial.at(1, 1) == 0.0);
    CHECK(partial.at(0, 1) == 2.0);
    CHECK(partial.at(2, 0) == 5.0);

    CHECK_THROWS_AS(apply_mask(states, Tensor::vector({1, 0.5, 1})), ContractError);
}

TEST_CASE("init_param schemes") {
    Rng rng(3);
    Tensor z = init_param({3}, InitScheme::Zeros, rng);
    CHECK(z[0] == 0.0);
    CHECK(z[2] == 0.0);

    Tensor o = init_param({2, 2}, InitScheme::Ones, rng);
    CHECK(o[3] == 1.0);

    // fan_in = fan_out = 3 gives bound exactly 1
    Tensor u = init_param({3}, InitScheme::ScaledUniform, rng);
    for (Index i = 0; i < u.size(); ++i) {
        CHECK(u[i] >= -1.0);
        CHECK(u[i] <= 1.0);
    }

    Rng r1(42), r2(42);
    Tensor a = init_param({4, 5}, InitScheme::ScaledUniform, r1);
    Tensor b = init_param({4, 5}, InitScheme::ScaledUniform, r2);
    for (Index i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

    CHECK_THROWS_AS(init_scheme_from_string("gaussian"), ConfigError);
}

TEST_CASE("param store is deterministic given seed") {
    auto build = [](std::uint64_t seed) {
        ParamStore store(seed);
        store.create("b/weight", {4, 3}, InitScheme::ScaledUniform);
        store.create("a/weight", {2, 2}, InitScheme::ScaledUniform);
        store.create("a/bias", {2}, InitScheme::Zeros);
        return store;
    };
    ParamStore s1 = build(11), s2 = build(11);
    auto it1 = s1.begin();
    auto it2 = s2.begin();
    for (; it1 != s1.end(); ++it1, ++it2) {
        CHECK(it1->first == it2->first);
        for (Index i = 0; i < it1->second->value.size(); ++i)
            CHECK(it1->second->value[i] == it2->second->value[i]);
    }
    // lexicographic iteration order
    CHECK(s1.begin()->first == "a/bias");
    CHECK_THROWS_AS(s1.create("a/bias", {1}, InitScheme::Zeros), ContractError);
}
