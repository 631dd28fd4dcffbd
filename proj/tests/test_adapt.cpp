#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "bcls/adapt.hpp"
#include "bcls/rng.hpp"
#include "bcls/simulate.hpp"

using namespace bcls;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& r : rows) {
        std::size_t j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("split_data") {
    const ObservedMatrix x(from_rows({{1, 2}, {3, 4}}), Mask(2, 2, 1), false);

    SUBCASE("folds partition twice the surrogate") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto split = split_data(x, 0.5, seed);
            const Matrix y = surrogate(x, 0.5);
            for (std::size_t i = 0; i < 2; ++i) {
                for (std::size_t j = 0; j < 2; ++j) {
                    CHECK(split.y_delta(i, j) + split.y_delta_c(i, j) == 2.0 * y(i, j));
                    if (split.delta_mask(i, j)) {
                        CHECK(split.y_delta(i, j) == 2.0 * y(i, j));
                        CHECK(split.y_delta_c(i, j) == 0.0);
                    } else {
                        CHECK(split.y_delta(i, j) == 0.0);
                    }
                }
            }
        }
    }

    SUBCASE("symmetric data gives symmetric folds") {
        const Matrix theta = materialize_theta(BiclusterAssignment::symmetric({0, 1, 0, 1, 1}, 2),
                                               {from_rows({{0.5, 0.1}, {0.1, 0.4}}), 1.0},
                                               ModelSpec::sbm(5, 2, 1.0));
        const auto obs = gen_bernoulli(theta, full_mask(5, 5, true), true, 4);
        const auto split = split_data(obs, 1.0, 11);
        CHECK(split.symmetric);
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK_FALSE(split.validation_mask()(i, i));
            for (std::size_t j = 0; j < 5; ++j) {
                CHECK(split.delta_mask(i, j) == split.delta_mask(j, i));
                CHECK(split.y_delta(i, j) == split.y_delta(j, i));
            }
        }
    }

    SUBCASE("swapped exchanges the folds") {
        const auto split = split_data(x, 1.0, 5);
        const auto other = split.swapped();
        CHECK(other.y_delta == split.y_delta_c);
        CHECK(other.y_delta_c == split.y_delta);
        CHECK(other.validation_mask() == split.delta_mask);
    }

    SUBCASE("each fold is unbiased for theta") {
        const Matrix theta(1, 1, 0.7);
        double sum_in = 0.0;
        double sum_out = 0.0;
        const int reps = 20000;
        for (int r = 0; r < reps; ++r) {
            const auto s = split_data(ObservedMatrix(theta, Mask(1, 1, 1), false), 1.0, static_cast<std::uint64_t>(r));
            sum_in += s.y_delta(0, 0);
            sum_out += s.y_delta_c(0, 0);
        }
        // Each fold value is 1.4 or 0 with probability 1/2: standard error 0.7 / sqrt(reps).
        const double se = 0.7 / std::sqrt(static_cast<double>(reps));
        CHECK(std::abs(sum_in / reps - 0.7) < 4 * se);
        CHECK(std::abs(sum_out / reps - 0.7) < 4 * se);
    }
}

TEST_CASE("KGrid") {
    const auto g = KGrid::range(2, 3);
    CHECK(g.k1_values == std::vector<int>{1, 2});
    CHECK(g.k2_values == std::vector<int>{1, 2, 3});
    const auto d = KGrid::default_for(16, 3);
    CHECK(d.k1_values.size() == 8);
    CHECK(d.k2_values.size() == 3);
    CHECK_THROWS_AS(KGrid::range(4, 1).validate(3, 3), std::invalid_argument);
    CHECK_THROWS_AS(KGrid{}.validate(3, 3), std::invalid_argument);
}

TEST_CASE("select_k") {
    const auto spec = ModelSpec::asymmetric(40, 40, 2, 2, 3.0);

    SUBCASE("a single-point grid returns that point") {
        const auto [z, q] = gen_random_model(spec, 1);
        const auto obs = gen_gaussian(materialize_theta(z, q, spec), 1.0, Mask(40, 40, 1), false, 2);
        const auto split = split_data(obs, 1.0, 3);
        const auto sel = select_k(split, KGrid{{3}, {2}}, 3.0, FitConfig{}, false);
        CHECK(sel.k1 == 3);
        CHECK(sel.k2 == 2);
        CHECK(sel.losses.size() == 1);
    }

    SUBCASE("constant truth selects a single cluster most of the time") {
        int ones = 0;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const Matrix theta(40, 40, 0.5);
            const auto obs = gen_gaussian(theta, 1.0, Mask(40, 40, 1), false, seed);
            FitConfig config;
            config.restarts = 4;
            config.seed = seed;
            const auto sel = select_k(split_data(obs, 1.0, seed + 100), KGrid::range(3, 3), 1.0, config, false);
            CHECK(sel.losses.size() == 9);
            if (sel.k1 == 1 && sel.k2 == 1) ++ones;
        }
        CHECK(ones >= 7);
    }

    SUBCASE("doubling restarts keeps a well-separated selection") {
        const auto [z, q0] = gen_planted_model(spec, 4.0, 5);
        const auto obs = gen_gaussian(materialize_theta(z, q0, spec), 1.0, Mask(40, 40, 1), false, 6);
        const auto split = split_data(obs, 1.0, 7);
        FitConfig config;
        config.restarts = 8;
        const auto a = select_k(split, KGrid::range(3, 3), 3.0, config, false);
        config.restarts = 16;
        const auto b = select_k(split, KGrid::range(3, 3), 3.0, config, false);
        CHECK(a.k1 == b.k1);
        CHECK(a.k2 == b.k2);
        CHECK(a.k1 == 2);
        CHECK(a.k2 == 2);
    }

    SUBCASE("symmetric grids scan the diagonal") {
        const auto sspec = ModelSpec::symmetric(30, 2, 3.0);
        const auto [z, q] = gen_planted_model(sspec, 4.0, 8);
        const auto obs = gen_gaussian(materialize_theta(z, q, sspec), 1.0, full_mask(30, 30, true), true, 9);
        const auto sel = select_k(split_data(obs, 1.0, 10), KGrid::range(3, 3), 3.0, FitConfig{}, true);
        CHECK(sel.losses.size() == 3);
        CHECK(sel.k1 == sel.k2);
    }
}

TEST_CASE("adaptive_fit") {
    SUBCASE("patchwork takes each entry from the fit trained on the other fold") {
        const auto spec = ModelSpec::asymmetric(20, 20, 2, 2, 3.0);
        const auto [z, q] = gen_planted_model(spec, 2.0, 1);
        const auto obs = gen_gaussian(materialize_theta(z, q, spec), 0.5, Mask(20, 20, 1), false, 2);
        AdaptConfig config;
        config.fit.seed = 3;
        const auto r = adaptive_fit(obs, 1.0, 3.0, KGrid::range(3, 3), config);

        // Recompute both folds by hand.
        const auto split = split_data(obs, 1.0, derive_seed(3, 0x73706c6974ULL));
        CHECK(split.delta_mask == r.delta_mask);
        const auto on_delta = alternating_fit(split.y_delta, ModelSpec::asymmetric(20, 20, r.delta.k1, r.delta.k2, 3.0),
                                              config.fit);
        const auto on_delta_c = alternating_fit(
            split.y_delta_c, ModelSpec::asymmetric(20, 20, r.delta_c.k1, r.delta_c.k2, 3.0), config.fit);
        for (std::size_t i = 0; i < 20; ++i) {
            for (std::size_t j = 0; j < 20; ++j) {
                const double expected = r.delta_mask(i, j) ? on_delta_c.theta_hat(i, j) : on_delta.theta_hat(i, j);
                CHECK(r.theta_hat(i, j) == expected);
            }
        }
    }

    SUBCASE("noiseless data with the true grid point lands close to the truth") {
        const auto spec = ModelSpec::asymmetric(20, 20, 2, 2, 3.0);
        const auto [z, q] = gen_planted_model(spec, 2.0, 4);
        const Matrix theta = materialize_theta(z, q, spec);
        const ObservedMatrix obs(theta, Mask(20, 20, 1), false);
        AdaptConfig config;
        config.fit.restarts = 32;
        const auto r = adaptive_fit(obs, 1.0, 3.0, KGrid{{2}, {2}}, config);
        CHECK(r.delta.k1 == 2);
        CHECK(r.delta_c.k2 == 2);
        const double mse = restricted_sq_norm(difference(r.theta_hat, theta), Mask(20, 20, 1)) / 400.0;
        CHECK(mse < 0.05);
    }

    SUBCASE("deterministic") {
        const auto spec = ModelSpec::asymmetric(16, 16, 2, 2, 3.0);
        const auto [z, q] = gen_random_model(spec, 2);
        const auto obs = gen_gaussian(materialize_theta(z, q, spec), 1.0, Mask(16, 16, 1), false, 3);
        AdaptConfig config;
        config.fit.seed = 17;
        const auto a = adaptive_fit(obs, 1.0, 3.0, KGrid::range(3, 3), config);
        const auto b = adaptive_fit(obs, 1.0, 3.0, KGrid::range(3, 3), config);
        CHECK(a.theta_hat == b.theta_hat);
    }

    SUBCASE("invalid configuration") {
        const ObservedMatrix obs(Matrix(4, 4), Mask(4, 4, 1), false);
        AdaptConfig config;
        config.select_restarts = 0;
        CHECK_THROWS_AS(adaptive_fit(obs, 1.0, 1.0, KGrid::range(2, 2), config), std::invalid_argument);
        CHECK_THROWS_AS(adaptive_fit(obs, 1.0, 1.0, KGrid::range(5, 2), AdaptConfig{}), std::invalid_argument);
    }
}

TEST_CASE("estimate_p") {
    Mask m(2, 2, 1);
    m(1, 1) = 0;
    CHECK(estimate_p(m, false) == 0.75);
    CHECK(estimate_p(Mask(3, 3, 1), false) == 1.0);

    Mask s(3, 3, 0);
    s(0, 1) = s(1, 0) = 1;
    CHECK(estimate_p(s, true) == doctest::Approx(1.0 / 3.0));
    CHECK(estimate_p(full_mask(5, 5, true), true) == 1.0);
    CHECK_THROWS_AS(estimate_p(Mask(1, 1, 1), true), std::invalid_argument);

    SUBCASE("within four standard deviations of p") {
        const double p = 0.8;
        const double bound = 4.0 * std::sqrt(p * (1 - p) / (128.0 * 128.0));
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            CHECK(std::abs(estimate_p(gen_mask(128, 128, p, false, seed), false) - p) <= bound);
        }
    }
}

TEST_CASE("fit_unknown_p") {
    const auto spec = ModelSpec::asymmetric(24, 24, 2, 2, 3.0);
    const auto [z, q] = gen_random_model(spec, 1);
    const Matrix theta = materialize_theta(z, q, spec);

    SUBCASE("full observation matches the known-p fit") {
        const auto obs = gen_gaussian(theta, 1.0, Mask(24, 24, 1), false, 2);
        FitConfig config;
        config.seed = 5;
        CHECK(fit_unknown_p(obs, spec, config).theta_hat == fit_observed(obs, 1.0, spec, config).theta_hat);
    }

    SUBCASE("equals the known-p pipeline run at p_hat") {
        const auto mask = gen_mask(24, 24, 0.6, false, 3);
        const auto obs = gen_gaussian(theta, 1.0, mask, false, 4);
        FitConfig config;
        config.seed = 6;
        const double p_hat = estimate_p(mask, false);
        CHECK(fit_unknown_p(obs, spec, config).theta_hat == fit_observed(obs, p_hat, spec, config).theta_hat);
    }

    SUBCASE("loss comparable to the known-p fit") {
        std::vector<double> known, unknown;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto mask = gen_mask(24, 24, 0.8, false, 100 + seed);
            const auto obs = gen_gaussian(theta, 1.0, mask, false, 200 + seed);
            FitConfig config;
            config.seed = seed;
            config.restarts = 8;
            const auto loss = [&](const Matrix& t) { return restricted_sq_norm(difference(t, theta), Mask(24, 24, 1)); };
            known.push_back(loss(fit_observed(obs, 0.8, spec, config).theta_hat));
            unknown.push_back(loss(fit_unknown_p(obs, spec, config).theta_hat));
        }
        CHECK(median(unknown) <= 1.5 * median(known));
    }

    SUBCASE("nothing observed") {
        const ObservedMatrix obs(Matrix(3, 3), Mask(3, 3, 0), false);
        CHECK_THROWS_AS(fit_unknown_p(obs, ModelSpec::asymmetric(3, 3, 1, 1, 1.0), FitConfig{}), std::invalid_argument);
    }
}
