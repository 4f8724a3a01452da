/*
   Copyright 2026 The kclt Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"

#include "kclt/error.hpp"
#include "kclt/intensity.hpp"
#include "kclt/random.hpp"
#include "kclt/simulate.hpp"

using namespace kclt;

namespace {

struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

template <class F>
Moments moments(std::size_t n, F draw)
{
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = draw(i);
        s += x;
        s2 += x * x;
    }
    const double m = s / static_cast<double>(n);
    return {m, (s2 - static_cast<double>(n) * m * m) / static_cast<double>(n - 1)};
}

std::shared_ptr<const CovariateField> u1_field(double side, bool with_intercept)
{
    const std::size_t p = with_intercept ? 2 : 1;
    return std::make_shared<const CovariateField>(CovariateField::from_function(
        Window(2, side), {1000, 1}, p, [=](std::span<const double> c, std::span<double> z) {
            if (with_intercept) {
                z[0] = 1.0;
            }
            z[p - 1] = c[0];
        }));
}

}  // namespace

TEST_SUITE("random") {

TEST_CASE("streams are deterministic and distinct")
{
    CHECK(stream(Seed{1}, 5) == stream(Seed{1}, 5));
    CHECK_FALSE(stream(Seed{1}, 5) == stream(Seed{1}, 6));
    CHECK_FALSE(stream(Seed{1}, 5) == stream(Seed{2}, 5));
    Rng a(stream(Seed{9}, 0)), b(stream(Seed{9}, 0));
    for (int i = 0; i < 100; ++i) {
        CHECK(a.bits() == b.bits());
    }
}

TEST_CASE("uniform and normal moments")
{
    Rng rng(Seed{10});
    const std::size_t n = 200000;
    const Moments u = moments(n, [&](std::size_t) {
        const double x = rng.uniform();
        REQUIRE(x >= 0.0);
        REQUIRE(x < 1.0);
        return x;
    });
    CHECK(u.mean == doctest::Approx(0.5).epsilon(0.01));
    CHECK(u.var == doctest::Approx(1.0 / 12.0).epsilon(0.02));
    const Moments z = moments(n, [&](std::size_t) { return rng.normal(); });
    CHECK(std::abs(z.mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(z.var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("Poisson variates across both samplers")
{
    Rng rng(Seed{11});
    const std::size_t n = 100000;
    for (double mean : {0.3, 4.0, 29.5, 30.0, 200.0, 5000.0}) {
        CAPTURE(mean);
        const Moments m =
            moments(n, [&](std::size_t) { return static_cast<double>(rng.poisson(mean)); });
        CHECK(std::abs(m.mean - mean) < 4.0 * std::sqrt(mean / static_cast<double>(n)));
        CHECK(m.var == doctest::Approx(mean).epsilon(0.03));
    }
    CHECK(rng.poisson(0.0) == 0);
    CHECK_THROWS_AS(rng.poisson(-1.0), DomainError);
}

TEST_CASE("Poisson pmf near the mode above the inversion cutoff")
{
    Rng rng(Seed{12});
    const std::size_t n = 200000;
    const double mean = 40.0;
    std::vector<double> freq(100, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = rng.poisson(mean);
        if (k < freq.size()) {
            freq[k] += 1.0 / static_cast<double>(n);
        }
    }
    for (int k = 30; k <= 50; ++k) {
        const double pmf = std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
        CHECK(std::abs(freq[static_cast<std::size_t>(k)] - pmf) <
              5.0 * std::sqrt(pmf / static_cast<double>(n)));
    }
}

}  // TEST_SUITE

TEST_SUITE("simulate") {

TEST_CASE("homogeneous Poisson: count law, containment, determinism")
{
    const Window w(2, 1.0);
    const std::size_t reps = 10000;
    const Moments m = moments(reps, [&](std::size_t r) {
        return static_cast<double>(simulate_poisson(200.0, w, stream(Seed{20}, r)).size());
    });
    CHECK(std::abs(m.mean - 200.0) <= 3.0 * std::sqrt(200.0 / static_cast<double>(reps)));
    CHECK(m.var == doctest::Approx(200.0).epsilon(0.05));
    CHECK(simulate_poisson(200.0, w, Seed{7}) == simulate_poisson(200.0, w, Seed{7}));
    const PointPattern p = simulate_poisson(500.0, Window(3, 2.0), Seed{8});
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(p.window().contains(p.point(i)));
    }
    CHECK_THROWS_AS(simulate_poisson(0.0, w, Seed{1}), DomainError);
}

TEST_CASE("thinning with a constant model keeps every point")
{
    const Window w(2, 1.0);
    const std::size_t reps = 4000;
    const IntensityModel model = IntensityModel::constant(200.0);
    const Moments m = moments(reps, [&](std::size_t r) {
        return static_cast<double>(simulate_poisson_inhom(model, 200.0, w, stream(Seed{21}, r)).size());
    });
    CHECK(std::abs(m.mean - 200.0) <= 3.0 * std::sqrt(200.0 / static_cast<double>(reps)));
    CHECK(m.var == doctest::Approx(200.0).epsilon(0.08));
}

TEST_CASE("thinning with a log-linear model")
{
    const Window w(2, 1.0);
    const std::size_t reps = 10000;

    const IntensityModel flat = IntensityModel::loglinear(u1_field(1.0, true), {std::log(200.0), 0.0});
    const Moments m0 = moments(reps / 4, [&](std::size_t r) {
        return static_cast<double>(simulate_poisson_inhom(flat, 200.0 * (1.0 + 1e-12), w, stream(Seed{22}, r)).size());
    });
    CHECK(std::abs(m0.mean - 200.0) <= 3.0 * std::sqrt(200.0 / (reps / 4.0)));

    const IntensityModel slope = IntensityModel::loglinear(u1_field(1.0, true), {5.0, 1.0});
    const double expected = std::exp(5.0) * (std::exp(0.5) - std::exp(-0.5));
    const Moments m1 = moments(reps, [&](std::size_t r) {
        return static_cast<double>(
            simulate_poisson_inhom(slope, std::exp(5.5), w, stream(Seed{23}, r)).size());
    });
    CHECK(std::abs(m1.mean - expected) <= 3.0 * std::sqrt(m1.var / static_cast<double>(reps)));

    CHECK_THROWS_WITH_AS(simulate_poisson_inhom(slope, 100.0, w, Seed{1}),
                         "dominating bound violated", DomainError);
}

TEST_CASE("Matern cluster: mean count, empty limit, stationarity")
{
    const Window w(2, 1.0);
    const MaternParams params{25.0, 8.0, 0.2};
    const std::size_t reps = 10000;
    std::vector<double> quadrant(4, 0.0);
    const Moments m = moments(reps, [&](std::size_t r) {
        const PointPattern p = simulate_matern(params, w, stream(Seed{24}, r));
        for (std::size_t i = 0; i < p.size(); ++i) {
            const auto u = p.point(i);
            REQUIRE(w.contains(u));
            quadrant[(u[0] < 0.0 ? 0 : 1) + (u[1] < 0.0 ? 0 : 2)] += 1.0;
        }
        return static_cast<double>(p.size());
    });
    CHECK(std::abs(m.mean - 200.0) <= 3.0 * std::sqrt(m.var / static_cast<double>(reps)));
    // Clustering inflates the count variance well above the Poisson value.
    CHECK(m.var > 400.0);
    for (double q : quadrant) {
        const double per = q / static_cast<double>(reps);
        CHECK(per == doctest::Approx(50.0).epsilon(0.02));
    }

    std::size_t nonempty = 0;
    for (std::size_t r = 0; r < 100; ++r) {
        nonempty += simulate_matern({25.0, 1e-9, 0.2}, w, stream(Seed{25}, r)).empty() ? 0 : 1;
    }
    CHECK(nonempty == 0);
    CHECK(simulate_matern(params, w, Seed{3}) == simulate_matern(params, w, Seed{3}));
    CHECK_THROWS_AS(simulate_matern({0.0, 8.0, 0.2}, w, Seed{3}), DomainError);
}

}  // TEST_SUITE
