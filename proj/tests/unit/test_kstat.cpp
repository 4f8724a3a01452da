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
#include <numbers>
#include <vector>

#include "doctest.h"

#include "kclt/error.hpp"
#include "kclt/kstat.hpp"
#include "kclt/random.hpp"
#include "kclt/simulate.hpp"

using namespace kclt;

namespace {

PointPattern two_points()
{
    return PointPattern(Window(2, 1.0), {0.0, 0.0, 0.03, 0.0});
}

// Hand evaluation: both ordered pairs, weight 1/(1 - 0.03), intensity 200.
constexpr double two_point_k = 2.0 * (1.0 / 0.97) / (200.0 * 200.0);

}  // namespace

TEST_SUITE("kstat") {

TEST_CASE("radius grid")
{
    const RadiusGrid g = RadiusGrid::uniform(0.05, 50);
    CHECK(g.size() == 50);
    CHECK(g.rmin() == doctest::Approx(0.001));
    CHECK(g.rmax() == 0.05);
    for (std::size_t i = 1; i < g.size(); ++i) {
        CHECK(g[i] > g[i - 1]);
    }
    CHECK_THROWS_AS(RadiusGrid(0.0, 1.0, 5), DomainError);
    CHECK_THROWS_AS(RadiusGrid(0.5, 0.5, 5), DomainError);
    CHECK_THROWS_AS(RadiusGrid(0.1, 0.5, 1), DomainError);
}

TEST_CASE("K estimate on two points")
{
    const IntensityModel rho = IntensityModel::constant(200.0);
    const Curve k = k_hat(two_points(), rho, RadiusGrid(0.02, 0.05, 2));
    CHECK(k.values[0] == 0.0);
    CHECK(k.values[1] == doctest::Approx(two_point_k).epsilon(1e-12));
    CHECK(k.values[1] == doctest::Approx(5.15464e-5).epsilon(1e-5));
}

TEST_CASE("degenerate patterns give zero curves")
{
    const RadiusGrid g = RadiusGrid::uniform(0.05, 5);
    const IntensityModel rho = IntensityModel::constant(200.0);
    for (const PointPattern& p :
         {PointPattern::empty(Window(2, 1.0)), PointPattern(Window(2, 1.0), {0.1, 0.1})}) {
        const Curve k = k_hat(p, rho, g);
        const Curve h = h_matrix(p, rho, g);
        for (double v : k.values) {
            CHECK(v == 0.0);
        }
        for (double v : h.values) {
            CHECK(v == 0.0);
        }
    }
}

TEST_CASE("K estimate is nondecreasing and invariant to point order")
{
    const PointPattern p = simulate_poisson(300.0, Window(2, 1.0), Seed{1});
    const RadiusGrid g = RadiusGrid::uniform(0.1, 40);
    const IntensityModel rho = IntensityModel::constant(300.0);
    const Curve k = k_hat(p, rho, g);
    for (std::size_t i = 1; i < g.size(); ++i) {
        CHECK(k.values[i] >= k.values[i - 1]);
    }
    std::vector<double> reversed;
    for (std::size_t i = p.size(); i-- > 0;) {
        reversed.insert(reversed.end(), p.point(i).begin(), p.point(i).end());
    }
    const Curve kr = k_hat(PointPattern(p.window(), reversed), rho, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(kr.values[i] == doctest::Approx(k.values[i]).epsilon(1e-14));
    }
}

TEST_CASE("K estimate is unbiased for Poisson data")
{
    const Window w(2, 2.0);
    const RadiusGrid g = RadiusGrid::uniform(0.05, 2);
    const IntensityModel rho = IntensityModel::constant(200.0);
    const std::size_t reps = 10000;
    double s = 0.0, s2 = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
        const double k = k_hat(simulate_poisson(200.0, w, stream(Seed{2}, r)), rho, g).values[1];
        s += k;
        s2 += k * k;
    }
    const double mean = s / reps;
    const double se = std::sqrt((s2 / reps - mean * mean) / reps);
    CHECK(std::abs(mean - std::numbers::pi * 0.0025) <= 3.0 * se);
}

TEST_CASE("Poisson K-function")
{
    CHECK(k_poisson(0.05, 2) == doctest::Approx(7.853982e-3).epsilon(1e-7));
    CHECK(k_poisson(0.0, 3) == 0.0);
    CHECK(k_poisson(1.0, 3) == doctest::Approx(4.0 * std::numbers::pi / 3.0));
    CHECK(k_poisson(1.0, 1) == doctest::Approx(2.0));
    CHECK_THROWS_AS(k_poisson(-1.0, 2), DomainError);
}

TEST_CASE("H for the constant model")
{
    const RadiusGrid g(0.02, 0.05, 2);
    const Curve h = h_matrix(two_points(), IntensityModel::constant(200.0), g);
    CHECK(h.width == 1);
    CHECK(h.values[0] == 0.0);
    CHECK(h.values[1] == doctest::Approx(-2.0 / 200.0 * two_point_k).epsilon(1e-12));

    const PointPattern p = simulate_poisson(400.0, Window(2, 1.0), Seed{3});
    const RadiusGrid g2 = RadiusGrid::uniform(0.08, 30);
    const KCurves c = k_and_h(p, close_pairs(p, 0.08), IntensityModel::constant(380.0), g2);
    for (std::size_t i = 0; i < g2.size(); ++i) {
        CHECK(c.h.values[i] == doctest::Approx(-(2.0 / 380.0) * c.k.values[i]).epsilon(1e-14));
    }
}

TEST_CASE("H with a unit covariate is -2 K")
{
    const Window w(2, 1.0);
    const auto one = std::make_shared<const CovariateField>(
        w, std::vector<std::size_t>{1, 1}, 1, std::vector<double>{1.0});
    const PointPattern p = simulate_poisson(200.0, w, Seed{4});
    const RadiusGrid g = RadiusGrid::uniform(0.05, 10);
    const IntensityModel m = IntensityModel::loglinear(one, {std::log(200.0)});
    const KCurves c = k_and_h(p, close_pairs(p, 0.05), m, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(c.h.values[i] == doctest::Approx(-2.0 * c.k.values[i]).epsilon(1e-13));
    }
}

TEST_CASE("Taylor residual")
{
    const PointPattern p = simulate_poisson(200.0, Window(2, 1.0), Seed{5});
    const RadiusGrid g = RadiusGrid::uniform(0.05, 10);
    const IntensityModel star = IntensityModel::constant(200.0);
    const double same = 200.0;
    for (double v : taylor_residual(p, star, std::span<const double>(&same, 1), g).values) {
        CHECK(v == 0.0);
    }

    auto sup = [&](double eps) {
        const double b = 200.0 * (1.0 + eps);
        double m = 0.0;
        for (double v : taylor_residual(p, star, std::span<const double>(&b, 1), g).values) {
            m = std::max(m, std::abs(v));
        }
        return m;
    };
    // Exact remainder of 1/b^2 about 200: (3 eps^2 - 4 eps^3 + ...) K / 200^2.
    CHECK(sup(0.02) / sup(0.01) == doctest::Approx(4.0).epsilon(0.03));
    CHECK(sup(0.01) / sup(0.005) == doctest::Approx(4.0).epsilon(0.03));

    // Plugging in the estimate, the residual shrinks as the window grows.
    std::vector<double> mean_sup;
    for (double side : {1.0, 2.0, 4.0}) {
        double acc = 0.0;
        const std::size_t reps = 200;
        for (std::size_t r = 0; r < reps; ++r) {
            const PointPattern q = simulate_poisson(200.0, Window(2, side), stream(Seed{6}, r));
            const double bh = static_cast<double>(q.size()) / (side * side);
            double m = 0.0;
            for (double v : taylor_residual(q, star, std::span<const double>(&bh, 1), g).values) {
                m = std::max(m, std::abs(v));
            }
            acc += m;
        }
        mean_sup.push_back(acc / reps);
    }
    CHECK(mean_sup[1] < mean_sup[0]);
    CHECK(mean_sup[2] < mean_sup[1]);
}

}  // TEST_SUITE
