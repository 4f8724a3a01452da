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

#include <Eigen/Eigenvalues>
#include <omp.h>

#include "doctest.h"

#include "kclt/asymcov.hpp"
#include "kclt/error.hpp"
#include "kclt/quadrature.hpp"
#include "kclt/random.hpp"

using namespace kclt;

namespace {

constexpr double pi = std::numbers::pi;

double max_rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / std::abs(b(i, j)));
        }
    }
    return worst;
}

Curve poisson_h(const RadiusGrid& grid, double beta)
{
    Curve h{grid, 1, std::vector<double>(grid.size())};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        h.values[i] = -2.0 * pi * grid[i] * grid[i] / beta;
    }
    return h;
}

}  // namespace

TEST_SUITE("quadrature") {

TEST_CASE("Halton points")
{
    const HaltonSequence h(3);
    std::vector<double> x(3);
    h.point(0, x);
    CHECK(x[0] == 0.5);
    CHECK(x[1] == doctest::Approx(1.0 / 3.0));
    CHECK(x[2] == doctest::Approx(0.2));
    h.point(1, x);
    CHECK(x[0] == 0.25);
    CHECK(x[1] == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(HaltonSequence(0), DomainError);
}

TEST_CASE("quasi-Monte Carlo means")
{
    const QmcMean q = qmc_mean(2, 1 << 14, 2, [](std::span<const double> u, std::span<double> o) {
        o[0] = u[0] * u[1];
        o[1] = u[0] * u[0] + u[1] * u[1] <= 1.0 ? 1.0 : 0.0;
    });
    CHECK(q.full[0] == doctest::Approx(0.25).epsilon(1e-3));
    CHECK(q.full[1] == doctest::Approx(pi / 4.0).epsilon(1e-3));
    CHECK(q.error(0) < 1e-3);
    CHECK_THROWS_WITH_AS(
        qmc_mean(1, 100, 1, [](std::span<const double>, std::span<double> o) { o[0] = NAN; }),
        "model evaluation failed", DomainError);
}

TEST_CASE("quadrature is independent of the thread count")
{
    const auto f = [](std::span<const double> u, std::span<double> o) {
        o[0] = std::sin(10.0 * u[0]) * std::exp(u[1] - u[2]);
    };
    const int before = omp_get_max_threads();
    omp_set_num_threads(1);
    const QmcMean a = qmc_mean(3, 50000, 1, f);
    omp_set_num_threads(3);
    const QmcMean b = qmc_mean(3, 50000, 1, f);
    omp_set_num_threads(before);
    CHECK(a.full == b.full);
    CHECK(a.half == b.half);
}

}  // TEST_SUITE

TEST_SUITE("asymcov") {

TEST_CASE("planar Poisson closed forms")
{
    CHECK(poisson_cov(0.05, 0.05, 200.0, IntensityMode::known) ==
          doctest::Approx(1.62640e-6).epsilon(1e-5));
    CHECK(poisson_cov(0.05, 0.05, 200.0, IntensityMode::estimated) ==
          doctest::Approx(3.92699e-7).epsilon(1e-5));
    CHECK(poisson_cov(0.0, 0.04, 200.0, IntensityMode::known) == 0.0);
    CHECK(poisson_cov(0.0, 0.04, 200.0, IntensityMode::estimated) == 0.0);
    CHECK(poisson_cov(0.02, 0.04, 100.0, IntensityMode::estimated) ==
          doctest::Approx(2.0 * pi * 0.0004 / 1e4));
    CHECK_THROWS_AS(poisson_cov(0.05, 0.05, 200.0, IntensityMode::known, 3), DomainError);
    CHECK_THROWS_AS(poisson_cov(0.05, 0.05, 0.0, IntensityMode::known), DomainError);
}

TEST_CASE("quadrature blocks for the Poisson model")
{
    const RadiusGrid grid = RadiusGrid::uniform(0.05, 6);
    const CovarianceBlocks b =
        sigma_blocks_constant(ProductDensityModel::poisson(), 200.0, grid, QuadratureConfig{});
    CHECK(b.sigma11(0, 0) == 200.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(b.sigma2(static_cast<Eigen::Index>(i), 0) ==
              doctest::Approx(2.0 * pi * grid[i] * grid[i]).epsilon(0.01));
    }
    CHECK(max_rel(b.c, poisson_limit_covariance(grid, 200.0, IntensityMode::known).matrix) <= 0.01);

    const LimitCovariance est = cov_estimated_constant(b, 200.0, grid);
    const Eigen::MatrixXd want = poisson_limit_covariance(grid, 200.0, IntensityMode::estimated).matrix;
    CHECK(max_rel(est.matrix, want) <= 0.01);
    CHECK((est.matrix - est.matrix.transpose()).norm() == 0.0);
    for (Eigen::Index i = 0; i < est.matrix.rows(); ++i) {
        CHECK(est.matrix(i, i) <= b.c(i, i));
    }
}

TEST_CASE("separable fourth-order kernel")
{
    ProductDensityModel m = ProductDensityModel::poisson();
    m.g4 = [](std::span<const double>, std::span<const double>, std::span<const double> z) {
        return 1.0 + std::exp(-std::hypot(z[0], z[1]));
    };
    const double rt = 6.0;
    const RadiusGrid grid(0.02, 0.05, 2);
    const double beta = 200.0;
    QuadratureConfig quad;
    quad.truncation = rt;
    const CovarianceBlocks b = sigma_blocks_constant(m, beta, grid, quad);
    const double exp_integral = 2.0 * pi * (1.0 - (1.0 + rt) * std::exp(-rt));
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            const double bi = pi * grid[i] * grid[i], bj = pi * grid[j] * grid[j];
            const double t4 = bi * bj * exp_integral;
            const double rest = 4.0 / beta * bi * bj +
                                2.0 / (beta * beta) * pi * std::pow(std::min(grid[i], grid[j]), 2);
            CHECK(b.c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ==
                  doctest::Approx(t4 + rest).epsilon(0.01));
        }
    }
}

TEST_CASE("composition")
{
    const RadiusGrid grid = RadiusGrid::uniform(0.05, 20);
    const CovarianceBlocks exact = poisson_blocks_exact(200.0, grid);
    const LimitCovariance c = compose_lim_cov(poisson_h(grid, 200.0), exact);
    CHECK(max_rel(c.matrix, poisson_limit_covariance(grid, 200.0, IntensityMode::estimated).matrix) <=
          1e-10);
    CHECK((c.matrix - c.matrix.transpose()).norm() == 0.0);

    Curve zero{grid, 1, std::vector<double>(grid.size(), 0.0)};
    CHECK(compose_lim_cov(zero, exact).matrix == exact.c);
    CHECK_THROWS_AS(compose_lim_cov(poisson_h(RadiusGrid::uniform(0.04, 20), 200.0), exact),
                    DomainError);
}

TEST_CASE("joint covariance")
{
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd h(1, 1);
    h(0, 0) = 0.7;
    const Eigen::MatrixXd j = joint_cov(h, sigma);
    CHECK(j(0, 0) == 1.0);
    CHECK(j(0, 1) == doctest::Approx(0.7));
    CHECK(j(1, 0) == doctest::Approx(0.7));
    CHECK(j(1, 1) == doctest::Approx(1.49));

    Rng rng(Seed{1});
    for (int t = 0; t < 20; ++t) {
        Eigen::MatrixXd a(5, 5);
        for (Eigen::Index i = 0; i < 25; ++i) {
            a.data()[i] = rng.normal();
        }
        const Eigen::MatrixXd s = a * a.transpose();
        Eigen::MatrixXd hr(3, 2);
        for (Eigen::Index i = 0; i < 6; ++i) {
            hr.data()[i] = rng.normal();
        }
        CHECK(joint_cov(Eigen::MatrixXd::Zero(3, 2), s) == s);
        const Eigen::MatrixXd js = joint_cov(hr, s);
        CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(js).eigenvalues().minCoeff() >=
              -1e-10 * js.norm());
    }
    CHECK_THROWS_AS(joint_cov(Eigen::MatrixXd::Zero(3, 2), Eigen::MatrixXd::Identity(4, 4)),
                    DomainError);
}

TEST_CASE("log-linear blocks with a unit covariate")
{
    const Window w(2, 1.0);
    const auto one = std::make_shared<const CovariateField>(
        w, std::vector<std::size_t>{1, 1}, 1, std::vector<double>{1.0});
    const RadiusGrid grid = RadiusGrid::uniform(0.05, 5);
    const double b = std::log(200.0);
    QuadratureConfig quad;
    quad.samples = 1 << 14;
    const LoglinearBlocks lb = loglinear_sigma_blocks(one, std::span<const double>(&b, 1),
                                                      ProductDensityModel::poisson(), grid, quad);
    CHECK(lb.warnings.empty());
    CHECK(lb.sensitivity(0, 0) == doctest::Approx(200.0));
    CHECK(lb.score_blocks.sigma11(0, 0) == doctest::Approx(200.0).epsilon(0.01));
    CHECK(max_rel(lb.score_blocks.c,
                  poisson_limit_covariance(grid, 200.0, IntensityMode::known).matrix) <= 0.01);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(lb.h_limit.values[i] == doctest::Approx(-2.0 * pi * grid[i] * grid[i]));
    }
    const CovarianceBlocks pb = lb.parameter_blocks();
    CHECK(pb.sigma11(0, 0) == doctest::Approx(1.0 / 200.0).epsilon(0.01));
    const LimitCovariance c = compose_lim_cov(lb.h_limit, pb);
    CHECK(max_rel(c.matrix, poisson_limit_covariance(grid, 200.0, IntensityMode::estimated).matrix) <=
          0.02);

    QuadratureConfig wide;
    wide.truncation = 0.99;
    CHECK_THROWS_AS(loglinear_sigma_blocks(one, std::span<const double>(&b, 1),
                                           ProductDensityModel::poisson(), grid, wide),
                    DomainError);
}

}  // TEST_SUITE
