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

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kclt/intensity.hpp"
#include "kclt/kstat.hpp"

namespace kclt {

/// Translation-invariant normalized joint intensities. Arguments are offsets
/// from a point at the origin: g(x) = g^(2)(o,x), g3(x,y) = g^(3)(o,x,y),
/// g4(x,y,z) = g^(4)(o,x,y,z).
struct ProductDensityModel {
    using G2 = std::function<double(std::span<const double>)>;
    using G3 = std::function<double(std::span<const double>, std::span<const double>)>;
    using G4 = std::function<double(std::span<const double>, std::span<const double>,
                                    std::span<const double>)>;

    std::string name;
    G2 g;
    G3 g3;
    G4 g4;

    /// g = g3 = g4 = 1.
    static ProductDensityModel poisson();
};

struct QuadratureConfig {
    std::size_t samples = std::size_t{1} << 16;
    /// Radius of the ball that truncates unbounded integration variables;
    /// nonpositive means 5 * grid.rmax().
    double truncation = 0.0;

    double truncation_for(const RadiusGrid& grid) const
    {
        return truncation > 0.0 ? truncation : 5.0 * grid.rmax();
    }
};

/// Largest quadrature error estimate (full vs half sample) in each block.
struct BlockErrors {
    double sigma11 = 0.0;
    double sigma2 = 0.0;
    double c = 0.0;
};

/// Limiting covariance blocks for (beta_hat, K_hat(r_1), ..., K_hat(r_m)) with
/// known intensity: sigma11 (p x p) = lim n Var(beta_hat), row i of sigma2
/// (m x p) = lim n Cov(beta_hat, K_hat(r_i)), c (m x m) = lim n Cov(K_hat(r_i), K_hat(r_j)).
struct CovarianceBlocks {
    RadiusGrid grid;
    Eigen::MatrixXd sigma11;
    Eigen::MatrixXd sigma2;
    Eigen::MatrixXd c;

    // Integrals reused by the estimated-intensity covariance (constant model).
    std::vector<double> k;          ///< K(r_i) = int_{B_r} g
    double g_excess = 0.0;          ///< int (g - 1)
    std::vector<double> g3_excess;  ///< int int (g3(x,y) - g(x)) 1{|x| <= r_i}

    BlockErrors error;
};

/// Covariance function sampled on a radius grid.
struct LimitCovariance {
    RadiusGrid grid;
    Eigen::MatrixXd matrix;
};

enum class IntensityMode { known, estimated };

/// Planar Poisson closed forms for lim n Cov(K_hat(s), K_hat(t)).
double poisson_cov(double s, double t, double rho, IntensityMode mode, std::size_t dim = 2);

/// poisson_cov on every pair of grid radii.
LimitCovariance poisson_limit_covariance(const RadiusGrid& grid, double rho, IntensityMode mode,
                                         std::size_t dim = 2);

/// Exact planar Poisson blocks: sigma11 = beta, sigma2(r) = 2 pi r^2, c = known-intensity form.
CovarianceBlocks poisson_blocks_exact(double beta, const RadiusGrid& grid);

/// Known-intensity blocks for the constant-intensity model in dimension `dim`.
CovarianceBlocks sigma_blocks_constant(const ProductDensityModel& model, double beta,
                                       const RadiusGrid& grid, const QuadratureConfig& quad,
                                       std::size_t dim = 2);

/// Estimated-intensity limit covariance for the constant model from its blocks.
LimitCovariance cov_estimated_constant(const CovarianceBlocks& blocks, double beta,
                                       const RadiusGrid& grid);

/// c~(s,t) = H(s) S11 H(t)' + H(s) S2_t + H(t) S2_s + c(s,t).
LimitCovariance compose_lim_cov(const Curve& h, const CovarianceBlocks& blocks);

/// A Sigma A' with A = [[I_p, 0], [H_rows, I_k]].
Eigen::MatrixXd joint_cov(const Eigen::MatrixXd& h_rows, const Eigen::MatrixXd& sigma);

/// Blocks for the log-linear model with finite-window spatial averages.
///
/// `score_blocks` is on the score scale: sigma11 = lim Var(|W|^-1/2 e_n),
/// sigma2 row i = lim Cov(e_n, K_hat(r_i)). `parameter_blocks()` maps them to the
/// beta_hat scale through the sensitivity, which is what compose_lim_cov expects
/// together with `h_limit`.
struct LoglinearBlocks {
    CovarianceBlocks score_blocks;
    Eigen::MatrixXd sensitivity;  ///< normalized sensitivity S
    Curve h_limit;                ///< -2 K(r) zbar
    std::vector<std::string> warnings;

    CovarianceBlocks parameter_blocks() const;
};

LoglinearBlocks loglinear_sigma_blocks(std::shared_ptr<const CovariateField> field,
                                       std::span<const double> beta,
                                       const ProductDensityModel& model, const RadiusGrid& grid,
                                       const QuadratureConfig& quad);

/// Symmetric part, (A + A') / 2.
Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& a);

}  // namespace kclt
