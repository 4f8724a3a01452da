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
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "kclt/geometry.hpp"

namespace kclt {

/// Piecewise-constant covariate raster covering a window.
///
/// Cells are indexed with axis 0 fastest: cell (i0, i1, ...) has linear index
/// i0 + n0 * (i1 + n1 * (i2 + ...)). Each cell stores `p` values.
class CovariateField {
public:
    CovariateField(Window window, std::vector<std::size_t> resolution, std::size_t p,
                   std::vector<double> values);

    /// Samples `fn` at every cell center.
    static CovariateField from_function(
        Window window, std::vector<std::size_t> resolution, std::size_t p,
        const std::function<void(std::span<const double> center, std::span<double> out)>& fn);

    const Window& window() const { return window_; }
    const std::vector<std::size_t>& resolution() const { return resolution_; }
    std::size_t covariates() const { return p_; }
    std::size_t cell_count() const { return values_.size() / p_; }
    double cell_volume() const { return cell_volume_; }
    const std::vector<double>& values() const { return values_; }

    std::size_t cell_index(std::span<const double> u) const;
    std::span<const double> cell(std::size_t c) const { return {values_.data() + c * p_, p_}; }
    std::span<const double> at(std::span<const double> u) const { return cell(cell_index(u)); }
    void cell_center(std::size_t c, std::span<double> out) const;

    /// Raster mean of z over the window.
    Eigen::VectorXd mean() const;

private:
    Window window_;
    std::vector<std::size_t> resolution_;
    std::size_t p_;
    std::vector<double> values_;
    std::vector<double> cell_side_;
    double cell_volume_;
};

struct ConstantIntensity {
    double beta;
};

struct LogLinearIntensity {
    std::shared_ptr<const CovariateField> covariates;
    std::vector<double> beta;
};

/// Parametric intensity rho_beta(u) with its log-gradient in beta.
class IntensityModel {
public:
    static IntensityModel constant(double beta);
    static IntensityModel loglinear(std::shared_ptr<const CovariateField> covariates,
                                    std::vector<double> beta);

    bool is_constant() const { return std::holds_alternative<ConstantIntensity>(model_); }
    const LogLinearIntensity& as_loglinear() const { return std::get<LogLinearIntensity>(model_); }

    std::size_t parameter_count() const;
    std::vector<double> parameters() const;

    /// Same family at a different parameter.
    IntensityModel with_parameters(std::span<const double> beta) const;

    double value(std::span<const double> u) const;

    /// Gradient of log rho_beta(u) with respect to beta: 1/beta for the
    /// constant model, z(u) for the log-linear one.
    void log_gradient(std::span<const double> u, std::span<double> out) const;

private:
    explicit IntensityModel(std::variant<ConstantIntensity, LogLinearIntensity> m)
        : model_(std::move(m))
    {
    }

    std::variant<ConstantIntensity, LogLinearIntensity> model_;
};

/// Number of points per unit volume.
double estimate_constant(const PointPattern& pattern);

/// Poisson composite-likelihood score sum_u z(u) - int_W z exp(z'beta).
Eigen::VectorXd cl_score(const PointPattern& pattern, const LogLinearIntensity& model);

/// Normalized sensitivity |W|^-1 int_W z z' exp(z'beta).
Eigen::MatrixXd cl_sensitivity(const LogLinearIntensity& model, const Window& window);

struct FitResult {
    std::vector<double> beta_hat;
    double score_norm = 0.0;  ///< max-norm of score / |W|
    int iterations = 0;
    bool converged = false;
};

struct FitOptions {
    double tolerance = 1e-8;
    int max_iterations = 50;
    int max_halvings = 30;
};

/// Newton-Raphson for the log-linear composite likelihood. An empty `beta0`
/// starts from (log(N/|W|), 0, ..., 0).
FitResult fit_loglinear(const PointPattern& pattern,
                        std::shared_ptr<const CovariateField> covariates,
                        std::vector<double> beta0 = {}, const FitOptions& options = {});

}  // namespace kclt
