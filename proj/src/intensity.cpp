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

#include "kclt/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kclt/error.hpp"

namespace kclt {

CovariateField::CovariateField(Window window, std::vector<std::size_t> resolution, std::size_t p,
                               std::vector<double> values)
    : window_(window), resolution_(std::move(resolution)), p_(p), values_(std::move(values))
{
    if (resolution_.size() != window_.dim()) {
        throw DomainError("covariate raster needs one resolution per axis");
    }
    if (p_ == 0) {
        throw DomainError("covariate raster needs at least one covariate");
    }
    std::size_t cells = 1;
    cell_volume_ = 1.0;
    for (std::size_t n : resolution_) {
        if (n == 0) {
            throw DomainError("covariate raster resolution must be positive");
        }
        cells *= n;
        cell_side_.push_back(window_.side() / static_cast<double>(n));
        cell_volume_ *= cell_side_.back();
    }
    if (values_.size() != cells * p_) {
        throw DomainError("covariate raster has " + std::to_string(values_.size()) +
                          " values, expected " + std::to_string(cells * p_));
    }
    if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); })) {
        throw DomainError("covariate raster has non-finite entries");
    }
}

CovariateField CovariateField::from_function(
    Window window, std::vector<std::size_t> resolution, std::size_t p,
    const std::function<void(std::span<const double>, std::span<double>)>& fn)
{
    std::size_t cells = 1;
    for (std::size_t n : resolution) {
        cells *= n;
    }
    // Build a placeholder to reuse the center computation.
    CovariateField field(window, resolution, p, std::vector<double>(cells * p, 0.0));
    std::vector<double> center(window.dim());
    for (std::size_t c = 0; c < cells; ++c) {
        field.cell_center(c, center);
        fn(center, {field.values_.data() + c * p, p});
    }
    if (!std::all_of(field.values_.begin(), field.values_.end(),
                     [](double v) { return std::isfinite(v); })) {
        throw DomainError("covariate function returned non-finite values");
    }
    return field;
}

std::size_t CovariateField::cell_index(std::span<const double> u) const
{
    std::size_t index = 0;
    std::size_t stride = 1;
    const double half = window_.half();
    for (std::size_t k = 0; k < resolution_.size(); ++k) {
        const double c = std::floor((u[k] + half) / cell_side_[k]);
        std::size_t ck = 0;
        if (c > 0.0) {
            ck = std::min(static_cast<std::size_t>(c), resolution_[k] - 1);
        }
        index += ck * stride;
        stride *= resolution_[k];
    }
    return index;
}

void CovariateField::cell_center(std::size_t c, std::span<double> out) const
{
    for (std::size_t k = 0; k < resolution_.size(); ++k) {
        const std::size_t ck = c % resolution_[k];
        c /= resolution_[k];
        out[k] = -window_.half() + (static_cast<double>(ck) + 0.5) * cell_side_[k];
    }
}

Eigen::VectorXd CovariateField::mean() const
{
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p_));
    for (std::size_t c = 0; c < cell_count(); ++c) {
        auto z = cell(c);
        for (std::size_t j = 0; j < p_; ++j) {
            acc[static_cast<Eigen::Index>(j)] += z[j];
        }
    }
    return acc / static_cast<double>(cell_count());
}

IntensityModel IntensityModel::constant(double beta)
{
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw DomainError("constant intensity must be positive and finite");
    }
    return IntensityModel(ConstantIntensity{beta});
}

IntensityModel IntensityModel::loglinear(std::shared_ptr<const CovariateField> covariates,
                                         std::vector<double> beta)
{
    if (!covariates) {
        throw DomainError("log-linear intensity needs a covariate field");
    }
    if (beta.size() != covariates->covariates()) {
        throw DomainError("log-linear parameter length " + std::to_string(beta.size()) +
                          " does not match " + std::to_string(covariates->covariates()) +
                          " covariates");
    }
    return IntensityModel(LogLinearIntensity{std::move(covariates), std::move(beta)});
}

std::size_t IntensityModel::parameter_count() const
{
    if (is_constant()) {
        return 1;
    }
    return as_loglinear().beta.size();
}

std::vector<double> IntensityModel::parameters() const
{
    if (is_constant()) {
        return {std::get<ConstantIntensity>(model_).beta};
    }
    return as_loglinear().beta;
}

IntensityModel IntensityModel::with_parameters(std::span<const double> beta) const
{
    if (is_constant()) {
        if (beta.size() != 1) {
            throw DomainError("constant intensity takes exactly one parameter");
        }
        return constant(beta[0]);
    }
    return loglinear(as_loglinear().covariates, {beta.begin(), beta.end()});
}

namespace {

double linear_predictor(std::span<const double> z, std::span<const double> beta)
{
    double eta = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
        eta += z[j] * beta[j];
    }
    return eta;
}

}  // namespace

double IntensityModel::value(std::span<const double> u) const
{
    if (is_constant()) {
        return std::get<ConstantIntensity>(model_).beta;
    }
    const auto& m = as_loglinear();
    return std::exp(linear_predictor(m.covariates->at(u), m.beta));
}

void IntensityModel::log_gradient(std::span<const double> u, std::span<double> out) const
{
    if (is_constant()) {
        out[0] = 1.0 / std::get<ConstantIntensity>(model_).beta;
        return;
    }
    auto z = as_loglinear().covariates->at(u);
    std::copy(z.begin(), z.end(), out.begin());
}

double estimate_constant(const PointPattern& pattern)
{
    if (pattern.empty()) {
        throw DomainError("zero estimated intensity");
    }
    return static_cast<double>(pattern.size()) / pattern.window().volume();
}

namespace {

void require_same_window(const PointPattern& pattern, const CovariateField& field)
{
    if (!(pattern.window() == field.window())) {
        throw DomainError("pattern and covariate field windows differ");
    }
}

// int_W z exp(z'beta) and int_W z z' exp(z'beta) by exact raster summation.
void raster_moments(const CovariateField& field, std::span<const double> beta,
                    Eigen::VectorXd* first, Eigen::MatrixXd* second)
{
    const auto p = static_cast<Eigen::Index>(field.covariates());
    if (first != nullptr) {
        first->setZero(p);
    }
    if (second != nullptr) {
        second->setZero(p, p);
    }
    const double vol = field.cell_volume();
    for (std::size_t c = 0; c < field.cell_count(); ++c) {
        auto z = field.cell(c);
        const Eigen::Map<const Eigen::VectorXd> zc(z.data(), p);
        const double w = vol * std::exp(linear_predictor(z, beta));
        if (first != nullptr) {
            *first += w * zc;
        }
        if (second != nullptr) {
            second->selfadjointView<Eigen::Lower>().rankUpdate(zc, w);
        }
    }
    if (second != nullptr) {
        *second = second->selfadjointView<Eigen::Lower>();
    }
}

Eigen::VectorXd covariate_sum(const PointPattern& pattern, const CovariateField& field)
{
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(field.covariates()));
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        auto z = field.at(pattern.point(i));
        for (std::size_t j = 0; j < z.size(); ++j) {
            sum[static_cast<Eigen::Index>(j)] += z[j];
        }
    }
    return sum;
}

}  // namespace

Eigen::VectorXd cl_score(const PointPattern& pattern, const LogLinearIntensity& model)
{
    require_same_window(pattern, *model.covariates);
    Eigen::VectorXd integral;
    raster_moments(*model.covariates, model.beta, &integral, nullptr);
    return covariate_sum(pattern, *model.covariates) - integral;
}

Eigen::MatrixXd cl_sensitivity(const LogLinearIntensity& model, const Window& window)
{
    if (!(window == model.covariates->window())) {
        throw DomainError("covariate field does not cover the window");
    }
    Eigen::MatrixXd second;
    raster_moments(*model.covariates, model.beta, nullptr, &second);
    return second / window.volume();
}

FitResult fit_loglinear(const PointPattern& pattern,
                        std::shared_ptr<const CovariateField> covariates,
                        std::vector<double> beta0, const FitOptions& options)
{
    if (!covariates) {
        throw DomainError("log-linear fit needs a covariate field");
    }
    if (pattern.empty()) {
        throw DomainError("cannot fit an intensity to an empty pattern");
    }
    require_same_window(pattern, *covariates);
    const std::size_t p = covariates->covariates();
    const double volume = pattern.window().volume();
    if (beta0.empty()) {
        beta0.assign(p, 0.0);
        beta0[0] = std::log(static_cast<double>(pattern.size()) / volume);
    }
    if (beta0.size() != p) {
        throw DomainError("initial parameter has the wrong length");
    }

    const Eigen::VectorXd observed = covariate_sum(pattern, *covariates);
    Eigen::VectorXd beta = Eigen::Map<const Eigen::VectorXd>(beta0.data(), static_cast<Eigen::Index>(p));

    auto score_at = [&](const Eigen::VectorXd& b) {
        Eigen::VectorXd integral;
        raster_moments(*covariates, {b.data(), p}, &integral, nullptr);
        return Eigen::VectorXd(observed - integral);
    };

    auto factor = [&](const Eigen::VectorXd& b) {
        Eigen::MatrixXd information;
        raster_moments(*covariates, {b.data(), p}, nullptr, &information);
        Eigen::LDLT<Eigen::MatrixXd> solver(information);
        const Eigen::VectorXd d = solver.vectorD().cwiseAbs();
        if (solver.info() != Eigen::Success || !(d.minCoeff() > 1e-13 * d.maxCoeff())) {
            throw DomainError("collinear covariates");
        }
        return solver;
    };

    // Identifiability does not depend on beta: z'v = 0 on the raster for some v.
    factor(beta);

    FitResult result;
    Eigen::VectorXd score = score_at(beta);
    for (;;) {
        result.score_norm = score.cwiseAbs().maxCoeff() / volume;
        if (result.score_norm <= options.tolerance) {
            result.converged = true;
            break;
        }
        if (result.iterations >= options.max_iterations) {
            break;
        }
        const Eigen::LDLT<Eigen::MatrixXd> solver = factor(beta);
        const Eigen::VectorXd step = solver.solve(score);
        ++result.iterations;

        const double current = score.norm();
        double scale = 1.0;
        Eigen::VectorXd trial = beta + step;
        Eigen::VectorXd trial_score = score_at(trial);
        int halvings = 0;
        while (!(trial_score.allFinite() && trial_score.norm() <= current) &&
               halvings < options.max_halvings) {
            scale *= 0.5;
            ++halvings;
            trial = beta + scale * step;
            trial_score = score_at(trial);
        }
        if (!(trial_score.allFinite() && trial_score.norm() <= current)) {
            // No descent along the Newton direction; report the current iterate.
            break;
        }
        beta = trial;
        score = trial_score;
    }
    result.beta_hat.assign(beta.data(), beta.data() + p);
    return result;
}

}  // namespace kclt
