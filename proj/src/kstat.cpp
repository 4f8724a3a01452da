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

#include "kclt/kstat.hpp"

#include <cmath>
#include <numbers>

#include "kclt/error.hpp"

namespace kclt {

RadiusGrid::RadiusGrid(double rmin, double rmax, std::size_t count)
{
    if (!(rmin > 0.0) || !(rmin < rmax) || !std::isfinite(rmax)) {
        throw DomainError("radius grid needs 0 < rmin < rmax");
    }
    if (count < 2) {
        throw DomainError("radius grid needs at least two points");
    }
    values_.resize(count);
    const double step = (rmax - rmin) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i + 1 < count; ++i) {
        values_[i] = rmin + step * static_cast<double>(i);
    }
    values_.back() = rmax;
}

RadiusGrid RadiusGrid::uniform(double rmax, std::size_t count)
{
    if (count < 2) {
        throw DomainError("radius grid needs at least two points");
    }
    return RadiusGrid(rmax / static_cast<double>(count), rmax, count);
}

namespace {

// Neumaier-compensated running sum; keeps prefix sums exact to a few ulps.
class CompensatedSum {
public:
    void add(double x)
    {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct PointTerms {
    std::vector<double> inv_rho;
    std::vector<double> gradient;  // size n * p
};

PointTerms point_terms(const PointPattern& pattern, const IntensityModel& model, bool need_gradient)
{
    const std::size_t n = pattern.size();
    const std::size_t p = model.parameter_count();
    PointTerms t;
    t.inv_rho.resize(n);
    if (need_gradient) {
        t.gradient.resize(n * p);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double rho = model.value(pattern.point(i));
        if (!(rho > 0.0) || !std::isfinite(rho)) {
            throw DomainError("invalid intensity");
        }
        t.inv_rho[i] = 1.0 / rho;
        if (need_gradient) {
            model.log_gradient(pattern.point(i), {t.gradient.data() + i * p, p});
        }
    }
    return t;
}


KCurves accumulate(const PointPattern& pattern, const PairList& pairs, const IntensityModel& model,
                   const RadiusGrid& grid, bool need_h)
{
    const std::size_t m = grid.size();
    const std::size_t p = model.parameter_count();
    KCurves out{Curve{grid, 1, std::vector<double>(m, 0.0)},
                Curve{grid, p, std::vector<double>(need_h ? m * p : 0, 0.0)}};
    if (pattern.size() < 2) {
        return out;
    }
    const PointTerms terms = point_terms(pattern, model, need_h);
    const Window& window = pattern.window();

    CompensatedSum k_sum;
    std::vector<CompensatedSum> h_sum(need_h ? p : 0);
    auto record = [&](std::size_t g) {
        out.k.values[g] = k_sum.value();
        for (std::size_t c = 0; c < h_sum.size(); ++c) {
            out.h.values[g * p + c] = -h_sum[c].value();
        }
    };

    std::size_t g = 0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto& pr = pairs[k];
        while (g < m && pr.distance > grid[g]) {
            record(g++);
        }
        if (g == m) {
            break;
        }
        const double w = edge_correction(window, pairs.displacement(k)) *
                         terms.inv_rho[pr.first] * terms.inv_rho[pr.second];
        k_sum.add(w);
        for (std::size_t c = 0; c < h_sum.size(); ++c) {
            h_sum[c].add(w * (terms.gradient[pr.first * p + c] +
                              terms.gradient[pr.second * p + c]));
        }
    }
    while (g < m) {
        record(g++);
    }
    return out;
}

}  // namespace

KCurves k_and_h(const PointPattern& pattern, const PairList& pairs, const IntensityModel& model,
                const RadiusGrid& grid)
{
    return accumulate(pattern, pairs, model, grid, true);
}

Curve k_hat(const PointPattern& pattern, const PairList& pairs, const IntensityModel& model,
            const RadiusGrid& grid)
{
    return accumulate(pattern, pairs, model, grid, false).k;
}

Curve k_hat(const PointPattern& pattern, const IntensityModel& model, const RadiusGrid& grid)
{
    return k_hat(pattern, close_pairs(pattern, grid.rmax()), model, grid);
}

Curve h_matrix(const PointPattern& pattern, const IntensityModel& model, const RadiusGrid& grid)
{
    return accumulate(pattern, close_pairs(pattern, grid.rmax()), model, grid, true).h;
}

double k_poisson(double r, std::size_t dim)
{
    if (!(r >= 0.0)) {
        throw DomainError("radius must be nonnegative");
    }
    if (dim == 0) {
        throw DomainError("dimension must be at least 1");
    }
    const double d = static_cast<double>(dim);
    const double unit_ball = std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
    return unit_ball * std::pow(r, d);
}

Curve taylor_residual(const PointPattern& pattern, const IntensityModel& model_star,
                      std::span<const double> beta_hat, const RadiusGrid& grid)
{
    const std::size_t p = model_star.parameter_count();
    if (beta_hat.size() != p) {
        throw DomainError("parameter length mismatch");
    }
    const PairList pairs = close_pairs(pattern, grid.rmax());
    const IntensityModel model_hat = model_star.with_parameters(beta_hat);
    const KCurves star = k_and_h(pattern, pairs, model_star, grid);
    const Curve plug_in = k_hat(pattern, pairs, model_hat, grid);
    const std::vector<double> beta_star = model_star.parameters();

    Curve out{grid, 1, std::vector<double>(grid.size())};
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double linear = 0.0;
        for (std::size_t c = 0; c < p; ++c) {
            linear += star.h.at(g, c) * (beta_hat[c] - beta_star[c]);
        }
        out.values[g] = plug_in.values[g] - star.k.values[g] - linear;
    }
    return out;
}

}  // namespace kclt
