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

#include "kclt/study.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "kclt/error.hpp"
#include "kclt/gof.hpp"
#include "kclt/intensity.hpp"
#include "kclt/kstat.hpp"

namespace kclt {

ModelSpec ModelSpec::poisson(double rho)
{
    ModelSpec s;
    s.kind = Kind::poisson;
    s.rho = rho;
    return s;
}

ModelSpec ModelSpec::matern_cluster(MaternParams params)
{
    ModelSpec s;
    s.kind = Kind::matern;
    s.matern = params;
    return s;
}

std::string ModelSpec::name() const
{
    return kind == Kind::poisson ? "poisson" : "matern";
}

double ModelSpec::intensity() const
{
    return kind == Kind::poisson ? rho : matern.kappa * matern.mu;
}

PointPattern ModelSpec::simulate(const Window& window, Seed seed) const
{
    if (kind == Kind::poisson) {
        return simulate_poisson(rho, window, seed);
    }
    return simulate_matern(matern, window, seed);
}

void StudyConfig::validate() const
{
    if (models.empty() || sides.empty() || modes.empty()) {
        throw DomainError("study needs at least one model, side and mode");
    }
    auto check_reps = [](std::size_t n) {
        if (n < 100 || n >= 1'000'000) {
            throw DomainError("replicates must lie in [100, 1e6)");
        }
    };
    check_reps(replicates);
    for (const auto& m : models) {
        check_reps(m.replicates.value_or(replicates));
        if (m.kind == ModelSpec::Kind::matern) {
            m.matern.validate();
        } else if (!(m.rho > 0.0)) {
            throw DomainError("Poisson intensity must be positive");
        }
    }
    for (double s : sides) {
        if (!(s > 0.0)) {
            throw DomainError("window sides must be positive");
        }
    }
    GofConfig probe;
    probe.R = R;
    probe.grid = grid;
    probe.alpha = alpha;
    probe.M = M;
    probe.validate();
}

const StudyCell* StudyResult::find(const std::string& model, double side, IntensityMode mode) const
{
    for (const auto& c : cells) {
        if (c.model == model && c.side == side && c.mode == mode) {
            return &c;
        }
    }
    return nullptr;
}

StudyResult rejection_study(const StudyConfig& config)
{
    config.validate();
    const Seed calibration_root = stream(config.seed, ~std::uint64_t{0});
    const std::size_t nmodes = config.modes.size();
    StudyResult result;

    for (std::size_t a = 0; a < config.models.size(); ++a) {
        const ModelSpec& model = config.models[a];
        const std::size_t reps = model.replicates.value_or(config.replicates);
        for (std::size_t b = 0; b < config.sides.size(); ++b) {
            const auto start = std::chrono::steady_clock::now();
            const std::uint64_t cell = a * config.sides.size() + b;
            const Window window(2, config.sides[b]);

            GofConfig gc;
            gc.R = config.R;
            gc.grid = config.grid;
            gc.alpha = config.alpha;
            gc.M = config.M;
            gc.seed = stream(calibration_root, cell);
            const GofCalibration calibration(gc);

            // outcome[r * nmodes + k]: 1 reject, 0 accept, -1 failed
            std::vector<signed char> outcome(reps * nmodes, -1);
#pragma omp parallel for schedule(dynamic, 8)
            for (std::size_t r = 0; r < reps; ++r) {
                try {
                    const PointPattern pattern =
                        model.simulate(window, stream(config.seed, cell * 1'000'000 + r));
                    for (std::size_t k = 0; k < nmodes; ++k) {
                        try {
                            outcome[r * nmodes + k] =
                                gof_test(pattern, calibration, config.modes[k]).reject ? 1 : 0;
                        } catch (const DomainError&) {
                        }
                    }
                } catch (const DomainError&) {
                }
            }
            const double seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

            for (std::size_t k = 0; k < nmodes; ++k) {
                StudyCell c;
                c.model = model.name();
                c.side = config.sides[b];
                c.mode = config.modes[k];
                c.wall_seconds = seconds;
                std::size_t rejects = 0;
                for (std::size_t r = 0; r < reps; ++r) {
                    const signed char o = outcome[r * nmodes + k];
                    if (o < 0) {
                        ++c.failures;
                    } else {
                        ++c.replicates;
                        rejects += static_cast<std::size_t>(o);
                    }
                }
                if (c.failures * 100 > reps) {
                    std::ostringstream msg;
                    msg << c.failures << " of " << reps << " replicates failed for " << c.model
                        << " on side " << c.side;
                    throw DomainError(msg.str());
                }
                c.rejection = c.replicates == 0 ? 0.0
                                                : static_cast<double>(rejects) /
                                                      static_cast<double>(c.replicates);
                c.standard_error =
                    c.replicates == 0
                        ? 0.0
                        : std::sqrt(c.rejection * (1.0 - c.rejection) /
                                    static_cast<double>(c.replicates));
                result.cells.push_back(c);
            }
        }
    }
    return result;
}

namespace {

struct Moments {
    std::vector<double> x, y;

    OracleEstimate covariance(double volume) const
    {
        const auto n = static_cast<double>(x.size());
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            mx += x[i];
            my += y[i];
        }
        mx /= n;
        my /= n;
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double prod = (x[i] - mx) * (y[i] - my);
            sum += prod;
            sum2 += prod * prod;
        }
        const double mean_prod = sum / n;
        const double var_prod = (sum2 / n - mean_prod * mean_prod) * n / (n - 1.0);
        return {volume * sum / (n - 1.0), volume * std::sqrt(std::max(var_prod, 0.0) / n)};
    }
};

}  // namespace

OracleComparison empirical_cov_both(const ModelSpec& model, double side, double r1, double r2,
                                    std::size_t replicates, Seed seed)
{
    if (replicates < 1000) {
        throw DomainError("covariance oracle needs at least 1000 replicates");
    }
    if (!(r1 > 0.0) || !(r2 > 0.0)) {
        throw DomainError("oracle radii must be positive");
    }
    const Window window(2, side);
    const double lo = std::min(r1, r2);
    const double hi = std::max(r1, r2);
    const RadiusGrid grid = lo < hi ? RadiusGrid(lo, hi, 2) : RadiusGrid(0.5 * hi, hi, 2);
    const std::size_t i1 = (r1 == hi) ? 1 : 0;
    const std::size_t i2 = (r2 == hi) ? 1 : 0;

    Moments known{std::vector<double>(replicates), std::vector<double>(replicates)};
    Moments estimated{std::vector<double>(replicates), std::vector<double>(replicates)};
    std::vector<char> failed(replicates, 0);
    const IntensityModel truth = IntensityModel::constant(model.intensity());

#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t r = 0; r < replicates; ++r) {
        try {
            const PointPattern pattern = model.simulate(window, stream(seed, r));
            const PairList pairs = close_pairs(pattern, grid.rmax());
            const Curve kk = k_hat(pattern, pairs, truth, grid);
            const Curve ke =
                k_hat(pattern, pairs, IntensityModel::constant(estimate_constant(pattern)), grid);
            known.x[r] = kk.values[i1];
            known.y[r] = kk.values[i2];
            estimated.x[r] = ke.values[i1];
            estimated.y[r] = ke.values[i2];
        } catch (const DomainError&) {
            failed[r] = 1;
        }
    }
    for (char f : failed) {
        if (f != 0) {
            throw DomainError("covariance oracle replicate failed (empty pattern?)");
        }
    }
    return {known.covariance(window.volume()), estimated.covariance(window.volume())};
}

OracleEstimate empirical_cov_oracle(const ModelSpec& model, double side, double r1, double r2,
                                    IntensityMode mode, std::size_t replicates, Seed seed)
{
    const OracleComparison both = empirical_cov_both(model, side, r1, r2, replicates, seed);
    return mode == IntensityMode::known ? both.known : both.estimated;
}

}  // namespace kclt
