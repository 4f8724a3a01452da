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

#include "kclt/asymcov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kclt/error.hpp"
#include "kclt/quadrature.hpp"

namespace kclt {

ProductDensityModel ProductDensityModel::poisson()
{
    return {"poisson", [](std::span<const double>) { return 1.0; },
            [](std::span<const double>, std::span<const double>) { return 1.0; },
            [](std::span<const double>, std::span<const double>, std::span<const double>) {
                return 1.0;
            }};
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& a)
{
    return 0.5 * (a + a.transpose());
}

double poisson_cov(double s, double t, double rho, IntensityMode mode, std::size_t dim)
{
    if (dim != 2) {
        throw DomainError("closed form available only in the plane");
    }
    if (!(s >= 0.0) || !(t >= 0.0)) {
        throw DomainError("radii must be nonnegative");
    }
    if (!(rho > 0.0)) {
        throw DomainError("intensity must be positive");
    }
    const double pi = std::numbers::pi;
    const double lo = std::min(s, t);
    const double estimated = 2.0 * pi * lo * lo / (rho * rho);
    if (mode == IntensityMode::estimated) {
        return estimated;
    }
    return estimated + 4.0 * pi * pi * s * s * t * t / rho;
}

LimitCovariance poisson_limit_covariance(const RadiusGrid& grid, double rho, IntensityMode mode,
                                         std::size_t dim)
{
    const auto m = static_cast<Eigen::Index>(grid.size());
    LimitCovariance out{grid, Eigen::MatrixXd(m, m)};
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            out.matrix(i, j) = poisson_cov(grid[static_cast<std::size_t>(i)],
                                           grid[static_cast<std::size_t>(j)], rho, mode, dim);
            out.matrix(j, i) = out.matrix(i, j);
        }
    }
    return out;
}

CovarianceBlocks poisson_blocks_exact(double beta, const RadiusGrid& grid)
{
    const std::size_t m = grid.size();
    const auto mi = static_cast<Eigen::Index>(m);
    CovarianceBlocks b{grid,
                       Eigen::MatrixXd::Constant(1, 1, beta),
                       Eigen::MatrixXd(mi, 1),
                       poisson_limit_covariance(grid, beta, IntensityMode::known).matrix,
                       std::vector<double>(m),
                       0.0,
                       std::vector<double>(m, 0.0),
                       {}};
    for (std::size_t i = 0; i < m; ++i) {
        b.k[i] = std::numbers::pi * grid[i] * grid[i];
        b.sigma2(static_cast<Eigen::Index>(i), 0) = 2.0 * b.k[i];
    }
    return b;
}

namespace {

double power(double x, std::size_t d)
{
    double v = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
        v *= x;
    }
    return v;
}

// Maps unit coordinates onto the cube [-r, r]^d; true when the point lies in B_r.
bool to_ball(std::span<const double> unit, double r, std::span<double> out)
{
    double n2 = 0.0;
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = (2.0 * unit[k] - 1.0) * r;
        n2 += out[k] * out[k];
    }
    return n2 <= r * r;
}

struct Estimate {
    double value;
    double error;
};

Estimate scaled(const QmcMean& q, std::size_t k, double volume)
{
    return {q.full[k] * volume, q.error(k) * volume};
}

// int_{B_r} g(x) dx.
Estimate ball_integral_g(const ProductDensityModel& model, double r, std::size_t d,
                         std::size_t samples)
{
    const QmcMean q = qmc_mean(d, samples, 1, [&](std::span<const double> u, std::span<double> out) {
        double x[8];
        std::span<double> xs(x, d);
        if (to_ball(u, r, xs)) {
            out[0] = model.g(xs);
        }
    });
    return scaled(q, 0, power(2.0 * r, d));
}

// int_{B_rt} (g(x) - 1) dx.
Estimate g_excess_integral(const ProductDensityModel& model, double rt, std::size_t d,
                           std::size_t samples)
{
    const QmcMean q = qmc_mean(d, samples, 1, [&](std::span<const double> u, std::span<double> out) {
        double x[8];
        std::span<double> xs(x, d);
        if (to_ball(u, rt, xs)) {
            out[0] = model.g(xs) - 1.0;
        }
    });
    return scaled(q, 0, power(2.0 * rt, d));
}

// int_{B_r} dx int_{B_rt} dy (g3(x, y) - g(x)).
Estimate g3_excess_integral(const ProductDensityModel& model, double r, double rt, std::size_t d,
                            std::size_t samples)
{
    const QmcMean q =
        qmc_mean(2 * d, samples, 1, [&](std::span<const double> u, std::span<double> out) {
            double x[8], y[8];
            std::span<double> xs(x, d), ys(y, d);
            if (to_ball(u.subspan(0, d), r, xs) && to_ball(u.subspan(d, d), rt, ys)) {
                out[0] = model.g3(xs, ys) - model.g(xs);
            }
        });
    return scaled(q, 0, power(2.0 * r, d) * power(2.0 * rt, d));
}

// int_{B_r1} dx int_{B_r2} dy g3(x, y).
Estimate g3_pair_integral(const ProductDensityModel& model, double r1, double r2, std::size_t d,
                          std::size_t samples)
{
    const QmcMean q =
        qmc_mean(2 * d, samples, 1, [&](std::span<const double> u, std::span<double> out) {
            double x[8], y[8];
            std::span<double> xs(x, d), ys(y, d);
            if (to_ball(u.subspan(0, d), r1, xs) && to_ball(u.subspan(d, d), r2, ys)) {
                out[0] = model.g3(xs, ys);
            }
        });
    return scaled(q, 0, power(2.0 * r1, d) * power(2.0 * r2, d));
}

// int_{B_r1} dx int_{B_r2} dw int_{B_rt} dz (g4(x, z + w, z) - g(x) g(w)).
Estimate g4_excess_integral(const ProductDensityModel& model, double r1, double r2, double rt,
                            std::size_t d, std::size_t samples)
{
    const QmcMean q =
        qmc_mean(3 * d, samples, 1, [&](std::span<const double> u, std::span<double> out) {
            double x[8], w[8], z[8], y[8];
            std::span<double> xs(x, d), ws(w, d), zs(z, d), ys(y, d);
            if (to_ball(u.subspan(0, d), r1, xs) && to_ball(u.subspan(d, d), r2, ws) &&
                to_ball(u.subspan(2 * d, d), rt, zs)) {
                for (std::size_t k = 0; k < d; ++k) {
                    y[k] = z[k] + w[k];
                }
                out[0] = model.g4(xs, ys, zs) - model.g(xs) * model.g(ws);
            }
        });
    return scaled(q, 0, power(2.0 * r1, d) * power(2.0 * r2, d) * power(2.0 * rt, d));
}

void check_quadrature(const ProductDensityModel& model, const QuadratureConfig& quad,
                      std::size_t dim)
{
    if (!model.g || !model.g3 || !model.g4) {
        throw DomainError("product density model is incomplete");
    }
    if (quad.samples < 2) {
        throw DomainError("quadrature needs at least two samples");
    }
    if (dim == 0 || dim > 8) {
        throw DomainError("quadrature supports dimensions 1 to 8");
    }
}

}  // namespace

CovarianceBlocks sigma_blocks_constant(const ProductDensityModel& model, double beta,
                                       const RadiusGrid& grid, const QuadratureConfig& quad,
                                       std::size_t dim)
{
    check_quadrature(model, quad, dim);
    if (!(beta > 0.0)) {
        throw DomainError("intensity must be positive");
    }
    const std::size_t m = grid.size();
    const auto mi = static_cast<Eigen::Index>(m);
    const double rt = quad.truncation_for(grid);
    const std::size_t s = quad.samples;

    CovarianceBlocks b{grid, Eigen::MatrixXd(1, 1), Eigen::MatrixXd(mi, 1), Eigen::MatrixXd(mi, mi),
                       std::vector<double>(m), 0.0, std::vector<double>(m), {}};

    const Estimate excess = g_excess_integral(model, rt, dim, s);
    b.g_excess = excess.value;
    b.sigma11(0, 0) = beta * beta * excess.value + beta;
    b.error.sigma11 = beta * beta * excess.error;

    std::vector<double> k_error(m);
    for (std::size_t i = 0; i < m; ++i) {
        const Estimate k = ball_integral_g(model, grid[i], dim, s);
        b.k[i] = k.value;
        k_error[i] = k.error;
        const Estimate j = g3_excess_integral(model, grid[i], rt, dim, s);
        b.g3_excess[i] = j.value;
        b.sigma2(static_cast<Eigen::Index>(i), 0) = beta * j.value + 2.0 * k.value;
        b.error.sigma2 = std::max(b.error.sigma2, beta * j.error + 2.0 * k.error);
    }

    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            const Estimate t4 = g4_excess_integral(model, grid[i], grid[j], rt, dim, s);
            const Estimate t3 = g3_pair_integral(model, grid[i], grid[j], dim, s);
            const double value =
                t4.value + 4.0 / beta * t3.value + 2.0 / (beta * beta) * b.k[std::min(i, j)];
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            b.c(ii, jj) = value;
            b.c(jj, ii) = value;
            b.error.c = std::max(b.error.c, t4.error + 4.0 / beta * t3.error +
                                                2.0 / (beta * beta) * k_error[std::min(i, j)]);
        }
    }
    return b;
}

LimitCovariance cov_estimated_constant(const CovarianceBlocks& blocks, double beta,
                                       const RadiusGrid& grid)
{
    if (!(blocks.grid == grid)) {
        throw DomainError("grid mismatch between blocks and request");
    }
    if (blocks.sigma11.rows() != 1 || blocks.k.size() != grid.size() ||
        blocks.g3_excess.size() != grid.size()) {
        throw DomainError("blocks do not describe a constant-intensity model");
    }
    if (!(beta > 0.0)) {
        throw DomainError("intensity must be positive");
    }
    const auto m = static_cast<Eigen::Index>(grid.size());
    LimitCovariance out{grid, Eigen::MatrixXd(m, m)};
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            const double ki = blocks.k[static_cast<std::size_t>(i)];
            const double kj = blocks.k[static_cast<std::size_t>(j)];
            const double ji = blocks.g3_excess[static_cast<std::size_t>(i)];
            const double jj = blocks.g3_excess[static_cast<std::size_t>(j)];
            out.matrix(i, j) = blocks.c(i, j) - 2.0 * (ki * jj + kj * ji) +
                               4.0 * ki * kj * (blocks.g_excess - 1.0 / beta);
        }
    }
    out.matrix = symmetrized(out.matrix);
    return out;
}

LimitCovariance compose_lim_cov(const Curve& h, const CovarianceBlocks& blocks)
{
    if (!(h.grid == blocks.grid)) {
        throw DomainError("grid mismatch between H and covariance blocks");
    }
    const auto m = static_cast<Eigen::Index>(blocks.grid.size());
    const auto p = static_cast<Eigen::Index>(h.width);
    if (blocks.sigma11.rows() != p || blocks.sigma11.cols() != p || blocks.sigma2.rows() != m ||
        blocks.sigma2.cols() != p || blocks.c.rows() != m || blocks.c.cols() != m) {
        throw DomainError("dimension mismatch between H and covariance blocks");
    }
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        hm(h.values.data(), m, p);
    const Eigen::MatrixXd cross = hm * blocks.sigma2.transpose();  // (s, t) -> H(s) S2_t
    LimitCovariance out{blocks.grid, Eigen::MatrixXd(m, m)};
    out.matrix = hm * blocks.sigma11 * hm.transpose() + cross + cross.transpose() + blocks.c;
    if (blocks.c == blocks.c.transpose()) {
        out.matrix = symmetrized(out.matrix);
    }
    return out;
}

Eigen::MatrixXd joint_cov(const Eigen::MatrixXd& h_rows, const Eigen::MatrixXd& sigma)
{
    const Eigen::Index k = h_rows.rows();
    const Eigen::Index p = h_rows.cols();
    if (sigma.rows() != p + k || sigma.cols() != p + k) {
        throw DomainError("shape mismatch: sigma must be (p+k) x (p+k)");
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(p + k, p + k);
    a.bottomLeftCorner(k, p) = h_rows;
    return symmetrized(a * sigma * a.transpose());
}

// ---------------------------------------------------------------------------
// Log-linear model

namespace {

// Box of u with u + shift_i inside the window for every shift; false if empty.
bool shifted_box(const Window& w, std::initializer_list<std::span<const double>> shifts,
                 std::span<double> lo, std::span<double> hi)
{
    const double h = w.half();
    for (std::size_t k = 0; k < lo.size(); ++k) {
        lo[k] = -h;
        hi[k] = h;
        for (auto s : shifts) {
            lo[k] = std::max(lo[k], -h - s[k]);
            hi[k] = std::min(hi[k], h - s[k]);
        }
        if (!(hi[k] > lo[k])) {
            return false;
        }
    }
    return true;
}

void to_box(std::span<const double> unit, std::span<const double> lo, std::span<const double> hi,
            std::span<double> out)
{
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = lo[k] + unit[k] * (hi[k] - lo[k]);
    }
}

struct FieldView {
    const CovariateField& field;
    std::span<const double> beta;

    std::span<const double> z(std::span<const double> u) const { return field.at(u); }
    double rho(std::span<const double> u) const
    {
        auto zu = field.at(u);
        double eta = 0.0;
        for (std::size_t j = 0; j < zu.size(); ++j) {
            eta += zu[j] * beta[j];
        }
        return std::exp(eta);
    }
};

}  // namespace

CovarianceBlocks LoglinearBlocks::parameter_blocks() const
{
    const Eigen::LDLT<Eigen::MatrixXd> solver(sensitivity);
    if (solver.info() != Eigen::Success) {
        throw DomainError("sensitivity is not invertible");
    }
    CovarianceBlocks out = score_blocks;
    const Eigen::MatrixXd left = solver.solve(score_blocks.sigma11);
    out.sigma11 = symmetrized(solver.solve(left.transpose()));
    out.sigma2 = solver.solve(score_blocks.sigma2.transpose()).transpose();
    return out;
}

LoglinearBlocks loglinear_sigma_blocks(std::shared_ptr<const CovariateField> field,
                                       std::span<const double> beta,
                                       const ProductDensityModel& model, const RadiusGrid& grid,
                                       const QuadratureConfig& quad)
{
    if (!field) {
        throw DomainError("log-linear blocks need a covariate field");
    }
    const Window& window = field->window();
    const std::size_t d = window.dim();
    check_quadrature(model, quad, d);
    const std::size_t p = field->covariates();
    if (beta.size() != p) {
        throw DomainError("parameter length mismatch");
    }
    const double rt = quad.truncation_for(grid);
    if (!(rt + grid.rmax() < window.side())) {
        throw DomainError("truncation radius plus rmax must be smaller than the window side");
    }
    const std::size_t s = quad.samples;
    const std::size_t m = grid.size();
    const auto mi = static_cast<Eigen::Index>(m);
    const auto pi = static_cast<Eigen::Index>(p);
    const FieldView fv{*field, beta};

    LoglinearBlocks out{CovarianceBlocks{grid, {}, {}, {}, {}, 0.0, {}, {}}, {},
                        Curve{grid, p, {}}, {}};
    const IntensityModel im = IntensityModel::loglinear(field, {beta.begin(), beta.end()});
    out.sensitivity = cl_sensitivity(im.as_loglinear(), window);
    {
        // LDLT::rcond() is blind to exact zero pivots, so check D directly.
        const Eigen::LDLT<Eigen::MatrixXd> check(out.sensitivity);
        const Eigen::VectorXd d = check.vectorD().cwiseAbs();
        if (check.info() != Eigen::Success || check.rcond() < 1e-10 ||
            !(d.minCoeff() > 1e-10 * d.maxCoeff())) {
            out.warnings.emplace_back("sensitivity matrix is nearly singular");
        }
    }

    CovarianceBlocks& b = out.score_blocks;
    b.grid = grid;
    b.sigma11 = Eigen::MatrixXd::Zero(pi, pi);
    b.sigma2 = Eigen::MatrixXd::Zero(mi, pi);
    b.c = Eigen::MatrixXd::Zero(mi, mi);
    b.k.assign(m, 0.0);
    b.g3_excess.assign(m, 0.0);

    // Upper-left: S + int_{B_rt} (g(v) - 1) avg_u[z(u) z(u-v)' rho(u) rho(u-v)] dv.
    {
        const QmcMean q =
            qmc_mean(2 * d, s, p * p, [&](std::span<const double> unit, std::span<double> acc) {
                double v[8], nv[8], u[8], uv[8], lo[8], hi[8];
                std::span<double> vs(v, d), nvs(nv, d), us(u, d), uvs(uv, d), los(lo, d),
                    his(hi, d);
                if (!to_ball(unit.subspan(0, d), rt, vs)) {
                    return;
                }
                const double excess = model.g(vs) - 1.0;
                if (excess == 0.0) {
                    return;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    nv[k] = -v[k];
                }
                if (!shifted_box(window, {nvs}, los, his)) {
                    return;
                }
                to_box(unit.subspan(d, d), los, his, us);
                for (std::size_t k = 0; k < d; ++k) {
                    uv[k] = u[k] - v[k];
                }
                auto za = fv.z(us);
                auto zb = fv.z(uvs);
                const double w = excess * fv.rho(us) * fv.rho(uvs);
                for (std::size_t a = 0; a < p; ++a) {
                    for (std::size_t c = 0; c < p; ++c) {
                        acc[a * p + c] = w * za[a] * zb[c];
                    }
                }
            });
        const double vol = power(2.0 * rt, d);
        for (std::size_t a = 0; a < p; ++a) {
            for (std::size_t c = 0; c < p; ++c) {
                b.sigma11(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) =
                    q.full[a * p + c] * vol;
                b.error.sigma11 = std::max(b.error.sigma11, q.error(a * p + c) * vol);
            }
        }
        b.sigma11 = symmetrized(b.sigma11) + out.sensitivity;
    }

    // K(r) and the lower-left block.
    for (std::size_t i = 0; i < m; ++i) {
        const double r = grid[i];
        const Estimate k = ball_integral_g(model, r, d, s);
        b.k[i] = k.value;

        // 2 int_{B_r} g(v) avg_u[z(u)] dv over u, u+v in W.
        const QmcMean pair =
            qmc_mean(2 * d, s, p, [&](std::span<const double> unit, std::span<double> acc) {
                double v[8], u[8], lo[8], hi[8];
                std::span<double> vs(v, d), us(u, d), los(lo, d), his(hi, d);
                if (!to_ball(unit.subspan(0, d), r, vs) ||
                    !shifted_box(window, {vs}, los, his)) {
                    return;
                }
                to_box(unit.subspan(d, d), los, his, us);
                const double gv = model.g(vs);
                auto zu = fv.z(us);
                for (std::size_t a = 0; a < p; ++a) {
                    acc[a] = 2.0 * gv * zu[a];
                }
            });
        // int_{B_r} dv1 int_{B_rt} dv2 (g3(v1,v2) - g(v1)) avg_u[z(u+v2) rho(u+v2)].
        const QmcMean triple =
            qmc_mean(3 * d, s, p, [&](std::span<const double> unit, std::span<double> acc) {
                double v1[8], v2[8], u[8], w[8], lo[8], hi[8];
                std::span<double> v1s(v1, d), v2s(v2, d), us(u, d), ws(w, d), los(lo, d),
                    his(hi, d);
                if (!to_ball(unit.subspan(0, d), r, v1s) ||
                    !to_ball(unit.subspan(d, d), rt, v2s)) {
                    return;
                }
                const double excess = model.g3(v1s, v2s) - model.g(v1s);
                if (excess == 0.0 || !shifted_box(window, {v1s, v2s}, los, his)) {
                    return;
                }
                to_box(unit.subspan(2 * d, d), los, his, us);
                for (std::size_t k = 0; k < d; ++k) {
                    w[k] = u[k] + v2[k];
                }
                auto zw = fv.z(ws);
                const double weight = excess * fv.rho(ws);
                for (std::size_t a = 0; a < p; ++a) {
                    acc[a] = weight * zw[a];
                }
            });
        const double vol_pair = power(2.0 * r, d);
        const double vol_triple = vol_pair * power(2.0 * rt, d);
        for (std::size_t a = 0; a < p; ++a) {
            b.sigma2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) =
                pair.full[a] * vol_pair + triple.full[a] * vol_triple;
            b.error.sigma2 = std::max(b.error.sigma2,
                                      pair.error(a) * vol_pair + triple.error(a) * vol_triple);
        }
    }

    // Lower-right block.
    std::vector<Estimate> first(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double r = grid[i];
        // 2 int_{B_r} g(w) avg_u[1 / (rho(u) rho(u-w))] dw.
        const QmcMean q =
            qmc_mean(2 * d, s, 1, [&](std::span<const double> unit, std::span<double> acc) {
                double w[8], nw[8], u[8], uw[8], lo[8], hi[8];
                std::span<double> ws(w, d), nws(nw, d), us(u, d), uws(uw, d), los(lo, d),
                    his(hi, d);
                if (!to_ball(unit.subspan(0, d), r, ws)) {
                    return;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    nw[k] = -w[k];
                }
                if (!shifted_box(window, {nws}, los, his)) {
                    return;
                }
                to_box(unit.subspan(d, d), los, his, us);
                for (std::size_t k = 0; k < d; ++k) {
                    uw[k] = u[k] - w[k];
                }
                acc[0] = 2.0 * model.g(ws) / (fv.rho(us) * fv.rho(uws));
            });
        first[i] = scaled(q, 0, power(2.0 * r, d));
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            const double ri = grid[i];
            const double rj = grid[j];
            // 4 int_{B_ri} dv int_{B_rj} dw g3(v, w) avg_u[1 / rho(u)].
            const QmcMean q =
                qmc_mean(3 * d, s, 1, [&](std::span<const double> unit, std::span<double> acc) {
                    double v[8], w[8], u[8], lo[8], hi[8];
                    std::span<double> vs(v, d), ws(w, d), us(u, d), los(lo, d), his(hi, d);
                    if (!to_ball(unit.subspan(0, d), ri, vs) ||
                        !to_ball(unit.subspan(d, d), rj, ws) ||
                        !shifted_box(window, {vs, ws}, los, his)) {
                        return;
                    }
                    to_box(unit.subspan(2 * d, d), los, his, us);
                    acc[0] = 4.0 * model.g3(vs, ws) / fv.rho(us);
                });
            const Estimate second = scaled(q, 0, power(2.0 * ri, d) * power(2.0 * rj, d));
            const Estimate fourth = g4_excess_integral(model, ri, rj, rt, d, s);
            const Estimate& pair_term = first[std::min(i, j)];
            const double value = pair_term.value + second.value + fourth.value;
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            b.c(ii, jj) = value;
            b.c(jj, ii) = value;
            b.error.c =
                std::max(b.error.c, pair_term.error + second.error + fourth.error);
        }
    }

    const Eigen::VectorXd zbar = field->mean();
    out.h_limit = Curve{grid, p, std::vector<double>(m * p)};
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t a = 0; a < p; ++a) {
            out.h_limit.values[i * p + a] = -2.0 * b.k[i] * zbar[static_cast<Eigen::Index>(a)];
        }
    }
    return out;
}

}  // namespace kclt
