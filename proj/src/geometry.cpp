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

#include "kclt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "kclt/error.hpp"
#include "kclt/simd/kernels.hpp"

namespace kclt {

Window::Window(std::size_t dim, double side) : dim_(dim), side_(side), volume_(1.0)
{
    if (dim == 0) {
        throw DomainError("window dimension must be at least 1");
    }
    if (!(side > 0.0) || !std::isfinite(side)) {
        throw DomainError("window side must be positive and finite");
    }
    for (std::size_t k = 0; k < dim; ++k) {
        volume_ *= side;
    }
}

bool Window::contains(std::span<const double> u) const
{
    if (u.size() != dim_) {
        return false;
    }
    const double h = half();
    return std::all_of(u.begin(), u.end(), [h](double x) { return std::fabs(x) <= h; });
}

double overlap_volume(const Window& window, std::span<const double> h)
{
    double volume = 1.0;
    for (double hk : h) {
        volume *= std::max(window.side() - std::fabs(hk), 0.0);
    }
    return volume;
}

double edge_correction(const Window& window, std::span<const double> h)
{
    const double overlap = overlap_volume(window, h);
    if (!(overlap > 0.0)) {
        throw DomainError("pair displacement exceeds window");
    }
    return 1.0 / overlap;
}

PointPattern::PointPattern(Window window, std::vector<double> coordinates)
    : window_(window), coordinates_(std::move(coordinates))
{
    const std::size_t d = window_.dim();
    if (coordinates_.size() % d != 0) {
        throw DomainError("coordinate count is not a multiple of the dimension");
    }
    const std::size_t n = coordinates_.size() / d;
    for (std::size_t i = 0; i < n; ++i) {
        auto u = point(i);
        if (!std::all_of(u.begin(), u.end(), [](double x) { return std::isfinite(x); })) {
            throw DomainError("point " + std::to_string(i) + " has a non-finite coordinate");
        }
        if (!window_.contains(u)) {
            throw DomainError("point " + std::to_string(i) + " lies outside the window");
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto less = [&](std::size_t a, std::size_t b) {
        auto pa = point(a), pb = point(b);
        return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
    };
    std::sort(order.begin(), order.end(), less);
    for (std::size_t k = 1; k < n; ++k) {
        auto pa = point(order[k - 1]), pb = point(order[k]);
        if (std::equal(pa.begin(), pa.end(), pb.begin())) {
            throw DomainError("duplicate point at index " + std::to_string(order[k]));
        }
    }
}

namespace {

constexpr std::size_t max_cells = std::size_t{1} << 22;

// Uniform grid over the window with cells of side >= rmax and points bucketed
// by cell in structure-of-arrays order.
struct CellGrid {
    std::size_t dim;
    std::size_t per_axis;
    double cell_side;
    std::vector<std::size_t> start;   // cell -> first slot, size cells+1
    std::vector<std::uint32_t> order;  // slot -> point index
    std::vector<std::vector<double>> axes;

    CellGrid(const PointPattern& pattern, double rmax)
        : dim(pattern.dim()), per_axis(1), cell_side(pattern.window().side())
    {
        const double side = pattern.window().side();
        const std::size_t n = pattern.size();
        auto fit = static_cast<std::size_t>(std::floor(side / rmax));
        per_axis = std::max<std::size_t>(fit, 1);
        // Keep the cell count bounded; larger cells remain correct.
        const std::size_t budget = std::min(max_cells, std::max<std::size_t>(4 * n, 1));
        while (per_axis > 1 && ipow(per_axis) > budget) {
            per_axis = std::max<std::size_t>(per_axis / 2, 1);
        }
        cell_side = side / static_cast<double>(per_axis);

        const std::size_t cells = ipow(per_axis);
        std::vector<std::size_t> cell_of(n);
        start.assign(cells + 1, 0);
        for (std::size_t i = 0; i < n; ++i) {
            cell_of[i] = linear_cell(pattern.point(i), pattern.window().half());
            ++start[cell_of[i] + 1];
        }
        std::partial_sum(start.begin(), start.end(), start.begin());
        order.resize(n);
        std::vector<std::size_t> fill(start.begin(), start.end() - 1);
        for (std::size_t i = 0; i < n; ++i) {
            order[fill[cell_of[i]]++] = static_cast<std::uint32_t>(i);
        }
        axes.assign(dim, std::vector<double>(n));
        for (std::size_t slot = 0; slot < n; ++slot) {
            auto u = pattern.point(order[slot]);
            for (std::size_t k = 0; k < dim; ++k) {
                axes[k][slot] = u[k];
            }
        }
    }

    std::size_t ipow(std::size_t base) const
    {
        std::size_t v = 1;
        for (std::size_t k = 0; k < dim; ++k) {
            if (v > max_cells) {
                return max_cells + 1;
            }
            v *= base;
        }
        return v;
    }

    std::size_t axis_cell(double x, double half) const
    {
        const double c = std::floor((x + half) / cell_side);
        if (c <= 0.0) {
            return 0;
        }
        return std::min(static_cast<std::size_t>(c), per_axis - 1);
    }

    std::size_t linear_cell(std::span<const double> u, double half) const
    {
        std::size_t index = 0;
        std::size_t stride = 1;
        for (std::size_t k = 0; k < dim; ++k) {
            index += axis_cell(u[k], half) * stride;
            stride *= per_axis;
        }
        return index;
    }
};

}  // namespace

PairList close_pairs(const PointPattern& pattern, double rmax)
{
    if (!(rmax > 0.0)) {
        throw DomainError("rmax must be positive");
    }
    const std::size_t d = pattern.dim();
    const std::size_t n = pattern.size();
    if (n < 2) {
        return PairList(d, {}, {});
    }

    const CellGrid grid(pattern, rmax);
    const auto& kern = simd::kernels();
    const double r2 = rmax * rmax;
    const double half = pattern.window().half();

    std::vector<const double*> axis_ptr(d);
    std::vector<std::uint32_t> hit_index(n);
    std::vector<double> hit_d2(n);
    std::vector<std::size_t> home(d);
    std::vector<int> offset(d);
    std::vector<PairList::Pair> pairs;

    std::size_t neighbours = 1;
    for (std::size_t k = 0; k < d; ++k) {
        neighbours *= 3;
    }

    for (std::size_t i = 0; i < n; ++i) {
        auto q = pattern.point(i);
        for (std::size_t k = 0; k < d; ++k) {
            home[k] = grid.axis_cell(q[k], half);
        }
        for (std::size_t code = 0; code < neighbours; ++code) {
            std::size_t rest = code;
            std::size_t cell = 0;
            std::size_t stride = 1;
            bool inside = true;
            for (std::size_t k = 0; k < d; ++k) {
                const auto step = static_cast<long>(rest % 3) - 1;
                rest /= 3;
                const long c = static_cast<long>(home[k]) + step;
                if (c < 0 || c >= static_cast<long>(grid.per_axis)) {
                    inside = false;
                    break;
                }
                cell += static_cast<std::size_t>(c) * stride;
                stride *= grid.per_axis;
            }
            if (!inside) {
                continue;
            }
            const std::size_t first = grid.start[cell];
            const std::size_t count = grid.start[cell + 1] - first;
            if (count == 0) {
                continue;
            }
            for (std::size_t k = 0; k < d; ++k) {
                axis_ptr[k] = grid.axes[k].data() + first;
            }
            const std::size_t found = kern.radius_filter(axis_ptr.data(), d, count, q.data(), r2,
                                                         hit_index.data(), hit_d2.data());
            for (std::size_t h = 0; h < found; ++h) {
                pairs.push_back({static_cast<std::uint32_t>(i), grid.order[first + hit_index[h]],
                                 std::sqrt(hit_d2[h])});
            }
        }
    }

    std::sort(pairs.begin(), pairs.end(), [](const PairList::Pair& a, const PairList::Pair& b) {
        if (a.distance != b.distance) {
            return a.distance < b.distance;
        }
        if (a.first != b.first) {
            return a.first < b.first;
        }
        return a.second < b.second;
    });

    std::vector<double> displacements(pairs.size() * d);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        auto x = pattern.point(pairs[p].first);
        auto y = pattern.point(pairs[p].second);
        for (std::size_t k = 0; k < d; ++k) {
            displacements[p * d + k] = x[k] - y[k];
        }
    }
    return PairList(d, std::move(pairs), std::move(displacements));
}

}  // namespace kclt
