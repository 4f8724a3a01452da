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
#include <cstdint>
#include <span>
#include <vector>

namespace kclt {

/// Axis-aligned cube [-side/2, side/2]^dim centered at the origin.
class Window {
public:
    Window(std::size_t dim, double side);

    std::size_t dim() const { return dim_; }
    double side() const { return side_; }
    double half() const { return 0.5 * side_; }
    double volume() const { return volume_; }

    bool contains(std::span<const double> u) const;

    friend bool operator==(const Window&, const Window&) = default;

private:
    std::size_t dim_;
    double side_;
    double volume_;
};

/// |W ∩ (W + h)| for the translation edge correction.
double overlap_volume(const Window& window, std::span<const double> h);

/// Translation edge-correction weight 1 / |W ∩ (W + h)|.
double edge_correction(const Window& window, std::span<const double> h);

/// A simple point pattern observed in a cubic window. Coordinates are stored
/// point-major: point i occupies [i*dim, (i+1)*dim).
class PointPattern {
public:
    PointPattern(Window window, std::vector<double> coordinates);

    static PointPattern empty(Window window) { return {window, {}}; }

    const Window& window() const { return window_; }
    std::size_t dim() const { return window_.dim(); }
    std::size_t size() const { return coordinates_.size() / window_.dim(); }
    bool empty() const { return coordinates_.empty(); }

    std::span<const double> point(std::size_t i) const
    {
        return {coordinates_.data() + i * dim(), dim()};
    }
    const std::vector<double>& coordinates() const { return coordinates_; }

    friend bool operator==(const PointPattern&, const PointPattern&) = default;

private:
    Window window_;
    std::vector<double> coordinates_;
};

/// Ordered close pairs (i, j), i != j, sorted by distance (ties by i, then j).
/// Both orientations of every pair are present.
class PairList {
public:
    struct Pair {
        std::uint32_t first;
        std::uint32_t second;
        double distance;
    };

    PairList(std::size_t dim, std::vector<Pair> pairs, std::vector<double> displacements)
        : dim_(dim), pairs_(std::move(pairs)), displacements_(std::move(displacements))
    {
    }

    std::size_t size() const { return pairs_.size(); }
    bool empty() const { return pairs_.empty(); }
    const Pair& operator[](std::size_t k) const { return pairs_[k]; }
    const std::vector<Pair>& pairs() const { return pairs_; }

    /// x_first - x_second for pair k.
    std::span<const double> displacement(std::size_t k) const
    {
        return {displacements_.data() + k * dim_, dim_};
    }

private:
    std::size_t dim_;
    std::vector<Pair> pairs_;
    std::vector<double> displacements_;
};

/// All ordered pairs with 0 < |x_i - x_j| <= rmax, found with a cell grid.
PairList close_pairs(const PointPattern& pattern, double rmax);

}  // namespace kclt
