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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "kclt/error.hpp"
#include "kclt/geometry.hpp"
#include "kclt/intensity.hpp"
#include "kclt/kstat.hpp"

namespace kclt::io {

/// Malformed or missing input file.
class InputError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Shortest form that still carries 17 significant digits.
std::string format_double(double x);
double parse_double(std::string_view text);

/// Splits one CSV line on commas; fields are trimmed of blanks.
std::vector<std::string_view> split_csv(std::string_view line);

/// Header `x,y[,z]` for d <= 3, `x1,...,xd` otherwise.
std::string pattern_header(std::size_t dim);

void write_pattern_csv(std::ostream& os, const PointPattern& pattern);
PointPattern read_pattern_csv(std::istream& is, const Window& window);

std::filesystem::path sidecar_path(const std::filesystem::path& csv);

/// Writes the CSV and its `<csv>.json` window sidecar.
void save_pattern(const std::filesystem::path& csv, const PointPattern& pattern);

/// Window from the flags, falling back to the sidecar for whatever is unset.
PointPattern load_pattern(const std::filesystem::path& csv, std::optional<double> side = {},
                          std::optional<std::size_t> dim = {});

/// One JSON header line {side, dim, resolution, p}, then one cell per line.
void write_covariates(std::ostream& os, const CovariateField& field);
CovariateField read_covariates(std::istream& is);
CovariateField load_covariates(const std::filesystem::path& path);

/// Columns r,khat[,h_1..h_p].
void write_curve_csv(std::ostream& os, const Curve& k, const Curve* h = nullptr);

/// Header c1..cn, one row per line.
void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(std::istream& is);
Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path);

}  // namespace kclt::io
