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

#include "kclt/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace kclt::io {

namespace {

std::string_view trim(std::string_view s)
{
    const auto blank = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && blank(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && blank(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

std::ifstream open_input(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path.string());
    }
    return in;
}

std::string line_error(std::size_t line, const std::string& what)
{
    return "line " + std::to_string(line) + ": " + what;
}

}  // namespace

std::string format_double(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return {buf, res.ptr};
}

double parse_double(std::string_view text)
{
    text = trim(text);
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw InputError("not a number: '" + std::string(text) + "'");
    }
    return value;
}

std::vector<std::string_view> split_csv(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            return out;
        }
        start = comma + 1;
    }
}

std::string pattern_header(std::size_t dim)
{
    static constexpr const char* short_names[] = {"x", "y", "z"};
    std::string h;
    for (std::size_t k = 0; k < dim; ++k) {
        if (k > 0) {
            h += ',';
        }
        h += dim <= 3 ? std::string(short_names[k]) : "x" + std::to_string(k + 1);
    }
    return h;
}

void write_pattern_csv(std::ostream& os, const PointPattern& pattern)
{
    os << pattern_header(pattern.dim()) << '\n';
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        const auto p = pattern.point(i);
        for (std::size_t k = 0; k < p.size(); ++k) {
            os << (k > 0 ? "," : "") << format_double(p[k]);
        }
        os << '\n';
    }
}

PointPattern read_pattern_csv(std::istream& is, const Window& window)
{
    std::string line;
    if (!std::getline(is, line)) {
        throw InputError("pattern CSV is empty");
    }
    const auto header = split_csv(line);
    std::string joined;
    for (std::size_t k = 0; k < header.size(); ++k) {
        joined += (k > 0 ? "," : "") + std::string(header[k]);
    }
    if (joined != pattern_header(window.dim())) {
        throw InputError("pattern CSV header '" + joined + "' does not match dimension " +
                         std::to_string(window.dim()));
    }
    std::vector<double> coords;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_csv(line);
        if (fields.size() != window.dim()) {
            throw InputError(line_error(lineno, "expected " + std::to_string(window.dim()) +
                                                    " fields"));
        }
        for (auto f : fields) {
            try {
                coords.push_back(parse_double(f));
            } catch (const InputError& e) {
                throw InputError(line_error(lineno, e.what()));
            }
        }
    }
    return {window, std::move(coords)};
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv)
{
    return std::filesystem::path(csv.string() + ".json");
}

void save_pattern(const std::filesystem::path& csv, const PointPattern& pattern)
{
    std::ofstream out(csv);
    if (!out) {
        throw InputError("cannot write " + csv.string());
    }
    write_pattern_csv(out, pattern);
    std::ofstream side(sidecar_path(csv));
    if (!side) {
        throw InputError("cannot write " + sidecar_path(csv).string());
    }
    nlohmann::ordered_json meta;
    meta["side"] = pattern.window().side();
    meta["dim"] = pattern.dim();
    side << meta.dump() << '\n';
}

PointPattern load_pattern(const std::filesystem::path& csv, std::optional<double> side,
                          std::optional<std::size_t> dim)
{
    if (!side || !dim) {
        const auto meta_path = sidecar_path(csv);
        if (!std::filesystem::exists(meta_path)) {
            throw InputError("no window given: pass --side/--dim or provide " +
                             meta_path.string());
        }
        auto in = open_input(meta_path);
        try {
            const auto meta = nlohmann::json::parse(in);
            if (!side) {
                side = meta.at("side").get<double>();
            }
            if (!dim) {
                dim = meta.at("dim").get<std::size_t>();
            }
        } catch (const nlohmann::json::exception& e) {
            throw InputError(meta_path.string() + ": " + e.what());
        }
    }
    auto in = open_input(csv);
    try {
        return read_pattern_csv(in, Window(*dim, *side));
    } catch (const InputError& e) {
        throw InputError(csv.string() + ": " + e.what());
    }
}

void write_covariates(std::ostream& os, const CovariateField& field)
{
    nlohmann::ordered_json header;
    header["side"] = field.window().side();
    header["dim"] = field.window().dim();
    header["resolution"] = field.resolution();
    header["p"] = field.covariates();
    os << header.dump() << '\n';
    for (std::size_t c = 0; c < field.cell_count(); ++c) {
        const auto z = field.cell(c);
        for (std::size_t k = 0; k < z.size(); ++k) {
            os << (k > 0 ? "," : "") << format_double(z[k]);
        }
        os << '\n';
    }
}

CovariateField read_covariates(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) {
        throw InputError("covariate file is empty");
    }
    double side = 0.0;
    std::size_t dim = 0, p = 0;
    std::vector<std::size_t> resolution;
    try {
        const auto header = nlohmann::json::parse(line);
        side = header.at("side").get<double>();
        dim = header.at("dim").get<std::size_t>();
        p = header.at("p").get<std::size_t>();
        resolution = header.at("resolution").get<std::vector<std::size_t>>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("covariate header: ") + e.what());
    }
    std::vector<double> values;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_csv(line);
        if (fields.size() != p) {
            throw InputError(line_error(lineno, "expected " + std::to_string(p) + " fields"));
        }
        for (auto f : fields) {
            try {
                values.push_back(parse_double(f));
            } catch (const InputError& e) {
                throw InputError(line_error(lineno, e.what()));
            }
        }
    }
    return {Window(dim, side), std::move(resolution), p, std::move(values)};
}

CovariateField load_covariates(const std::filesystem::path& path)
{
    auto in = open_input(path);
    try {
        return read_covariates(in);
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

void write_curve_csv(std::ostream& os, const Curve& k, const Curve* h)
{
    os << "r,khat";
    if (h != nullptr) {
        for (std::size_t j = 0; j < h->width; ++j) {
            os << ",h_" << j + 1;
        }
    }
    os << '\n';
    for (std::size_t i = 0; i < k.grid.size(); ++i) {
        os << format_double(k.grid[i]) << ',' << format_double(k.at(i));
        if (h != nullptr) {
            for (double v : h->row(i)) {
                os << ',' << format_double(v + 0.0);  // prints 0, not -0
            }
        }
        os << '\n';
    }
}

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m)
{
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        os << (j > 0 ? ",c" : "c") << j + 1;
    }
    os << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            os << (j > 0 ? "," : "") << format_double(m(i, j));
        }
        os << '\n';
    }
}

Eigen::MatrixXd read_matrix_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) {
        throw InputError("matrix CSV is empty");
    }
    const std::size_t cols = split_csv(line).size();
    std::vector<double> values;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_csv(line);
        if (fields.size() != cols) {
            throw InputError(line_error(lineno, "expected " + std::to_string(cols) + " fields"));
        }
        for (auto f : fields) {
            try {
                values.push_back(parse_double(f));
            } catch (const InputError& e) {
                throw InputError(line_error(lineno, e.what()));
            }
        }
    }
    const auto rows = static_cast<Eigen::Index>(values.size() / cols);
    Eigen::MatrixXd m(rows, static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            m(i, j) = values[static_cast<std::size_t>(i) * cols + static_cast<std::size_t>(j)];
        }
    }
    return m;
}

Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path)
{
    auto in = open_input(path);
    try {
        return read_matrix_csv(in);
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

}  // namespace kclt::io
