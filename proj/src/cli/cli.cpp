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

#include "kclt/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include <omp.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "kclt/asymcov.hpp"
#include "kclt/gof.hpp"
#include "kclt/intensity.hpp"
#include "kclt/io.hpp"
#include "kclt/kstat.hpp"
#include "kclt/limitlaw.hpp"
#include "kclt/simulate.hpp"
#include "kclt/study.hpp"

namespace kclt::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

const std::map<std::string, IntensityMode> mode_names{{"known", IntensityMode::known},
                                                     {"estimated", IntensityMode::estimated}};

std::string mode_name(IntensityMode mode)
{
    return mode == IntensityMode::known ? "known" : "estimated";
}

IntensityMode parse_mode(const std::string& s)
{
    const auto it = mode_names.find(s);
    if (it == mode_names.end()) {
        throw io::InputError("unknown intensity mode '" + s + "'");
    }
    return it->second;
}

json read_json_file(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw io::InputError("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw io::InputError(path.string() + ": " + e.what());
    }
}

/// Output file or the command's stdout.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : out_(&fallback)
    {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) {
                throw io::InputError("cannot write " + path);
            }
            out_ = &file_;
        }
    }
    std::ostream& stream() { return *out_; }

private:
    std::ofstream file_;
    std::ostream* out_;
};

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream f(path);
    if (!f) {
        throw io::InputError("cannot write " + path.string());
    }
    f << text;
}

// Fills unset options from a JSON config whose keys match the long flag names.
template <class T>
void from_config(const json& config, const char* key, const CLI::Option* opt, T& target)
{
    if (opt->count() == 0 && config.contains(key)) {
        try {
            target = config.at(key).get<T>();
        } catch (const json::exception& e) {
            throw io::InputError(std::string("config key '") + key + "': " + e.what());
        }
    }
}

std::optional<double> opt_double(const CLI::Option* opt, double value)
{
    return opt->count() > 0 ? std::optional<double>(value) : std::nullopt;
}

std::optional<std::size_t> opt_size(const CLI::Option* opt, std::size_t value)
{
    return opt->count() > 0 ? std::optional<std::size_t>(value) : std::nullopt;
}

struct WindowFlags {
    double side = 1.0;
    std::size_t dim = 2;
    CLI::Option* side_opt = nullptr;
    CLI::Option* dim_opt = nullptr;

    void add(CLI::App* cmd)
    {
        side_opt = cmd->add_option("--side", side, "Window side length (overrides the sidecar)");
        dim_opt = cmd->add_option("--dim", dim, "Window dimension (overrides the sidecar)");
    }

    PointPattern load(const std::string& csv) const
    {
        return io::load_pattern(csv, opt_double(side_opt, side), opt_size(dim_opt, dim));
    }
};

double max_loglinear_intensity(const CovariateField& field, const std::vector<double>& beta)
{
    double best = 0.0;
    for (std::size_t c = 0; c < field.cell_count(); ++c) {
        const auto z = field.cell(c);
        double eta = 0.0;
        for (std::size_t k = 0; k < beta.size(); ++k) {
            eta += z[k] * beta[k];
        }
        best = std::max(best, std::exp(eta));
    }
    return best;
}

std::shared_ptr<const CovariateField> load_field(const std::string& path)
{
    if (path.empty()) {
        throw UsageError("--covariates is required for the log-linear model");
    }
    return std::make_shared<const CovariateField>(io::load_covariates(path));
}

json vector_json(const std::vector<double>& v)
{
    json a = json::array();
    for (double x : v) {
        a.push_back(x);
    }
    return a;
}

// ---------------------------------------------------------------- simulate

struct SimulateCmd {
    std::string model = "poisson";
    double rho = 200.0;
    double kappa = 25.0, mu = 8.0, rdisp = 0.2;
    double side = 1.0;
    std::size_t dim = 2;
    std::uint64_t seed = 0;
    std::string covariates;
    std::vector<double> beta;
    std::string output;
    std::string config;
    std::map<std::string, CLI::Option*> opts;

    void add(CLI::App& app)
    {
        auto* cmd = app.add_subcommand("simulate", "Simulate a point pattern");
        opts["model"] = cmd->add_option("--model", model, "poisson | matern | inhom")
                            ->check(CLI::IsMember({"poisson", "matern", "inhom"}));
        opts["rho"] = cmd->add_option("--rho", rho, "Poisson intensity");
        opts["kappa"] = cmd->add_option("--kappa", kappa, "Matern parent intensity");
        opts["mu"] = cmd->add_option("--mu", mu, "Matern mean offspring count");
        opts["rdisp"] = cmd->add_option("--rdisp", rdisp, "Matern offspring radius");
        opts["side"] = cmd->add_option("--side", side, "Window side length");
        opts["dim"] = cmd->add_option("--dim", dim, "Window dimension");
        opts["seed"] = cmd->add_option("--seed", seed, "Random seed");
        opts["covariates"] = cmd->add_option("--covariates", covariates, "Covariate raster (inhom)");
        opts["beta"] = cmd->add_option("--beta", beta, "Log-linear parameters (inhom)")->delimiter(',');
        cmd->add_option("-o,--output", output, "Pattern CSV; writes <file>.json alongside");
        cmd->add_option("--config", config, "JSON file with defaults for these flags");
    }

    int exec(std::ostream& out)
    {
        if (!config.empty()) {
            const json c = read_json_file(config);
            from_config(c, "model", opts["model"], model);
            from_config(c, "rho", opts["rho"], rho);
            from_config(c, "kappa", opts["kappa"], kappa);
            from_config(c, "mu", opts["mu"], mu);
            from_config(c, "rdisp", opts["rdisp"], rdisp);
            from_config(c, "side", opts["side"], side);
            from_config(c, "dim", opts["dim"], dim);
            from_config(c, "seed", opts["seed"], seed);
            from_config(c, "covariates", opts["covariates"], covariates);
            from_config(c, "beta", opts["beta"], beta);
            if (opts["seed"]->count() == 0 && !c.contains("seed")) {
                throw UsageError("--seed is required");
            }
        } else if (opts["seed"]->count() == 0) {
            throw UsageError("--seed is required");
        }

        PointPattern pattern = [&] {
            if (model == "poisson") {
                return simulate_poisson(rho, Window(dim, side), Seed{seed});
            }
            if (model == "matern") {
                return simulate_matern({kappa, mu, rdisp}, Window(dim, side), Seed{seed});
            }
            if (model != "inhom") {
                throw io::InputError("unknown model '" + model + "'");
            }
            const auto field = load_field(covariates);
            const IntensityModel im = IntensityModel::loglinear(field, beta);
            return simulate_poisson_inhom(im, max_loglinear_intensity(*field, beta),
                                          field->window(), Seed{seed});
        }();

        if (output.empty()) {
            io::write_pattern_csv(out, pattern);
        } else {
            io::save_pattern(output, pattern);
        }
        return ok;
    }
};

// ---------------------------------------------------------------- fit

struct FitCmd {
    std::string pattern;
    std::string covariates;
    std::vector<double> beta0;
    double tolerance = FitOptions{}.tolerance;
    std::string output;
    WindowFlags window;

    void add(CLI::App& app)
    {
        auto* cmd = app.add_subcommand("fit", "Fit the intensity of a pattern");
        cmd->add_option("pattern", pattern, "Pattern CSV")->required();
        cmd->add_option("--covariates", covariates, "Covariate raster; constant model if absent");
        cmd->add_option("--beta0", beta0, "Starting parameters")->delimiter(',');
        cmd->add_option("--tol", tolerance, "Score tolerance relative to |W|");
        cmd->add_option("-o,--output", output, "JSON output file");
        window.add(cmd);
    }

    int exec(std::ostream& out)
    {
        const PointPattern pat = window.load(pattern);
        json result;
        if (covariates.empty()) {
            result["model"] = "constant";
            result["beta_hat"] = vector_json({estimate_constant(pat)});
            result["points"] = pat.size();
            result["volume"] = pat.window().volume();
        } else {
            const auto field = load_field(covariates);
            FitOptions options;
            options.tolerance = tolerance;
            const FitResult fit = fit_loglinear(pat, field, beta0, options);
            result["model"] = "loglinear";
            result["beta_hat"] = vector_json(fit.beta_hat);
            result["score_norm"] = fit.score_norm;
            result["iterations"] = fit.iterations;
            result["converged"] = fit.converged;
        }
        Sink sink(output, out);
        sink.stream() << result.dump(2) << '\n';
        return ok;
    }
};

// ---------------------------------------------------------------- kfunc

struct KfuncCmd {
    std::string pattern;
    double R = 0.05;
    std::size_t grid = 50;
    std::string intensity = "constant";
    std::vector<double> beta;
    bool fit = false;
    bool with_h = false;
    std::string covariates;
    std::string output;
    WindowFlags window;

    void add(CLI::App& app)
    {
        auto* cmd = app.add_subcommand("kfunc", "Estimate the K-function on a radius grid");
        cmd->add_option("pattern", pattern, "Pattern CSV")->required();
        cmd->add_option("--R", R, "Largest radius");
        cmd->add_option("--grid", grid, "Number of grid radii R/m, ..., R");
        cmd->add_option("--intensity", intensity, "constant | loglinear")
            ->check(CLI::IsMember({"constant", "loglinear"}));
        cmd->add_option("--beta", beta, "Intensity parameters")->delimiter(',');
        cmd->add_flag("--fit", fit, "Estimate the intensity from the pattern");
        cmd->add_flag("--with-h", with_h, "Append the derivative columns h_1..h_p");
        cmd->add_option("--covariates", covariates, "Covariate raster (loglinear)");
        cmd->add_option("-o,--output", output, "Curve CSV output file");
        window.add(cmd);
    }

    int exec(std::ostream& out)
    {
        if (fit == !beta.empty()) {
            throw UsageError("give exactly one of --beta and --fit");
        }
        const PointPattern pat = window.load(pattern);
        const RadiusGrid rg = RadiusGrid::uniform(R, grid);
        const IntensityModel model = [&] {
            if (intensity == "constant") {
                if (!fit && beta.size() != 1) {
                    throw UsageError("the constant model takes one --beta value");
                }
                return IntensityModel::constant(fit ? estimate_constant(pat) : beta[0]);
            }
            const auto field = load_field(covariates);
            return IntensityModel::loglinear(
                field, fit ? fit_loglinear(pat, field).beta_hat : beta);
        }();
        const KCurves curves = k_and_h(pat, close_pairs(pat, R), model, rg);
        Sink sink(output, out);
        io::write_curve_csv(sink.stream(), curves.k, with_h ? &curves.h : nullptr);
        return ok;
    }
};

// ---------------------------------------------------------------- cov

struct CovCmd {
    std::string model = "poisson";
    std::string intensity = "constant";
    std::vector<double> beta;
    std::string covariates;
    double R = 0.05;
    std::size_t grid = 50;
    std::size_t samples = QuadratureConfig{}.samples;
    double truncation = 0.0;
    std::string mode = "estimated";
    bool exact = false;
    std::string output;

    void add(CLI::App& app)
    {
        auto* cmd = app.add_subcommand("cov", "Limiting covariance blocks of (beta_hat, K_hat)");
        cmd->add_option("--model", model, "Product-density model")
            ->check(CLI::IsMember({"poisson"}));
        cmd->add_option("--intensity", intensity, "constant | loglinear")
            ->check(CLI::IsMember({"constant", "loglinear"}));
        cmd->add_option("--beta", beta, "Intensity parameters")->delimiter(',')->required();
        cmd->add_option("--covariates", covariates, "Covariate raster (loglinear)");
        cmd->add_option("--R", R, "Largest radius");
        cmd->add_option("--grid", grid, "Number of grid radii");
        cmd->add_option("--samples", samples, "Quasi-Monte Carlo samples per integral");
        cmd->add_option("--truncation", truncation, "Integration radius (default 5R)");
        cmd->add_option("--mode", mode, "known | estimated")
            ->check(CLI::IsMember({"known", "estimated"}));
        cmd->add_flag("--exact", exact, "Planar Poisson closed-form blocks (constant model)");
        cmd->add_option("-o,--output", output, "Output directory")->required();
    }

    int exec(std::ostream& out)
    {
        const RadiusGrid rg = RadiusGrid::uniform(R, grid);
        QuadratureConfig quad;
        quad.samples = samples;
        quad.truncation = truncation;
        const ProductDensityModel pdm = ProductDensityModel::poisson();
        const IntensityMode im = parse_mode(mode);

        CovarianceBlocks blocks = poisson_blocks_exact(1.0, rg);
        LimitCovariance ctilde{rg, {}};
        json meta;
        meta["model"] = model;
        meta["intensity"] = intensity;
        meta["beta"] = vector_json(beta);
        meta["mode"] = mode;
        meta["grid"] = {{"R", R}, {"m", grid}};
        meta["quadrature"] = {{"samples", samples},
                              {"truncation", quad.truncation_for(rg)},
                              {"exact", exact}};
        Eigen::MatrixXd sensitivity;

        if (intensity == "constant") {
            if (beta.size() != 1) {
                throw UsageError("the constant model takes one --beta value");
            }
            blocks = exact ? poisson_blocks_exact(beta[0], rg)
                           : sigma_blocks_constant(pdm, beta[0], rg, quad);
            ctilde = im == IntensityMode::known ? LimitCovariance{rg, blocks.c}
                                                : cov_estimated_constant(blocks, beta[0], rg);
        } else {
            if (exact) {
                throw UsageError("--exact applies to the constant model only");
            }
            const LoglinearBlocks lb =
                loglinear_sigma_blocks(load_field(covariates), beta, pdm, rg, quad);
            blocks = lb.parameter_blocks();
            sensitivity = lb.sensitivity;
            ctilde = im == IntensityMode::known ? LimitCovariance{rg, blocks.c}
                                                : compose_lim_cov(lb.h_limit, blocks);
            meta["warnings"] = lb.warnings;
        }
        meta["error"] = {{"sigma11", blocks.error.sigma11},
                         {"sigma2", blocks.error.sigma2},
                         {"c", blocks.error.c}};

        const fs::path dir(output);
        fs::create_directories(dir);
        const auto write_matrix = [&](const char* name, const Eigen::MatrixXd& m) {
            std::ostringstream s;
            io::write_matrix_csv(s, m);
            write_text(dir / name, s.str());
        };
        write_matrix("sigma11.csv", blocks.sigma11);
        write_matrix("sigma2.csv", blocks.sigma2);
        write_matrix("c.csv", blocks.c);
        write_matrix("ctilde.csv", ctilde.matrix);
        if (sensitivity.size() > 0) {
            write_matrix("sensitivity.csv", sensitivity);
        }
        {
            std::ostringstream s;
            s << "r\n";
            for (std::size_t i = 0; i < rg.size(); ++i) {
                s << io::format_double(rg[i]) << '\n';
            }
            write_text(dir / "grid.csv", s.str());
        }
        write_text(dir / "meta.json", meta.dump(2) + "\n");
        out << meta.dump(2) << '\n';
        return ok;
    }
};

// ---------------------------------------------------------------- crit

struct CritCmd {
    double R = 0.05;
    std::size_t grid = 50;
    double rho = 0.0;
    std::string mode = "estimated";
    double alpha = 0.05;
    std::size_t M = 10000;
    std::uint64_t seed = 0;
    std::string covariance;
    std::string output;
    CLI::Option* rho_opt = nullptr;

    void add(CLI::App& app)
    {
        auto* cmd = app.add_subcommand("crit", "Critical value of the sup of the limit process");
        cmd->add_option("--R", R, "Largest radius");
        cmd->add_option("--grid", grid, "Number of grid radii");
        rho_opt = cmd->add_option("--rho", rho, "Poisson intensity for the closed-form covariance");
        cmd->add_option("--mode", mode, "known | estimated")
            ->check(CLI::IsMember({"known", "estimated"}));
        cmd->add_option("--alpha", alpha, "Level");
        cmd->add_option("--M", M, "Monte Carlo draws");
        cmd->add_option("--seed", seed, "Random seed")->required();
        cmd->add_option("--cov", covariance, "Covariance matrix CSV instead of --rho");
        cmd->add_option("-o,--output", output, "JSON output file");
    }

    int exec(std::ostream& out)
    {
        json result;
        result["alpha"] = alpha;
        Eigen::MatrixXd cov;
        if (!covariance.empty()) {
            if (rho_opt->count() > 0) {
                throw UsageError("give either --rho or --cov");
            }
            cov = io::load_matrix_csv(covariance);
            result["covariance"] = covariance;
        } else {
            if (rho_opt->count() == 0) {
                throw UsageError("--rho or --cov is required");
            }
            cov = poisson_limit_covariance(RadiusGrid::uniform(R, grid), rho, parse_mode(mode))
                      .matrix;
            result["rho"] = rho;
            result["mode"] = mode;
            result["R"] = R;
            result["grid"] = grid;
        }
        const SupSample sample = simulate_sup(cov, M, Seed{seed});
        result["critical_value"] = critical_value(sample, alpha);
        result["M"] = M;
        result["seed"] = seed;
        result["jitter"] = sample.jitter;
        Sink sink(output, out);
        sink.stream() << result.dump(2) << '\n';
        return ok;
    }
};

// ---------------------------------------------------------------- gof

struct GofCmd {
    std::string pattern;
    GofConfig config;
    std::string mode = "estimated";
    std::uint64_t seed = 0;
    double known_rho = 0.0;
    CLI::Option* known_opt = nullptr;
    std::string output;
    WindowFlags window;

    void add(CLI::App& app)
    {
        auto* cmd = app.add_subcommand("gof", "Kolmogorov-Smirnov test of complete spatial randomness");
        cmd->add_option("pattern", pattern, "Pattern CSV")->required();
        cmd->add_option("--R", config.R, "Largest radius");
        cmd->add_option("--grid", config.grid, "Number of grid radii");
        cmd->add_option("--alpha", config.alpha, "Level");
        cmd->add_option("--mode", mode, "known | estimated")
            ->check(CLI::IsMember({"known", "estimated"}));
        cmd->add_option("--M", config.M, "Monte Carlo draws for the null law");
        cmd->add_option("--seed", seed, "Random seed")->required();
        known_opt = cmd->add_option("--known-rho", known_rho,
                                    "Intensity plugged into K_hat (default: N/|W|)");
        cmd->add_option("-o,--output", output, "JSON output file");
        window.add(cmd);
    }

    int exec(std::ostream& out)
    {
        config.mode = parse_mode(mode);
        config.seed = Seed{seed};
        if (known_opt->count() > 0) {
            config.known_rho = known_rho;
        }
        const PointPattern pat = window.load(pattern);
        const GofResult r = gof_test(pat, config);
        json result;
        result["statistic"] = r.statistic;
        result["critical_value"] = r.critical_value;
        result["p_value"] = r.p_value;
        result["reject"] = r.reject;
        result["beta_hat"] = r.beta_hat;
        result["mode"] = mode;
        result["R"] = config.R;
        result["grid"] = config.grid;
        result["alpha"] = config.alpha;
        result["M"] = config.M;
        result["seed"] = seed;
        result["points"] = pat.size();
        Sink sink(output, out);
        sink.stream() << result.dump(2) << '\n';
        return ok;
    }
};

// ---------------------------------------------------------------- study

StudyConfig study_config(const json& j)
{
    StudyConfig c;
    try {
        for (const auto& m : j.at("models")) {
            const auto type = m.at("type").get<std::string>();
            ModelSpec spec;
            if (type == "poisson") {
                spec = ModelSpec::poisson(m.value("rho", 200.0));
            } else if (type == "matern") {
                spec = ModelSpec::matern_cluster(
                    {m.value("kappa", 25.0), m.value("mu", 8.0), m.value("rdisp", 0.2)});
            } else {
                throw io::InputError("unknown study model '" + type + "'");
            }
            if (m.contains("replicates")) {
                spec.replicates = m.at("replicates").get<std::size_t>();
            }
            c.models.push_back(spec);
        }
        if (j.contains("sides")) {
            c.sides = j.at("sides").get<std::vector<double>>();
        }
        if (j.contains("modes")) {
            c.modes.clear();
            for (const auto& s : j.at("modes")) {
                c.modes.push_back(parse_mode(s.get<std::string>()));
            }
        }
        c.replicates = j.value("replicates", c.replicates);
        c.alpha = j.value("alpha", c.alpha);
        c.R = j.value("R", c.R);
        c.grid = j.value("grid", c.grid);
        c.M = j.value("M", c.M);
        if (j.contains("seed")) {
            c.seed = Seed{j.at("seed").get<std::uint64_t>()};
        }
    } catch (const json::exception& e) {
        throw io::InputError(std::string("study config: ") + e.what());
    }
    return c;
}

std::string fixed(double x, int digits)
{
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << x;
    return s.str();
}

void write_markdown(std::ostream& os, const StudyConfig& config, const StudyResult& result)
{
    os << "| Window side length |";
    for (double s : config.sides) {
        os << ' ' << io::format_double(s) << " | SE |";
    }
    os << "\n|---|";
    for (std::size_t k = 0; k < config.sides.size(); ++k) {
        os << "---|---|";
    }
    os << '\n';
    for (const auto& model : config.models) {
        const std::string label = model.name() == "poisson" ? "Poisson" : "Matern";
        for (IntensityMode mode : config.modes) {
            os << "| " << label << " (" << mode_name(mode) << " intensity) |";
            for (double s : config.sides) {
                const StudyCell* c = result.find(model.name(), s, mode);
                os << ' ' << fixed(c->rejection, 4) << " | " << fixed(c->standard_error, 4)
                   << " |";
            }
            os << '\n';
        }
    }
}

void write_study_csv(std::ostream& os, const StudyResult& result)
{
    os << "model,side,mode,rejection,se,replicates,failures,wall_seconds\n";
    for (const auto& c : result.cells) {
        os << c.model << ',' << io::format_double(c.side) << ',' << mode_name(c.mode) << ','
           << io::format_double(c.rejection) << ',' << io::format_double(c.standard_error) << ','
           << c.replicates << ',' << c.failures << ',' << fixed(c.wall_seconds, 3) << '\n';
    }
}

struct StudyCmd {
    std::string config;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
    std::size_t replicates = 0;
    CLI::Option* reps_opt = nullptr;
    std::string format = "markdown";
    std::string output;

    void add(CLI::App& app)
    {
        auto* cmd = app.add_subcommand("study", "Monte Carlo rejection-rate table");
        cmd->add_option("--config", config, "Study JSON config")->required();
        seed_opt = cmd->add_option("--seed", seed, "Master seed (overrides the config)");
        reps_opt = cmd->add_option("--replicates", replicates,
                                   "Default replicates (overrides the config)");
        cmd->add_option("--format", format, "markdown | csv")
            ->check(CLI::IsMember({"markdown", "csv"}));
        cmd->add_option("-o,--output", output, "Table output file");
    }

    int exec(std::ostream& out)
    {
        const json j = read_json_file(config);
        StudyConfig sc = study_config(j);
        if (seed_opt->count() > 0) {
            sc.seed = Seed{seed};
        } else if (!j.contains("seed")) {
            throw UsageError("--seed is required (flag or config key)");
        }
        if (reps_opt->count() > 0) {
            sc.replicates = replicates;
        }
        const StudyResult result = rejection_study(sc);
        Sink sink(output, out);
        if (format == "csv") {
            write_study_csv(sink.stream(), result);
        } else {
            write_markdown(sink.stream(), sc, result);
        }
        return ok;
    }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app("K-function estimation, limiting covariances and goodness-of-fit tests",
                 "kclt");
    app.require_subcommand(1);
    app.fallthrough();
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (0: OpenMP default)")
        ->check(CLI::NonNegativeNumber);

    SimulateCmd simulate;
    FitCmd fit;
    KfuncCmd kfunc;
    CovCmd cov;
    CritCmd crit;
    GofCmd gof;
    StudyCmd study;
    simulate.add(app);
    fit.add(app);
    kfunc.add(app);
    cov.add(app);
    crit.add(app);
    gof.add(app);
    study.add(app);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage_error;
    }
    if (threads > 0) {
        omp_set_num_threads(threads);
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        if (name == "simulate") {
            return simulate.exec(out);
        }
        if (name == "fit") {
            return fit.exec(out);
        }
        if (name == "kfunc") {
            return kfunc.exec(out);
        }
        if (name == "cov") {
            return cov.exec(out);
        }
        if (name == "crit") {
            return crit.exec(out);
        }
        if (name == "gof") {
            return gof.exec(out);
        }
        return study.exec(out);
    } catch (const UsageError& e) {
        err << "kclt " << name << ": " << e.what() << '\n';
        return usage_error;
    } catch (const std::exception& e) {
        err << "kclt " << name << ": " << e.what() << '\n';
        return domain_error;
    }
}

}  // namespace kclt::cli
