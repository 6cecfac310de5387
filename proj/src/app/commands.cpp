// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <limits>
#include <memory>
#include <sstream>

#include "acceptance.hpp"
#include "cfgdist/error.hpp"
#include "cfgdist/joint_gaussian.hpp"
#include "cfgdist/mixture_rem.hpp"
#include "cfgdist/simulator.hpp"
#include "cfgdist/sweeps.hpp"
#include "csv.hpp"
#include "experiments.hpp"
#include "plot.hpp"

#ifndef CFGDIST_VERSION
#define CFGDIST_VERSION "0.0.0"
#endif

namespace cfgdist::app
{
namespace
{
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

//! Binds options to variables and records their resolved values.
class Params
{
  public:
    template <class T>
    CLI::Option* option(CLI::App* app, std::string const& name, T& var, std::string const& help)
    {
        getters_.emplace_back(name, [&var] { return json(var); });
        return app->add_option("--" + name, var, help)->capture_default_str();
    }

    template <class T>
    CLI::Option* list(CLI::App* app, std::string const& name, std::vector<T>& var,
                      std::string const& help)
    {
        return option(app, name, var, help)->delimiter(',');
    }

    CLI::Option* flag(CLI::App* app, std::string const& name, bool& var, std::string const& help)
    {
        getters_.emplace_back(name, [&var] { return json(var); });
        return app->add_flag("--" + name, var, help);
    }

    void append_to(json& out) const
    {
        for (auto const& [name, get] : getters_)
            out[name] = get();
    }

  private:
    std::vector<std::pair<std::string, std::function<json()>>> getters_;
};

struct Globals
{
    std::uint64_t seed = 0;
    int workers = 0;
    std::string out_dir = ".";
    bool emit_plot = false;
    bool quick = false;
};

//! Collects written files for the manifest.
class Outputs
{
  public:
    explicit Outputs(std::string dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    void write(std::string const& name, std::string const& content)
    {
        std::ofstream os(fs::path(dir_) / name, std::ios::binary);
        if (!os)
            throw Error("cannot write " + (fs::path(dir_) / name).string());
        os << content;
        files_.push_back(name);
    }

    std::vector<std::string> const& files() const { return files_; }
    std::string const& dir() const { return dir_; }

  private:
    std::string dir_;
    std::vector<std::string> files_;
};

double parse_beta(std::string const& text)
{
    if (text == "large" || text == "inf")
        return std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double v = 0.0;
    try
    {
        v = std::stod(text, &used);
    }
    catch (std::exception const&)
    {
        used = 0;
    }
    if (used != text.size() || !(v >= 0))
        throw DomainError("--beta expects a number >= 0, 'large' or 'inf', got '" + text + "'");
    return v;
}

GuidanceSchedule make_schedule(std::string const& kind, double w, double w0, double omega)
{
    if (kind == "constant")
        return GuidanceSchedule::constant(w);
    if (kind == "linear")
        return GuidanceSchedule::linear(w0, omega);
    throw DomainError("--schedule must be constant or linear");
}

std::vector<double> time_points(std::vector<double> ts, int grid, double t_min, double t_max)
{
    if (grid > 0)
    {
        detail::require(t_min > 0 && t_max > t_min, "--t-grid needs 0 < t-min < t-max");
        for (int i = 0; i < grid; ++i)
            ts.push_back(std::exp(std::log(t_min) +
                                  (std::log(t_max) - std::log(t_min)) * i / std::max(1, grid - 1)));
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    return ts;
}

// ---- theory ---------------------------------------------------------------

struct TheoryMixture
{
    double sigma2 = 0.5;
    std::string beta = "0.1";
    std::string schedule = "constant";
    double w = 0.0;
    double w0 = 0.0;
    double omega = 0.0;
    double horizon = 0.0;
    std::vector<double> t{0.0};
    int t_grid = 0;
    double t_min = 1e-3;
    double t_max = 100.0;

    void bind(CLI::App* app, Params& p)
    {
        p.option(app, "sigma2", sigma2, "Mode variance");
        p.option(app, "beta", beta, "log(M)/d; a number, 'large' or 'inf'");
        p.option(app, "schedule", schedule, "constant or linear")
            ->check(CLI::IsMember({"constant", "linear"}));
        p.option(app, "w", w, "Constant guidance level");
        p.option(app, "w0", w0, "Linear schedule intercept");
        p.option(app, "omega", omega, "Linear schedule slope");
        p.option(app, "horizon", horizon, "Horizon T; 0 means T -> inf");
        p.list(app, "t", t, "Times (comma separated)");
        p.option(app, "t-grid", t_grid, "Add this many log-spaced times in [t-min, t-max]");
        p.option(app, "t-min", t_min, "Smallest log-grid time");
        p.option(app, "t-max", t_max, "Largest log-grid time");
    }

    void run(Globals const&, Outputs& files, std::ostream& out) const
    {
        double const b = parse_beta(beta);
        auto const sched = make_schedule(schedule, w, w0, omega);
        auto const ts = time_points(t, t_grid, t_min, t_max);
        std::optional<double> const hz = horizon > 0 ? std::optional(horizon) : std::nullopt;
        CsvTable table({"t", "w", "mean_coeff", "variance", "delta_mu", "delta_sigma2", "phase",
                        "t_speciation"});
        auto emit = [&](GuidedMoments const& m, std::optional<double> ts_opt) {
            auto const [dmu, dsig] = distortion_from_moments(m, sigma2);
            table.add(m.t).add(sched.at(m.t)).add(m.mean_coeff).add(m.variance).add(dmu).add(dsig)
                .add(to_string(m.phase)).add(ts_opt);
            table.end_row();
        };
        if (sched.is_constant())
        {
            MixtureTheoryParams const params{sigma2, b, sched, hz};
            auto const [traj, report] = assemble_trajectory(params, ts);
            for (auto const& m : traj)
                emit(m, report.t_speciation);
        }
        else
        {
            if (!std::isinf(b))
                throw DomainError("linear schedules use the guided-only path; pass --beta large");
            LinearGuidance const lin = std::get<LinearGuidance>(sched.form());
            for (double at : ts)
                emit(guided_moments_linear_schedule(at, sigma2, lin, {}, hz), std::nullopt);
        }
        files.write("theory_mixture.csv", table.str());
        out << table.str();
    }
};

struct TheoryJoint
{
    std::vector<double> r{1.0};
    std::vector<double> s{0.6};
    int d = 0;
    std::string schedule = "constant";
    double w = 0.0;
    double w0 = 0.0;
    double omega = 0.0;
    std::vector<double> t{0.0};

    void bind(CLI::App* app, Params& p)
    {
        p.list(app, "r", r, "Unconditional eigenvalues");
        p.list(app, "s", s, "Conditional eigenvalues");
        p.option(app, "d", d, "If > 0, use a random d-dimensional model (seeded) instead");
        p.option(app, "schedule", schedule, "constant or linear")
            ->check(CLI::IsMember({"constant", "linear"}));
        p.option(app, "w", w, "Constant guidance level");
        p.option(app, "w0", w0, "Linear schedule intercept");
        p.option(app, "omega", omega, "Linear schedule slope");
        p.list(app, "t", t, "Times (comma separated)");
    }

    void run(Globals const& g, Outputs& files, std::ostream& out) const
    {
        auto const sched = make_schedule(schedule, w, w0, omega);
        std::vector<double> rs = r;
        std::vector<double> ss = s;
        if (d > 0)
        {
            auto const model = JointGaussianModel::random(d, g.seed);
            rs.assign(model.r().data(), model.r().data() + d);
            ss.assign(model.s().data(), model.s().data() + d);
        }
        detail::require(rs.size() == ss.size(), "--r and --s need the same length");
        CsvTable table({"t", "index", "r", "s", "lambda", "Lambda", "delta_mu", "delta_sigma2",
                        "phase"});
        for (double at : time_points(t, 0, 0, 0))
            for (std::size_t i = 0; i < rs.size(); ++i)
            {
                double const lam = mean_coeff(ss[i], rs[i], sched, at);
                double const big_lam = cov_coeff(ss[i], rs[i], sched, at);
                table.add(at).add(static_cast<long long>(i)).add(rs[i]).add(ss[i]).add(lam)
                    .add(big_lam).add(lam - 1.0).add(big_lam - 1.0).add("guided");
                table.end_row();
            }
        files.write("theory_joint.csv", table.str());
        out << table.str();
    }
};

// ---- simulate -------------------------------------------------------------

std::string sample_csv(SampleSet const& samples)
{
    std::vector<std::string> header;
    for (int j = 0; j < samples.dim; ++j)
        header.push_back("x_" + std::to_string(j + 1));
    CsvTable table(header);
    for (std::size_t i = 0; i < samples.n; ++i)
    {
        for (int j = 0; j < samples.dim; ++j)
            table.add(samples.data[i * static_cast<std::size_t>(samples.dim) + static_cast<std::size_t>(j)]);
        table.end_row();
    }
    return table.str();
}

std::string tag(double v)
{
    std::string s = format_real(v);
    std::replace(s.begin(), s.end(), '.', 'p');
    std::replace(s.begin(), s.end(), '-', 'm');
    return s;
}

struct SimulateMixture
{
    std::vector<int> d{10};
    double beta = 0.5;
    double sigma2 = 0.5;
    std::vector<double> w{0.0};
    std::size_t n = 1000;
    int steps = 2000;
    double horizon = 500.0;
    bool raw_target = false;
    bool dump_samples = false;

    void bind(CLI::App* app, Params& p)
    {
        p.list(app, "d", d, "Dimensions (comma separated)");
        p.option(app, "beta", beta, "log(M)/d");
        p.option(app, "sigma2", sigma2, "Mode variance");
        p.list(app, "w", w, "Guidance levels (comma separated)");
        p.option(app, "n", n, "Samples per run");
        p.option(app, "steps", steps, "Euler-Maruyama steps");
        p.option(app, "horizon", horizon, "Horizon T");
        p.flag(app, "raw-target", raw_target, "Keep |c1|^2 as sampled instead of rescaling to d");
        p.flag(app, "dump-samples", dump_samples, "Write the t = 0 samples of every run");
    }

    void run(Globals const& g, Outputs& files, std::ostream& out) const
    {
        CsvTable table({"d", "beta", "sigma2", "w", "n_samples", "n_steps", "horizon_T",
                        "centroids", "t_speciation", "delta_mu_theory", "delta_mu_hat",
                        "delta_mu_se", "delta_sigma2_theory", "delta_sigma2_hat",
                        "delta_sigma2_se"});
        for (int dim : d)
            for (double wv : w)
            {
                MixtureRun run;
                run.dim = dim;
                run.beta = beta;
                run.sigma2 = sigma2;
                run.w = wv;
                run.n_samples = n;
                run.n_steps = steps;
                run.horizon_T = horizon;
                run.seed = g.seed;
                run.workers = g.workers;
                run.normalize_target = !raw_target;
                auto const res = run_mixture(run);
                table.add(static_cast<long long>(dim)).add(beta).add(sigma2).add(wv)
                    .add(static_cast<long long>(n)).add(static_cast<long long>(steps)).add(horizon)
                    .add(static_cast<long long>(res.centroids)).add(res.theory.t_speciation)
                    .add(res.theory.delta_mu).add(res.empirical.delta_mu.value)
                    .add(res.empirical.delta_mu.std_error).add(res.theory.delta_sigma2)
                    .add(res.empirical.delta_sigma2.value).add(res.empirical.delta_sigma2.std_error);
                table.end_row();
                if (dump_samples)
                    files.write("samples_mixture_d" + std::to_string(dim) + "_w" + tag(wv) + ".csv",
                                sample_csv(res.samples));
            }
        files.write("simulate_mixture.csv", table.str());
        if (g.emit_plot)
        {
            for (std::string q : {"delta_mu", "delta_sigma2"})
            {
                int const th = q == "delta_mu" ? 10 : 13;
                LinesSpec spec{"simulate_mixture.csv", "simulate_mixture_" + q + ".png",
                               q + " at t = 0: theory (lines) and simulation", "w", q, {}};
                spec.series.push_back({4, th, 0, "$1==" + std::to_string(d.front()), "theory"});
                for (int dim : d)
                    spec.series.push_back({4, th + 1, th + 2, "$1==" + std::to_string(dim),
                                           "simulation d=" + std::to_string(dim)});
                files.write("simulate_mixture_" + q + ".gp", gnuplot_lines(spec));
            }
        }
        out << "wrote " << table.rows() << " runs to "
            << (fs::path(files.dir()) / "simulate_mixture.csv").string() << "\n";
    }
};

struct SimulateJoint
{
    int d = 9;
    std::vector<double> w{0.0, 1.0, 2.0};
    std::size_t n = 5000;
    int steps = 1000;
    double horizon = 500.0;
    bool dump_samples = false;

    void bind(CLI::App* app, Params& p)
    {
        p.option(app, "d", d, "Dimension of the random model");
        p.list(app, "w", w, "Guidance levels (comma separated)");
        p.option(app, "n", n, "Samples per run");
        p.option(app, "steps", steps, "Euler-Maruyama steps");
        p.option(app, "horizon", horizon, "Horizon T");
        p.flag(app, "dump-samples", dump_samples, "Write the t = 0 samples of every run");
    }

    void run(Globals const& g, Outputs& files, std::ostream& out) const
    {
        CsvTable moments({"w", "quantity", "index", "theory", "simulated", "std_error"});
        CsvTable summary({"w", "mean_ratio_theory", "mean_ratio_simulated",
                          "frobenius_ratio_theory", "frobenius_ratio_simulated"});
        for (double wv : w)
        {
            JointRun run;
            run.dim = d;
            run.w = wv;
            run.n_samples = n;
            run.n_steps = steps;
            run.horizon_T = horizon;
            run.seed = g.seed;
            run.workers = g.workers;
            auto const res = run_joint(run);
            for (Eigen::Index j = 0; j < res.theory.mean.size(); ++j)
            {
                moments.add(wv).add("mean").add(static_cast<long long>(j)).add(res.theory.mean[j])
                    .add(res.simulated.mean[j]).add(res.simulated.mean_std_error[j]);
                moments.end_row();
            }
            double const dof = std::sqrt(2.0 / (static_cast<double>(n) - 1.0));
            for (Eigen::Index j = 0; j < res.theory.cov_eigenvalues.size(); ++j)
            {
                moments.add(wv).add("eigen_variance").add(static_cast<long long>(j))
                    .add(res.theory.cov_eigenvalues[j]).add(res.simulated.eigen_variance[j])
                    .add(dof * res.simulated.eigen_variance[j]);
                moments.end_row();
            }
            summary.add(wv).add(res.mean_ratio_theory).add(res.mean_ratio_simulated)
                .add(res.frobenius_ratio_theory).add(res.frobenius_ratio_simulated);
            summary.end_row();
            if (dump_samples)
                files.write("samples_joint_w" + tag(wv) + ".csv", sample_csv(res.samples));
        }
        files.write("simulate_joint.csv", moments.str());
        files.write("simulate_joint_summary.csv", summary.str());
        if (g.emit_plot)
        {
            LinesSpec mean{"simulate_joint_summary.csv", "simulate_joint_mean.png",
                           "|mean_w| / |mu|", "w", "ratio",
                           {{1, 2, 0, "", "theory"}, {1, 3, 0, "", "simulation"}}};
            LinesSpec frob{"simulate_joint_summary.csv", "simulate_joint_frobenius.png",
                           "|Sigma_w|_F / |Sigma_cond|_F", "w", "ratio",
                           {{1, 4, 0, "", "theory"}, {1, 5, 0, "", "simulation"}}};
            files.write("simulate_joint_mean.gp", gnuplot_lines(mean));
            files.write("simulate_joint_frobenius.gp", gnuplot_lines(frob));
        }
        out << "wrote " << summary.rows() << " runs to "
            << (fs::path(files.dir()) / "simulate_joint_summary.csv").string() << "\n";
    }
};

// ---- sweep ----------------------------------------------------------------

struct AxisFlags
{
    double min = 0;
    double max = 1;
    int points = 2;
    std::string scale = "linear";
    bool open_min = false;

    void bind(CLI::App* app, Params& p, std::string const& prefix)
    {
        p.option(app, prefix + "-min", min, "Axis minimum");
        p.option(app, prefix + "-max", max, "Axis maximum");
        p.option(app, prefix + "-points", points, "Axis points (>= 2)");
        p.option(app, prefix + "-scale", scale, "linear or log")
            ->check(CLI::IsMember({"linear", "log"}));
        p.option(app, prefix + "-open-min", open_min, "Exclude the minimum");
    }

    Axis axis(std::string name) const
    {
        return {std::move(name), min, max, points,
                scale == "log" ? AxisScale::log : AxisScale::linear, open_min};
    }
};

struct SweepKind
{
    std::string name;  // file stem suffix
    std::string x_name;
    std::string y_name;
    AxisFlags x;
    AxisFlags y;
    //! Constant-schedule mixture sweeps report t_speciation.
    bool has_speciation = true;
    bool joint = false;
};

struct Sweep
{
    SweepKind kind;
    double sigma2 = 0.5;
    double beta = 0.1;
    double w = 1.0;
    double r = 1.0;
    double s = 0.6;
    double horizon = 0.0;

    void bind(CLI::App* app, Params& p)
    {
        kind.x.bind(app, p, "x");
        kind.y.bind(app, p, "y");
        if (kind.name == "beta_w" || kind.name == "schedule")
            p.option(app, "sigma2", sigma2, "Mode variance");
        if (kind.name == "sigma_w")
            p.option(app, "beta", beta, "log(M)/d");
        if (kind.name == "sigma_beta")
            p.option(app, "w", w, "Constant guidance level");
        if (kind.name == "schedule")
            p.option(app, "horizon", horizon, "Horizon T; 0 means T -> inf");
        if (kind.joint)
        {
            p.option(app, "r", r, "Unconditional eigenvalue");
            p.option(app, "s", s, "Conditional eigenvalue");
        }
    }

    void run(Globals const& g, Outputs& files, std::ostream& out) const
    {
        GridSpec grid{kind.x.axis(kind.x_name), kind.y.axis(kind.y_name), {}};
        SweepOptions opt;
        opt.workers = g.workers;
        if (horizon > 0)
            opt.horizon = horizon;
        std::vector<SweepRow> rows;
        if (kind.name == "beta_w")
            rows = sweep_beta_w(sigma2, grid, opt);
        else if (kind.name == "sigma_w")
            rows = sweep_sigma_w(beta, grid, opt);
        else if (kind.name == "sigma_beta")
            rows = sweep_sigma_beta(w, grid, opt);
        else if (kind.name == "schedule")
            rows = sweep_schedule_phase_diagram(sigma2, grid, opt);
        else
            rows = sweep_joint_gaussian_schedule(r, s, grid, opt);

        std::string const mc = kind.joint ? "lambda" : "mean_coeff";
        std::string const vc = kind.joint ? "Lambda" : "variance_coeff";
        CsvTable full({kind.x_name, kind.y_name, "t_speciation", mc, vc, "delta_mu",
                       "delta_sigma2", "region", "region_code", "error"});
        struct Quantity
        {
            std::string name;
            std::function<std::optional<double>(SweepRow const&)> get;
            bool categorical;
        };
        std::vector<Quantity> quantities;
        if (kind.has_speciation)
            quantities.push_back({"t_speciation", [](SweepRow const& r) { return r.t_speciation; }, false});
        quantities.push_back({"delta_mu", [](SweepRow const& r) { return r.delta_mu; }, false});
        quantities.push_back({"delta_sigma2", [](SweepRow const& r) { return r.delta_sigma2; }, false});
        if (kind.joint)
        {
            quantities.push_back({"lambda", [](SweepRow const& r) { return r.mean_coeff; }, false});
            quantities.push_back({"Lambda", [](SweepRow const& r) { return r.variance_coeff; }, false});
        }
        quantities.push_back({"region",
                              [](SweepRow const& r) -> std::optional<double> {
                                  if (!r.region)
                                      return std::nullopt;
                                  return static_cast<double>(static_cast<int>(*r.region));
                              },
                              true});

        std::vector<CsvTable> long_form;
        for (auto const& q : quantities)
            long_form.emplace_back(std::vector<std::string>{kind.x_name, kind.y_name, q.name});
        int failed = 0;
        for (auto const& row : rows)
        {
            failed += !row.error.empty();
            full.add(row.x1).add(row.x2).add(row.t_speciation).add(row.mean_coeff)
                .add(row.variance_coeff).add(row.delta_mu).add(row.delta_sigma2);
            if (row.region)
                full.add(to_string(*row.region)).add(static_cast<long long>(*row.region));
            else
                full.add(std::optional<double>{}).add(std::optional<double>{});
            full.add(row.error);
            full.end_row();
            for (std::size_t i = 0; i < quantities.size(); ++i)
            {
                long_form[i].add(row.x1).add(row.x2).add(quantities[i].get(row));
                long_form[i].end_row();
            }
        }
        std::string const stem = "sweep_" + kind.name;
        files.write(stem + ".csv", full.str());
        for (std::size_t i = 0; i < quantities.size(); ++i)
        {
            std::string const qstem = stem + "_" + quantities[i].name;
            files.write(qstem + ".csv", long_form[i].str());
            if (g.emit_plot)
            {
                HeatmapSpec spec{qstem + ".csv", qstem + ".png", quantities[i].name,
                                 kind.x_name, kind.y_name, kind.x.scale == "log",
                                 kind.y.scale == "log", quantities[i].categorical};
                files.write(qstem + ".gp", gnuplot_heatmap(spec));
            }
        }
        out << "wrote " << rows.size() << " cells (" << failed << " failed) to "
            << (fs::path(files.dir()) / (stem + ".csv")).string() << "\n";
    }
};

SweepKind sweep_kind(std::string const& sub)
{
    if (sub == "beta-w")
        return {"beta_w", "beta", "w", {0.01, 1.0, 40, "log", false}, {0.0, 1.0, 41, "linear", false}, true, false};
    if (sub == "sigma-w")
        return {"sigma_w", "sigma2", "w", {0.05, 2.0, 40, "linear", false}, {0.0, 2.0, 41, "linear", false}, true, false};
    if (sub == "sigma-beta")
        return {"sigma_beta", "sigma2", "beta", {0.05, 2.0, 40, "linear", false}, {0.01, 1.0, 40, "log", false}, true, false};
    if (sub == "schedule")
        return {"schedule", "w0", "omega", {-1.0, 1.0, 40, "linear", false}, {0.0, 5.0, 40, "linear", true}, false, false};
    return {"joint_schedule", "w0", "omega", {-1.0, 1.0, 40, "linear", false}, {0.0, 5.0, 40, "linear", true}, false, true};
}

// ---- validate / replay ----------------------------------------------------

struct Validate
{
    std::vector<int> criteria;
    std::vector<int> corrupt;

    void bind(CLI::App* app, Params& p)
    {
        p.list(app, "criteria", criteria, "Criterion ids to run (default: all)");
        p.list(app, "corrupt-tolerance", corrupt, "")->group("");
    }

    int run(Globals const& g, std::ostream& out) const
    {
        AcceptanceOptions opt;
        opt.quick = g.quick;
        opt.workers = g.workers;
        if (g.seed != 0)
            opt.seed = g.seed;
        opt.corrupt.insert(corrupt.begin(), corrupt.end());
        std::vector<int> ids = criteria;
        if (ids.empty())
            for (int i = 1; i <= kCriterionCount; ++i)
                ids.push_back(i);
        int failed = 0;
        for (int id : ids)
        {
            auto const res = run_criterion(id, opt);
            failed += !res.passed;
            out << format_result(res) << std::endl;
        }
        out << (ids.size() - static_cast<std::size_t>(failed)) << "/" << ids.size()
            << " criteria passed" << (g.quick ? " (quick)" : "") << "\n";
        return failed == 0 ? kExitOk : kExitValidation;
    }
};

std::vector<std::string> replay_args(json const& manifest, std::string const& out_dir)
{
    std::vector<std::string> args;
    std::istringstream words(manifest.at("subcommand").get<std::string>());
    for (std::string w; words >> w;)
        args.push_back(w);
    for (auto const& [key, value] : manifest.at("parameters").items())
    {
        if (key == "out-dir")
            continue;
        if (value.is_boolean())
        {
            // Accepted by flags and by boolean options alike.
            args.push_back("--" + key + "=" + (value.get<bool>() ? "true" : "false"));
            continue;
        }
        auto render = [](json const& v) {
            if (v.is_number_float())
                return format_real(v.get<double>());
            if (v.is_string())
                return v.get<std::string>();
            return v.dump();
        };
        if (value.is_array())
        {
            if (value.empty())
                continue;
            std::string joined;
            for (auto const& v : value)
                joined += (joined.empty() ? "" : ",") + render(v);
            args.push_back("--" + key);
            args.push_back(joined);
            continue;
        }
        args.push_back("--" + key);
        args.push_back(render(value));
    }
    args.push_back("--out-dir");
    args.push_back(out_dir);
    return args;
}

int exit_code_for(std::exception_ptr const& e, std::ostream& err, std::string const& where)
{
    try
    {
        std::rethrow_exception(e);
    }
    catch (DomainError const& x)
    {
        err << where << ": " << x.what() << "\n";
        return kExitUsage;
    }
    catch (BudgetError const& x)
    {
        err << where << ": " << x.what() << "\n";
        return kExitUsage;
    }
    catch (Error const& x)
    {
        err << where << ": numerical failure: " << x.what() << "\n";
        return kExitNumerical;
    }
    catch (fs::filesystem_error const& x)
    {
        err << where << ": " << x.what() << "\n";
        return kExitUsage;
    }
    catch (std::exception const& x)
    {
        err << where << ": " << x.what() << "\n";
        return kExitNumerical;
    }
}
}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err)
{
    CLI::App app("Distortion of classifier-free guidance in solvable diffusion models",
                 "cfgdist");
    app.set_version_flag("--version", CFGDIST_VERSION);
    app.set_config("--config", "", "TOML config file; command-line flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    Params global;
    global.option(&app, "seed", g.seed, "Master seed");
    global.option(&app, "workers", g.workers, "Worker threads; 0 means all cores");
    global.option(&app, "out-dir", g.out_dir, "Output directory");
    global.flag(&app, "emit-plot", g.emit_plot, "Also write gnuplot scripts");
    global.flag(&app, "quick", g.quick, "Reduced sample counts (validate)");

    struct Leaf
    {
        CLI::App* app;
        std::string path;
        Params params;
        std::function<int(Outputs*)> run;
        std::string stem;
    };
    std::vector<std::unique_ptr<Leaf>> leaves;
    auto leaf = [&](CLI::App* parent, std::string const& name, std::string const& help,
                    std::string path, std::string stem) -> Leaf& {
        auto l = std::make_unique<Leaf>();
        l->app = parent->add_subcommand(name, help);
        l->path = std::move(path);
        l->stem = std::move(stem);
        leaves.push_back(std::move(l));
        return *leaves.back();
    };

    auto* theory = app.add_subcommand("theory", "Closed-form predictions")->require_subcommand(1);
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo guided diffusion")->require_subcommand(1);
    auto* sweep = app.add_subcommand("sweep", "Two-parameter theory grids")->require_subcommand(1);

    TheoryMixture theory_mixture;
    TheoryJoint theory_joint;
    SimulateMixture simulate_mixture;
    SimulateJoint simulate_joint;
    {
        auto& l = leaf(theory, "mixture", "Mean-field trajectory for the Gaussian mixture",
                       "theory mixture", "theory_mixture");
        theory_mixture.bind(l.app, l.params);
        l.run = [&](Outputs* f) { theory_mixture.run(g, *f, out); return kExitOk; };
    }
    {
        auto& l = leaf(theory, "joint", "Distortion coefficients for jointly Gaussian data",
                       "theory joint", "theory_joint");
        theory_joint.bind(l.app, l.params);
        l.run = [&](Outputs* f) { theory_joint.run(g, *f, out); return kExitOk; };
    }
    {
        auto& l = leaf(simulate, "mixture", "Simulate the mixture and compare with theory",
                       "simulate mixture", "simulate_mixture");
        simulate_mixture.bind(l.app, l.params);
        l.run = [&](Outputs* f) { simulate_mixture.run(g, *f, out); return kExitOk; };
    }
    {
        auto& l = leaf(simulate, "joint", "Simulate a random joint-Gaussian model",
                       "simulate joint", "simulate_joint");
        simulate_joint.bind(l.app, l.params);
        l.run = [&](Outputs* f) { simulate_joint.run(g, *f, out); return kExitOk; };
    }
    std::vector<std::unique_ptr<Sweep>> sweeps;
    for (std::string name : {"beta-w", "sigma-w", "sigma-beta", "schedule", "joint-schedule"})
    {
        sweeps.push_back(std::make_unique<Sweep>());
        Sweep& sw = *sweeps.back();
        sw.kind = sweep_kind(name);
        auto& l = leaf(sweep, name, "Sweep " + sw.kind.x_name + " x " + sw.kind.y_name,
                       "sweep " + name, "sweep_" + sw.kind.name);
        sw.bind(l.app, l.params);
        l.run = [&sw, &g, &out](Outputs* f) { sw.run(g, *f, out); return kExitOk; };
    }
    Validate validate;
    {
        auto& l = leaf(&app, "validate", "Run the acceptance suite", "validate", "");
        validate.bind(l.app, l.params);
        l.run = [&](Outputs*) { return validate.run(g, out); };
    }
    std::string manifest_path;
    std::string replay_out;
    auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
    replay->add_option("manifest", manifest_path, "Manifest JSON file")->required()->check(CLI::ExistingFile);

    try
    {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    }
    catch (CLI::ParseError const& e)
    {
        int const code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (replay->parsed())
    {
        try
        {
            std::ifstream in(manifest_path);
            json const manifest = json::parse(in);
            // An explicit --out-dir redirects the replay; otherwise reuse the original.
            std::string const dir = app.get_option("--out-dir")->count() > 0
                                        ? g.out_dir
                                        : manifest.at("parameters").at("out-dir").get<std::string>();
            return run_cli(replay_args(manifest, dir), out, err);
        }
        catch (...)
        {
            return exit_code_for(std::current_exception(), err, "replay");
        }
    }

    for (auto& l : leaves)
    {
        if (!l->app->parsed())
            continue;
        try
        {
            if (l->stem.empty())
                return l->run(nullptr);
            auto const start = std::chrono::steady_clock::now();
            Outputs files(g.out_dir);
            int const code = l->run(&files);
            double const seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            json manifest;
            manifest["tool"] = "cfgdist";
            manifest["version"] = CFGDIST_VERSION;
            manifest["subcommand"] = l->path;
            json params = json::object();
            global.append_to(params);
            l->params.append_to(params);
            manifest["parameters"] = params;
            manifest["seed"] = g.seed;
            manifest["duration_seconds"] = seconds;
            manifest["outputs"] = files.files();
            std::ofstream(fs::path(g.out_dir) / (l->stem + ".manifest.json")) << manifest.dump(2)
                                                                              << "\n";
            return code;
        }
        catch (...)
        {
            return exit_code_for(std::current_exception(), err, l->path);
        }
    }
    return kExitUsage;
}
}  // namespace cfgdist::app
