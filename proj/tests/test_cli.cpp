// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <unistd.h>

#include "commands.hpp"

#ifndef CFGDIST_GOLDEN_DIR
#error "CFGDIST_GOLDEN_DIR must point at tests/golden"
#endif

namespace fs = std::filesystem;
using cfgdist::app::run_cli;

namespace
{
struct Run
{
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args)
{
    std::ostringstream out;
    std::ostringstream err;
    int const code = run_cli(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

class TempDir
{
  public:
    TempDir()
    {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("cfgdist-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string str() const { return path_.string(); }
    std::string file(std::string const& name) const { return (path_ / name).string(); }

  private:
    fs::path path_;
};

std::string slurp(std::string const& path)
{
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing " << path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string golden(std::string const& name) { return slurp(std::string(CFGDIST_GOLDEN_DIR) + "/" + name); }

std::string first_line(std::string const& text) { return text.substr(0, text.find('\n')); }

std::vector<std::string> split(std::string const& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');)
        out.push_back(f);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

std::vector<std::string> lines(std::string const& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string l; std::getline(ss, l);)
        out.push_back(l);
    return out;
}
}  // namespace

TEST_SUITE("cli")
{
    TEST_CASE("theory mixture examples")
    {
        TempDir dir;
        auto const zero = cli({"theory", "mixture", "--sigma2", "0.5", "--beta", "0.1", "--w", "0", "--t", "0,0.5,3",
                               "--out-dir", dir.str()});
        REQUIRE(zero.code == 0);
        auto const rows = lines(zero.out);
        REQUIRE(rows.size() == 4);
        CHECK(rows[0] == "t,w,mean_coeff,variance,delta_mu,delta_sigma2,phase,t_speciation");
        for (std::size_t i = 1; i < rows.size(); ++i)
        {
            auto const f = split(rows[i]);
            CHECK(std::abs(std::stod(f[4])) < 1e-12);
            CHECK(std::abs(std::stod(f[5])) < 1e-12);
        }

        auto const guided = cli({"theory", "mixture", "--sigma2", "0.5", "--beta", "large", "--w", "1", "--t", "0",
                                 "--out-dir", dir.str()});
        REQUIRE(guided.code == 0);
        auto const f = split(lines(guided.out)[1]);
        CHECK(std::stod(f[4]) == doctest::Approx(0.333333).epsilon(1e-6));
        CHECK(std::stod(f[5]) == doctest::Approx(-0.518519).epsilon(1e-6));
        CHECK(f[7].empty());
        CHECK(slurp(dir.file("theory_mixture.csv")) == guided.out);
    }

    TEST_CASE("theory joint example")
    {
        TempDir dir;
        auto const r = cli({"theory", "joint", "--r", "1", "--s", "0.6", "--w", "1", "--t", "0", "--out-dir", dir.str()});
        REQUIRE(r.code == 0);
        auto const rows = lines(r.out);
        CHECK(rows[0] == "t,index,r,s,lambda,Lambda,delta_mu,delta_sigma2,phase");
        auto const f = split(rows[1]);
        CHECK(std::stod(f[4]) == doctest::Approx(1.6).epsilon(1e-6));
        CHECK(std::stod(f[5]) == doctest::Approx(0.653333).epsilon(1e-6));
    }

    TEST_CASE("linear schedule theory")
    {
        TempDir dir;
        auto const r = cli({"theory", "mixture", "--sigma2", "0.25", "--beta", "inf", "--schedule", "linear", "--w0",
                            "-0.75", "--omega", "1", "--t", "0", "--out-dir", dir.str()});
        REQUIRE(r.code == 0);
        auto const f = split(lines(r.out)[1]);
        CHECK(std::stod(f[2]) == doctest::Approx(1.25).epsilon(1e-8));
        auto const bad = cli({"theory", "mixture", "--schedule", "linear", "--beta", "0.1", "--out-dir", dir.str()});
        CHECK(bad.code == 1);
        CHECK(bad.err.find("theory mixture") != std::string::npos);
    }

    TEST_CASE("exit codes")
    {
        TempDir dir;
        CHECK(cli({}).code == 1);
        CHECK(cli({"--help"}).code == 0);
        CHECK(cli({"theory", "mixture", "--no-such-flag"}).code == 1);
        CHECK(cli({"theory", "mixture", "--beta", "lots", "--out-dir", dir.str()}).code == 1);
        auto const neg = cli({"theory", "mixture", "--sigma2", "-1", "--out-dir", dir.str()});
        CHECK(neg.code == 1);
        CHECK(neg.err.find("sigma2") != std::string::npos);
        CHECK(cli({"simulate", "mixture", "--d", "40", "--beta", "1", "--out-dir", dir.str()}).code == 1);
        CHECK(cli({"sweep", "beta-w", "--x-points", "1", "--out-dir", dir.str()}).code == 1);
    }

    TEST_CASE("two-by-two sweep golden")
    {
        TempDir dir;
        auto const r = cli({"sweep", "beta-w", "--x-points", "2", "--y-points", "2", "--emit-plot", "--out-dir", dir.str()});
        REQUIRE(r.code == 0);
        auto const csv = slurp(dir.file("sweep_beta_w.csv"));
        CHECK(lines(csv).size() == 5);
        CHECK(csv == golden("sweep_beta_w_2x2.csv"));
        CHECK(slurp(dir.file("sweep_beta_w_delta_mu.gp")) == golden("sweep_beta_w_delta_mu.gp"));
        CHECK(slurp(dir.file("sweep_beta_w_region.gp")) == golden("sweep_beta_w_region.gp"));
        for (std::string q : {"t_speciation", "delta_mu", "delta_sigma2", "region"})
            CHECK(first_line(slurp(dir.file("sweep_beta_w_" + q + ".csv"))) == "beta,w," + q);
        auto const manifest = nlohmann::json::parse(slurp(dir.file("sweep_beta_w.manifest.json")));
        CHECK(manifest["tool"] == "cfgdist");
        CHECK(manifest["subcommand"] == "sweep beta-w");
        CHECK(manifest["parameters"]["x-points"] == 2);
        CHECK(manifest["outputs"].size() == 9);
    }

    TEST_CASE("csv schemas")
    {
        TempDir dir;
        REQUIRE(cli({"sweep", "schedule", "--x-points", "2", "--y-points", "2", "--out-dir", dir.str()}).code == 0);
        REQUIRE(cli({"sweep", "joint-schedule", "--x-points", "2", "--y-points", "2", "--out-dir", dir.str()}).code == 0);
        REQUIRE(cli({"sweep", "sigma-w", "--x-points", "2", "--y-points", "2", "--out-dir", dir.str()}).code == 0);
        REQUIRE(cli({"sweep", "sigma-beta", "--x-points", "2", "--y-points", "2", "--out-dir", dir.str()}).code == 0);
        REQUIRE(cli({"simulate", "mixture", "--d", "4", "--w", "0,1", "--n", "20", "--steps", "20", "--dump-samples",
                     "--emit-plot", "--out-dir", dir.str()})
                    .code == 0);
        REQUIRE(cli({"simulate", "joint", "--d", "3", "--w", "0,1", "--n", "20", "--steps", "20", "--emit-plot",
                     "--out-dir", dir.str()})
                    .code == 0);
        std::ostringstream headers;
        for (std::string f : {"sweep_schedule.csv", "sweep_joint_schedule.csv", "sweep_joint_schedule_Lambda.csv",
                              "sweep_sigma_w.csv", "sweep_sigma_beta.csv", "simulate_mixture.csv",
                              "samples_mixture_d4_w1.csv", "simulate_joint.csv", "simulate_joint_summary.csv"})
            headers << f << ": " << first_line(slurp(dir.file(f))) << "\n";
        CHECK(headers.str() == golden("headers.txt"));
        CHECK(slurp(dir.file("simulate_mixture_delta_sigma2.gp")) == golden("simulate_mixture_delta_sigma2.gp"));
        CHECK(slurp(dir.file("simulate_joint_mean.gp")) == golden("simulate_joint_mean.gp"));
        CHECK(lines(slurp(dir.file("samples_mixture_d4_w0.csv"))).size() == 21);
    }

    TEST_CASE("simulate is deterministic and replayable")
    {
        TempDir a;
        TempDir b;
        TempDir c;
        std::vector<std::string> args{"simulate", "mixture", "--d", "6", "--w", "0.5", "--n", "64",
                                      "--steps", "40", "--seed", "7"};
        auto with_dir = [&](TempDir const& d, std::vector<std::string> extra) {
            auto v = args;
            v.insert(v.end(), extra.begin(), extra.end());
            v.push_back("--out-dir");
            v.push_back(d.str());
            return v;
        };
        REQUIRE(cli(with_dir(a, {"--workers", "1"})).code == 0);
        REQUIRE(cli(with_dir(b, {"--workers", "3"})).code == 0);
        CHECK(slurp(a.file("simulate_mixture.csv")) == slurp(b.file("simulate_mixture.csv")));
        REQUIRE(cli({"replay", a.file("simulate_mixture.manifest.json"), "--out-dir", c.str()}).code == 0);
        CHECK(slurp(a.file("simulate_mixture.csv")) == slurp(c.file("simulate_mixture.csv")));

        TempDir s1;
        TempDir s2;
        REQUIRE(cli({"sweep", "schedule", "--x-points", "5", "--y-points", "4", "--out-dir", s1.str()}).code == 0);
        REQUIRE(cli({"replay", s1.file("sweep_schedule.manifest.json"), "--out-dir", s2.str()}).code == 0);
        CHECK(slurp(s1.file("sweep_schedule.csv")) == slurp(s2.file("sweep_schedule.csv")));
    }

    TEST_CASE("different seeds agree statistically")
    {
        TempDir a;
        TempDir b;
        for (auto [dir, seed] : {std::pair{&a, "1"}, {&b, "2"}})
            REQUIRE(cli({"simulate", "mixture", "--d", "8", "--w", "1", "--n", "800", "--steps", "150", "--seed",
                         seed, "--out-dir", dir->str()})
                        .code == 0);
        auto const fa = split(lines(slurp(a.file("simulate_mixture.csv")))[1]);
        auto const fb = split(lines(slurp(b.file("simulate_mixture.csv")))[1]);
        // Different seeds draw different centroids too, so compare against
        // the combined sampling error with some allowance for the instance.
        for (int col : {10, 13})
        {
            double const diff = std::abs(std::stod(fa[col]) - std::stod(fb[col]));
            double const se = std::hypot(std::stod(fa[col + 1]), std::stod(fb[col + 1]));
            CHECK(diff < 3 * se + 0.05);
        }
    }

    TEST_CASE("config file with command-line precedence")
    {
        TempDir dir;
        std::ofstream(dir.file("run.toml")) << "seed = 5\n[theory.mixture]\nsigma2 = 0.25\nw = 2\n";
        auto const r = cli({"--config", dir.file("run.toml"), "theory", "mixture", "--w", "1", "--beta", "inf",
                            "--out-dir", dir.str()});
        REQUIRE(r.code == 0);
        auto const m = nlohmann::json::parse(slurp(dir.file("theory_mixture.manifest.json")));
        CHECK(m["parameters"]["sigma2"] == 0.25);
        CHECK(m["parameters"]["w"] == 1.0);
        CHECK(m["seed"] == 5);
    }

    TEST_CASE("validate")
    {
        auto const ok = cli({"validate", "--criteria", "1,2"});
        CHECK(ok.code == 0);
        CHECK(ok.out.find("PASS [1] zero_guidance_identity") != std::string::npos);
        CHECK(ok.out.find("2/2 criteria passed") != std::string::npos);
        auto const bad = cli({"validate", "--criteria", "1,2", "--corrupt-tolerance", "2"});
        CHECK(bad.code == 3);
        CHECK(bad.out.find("FAIL [2] expansion_contraction_law") != std::string::npos);
        CHECK(bad.out.find("PASS [1]") != std::string::npos);
        auto const quick = cli({"validate", "--criteria", "7", "--quick"});
        CHECK(quick.code == 0);
        CHECK(quick.out.find("(quick)") != std::string::npos);
    }
}
