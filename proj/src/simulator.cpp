// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
#include "cfgdist/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "cfgdist/error.hpp"
#include "cfgdist/rng.hpp"

namespace cfgdist
{
namespace
{
constexpr std::size_t kBlock = 32;  // samples per work unit

int resolve_workers(int requested)
{
    if (requested > 0)
        return requested;
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}
}  // namespace

void SimConfig::validate() const
{
    detail::require(dim >= 1, "dim must be >= 1");
    detail::require(n_samples >= 2, "n_samples must be >= 2");
    detail::require(std::isfinite(horizon_T) && horizon_T > 0, "horizon_T must be > 0");
    detail::require(n_steps >= 10, "n_steps must be >= 10");
    detail::require(std::isfinite(grid_offset) && grid_offset > 0, "grid_offset must be > 0");
    detail::require(workers >= 0, "workers must be >= 0");
    for (double c : checkpoints)
        detail::require(std::isfinite(c) && 0 <= c && c <= horizon_T,
                        "checkpoints must lie in [0, horizon_T]");
}

std::vector<double> time_grid(SimConfig const& config)
{
    config.validate();
    auto const n = static_cast<std::size_t>(config.n_steps);
    std::vector<double> ts(n + 1);
    double const top = config.horizon_T;
    for (std::size_t k = 0; k <= n; ++k)
    {
        double const frac = static_cast<double>(k) / static_cast<double>(n);
        if (config.grid == TimeGrid::uniform)
        {
            ts[k] = top * (1.0 - frac);
        }
        else
        {
            double const off = config.grid_offset;
            ts[k] = (off + top) * std::exp(frac * std::log(off / (off + top))) - off;
        }
    }
    ts.front() = top;
    ts.back() = 0.0;
    for (double c : config.checkpoints)
        ts.push_back(c);
    std::sort(ts.begin(), ts.end(), std::greater<>());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    return ts;
}

void DriftModel::initial_mean(std::span<double> out) const
{
    std::fill(out.begin(), out.end(), 0.0);
}

MixtureInstance sample_centroids(int dim, std::size_t count, std::uint64_t seed,
                                 double sigma2, bool normalize_target)
{
    detail::require(dim >= 1 && count >= 1, "sample_centroids needs dim, count >= 1");
    detail::require(std::isfinite(sigma2) && sigma2 > 0, "sigma2 must be > 0");
    auto const d = static_cast<std::size_t>(dim);
    if (count > kCentroidBudget / d)
    {
        std::ostringstream os;
        os << "centroid matrix " << count << " x " << dim << " exceeds the budget of "
           << kCentroidBudget << " entries";
        throw BudgetError(os.str());
    }
    MixtureInstance inst;
    inst.dim = dim;
    inst.count = count;
    inst.sigma2 = sigma2;
    inst.centroids.resize(count * d);
    CounterRng const rng(seed, stream_id("centroids"));
    for (std::size_t mu = 0; mu < count; ++mu)
        rng.normals(mu, 0, std::span<double>(inst.centroids.data() + mu * d, d));
    if (normalize_target)
    {
        double sq = 0.0;
        for (std::size_t j = 0; j < d; ++j)
            sq += inst.centroids[j] * inst.centroids[j];
        double const scale = std::sqrt(static_cast<double>(d) / sq);
        for (std::size_t j = 0; j < d; ++j)
            inst.centroids[j] *= scale;
    }
    inst.panel = kernels::CentroidPanel(inst.centroids, count, dim);
    return inst;
}

std::size_t centroid_count(double beta, int dim)
{
    detail::require(std::isfinite(beta) && beta >= 0, "beta must be >= 0");
    detail::require(dim >= 1, "dim must be >= 1");
    double const exponent = beta * dim;
    if (exponent > std::log(kMaxExponentialCount))
    {
        std::ostringstream os;
        os << "exp(beta d) = exp(" << exponent << ") centroids is beyond the simulation limit of "
           << kMaxExponentialCount << "; reduce d or beta";
        throw BudgetError(os.str());
    }
    return static_cast<std::size_t>(std::max(1.0, std::round(std::exp(exponent))));
}

MixtureDrift::MixtureDrift(MixtureInstance const& inst, kernels::Isa isa)
    : inst_(&inst), mean_fn_(kernels::select(isa))
{
}

void MixtureDrift::drift(std::span<const double> xs, double t, double w,
                         std::span<double> out) const
{
    auto const d = static_cast<std::size_t>(inst_->dim);
    double const u = inst_->sigma2 + t;
    auto const c1 = inst_->target();
    std::size_t const batch = xs.size() / d;
    if (w != 0.0)
        mean_fn_(inst_->panel, xs, u, out);
    for (std::size_t b = 0; b < batch; ++b)
    {
        double const* x = xs.data() + b * d;
        double* y = out.data() + b * d;
        for (std::size_t j = 0; j < d; ++j)
        {
            double const mixture = w != 0.0 ? w * y[j] : 0.0;
            y[j] = ((1.0 + w) * c1[j] - mixture - x[j]) / u;
        }
    }
}

std::vector<double> mixture_guided_score(std::span<const double> x, double t,
                                         MixtureInstance const& inst, double w,
                                         kernels::Isa isa)
{
    detail::require(x.size() == static_cast<std::size_t>(inst.dim), "score dimension mismatch");
    detail::require(std::isfinite(t) && t >= 0, "time must be >= 0");
    std::vector<double> out(x.size());
    MixtureDrift(inst, isa).drift(x, t, w, out);
    return out;
}

JointGaussianDrift::JointGaussianDrift(JointGaussianModel const& model)
    : model_(&model)
{
    auto const d = static_cast<std::size_t>(model.dim());
    basis_.resize(d * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            basis_[i * d + j] = model.basis()(static_cast<Eigen::Index>(i),
                                              static_cast<Eigen::Index>(j));
}

void JointGaussianDrift::drift(std::span<const double> xs, double t, double w,
                               std::span<double> out) const
{
    auto const d = static_cast<std::size_t>(model_->dim());
    std::vector<double> y(d);
    auto const& mu_e = model_->mu_eigen();
    auto const& s = model_->s();
    auto const& r = model_->r();
    for (std::size_t b = 0; b < xs.size() / d; ++b)
    {
        double const* x = xs.data() + b * d;
        // y = V^T x, combined guided score in eigen coordinates, then V y.
        for (std::size_t i = 0; i < d; ++i)
        {
            double p = 0.0;
            for (std::size_t k = 0; k < d; ++k)
                p += basis_[k * d + i] * x[k];
            auto const ii = static_cast<Eigen::Index>(i);
            y[i] = -(1.0 + w) * (p - mu_e[ii]) / (s[ii] + t) + w * p / (r[ii] + t);
        }
        double* o = out.data() + b * d;
        for (std::size_t k = 0; k < d; ++k)
        {
            double acc = 0.0;
            for (std::size_t i = 0; i < d; ++i)
                acc += basis_[k * d + i] * y[i];
            o[k] = acc;
        }
    }
}

void JointGaussianDrift::initial_mean(std::span<double> out) const
{
    auto const& mu = model_->mu();
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = mu[static_cast<Eigen::Index>(i)];
}

std::vector<SampleSet> integrate_backward(SimConfig const& config,
                                          DriftModel const& model)
{
    config.validate();
    detail::require(model.dim() == config.dim, "drift model dimension mismatch");
    std::vector<double> const ts = time_grid(config);
    auto const d = static_cast<std::size_t>(config.dim);
    std::size_t const n = config.n_samples;

    std::vector<double> checkpoints = config.checkpoints;
    std::sort(checkpoints.begin(), checkpoints.end(), std::greater<>());
    checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
    std::vector<SampleSet> result(checkpoints.size());
    for (std::size_t c = 0; c < checkpoints.size(); ++c)
        result[c] = SampleSet{checkpoints[c], config.dim, n, std::vector<double>(n * d)};

    std::vector<double> x0_mean(d);
    model.initial_mean(x0_mean);
    double const sqrt_top = std::sqrt(config.horizon_T);
    CounterRng const rng(config.seed, stream_id("diffusion"));

    std::size_t const n_blocks = (n + kBlock - 1) / kBlock;
    std::atomic<std::size_t> next{0};
    std::mutex failure_mutex;
    std::size_t failed_block = n_blocks;
    std::exception_ptr failure;

    auto run_block = [&](std::size_t block) {
        std::size_t const first = block * kBlock;
        std::size_t const count = std::min(kBlock, n - first);
        std::vector<double> x(count * d);
        std::vector<double> drift(count * d);
        std::vector<double> noise(d);
        for (std::size_t b = 0; b < count; ++b)
        {
            rng.normals(first + b, 0, noise);
            for (std::size_t j = 0; j < d; ++j)
                x[b * d + j] = x0_mean[j] + sqrt_top * noise[j];
        }
        std::size_t next_checkpoint = 0;
        auto record = [&](double t) {
            while (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] == t)
            {
                auto& dst = result[next_checkpoint].data;
                std::copy(x.begin(), x.end(), dst.begin() + static_cast<std::ptrdiff_t>(first * d));
                ++next_checkpoint;
            }
        };
        record(ts.front());
        for (std::size_t k = 0; k + 1 < ts.size(); ++k)
        {
            double const t = ts[k];
            double const dt = t - ts[k + 1];
            double const sqrt_dt = std::sqrt(dt);
            model.drift(x, t, config.schedule.at(t), drift);
            for (std::size_t b = 0; b < count; ++b)
            {
                // Step counter 0 draws the initial state.
                rng.normals(first + b, static_cast<std::uint32_t>(k + 1), noise);
                bool finite = true;
                for (std::size_t j = 0; j < d; ++j)
                {
                    double& xi = x[b * d + j];
                    xi += drift[b * d + j] * dt + sqrt_dt * noise[j];
                    finite = finite && std::isfinite(xi);
                }
                if (!finite)
                {
                    std::ostringstream os;
                    os << "non-finite state at step " << k << " (t = " << t << "), sample "
                       << first + b;
                    throw NumericalError(os.str());
                }
            }
            record(ts[k + 1]);
        }
    };

    auto worker = [&] {
        for (;;)
        {
            std::size_t const block = next.fetch_add(1);
            if (block >= n_blocks)
                return;
            try
            {
                run_block(block);
            }
            catch (...)
            {
                std::lock_guard lock(failure_mutex);
                // Keep the lowest failing block so the report does not depend
                // on scheduling.
                if (block < failed_block)
                {
                    failed_block = block;
                    failure = std::current_exception();
                }
            }
        }
    };

    int const n_workers = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(resolve_workers(config.workers)), n_blocks));
    if (n_workers <= 1)
    {
        worker();
    }
    else
    {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(n_workers));
        for (int i = 0; i < n_workers; ++i)
            threads.emplace_back(worker);
        for (auto& th : threads)
            th.join();
    }
    if (failure)
        std::rethrow_exception(failure);
    return result;
}

namespace
{
struct DistortionPoint
{
    double delta_mu;
    double delta_sigma2;
};

// Estimators over the multiset of sample rows given by `rows`.
template <class RowIndex>
DistortionPoint estimate(SampleSet const& samples, std::span<const double> c1,
                         double sigma2, RowIndex rows, std::vector<double>& mean)
{
    auto const d = static_cast<std::size_t>(samples.dim);
    std::size_t const n = samples.n;
    std::fill(mean.begin(), mean.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
    {
        double const* x = samples.data.data() + rows(i) * d;
        for (std::size_t j = 0; j < d; ++j)
            mean[j] += x[j];
    }
    for (double& m : mean)
        m /= static_cast<double>(n);
    double spread = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        double const* x = samples.data.data() + rows(i) * d;
        for (std::size_t j = 0; j < d; ++j)
        {
            double const dev = x[j] - mean[j];
            spread += dev * dev;
        }
    }
    double const var = spread / (static_cast<double>(n - 1) * static_cast<double>(d));
    double shift = 0.0;
    for (std::size_t j = 0; j < d; ++j)
        shift += c1[j] * (mean[j] - c1[j]);
    return {shift / static_cast<double>(d), (var - sigma2) / sigma2};
}
}  // namespace

EmpiricalDistortion measure_distortion(SampleSet const& samples,
                                       std::span<const double> c1, double sigma2,
                                       std::uint64_t seed, int n_boot)
{
    detail::require(samples.n >= 2, "measure_distortion needs >= 2 samples");
    detail::require(c1.size() == static_cast<std::size_t>(samples.dim), "c1 dimension mismatch");
    detail::require(std::isfinite(sigma2) && sigma2 > 0, "sigma2 must be > 0");
    detail::require(n_boot >= 2, "bootstrap needs >= 2 resamples");
    std::vector<double> mean(static_cast<std::size_t>(samples.dim));
    DistortionPoint const point =
        estimate(samples, c1, sigma2, [](std::size_t i) { return i; }, mean);

    CounterRng const rng(seed, stream_id("bootstrap"));
    double s_mu = 0.0, ss_mu = 0.0, s_sig = 0.0, ss_sig = 0.0;
    for (int rep = 0; rep < n_boot; ++rep)
    {
        auto rows = [&](std::size_t i) {
            return static_cast<std::size_t>(
                rng.below(samples.n, i, static_cast<std::uint32_t>(rep), 0));
        };
        DistortionPoint const p = estimate(samples, c1, sigma2, rows, mean);
        s_mu += p.delta_mu;
        ss_mu += p.delta_mu * p.delta_mu;
        s_sig += p.delta_sigma2;
        ss_sig += p.delta_sigma2 * p.delta_sigma2;
    }
    auto std_dev = [n_boot](double s, double ss) {
        double const m = s / n_boot;
        return std::sqrt(std::max(0.0, (ss - n_boot * m * m) / (n_boot - 1)));
    };
    return {{point.delta_mu, std_dev(s_mu, ss_mu)},
            {point.delta_sigma2, std_dev(s_sig, ss_sig)},
            samples.n};
}

GaussianSampleMoments gaussian_sample_moments(SampleSet const& samples,
                                              Eigen::MatrixXd const& basis)
{
    detail::require(samples.n >= 2, "sample moments need >= 2 samples");
    detail::require(basis.rows() == samples.dim && basis.cols() == samples.dim,
                    "basis dimension mismatch");
    auto const x = samples.matrix();
    auto const n = static_cast<double>(samples.n);
    GaussianSampleMoments out;
    out.mean = x.colwise().mean().transpose();
    Eigen::MatrixXd const centered = x.rowwise() - out.mean.transpose();
    out.covariance = centered.transpose() * centered / (n - 1.0);
    out.mean_std_error = (out.covariance.diagonal().array() / n).sqrt().matrix();
    out.eigen_variance = (basis.transpose() * out.covariance * basis).diagonal();
    return out;
}
}  // namespace cfgdist
