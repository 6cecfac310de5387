// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
//! \file score_kernels.hpp
//! Softmax-weighted centroid means, the inner loop of the mixture score.
//!
//! For each query x the kernels compute
//!   m(x) = sum_mu gamma_mu c_mu,  gamma = softmax(-|x - c_mu|^2 / (2u)).
//! The scalar kernel is the reference. Vector kernels are selected at runtime
//! and must agree with it to rounding.
#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace cfgdist::kernels
{
//! Centroids stored coordinate-major: coords[j * stride + mu]. Padding
//! columns hold zeros and an infinite half squared norm.
class CentroidPanel
{
  public:
    CentroidPanel() = default;
    //! `rows` is count x dim, row-major.
    CentroidPanel(std::span<const double> rows, std::size_t count, int dim);

    int dim() const { return dim_; }
    std::size_t count() const { return count_; }
    std::size_t stride() const { return stride_; }
    double const* coords() const { return coords_.data(); }
    double const* half_sqnorm() const { return half_sqnorm_.data(); }
    //! Centroid mu, coordinate j.
    double at(std::size_t mu, int j) const
    {
        return coords_[static_cast<std::size_t>(j) * stride_ + mu];
    }

    static constexpr std::size_t kAlign = 64;

  private:
    int dim_ = 0;
    std::size_t count_ = 0;
    std::size_t stride_ = 0;
    std::vector<double> coords_;
    std::vector<double> half_sqnorm_;
};

//! Queries xs (batch x dim, row-major) -> means out (batch x dim).
using WeightedMeanFn = void (*)(CentroidPanel const& panel,
                                std::span<const double> xs, double u,
                                std::span<double> out);

enum class Isa
{
    scalar,
    avx2,
    avx512,
};

std::string_view to_string(Isa isa);

//! Two-pass reference: distance-form logits, max-shifted std::exp.
void weighted_mean_scalar(CentroidPanel const& panel, std::span<const double> xs,
                          double u, std::span<double> out);

#if defined(CFGDIST_HAVE_AVX2)
//! Tiled online softmax with a vectorized exp; tiles whose logits trail the
//! running maximum by more than kPruneGap are skipped.
void weighted_mean_avx2(CentroidPanel const& panel, std::span<const double> xs,
                        double u, std::span<double> out);
#endif

#if defined(CFGDIST_HAVE_AVX512)
//! Same algorithm as the AVX2 kernel on 512-bit registers.
void weighted_mean_avx512(CentroidPanel const& panel, std::span<const double> xs,
                          double u, std::span<double> out);
#endif

inline constexpr double kPruneGap = 60.0;

//! ISAs compiled in and supported by this CPU, best last.
std::vector<Isa> available_isas();
//! Best available ISA, or the value of CFGDIST_ISA=scalar|avx2|avx512 if set.
Isa default_isa();
WeightedMeanFn select(Isa isa);
}  // namespace cfgdist::kernels
