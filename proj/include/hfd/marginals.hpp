#pragma once

#include "hfd/types.hpp"

#include <span>

namespace hfd {

//! Source of marginal densities f_S used as inverse-likelihood weights.
//!
//! `x_subset` holds the coordinates of the features in `subset`, in the same
//! order. Implementations must be thread-safe for concurrent evaluation.
class MarginalDensity
{
public:
  virtual ~MarginalDensity() = default;

  virtual double density(const Subset& subset,
                         std::span<const double> x_subset) const = 0;
};

//! Product of independent Uniform[-1, 1] marginals: f_S = 2^{-|S|}.
class UniformMarginals final : public MarginalDensity
{
public:
  double density(const Subset& subset,
                 std::span<const double> x_subset) const override;
};

} // namespace hfd
