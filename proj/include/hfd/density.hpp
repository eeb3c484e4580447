#pragma once

#include "hfd/marginals.hpp"
#include "hfd/types.hpp"

#include <map>
#include <vector>

namespace hfd {

//! Orthogonal-series estimate of the marginal densities f_S on
//! [-1, 1]^{|S|}: a truncated tensorized normalized-Legendre expansion per
//! subset, floored at `clip_floor` on evaluation.
class DensityModel final : public MarginalDensity
{
public:
  DensityModel() = default;
  DensityModel(int degree, double clip_floor);

  int degree() const { return degree_; }
  double clip_floor() const { return clip_floor_; }

  //! Coefficients of subset S, row-major over {0..degree}^{|S|} with the
  //! last feature varying fastest.
  const std::vector<double>& coefficients(const Subset& subset) const;
  const std::map<Subset, std::vector<double>>& all_coefficients() const
  {
    return coefficients_;
  }
  bool contains(const Subset& subset) const
  {
    return coefficients_.count(subset) != 0;
  }

  //! Unclipped expansion value.
  double raw_density(const Subset& subset,
                     std::span<const double> x_subset) const;

  //! max(clip_floor, raw_density).
  double density(const Subset& subset,
                 std::span<const double> x_subset) const override;

  //! Inserts or replaces a coefficient tensor (used by deserialization).
  void set_coefficients(Subset subset, std::vector<double> coefficients);

private:
  int degree_ = 0;
  double clip_floor_ = 0.01;
  std::map<Subset, std::vector<double>> coefficients_;
};

//! Fits c_S^{(m)} = mean_i prod_{j in S} Ptilde_{m_j}(X_ij) for every subset.
//! Subsets are canonicalized (sorted) and deduplicated. The all-zero
//! coefficient is set to its exact value 2^{-|S|/2}.
DensityModel fit_density(const Matrix& X_scaled,
                         const std::vector<Subset>& subsets,
                         int degree,
                         double clip_floor);

//! Evaluates density(subset, x_subset) with clipping.
double eval_density(const DensityModel& model,
                    const Subset& subset,
                    std::span<const double> x_subset);

} // namespace hfd
