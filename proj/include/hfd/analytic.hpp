#pragma once

#include "hfd/marginals.hpp"
#include "hfd/types.hpp"

#include <cstdint>
#include <span>

namespace hfd {

//! Trivariate Farlie-Gumbel-Morgenstern density on [-1, 1]^3,
//! f(x) = (1 + rho (x1 x2 + x1 x3 + x2 x3)) / 8, rho in (-1/3, 1).
class FgmCase
{
public:
  explicit FgmCase(double rho = 0.5);

  double rho() const { return rho_; }

  double density(std::span<const double> x) const;
  static double marginal1(double x);
  double marginal2(double xi, double xj) const;

  //! Rejection sampling against the uniform cube, envelope max(1 + 3 rho, 1 - rho).
  //! When `proposals` is given it receives the number of uniform draws used.
  Matrix sample(std::size_t n, std::uint64_t seed, std::size_t* proposals = nullptr) const;

  //! Theoretical components: nonzero only for {0}, {1} and {0, 1}.
  double component(const Subset& subset, std::span<const double> x) const;
  double target(std::span<const double> x) const;
  Vector target(const Matrix& X) const;

private:
  double rho_;
};

//! X = tanh(Z) with Z ~ N(0, Sigma), Sigma the 3x3 equicorrelation matrix.
class GaussTanhCase
{
public:
  explicit GaussTanhCase(double rho = 0.5);

  double rho() const { return rho_; }

  //! Marginal densities; throw DomainError for |x| >= 1.
  static double marginal1(double x);
  double marginal2(double xi, double xj) const;

  Matrix sample(std::size_t n, std::uint64_t seed) const;

  double component(const Subset& subset, std::span<const double> x) const;
  double target(std::span<const double> x) const;
  Vector target(const Matrix& X) const;

private:
  double rho_;
  Matrix chol_;
};

//! Exact f_S of the FGM case, for |S| <= 3.
class FgmMarginals final : public MarginalDensity
{
public:
  explicit FgmMarginals(FgmCase c)
    : case_(c)
  {}
  double density(const Subset& subset, std::span<const double> x_subset) const override;

private:
  FgmCase case_;
};

//! Exact f_S of the Gaussian-tanh case, for |S| <= 2.
class GaussTanhMarginals final : public MarginalDensity
{
public:
  explicit GaussTanhMarginals(GaussTanhCase c)
    : case_(std::move(c))
  {}
  double density(const Subset& subset, std::span<const double> x_subset) const override;

private:
  GaussTanhCase case_;
};

//! Numerators shared by both analytic cases (before division by f_S).
double analytic_numerator(const Subset& subset, std::span<const double> x);

} // namespace hfd
