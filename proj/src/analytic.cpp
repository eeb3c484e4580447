#include "hfd/analytic.hpp"

#include "hfd/error.hpp"
#include "hfd/legendre.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace hfd {

namespace {

double ptilde(int m, double x)
{
  return legendre_normalized_all(m, x)[m];
}

double fgm_marginal(const FgmCase& c, const Subset& s, std::span<const double> x)
{
  switch (s.size()) {
    case 1:
      return FgmCase::marginal1(x[0]);
    case 2:
      return c.marginal2(x[0], x[1]);
    case 3:
      return c.density(x);
    default:
      throw IndexError("FGM marginals exist for 1 <= |S| <= 3");
  }
}

} // namespace

double analytic_numerator(const Subset& s, std::span<const double> x)
{
  if (s == Subset{ 0 })
    return std::sqrt(2.0 / 7.0) * ptilde(3, x[0]) - std::sqrt(2.0 / 3.0) * ptilde(1, x[0]);
  if (s == Subset{ 1 })
    return std::sqrt(2.0 / 3.0) * ptilde(1, x[1]) + std::sqrt(2.0 / 5.0) * ptilde(2, x[1]);
  if (s == Subset{ 0, 1 })
    return 2.0 / 9.0 * ptilde(4, x[0]) * ptilde(4, x[1]) +
           2.0 / 17.0 * ptilde(8, x[0]) * ptilde(8, x[1]);
  return 0.0;
}

FgmCase::FgmCase(double rho)
  : rho_(rho)
{
  if (!(rho > -1.0 / 3.0 && rho < 1.0))
    throw ConfigError("FGM dependence parameter must lie in (-1/3, 1)");
}

double FgmCase::density(std::span<const double> x) const
{
  if (x.size() != 3)
    throw DimensionError("FGM density is trivariate");
  return (1.0 + rho_ * (x[0] * x[1] + x[0] * x[2] + x[1] * x[2])) / 8.0;
}

double FgmCase::marginal1(double)
{
  return 0.5;
}

double FgmCase::marginal2(double xi, double xj) const
{
  return 0.25 * (1.0 + rho_ * xi * xj);
}

Matrix FgmCase::sample(std::size_t n, std::uint64_t seed, std::size_t* proposals) const
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> cube(-1.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double envelope = std::max(1.0 + 3.0 * rho_, 1.0 - rho_);
  Matrix X(static_cast<Eigen::Index>(n), 3);
  std::size_t drawn = 0;
  for (std::size_t i = 0; i < n;) {
    const double u0 = cube(rng), u1 = cube(rng), u2 = cube(rng);
    const double accept = (1.0 + rho_ * (u0 * u1 + u0 * u2 + u1 * u2)) / envelope;
    ++drawn;
    if (unit(rng) < accept) {
      X(i, 0) = u0;
      X(i, 1) = u1;
      X(i, 2) = u2;
      ++i;
    }
  }
  if (proposals)
    *proposals = drawn;
  return X;
}

double FgmCase::component(const Subset& s, std::span<const double> x) const
{
  if (s == Subset{ 0 })
    return analytic_numerator(s, x) / marginal1(x[0]);
  if (s == Subset{ 1 })
    return analytic_numerator(s, x) / marginal1(x[1]);
  if (s == Subset{ 0, 1 })
    return analytic_numerator(s, x) / marginal2(x[0], x[1]);
  return 0.0;
}

double FgmCase::target(std::span<const double> x) const
{
  return component({ 0 }, x) + component({ 1 }, x) + component({ 0, 1 }, x);
}

Vector FgmCase::target(const Matrix& X) const
{
  Vector y(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double x[3] = { X(i, 0), X(i, 1), X(i, 2) };
    y(i) = target(x);
  }
  return y;
}

double FgmMarginals::density(const Subset& subset, std::span<const double> x) const
{
  return fgm_marginal(case_, subset, x);
}

GaussTanhCase::GaussTanhCase(double rho)
  : rho_(rho)
{
  if (!(rho > 0.0 && rho < 1.0))
    throw ConfigError("Gaussian-tanh equicorrelation must lie in (0, 1)");
  Matrix sigma = Matrix::Constant(3, 3, rho);
  sigma.diagonal().setOnes();
  Eigen::LLT<Matrix> llt(sigma);
  chol_ = llt.matrixL();
}

double GaussTanhCase::marginal1(double x)
{
  if (!(std::abs(x) < 1.0))
    throw DomainError("Gaussian-tanh density is unbounded at |x| >= 1");
  const double s = std::atanh(x);
  return std::exp(-0.5 * s * s) / (std::sqrt(2.0 * std::numbers::pi) * (1.0 - x * x));
}

double GaussTanhCase::marginal2(double xi, double xj) const
{
  if (!(std::abs(xi) < 1.0 && std::abs(xj) < 1.0))
    throw DomainError("Gaussian-tanh density is unbounded at |x| >= 1");
  const double si = std::atanh(xi), sj = std::atanh(xj);
  const double r2 = 1.0 - rho_ * rho_;
  const double q = (si * si - 2.0 * rho_ * si * sj + sj * sj) / (2.0 * r2);
  return std::exp(-q) /
         (2.0 * std::numbers::pi * std::sqrt(r2) * (1.0 - xi * xi) * (1.0 - xj * xj));
}

Matrix GaussTanhCase::sample(std::size_t n, std::uint64_t seed) const
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix X(static_cast<Eigen::Index>(n), 3);
  Eigen::Vector3d z;
  for (std::size_t i = 0; i < n; ++i) {
    z << normal(rng), normal(rng), normal(rng);
    const Eigen::Vector3d corr = chol_ * z;
    for (int j = 0; j < 3; ++j)
      X(static_cast<Eigen::Index>(i), j) = std::tanh(corr(j));
  }
  return X;
}

double GaussTanhCase::component(const Subset& s, std::span<const double> x) const
{
  if (s == Subset{ 0 })
    return analytic_numerator(s, x) / marginal1(x[0]);
  if (s == Subset{ 1 })
    return analytic_numerator(s, x) / marginal1(x[1]);
  if (s == Subset{ 0, 1 })
    return analytic_numerator(s, x) / marginal2(x[0], x[1]);
  return 0.0;
}

double GaussTanhCase::target(std::span<const double> x) const
{
  return component({ 0 }, x) + component({ 1 }, x) + component({ 0, 1 }, x);
}

Vector GaussTanhCase::target(const Matrix& X) const
{
  Vector y(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double x[3] = { X(i, 0), X(i, 1), X(i, 2) };
    y(i) = target(x);
  }
  return y;
}

double GaussTanhMarginals::density(const Subset& subset, std::span<const double> x) const
{
  switch (subset.size()) {
    case 1:
      return GaussTanhCase::marginal1(x[0]);
    case 2:
      return case_.marginal2(x[0], x[1]);
    default:
      throw IndexError("Gaussian-tanh marginals are provided for |S| <= 2");
  }
}

} // namespace hfd
