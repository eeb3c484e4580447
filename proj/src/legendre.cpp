#include "hfd/legendre.hpp"

#include "hfd/error.hpp"

#include <cmath>

namespace hfd {

namespace {

void recurrence(int degree, double x, std::span<double> out)
{
  out[0] = 1.0;
  if (degree >= 1)
    out[1] = x;
  for (int m = 1; m < degree; ++m)
    out[m + 1] = ((2.0 * m + 1.0) * x * out[m] - m * out[m - 1]) / (m + 1.0);
}

} // namespace

std::vector<double> legendre_all(int degree, double x)
{
  if (degree < 0)
    throw DomainError("Legendre degree must be non-negative");
  std::vector<double> out(degree + 1);
  recurrence(degree, x, out);
  return out;
}

void legendre_normalized_all(int degree, double x, std::span<double> out)
{
  if (degree < 0 || out.size() != static_cast<std::size_t>(degree) + 1)
    throw DimensionError("output span must hold degree + 1 values");
  recurrence(degree, x, out);
  for (int m = 0; m <= degree; ++m)
    out[m] *= std::sqrt((2.0 * m + 1.0) / 2.0);
}

std::vector<double> legendre_normalized_all(int degree, double x)
{
  if (degree < 0)
    throw DomainError("Legendre degree must be non-negative");
  std::vector<double> out(degree + 1);
  legendre_normalized_all(degree, x, out);
  return out;
}

void validate_index(const TensorIndex& index, int p)
{
  if (index.subset.size() != index.degrees.size())
    throw IndexError("subset and degree lists differ in length");
  if (index.subset.size() > static_cast<std::size_t>(p))
    throw IndexError("subset larger than the ambient dimension");
  for (std::size_t k = 0; k < index.subset.size(); ++k) {
    const int j = index.subset[k];
    if (j < 0 || j >= p)
      throw IndexError("feature index " + std::to_string(j) + " out of range");
    if (k > 0 && j <= index.subset[k - 1])
      throw IndexError("subset must be strictly increasing");
    if (index.degrees[k] < 1)
      throw IndexError("basis numerator degrees must be positive, got " +
                       std::to_string(index.degrees[k]) + " for feature " +
                       std::to_string(j));
  }
}

double psi_eval(const TensorIndex& index, std::span<const double> x)
{
  const int p = static_cast<int>(x.size());
  validate_index(index, p);
  const int free_dims = p - static_cast<int>(index.order());
  double value = std::pow(2.0, -0.5 * free_dims);
  for (std::size_t k = 0; k < index.order(); ++k) {
    const int m = index.degrees[k];
    value *= legendre_normalized_all(m, x[index.subset[k]])[m];
  }
  return value;
}

} // namespace hfd
