#include "hfd/density.hpp"

#include "hfd/error.hpp"
#include "hfd/legendre.hpp"
#include "hfd/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hfd {

namespace {

// Row chunk for the ordered reduction; fixed so results do not depend on
// the worker count.
constexpr Eigen::Index rows_per_chunk = 2048;

std::size_t tensor_size(int degree, std::size_t order)
{
  std::size_t size = 1;
  for (std::size_t k = 0; k < order; ++k)
    size *= static_cast<std::size_t>(degree) + 1;
  return size;
}

// out <- out (x) ladder, row-major with the new axis fastest.
void tensor_extend(std::vector<double>& out,
                   std::vector<double>& scratch,
                   std::span<const double> ladder)
{
  scratch.resize(out.size() * ladder.size());
  std::size_t k = 0;
  for (double a : out)
    for (double b : ladder)
      scratch[k++] = a * b;
  out.swap(scratch);
}

} // namespace

double UniformMarginals::density(const Subset& subset,
                                 std::span<const double>) const
{
  return std::pow(2.0, -static_cast<double>(subset.size()));
}

DensityModel::DensityModel(int degree, double clip_floor)
  : degree_(degree)
  , clip_floor_(clip_floor)
{
  if (degree < 0)
    throw ConfigError("density degree must be non-negative");
  if (!(clip_floor > 0.0))
    throw ConfigError("density clip floor must be positive");
}

const std::vector<double>& DensityModel::coefficients(const Subset& subset) const
{
  auto it = coefficients_.find(subset);
  if (it == coefficients_.end())
    throw IndexError("no density fitted for subset " + subset_to_string(subset));
  return it->second;
}

void DensityModel::set_coefficients(Subset subset, std::vector<double> coefficients)
{
  if (subset.empty())
    throw IndexError("densities are only stored for non-empty subsets");
  if (coefficients.size() != tensor_size(degree_, subset.size()))
    throw DimensionError("coefficient tensor of subset " +
                         subset_to_string(subset) + " has wrong size");
  coefficients_[std::move(subset)] = std::move(coefficients);
}

double DensityModel::raw_density(const Subset& subset,
                                 std::span<const double> x_subset) const
{
  const auto& coeffs = coefficients(subset);
  if (x_subset.size() != subset.size())
    throw DimensionError("point dimension does not match subset " +
                         subset_to_string(subset));
  std::vector<double> basis{ 1.0 }, scratch;
  std::vector<double> ladder(degree_ + 1);
  for (double xj : x_subset) {
    legendre_normalized_all(degree_, xj, ladder);
    tensor_extend(basis, scratch, ladder);
  }
  double value = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k)
    value += coeffs[k] * basis[k];
  return value;
}

double DensityModel::density(const Subset& subset,
                             std::span<const double> x_subset) const
{
  return std::max(clip_floor_, raw_density(subset, x_subset));
}

double eval_density(const DensityModel& model,
                    const Subset& subset,
                    std::span<const double> x_subset)
{
  return model.density(subset, x_subset);
}

DensityModel fit_density(const Matrix& X_scaled,
                         const std::vector<Subset>& subsets,
                         int degree,
                         double clip_floor)
{
  DensityModel model(degree, clip_floor);
  const Eigen::Index n = X_scaled.rows();
  const int p = static_cast<int>(X_scaled.cols());
  if (n < 1)
    throw InputError("density estimation needs at least one row");

  std::set<Subset> unique;
  for (const auto& s : subsets) {
    if (s.empty())
      throw IndexError("density subsets must be non-empty");
    unique.insert(canonical_subset(s, p));
  }

  // ladders(i, j * (degree + 1) + m) = Ptilde_m(X_ij)
  const int width = degree + 1;
  Matrix ladders(n, p * width);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t b, std::size_t e) {
    std::vector<double> ladder(width);
    for (std::size_t i = b; i < e; ++i)
      for (int j = 0; j < p; ++j) {
        legendre_normalized_all(degree, X_scaled(i, j), ladder);
        for (int m = 0; m < width; ++m)
          ladders(i, j * width + m) = ladder[m];
      }
  });

  const Eigen::Index chunks = (n + rows_per_chunk - 1) / rows_per_chunk;
  for (const auto& subset : unique) {
    const std::size_t size = tensor_size(degree, subset.size());
    std::vector<std::vector<double>> partial(chunks, std::vector<double>(size, 0.0));
    parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t cb, std::size_t ce) {
      std::vector<double> basis, scratch, ladder(width);
      for (std::size_t c = cb; c < ce; ++c) {
        const Eigen::Index begin = c * rows_per_chunk;
        const Eigen::Index end = std::min(n, begin + rows_per_chunk);
        auto& acc = partial[c];
        for (Eigen::Index i = begin; i < end; ++i) {
          basis.assign(1, 1.0);
          for (int j : subset) {
            for (int m = 0; m < width; ++m)
              ladder[m] = ladders(i, j * width + m);
            tensor_extend(basis, scratch, ladder);
          }
          for (std::size_t k = 0; k < size; ++k)
            acc[k] += basis[k];
        }
      }
    });
    std::vector<double> coeffs(size, 0.0);
    for (const auto& acc : partial)
      for (std::size_t k = 0; k < size; ++k)
        coeffs[k] += acc[k];
    for (auto& c : coeffs)
      c /= static_cast<double>(n);
    coeffs[0] = std::pow(2.0, -0.5 * static_cast<double>(subset.size()));
    model.set_coefficients(subset, std::move(coeffs));
  }
  return model;
}

} // namespace hfd
