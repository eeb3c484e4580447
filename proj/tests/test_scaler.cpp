#include "hfd/error.hpp"
#include "hfd/scaler.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace hfd;

TEST_CASE("fit_scaler uses population moments")
{
  Matrix X(2, 1);
  X << 0, 2;
  const auto s = fit_scaler(X);
  CHECK(s.means(0) == doctest::Approx(1.0));
  CHECK(s.stds(0) == doctest::Approx(1.0));
}

TEST_CASE("constant column falls back to unit std")
{
  Matrix X(3, 2);
  X << 5, 1, 5, 2, 5, 3;
  const auto s = fit_scaler(X);
  CHECK(s.means(0) == doctest::Approx(5.0));
  CHECK(s.stds(0) == 1.0);
  const Matrix T = transform(s, X);
  CHECK(T.col(0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("already standardized data keeps its moments")
{
  Matrix X = oracle::random_matrix(1000, 1, 3);
  X.col(0).array() -= X.col(0).mean();
  X.col(0) /= std::sqrt(X.col(0).squaredNorm() / 1000.0);
  const auto s = fit_scaler(X);
  CHECK(std::abs(s.means(0)) < 1e-12);
  CHECK(s.stds(0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fit_scaler input errors")
{
  CHECK_THROWS_AS(fit_scaler(Matrix(0, 2)), InputError);
  Matrix X(2, 2);
  X << 1, 2, std::nan(""), 4;
  try {
    fit_scaler(X);
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
    CHECK(std::string(e.what()).find("column 0") != std::string::npos);
  }
}

TEST_CASE("transform values and range")
{
  Matrix X(4, 1);
  X << 0, 2, 1, 1e6;
  auto s = fit_scaler(X.topRows(2));
  const Matrix T = transform(s, X);
  CHECK(T(2, 0) == 0.0);
  CHECK(T(1, 0) == doctest::Approx(0.76159415595576489).epsilon(1e-15));
  CHECK(T(3, 0) <= 1.0);
  CHECK_THROWS_AS(transform(s, Matrix(2, 3)), DimensionError);
}

TEST_CASE("transform preserves ordering and round-trips")
{
  Matrix X = oracle::random_matrix(500, 3, 11) * 4.0;
  const auto s = fit_scaler(X);
  const Matrix T = transform(s, X);
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    std::vector<int> a(X.rows()), b(X.rows());
    std::iota(a.begin(), a.end(), 0);
    std::iota(b.begin(), b.end(), 0);
    std::sort(a.begin(), a.end(), [&](int u, int v) { return X(u, j) < X(v, j); });
    std::sort(b.begin(), b.end(), [&](int u, int v) { return T(u, j) < T(v, j); });
    CHECK(a == b);
  }
  CHECK(T.cwiseAbs().maxCoeff() < 1.0);
  const Matrix back = inverse_transform(s, T);
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      if (std::abs(T(i, j)) < 1.0 - 1e-8)
        CHECK(std::abs(back(i, j) - X(i, j)) <= 1e-10 * std::max(1.0, std::abs(X(i, j))));
}
