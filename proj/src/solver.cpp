#include "hfd/solver.hpp"

#include "hfd/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hfd {

namespace {

constexpr double collinear_tol = 1e-10;
constexpr double constant_column_tol = 1e-10;

void check_finite(const Matrix& B, const Vector& y)
{
  if (!B.allFinite())
    throw InputError("design matrix contains non-finite values");
  if (!y.allFinite())
    throw InputError("response contains non-finite values");
}

// Standardizes centered normal equations and drops (numerically) constant
// columns. `raw_norms2` are the uncentered squared norms.
GramSystem standardize(std::size_t n,
                       bool intercept,
                       std::size_t offset,
                       const Matrix& centered_gram,
                       const Vector& centered_xty,
                       const Vector& raw_norms2,
                       const Vector& means,
                       double yty,
                       double y_mean)
{
  GramSystem sys;
  sys.n = n;
  sys.has_intercept = intercept;
  sys.yty = std::max(0.0, yty);
  sys.y_mean = y_mean;

  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < centered_gram.rows(); ++j) {
    const double c2 = centered_gram(j, j);
    if (!(raw_norms2(j) > 0.0) || !(c2 > constant_column_tol * constant_column_tol * raw_norms2(j)))
      sys.skipped_columns.push_back(static_cast<std::size_t>(j) + offset);
    else
      keep.push_back(j);
  }
  const auto m = static_cast<Eigen::Index>(keep.size());
  sys.gram.resize(m, m);
  sys.xty.resize(m);
  sys.scale.resize(m);
  sys.means.resize(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    sys.columns.push_back(static_cast<std::size_t>(keep[a]) + offset);
    sys.scale(a) = std::sqrt(centered_gram(keep[a], keep[a]));
    sys.means(a) = means(keep[a]);
  }
  for (Eigen::Index a = 0; a < m; ++a) {
    sys.xty(a) = centered_xty(keep[a]) / sys.scale(a);
    for (Eigen::Index b = 0; b <= a; ++b) {
      const double g = centered_gram(keep[a], keep[b]) / (sys.scale(a) * sys.scale(b));
      sys.gram(a, b) = g;
      sys.gram(b, a) = g;
    }
    sys.gram(a, a) = 1.0;
  }
  return sys;
}

// Lower Cholesky factor of the active Gram block, grown one column at a time.
class ActiveCholesky
{
public:
  explicit ActiveCholesky(Eigen::Index capacity)
    : L_(Matrix::Zero(capacity, capacity))
  {}

  Eigen::Index size() const { return size_; }

  // Returns false (and leaves the factor untouched) for collinear columns.
  bool add(const Matrix& G, const std::vector<Eigen::Index>& active, Eigen::Index j)
  {
    const Eigen::Index k = size_;
    Vector v(k);
    for (Eigen::Index a = 0; a < k; ++a)
      v(a) = G(active[a], j);
    if (k > 0)
      L_.topLeftCorner(k, k).triangularView<Eigen::Lower>().solveInPlace(v);
    const double d2 = G(j, j) - v.squaredNorm();
    if (!(d2 > collinear_tol))
      return false;
    L_.row(k).head(k) = v.transpose();
    L_(k, k) = std::sqrt(d2);
    ++size_;
    return true;
  }

  void rebuild(const Matrix& G, const std::vector<Eigen::Index>& active)
  {
    size_ = 0;
    std::vector<Eigen::Index> prefix;
    for (Eigen::Index j : active) {
      // Columns already accepted stay well conditioned after a removal.
      add(G, prefix, j);
      prefix.push_back(j);
    }
  }

  Vector solve(const Vector& rhs) const
  {
    const auto L = L_.topLeftCorner(size_, size_).triangularView<Eigen::Lower>();
    Vector z = L.solve(rhs);
    return L.transpose().solve(z);
  }

private:
  Matrix L_;
  Eigen::Index size_ = 0;
};

} // namespace

GramAccumulator::GramAccumulator(const Vector& y,
                                 std::size_t design_columns,
                                 bool intercept_column)
  : y_(&y)
  , intercept_(intercept_column)
  , design_columns_(design_columns)
  , offset_(intercept_column ? 1 : 0)
  , y_mean_(intercept_column && y.size() > 0 ? y.mean() : 0.0)
{
  if (!y.allFinite())
    throw InputError("response contains non-finite values");
  if (intercept_column && design_columns == 0)
    throw DimensionError("design matrix needs an intercept column");
  const Eigen::Index m = static_cast<Eigen::Index>(design_columns) - offset_;
  cross_ = Matrix::Zero(m, m);
  sums_ = Vector::Zero(m);
  xty_ = Vector::Zero(m);
}

void GramAccumulator::add_rows(Eigen::Index row_begin, const Matrix& block)
{
  if (block.cols() != static_cast<Eigen::Index>(design_columns_))
    throw DimensionError("design block has wrong width");
  if (row_begin + block.rows() > y_->size())
    throw DimensionError("design block extends past the response");
  if (!block.allFinite())
    throw InputError("design matrix contains non-finite values");
  const Eigen::Index m = cross_.rows();
  const auto X = block.rightCols(m);
  const Vector yc = y_->segment(row_begin, block.rows()).array() - y_mean_;
  cross_.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose());
  sums_ += X.colwise().sum().transpose();
  xty_.noalias() += X.transpose() * yc;
  rows_ += static_cast<std::size_t>(block.rows());
}

GramSystem GramAccumulator::finish() const
{
  if (rows_ != static_cast<std::size_t>(y_->size()))
    throw DimensionError("not all design rows were accumulated");
  const double n = static_cast<double>(rows_);
  const Eigen::Index m = cross_.rows();
  Matrix gram = cross_.selfadjointView<Eigen::Lower>();
  Vector raw2 = gram.diagonal();
  Vector means = Vector::Zero(m);
  const Vector yc = y_->array() - y_mean_;
  double yty = yc.squaredNorm();
  Vector xty = xty_;
  if (intercept_) {
    means = sums_ / n;
    gram.noalias() -= n * means * means.transpose();
    const double yc_mean = yc.mean();
    xty -= n * yc_mean * means;
    yty -= n * yc_mean * yc_mean;
  }
  return standardize(rows_, intercept_, static_cast<std::size_t>(offset_), gram,
                     xty, raw2, means, yty, y_mean_);
}

GramSystem make_gram_system(const Matrix& B, const Vector& y, bool intercept_column)
{
  if (B.rows() != y.size())
    throw DimensionError("design rows and response length differ");
  check_finite(B, y);
  const Eigen::Index offset = intercept_column ? 1 : 0;
  if (B.cols() < offset)
    throw DimensionError("design matrix needs an intercept column");
  const Eigen::Index m = B.cols() - offset;
  const auto X = B.rightCols(m);
  const double n = static_cast<double>(B.rows());
  Vector means = Vector::Zero(m);
  double y_mean = 0.0;
  if (intercept_column) {
    means = X.colwise().mean().transpose();
    y_mean = y.mean();
  }
  const Matrix Xc = X.rowwise() - means.transpose();
  const Vector yc = y.array() - y_mean;
  Matrix gram = Matrix::Zero(m, m);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(Xc.transpose());
  gram = Matrix(gram.selfadjointView<Eigen::Lower>());
  const Vector raw2 = X.colwise().squaredNorm().transpose();
  (void)n;
  return standardize(static_cast<std::size_t>(B.rows()), intercept_column,
                     static_cast<std::size_t>(offset), gram, Xc.transpose() * yc,
                     raw2, means, yc.squaredNorm(), y_mean);
}

LarsPath lars_path(const Matrix& B, const Vector& y, const LarsOptions& options)
{
  if (B.rows() < 2)
    throw InputError("LARS needs at least two rows");
  if (B.cols() < 1)
    throw DimensionError("design matrix has no columns");
  return lars_path(make_gram_system(B, y, options.intercept_column), options);
}

LarsPath lars_path(const GramSystem& sys, const LarsOptions& options)
{
  LarsPath path;
  path.n = sys.n;
  path.has_intercept = sys.has_intercept;
  path.skipped_columns = sys.skipped_columns;

  const Eigen::Index m = sys.gram.rows();
  const Matrix& G = sys.gram;
  const std::size_t eff_rows = sys.has_intercept ? (sys.n > 0 ? sys.n - 1 : 0) : sys.n;
  const Eigen::Index capacity =
    std::min<Eigen::Index>(m, static_cast<Eigen::Index>(eff_rows));

  Vector beta = Vector::Zero(m);
  Vector c = sys.xty;
  std::vector<Eigen::Index> active;
  Vector signs(0);
  std::vector<char> in_active(m, 0), excluded(m, 0);
  ActiveCholesky chol(std::max<Eigen::Index>(capacity, 1));

  auto record = [&](double penalty) {
    LarsStep step;
    step.penalty = penalty;
    std::vector<Eigen::Index> order = active;
    std::sort(order.begin(), order.end());
    double shift = 0.0, fit_xty = 0.0;
    for (Eigen::Index k : order) {
      const double coef = beta(k) / sys.scale(k);
      step.support.push_back(sys.columns[k]);
      step.coefficients.push_back(coef);
      shift += sys.means(k) * coef;
      fit_xty += beta(k) * (sys.xty(k) + c(k));
    }
    step.intercept = sys.has_intercept ? sys.y_mean - shift : 0.0;
    step.rss = std::max(0.0, sys.yty - fit_xty);
    path.steps.push_back(std::move(step));
  };

  auto argmax_inactive = [&]() -> Eigen::Index {
    Eigen::Index best = -1;
    double best_val = -1.0;
    for (Eigen::Index j = 0; j < m; ++j)
      if (!in_active[j] && !excluded[j] && std::abs(c(j)) > best_val) {
        best_val = std::abs(c(j));
        best = j;
      }
    return best;
  };

  Eigen::Index enter = argmax_inactive();
  double C = enter >= 0 ? std::abs(c(enter)) : 0.0;
  record(C);
  const double stop_tol = 1e-11 * std::sqrt(sys.yty);
  if (m == 0 || enter < 0 || !(sys.yty > 0.0) || C <= stop_tol)
    return path;

  bool dropped_last = false;
  Eigen::Index last_dropped = -1;
  std::size_t steps = 0;
  while (steps < options.max_steps) {
    if (!dropped_last) {
      if (static_cast<Eigen::Index>(active.size()) >= capacity || enter < 0)
        break;
      if (!chol.add(G, active, enter)) {
        excluded[enter] = 1;
        path.collinear_columns.push_back(sys.columns[enter]);
        enter = argmax_inactive();
        continue;
      }
      active.push_back(enter);
      in_active[enter] = 1;
      signs.conservativeResize(static_cast<Eigen::Index>(active.size()));
      signs(signs.size() - 1) = c(enter) >= 0.0 ? 1.0 : -1.0;
    }
    dropped_last = false;

    // Equiangular direction.
    Vector w = chol.solve(signs);
    const double AA = 1.0 / std::sqrt(signs.dot(w));
    w *= AA;
    Vector a = Vector::Zero(m);
    for (std::size_t k = 0; k < active.size(); ++k)
      a.noalias() += w(static_cast<Eigen::Index>(k)) * G.col(active[k]);

    double gamma = C / AA;
    Eigen::Index next = -1;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (in_active[j] || excluded[j] || j == last_dropped)
        continue;
      for (double g : { (C - c(j)) / (AA - a(j)), (C + c(j)) / (AA + a(j)) })
        if (g > 0.0 && std::isfinite(g) && g < gamma) {
          gamma = g;
          next = j;
        }
    }
    last_dropped = -1;

    Eigen::Index drop_pos = -1;
    for (std::size_t k = 0; k < active.size(); ++k) {
      const double wk = w(static_cast<Eigen::Index>(k));
      if (wk == 0.0)
        continue;
      const double z = -beta(active[k]) / wk;
      if (z > 0.0 && z < gamma) {
        gamma = z;
        drop_pos = static_cast<Eigen::Index>(k);
      }
    }

    for (std::size_t k = 0; k < active.size(); ++k)
      beta(active[k]) += gamma * w(static_cast<Eigen::Index>(k));
    c.noalias() -= gamma * a;
    C -= gamma * AA;
    ++steps;

    if (drop_pos >= 0) {
      const Eigen::Index j = active[drop_pos];
      beta(j) = 0.0;
      in_active[j] = 0;
      active.erase(active.begin() + drop_pos);
      Vector s(static_cast<Eigen::Index>(active.size()));
      for (Eigen::Index k = 0, t = 0; k < signs.size(); ++k)
        if (k != drop_pos)
          s(t++) = signs(k);
      signs = s;
      chol.rebuild(G, active);
      dropped_last = true;
      last_dropped = j;
    } else if (next >= 0) {
      enter = next;
    } else {
      C = 0.0; // least-squares fit on the active set reached
      enter = argmax_inactive();
    }
    record(std::max(C, 0.0));
    if (C <= stop_tol)
      break;
  }
  return path;
}

BicSelection bic_select(const LarsPath& path, std::size_t n)
{
  if (path.steps.empty())
    throw InputError("empty LARS path");
  if (n < 1)
    throw InputError("BIC needs n >= 1");
  BicSelection sel;
  const double dn = static_cast<double>(n);
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  for (std::size_t s = 0; s < path.steps.size(); ++s) {
    const auto& step = path.steps[s];
    const std::size_t k = step.support.size() + (path.has_intercept ? 1 : 0);
    const double ratio = std::max(step.rss / dn, 1e-300);
    const double bic = dn * std::log(ratio) + static_cast<double>(k) * std::log(dn);
    sel.bic_values.push_back(bic);
    if (bic < best || (bic == best && k < best_k)) {
      best = bic;
      best_k = k;
      sel.step = s;
    }
  }
  sel.support = path.steps[sel.step].support;
  return sel;
}

LeastSquaresSolution solve_reduced(const Matrix& B, const Vector& y)
{
  if (B.cols() < 1)
    throw DimensionError("reduced system needs at least one column");
  if (B.rows() != y.size())
    throw DimensionError("reduced system rows and response length differ");
  check_finite(B, y);

  Eigen::BDCSVD<Matrix> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  LeastSquaresSolution out;
  out.coefficients = Vector::Zero(B.cols());
  if (sigma.size() == 0 || !(sigma(0) > 0.0))
    return out;
  const double rcond = std::numeric_limits<double>::epsilon() *
                       static_cast<double>(std::max(B.rows(), B.cols()));
  const double cutoff = rcond * sigma(0);
  const Vector uty = svd.matrixU().transpose() * y;
  Vector scaled = Vector::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > cutoff) {
      scaled(i) = uty(i) / sigma(i);
      ++out.rank;
    }
  out.coefficients = svd.matrixV() * scaled;
  return out;
}

} // namespace hfd
