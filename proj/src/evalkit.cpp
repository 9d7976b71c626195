#include "abacus/evalkit.hpp"

#include <cmath>
#include <stdexcept>

namespace abacus::eval {

std::size_t
count_matches(const std::vector<Index>& truth,
              const std::vector<Index>& est,
              Index w)
{
  std::size_t i = 0, j = 0, matches = 0;
  while (i < truth.size() && j < est.size()) {
    if (std::abs(truth[i] - est[j]) <= w) {
      ++matches;
      ++i;
      ++j;
    } else if (est[j] < truth[i]) {
      ++j;
    } else {
      ++i;
    }
  }
  return matches;
}

PrecisionRecall
precision_recall(const std::vector<Index>& truth,
                 const std::vector<Index>& est,
                 Index w)
{
  PrecisionRecall out;
  out.matches = count_matches(truth, est, w);
  const auto m = static_cast<double>(out.matches);
  if (!est.empty())
    out.precision = m / static_cast<double>(est.size());
  if (!truth.empty())
    out.recall = m / static_cast<double>(truth.size());
  return out;
}

namespace {

MatrixXd
standardize_rows(const MatrixXd& M)
{
  MatrixXd out = M.colwise() - M.rowwise().mean();
  for (Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    // Roundoff in the mean leaves constant rows slightly off zero.
    if (norm <= 1e-12 * M.row(i).norm())
      out.row(i).setZero();
    else
      out.row(i) /= norm;
  }
  return out;
}

} // namespace

double
epsilon_M(const MatrixXd& M, const MatrixXd& M_hat)
{
  if (M.rows() != M_hat.rows())
    throw std::invalid_argument("epsilon_M: row counts differ");
  const MatrixXd A = standardize_rows(M);
  const MatrixXd B = standardize_rows(M_hat);
  const double P = static_cast<double>(M.rows());
  return ((A * A.transpose()).trace() - (B * B.transpose()).trace()) / (P * P);
}

double
epsilon_M_frobenius(const MatrixXd& M, const MatrixXd& M_hat)
{
  if (M.rows() != M_hat.rows())
    throw std::invalid_argument("epsilon_M: row counts differ");
  const MatrixXd A = standardize_rows(M);
  const MatrixXd B = standardize_rows(M_hat);
  const double P = static_cast<double>(M.rows());
  return (A * A.transpose() - B * B.transpose()).squaredNorm() / (P * P);
}

double
pearson(const VectorXd& a, const VectorXd& b)
{
  const VectorXd x = a.array() - a.mean();
  const VectorXd y = b.array() - b.mean();
  if (x.norm() <= 1e-12 * a.norm() || y.norm() <= 1e-12 * b.norm())
    return 0.0;
  return x.dot(y) / (x.norm() * y.norm());
}

double
epsilon_S(const MatrixXd& S, const MatrixXd& S_hat)
{
  const Index r = S.rows(), K = S_hat.rows();
  if (K < r)
    throw std::invalid_argument("epsilon_S: estimate has fewer rows than truth");
  if (S.cols() != S_hat.cols())
    throw std::invalid_argument("epsilon_S: lengths differ");

  MatrixXd rho(r, K);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < K; ++j)
      rho(i, j) = std::abs(pearson(S.row(i).transpose(), S_hat.row(j).transpose()));

  std::vector<bool> row_used(static_cast<std::size_t>(r), false);
  std::vector<bool> col_used(static_cast<std::size_t>(K), false);
  double total = 0.0;
  for (Index step = 0; step < r; ++step) {
    Index bi = -1, bj = -1;
    for (Index i = 0; i < r; ++i) {
      if (row_used[static_cast<std::size_t>(i)])
        continue;
      for (Index j = 0; j < K; ++j) {
        if (col_used[static_cast<std::size_t>(j)])
          continue;
        if (bi < 0 || rho(i, j) > rho(bi, bj)) {
          bi = i;
          bj = j;
        }
      }
    }
    row_used[static_cast<std::size_t>(bi)] = true;
    col_used[static_cast<std::size_t>(bj)] = true;
    total += 1.0 - rho(bi, bj);
  }
  return total / static_cast<double>(r);
}

double
epsilon_E(const VectorXd& psi, const VectorXd& psi_hat)
{
  if (psi.size() != psi_hat.size())
    throw std::invalid_argument("epsilon_E: lengths differ");
  return (psi - psi_hat).squaredNorm() / static_cast<double>(psi.size());
}

double
jaccard(const std::vector<Index>& a, const std::vector<Index>& b, Index w)
{
  if (a.empty() && b.empty())
    return 1.0;
  const auto m = static_cast<double>(count_matches(a, b, w));
  return m / (static_cast<double>(a.size() + b.size()) - m);
}

} // namespace abacus::eval
