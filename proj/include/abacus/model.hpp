#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace abacus {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

//! Which component of the source signals a quantity belongs to.
//! `additive_outlier` is d = 0 (S0 = V0), `level_shift` is d = 1 (diff(S1) = V1).
enum class ChangeType : int
{
  additive_outlier = 0,
  level_shift = 1
};

//! Partial models drop the additive-outlier component entirely.
enum class ModelMode
{
  partial,
  full
};

class ShapeError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

//! P x N data matrix, channels in rows. Entries must be finite and N >= 3.
class ObservationMatrix
{
public:
  explicit ObservationMatrix(MatrixXd values);

  const MatrixXd& values() const { return values_; }
  Index channels() const { return values_.rows(); }
  Index length() const { return values_.cols(); }

private:
  MatrixXd values_;
};

// ---------------------------------------------------------------------------
// Difference operator. Never materialized in production code; the dense form
// lives in the test oracles only.

//! Row-wise running sum: the inverse of first differencing.
template<typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
cumsum_rows(const Eigen::MatrixBase<Derived>& x)
{
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
    x;
  for (Index n = 1; n < out.cols(); ++n)
    out.col(n) += out.col(n - 1);
  return out;
}

//! Row-wise first differences with the first column kept as is, so that
//! `diff_rows(cumsum_rows(x)) == x`.
template<typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
diff_rows(const Eigen::MatrixBase<Derived>& x)
{
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
    x;
  for (Index n = out.cols() - 1; n > 0; --n)
    out.col(n) -= x.col(n - 1);
  return out;
}

//! Squared norm of column n (0-based) of the inverse difference operator of
//! type d over a length-N sequence: N - n for level shifts, 1 for outliers.
inline double
inverse_column_norm2(ChangeType d, Index n, Index length)
{
  return d == ChangeType::level_shift ? static_cast<double>(length - n) : 1.0;
}

// ---------------------------------------------------------------------------

//! One horseshoe hierarchy: global, row, column and element scales, each with
//! its inverse-gamma auxiliary.
struct ShrinkageSet
{
  double tau = 1.0;
  double xi = 1.0;
  VectorXd lambda; // K
  VectorXd eta;    // K
  VectorXd phi;    // N
  VectorXd omega;  // N
  MatrixXd gamma;  // K x N
  MatrixXd zeta;   // K x N

  static ShrinkageSet ones(Index rank, Index length);

  Index rank() const { return lambda.size(); }
  Index length() const { return phi.size(); }

  //! Strictly positive and finite everywhere, with consistent shapes.
  bool valid() const;

  //! Prior variance of V(h, n) under this hierarchy.
  double element_variance(Index h, Index n) const
  {
    return phi(n) * lambda(h) * gamma(h, n) * tau;
  }
};

//! One complete assignment of every model parameter: the unit a Gibbs sweep
//! mutates. In partial mode V0 is identically zero and shrink0 is inert.
struct ModelState
{
  MatrixXd M;   // P x K
  MatrixXd V0;  // K x N
  MatrixXd V1;  // K x N
  VectorXd psi; // P
  ShrinkageSet shrink0;
  ShrinkageSet shrink1;
  ModelMode mode = ModelMode::full;

  Index channels() const { return M.rows(); }
  Index rank() const { return M.cols(); }
  Index length() const { return V1.cols(); }

  const MatrixXd& V(ChangeType d) const
  {
    return d == ChangeType::additive_outlier ? V0 : V1;
  }
  MatrixXd& V(ChangeType d)
  {
    return d == ChangeType::additive_outlier ? V0 : V1;
  }
  const ShrinkageSet& shrinkage(ChangeType d) const
  {
    return d == ChangeType::additive_outlier ? shrink0 : shrink1;
  }
  ShrinkageSet& shrinkage(ChangeType d)
  {
    return d == ChangeType::additive_outlier ? shrink0 : shrink1;
  }

  bool uses(ChangeType d) const
  {
    return d == ChangeType::level_shift || mode == ModelMode::full;
  }

  //! Prior variance multiplier of column h of M (times psi_i):
  //! lambda1_h tau1, times lambda0_h tau0 in full mode.
  double mixing_prior_scale(Index h) const;

  //! Throws ShapeError when shapes disagree or positivity fails.
  void validate() const;
};

//! S = V0 + cumsum(V1) in full mode, cumsum(V1) in partial mode.
MatrixXd
compose_sources(const ModelState& state);

//! Draws a state for (P, K, N) from the prior. With `warm`, its components
//! are copied instead (shapes must match); shrinkage sets of a warm state
//! that are empty are filled from the prior.
ModelState
init_state(const ObservationMatrix& Y,
           Index rank,
           ModelMode mode,
           std::uint64_t seed,
           const std::optional<ModelState>& warm = std::nullopt);

//! One retained posterior sample.
struct Draw
{
  MatrixXd M;
  MatrixXd V0;
  MatrixXd V1;
  VectorXd psi;
  std::int64_t iteration = 0;
  int chain = 0;
};

//! Append-only store of post-burn-in samples.
class PosteriorDraws
{
public:
  void append(Draw draw) { draws_.push_back(std::move(draw)); }
  std::size_t size() const { return draws_.size(); }
  bool empty() const { return draws_.empty(); }
  const Draw& operator[](std::size_t i) const { return draws_[i]; }
  auto begin() const { return draws_.begin(); }
  auto end() const { return draws_.end(); }
  void reserve(std::size_t n) { draws_.reserve(n); }

private:
  std::vector<Draw> draws_;
};

//! Detected changes (1-based indices) and recovered model components.
struct ChangeReport
{
  std::vector<Index> cpt0; // additive outliers
  std::vector<Index> cpt1; // level shifts
  MatrixXd S_hat;
  MatrixXd M_hat;
  VectorXd psi_hat;
  VectorXd g0_hat;
  VectorXd g1_hat;
  double cutoff0 = 0.0;
  double cutoff1 = 0.0;

  // Partial-stage detections, kept for diagnostics.
  std::vector<Index> partial_cpt0;
  std::vector<Index> partial_cpt1;
};

} // namespace abacus
