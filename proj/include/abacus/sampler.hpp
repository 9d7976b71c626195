#pragma once

#include "abacus/model.hpp"
#include "abacus/random.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace abacus {

//! A covariance (or precision) matrix could not be factorized even after
//! diagonal jitter escalation.
class IllConditioned : public std::runtime_error
{
public:
  IllConditioned(const std::string& what, double min_eigenvalue)
    : std::runtime_error(what)
    , min_eigenvalue_(min_eigenvalue)
  {
  }

  double min_eigenvalue() const { return min_eigenvalue_; }
  //! Chain iteration at which the failure happened, -1 outside a chain.
  std::int64_t iteration() const { return iteration_; }
  void set_iteration(std::int64_t it) { iteration_ = it; }

private:
  double min_eigenvalue_;
  std::int64_t iteration_ = -1;
};

//! Gaussian full conditional in information form; covariance = precision^-1
//! (times psi_i for rows of M).
struct GaussianConditional
{
  VectorXd mean;
  MatrixXd precision;
};

struct InvGammaConditional
{
  double shape = 0.0;
  double scale = 0.0;
};

//! Cholesky factorization with diagonal jitter escalation: adds
//! 1e-10 * trace / dim to the diagonal, doubling at most three times.
//! Throws IllConditioned with the minimum eigenvalue when all attempts fail.
Eigen::LLT<MatrixXd>
robust_cholesky(const MatrixXd& A);

// ---------------------------------------------------------------------------
// Full-conditional parameters. `S` is compose_sources(state), passed in so a
// sweep can reuse it.

//! Rows of `mean` are F^-1 S Y_i; the covariance of row i is psi_i F^-1.
struct MixingConditional
{
  MatrixXd F;
  MatrixXd mean; // P x K
};

MixingConditional
mixing_conditional(const ModelState& state,
                   const ObservationMatrix& Y,
                   const MatrixXd& S);

InvGammaConditional
noise_conditional(const ModelState& state,
                  const ObservationMatrix& Y,
                  const MatrixXd& S,
                  Index i);

//! Conditional of column n of V(d) computed from scratch with suffix sums.
GaussianConditional
v_column_conditional(const ModelState& state,
                     const ObservationMatrix& Y,
                     ChangeType d,
                     Index n);

//! Data term of the tau(d) conditional: M entries over their prior scale with
//! tau(d) removed, plus V(d) entries over theirs.
double
global_data_term(const ModelState& state, ChangeType d);
//! Same for lambda(d)_h, restricted to column h of M and row h of V(d).
double
row_data_term(const ModelState& state, ChangeType d, Index h);
double
column_data_term(const ModelState& state, ChangeType d, Index n);
double
element_data_term(const ModelState& state, ChangeType d, Index h, Index n);

InvGammaConditional
global_scale_conditional(const ModelState& state, ChangeType d);
InvGammaConditional
row_scale_conditional(const ModelState& state, ChangeType d, Index h);
InvGammaConditional
column_scale_conditional(const ModelState& state, ChangeType d, Index n);
InvGammaConditional
element_scale_conditional(const ModelState& state,
                          ChangeType d,
                          Index h,
                          Index n);

//! Conditional of any auxiliary given its scale: IG(1, 1 + 1/scale).
inline InvGammaConditional
auxiliary_conditional(double scale)
{
  return { 1.0, 1.0 + 1.0 / scale };
}

// ---------------------------------------------------------------------------

//! Sequential update of all columns of V(d), left to right, keeping the
//! projected residual M' Psi^-1 (Y - M S) in K-space so that each column costs
//! O(K^2) plus one K x K factorization. Level-shift columns use the identity
//! that column n of the inverse difference operator is the indicator of
//! positions >= n.
class ColumnSweep
{
public:
  ColumnSweep(ModelState& state, const ObservationMatrix& Y, ChangeType d);

  bool done() const { return column_ >= state_.length(); }
  Index column() const { return column_; }

  //! Conditional of the current column given every column already accepted.
  GaussianConditional conditional() const;

  //! Stores `v` as the current column and advances.
  void accept(const VectorXd& v);

  //! Draws the current column from its conditional and advances.
  void draw(Rng& rng);

private:
  ModelState& state_;
  ChangeType type_;
  Index column_ = 0;
  MatrixXd gram_;       // M' Psi^-1 M
  MatrixXd projected_;  // M' Psi^-1 (Y - M S) at construction
  MatrixXd suffix_;     // suffix sums of projected_ (level shifts only)
  VectorXd cum_change_; // sum of accepted column changes
};

// ---------------------------------------------------------------------------
// Gibbs updates.

void
update_mixing(ModelState& state, const ObservationMatrix& Y, Rng& rng);
void
update_noise(ModelState& state, const ObservationMatrix& Y, Rng& rng);
void
update_v_column(ModelState& state,
                const ObservationMatrix& Y,
                ChangeType d,
                Index n,
                Rng& rng);
//! Redraws tau(d), then xi(d).
void
update_global_shrinkage(ModelState& state, ChangeType d, Rng& rng);
//! Redraws each lambda(d)_h, then each eta(d)_h.
void
update_row_shrinkage(ModelState& state, ChangeType d, Rng& rng);
void
update_column_shrinkage(ModelState& state, ChangeType d, Rng& rng);
void
update_element_shrinkage(ModelState& state, ChangeType d, Rng& rng);

enum class SweepStep
{
  mixing,
  noise,
  level_shift_columns,
  outlier_columns,
  level_shift_global,
  level_shift_rows,
  level_shift_columns_scale,
  level_shift_elements,
  outlier_global,
  outlier_rows,
  outlier_columns_scale,
  outlier_elements
};

//! Fixed scan order of one sweep; partial mode omits every outlier step.
std::vector<SweepStep>
sweep_plan(ModelMode mode);

void
gibbs_sweep(ModelState& state, const ObservationMatrix& Y, Rng& rng);

struct ChainOptions
{
  std::int64_t iterations = 3000;
  std::int64_t burn_in = 500;
  int chain = 0;
  //! Calls `progress(iteration, iterations)` every this many sweeps; 0 = off.
  std::int64_t progress_interval = 0;
  std::function<void(std::int64_t, std::int64_t)> progress;
};

//! Runs one chain and keeps every post-burn-in state. The final state is
//! written to `final_state` when given.
PosteriorDraws
run_chain(const ObservationMatrix& Y,
          Index rank,
          ModelMode mode,
          const ChainOptions& options,
          std::uint64_t seed,
          const std::optional<ModelState>& warm = std::nullopt,
          ModelState* final_state = nullptr);

//! Independent chains on separate threads, chain c using stream c of `seed`.
std::vector<PosteriorDraws>
run_chains(const ObservationMatrix& Y,
           Index rank,
           ModelMode mode,
           const ChainOptions& options,
           std::uint64_t seed,
           int chains);

} // namespace abacus
