#include "abacus/sampler.hpp"

#include <cmath>
#include <future>
#include <sstream>

namespace abacus {

namespace {

constexpr ChangeType kOutlier = ChangeType::additive_outlier;
constexpr ChangeType kShift = ChangeType::level_shift;

// Draws mean + scale * U^-1 z, where precision = U'U.
VectorXd
draw_gaussian(const VectorXd& mean,
              const Eigen::LLT<MatrixXd>& precision,
              double scale,
              Rng& rng)
{
  VectorXd z = rng.normal_vector(mean.size());
  return mean + std::sqrt(scale) * precision.matrixU().solve(z);
}

// Product of the M prior scale factors of column h excluding the global
// (exclude_row = false) or row (exclude_row = true) scale of type d.
double
mixing_scale_without(const ModelState& s,
                     ChangeType d,
                     Index h,
                     bool exclude_row)
{
  double out = 1.0;
  for (ChangeType t : { kOutlier, kShift }) {
    if (!s.uses(t))
      continue;
    const ShrinkageSet& set = s.shrinkage(t);
    if (t != d || exclude_row)
      out *= set.tau;
    if (t != d || !exclude_row)
      out *= set.lambda(h);
  }
  return out;
}

} // namespace

Eigen::LLT<MatrixXd>
robust_cholesky(const MatrixXd& A)
{
  Eigen::LLT<MatrixXd> llt(A);
  auto ok = [&] {
    return llt.info() == Eigen::Success && llt.matrixLLT().allFinite();
  };
  if (ok())
    return llt;

  const double dim = static_cast<double>(A.rows());
  double jitter = 1e-10 * std::abs(A.trace()) / dim;
  if (!(jitter > 0.0))
    jitter = 1e-10;
  for (int attempt = 0; attempt <= 3; ++attempt, jitter *= 2.0) {
    MatrixXd B = A;
    B.diagonal().array() += jitter;
    llt.compute(B);
    if (ok())
      return llt;
  }

  double min_eig = std::numeric_limits<double>::quiet_NaN();
  if (A.allFinite())
    min_eig = Eigen::SelfAdjointEigenSolver<MatrixXd>(A, Eigen::EigenvaluesOnly)
                .eigenvalues()
                .minCoeff();
  std::ostringstream msg;
  msg << "matrix is not positive definite (minimum eigenvalue estimate "
      << min_eig << ")";
  throw IllConditioned(msg.str(), min_eig);
}

MixingConditional
mixing_conditional(const ModelState& state,
                   const ObservationMatrix& Y,
                   const MatrixXd& S)
{
  const Index K = state.rank();
  MixingConditional out;
  out.F = S * S.transpose();
  for (Index h = 0; h < K; ++h)
    out.F(h, h) += 1.0 / state.mixing_prior_scale(h);
  const auto llt = robust_cholesky(out.F);
  // Row i of the mean is (F^-1 S Y_i)'.
  out.mean = llt.solve(S * Y.values().transpose()).transpose();
  return out;
}

// psi_i also scales the prior of row i of M, so its K entries contribute
// K/2 to the shape and their prior quadratic form to the scale.
InvGammaConditional
noise_conditional(const ModelState& state,
                  const ObservationMatrix& Y,
                  const MatrixXd& S,
                  Index i)
{
  const VectorXd resid = Y.values().row(i) - state.M.row(i) * S;
  const double N = static_cast<double>(state.length());
  const double K = static_cast<double>(state.rank());
  double prior_term = 0.0;
  for (Index h = 0; h < state.rank(); ++h)
    prior_term += state.M(i, h) * state.M(i, h) / state.mixing_prior_scale(h);
  return { 1.0 + N / 2.0 + K / 2.0,
           1.0 + 0.5 * resid.squaredNorm() + 0.5 * prior_term };
}

GaussianConditional
v_column_conditional(const ModelState& state,
                     const ObservationMatrix& Y,
                     ChangeType d,
                     Index n)
{
  const Index N = state.length();
  const MatrixXd S = compose_sources(state);
  const VectorXd inv_psi = state.psi.cwiseInverse();
  const MatrixXd weighted = state.M.transpose() * inv_psi.asDiagonal();
  const MatrixXd gram = weighted * state.M;
  const double c = inverse_column_norm2(d, n, N);

  // C(n) [D^-1]_{.n}: residual summed over the columns column n of V(d)
  // reaches, plus the restored effect of the current column.
  VectorXd resid_sum;
  if (d == kShift)
    resid_sum = (Y.values().rightCols(N - n) - state.M * S.rightCols(N - n))
                  .rowwise()
                  .sum();
  else
    resid_sum = Y.values().col(n) - state.M * S.col(n);

  const ShrinkageSet& shrink = state.shrinkage(d);
  GaussianConditional out;
  out.precision = c * gram;
  for (Index h = 0; h < state.rank(); ++h)
    out.precision(h, h) += 1.0 / shrink.element_variance(h, n);
  const VectorXd target =
    weighted * resid_sum + c * gram * state.V(d).col(n);
  out.mean = robust_cholesky(out.precision).solve(target);
  return out;
}

double
global_data_term(const ModelState& s, ChangeType d)
{
  const ShrinkageSet& set = s.shrinkage(d);
  double m_term = 0.0;
  for (Index h = 0; h < s.rank(); ++h) {
    const double denom = 2.0 * mixing_scale_without(s, d, h, false);
    for (Index i = 0; i < s.channels(); ++i)
      m_term += s.M(i, h) * s.M(i, h) / (denom * s.psi(i));
  }
  double v_term = 0.0;
  const MatrixXd& V = s.V(d);
  for (Index n = 0; n < s.length(); ++n)
    for (Index h = 0; h < s.rank(); ++h)
      v_term += V(h, n) * V(h, n) /
                (2.0 * set.phi(n) * set.lambda(h) * set.gamma(h, n));
  return m_term + v_term;
}

double
row_data_term(const ModelState& s, ChangeType d, Index h)
{
  const ShrinkageSet& set = s.shrinkage(d);
  const double denom = 2.0 * mixing_scale_without(s, d, h, true);
  double m_term = 0.0;
  for (Index i = 0; i < s.channels(); ++i)
    m_term += s.M(i, h) * s.M(i, h) / (denom * s.psi(i));
  double v_term = 0.0;
  const MatrixXd& V = s.V(d);
  for (Index n = 0; n < s.length(); ++n)
    v_term +=
      V(h, n) * V(h, n) / (2.0 * set.phi(n) * set.gamma(h, n) * set.tau);
  return m_term + v_term;
}

double
column_data_term(const ModelState& s, ChangeType d, Index n)
{
  const ShrinkageSet& set = s.shrinkage(d);
  const MatrixXd& V = s.V(d);
  double out = 0.0;
  for (Index h = 0; h < s.rank(); ++h)
    out += V(h, n) * V(h, n) / (2.0 * set.lambda(h) * set.gamma(h, n) * set.tau);
  return out;
}

double
element_data_term(const ModelState& s, ChangeType d, Index h, Index n)
{
  const ShrinkageSet& set = s.shrinkage(d);
  const double v = s.V(d)(h, n);
  return v * v / (2.0 * set.lambda(h) * set.phi(n) * set.tau);
}

InvGammaConditional
global_scale_conditional(const ModelState& s, ChangeType d)
{
  const double K = static_cast<double>(s.rank());
  const double P = static_cast<double>(s.channels());
  const double N = static_cast<double>(s.length());
  return { (1.0 + K * (P + N)) / 2.0,
           1.0 / s.shrinkage(d).xi + global_data_term(s, d) };
}

InvGammaConditional
row_scale_conditional(const ModelState& s, ChangeType d, Index h)
{
  const double P = static_cast<double>(s.channels());
  const double N = static_cast<double>(s.length());
  return { (1.0 + P + N) / 2.0,
           1.0 / s.shrinkage(d).eta(h) + row_data_term(s, d, h) };
}

InvGammaConditional
column_scale_conditional(const ModelState& s, ChangeType d, Index n)
{
  const double K = static_cast<double>(s.rank());
  return { (1.0 + K) / 2.0,
           1.0 / s.shrinkage(d).omega(n) + column_data_term(s, d, n) };
}

InvGammaConditional
element_scale_conditional(const ModelState& s, ChangeType d, Index h, Index n)
{
  return { 1.0,
           1.0 / s.shrinkage(d).zeta(h, n) + element_data_term(s, d, h, n) };
}

// ---------------------------------------------------------------------------

ColumnSweep::ColumnSweep(ModelState& state,
                         const ObservationMatrix& Y,
                         ChangeType d)
  : state_(state)
  , type_(d)
{
  const MatrixXd S = compose_sources(state);
  const MatrixXd weighted =
    state.M.transpose() * state.psi.cwiseInverse().asDiagonal();
  gram_ = weighted * state.M;
  projected_ = weighted * (Y.values() - state.M * S);
  cum_change_ = VectorXd::Zero(state.rank());
  if (d == kShift) {
    const Index N = state.length();
    suffix_.resize(state.rank(), N);
    suffix_.col(N - 1) = projected_.col(N - 1);
    for (Index n = N - 2; n >= 0; --n)
      suffix_.col(n) = suffix_.col(n + 1) + projected_.col(n);
  }
}

GaussianConditional
ColumnSweep::conditional() const
{
  const Index n = column_;
  const double c = inverse_column_norm2(type_, n, state_.length());
  const ShrinkageSet& shrink = state_.shrinkage(type_);

  // Every accepted level-shift change at j < n moved S at all columns >= n
  // by the same amount, so the suffix sum shifts by c * gram * change.
  VectorXd target;
  if (type_ == kShift)
    target = suffix_.col(n) + c * gram_ * (state_.V1.col(n) - cum_change_);
  else
    target = projected_.col(n) + gram_ * state_.V0.col(n);

  GaussianConditional out;
  out.precision = c * gram_;
  for (Index h = 0; h < state_.rank(); ++h)
    out.precision(h, h) += 1.0 / shrink.element_variance(h, n);
  out.mean = robust_cholesky(out.precision).solve(target);
  return out;
}

void
ColumnSweep::accept(const VectorXd& v)
{
  auto col = state_.V(type_).col(column_);
  cum_change_ += v - col;
  col = v;
  ++column_;
}

void
ColumnSweep::draw(Rng& rng)
{
  const GaussianConditional cond = conditional();
  accept(draw_gaussian(cond.mean, robust_cholesky(cond.precision), 1.0, rng));
}

// ---------------------------------------------------------------------------

void
update_mixing(ModelState& state, const ObservationMatrix& Y, Rng& rng)
{
  const MatrixXd S = compose_sources(state);
  const MixingConditional cond = mixing_conditional(state, Y, S);
  const auto llt = robust_cholesky(cond.F);
  for (Index i = 0; i < state.channels(); ++i)
    state.M.row(i) =
      draw_gaussian(cond.mean.row(i).transpose(), llt, state.psi(i), rng)
        .transpose();
}

void
update_noise(ModelState& state, const ObservationMatrix& Y, Rng& rng)
{
  const MatrixXd S = compose_sources(state);
  for (Index i = 0; i < state.channels(); ++i) {
    const InvGammaConditional c = noise_conditional(state, Y, S, i);
    state.psi(i) = rng.inv_gamma(c.shape, c.scale);
  }
}

void
update_v_column(ModelState& state,
                const ObservationMatrix& Y,
                ChangeType d,
                Index n,
                Rng& rng)
{
  if (!state.uses(d))
    throw std::logic_error("additive-outlier columns require the full model");
  const GaussianConditional cond = v_column_conditional(state, Y, d, n);
  state.V(d).col(n) =
    draw_gaussian(cond.mean, robust_cholesky(cond.precision), 1.0, rng);
}

void
update_global_shrinkage(ModelState& state, ChangeType d, Rng& rng)
{
  const InvGammaConditional c = global_scale_conditional(state, d);
  ShrinkageSet& set = state.shrinkage(d);
  set.tau = rng.inv_gamma(c.shape, c.scale);
  const InvGammaConditional a = auxiliary_conditional(set.tau);
  set.xi = rng.inv_gamma(a.shape, a.scale);
}

void
update_row_shrinkage(ModelState& state, ChangeType d, Rng& rng)
{
  ShrinkageSet& set = state.shrinkage(d);
  for (Index h = 0; h < state.rank(); ++h) {
    const InvGammaConditional c = row_scale_conditional(state, d, h);
    set.lambda(h) = rng.inv_gamma(c.shape, c.scale);
  }
  for (Index h = 0; h < state.rank(); ++h) {
    const InvGammaConditional a = auxiliary_conditional(set.lambda(h));
    set.eta(h) = rng.inv_gamma(a.shape, a.scale);
  }
}

void
update_column_shrinkage(ModelState& state, ChangeType d, Rng& rng)
{
  ShrinkageSet& set = state.shrinkage(d);
  for (Index n = 0; n < state.length(); ++n) {
    const InvGammaConditional c = column_scale_conditional(state, d, n);
    set.phi(n) = rng.inv_gamma(c.shape, c.scale);
    const InvGammaConditional a = auxiliary_conditional(set.phi(n));
    set.omega(n) = rng.inv_gamma(a.shape, a.scale);
  }
}

void
update_element_shrinkage(ModelState& state, ChangeType d, Rng& rng)
{
  ShrinkageSet& set = state.shrinkage(d);
  for (Index n = 0; n < state.length(); ++n) {
    for (Index h = 0; h < state.rank(); ++h) {
      const InvGammaConditional c = element_scale_conditional(state, d, h, n);
      set.gamma(h, n) = rng.inv_gamma(c.shape, c.scale);
      const InvGammaConditional a = auxiliary_conditional(set.gamma(h, n));
      set.zeta(h, n) = rng.inv_gamma(a.shape, a.scale);
    }
  }
}

std::vector<SweepStep>
sweep_plan(ModelMode mode)
{
  std::vector<SweepStep> plan{ SweepStep::mixing,
                               SweepStep::noise,
                               SweepStep::level_shift_columns };
  if (mode == ModelMode::full)
    plan.push_back(SweepStep::outlier_columns);
  plan.insert(plan.end(),
              { SweepStep::level_shift_global,
                SweepStep::level_shift_rows,
                SweepStep::level_shift_columns_scale,
                SweepStep::level_shift_elements });
  if (mode == ModelMode::full)
    plan.insert(plan.end(),
                { SweepStep::outlier_global,
                  SweepStep::outlier_rows,
                  SweepStep::outlier_columns_scale,
                  SweepStep::outlier_elements });
  return plan;
}

void
gibbs_sweep(ModelState& state, const ObservationMatrix& Y, Rng& rng)
{
  for (SweepStep step : sweep_plan(state.mode)) {
    switch (step) {
      case SweepStep::mixing:
        update_mixing(state, Y, rng);
        break;
      case SweepStep::noise:
        update_noise(state, Y, rng);
        break;
      case SweepStep::level_shift_columns:
      case SweepStep::outlier_columns: {
        ColumnSweep sweep(state,
                          Y,
                          step == SweepStep::outlier_columns ? kOutlier
                                                             : kShift);
        while (!sweep.done())
          sweep.draw(rng);
        break;
      }
      case SweepStep::level_shift_global:
        update_global_shrinkage(state, kShift, rng);
        break;
      case SweepStep::level_shift_rows:
        update_row_shrinkage(state, kShift, rng);
        break;
      case SweepStep::level_shift_columns_scale:
        update_column_shrinkage(state, kShift, rng);
        break;
      case SweepStep::level_shift_elements:
        update_element_shrinkage(state, kShift, rng);
        break;
      case SweepStep::outlier_global:
        update_global_shrinkage(state, kOutlier, rng);
        break;
      case SweepStep::outlier_rows:
        update_row_shrinkage(state, kOutlier, rng);
        break;
      case SweepStep::outlier_columns_scale:
        update_column_shrinkage(state, kOutlier, rng);
        break;
      case SweepStep::outlier_elements:
        update_element_shrinkage(state, kOutlier, rng);
        break;
    }
  }
}

PosteriorDraws
run_chain(const ObservationMatrix& Y,
          Index rank,
          ModelMode mode,
          const ChainOptions& options,
          std::uint64_t seed,
          const std::optional<ModelState>& warm,
          ModelState* final_state)
{
  if (options.burn_in < 0 || options.burn_in >= options.iterations)
    throw std::invalid_argument("burn-in must satisfy 0 <= burn_in < iterations");

  const auto stream = static_cast<std::uint64_t>(options.chain);
  ModelState state = init_state(Y, rank, mode, seed ^ (stream << 32), warm);
  Rng rng(seed, 1000 + stream);

  PosteriorDraws draws;
  draws.reserve(static_cast<std::size_t>(options.iterations - options.burn_in));
  for (std::int64_t it = 0; it < options.iterations; ++it) {
    try {
      gibbs_sweep(state, Y, rng);
    } catch (IllConditioned& e) {
      e.set_iteration(it);
      throw;
    }
    if (it >= options.burn_in)
      draws.append(
        Draw{ state.M, state.V0, state.V1, state.psi, it, options.chain });
    if (options.progress && options.progress_interval > 0 &&
        (it + 1) % options.progress_interval == 0)
      options.progress(it + 1, options.iterations);
  }
  if (final_state)
    *final_state = std::move(state);
  return draws;
}

std::vector<PosteriorDraws>
run_chains(const ObservationMatrix& Y,
           Index rank,
           ModelMode mode,
           const ChainOptions& options,
           std::uint64_t seed,
           int chains)
{
  std::vector<std::future<PosteriorDraws>> jobs;
  for (int c = 0; c < chains; ++c) {
    ChainOptions opt = options;
    opt.chain = c;
    opt.progress = nullptr;
    jobs.push_back(std::async(std::launch::async, [&Y, rank, mode, opt, seed] {
      return run_chain(Y, rank, mode, opt, seed);
    }));
  }
  std::vector<PosteriorDraws> out;
  for (auto& job : jobs)
    out.push_back(job.get());
  return out;
}

} // namespace abacus
