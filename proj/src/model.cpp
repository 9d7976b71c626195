#include "abacus/model.hpp"

#include "abacus/random.hpp"

#include <cmath>
#include <sstream>

namespace abacus {

ObservationMatrix::ObservationMatrix(MatrixXd values)
  : values_(std::move(values))
{
  if (values_.rows() < 1)
    throw ShapeError("observation matrix needs at least one channel");
  if (values_.cols() < 3)
    throw ShapeError("observation matrix needs at least three columns, got " +
                     std::to_string(values_.cols()));
  if (!values_.allFinite())
    throw std::invalid_argument("observation matrix has non-finite entries");
}

ShrinkageSet
ShrinkageSet::ones(Index rank, Index length)
{
  ShrinkageSet s;
  s.lambda = VectorXd::Ones(rank);
  s.eta = VectorXd::Ones(rank);
  s.phi = VectorXd::Ones(length);
  s.omega = VectorXd::Ones(length);
  s.gamma = MatrixXd::Ones(rank, length);
  s.zeta = MatrixXd::Ones(rank, length);
  return s;
}

namespace {

bool
positive_finite(double x)
{
  return std::isfinite(x) && x > 0.0;
}

template<typename Derived>
bool
positive_finite(const Eigen::MatrixBase<Derived>& x)
{
  return x.allFinite() && (x.array() > 0.0).all();
}

void
draw_shrinkage_prior(ShrinkageSet& s, Index rank, Index length, Rng& rng)
{
  s = ShrinkageSet::ones(rank, length);
  s.xi = rng.inv_gamma(0.5, 1.0);
  s.tau = rng.inv_gamma(0.5, 1.0 / s.xi);
  for (Index h = 0; h < rank; ++h) {
    s.eta(h) = rng.inv_gamma(0.5, 1.0);
    s.lambda(h) = rng.inv_gamma(0.5, 1.0 / s.eta(h));
  }
  for (Index n = 0; n < length; ++n) {
    s.omega(n) = rng.inv_gamma(0.5, 1.0);
    s.phi(n) = rng.inv_gamma(0.5, 1.0 / s.omega(n));
  }
  for (Index n = 0; n < length; ++n) {
    for (Index h = 0; h < rank; ++h) {
      s.zeta(h, n) = rng.inv_gamma(0.5, 1.0);
      s.gamma(h, n) = rng.inv_gamma(0.5, 1.0 / s.zeta(h, n));
    }
  }
}

void
draw_changes_prior(MatrixXd& V, const ShrinkageSet& s, Rng& rng)
{
  for (Index n = 0; n < V.cols(); ++n)
    for (Index h = 0; h < V.rows(); ++h)
      V(h, n) = std::sqrt(s.element_variance(h, n)) * rng.normal();
}

bool
shaped(const ShrinkageSet& s, Index rank, Index length)
{
  return s.lambda.size() == rank && s.eta.size() == rank &&
         s.phi.size() == length && s.omega.size() == length &&
         s.gamma.rows() == rank && s.gamma.cols() == length &&
         s.zeta.rows() == rank && s.zeta.cols() == length;
}

} // namespace

bool
ShrinkageSet::valid() const
{
  return positive_finite(tau) && positive_finite(xi) &&
         lambda.size() == eta.size() && phi.size() == omega.size() &&
         shaped(*this, lambda.size(), phi.size()) && positive_finite(lambda) &&
         positive_finite(eta) && positive_finite(phi) &&
         positive_finite(omega) && positive_finite(gamma) &&
         positive_finite(zeta);
}

double
ModelState::mixing_prior_scale(Index h) const
{
  double scale = shrink1.tau * shrink1.lambda(h);
  if (mode == ModelMode::full)
    scale *= shrink0.tau * shrink0.lambda(h);
  return scale;
}

void
ModelState::validate() const
{
  const Index P = channels(), K = rank(), N = length();
  std::ostringstream err;
  if (psi.size() != P)
    err << "psi has length " << psi.size() << ", expected " << P << "; ";
  if (V0.rows() != K || V0.cols() != N)
    err << "V0 is " << V0.rows() << "x" << V0.cols() << ", expected " << K
        << "x" << N << "; ";
  if (V1.rows() != K)
    err << "V1 has " << V1.rows() << " rows, expected " << K << "; ";
  if (!shaped(shrink1, K, N) || !shaped(shrink0, K, N))
    err << "shrinkage sets do not match K=" << K << ", N=" << N << "; ";
  if (!err.str().empty())
    throw ShapeError("invalid model state: " + err.str());
  if (!positive_finite(psi))
    throw std::invalid_argument("noise variances must be positive");
  if (!shrink1.valid() || (mode == ModelMode::full && !shrink0.valid()))
    throw std::invalid_argument("shrinkage parameters must be positive");
  if (mode == ModelMode::partial && !V0.isZero(0.0))
    throw std::invalid_argument("partial model must have V0 == 0");
}

MatrixXd
compose_sources(const ModelState& state)
{
  MatrixXd S = cumsum_rows(state.V1);
  if (state.mode == ModelMode::full)
    S += state.V0;
  return S;
}

ModelState
init_state(const ObservationMatrix& Y,
           Index rank,
           ModelMode mode,
           std::uint64_t seed,
           const std::optional<ModelState>& warm)
{
  const Index P = Y.channels(), N = Y.length();
  if (rank < 1 || rank >= P)
    throw ShapeError("rank K must satisfy 1 <= K < P (K=" +
                     std::to_string(rank) + ", P=" + std::to_string(P) + ")");

  Rng rng(seed, 0x696e6974);
  ModelState s;
  s.mode = mode;

  if (warm) {
    const ModelState& w = *warm;
    if (w.M.rows() != P || w.M.cols() != rank || w.V1.rows() != rank ||
        w.V1.cols() != N || w.psi.size() != P)
      throw ShapeError("warm state shape does not match (P, K, N)");
    s.M = w.M;
    s.V1 = w.V1;
    s.psi = w.psi;
    if (shaped(w.shrink1, rank, N))
      s.shrink1 = w.shrink1;
    else
      draw_shrinkage_prior(s.shrink1, rank, N, rng);

    const bool has_outlier_part =
      w.mode == ModelMode::full && shaped(w.shrink0, rank, N) &&
      w.V0.rows() == rank && w.V0.cols() == N;
    if (mode == ModelMode::partial) {
      s.V0 = MatrixXd::Zero(rank, N);
      s.shrink0 = ShrinkageSet::ones(rank, N);
    } else if (has_outlier_part) {
      s.V0 = w.V0;
      s.shrink0 = w.shrink0;
    } else {
      draw_shrinkage_prior(s.shrink0, rank, N, rng);
      s.V0.resize(rank, N);
      draw_changes_prior(s.V0, s.shrink0, rng);
    }
    s.validate();
    return s;
  }

  draw_shrinkage_prior(s.shrink1, rank, N, rng);
  if (mode == ModelMode::full)
    draw_shrinkage_prior(s.shrink0, rank, N, rng);
  else
    s.shrink0 = ShrinkageSet::ones(rank, N);

  s.psi.resize(P);
  for (Index i = 0; i < P; ++i)
    s.psi(i) = rng.inv_gamma(1.0, 1.0);

  s.M.resize(P, rank);
  for (Index h = 0; h < rank; ++h) {
    const double scale = s.mixing_prior_scale(h);
    for (Index i = 0; i < P; ++i)
      s.M(i, h) = std::sqrt(scale * s.psi(i)) * rng.normal();
  }

  s.V1.resize(rank, N);
  draw_changes_prior(s.V1, s.shrink1, rng);
  s.V0 = MatrixXd::Zero(rank, N);
  if (mode == ModelMode::full)
    draw_changes_prior(s.V0, s.shrink0, rng);
  return s;
}

} // namespace abacus
