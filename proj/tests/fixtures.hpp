#pragma once

#include "abacus/model.hpp"

#include <cmath>
#include <cstdlib>

namespace fixture {

using abacus::Index;
using abacus::MatrixXd;
using abacus::ModelMode;
using abacus::ModelState;
using abacus::ObservationMatrix;
using abacus::ShrinkageSet;
using abacus::VectorXd;

// A state with every scale moved away from 1 so that no factor can be
// confused with another.
inline ModelState
random_state(Index P, Index K, Index N, ModelMode mode, unsigned seed)
{
  std::srand(seed);
  const ObservationMatrix Y(MatrixXd::Random(P, N));
  ModelState s = abacus::init_state(Y, K, mode, seed);
  auto jitter = [](auto& x) {
    x = (x.array().abs() + 0.5).matrix();
  };
  for (ShrinkageSet* set : { &s.shrink0, &s.shrink1 }) {
    set->tau = 0.5 + std::abs(MatrixXd::Random(1, 1)(0, 0));
    set->xi = 0.5 + std::abs(MatrixXd::Random(1, 1)(0, 0));
    set->lambda = VectorXd::Random(K);
    set->eta = VectorXd::Random(K);
    set->phi = VectorXd::Random(N);
    set->omega = VectorXd::Random(N);
    set->gamma = MatrixXd::Random(K, N);
    set->zeta = MatrixXd::Random(K, N);
    jitter(set->lambda);
    jitter(set->eta);
    jitter(set->phi);
    jitter(set->omega);
    jitter(set->gamma);
    jitter(set->zeta);
  }
  s.M = MatrixXd::Random(P, K);
  s.V1 = MatrixXd::Random(K, N);
  s.V0 = mode == ModelMode::full ? MatrixXd(MatrixXd::Random(K, N))
                                 : MatrixXd(MatrixXd::Zero(K, N));
  s.psi = (VectorXd::Random(P).array().abs() + 0.3).matrix();
  s.validate();
  return s;
}

inline ObservationMatrix
random_y(Index P, Index N, unsigned seed)
{
  std::srand(seed * 7919u + 1u);
  return ObservationMatrix(MatrixXd::Random(P, N) * 2.0);
}

inline double
max_abs(const MatrixXd& a)
{
  return a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
}

} // namespace fixture
