#pragma once

#include "abacus/model.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace abacus::sim {

struct Interval
{
  double lo;
  double hi;
};

struct SimConfig
{
  Index P = 10;
  Index N = 100;
  Index r = 3;
  Index n_ao = 2;
  Index n_ls = 2;
  Interval mixing{ -1.0, 1.0 };
  Interval noise{ 0.1, 5.0 };
  Interval magnitude{ 1.0, 5.0 };
  std::uint64_t seed = 1;
};

struct ChangeEvent
{
  Index index; // 1-based
  ChangeType type;
  std::vector<Index> signals; // 0-based rows of S
  std::vector<double> magnitudes;
};

struct GroundTruth
{
  MatrixXd M;   // P x r
  MatrixXd S;   // r x N
  VectorXd psi; // P
  std::vector<Index> ao_locs;
  std::vector<Index> ls_locs;
  std::vector<ChangeEvent> events; // ascending index
};

//! Even indices 2, 4, ... up to N - 1.
std::vector<Index>
admissible_locations(Index N);

//! Throws std::invalid_argument for infeasible configurations.
void
validate(const SimConfig& cfg);

//! Piecewise-constant sources starting at level zero: an additive outlier
//! adds its magnitude at one index, a level shift from its index onwards.
//! Y = M S + E with E columns ~ N(0, diag(psi)).
std::pair<ObservationMatrix, GroundTruth>
generate(const SimConfig& cfg);

} // namespace abacus::sim
