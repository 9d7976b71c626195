#pragma once

#include "abacus/detector.hpp"
#include "abacus/model.hpp"
#include "abacus/sampler.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace abacus {

struct AbacusOptions
{
  Index rank = 5;
  std::int64_t iterations = 3000;
  std::int64_t burn_in = 500;
  double delta = default_delta;
  std::uint64_t seed = 1;
  bool prune = false;
  std::optional<Index> prune_keep;
  std::int64_t progress_interval = 0;
  //! Receives (stage, iteration, iterations); stage is "partial" or "full".
  std::function<void(std::string_view, std::int64_t, std::int64_t)> progress;
};

//! Partial-model posterior and its elementwise medians.
struct PartialFit
{
  PosteriorDraws draws;
  MatrixXd M_hat;
  MatrixXd V_hat;
  VectorXd psi_hat;
  //! Shrinkage hierarchy of the final partial state.
  ShrinkageSet shrinkage;
};

PartialFit
fit_partial(const ObservationMatrix& Y,
            Index rank,
            std::int64_t iterations,
            std::int64_t burn_in,
            std::uint64_t seed,
            const ChainOptions& base = {});

//! Full-model starting point: V0 holds the partial V_hat columns at the
//! outlier indices, V1 those at the level-shift indices, zero elsewhere.
//! Both hierarchies start from the partial one, auxiliaries redrawn from
//! their conditionals given the scales.
ModelState
init_full_from_partial(const PartialFit& partial,
                       const std::vector<Index>& cpt0,
                       const std::vector<Index>& cpt1,
                       std::uint64_t seed);

//! Elementwise median over draws of V0 + cumsum(V1).
MatrixXd
median_sources(const PosteriorDraws& draws, ModelMode mode);

//! Partial fit, change split, full fit, per-type detection.
ChangeReport
run_abacus(const ObservationMatrix& Y, const AbacusOptions& options = {});

} // namespace abacus
