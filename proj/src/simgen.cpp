#include "abacus/simgen.hpp"

#include "abacus/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace abacus::sim {

std::vector<Index>
admissible_locations(Index N)
{
  std::vector<Index> out;
  for (Index n = 2; n <= N - 1; n += 2)
    out.push_back(n);
  return out;
}

void
validate(const SimConfig& cfg)
{
  if (cfg.P < 1 || cfg.N < 3 || cfg.r < 1)
    throw std::invalid_argument("simulation needs P >= 1, N >= 3, r >= 1");
  if (cfg.r > cfg.P)
    throw std::invalid_argument("simulation needs r <= P");
  if (cfg.n_ao < 0 || cfg.n_ls < 0)
    throw std::invalid_argument("change counts must be nonnegative");
  const auto slots = static_cast<Index>(admissible_locations(cfg.N).size());
  if (cfg.n_ao + cfg.n_ls > slots)
    throw std::invalid_argument(
      "too many changes: " + std::to_string(cfg.n_ao + cfg.n_ls) +
      " requested, " + std::to_string(slots) + " admissible locations");
  if (!(cfg.noise.lo > 0.0) || cfg.noise.hi < cfg.noise.lo)
    throw std::invalid_argument("noise variance range must be positive");
  if (!(cfg.magnitude.lo > 0.0) || cfg.magnitude.hi < cfg.magnitude.lo)
    throw std::invalid_argument("magnitude range must be positive");
  if (cfg.mixing.hi < cfg.mixing.lo)
    throw std::invalid_argument("mixing range is empty");
}

std::pair<ObservationMatrix, GroundTruth>
generate(const SimConfig& cfg)
{
  validate(cfg);
  Rng rng(cfg.seed, 0x73696d);
  GroundTruth truth;

  truth.M.resize(cfg.P, cfg.r);
  for (Index h = 0; h < cfg.r; ++h)
    for (Index i = 0; i < cfg.P; ++i)
      truth.M(i, h) = rng.uniform(cfg.mixing.lo, cfg.mixing.hi);
  truth.psi.resize(cfg.P);
  for (Index i = 0; i < cfg.P; ++i)
    truth.psi(i) = rng.uniform(cfg.noise.lo, cfg.noise.hi);

  // Sample locations without replacement, then label a shuffled list.
  std::vector<Index> slots = admissible_locations(cfg.N);
  std::shuffle(slots.begin(), slots.end(), rng.engine());
  slots.resize(static_cast<std::size_t>(cfg.n_ao + cfg.n_ls));
  std::shuffle(slots.begin(), slots.end(), rng.engine());

  std::vector<Index> rows(static_cast<std::size_t>(cfg.r));
  std::iota(rows.begin(), rows.end(), Index{ 0 });
  for (std::size_t k = 0; k < slots.size(); ++k) {
    ChangeEvent ev;
    ev.index = slots[k];
    ev.type = static_cast<Index>(k) < cfg.n_ao ? ChangeType::additive_outlier
                                               : ChangeType::level_shift;
    const auto affected = rng.uniform_int(1, cfg.r);
    std::shuffle(rows.begin(), rows.end(), rng.engine());
    ev.signals.assign(rows.begin(), rows.begin() + affected);
    std::sort(ev.signals.begin(), ev.signals.end());
    for (std::size_t j = 0; j < ev.signals.size(); ++j) {
      const double mag = rng.uniform(cfg.magnitude.lo, cfg.magnitude.hi);
      ev.magnitudes.push_back(rng.uniform(0.0, 1.0) < 0.5 ? -mag : mag);
    }
    truth.events.push_back(std::move(ev));
  }
  std::sort(truth.events.begin(),
            truth.events.end(),
            [](const ChangeEvent& a, const ChangeEvent& b) {
              return a.index < b.index;
            });

  truth.S = MatrixXd::Zero(cfg.r, cfg.N);
  for (const ChangeEvent& ev : truth.events) {
    const Index n = ev.index - 1;
    for (std::size_t j = 0; j < ev.signals.size(); ++j) {
      const Index h = ev.signals[j];
      if (ev.type == ChangeType::additive_outlier)
        truth.S(h, n) += ev.magnitudes[j];
      else
        truth.S.row(h).tail(cfg.N - n).array() += ev.magnitudes[j];
    }
    (ev.type == ChangeType::additive_outlier ? truth.ao_locs : truth.ls_locs)
      .push_back(ev.index);
  }

  MatrixXd Y = truth.M * truth.S;
  for (Index n = 0; n < cfg.N; ++n)
    for (Index i = 0; i < cfg.P; ++i)
      Y(i, n) += std::sqrt(truth.psi(i)) * rng.normal();
  return { ObservationMatrix(std::move(Y)), std::move(truth) };
}

} // namespace abacus::sim
