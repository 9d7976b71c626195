#include "abacus/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace abacus {

namespace {

constexpr std::uint64_t kFullStream = 0x9e3779b97f4a7c15ULL;

std::vector<MatrixXd>
collect(const PosteriorDraws& draws, MatrixXd Draw::*field)
{
  std::vector<MatrixXd> out;
  out.reserve(draws.size());
  for (const Draw& d : draws)
    out.push_back(d.*field);
  return out;
}

VectorXd
median_psi(const PosteriorDraws& draws)
{
  std::vector<MatrixXd> psi;
  psi.reserve(draws.size());
  for (const Draw& d : draws)
    psi.push_back(d.psi);
  return elementwise_median(psi);
}

// The first column of V1 carries the initial level of S, not a change.
GSeries
level_shift_candidates(GSeries g)
{
  if (g.values.size() > 0)
    g.values(0) = 0.0;
  return g;
}

void
check_indices(const std::vector<Index>& idx, Index N)
{
  for (Index n : idx)
    if (n < 1 || n > N)
      throw std::out_of_range("change index " + std::to_string(n) +
                              " outside 1.." + std::to_string(N));
}

} // namespace

PartialFit
fit_partial(const ObservationMatrix& Y,
            Index rank,
            std::int64_t iterations,
            std::int64_t burn_in,
            std::uint64_t seed,
            const ChainOptions& base)
{
  if (rank >= Y.channels())
    throw ShapeError("rank K must be smaller than the number of channels");
  ChainOptions opt = base;
  opt.iterations = iterations;
  opt.burn_in = burn_in;

  ModelState last;
  PartialFit fit;
  fit.draws = run_chain(Y, rank, ModelMode::partial, opt, seed, {}, &last);
  fit.M_hat = elementwise_median(collect(fit.draws, &Draw::M));
  fit.V_hat = elementwise_median(collect(fit.draws, &Draw::V1));
  fit.psi_hat = median_psi(fit.draws);
  fit.shrinkage = last.shrink1;
  return fit;
}

ModelState
init_full_from_partial(const PartialFit& partial,
                       const std::vector<Index>& cpt0,
                       const std::vector<Index>& cpt1,
                       std::uint64_t seed)
{
  const Index K = partial.V_hat.rows(), N = partial.V_hat.cols();
  check_indices(cpt0, N);
  check_indices(cpt1, N);
  for (Index n : cpt0)
    if (std::find(cpt1.begin(), cpt1.end(), n) != cpt1.end())
      throw std::invalid_argument("index " + std::to_string(n) +
                                  " is both an outlier and a level shift");

  ModelState s;
  s.mode = ModelMode::full;
  s.M = partial.M_hat;
  s.psi = partial.psi_hat;
  s.V0 = MatrixXd::Zero(K, N);
  s.V1 = MatrixXd::Zero(K, N);
  for (Index n : cpt0)
    s.V0.col(n - 1) = partial.V_hat.col(n - 1);
  for (Index n : cpt1)
    s.V1.col(n - 1) = partial.V_hat.col(n - 1);
  // Column 1 of V1 is the starting level; keep it.
  s.V1.col(0) = partial.V_hat.col(0);

  Rng rng(seed, 0x7761726d);
  for (ShrinkageSet* set : { &s.shrink0, &s.shrink1 }) {
    *set = partial.shrinkage;
    set->xi = rng.inv_gamma(1.0, 1.0 + 1.0 / set->tau);
    for (Index h = 0; h < K; ++h)
      set->eta(h) = rng.inv_gamma(1.0, 1.0 + 1.0 / set->lambda(h));
    for (Index n = 0; n < N; ++n)
      set->omega(n) = rng.inv_gamma(1.0, 1.0 + 1.0 / set->phi(n));
    for (Index n = 0; n < N; ++n)
      for (Index h = 0; h < K; ++h)
        set->zeta(h, n) = rng.inv_gamma(1.0, 1.0 + 1.0 / set->gamma(h, n));
  }
  s.validate();
  return s;
}

MatrixXd
median_sources(const PosteriorDraws& draws, ModelMode mode)
{
  std::vector<MatrixXd> S;
  S.reserve(draws.size());
  for (const Draw& d : draws) {
    MatrixXd s = cumsum_rows(d.V1);
    if (mode == ModelMode::full)
      s += d.V0;
    S.push_back(std::move(s));
  }
  return elementwise_median(S);
}

ChangeReport
run_abacus(const ObservationMatrix& Y, const AbacusOptions& options)
{
  if (options.rank < 1 || options.rank >= Y.channels())
    throw ShapeError("rank K must satisfy 1 <= K < P");

  auto stage_options = [&](std::string_view stage) {
    ChainOptions opt;
    opt.iterations = options.iterations;
    opt.burn_in = options.burn_in;
    opt.progress_interval = options.progress_interval;
    if (options.progress)
      opt.progress = [&options, stage](std::int64_t it, std::int64_t total) {
        options.progress(stage, it, total);
      };
    return opt;
  };

  // Partial model: changes of both types show up in V1, outliers as two
  // adjacent opposite-signed entries.
  const PartialFit partial = fit_partial(Y,
                                         options.rank,
                                         options.iterations,
                                         options.burn_in,
                                         options.seed,
                                         stage_options("partial"));
  const GSeries g_partial =
    level_shift_candidates(posterior_g(partial.draws, ChangeType::level_shift));
  const double partial_cutoff = kde_cutoff(g_partial, options.delta);
  const Separation split =
    separate_ao_ls(g_partial, detect_changes(g_partial, partial_cutoff));

  const ModelState warm = init_full_from_partial(
    partial, split.outliers, split.shifts, options.seed ^ kFullStream);
  const PosteriorDraws draws = run_chain(Y,
                                         options.rank,
                                         ModelMode::full,
                                         stage_options("full"),
                                         options.seed ^ kFullStream,
                                         warm);

  ChangeReport report;
  report.partial_cpt0 = split.outliers;
  report.partial_cpt1 = split.shifts;

  const GSeries g0 = posterior_g(draws, ChangeType::additive_outlier);
  const GSeries g1 = posterior_g(draws, ChangeType::level_shift);
  const GSeries g1_candidates = level_shift_candidates(g1);
  report.g0_hat = g0.values;
  report.g1_hat = g1.values;
  report.cutoff0 = kde_cutoff(g0, options.delta);
  report.cutoff1 = kde_cutoff(g1_candidates, options.delta);

  const std::vector<Index> ao = detect_changes(g0, report.cutoff0);
  const std::vector<Index> ls = detect_changes(g1_candidates, report.cutoff1);

  // An index flagged by both components goes to the larger magnitude.
  std::set_difference(ao.begin(), ao.end(), ls.begin(), ls.end(),
                      std::back_inserter(report.cpt0));
  std::set_difference(ls.begin(), ls.end(), ao.begin(), ao.end(),
                      std::back_inserter(report.cpt1));
  std::vector<Index> both;
  std::set_intersection(
    ao.begin(), ao.end(), ls.begin(), ls.end(), std::back_inserter(both));
  for (Index n : both) {
    if (std::abs(g0.values(n - 1)) > std::abs(g1.values(n - 1)))
      report.cpt0.push_back(n);
    else
      report.cpt1.push_back(n);
  }
  std::sort(report.cpt0.begin(), report.cpt0.end());
  std::sort(report.cpt1.begin(), report.cpt1.end());

  report.S_hat = median_sources(draws, ModelMode::full);
  report.M_hat = elementwise_median(collect(draws, &Draw::M));
  report.psi_hat = median_psi(draws);

  if (options.prune || options.prune_keep)
    report.cpt1 = prune_ls_dp(report.S_hat, report.cpt1, options.prune_keep);
  return report;
}

} // namespace abacus
