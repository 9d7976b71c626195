#include "abacus/detector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace abacus {

namespace {

// Median of a scratch buffer (reordered in place).
double
median_inplace(std::vector<double>& x)
{
  const std::size_t n = x.size();
  const auto mid = x.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(x.begin(), mid, x.end());
  if (n % 2)
    return *mid;
  const double lower = *std::max_element(x.begin(), mid);
  return 0.5 * (lower + *mid);
}

double
quantile_sorted(const std::vector<double>& sorted, double p)
{
  // Linear interpolation between order statistics (type 7).
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

} // namespace

VectorXd
extract_f(const MatrixXd& V)
{
  VectorXd f(V.cols());
  for (Index n = 0; n < V.cols(); ++n) {
    Index best = 0;
    for (Index h = 1; h < V.rows(); ++h)
      if (std::abs(V(h, n)) > std::abs(V(best, n)))
        best = h;
    f(n) = V.rows() > 0 ? V(best, n) : 0.0;
  }
  return f;
}

GSeries
posterior_g(const PosteriorDraws& draws, ChangeType d)
{
  if (draws.empty())
    throw std::invalid_argument("posterior_g needs at least one draw");
  const Index N = draws[0].V1.cols();
  MatrixXd f(N, static_cast<Index>(draws.size()));
  for (std::size_t k = 0; k < draws.size(); ++k) {
    const Draw& draw = draws[k];
    f.col(static_cast<Index>(k)) =
      extract_f(d == ChangeType::additive_outlier ? draw.V0 : draw.V1);
  }

  GSeries g{ VectorXd(N), d };
  std::vector<double> buf(draws.size());
  for (Index n = 0; n < N; ++n) {
    for (Index k = 0; k < f.cols(); ++k)
      buf[static_cast<std::size_t>(k)] = f(n, k);
    g.values(n) = median_inplace(buf);
  }
  return g;
}

MatrixXd
elementwise_median(const std::vector<MatrixXd>& samples)
{
  if (samples.empty())
    throw std::invalid_argument("elementwise_median needs samples");
  const Index rows = samples.front().rows(), cols = samples.front().cols();
  MatrixXd out(rows, cols);
  std::vector<double> buf(samples.size());
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) {
      for (std::size_t k = 0; k < samples.size(); ++k)
        buf[k] = samples[k](r, c);
      out(r, c) = median_inplace(buf);
    }
  }
  return out;
}

double
rule_of_thumb_bandwidth(const VectorXd& x)
{
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2)
    return 1e-12;
  const double mean = x.mean();
  const double sd = std::sqrt((x.array() - mean).square().sum() / (n - 1.0));
  std::vector<double> sorted(x.data(), x.data() + x.size());
  std::sort(sorted.begin(), sorted.end());
  const double iqr =
    quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0))
    spread = sd;
  return std::max(0.9 * spread * std::pow(n, -0.2), 1e-12);
}

DensityCurve
rectangular_kde(const VectorXd& abs_values, Index grid_size)
{
  DensityCurve out;
  const double top = abs_values.size() ? abs_values.maxCoeff() : 0.0;
  out.bandwidth = rule_of_thumb_bandwidth(abs_values);
  out.grid = VectorXd::LinSpaced(grid_size, 0.0, top);
  out.density = VectorXd::Zero(grid_size);
  if (!(top > 0.0))
    return out;

  // Linear binning: each value splits its unit mass between the two grid
  // points around it.
  const double step = top / static_cast<double>(grid_size - 1);
  VectorXd mass = VectorXd::Zero(grid_size);
  for (Index j = 0; j < abs_values.size(); ++j) {
    const double pos = abs_values(j) / step;
    const auto k = std::min(static_cast<Index>(pos), grid_size - 1);
    const double frac = pos - static_cast<double>(k);
    mass(k) += 1.0 - frac;
    if (k + 1 < grid_size)
      mass(k + 1) += frac;
  }

  // Rectangular kernel over the bins within one bandwidth.
  const double h = out.bandwidth;
  const auto reach = static_cast<Index>(std::floor(h / step));
  const double norm =
    1.0 / (2.0 * h * static_cast<double>(abs_values.size()));
  for (Index k = 0; k < grid_size; ++k) {
    if (mass(k) == 0.0)
      continue;
    const Index lo = std::max<Index>(0, k - reach);
    const Index hi = std::min<Index>(grid_size - 1, k + reach);
    out.density.segment(lo, hi - lo + 1).array() += mass(k) * norm;
  }
  return out;
}

double
kde_cutoff(const GSeries& g, double delta, Index grid_size)
{
  constexpr double none = std::numeric_limits<double>::infinity();
  const VectorXd a = g.values.cwiseAbs();
  if (a.size() < 2 || !(a.maxCoeff() > 0.0))
    return none;

  const DensityCurve kde = rectangular_kde(a, grid_size);
  const VectorXd& f = kde.density;
  Index k = 1;
  while (k + 1 < grid_size) {
    // Extend over a flat run [k, end).
    Index end = k + 1;
    while (end < grid_size && f(end) == f(k))
      ++end;
    if (end >= grid_size)
      break;
    if (f(k - 1) > f(k) && f(end) > f(k) && f(k) < delta)
      return kde.grid(k);
    k = end;
  }
  return none;
}

std::vector<Index>
detect_changes(const GSeries& g, double cutoff)
{
  std::vector<Index> out;
  for (Index n = 0; n < g.values.size(); ++n)
    if (std::abs(g.values(n)) > cutoff)
      out.push_back(n + 1);
  return out;
}

Separation
separate_ao_ls(const GSeries& g, const std::vector<Index>& cpt)
{
  for (std::size_t i = 0; i < cpt.size(); ++i) {
    if (cpt[i] < 1 || cpt[i] > g.values.size())
      throw std::out_of_range("change point index outside 1..N");
    if (i > 0 && cpt[i] <= cpt[i - 1])
      throw std::invalid_argument("change points must be strictly increasing");
  }

  Separation out;
  std::size_t i = 0;
  while (i < cpt.size()) {
    const bool adjacent = i + 1 < cpt.size() && cpt[i + 1] - cpt[i] == 1;
    if (adjacent && g.values(cpt[i] - 1) * g.values(cpt[i + 1] - 1) < 0.0) {
      out.outliers.push_back(cpt[i]);
      i += 2;
    } else {
      out.shifts.push_back(cpt[i]);
      i += 1;
    }
  }
  return out;
}

SegmentationPath
optimal_segmentations(const MatrixXd& S, const std::vector<Index>& candidates)
{
  const Index N = S.cols();
  const std::size_t L = candidates.size();
  for (std::size_t j = 0; j < L; ++j)
    if (candidates[j] < 2 || candidates[j] > N ||
        (j > 0 && candidates[j] <= candidates[j - 1]))
      throw std::invalid_argument(
        "candidates must be strictly increasing within 2..N");

  // Prefix sums of values and squares, per row.
  MatrixXd sum = MatrixXd::Zero(S.rows(), N + 1);
  MatrixXd sq = MatrixXd::Zero(S.rows(), N + 1);
  for (Index n = 0; n < N; ++n) {
    sum.col(n + 1) = sum.col(n) + S.col(n);
    sq.col(n + 1) = sq.col(n) + S.col(n).cwiseAbs2();
  }
  auto cost = [&](Index a, Index b) { // columns [a, b)
    const double len = static_cast<double>(b - a);
    const VectorXd s = sum.col(b) - sum.col(a);
    return std::max((sq.col(b) - sq.col(a)).sum() - s.squaredNorm() / len, 0.0);
  };

  // Boundary j: 0 -> column 0, j in 1..L -> candidate j, L+1 -> column N.
  std::vector<Index> bound(L + 2);
  bound[0] = 0;
  for (std::size_t j = 0; j < L; ++j)
    bound[j + 1] = candidates[j] - 1;
  bound[L + 1] = N;

  constexpr double inf = std::numeric_limits<double>::infinity();
  // best[m][j]: cost of [0, bound[j]) using m selected candidates < j.
  std::vector<std::vector<double>> best(L + 1,
                                        std::vector<double>(L + 2, inf));
  std::vector<std::vector<std::size_t>> from(
    L + 1, std::vector<std::size_t>(L + 2, 0));
  for (std::size_t j = 1; j <= L + 1; ++j)
    best[0][j] = cost(0, bound[j]);
  for (std::size_t m = 1; m <= L; ++m) {
    for (std::size_t j = m + 1; j <= L + 1; ++j) {
      for (std::size_t i = m; i < j; ++i) {
        const double c = best[m - 1][i] + cost(bound[i], bound[j]);
        if (c < best[m][j]) {
          best[m][j] = c;
          from[m][j] = i;
        }
      }
    }
  }

  SegmentationPath path;
  for (std::size_t m = 0; m <= L; ++m) {
    path.error.push_back(best[m][L + 1]);
    std::vector<Index> chosen;
    std::size_t j = L + 1;
    for (std::size_t k = m; k > 0; --k) {
      j = from[k][j];
      chosen.push_back(candidates[j - 1]);
    }
    std::reverse(chosen.begin(), chosen.end());
    path.selections.push_back(std::move(chosen));
  }
  return path;
}

std::vector<Index>
prune_ls_dp(const MatrixXd& S,
            const std::vector<Index>& candidates,
            std::optional<Index> max_keep)
{
  if (candidates.empty())
    return {};
  const SegmentationPath path = optimal_segmentations(S, candidates);
  const std::size_t L = candidates.size();

  if (max_keep)
    return path.selections[std::min<std::size_t>(
      static_cast<std::size_t>(std::max<Index>(*max_keep, 0)), L)];

  // The curve is extended flat past m = L so that the last step can be an
  // elbow too.
  const auto& e = path.error;
  auto at = [&](std::size_t m) { return e[std::min(m, L)]; };
  const double tol = 1e-12 * std::max(e[0], 1.0);
  std::size_t elbow = 0;
  double sharpest = tol;
  for (std::size_t m = 1; m <= L; ++m) {
    const double curvature = at(m - 1) - 2.0 * at(m) + at(m + 1);
    if (curvature > sharpest) {
      sharpest = curvature;
      elbow = m;
    }
  }
  return path.selections[elbow];
}

} // namespace abacus
