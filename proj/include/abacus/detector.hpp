#pragma once

#include "abacus/model.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace abacus {

//! Posterior-median change magnitude per index for one change type.
struct GSeries
{
  VectorXd values;
  ChangeType type = ChangeType::level_shift;
};

//! Signed entry of largest magnitude in each column of V; ties go to the
//! smallest row index.
VectorXd
extract_f(const MatrixXd& V);

//! Median over draws of extract_f(V(d)). Even draw counts use the midpoint of
//! the two central order statistics.
GSeries
posterior_g(const PosteriorDraws& draws, ChangeType d);

//! Elementwise median of a sequence of equally shaped matrices.
MatrixXd
elementwise_median(const std::vector<MatrixXd>& samples);

inline constexpr double default_delta = 1e-10;
inline constexpr Index default_kde_grid = 512;

//! Rectangular-kernel density of a sample evaluated on a uniform grid.
struct DensityCurve
{
  VectorXd grid;
  VectorXd density;
  double bandwidth = 0.0;
};

//! Rule-of-thumb bandwidth 0.9 min(sd, IQR/1.34) n^-1/5, falling back to sd
//! when the robust spread is zero, floored at 1e-12.
double
rule_of_thumb_bandwidth(const VectorXd& x);

//! Binned density of |g| on `grid_size` points spanning [0, max |g|]: values
//! are linearly binned onto the grid, then spread by the rectangular kernel
//! 1/(2h) on [-h, h]. A value always leaves mass on its neighbouring grid
//! points, however small h is relative to the grid step.
DensityCurve
rectangular_kde(const VectorXd& abs_values, Index grid_size = default_kde_grid);

//! Abscissa of the first interior local minimum of the |g| density whose
//! value is below `delta`. A minimum may be a flat run of equal values
//! bordered by strictly larger ones; its left end is returned. Returns +inf
//! when no minimum qualifies or |g| is identically zero.
double
kde_cutoff(const GSeries& g,
           double delta = default_delta,
           Index grid_size = default_kde_grid);

//! 1-based indices n with |g_n| > cutoff, ascending.
std::vector<Index>
detect_changes(const GSeries& g, double cutoff);

struct Separation
{
  std::vector<Index> outliers; // cpt0
  std::vector<Index> shifts;   // cpt1
};

//! Splits sorted 1-based change points: two consecutive indices whose g
//! values have opposite signs form one additive outlier at the first index;
//! every other index is a level shift. Throws on unsorted input.
Separation
separate_ao_ls(const GSeries& g, const std::vector<Index>& cpt);

//! Minimal total within-segment squared error of the rows of S for each
//! number m = 0..|candidates| of selected breakpoints, with the argmin sets.
struct SegmentationPath
{
  std::vector<double> error;                  // indexed by m
  std::vector<std::vector<Index>> selections; // indexed by m, 1-based
};

SegmentationPath
optimal_segmentations(const MatrixXd& S, const std::vector<Index>& candidates);

//! Keeps the subset at the elbow of the error-vs-m curve (largest positive
//! second difference, m = 0 when there is none) or the best subset of size
//! `max_keep` when given.
std::vector<Index>
prune_ls_dp(const MatrixXd& S,
            const std::vector<Index>& candidates,
            std::optional<Index> max_keep = std::nullopt);

} // namespace abacus
