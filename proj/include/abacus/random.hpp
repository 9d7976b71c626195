#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace abacus {

//! A single pseudo-random stream. Chains derive one stream each from the
//! user seed and a stream id, so runs are reproducible for a fixed seed.
class Rng
{
public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi);
  //! Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  double gamma(double shape);

  //! Inverse-gamma draw (shape, scale), clamped to
  //! [min_positive, max_positive] so that products of scales stay finite.
  double inv_gamma(double shape, double scale);

  Eigen::VectorXd normal_vector(Eigen::Index n);

  std::mt19937_64& engine() { return engine_; }

  static constexpr double min_positive = 1e-60;
  static constexpr double max_positive = 1e60;

private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

} // namespace abacus
