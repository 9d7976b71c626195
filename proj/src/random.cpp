#include "abacus/random.hpp"

#include <algorithm>
#include <cmath>

namespace abacus {

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
{
  std::seed_seq seq{ static_cast<std::uint32_t>(seed),
                     static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(stream),
                     static_cast<std::uint32_t>(stream >> 32),
                     0x61626163u };
  engine_.seed(seq);
}

double
Rng::uniform(double lo, double hi)
{
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

std::int64_t
Rng::uniform_int(std::int64_t lo, std::int64_t hi)
{
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
}

double
Rng::gamma(double shape)
{
  return std::gamma_distribution<double>(shape, 1.0)(engine_);
}

double
Rng::inv_gamma(double shape, double scale)
{
  const double g = gamma(shape);
  const double x = scale / g;
  if (std::isnan(x))
    return min_positive;
  return std::clamp(x, min_positive, max_positive);
}

Eigen::VectorXd
Rng::normal_vector(Eigen::Index n)
{
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i)
    z(i) = normal_(engine_);
  return z;
}

} // namespace abacus
