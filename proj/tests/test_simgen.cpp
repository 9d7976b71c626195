#include "abacus/simgen.hpp"

#include <doctest.h>

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <set>

using namespace abacus;
using namespace abacus::sim;

namespace {

SimConfig
config(std::uint64_t seed)
{
  SimConfig c;
  c.P = 10;
  c.N = 200;
  c.r = 3;
  c.n_ao = 2;
  c.n_ls = 2;
  c.noise = { 0.1, 1.0 };
  c.magnitude = { 3.0, 5.0 };
  c.seed = seed;
  return c;
}

} // namespace

TEST_CASE("admissible locations")
{
  CHECK(admissible_locations(10) == std::vector<Index>{ 2, 4, 6, 8 });
  CHECK(admissible_locations(9) == std::vector<Index>{ 2, 4, 6, 8 });
  CHECK(admissible_locations(3) == std::vector<Index>{ 2 });
  CHECK(admissible_locations(200).size() == 99);
}

TEST_CASE("validate")
{
  CHECK_NOTHROW(validate(config(1)));
  SimConfig c = config(1);
  c.N = 10;
  c.n_ao = 2;
  c.n_ls = 2;
  CHECK_NOTHROW(validate(c));
  c.n_ls = 3;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);

  c = config(1);
  c.r = 11;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = config(1);
  c.noise = { 0.0, 1.0 };
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = config(1);
  c.magnitude = { 2.0, 1.0 };
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = config(1);
  c.n_ao = -1;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  CHECK_THROWS_AS(generate(c), std::invalid_argument);
}

TEST_CASE("no changes gives constant sources")
{
  SimConfig c = config(4);
  c.n_ao = c.n_ls = 0;
  const auto [Y, truth] = generate(c);
  CHECK(truth.events.empty());
  for (Index h = 0; h < c.r; ++h)
    CHECK((truth.S.row(h).array() == truth.S(h, 0)).all());
  CHECK(Y.channels() == 10);
  CHECK(Y.length() == 200);
}

TEST_CASE("structure of generated data")
{
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    CAPTURE(seed);
    SimConfig c = config(seed);
    if (seed % 2 == 0) {
      c.N = 30;
      c.n_ao = 5;
      c.n_ls = 4;
    }
    const auto [Y, t] = generate(c);

    CHECK(t.M.rows() == c.P);
    CHECK(t.M.cols() == c.r);
    CHECK(t.M.minCoeff() >= -1.0);
    CHECK(t.M.maxCoeff() <= 1.0);
    CHECK(t.psi.minCoeff() >= c.noise.lo);
    CHECK(t.psi.maxCoeff() <= c.noise.hi);

    CHECK(static_cast<Index>(t.ao_locs.size()) == c.n_ao);
    CHECK(static_cast<Index>(t.ls_locs.size()) == c.n_ls);
    std::set<Index> all(t.ao_locs.begin(), t.ao_locs.end());
    all.insert(t.ls_locs.begin(), t.ls_locs.end());
    CHECK(static_cast<Index>(all.size()) == c.n_ao + c.n_ls);

    Index prev = -10;
    for (const ChangeEvent& e : t.events) {
      CHECK(e.index % 2 == 0);
      CHECK(e.index >= 2);
      CHECK(e.index <= c.N - 1);
      CHECK(e.index - prev >= 2);
      prev = e.index;
      CHECK(!e.signals.empty());
      CHECK(static_cast<Index>(e.signals.size()) <= c.r);
      CHECK(e.signals.size() == e.magnitudes.size());
      for (double m : e.magnitudes) {
        CHECK(std::abs(m) >= c.magnitude.lo);
        CHECK(std::abs(m) <= c.magnitude.hi);
      }
    }

    // Breakpoints only at change locations; outliers return to the level.
    for (Index h = 0; h < c.r; ++h)
      for (Index n = 1; n < c.N; ++n)
        if (t.S(h, n) != t.S(h, n - 1))
          CHECK(all.count(n + 1) + all.count(n) > 0);
    for (const ChangeEvent& e : t.events) {
      if (e.type != ChangeType::additive_outlier)
        continue;
      const Index n = e.index - 1;
      for (std::size_t j = 0; j < e.signals.size(); ++j) {
        const Index h = e.signals[j];
        CHECK(t.S(h, n - 1) == doctest::Approx(t.S(h, n + 1)));
        CHECK(t.S(h, n) - t.S(h, n - 1) == doctest::Approx(e.magnitudes[j]));
      }
    }
  }
}

TEST_CASE("sources have full row rank when every signal changes")
{
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto [Y, t] = generate(config(seed));
    std::set<Index> touched;
    for (const ChangeEvent& e : t.events)
      touched.insert(e.signals.begin(), e.signals.end());
    if (static_cast<Index>(touched.size()) < t.S.rows())
      continue;
    ++checked;
    Eigen::JacobiSVD<MatrixXd> svd(t.S);
    CAPTURE(seed);
    CHECK(svd.singularValues().minCoeff() > 1e-8);
  }
  CHECK(checked >= 10);
}

TEST_CASE("noise matches the model residual")
{
  SimConfig c = config(8);
  c.P = 4;
  c.N = 4000;
  c.noise = { 0.5, 2.0 };
  const auto [Y, t] = generate(c);
  const MatrixXd E = Y.values() - t.M * t.S;
  for (Index i = 0; i < c.P; ++i) {
    const double var = E.row(i).squaredNorm() / static_cast<double>(c.N);
    CHECK(var == doctest::Approx(t.psi(i)).epsilon(0.1));
  }
}

TEST_CASE("deterministic under seed")
{
  const auto [Y1, t1] = generate(config(21));
  const auto [Y2, t2] = generate(config(21));
  const auto [Y3, t3] = generate(config(22));
  CHECK(Y1.values() == Y2.values());
  CHECK(t1.S == t2.S);
  CHECK(t1.ao_locs == t2.ao_locs);
  CHECK(Y1.values() != Y3.values());
}
