// One PASS/FAIL/SKIP line per acceptance criterion. Exit status is nonzero
// when any criterion fails.

#include "abacus/cli_io.hpp"
#include "abacus/evalkit.hpp"
#include "abacus/pipeline.hpp"
#include "abacus/sampler.hpp"
#include "abacus/simgen.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace abacus;
using fixture::max_abs;
using fixture::random_state;
using fixture::random_y;
namespace fs = std::filesystem;

namespace {

struct Outcome
{
  enum Status
  {
    pass,
    fail,
    skip
  } status;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double
seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string
fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0)
{
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// Relative error against a reference, floored at unit scale.
double
rel(double got, double want)
{
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

double
rel(const MatrixXd& got, const MatrixXd& want)
{
  return max_abs(got - want) / std::max(1.0, max_abs(want));
}

constexpr ChangeType kTypes[] = { ChangeType::level_shift,
                                  ChangeType::additive_outlier };

// ---------------------------------------------------------------------------

Outcome
conditional_suite()
{
  const auto t0 = Clock::now();
  double worst = 0.0;
  long checks = 0;
  auto track = [&](double e) {
    worst = std::max(worst, e);
    ++checks;
  };

  for (unsigned seed = 1; seed <= 60; ++seed) {
    const Index P = 2 + seed % 3;
    const Index K = 1 + seed % (P - 1);
    const Index N = 3 + seed % 6;
    for (ModelMode mode : { ModelMode::full, ModelMode::partial }) {
      const ModelState s = random_state(P, K, N, mode, seed);
      const ObservationMatrix Y = random_y(P, N, seed);
      const MatrixXd Yv = Y.values();
      const MatrixXd S = oracle::dense_sources(s);

      const auto mix = mixing_conditional(s, Y, compose_sources(s));
      const MatrixXd Finv = mix.F.inverse();
      for (Index i = 0; i < P; ++i) {
        const auto g = oracle::mixing_row(s, Yv, i);
        track(rel(mix.mean.row(i).transpose(), g.mean));
        track(rel(s.psi(i) * Finv, g.cov));

        const auto nc = noise_conditional(s, Y, compose_sources(s), i);
        const VectorXd r = Yv.row(i).transpose() - (s.M.row(i) * S).transpose();
        double prior = 0.0;
        for (Index h = 0; h < K; ++h)
          prior += s.M(i, h) * s.M(i, h) / (2.0 * oracle::mixing_scale(s, h));
        track(rel(nc.shape, 1.0 + N / 2.0 + K / 2.0));
        track(rel(nc.scale, 1.0 + 0.5 * r.squaredNorm() + prior));
      }

      for (ChangeType d : kTypes) {
        if (!s.uses(d))
          continue;
        for (Index n = 0; n < N; ++n) {
          const auto c = v_column_conditional(s, Y, d, n);
          const auto g = oracle::v_column(s, Yv, d, n);
          track(rel(c.mean, g.mean));
          track(rel(MatrixXd(c.precision.inverse()), g.cov));
        }

        const ShrinkageSet& sh = s.shrinkage(d);
        const MatrixXd& V = s.V(d);
        auto m_scale = [&](Index i, Index h) {
          return oracle::mixing_scale(s, h) * s.psi(i);
        };

        double G = 0.0;
        for (Index i = 0; i < P; ++i)
          for (Index h = 0; h < K; ++h)
            G += s.M(i, h) * s.M(i, h) * sh.tau / (2.0 * m_scale(i, h));
        for (Index h = 0; h < K; ++h)
          for (Index n = 0; n < N; ++n)
            G += V(h, n) * V(h, n) /
                 (2.0 * sh.lambda(h) * sh.phi(n) * sh.gamma(h, n));
        const auto gc = global_scale_conditional(s, d);
        track(rel(gc.shape, (1.0 + K * (P + N)) / 2.0));
        track(rel(gc.scale, 1.0 / sh.xi + G));

        for (Index h = 0; h < K; ++h) {
          double H = 0.0;
          for (Index i = 0; i < P; ++i)
            H += s.M(i, h) * s.M(i, h) * sh.lambda(h) / (2.0 * m_scale(i, h));
          for (Index n = 0; n < N; ++n)
            H += V(h, n) * V(h, n) / (2.0 * sh.tau * sh.phi(n) * sh.gamma(h, n));
          const auto rc = row_scale_conditional(s, d, h);
          track(rel(rc.shape, (1.0 + P + N) / 2.0));
          track(rel(rc.scale, 1.0 / sh.eta(h) + H));
        }

        for (Index n = 0; n < N; ++n) {
          double C = 0.0;
          for (Index h = 0; h < K; ++h)
            C += V(h, n) * V(h, n) /
                 (2.0 * sh.lambda(h) * sh.gamma(h, n) * sh.tau);
          const auto cc = column_scale_conditional(s, d, n);
          track(rel(cc.shape, (1.0 + K) / 2.0));
          track(rel(cc.scale, 1.0 / sh.omega(n) + C));
          for (Index h = 0; h < K; ++h) {
            const double E =
              V(h, n) * V(h, n) / (2.0 * sh.lambda(h) * sh.phi(n) * sh.tau);
            const auto ec = element_scale_conditional(s, d, h, n);
            track(rel(ec.shape, 1.0));
            track(rel(ec.scale, 1.0 / sh.zeta(h, n) + E));
          }
        }

        const auto ac = auxiliary_conditional(sh.tau);
        track(rel(ac.shape, 1.0));
        track(rel(ac.scale, 1.0 + 1.0 / sh.tau));
      }
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = worst <= 1e-8 && secs < 10.0;
  return { ok ? Outcome::pass : Outcome::fail,
           fmt("%.0f parameters, max relative error %.2e (tol 1e-8), %.2f s "
               "(limit 10 s)",
               static_cast<double>(checks), worst, secs) };
}

Outcome
difference_operator_equivalence()
{
  double worst = 0.0;
  long columns = 0;
  for (Index N = 3; N <= 50; ++N) {
    const Index P = 2 + N % 3, K = 1 + N % (P - 1);
    ModelState s =
      random_state(P, K, N, ModelMode::full, static_cast<unsigned>(N) + 100u);
    const ObservationMatrix Y = random_y(P, N, static_cast<unsigned>(N) + 100u);
    Rng rng(static_cast<std::uint64_t>(N));
    ColumnSweep sweep(s, Y, ChangeType::level_shift);
    while (!sweep.done()) {
      const Index n = sweep.column();
      const auto fast = sweep.conditional();
      const auto dense = oracle::v_column(s, Y.values(), ChangeType::level_shift, n);
      worst = std::max(worst, rel(fast.mean, dense.mean));
      worst = std::max(worst, rel(MatrixXd(fast.precision.inverse()), dense.cov));
      const auto direct = v_column_conditional(s, Y, ChangeType::level_shift, n);
      worst = std::max(worst, rel(direct.mean, dense.mean));
      ++columns;
      sweep.draw(rng);
    }
    worst = std::max(worst,
                     rel(compose_sources(s), oracle::dense_sources(s)));
  }
  return { worst <= 1e-10 ? Outcome::pass : Outcome::fail,
           fmt("%.0f level-shift columns over N = 3..50, max relative error "
               "%.2e (tol 1e-10)",
               static_cast<double>(columns), worst) };
}

// Marginal-conditional draws come straight from the prior; each
// successive-conditional chain starts from a prior draw and alternates data
// simulation with one Gibbs sweep, so every state is a draw from the prior
// when the sampler is correct.
Outcome
geweke()
{
  const auto t0 = Clock::now();
  const Index P = 3, K = 2, N = 8;
  const int chains = 200, length = 100;
  const long total = static_cast<long>(chains) * length;
  const ObservationMatrix Y0(MatrixXd::Zero(P, N));
  constexpr int Q = 3;
  auto stats = [](const ModelState& s) {
    return std::array<double, Q>{ std::log(s.shrink1.tau),
                                  std::log(s.shrink1.lambda(0)),
                                  std::log(s.shrink1.lambda(1)) };
  };

  std::array<double, 2 * Q> sum{}, sum2{};
  for (long k = 0; k < total; ++k) {
    const auto v = stats(init_state(Y0, K, ModelMode::full, 500000 + k));
    for (int q = 0; q < Q; ++q)
      for (int p = 0; p < 2; ++p) {
        const double x = std::pow(v[q], p + 1);
        sum[2 * q + p] += x;
        sum2[2 * q + p] += x * x;
      }
  }

  std::array<std::vector<double>, 2 * Q> chain_means;
  for (int c = 0; c < chains; ++c) {
    ModelState s = init_state(Y0, K, ModelMode::full, static_cast<std::uint64_t>(c));
    Rng rng(77, static_cast<std::uint64_t>(c));
    std::array<double, 2 * Q> acc{};
    for (int t = 0; t < length; ++t) {
      MatrixXd Y = s.M * compose_sources(s);
      for (Index i = 0; i < P; ++i)
        for (Index n = 0; n < N; ++n)
          Y(i, n) += std::sqrt(s.psi(i)) * rng.normal();
      gibbs_sweep(s, ObservationMatrix(Y), rng);
      const auto v = stats(s);
      for (int q = 0; q < Q; ++q)
        for (int p = 0; p < 2; ++p)
          acc[2 * q + p] += std::pow(v[q], p + 1);
    }
    for (int k = 0; k < 2 * Q; ++k)
      chain_means[k].push_back(acc[k] / length);
  }

  const char* names[2 * Q] = { "E[log tau]",      "E[log^2 tau]",
                               "E[log lambda1]",  "E[log^2 lambda1]",
                               "E[log lambda2]",  "E[log^2 lambda2]" };
  double worst = 0.0;
  std::string detail;
  for (int k = 0; k < 2 * Q; ++k) {
    const double ma = sum[k] / total;
    const double sa = std::sqrt((sum2[k] / total - ma * ma) / total);
    double mb = 0.0;
    for (double x : chain_means[k])
      mb += x;
    mb /= chains;
    double vb = 0.0;
    for (double x : chain_means[k])
      vb += (x - mb) * (x - mb);
    const double sb = std::sqrt(vb / (chains - 1) / chains);
    const double z = (ma - mb) / std::sqrt(sa * sa + sb * sb);
    worst = std::max(worst, std::abs(z));
    detail += std::string(names[k]) + fmt(" z=%.2f; ", z);
  }
  const double secs = seconds_since(t0);
  const bool ok = worst < 4.0 && secs < 300.0;
  return { ok ? Outcome::pass : Outcome::fail,
           detail + fmt("max |z| %.2f (limit 4), %.0f x %.0f samples, %.1f s",
                        worst, chains, length, secs) };
}

// ---------------------------------------------------------------------------

struct Replicate
{
  sim::GroundTruth truth;
  MatrixXd Y;
  ChangeReport report;
};

sim::SimConfig
replicate_config(std::uint64_t seed)
{
  sim::SimConfig c;
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

AbacusOptions
replicate_options(Index rank)
{
  AbacusOptions o;
  o.rank = rank;
  o.iterations = 1500;
  o.burn_in = 250;
  o.seed = 7;
  return o;
}

std::vector<Replicate>
run_replicates(double& secs)
{
  const auto t0 = Clock::now();
  std::vector<Replicate> out;
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    auto [Y, truth] = sim::generate(replicate_config(seed));
    Replicate r;
    r.report = run_abacus(Y, replicate_options(5));
    r.truth = std::move(truth);
    r.Y = Y.values();
    out.push_back(std::move(r));
  }
  secs = seconds_since(t0);
  return out;
}

Outcome
detection_power(const std::vector<Replicate>& reps, double secs)
{
  double lp = 0, lr = 0, ap = 0, ar = 0;
  for (const Replicate& r : reps) {
    const auto ls = eval::precision_recall(r.truth.ls_locs, r.report.cpt1, 3);
    const auto ao = eval::precision_recall(r.truth.ao_locs, r.report.cpt0, 3);
    lp += ls.precision;
    lr += ls.recall;
    ap += ao.precision;
    ar += ao.recall;
  }
  const double n = static_cast<double>(reps.size());
  lp /= n;
  lr /= n;
  ap /= n;
  ar /= n;
  const bool ok = lp >= 0.8 && lr >= 0.8 && ar >= 0.6 && secs < 1800.0;
  return { ok ? Outcome::pass : Outcome::fail,
           fmt("LS precision %.3f recall %.3f (>= 0.8), AO recall %.3f (>= 0.6), "
               "AO precision %.3f; ",
               lp, lr, ar, ap) +
             fmt("10 replicates at 1500 iterations in %.1f s (limit 1800 s)", secs) };
}

Outcome
robustness_to_k(const Replicate& first)
{
  std::vector<ChangeReport> runs;
  std::vector<Index> ks{ 3, 5, 7 };
  for (Index k : ks)
    runs.push_back(k == 5 ? first.report : run_abacus(ObservationMatrix{ first.Y }, replicate_options(k)));

  double min_jaccard = 1.0;
  std::string detail;
  for (std::size_t a = 0; a < runs.size(); ++a)
    for (std::size_t b = a + 1; b < runs.size(); ++b) {
      const double j = eval::jaccard(runs[a].cpt1, runs[b].cpt1, 3);
      min_jaccard = std::min(min_jaccard, j);
      detail += fmt("J(K=%.0f,K=%.0f)=%.3f; ", static_cast<double>(ks[a]),
                    static_cast<double>(ks[b]), j);
    }
  double lo = 1.0, hi = 0.0;
  for (std::size_t a = 0; a < runs.size(); ++a) {
    const double e = eval::epsilon_S(first.truth.S, runs[a].S_hat);
    lo = std::min(lo, e);
    hi = std::max(hi, e);
    detail += fmt("eps_S(K=%.0f)=%.3f; ", static_cast<double>(ks[a]), e);
  }
  const bool ok = min_jaccard >= 0.6 && hi - lo < 0.1;
  return { ok ? Outcome::pass : Outcome::fail,
           detail + fmt("min Jaccard %.3f (>= 0.6), eps_S spread %.3f (< 0.1)",
                        min_jaccard, hi - lo) };
}

Outcome
model_recovery(const std::vector<Replicate>& reps)
{
  double es = 0.0, ee = 0.0;
  for (const Replicate& r : reps) {
    es += eval::epsilon_S(r.truth.S, r.report.S_hat);
    ee += eval::epsilon_E(r.truth.psi, r.report.psi_hat);
  }
  es /= static_cast<double>(reps.size());
  ee /= static_cast<double>(reps.size());
  const bool ok = es <= 0.1 && ee <= 1.0;
  return { ok ? Outcome::pass : Outcome::fail,
           fmt("mean eps_S %.3f (<= 0.1), mean eps_E %.4f (<= 1.0)", es, ee) };
}

// Needs a prepared day of the household power data (7 channels x 1440
// minutes, CSV) and a changes file of reference level shifts.
Outcome
real_data()
{
  const char* data = std::getenv("ABACUS_POWER_DATA");
  const char* truth = std::getenv("ABACUS_POWER_TRUTH");
  if (!data || !truth || !fs::exists(data) || !fs::exists(truth))
    return { Outcome::skip,
             "set ABACUS_POWER_DATA (7 x 1440 CSV) and ABACUS_POWER_TRUTH "
             "(changes file) to run" };
  const auto t0 = Clock::now();
  const ObservationMatrix Y =
    io::load_csv(data, io::Orientation::channels_as_rows, true);
  AbacusOptions o;
  o.rank = 5;
  o.prune = true;
  const ChangeReport r = run_abacus(Y, o);
  const auto [ao, ls] = io::split_changes(io::read_changes(truth));
  const auto pr = eval::precision_recall(ls, r.cpt1, 3);
  const bool ok = pr.precision >= 0.85 && pr.recall >= 0.74;
  return { ok ? Outcome::pass : Outcome::fail,
           fmt("LS precision %.3f (>= 0.85), recall %.3f (>= 0.74), %.0f s",
               pr.precision, pr.recall, seconds_since(t0)) };
}

std::string
read_bytes(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome
determinism()
{
  const fs::path root =
    fs::temp_directory_path() / ("abacus_accept_" + std::to_string(std::random_device{}()));
  fs::create_directories(root);
  const std::string cli = ABACUS_CLI_PATH;
  auto sh = [&](const std::string& args, const fs::path& log) {
    const std::string cmd =
      "\"" + cli + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    return std::system(cmd.c_str());
  };

  std::vector<std::string> differing;
  long files = 0;
  auto compare_dirs = [&](const fs::path& a, const fs::path& b) {
    for (const auto& entry : fs::directory_iterator(a)) {
      const fs::path other = b / entry.path().filename();
      ++files;
      if (!fs::exists(other) || read_bytes(entry.path()) != read_bytes(other))
        differing.push_back(entry.path().filename().string());
    }
  };

  bool ran = true;
  for (const char* tag : { "1", "2" }) {
    const fs::path run = root / tag;
    fs::create_directories(run);
    ran &= sh("simulate --p 10 --n 200 --r 3 --ao 2 --ls 2 --seed 1 --out \"" +
                (run / "sim").string() + "\"",
              run / "simulate.log") == 0;
    ran &= sh("detect \"" + (run / "sim" / "data.csv").string() +
                "\" --seed 7 --iters 1500 --burnin 250 --out \"" +
                (run / "det").string() + "\"",
              run / "detect.log") == 0;
    ran &= sh("evaluate --truth \"" + (run / "sim" / "truth.csv").string() +
                "\" --est \"" + (run / "det" / "changes.csv").string() +
                "\" --truth-sources \"" + (run / "sim" / "sources.csv").string() +
                "\" --est-sources \"" + (run / "det" / "sources.csv").string() +
                "\" --w 3",
              run / "evaluate.log") == 0;
  }
  if (ran) {
    compare_dirs(root / "1" / "sim", root / "2" / "sim");
    compare_dirs(root / "1" / "det", root / "2" / "det");
    for (const char* log : { "detect.log", "evaluate.log" }) {
      ++files;
      std::string a = read_bytes(root / "1" / log), b = read_bytes(root / "2" / log);
      // The detect log names its output directory.
      if (std::string(log) == "detect.log") {
        a = a.substr(0, a.rfind("written to"));
        b = b.substr(0, b.rfind("written to"));
      }
      if (a != b)
        differing.push_back(log);
    }
  }
  std::error_code ec;
  fs::remove_all(root, ec);

  if (!ran)
    return { Outcome::fail, "a CLI run exited with a nonzero status" };
  std::string detail = fmt("%.0f outputs compared", static_cast<double>(files));
  for (const std::string& d : differing)
    detail += ", differs: " + d;
  return { differing.empty() ? Outcome::pass : Outcome::fail, detail };
}

MatrixXd
gaussian(Index rows, Index cols, std::mt19937_64& gen)
{
  std::normal_distribution<double> z;
  return MatrixXd::NullaryExpr(rows, cols, [&] { return z(gen); });
}

Outcome
metric_examples()
{
  std::vector<std::string> failed;
  auto expect = [&](bool ok, const char* what) {
    if (!ok)
      failed.push_back(what);
  };

  const auto pr = eval::precision_recall({ 10, 50 }, { 11, 49, 80 }, 3);
  expect(pr.precision == 2.0 / 3.0 && pr.recall == 1.0, "precision/recall example");
  for (Index w : { 0, 1, 3, 7 }) {
    const auto same = eval::precision_recall({ 4, 20, 33 }, { 4, 20, 33 }, w);
    expect(same.precision == 1.0 && same.recall == 1.0, "est = truth");
  }

  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<int> count(0, 6);
  std::uniform_int_distribution<Index> where(1, 30);
  auto indices = [&] {
    std::vector<Index> v(static_cast<std::size_t>(count(gen)));
    for (Index& x : v)
      x = where(gen);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  bool matching_ok = true;
  for (int t = 0; t < 1000; ++t) {
    const auto a = indices(), b = indices();
    matching_ok &= eval::count_matches(a, b, t % 4) == oracle::max_matching(a, b, t % 4);
  }
  expect(matching_ok, "maximum matching");

  const MatrixXd M = gaussian(10, 3, gen);
  expect(std::abs(eval::epsilon_M(M, M)) == 0.0, "eps_M identity");
  double worst_rotation = 0.0;
  for (int t = 0; t < 100; ++t) {
    const MatrixXd Q = Eigen::HouseholderQR<MatrixXd>(gaussian(3, 3, gen)).householderQ();
    worst_rotation = std::max(worst_rotation, std::abs(eval::epsilon_M(M, M * Q)));
    const MatrixXd Mh = gaussian(10, 3, gen);
    worst_rotation = std::max(
      worst_rotation, std::abs(eval::epsilon_M(M, Mh * Q) - eval::epsilon_M(M, Mh)));
  }
  expect(worst_rotation <= 1e-10, "eps_M rotation invariance");

  const MatrixXd S = gaussian(3, 50, gen);
  expect(std::abs(eval::epsilon_S(S, S)) <= 1e-15, "eps_S identity");
  MatrixXd flipped(3, 50);
  flipped << -S.row(1), S.row(2), -S.row(0);
  expect(std::abs(eval::epsilon_S(S, flipped)) <= 1e-15, "eps_S sign and label");
  bool greedy_ok = true;
  for (int t = 0; t < 100; ++t) {
    const MatrixXd Sh = gaussian(3, 50, gen) + 0.8 * S;
    const double got = eval::epsilon_S(S, Sh);
    std::vector<Index> perm{ 0, 1, 2 };
    double best = 1e300;
    do {
      double v = 0.0;
      for (Index i = 0; i < 3; ++i)
        v += 1.0 - std::abs(eval::pearson(S.row(i).transpose(),
                                          Sh.row(perm[static_cast<std::size_t>(i)]).transpose()));
      best = std::min(best, v / 3.0);
    } while (std::next_permutation(perm.begin(), perm.end()));
    greedy_ok &= got >= best - 1e-12 && got <= 1.0;
  }
  expect(greedy_ok, "eps_S greedy pairing");

  const VectorXd psi = VectorXd::Constant(2, 1.0);
  VectorXd psi_hat(2);
  psi_hat << 2.0, 3.0;
  expect(eval::epsilon_E(psi, psi) == 0.0, "eps_E identity");
  expect(eval::epsilon_E(psi, psi_hat) == 2.5, "eps_E example");

  std::string detail = fmt("rotation max deviation %.2e over 100 rotations", worst_rotation);
  for (const std::string& f : failed)
    detail += ", failed: " + f;
  return { failed.empty() ? Outcome::pass : Outcome::fail, detail };
}

} // namespace

int
main()
{
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = { Outcome::fail, std::string("exception: ") + e.what() };
    }
    const char* tag = o.status == Outcome::pass   ? "PASS"
                      : o.status == Outcome::fail ? "FAIL"
                                                  : "SKIP";
    if (o.status == Outcome::fail)
      ++failures;
    std::cout << tag << " AC" << id << " " << name << ": " << o.detail << std::endl;
  };

  report(1, "conditional correctness", conditional_suite);
  report(2, "difference operator equivalence", difference_operator_equivalence);
  report(3, "Geweke joint consistency", geweke);

  double secs = 0.0;
  std::vector<Replicate> reps;
  std::string replicate_error;
  try {
    reps = run_replicates(secs);
  } catch (const std::exception& e) {
    replicate_error = e.what();
  }
  auto needs_replicates = [&](std::function<Outcome()> f) {
    return [&, f] {
      if (reps.empty())
        return Outcome{ Outcome::fail, "replicates failed: " + replicate_error };
      return f();
    };
  };
  report(4, "detection power",
         needs_replicates([&] { return detection_power(reps, secs); }));
  report(5, "robustness to K",
         needs_replicates([&] { return robustness_to_k(reps.front()); }));
  report(6, "model recovery", needs_replicates([&] { return model_recovery(reps); }));
  report(7, "household power data", real_data);
  report(8, "CLI determinism", determinism);
  report(9, "metric examples", metric_examples);

  std::cout << (failures ? "acceptance: " + std::to_string(failures) + " failing"
                         : std::string("acceptance: all evaluated criteria pass"))
            << std::endl;
  return failures ? 1 : 0;
}
