#include "abacus/cli.hpp"

#include "abacus/cli_io.hpp"
#include "abacus/evalkit.hpp"
#include "abacus/pipeline.hpp"
#include "abacus/simgen.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

namespace abacus {

namespace {

namespace fs = std::filesystem;

struct DetectArgs
{
  std::string input;
  AbacusOptions options;
  bool standardize = false;
  std::optional<Index> prune_keep;
  io::Orientation orientation = io::Orientation::channels_as_rows;
  std::string out = "abacus_out";
};

struct SimulateArgs
{
  sim::SimConfig cfg;
  std::string out = "abacus_sim";
};

struct EvaluateArgs
{
  std::string truth;
  std::string est;
  Index w = 3;
  std::string truth_sources, est_sources;
  std::string truth_mixing, est_mixing;
  std::string truth_noise, est_noise;
};

int
run_detect(const DetectArgs& args)
{
  const ObservationMatrix Y =
    io::load_csv(args.input, args.orientation, args.standardize);
  AbacusOptions options = args.options;
  options.prune_keep = args.prune_keep;
  if (options.progress_interval > 0)
    options.progress = [](std::string_view stage, std::int64_t it,
                          std::int64_t total) {
      std::cerr << stage << ' ' << it << '/' << total << '\n';
    };

  const ChangeReport report = run_abacus(Y, options);

  io::RunSettings settings;
  settings.seed = options.seed;
  settings.rank = options.rank;
  settings.iterations = options.iterations;
  settings.burn_in = options.burn_in;
  settings.delta = options.delta;
  settings.standardize = args.standardize;
  settings.prune = options.prune || options.prune_keep.has_value();
  settings.input = fs::path(args.input).filename().string();
  io::emit_report(report, settings, args.out);

  std::cout << "AO:";
  for (Index n : report.cpt0)
    std::cout << ' ' << n;
  std::cout << "\nLS:";
  for (Index n : report.cpt1)
    std::cout << ' ' << n;
  std::cout << "\nwritten to " << args.out << '\n';
  return 0;
}

int
run_simulate(const SimulateArgs& args)
{
  const auto [Y, truth] = sim::generate(args.cfg);
  const fs::path out = args.out;
  fs::create_directories(out);

  io::write_csv(out / "data.csv", Y.values());
  io::write_csv(out / "sources.csv", truth.S);
  io::write_csv(out / "mixing.csv", truth.M);
  io::write_vector_csv(out / "noise.csv", truth.psi);

  std::vector<io::ChangeRecord> records;
  for (const sim::ChangeEvent& e : truth.events) {
    double g = 0.0;
    for (double m : e.magnitudes)
      if (std::abs(m) > std::abs(g))
        g = m;
    records.push_back({ e.index, e.type, g });
  }
  io::write_changes(out / "truth.csv", records);

  const auto sidecar = out / "truth.txt";
  std::ofstream meta(sidecar, std::ios::binary | std::ios::trunc);
  const sim::SimConfig& c = args.cfg;
  meta << "seed=" << c.seed << "\nP=" << c.P << "\nN=" << c.N
       << "\nr=" << c.r << "\nn_ao=" << c.n_ao << "\nn_ls=" << c.n_ls
       << "\nmixing=" << io::format_number(c.mixing.lo) << ' '
       << io::format_number(c.mixing.hi)
       << "\nnoise=" << io::format_number(c.noise.lo) << ' '
       << io::format_number(c.noise.hi)
       << "\nmagnitude=" << io::format_number(c.magnitude.lo) << ' '
       << io::format_number(c.magnitude.hi) << '\n';
  for (const sim::ChangeEvent& e : truth.events) {
    meta << "event=" << e.index << ' '
         << (e.type == ChangeType::additive_outlier ? "AO" : "LS");
    for (std::size_t k = 0; k < e.signals.size(); ++k)
      meta << ' ' << e.signals[k] + 1 << ':'
           << io::format_number(e.magnitudes[k]);
    meta << '\n';
  }
  if (!meta.flush())
    throw std::runtime_error("write failed: " + sidecar.string());

  std::cout << "written to " << args.out << '\n';
  return 0;
}

int
run_evaluate(const EvaluateArgs& args)
{
  const auto [ao_true, ls_true] = io::split_changes(io::read_changes(args.truth));
  const auto [ao_est, ls_est] = io::split_changes(io::read_changes(args.est));
  const auto ao = eval::precision_recall(ao_true, ao_est, args.w);
  const auto ls = eval::precision_recall(ls_true, ls_est, args.w);

  std::cout << "w=" << args.w << '\n'
            << "AO_precision=" << io::format_number(ao.precision) << '\n'
            << "AO_recall=" << io::format_number(ao.recall) << '\n'
            << "LS_precision=" << io::format_number(ls.precision) << '\n'
            << "LS_recall=" << io::format_number(ls.recall) << '\n';
  if (!args.truth_sources.empty() && !args.est_sources.empty())
    std::cout << "epsilon_S="
              << io::format_number(eval::epsilon_S(
                   io::read_csv(args.truth_sources), io::read_csv(args.est_sources)))
              << '\n';
  if (!args.truth_mixing.empty() && !args.est_mixing.empty()) {
    const MatrixXd M = io::read_csv(args.truth_mixing);
    const MatrixXd M_hat = io::read_csv(args.est_mixing);
    std::cout << "epsilon_M=" << io::format_number(eval::epsilon_M(M, M_hat))
              << '\n'
              << "epsilon_M_frobenius="
              << io::format_number(eval::epsilon_M_frobenius(M, M_hat)) << '\n';
  }
  if (!args.truth_noise.empty() && !args.est_noise.empty()) {
    const MatrixXd psi = io::read_csv(args.truth_noise);
    const MatrixXd psi_hat = io::read_csv(args.est_noise);
    if (psi.cols() != 1 || psi_hat.cols() != 1)
      throw std::runtime_error("noise files must hold one value per line");
    std::cout << "epsilon_E="
              << io::format_number(eval::epsilon_E(psi.col(0), psi_hat.col(0)))
              << '\n';
  }
  return 0;
}

} // namespace

int
cli_main(int argc, const char* const* argv)
{
  CLI::App app{ "Bayesian source separation and change detection" };
  app.name("abacus");
  app.require_subcommand(1);

  DetectArgs detect;
  auto* d = app.add_subcommand("detect", "detect outliers and level shifts");
  d->add_option("input", detect.input, "CSV file of observations")
    ->required()
    ->check(CLI::ExistingFile);
  d->add_option("--k", detect.options.rank, "latent dimension K")
    ->capture_default_str()
    ->check(CLI::PositiveNumber);
  d->add_option("--iters", detect.options.iterations, "MCMC iterations")
    ->capture_default_str()
    ->check(CLI::PositiveNumber);
  d->add_option("--burnin", detect.options.burn_in, "burn-in iterations")
    ->capture_default_str()
    ->check(CLI::NonNegativeNumber);
  d->add_option("--delta", detect.options.delta, "density threshold")
    ->capture_default_str()
    ->check(CLI::PositiveNumber);
  d->add_option("--seed", detect.options.seed, "random seed")
    ->capture_default_str();
  d->add_flag("--standardize", detect.standardize,
              "center and scale each channel");
  d->add_flag("--prune", detect.options.prune,
              "prune level shifts by optimal segmentation");
  d->add_option("--prune-keep", detect.prune_keep,
                "keep exactly this many level shifts when pruning")
    ->check(CLI::NonNegativeNumber);
  const std::map<std::string, io::Orientation> orientations{
    { "rows", io::Orientation::channels_as_rows },
    { "columns", io::Orientation::channels_as_columns },
  };
  d->add_option("--orientation", detect.orientation,
                "channels as rows or columns")
    ->transform(CLI::CheckedTransformer(orientations, CLI::ignore_case))
    ->default_str("rows");
  d->add_option("--out", detect.out, "output directory")->capture_default_str();
  d->add_option("--progress", detect.options.progress_interval,
                "report progress every n iterations on stderr")
    ->check(CLI::NonNegativeNumber);

  SimulateArgs simulate;
  sim::SimConfig& cfg = simulate.cfg;
  auto* s = app.add_subcommand("simulate", "write a synthetic dataset");
  s->add_option("--p", cfg.P, "channels")->capture_default_str();
  s->add_option("--n", cfg.N, "length")->capture_default_str();
  s->add_option("--r", cfg.r, "sources")->capture_default_str();
  s->add_option("--ao", cfg.n_ao, "additive outliers")->capture_default_str();
  s->add_option("--ls", cfg.n_ls, "level shifts")->capture_default_str();
  s->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  s->add_option("--psi-min", cfg.noise.lo, "smallest noise variance")
    ->capture_default_str();
  s->add_option("--psi-max", cfg.noise.hi, "largest noise variance")
    ->capture_default_str();
  s->add_option("--mag-min", cfg.magnitude.lo, "smallest change magnitude")
    ->capture_default_str();
  s->add_option("--mag-max", cfg.magnitude.hi, "largest change magnitude")
    ->capture_default_str();
  s->add_option("--out", simulate.out, "output directory")
    ->capture_default_str();

  EvaluateArgs evaluate;
  auto* e = app.add_subcommand("evaluate", "score estimated changes");
  e->add_option("--truth", evaluate.truth, "true changes file")
    ->required()
    ->check(CLI::ExistingFile);
  e->add_option("--est", evaluate.est, "estimated changes file")
    ->required()
    ->check(CLI::ExistingFile);
  e->add_option("--w", evaluate.w, "matching tolerance")
    ->capture_default_str()
    ->check(CLI::NonNegativeNumber);
  e->add_option("--truth-sources", evaluate.truth_sources)
    ->check(CLI::ExistingFile);
  e->add_option("--est-sources", evaluate.est_sources)->check(CLI::ExistingFile);
  e->add_option("--truth-mixing", evaluate.truth_mixing)
    ->check(CLI::ExistingFile);
  e->add_option("--est-mixing", evaluate.est_mixing)->check(CLI::ExistingFile);
  e->add_option("--truth-noise", evaluate.truth_noise)->check(CLI::ExistingFile);
  e->add_option("--est-noise", evaluate.est_noise)->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*d) {
      if (detect.options.burn_in >= detect.options.iterations) {
        std::cerr << "abacus: --burnin must be smaller than --iters\n";
        return 1;
      }
      return run_detect(detect);
    }
    if (*s)
      return run_simulate(simulate);
    return run_evaluate(evaluate);
  } catch (const std::exception& err) {
    std::cerr << "abacus: error: " << err.what() << '\n';
    return 2;
  }
}

} // namespace abacus
