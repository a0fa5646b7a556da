// entropykit: entropy features from in-home location-event streams.
//
// Subcommands: features, fit, train, simulate, inspect, validate.
// Exit codes: 0 success, 1 fatal error, 2 usage error.

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <map>
#include <string>

#include "entropykit/commands.hpp"
#include "entropykit/validation.hpp"

namespace {

using namespace entropykit;

// Enumerated flags are read as text and mapped after parsing.
struct EnumFlags {
  std::string format = "csv";
  std::string out_format = "csv";
  std::string optimizer = "adaptive_moments";
};

void add_train_options(CLI::App* cmd, TrainConfig& train, EnumFlags& flags) {
  cmd->add_option("--seed", train.seed, "Seed for every random choice")->envname("ENTROPYKIT_SEED");
  cmd->add_option("--epochs", train.epochs, "NEEP training epochs")->envname("ENTROPYKIT_EPOCHS");
  cmd->add_option("--learning-rate", train.learning_rate, "NEEP learning rate")->envname("ENTROPYKIT_LEARNING_RATE");
  cmd->add_option("--batch-size", train.batch_size, "NEEP minibatch size")->envname("ENTROPYKIT_BATCH_SIZE");
  cmd->add_option("--embedding-width", train.embedding_width, "NEEP embedding width");
  cmd->add_option("--hidden", train.hidden, "NEEP hidden layer widths, comma separated")->delimiter(',');
  cmd->add_option("--optimizer", flags.optimizer, "sgd_momentum or adaptive_moments")
      ->check(CLI::IsMember({"sgd_momentum", "adaptive_moments"}))
      ->envname("ENTROPYKIT_OPTIMIZER");
  cmd->add_option("--momentum", train.momentum, "Momentum for sgd_momentum");
  cmd->add_option("--min-transitions", train.min_transitions, "Fewest transitions a model is trained on");
}

void add_run_options(CLI::App* cmd, RunConfig& config, EnumFlags& flags, bool& quartile_mode,
                     bool& stationary_marginal) {
  cmd->add_option("--input,-i", config.inputs, "Event file(s)")->required()->envname("ENTROPYKIT_INPUT");
  cmd->add_option("--format", flags.format, "Event format: csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}))
      ->envname("ENTROPYKIT_FORMAT");
  cmd->add_option("--tz", config.time_zone, "Time zone for timestamps without offset")->envname("ENTROPYKIT_TZ");
  cmd->add_option("--alphabet", config.alphabet, "Location names, comma separated")
      ->delimiter(',')
      ->envname("ENTROPYKIT_ALPHABET");
  cmd->add_option("--max-reject-fraction", config.max_reject_fraction, "Fatal above this rejected-record fraction")
      ->envname("ENTROPYKIT_MAX_REJECT_FRACTION");
  cmd->add_option("--baseline-weeks", config.pipeline.baseline_weeks, "Weeks used to fit T and train NEEP")
      ->envname("ENTROPYKIT_BASELINE_WEEKS");
  cmd->add_option("--smoothing-alpha", config.pipeline.smoothing_alpha, "Add-alpha smoothing of T")
      ->envname("ENTROPYKIT_SMOOTHING_ALPHA");
  cmd->add_flag("--collapse-repeats", config.collapse_repeats, "Drop consecutive repeated locations")
      ->envname("ENTROPYKIT_COLLAPSE_REPEATS");
  cmd->add_flag("--quartile-mode", quartile_mode, "Band by empirical quartiles instead of Gaussian cut points")
      ->envname("ENTROPYKIT_QUARTILE_MODE");
  cmd->add_flag("--stationary-marginal", stationary_marginal, "Weight the entropy rate by the stationary distribution");
  cmd->add_flag("--refit-t", config.pipeline.refit_transition, "Refit T on the preceding baseline window every week");
  cmd->add_flag("--retrain-neep-per-window", config.pipeline.retrain_neep_per_window,
                "Train NEEP on each evaluated week");
  cmd->add_flag("--include-baseline-weeks", config.pipeline.include_baseline_weeks,
                "Also emit rows for the baseline weeks");
  cmd->add_option("--labels", config.labels_path, "CSV of household_id,date,label to join");
  cmd->add_option("--out,-o", config.output_path, "Output path (default: stdout)")->envname("ENTROPYKIT_OUT");
  cmd->add_option("--out-format", flags.out_format, "Output format: csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}))
      ->envname("ENTROPYKIT_OUT_FORMAT");
  add_train_options(cmd, config.pipeline.train, flags);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy features for in-home location-event streams", "entropykit"};
  app.set_version_flag("--version", std::string(ENTROPYKIT_VERSION));
  app.require_subcommand(1);

  RunConfig run;
  EnumFlags flags;
  bool quartile_mode = false;
  bool stationary_marginal = false;
  auto* features = app.add_subcommand("features", "Compute the weekly feature table");
  add_run_options(features, run, flags, quartile_mode, stationary_marginal);
  auto* fit = app.add_subcommand("fit", "Fit baseline transition matrices");
  add_run_options(fit, run, flags, quartile_mode, stationary_marginal);
  auto* train = app.add_subcommand("train", "Train baseline NEEP models");
  add_run_options(train, run, flags, quartile_mode, stationary_marginal);

  SimulateConfig sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate a Markov chain and report its analytic oracles");
  simulate->add_option("--chain", sim.chain_path, "JSON with alphabet, probs and optional start")->required();
  simulate->add_option("--steps", sim.steps, "Trajectory length");
  simulate->add_option("--seed", sim.seed, "PRNG seed")->envname("ENTROPYKIT_SEED");
  simulate->add_option("--out,-o", sim.output_path, "Events CSV to write")->required();
  simulate->add_option("--report", sim.report_path, "Oracle report path (default: <out>.oracle.json)");
  simulate->add_option("--spacing-seconds", sim.spacing_seconds, "Seconds between synthetic events");
  simulate->add_option("--start", sim.start_time, "Civil timestamp of the first event");
  simulate->add_option("--household", sim.household_id, "Household id written to every event");

  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "Summarize a transition matrix or NEEP checkpoint file");
  inspect->add_option("file", inspect_path, "JSON file")->required();

  ValidationOptions vopts;
  std::string scratch;
  auto* validate = app.add_subcommand("validate", "Run the built-in oracle battery");
  validate->add_option("--seed", vopts.seed, "Seed for simulations and training")->envname("ENTROPYKIT_SEED");
  validate->add_option("--scratch-dir", scratch, "Directory for temporary corpora");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  run.format = flags.format == "jsonl" ? EventFormat::Jsonl : EventFormat::Csv;
  run.output_format = flags.out_format == "jsonl" ? TableFormat::Jsonl : TableFormat::Csv;
  run.pipeline.train.optimizer = parse_optimizer(flags.optimizer);
  run.pipeline.band_mode = quartile_mode ? BandMode::Quartile : BandMode::Gaussian;
  run.pipeline.marginal = stationary_marginal ? MarginalMode::Stationary : MarginalMode::Empirical;

  if (*features) return run_features(run, std::cout, std::cerr);
  if (*fit) return run_fit(run, std::cout, std::cerr);
  if (*train) return run_train(run, std::cout, std::cerr);
  if (*simulate) return run_simulate(sim, std::cout, std::cerr);
  if (*inspect) return run_inspect(inspect_path, std::cout, std::cerr);
  if (*validate) {
    if (!scratch.empty()) vopts.scratch_dir = scratch;
    vopts.train.seed = vopts.seed;
    const auto results = run_validation(vopts, [](const CheckResult& r) {
      std::cout << (r.passed ? "PASS " : "FAIL ") << std::setw(3) << r.id << "  " << std::left << std::setw(28)
                << r.name << std::right << std::fixed << std::setprecision(2) << std::setw(8) << r.seconds << "s  "
                << r.detail << std::endl;
    });
    std::size_t failed = 0;
    for (const auto& r : results) failed += r.passed ? 0 : 1;
    std::cout << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed") << '\n';
    return failed == 0 ? kExitOk : kExitFatal;
  }
  return kExitUsage;
}
