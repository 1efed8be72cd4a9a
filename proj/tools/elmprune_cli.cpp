// Experiment runner: one subcommand per protocol, CSV + summary.json output.

#include <charconv>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "elmprune/data.hpp"
#include "elmprune/errors.hpp"
#include "elmprune/experiments.hpp"

namespace ex = elmprune::experiments;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;
constexpr int kExitOther = 1;

struct Overrides {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::string> seeds;
  std::optional<std::string> repeats;
  std::optional<std::size_t> mstar;
  std::optional<std::string> delta;
  std::optional<std::string> activation;
  std::optional<std::string> metric;
  std::optional<std::string> grid;
  std::optional<std::string> csv;
  std::optional<std::string> label_column;
  std::optional<std::size_t> n_train;
  std::optional<std::size_t> n_test;
  std::optional<std::size_t> n_samples;
  std::optional<double> noise;
  std::optional<std::size_t> junk;
  std::optional<std::string> junk_counts;
  std::optional<std::string> junk_distribution;
  std::optional<std::string> split;
  std::optional<double> plateau_window;
  std::optional<int> threads;
  std::optional<std::string> timestamp;
  bool no_stratify = false;
  bool standardize = false;
  bool refit = false;
  bool quiet = false;
};

std::uint64_t to_u64(std::string_view text, const char* field) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ex::ConfigError(field, "'" + std::string(text) + "' is not an unsigned integer");
  }
  return v;
}

// "1-20", "3,5,8" or a mix such as "1-3,10".
std::vector<std::uint64_t> parse_list(const std::string& text, const char* field) {
  std::vector<std::uint64_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma - start);
    const std::size_t dash = item.find('-');
    if (dash != std::string::npos && dash > 0) {
      const auto lo = to_u64(std::string_view(item).substr(0, dash), field);
      const auto hi = to_u64(std::string_view(item).substr(dash + 1), field);
      if (hi < lo) throw ex::ConfigError(field, "empty range '" + item + "'");
      for (auto v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(to_u64(item, field));
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_delta(const std::string& text) {
  if (text == "inf") return INFINITY;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ex::ConfigError("delta", "'" + text + "' is not a number");
  }
  return v;
}

void add_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment config (flags override it)");
  cmd->add_option("--out", o.out_dir, "Output directory");
  cmd->add_option("--seeds", o.seeds, "Initialization seeds, e.g. 1-20 or 1,4,9");
  cmd->add_option("--repeats", o.repeats, "Re-split seeds (cross validations)");
  cmd->add_option("--mstar", o.mstar, "Maximum network size M*");
  cmd->add_option("--delta", o.delta, "Stopping tolerance in error units ('inf' disables)");
  cmd->add_option("--activation", o.activation, "sigmoid | tanh | relu");
  cmd->add_option("--metric", o.metric, "accuracy | auc");
  cmd->add_option("--grid", o.grid, "auto | list:a,b | geom:LO:HI:RATIO | lin:LO:HI:STEP");
  cmd->add_option("--csv", o.csv, "Pre-featurized dataset (switches to the CSV source)");
  cmd->add_option("--label-column", o.label_column, "Label column name or index (default -1)");
  cmd->add_option("--n-train", o.n_train, "Synthetic training samples for sweeps");
  cmd->add_option("--n-test", o.n_test, "Synthetic test samples for sweeps");
  cmd->add_option("--n-samples", o.n_samples, "Synthetic pool size for method-table");
  cmd->add_option("--noise", o.noise, "Two-moons noise standard deviation");
  cmd->add_option("--junk", o.junk, "Junk features added to synthetic data");
  cmd->add_option("--junk-counts", o.junk_counts, "Junk counts for junk-sweep, e.g. 0,10,100");
  cmd->add_option("--junk-dist", o.junk_distribution, "uniform | gaussian");
  cmd->add_option("--split", o.split, "train,val,test fractions, e.g. 0.7,0.2,0.1");
  cmd->add_flag("--no-stratify", o.no_stratify, "Disable class-stratified splitting");
  cmd->add_flag("--standardize", o.standardize, "Z-score features using training statistics");
  cmd->add_flag("--refit", o.refit, "Re-solve beta after RBP picks a size");
  cmd->add_option("--plateau-window", o.plateau_window, "FWD plateau window (size ratio)");
  cmd->add_option("--threads", o.threads, "OpenMP threads (0 = default)");
  cmd->add_option("--timestamp", o.timestamp, "Override the timestamp in output file names");
  cmd->add_flag("--quiet", o.quiet, "Do not print the result table");
}

ex::ExperimentConfig build_config(ex::ExperimentKind kind, const Overrides& o) {
  ex::ExperimentConfig config;
  if (!o.config_path.empty()) config = ex::load_config(o.config_path);
  config.kind = kind;
  if (o.csv) {
    ex::CsvSource src;
    if (const auto* prev = std::get_if<ex::CsvSource>(&config.source)) src = *prev;
    src.path = *o.csv;
    config.source = src;
  }
  if (o.label_column) {
    auto* src = std::get_if<ex::CsvSource>(&config.source);
    if (src == nullptr) throw ex::ConfigError("label_column", "only valid with a CSV source");
    const std::string& text = *o.label_column;
    long index = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), index);
    if (ec == std::errc() && ptr == text.data() + text.size()) {
      src->label_column = index;
    } else {
      src->label_column = text;
    }
  }
  if (auto* src = std::get_if<ex::SyntheticSource>(&config.source)) {
    if (o.n_train) src->n_train = *o.n_train;
    if (o.n_test) src->n_test = *o.n_test;
    if (o.n_samples) src->n_samples = *o.n_samples;
    if (o.noise) src->noise = *o.noise;
    if (o.junk) src->junk = *o.junk;
    if (o.junk_counts) {
      src->junk_counts.clear();
      for (auto v : parse_list(*o.junk_counts, "junk_counts")) src->junk_counts.push_back(v);
    }
    if (o.junk_distribution) {
      src->junk_distribution = elmprune::data::parse_junk_distribution(*o.junk_distribution);
    }
  }
  if (o.out_dir) config.out_dir = *o.out_dir;
  if (o.seeds) config.seeds = parse_list(*o.seeds, "seeds");
  if (o.repeats) config.repeats = parse_list(*o.repeats, "repeats");
  if (o.mstar) config.mstar = *o.mstar;
  if (o.delta) config.delta = parse_delta(*o.delta);
  if (o.activation) config.activation = elmprune::parse_activation(*o.activation);
  if (o.metric) config.metric = elmprune::pruning::parse_metric(*o.metric);
  if (o.grid) config.grid = ex::GridSpec::parse(*o.grid);
  if (o.split) {
    std::vector<double> fracs;
    std::size_t start = 0;
    const std::string& text = *o.split;
    while (true) {
      const std::size_t comma = text.find(',', start);
      const std::string item = text.substr(start, comma - start);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc() || ptr != item.data() + item.size()) {
        throw ex::ConfigError("split", "'" + item + "' is not a number");
      }
      fracs.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fracs.size() != 3) throw ex::ConfigError("split", "expected three fractions");
    config.split.train_frac = fracs[0];
    config.split.val_frac = fracs[1];
    config.split.test_frac = fracs[2];
  }
  if (o.no_stratify) config.split.stratified = false;
  if (o.standardize) config.standardize = true;
  if (o.refit) config.refit = true;
  if (o.plateau_window) config.plateau_window = *o.plateau_window;
  if (o.threads) config.threads = *o.threads;
  ex::validate(config);
  return config;
}

int run(ex::ExperimentKind kind, const Overrides& o) {
  const ex::ExperimentConfig config = build_config(kind, o);
  const ex::RunReport report = ex::run(config);
  const auto files =
      ex::write_report(report, config, config.out_dir, o.timestamp.value_or(ex::utc_timestamp()));
  if (!o.quiet) std::cout << ex::format_text(report.table);
  std::cout << "wrote " << files.csv.string() << "\n"
            << "wrote " << files.summary.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ELM size-selection experiments (RBP, RND, FWD, STD)"};
  app.require_subcommand(1);
  Overrides overrides;
  const std::pair<ex::ExperimentKind, const char*> commands[] = {
      {ex::ExperimentKind::kJunkSweep, "Test accuracy vs M for several junk-feature counts"},
      {ex::ExperimentKind::kSizeSweep, "Train/test accuracy vs hidden layer size"},
      {ex::ExperimentKind::kFakeNeuron, "|beta| of a disconnected random neuron vs M"},
      {ex::ExperimentKind::kPruneCompare, "FWD, RND and RBP metric-vs-size curves"},
      {ex::ExperimentKind::kMethodTable, "STD / FWD / RBP comparison table"},
  };
  std::vector<std::pair<CLI::App*, ex::ExperimentKind>> subs;
  for (const auto& [kind, help] : commands) {
    CLI::App* cmd = app.add_subcommand(std::string(ex::to_string(kind)), help);
    add_options(cmd, overrides);
    subs.emplace_back(cmd, kind);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    for (const auto& [cmd, kind] : subs) {
      if (cmd->parsed()) return run(kind, overrides);
    }
  } catch (const ex::ConfigError& e) {
    std::cerr << "error[config] field=" << e.field() << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const elmprune::data::CsvError& e) {
    std::cerr << "error[data] kind=" << elmprune::data::to_string(e.kind()) << " row=" << e.line()
              << " column=" << e.column() << ": " << e.what() << "\n";
    return kExitData;
  } catch (const elmprune::NumericalFailure& e) {
    std::cerr << "error[numerical]: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const elmprune::ContractViolation& e) {
    std::cerr << "error[config]: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitOther;
}
