#include "elmprune/experiments.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "elmprune/metrics.hpp"
#include "elmprune/rng.hpp"

namespace elmprune::experiments {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr std::string_view kKindNames[] = {"junk-sweep", "size-sweep", "fake-neuron",
                                           "prune-compare", "method-table"};

// Stream tags for derive_seed; fixed so outputs stay reproducible.
constexpr std::uint64_t kTrainStream = 0;
constexpr std::uint64_t kTestStream = 1;
constexpr std::uint64_t kTrainJunkStream = 2;
constexpr std::uint64_t kTestJunkStream = 3;
constexpr std::uint64_t kPoolStream = 4;
constexpr std::uint64_t kPoolJunkStream = 5;
constexpr std::uint64_t kSplitStream = 6;
constexpr std::uint64_t kFakeStream = 0xFA4EULL;
constexpr std::uint64_t kRandomPruneStream = 0x52A4DULL;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::size_t parse_count(std::string_view text, std::string_view field) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(field), "'" + std::string(text) + "' is not a count");
  }
  return value;
}

double parse_real(std::string_view text, std::string_view field) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(field), "'" + std::string(text) + "' is not a number");
  }
  return value;
}

std::vector<std::string_view> tokens(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    out.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// -- data preparation --------------------------------------------------------

struct SweepData {
  Dataset train;
  Dataset test;
};

struct Prepared {
  const ExperimentConfig& config;
  std::vector<data::Split> csv_splits;
};

Prepared prepare(const ExperimentConfig& config) {
  validate(config);
  Prepared prepared{config, {}};
  if (const auto* csv = std::get_if<CsvSource>(&config.source)) {
    const Dataset all = data::load_csv(csv->path, csv->label_column);
    prepared.csv_splits = data::make_cv_splits(all, data::CvPlan{config.repeats}, config.split);
    if (config.standardize) {
      for (auto& s : prepared.csv_splits) {
        const data::Standardizer scaler(s.train.x());
        s.train = scaler.apply(s.train);
        s.val = scaler.apply(s.val);
        s.test = scaler.apply(s.test);
      }
    }
  }
  return prepared;
}

std::uint64_t cell_data_seed(const ExperimentConfig& config, std::size_t repeat,
                             std::uint64_t seed) {
  return derive_seed(config.repeats[repeat], seed);
}

SweepData sweep_data(const Prepared& prepared, std::size_t repeat, std::uint64_t seed,
                     std::size_t junk) {
  const ExperimentConfig& config = prepared.config;
  if (std::holds_alternative<CsvSource>(config.source)) {
    const data::Split& s = prepared.csv_splits[repeat];
    return SweepData{s.train, s.test};
  }
  const auto& src = std::get<SyntheticSource>(config.source);
  const std::uint64_t base = cell_data_seed(config, repeat, seed);
  Dataset train = data::gen_two_moons(src.n_train / 2, src.noise, derive_seed(base, kTrainStream));
  Dataset test = data::gen_two_moons(src.n_test / 2, src.noise, derive_seed(base, kTestStream));
  train = data::add_junk_features(train, junk, derive_seed(base, kTrainJunkStream),
                                  src.junk_distribution);
  test = data::add_junk_features(test, junk, derive_seed(base, kTestJunkStream),
                                 src.junk_distribution);
  if (config.standardize) {
    const data::Standardizer scaler(train.x());
    return SweepData{scaler.apply(train), scaler.apply(test)};
  }
  return SweepData{std::move(train), std::move(test)};
}

data::Split table_split(const Prepared& prepared, std::size_t repeat, std::uint64_t seed) {
  const ExperimentConfig& config = prepared.config;
  if (std::holds_alternative<CsvSource>(config.source)) return prepared.csv_splits[repeat];
  const auto& src = std::get<SyntheticSource>(config.source);
  const std::uint64_t base = cell_data_seed(config, repeat, seed);
  Dataset pool = data::gen_two_moons(src.n_samples / 2, src.noise, derive_seed(base, kPoolStream));
  pool = data::add_junk_features(pool, src.junk, derive_seed(base, kPoolJunkStream),
                                 src.junk_distribution);
  data::SplitSpec spec = config.split;
  spec.seed = derive_seed(base, kSplitStream);
  data::Split s = data::split(pool, spec);
  if (config.standardize) {
    const data::Standardizer scaler(s.train.x());
    s.train = scaler.apply(s.train);
    s.val = scaler.apply(s.val);
    s.test = scaler.apply(s.test);
  }
  return s;
}

std::size_t training_size(const Prepared& prepared) {
  if (!prepared.csv_splits.empty()) return prepared.csv_splits.front().train.size();
  const auto& src = std::get<SyntheticSource>(prepared.config.source);
  if (prepared.config.kind == ExperimentKind::kMethodTable) {
    return data::split_sizes(src.n_samples, prepared.config.split)[0];
  }
  return src.n_train;
}

// Runs fn(repeat_index, seed) for every cell, in parallel across cells.
// Records come back in cell order whatever the thread count.
template <typename Fn>
std::vector<Record> run_cells(const ExperimentConfig& config, Fn&& fn) {
  const std::size_t n_seeds = config.seeds.size();
  const auto cells = static_cast<long>(config.repeats.size() * n_seeds);
  std::vector<std::vector<Record>> per_cell(static_cast<std::size_t>(cells));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(cells));
  const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long cell = 0; cell < cells; ++cell) {
    const auto idx = static_cast<std::size_t>(cell);
    try {
      const std::size_t repeat = idx / n_seeds;
      const std::uint64_t seed = config.seeds[idx % n_seeds];
      per_cell[idx] = fn(repeat, seed);
      for (auto& r : per_cell[idx]) {
        r.repeat = repeat;
        r.seed = seed;
      }
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<Record> records;
  for (auto& chunk : per_cell) {
    records.insert(records.end(), std::make_move_iterator(chunk.begin()),
                   std::make_move_iterator(chunk.end()));
  }
  return records;
}

// Values grouped by (group, size): groups in the given order, sizes ascending.
struct Bucket {
  std::string group;
  std::size_t size;
  std::vector<double> values;
  std::vector<double> extras;
  std::vector<double> times;
};

std::vector<Bucket> bucket(const std::vector<Record>& records,
                           const std::vector<std::string>& group_order) {
  std::map<std::pair<std::size_t, std::size_t>, Bucket> buckets;
  for (const Record& r : records) {
    const auto it = std::find(group_order.begin(), group_order.end(), r.group);
    const auto rank = static_cast<std::size_t>(it - group_order.begin());
    auto& b = buckets[{rank, r.size}];
    b.group = r.group;
    b.size = r.size;
    b.values.push_back(r.value);
    b.extras.push_back(r.extra);
    b.times.push_back(r.wall_seconds);
  }
  std::vector<Bucket> out;
  for (auto& [key, b] : buckets) out.push_back(std::move(b));
  return out;
}

std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

double test_metric(const ExperimentConfig& config, const ElmModel& model, const Dataset& test) {
  return pruning::evaluate(config.metric, predict_scores(model, test.x()), test.y());
}

double accuracy_on(const ElmModel& model, const Dataset& data) {
  return metrics::accuracy(predict_labels(model, data.x()), data.y());
}

HiddenLayer layer_for(const ExperimentConfig& config, std::size_t size, std::size_t inputs,
                      std::uint64_t seed) {
  return init_hidden(size, inputs, config.activation, derive_seed(seed, size));
}

// The auto grid and split sizing depend on the kind, so run_* functions pin it.
ExperimentConfig with_kind(const ExperimentConfig& config, ExperimentKind kind) {
  ExperimentConfig copy = config;
  copy.kind = kind;
  return copy;
}

}  // namespace

// -- names and errors ----------------------------------------------------------

ExperimentKind parse_kind(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kKindNames); ++i) {
    if (kKindNames[i] == name) return static_cast<ExperimentKind>(i);
  }
  throw ConfigError("experiment", "unknown experiment '" + std::string(name) + "'");
}

std::string_view to_string(ExperimentKind kind) {
  return kKindNames[static_cast<std::size_t>(kind)];
}

ConfigError::ConfigError(std::string field, const std::string& message)
    : ContractViolation("config field '" + field + "': " + message), field_(std::move(field)) {}

// -- grids -------------------------------------------------------------------

GridSpec GridSpec::parse(std::string_view text) {
  GridSpec spec;
  if (text == "auto") return spec;
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ConfigError("grid", "expected auto, list:..., geom:LO:HI:RATIO or lin:LO:HI:STEP");
  }
  const std::string_view head = text.substr(0, colon);
  const std::string_view body = text.substr(colon + 1);
  if (head == "list") {
    spec.kind = Kind::kList;
    for (auto tok : tokens(body, ',')) spec.sizes.push_back(parse_count(tok, "grid"));
    return spec;
  }
  const auto parts = tokens(body, ':');
  if (parts.size() != 3) throw ConfigError("grid", "expected LO:HI:STEP");
  spec.lo = parse_count(parts[0], "grid");
  spec.hi = parse_count(parts[1], "grid");
  spec.step = parse_real(parts[2], "grid");
  if (head == "geom") {
    spec.kind = Kind::kGeometric;
  } else if (head == "lin") {
    spec.kind = Kind::kLinear;
  } else {
    throw ConfigError("grid", "unknown grid kind '" + std::string(head) + "'");
  }
  return spec;
}

std::string GridSpec::to_string() const {
  switch (kind) {
    case Kind::kAuto: return "auto";
    case Kind::kList: {
      std::string out = "list:";
      for (std::size_t i = 0; i < sizes.size(); ++i) {
        out += (i ? "," : "") + std::to_string(sizes[i]);
      }
      return out;
    }
    case Kind::kGeometric:
      return "geom:" + std::to_string(lo) + ":" + std::to_string(hi) + ":" + format_double(step);
    case Kind::kLinear:
      return "lin:" + std::to_string(lo) + ":" + std::to_string(hi) + ":" + format_double(step);
  }
  return "auto";
}

std::vector<std::size_t> resolve_grid(const ExperimentConfig& config, std::size_t n_train) {
  const GridSpec& g = config.grid;
  const std::size_t hi = g.hi == 0 ? config.mstar : g.hi;
  std::vector<std::size_t> grid;
  switch (g.kind) {
    case GridSpec::Kind::kAuto: {
      const bool selection = config.kind == ExperimentKind::kPruneCompare ||
                             config.kind == ExperimentKind::kMethodTable;
      grid = pruning::geometric_grid(1, config.mstar, selection ? 1.0 / 0.9 : 1.25);
      if (!selection && n_train <= config.mstar) grid.push_back(n_train);
      break;
    }
    case GridSpec::Kind::kList:
      grid = g.sizes;
      break;
    case GridSpec::Kind::kGeometric:
      if (g.lo < 1 || hi < g.lo || !(g.step > 1.0)) {
        throw ConfigError("grid", "geometric grid needs 1 <= LO <= HI and RATIO > 1");
      }
      grid = pruning::geometric_grid(g.lo, hi, g.step);
      break;
    case GridSpec::Kind::kLinear: {
      if (g.lo < 1 || hi < g.lo || !(g.step >= 1.0)) {
        throw ConfigError("grid", "linear grid needs 1 <= LO <= HI and STEP >= 1");
      }
      const auto step = static_cast<std::size_t>(g.step);
      for (std::size_t m = g.lo; m <= hi; m += step) grid.push_back(m);
      break;
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.empty()) throw ConfigError("grid", "resolves to no sizes");
  if (grid.front() < 1 || grid.back() > config.mstar) {
    throw ConfigError("grid", "sizes must lie in [1, mstar=" + std::to_string(config.mstar) + "]");
  }
  return grid;
}

// -- config ------------------------------------------------------------------

void validate(const ExperimentConfig& config) {
  if (config.mstar < 1) throw ConfigError("mstar", "must be >= 1");
  if (std::isnan(config.delta) || config.delta < 0.0) {
    throw ConfigError("delta", "must be a non-negative number");
  }
  if (config.seeds.empty()) throw ConfigError("seeds", "must not be empty");
  if (std::set<std::uint64_t>(config.seeds.begin(), config.seeds.end()).size() !=
      config.seeds.size()) {
    throw ConfigError("seeds", "must be distinct");
  }
  if (config.repeats.empty()) throw ConfigError("repeats", "must not be empty");
  if (std::set<std::uint64_t>(config.repeats.begin(), config.repeats.end()).size() !=
      config.repeats.size()) {
    throw ConfigError("repeats", "must be distinct");
  }
  if (!(config.rcond >= 0.0)) throw ConfigError("rcond", "must be non-negative");
  if (!(config.plateau_window >= 0.0)) throw ConfigError("plateau_window", "must be >= 0");
  if (config.threads < 0) throw ConfigError("threads", "must be >= 0");
  try {
    data::validate(config.split);
  } catch (const ContractViolation& e) {
    throw ConfigError("split", e.what());
  }
  if (const auto* src = std::get_if<SyntheticSource>(&config.source)) {
    if (src->n_train < 4 || src->n_train % 2 != 0) {
      throw ConfigError("source.n_train", "must be an even number >= 4");
    }
    if (src->n_test < 4 || src->n_test % 2 != 0) {
      throw ConfigError("source.n_test", "must be an even number >= 4");
    }
    if (src->n_samples < 4 || src->n_samples % 2 != 0) {
      throw ConfigError("source.n_samples", "must be an even number >= 4");
    }
    if (!(src->noise >= 0.0)) throw ConfigError("source.noise", "must be >= 0");
    if (config.kind == ExperimentKind::kJunkSweep && src->junk_counts.empty()) {
      throw ConfigError("source.junk_counts", "must not be empty");
    }
    if (config.kind == ExperimentKind::kMethodTable) {
      const auto sizes = data::split_sizes(src->n_samples, config.split);
      if (sizes[0] < 3) throw ConfigError("source.n_samples", "training part needs >= 3 samples");
    }
  } else {
    if (config.kind == ExperimentKind::kJunkSweep) {
      throw ConfigError("source", "junk-sweep needs a synthetic source");
    }
    if (std::get<CsvSource>(config.source).path.empty()) {
      throw ConfigError("source.path", "must not be empty");
    }
  }
  if (config.grid.kind == GridSpec::Kind::kList) {
    for (std::size_t m : config.grid.sizes) {
      if (m < 1 || m > config.mstar) {
        throw ConfigError("grid", "size " + std::to_string(m) + " outside [1, mstar]");
      }
    }
  }
}

namespace {

std::vector<std::uint64_t> read_seeds(const json& value) {
  std::vector<std::uint64_t> out;
  for (const auto& v : value) out.push_back(v.get<std::uint64_t>());
  return out;
}

void read_source(const json& value, ExperimentConfig& config) {
  const std::string type = value.value("type", std::string("synthetic"));
  if (type == "synthetic") {
    SyntheticSource src;
    for (const auto& [key, v] : value.items()) {
      if (key == "type") continue;
      if (key == "n_train") src.n_train = v.get<std::size_t>();
      else if (key == "n_test") src.n_test = v.get<std::size_t>();
      else if (key == "n_samples") src.n_samples = v.get<std::size_t>();
      else if (key == "noise") src.noise = v.get<double>();
      else if (key == "junk") src.junk = v.get<std::size_t>();
      else if (key == "junk_counts") src.junk_counts = v.get<std::vector<std::size_t>>();
      else if (key == "junk_distribution") src.junk_distribution = data::parse_junk_distribution(v.get<std::string>());
      else throw ConfigError("source." + key, "unknown key");
    }
    config.source = src;
  } else if (type == "csv") {
    CsvSource src;
    for (const auto& [key, v] : value.items()) {
      if (key == "type") continue;
      if (key == "path") {
        src.path = v.get<std::string>();
      } else if (key == "label_column") {
        if (v.is_string()) src.label_column = v.get<std::string>();
        else src.label_column = v.get<long>();
      } else {
        throw ConfigError("source." + key, "unknown key");
      }
    }
    config.source = src;
  } else {
    throw ConfigError("source.type", "expected synthetic or csv");
  }
}

void read_split(const json& value, data::SplitSpec& spec) {
  for (const auto& [key, v] : value.items()) {
    if (key == "train") spec.train_frac = v.get<double>();
    else if (key == "val") spec.val_frac = v.get<double>();
    else if (key == "test") spec.test_frac = v.get<double>();
    else if (key == "stratified") spec.stratified = v.get<bool>();
    else throw ConfigError("split." + key, "unknown key");
  }
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", e.what());
  }
  if (!root.is_object()) throw ConfigError("<file>", "expected a JSON object");
  ExperimentConfig config;
  for (const auto& [key, v] : root.items()) {
    try {
      if (key == "experiment") config.kind = parse_kind(v.get<std::string>());
      else if (key == "source") read_source(v, config);
      else if (key == "mstar") config.mstar = v.get<std::size_t>();
      else if (key == "delta") config.delta = v.is_string() && v.get<std::string>() == "inf" ? INFINITY : v.get<double>();
      else if (key == "activation") config.activation = parse_activation(v.get<std::string>());
      else if (key == "metric") config.metric = pruning::parse_metric(v.get<std::string>());
      else if (key == "seeds") config.seeds = read_seeds(v);
      else if (key == "repeats") config.repeats = read_seeds(v);
      else if (key == "split") read_split(v, config.split);
      else if (key == "grid") config.grid = GridSpec::parse(v.get<std::string>());
      else if (key == "standardize") config.standardize = v.get<bool>();
      else if (key == "refit") config.refit = v.get<bool>();
      else if (key == "plateau_window") config.plateau_window = v.get<double>();
      else if (key == "rcond") config.rcond = v.get<double>();
      else if (key == "threads") config.threads = v.get<int>();
      else if (key == "out_dir") config.out_dir = v.get<std::string>();
      else throw ConfigError(key, "unknown key");
    } catch (const ConfigError&) {
      throw;
    } catch (const json::exception& e) {
      throw ConfigError(key, e.what());
    } catch (const ContractViolation& e) {
      throw ConfigError(key, e.what());
    }
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string config_to_json(const ExperimentConfig& config) {
  json root;
  root["experiment"] = std::string(to_string(config.kind));
  if (const auto* src = std::get_if<SyntheticSource>(&config.source)) {
    root["source"] = {{"type", "synthetic"},
                      {"n_train", src->n_train},
                      {"n_test", src->n_test},
                      {"n_samples", src->n_samples},
                      {"noise", src->noise},
                      {"junk", src->junk},
                      {"junk_counts", src->junk_counts},
                      {"junk_distribution",
                       src->junk_distribution == data::JunkDistribution::kUniform ? "uniform"
                                                                                  : "gaussian"}};
  } else {
    const auto& csv = std::get<CsvSource>(config.source);
    json csv_json = {{"type", "csv"}, {"path", csv.path.string()}};
    if (const auto* name = std::get_if<std::string>(&csv.label_column)) {
      csv_json["label_column"] = *name;
    } else {
      csv_json["label_column"] = std::get<long>(csv.label_column);
    }
    root["source"] = csv_json;
  }
  root["mstar"] = config.mstar;
  root["delta"] = std::isinf(config.delta) ? json("inf") : json(config.delta);
  root["activation"] = std::string(to_string(config.activation));
  root["metric"] = std::string(pruning::to_string(config.metric));
  root["seeds"] = config.seeds;
  root["repeats"] = config.repeats;
  root["split"] = {{"train", config.split.train_frac},
                   {"val", config.split.val_frac},
                   {"test", config.split.test_frac},
                   {"stratified", config.split.stratified}};
  root["grid"] = config.grid.to_string();
  root["standardize"] = config.standardize;
  root["refit"] = config.refit;
  root["plateau_window"] = config.plateau_window;
  root["rcond"] = config.rcond;
  root["threads"] = config.threads;
  root["out_dir"] = config.out_dir.string();
  return root.dump(2);
}

// -- table -------------------------------------------------------------------

std::size_t Table::column(std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ContractViolation("table has no column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

double Table::number(std::size_t row, std::string_view name) const {
  const Cell& cell = rows.at(row).at(column(name));
  if (const auto* d = std::get_if<double>(&cell)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return static_cast<double>(*i);
  throw ContractViolation("column '" + std::string(name) + "' is not numeric");
}

std::string Table::text(std::size_t row, std::string_view name) const {
  const Cell& cell = rows.at(row).at(column(name));
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
  return std::to_string(std::get<std::int64_t>(cell));
}

// -- experiments -------------------------------------------------------------

Vector fit_with_fake_neuron(const HiddenLayer& layer, const Dataset& train, std::uint64_t seed,
                            double rcond) {
  const Matrix h = append_fake_neuron(hidden_output(layer, train.x()), seed);
  return linalg::min_norm_lsq(h, train.y(), rcond);
}

RunReport run_junk_sweep(const ExperimentConfig& input) {
  const ExperimentConfig config = with_kind(input, ExperimentKind::kJunkSweep);
  const Prepared prepared = prepare(config);
  const auto& src = std::get<SyntheticSource>(config.source);
  const auto grid = resolve_grid(config, src.n_train);

  auto records = run_cells(config, [&](std::size_t repeat, std::uint64_t seed) {
    std::vector<Record> out;
    for (std::size_t junk : src.junk_counts) {
      const SweepData d = sweep_data(prepared, repeat, seed, junk);
      for (std::size_t m : grid) {
        const ElmModel model = train(layer_for(config, m, d.train.dims(), seed), d.train, config.rcond);
        Record r;
        r.group = std::to_string(junk);
        r.size = m;
        r.value = accuracy_on(model, d.test);
        out.push_back(std::move(r));
      }
    }
    return out;
  });

  std::vector<std::string> order;
  for (std::size_t junk : src.junk_counts) order.push_back(std::to_string(junk));
  RunReport report{ExperimentKind::kJunkSweep, {}, std::move(records)};
  report.table.columns = {"junk_count", "M", "mean_acc", "sd_acc", "n_runs"};
  for (const Bucket& b : bucket(report.records, order)) {
    const auto s = metrics::summarize(b.values);
    report.table.rows.push_back({std::int64_t{std::stoll(b.group)}, as_int(b.size), s.mean, s.sd,
                                 as_int(s.n_runs)});
  }
  return report;
}

RunReport run_size_sweep(const ExperimentConfig& input) {
  const ExperimentConfig config = with_kind(input, ExperimentKind::kSizeSweep);
  const Prepared prepared = prepare(config);
  const std::size_t junk =
      std::holds_alternative<SyntheticSource>(config.source)
          ? std::get<SyntheticSource>(config.source).junk
          : 0;
  const auto grid = resolve_grid(config, training_size(prepared));

  auto records = run_cells(config, [&](std::size_t repeat, std::uint64_t seed) {
    const SweepData d = sweep_data(prepared, repeat, seed, junk);
    std::vector<Record> out;
    for (std::size_t m : grid) {
      const ElmModel model = train(layer_for(config, m, d.train.dims(), seed), d.train, config.rcond);
      Record r;
      r.group = "ELM";
      r.size = m;
      r.value = accuracy_on(model, d.test);
      r.extra = accuracy_on(model, d.train);
      out.push_back(std::move(r));
    }
    return out;
  });

  RunReport report{ExperimentKind::kSizeSweep, {}, std::move(records)};
  report.table.columns = {"M", "mean_train_acc", "sd_train_acc", "mean_test_acc", "sd_test_acc",
                          "n_runs"};
  for (const Bucket& b : bucket(report.records, {"ELM"})) {
    const auto train_s = metrics::summarize(b.extras);
    const auto test_s = metrics::summarize(b.values);
    report.table.rows.push_back({as_int(b.size), train_s.mean, train_s.sd, test_s.mean, test_s.sd,
                                 as_int(test_s.n_runs)});
  }
  return report;
}

RunReport run_fake_neuron(const ExperimentConfig& input) {
  const ExperimentConfig config = with_kind(input, ExperimentKind::kFakeNeuron);
  const Prepared prepared = prepare(config);
  const std::size_t junk =
      std::holds_alternative<SyntheticSource>(config.source)
          ? std::get<SyntheticSource>(config.source).junk
          : 0;
  const auto grid = resolve_grid(config, training_size(prepared));

  auto records = run_cells(config, [&](std::size_t repeat, std::uint64_t seed) {
    const SweepData d = sweep_data(prepared, repeat, seed, junk);
    std::vector<Record> out;
    for (std::size_t m : grid) {
      const Vector beta = fit_with_fake_neuron(layer_for(config, m, d.train.dims(), seed), d.train,
                                               derive_seed(derive_seed(seed, m), kFakeStream),
                                               config.rcond);
      Record r;
      r.group = "fake";
      r.size = m;
      r.value = std::abs(beta(beta.size() - 1));
      out.push_back(std::move(r));
    }
    return out;
  });

  RunReport report{ExperimentKind::kFakeNeuron, {}, std::move(records)};
  report.table.columns = {"M", "mean_abs_weight", "sd_abs_weight", "n_runs"};
  for (const Bucket& b : bucket(report.records, {"fake"})) {
    const auto s = metrics::summarize(b.values);
    report.table.rows.push_back({as_int(b.size), s.mean, s.sd, as_int(s.n_runs)});
  }
  return report;
}

RunReport run_prune_compare(const ExperimentConfig& input) {
  const ExperimentConfig config = with_kind(input, ExperimentKind::kPruneCompare);
  const Prepared prepared = prepare(config);
  const std::size_t junk =
      std::holds_alternative<SyntheticSource>(config.source)
          ? std::get<SyntheticSource>(config.source).junk
          : 0;
  const auto grid = resolve_grid(config, training_size(prepared));
  std::vector<std::size_t> schedule(grid.rbegin(), grid.rend());

  auto records = run_cells(config, [&](std::size_t repeat, std::uint64_t seed) {
    const SweepData d = sweep_data(prepared, repeat, seed, junk);
    std::vector<Record> out;
    auto emit = [&out](const char* method, const pruning::PruneTrace& trace) {
      for (const auto& step : trace.steps) {
        Record r;
        r.group = method;
        r.size = step.size;
        r.value = step.metric;
        out.push_back(std::move(r));
      }
    };
    pruning::ForwardOptions fwd;
    fwd.metric = config.metric;
    fwd.activation = config.activation;
    fwd.rcond = config.rcond;
    fwd.plateau_window = 0.0;
    emit("FWD", pruning::forward_grow(d.train, d.test, grid, seed, fwd).trace);

    const ElmModel full =
        train(layer_for(config, config.mstar, d.train.dims(), seed), d.train, config.rcond);
    emit("RND", pruning::random_prune(full, d.test, pruning::kNeverStop, schedule,
                                      derive_seed(seed, kRandomPruneStream), config.metric)
                    .trace);
    emit("RBP", pruning::rbp(full, d.test, pruning::kNeverStop, schedule, config.metric).trace);
    return out;
  });

  RunReport report{ExperimentKind::kPruneCompare, {}, std::move(records)};
  report.table.columns = {"method", "M", "mean_metric", "sd_metric", "n_runs"};
  for (const Bucket& b : bucket(report.records, {"FWD", "RND", "RBP"})) {
    const auto s = metrics::summarize(b.values);
    report.table.rows.push_back({b.group, as_int(b.size), s.mean, s.sd, as_int(s.n_runs)});
  }
  return report;
}

RunReport run_method_table(const ExperimentConfig& input) {
  const ExperimentConfig config = with_kind(input, ExperimentKind::kMethodTable);
  const Prepared prepared = prepare(config);
  const auto grid = resolve_grid(config, training_size(prepared));
  std::vector<std::size_t> schedule(grid.rbegin(), grid.rend());

  auto records = run_cells(config, [&](std::size_t repeat, std::uint64_t seed) {
    const data::Split s = table_split(prepared, repeat, seed);
    const std::uint64_t fingerprint = s.fingerprint();
    std::vector<Record> out;
    auto emit = [&](const char* method, const ElmModel& model, double seconds) {
      Record r;
      r.group = method;
      r.size = model.neurons();
      r.value = test_metric(config, model, s.test);
      r.wall_seconds = seconds;
      r.split_fingerprint = fingerprint;
      out.push_back(std::move(r));
    };

    const auto std_result =
        pruning::std_select(s.train, s.val, seed, config.activation, config.metric, config.rcond);
    emit("STD", std_result.model, std_result.wall_seconds);

    pruning::ForwardOptions fwd;
    fwd.delta = config.delta;
    fwd.metric = config.metric;
    fwd.activation = config.activation;
    fwd.plateau_window = config.plateau_window;
    fwd.rcond = config.rcond;
    const auto fwd_result = pruning::forward_grow(s.train, s.val, grid, seed, fwd);
    emit("FWD", fwd_result.model, fwd_result.wall_seconds);

    const auto start = Clock::now();
    const ElmModel full =
        train(layer_for(config, config.mstar, s.train.dims(), seed), s.train, config.rcond);
    const auto rbp_result = pruning::rbp(full, s.val, config.delta, schedule, config.metric,
                                         config.refit ? &s.train : nullptr, config.rcond);
    emit("RBP", rbp_result.model, seconds_since(start));
    return out;
  });

  RunReport report{ExperimentKind::kMethodTable, {}, std::move(records)};
  report.table.columns = {"method",      "metric",      "mean_metric", "sd_metric", "mean_time_s",
                          "sd_time_s",   "mean_M",      "sd_M",        "n_runs"};
  report.table.timing_columns = {"mean_time_s", "sd_time_s"};
  const std::vector<std::string> methods{"STD", "FWD", "RBP"};
  for (const std::string& method : methods) {
    std::vector<double> values;
    std::vector<double> times;
    std::vector<double> sizes;
    for (const Record& r : report.records) {
      if (r.group != method) continue;
      values.push_back(r.value);
      times.push_back(r.wall_seconds);
      sizes.push_back(static_cast<double>(r.size));
    }
    const auto v = metrics::summarize(values);
    const auto t = metrics::summarize(times);
    const auto m = metrics::summarize(sizes);
    report.table.rows.push_back({method, std::string(pruning::to_string(config.metric)), v.mean,
                                 v.sd, t.mean, t.sd, m.mean, m.sd, as_int(v.n_runs)});
  }
  return report;
}

RunReport run(const ExperimentConfig& config) {
  switch (config.kind) {
    case ExperimentKind::kJunkSweep: return run_junk_sweep(config);
    case ExperimentKind::kSizeSweep: return run_size_sweep(config);
    case ExperimentKind::kFakeNeuron: return run_fake_neuron(config);
    case ExperimentKind::kPruneCompare: return run_prune_compare(config);
    case ExperimentKind::kMethodTable: return run_method_table(config);
  }
  throw ConfigError("experiment", "unhandled experiment kind");
}

// -- output ------------------------------------------------------------------

std::string format_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out += (c ? "," : "") + table.columns[c];
  }
  out += '\n';
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      out += (c ? "," : "") + table.text(r, table.columns[c]);
    }
    out += '\n';
  }
  return out;
}

std::string format_text(const Table& table) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back(table.columns);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::vector<std::string> line;
    for (const auto& col : table.columns) {
      const Cell& cell = table.rows[r][table.column(col)];
      if (const auto* d = std::get_if<double>(&cell)) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", *d);
        line.emplace_back(buf);
      } else {
        line.push_back(table.text(r, col));
      }
    }
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(table.columns.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  }
  std::string out;
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      out += line[c];
      if (c + 1 < line.size()) out += std::string(width[c] - line[c].size() + 2, ' ');
    }
    out += '\n';
  }
  return out;
}

std::string format_summary_json(const RunReport& report, const ExperimentConfig& config) {
  json root;
  root["experiment"] = std::string(to_string(report.kind));
  root["rng"] = std::string(Rng::kName);
  root["config"] = json::parse(config_to_json(config));
  root["columns"] = report.table.columns;
  root["timing_columns"] = report.table.timing_columns;
  json rows = json::array();
  for (const auto& row : report.table.rows) {
    json line = json::array();
    for (const Cell& cell : row) {
      std::visit([&line](const auto& v) { line.push_back(v); }, cell);
    }
    rows.push_back(std::move(line));
  }
  root["rows"] = std::move(rows);
  json records = json::array();
  for (const Record& r : report.records) {
    char hash[17];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(r.split_fingerprint));
    records.push_back({{"group", r.group},
                       {"repeat", r.repeat},
                       {"seed", r.seed},
                       {"M", r.size},
                       {"value", r.value},
                       {"extra", r.extra},
                       {"wall_seconds", r.wall_seconds},
                       {"split_fingerprint", hash}});
  }
  root["records"] = std::move(records);
  return root.dump(2);
}

WrittenFiles write_report(const RunReport& report, const ExperimentConfig& config,
                          const std::filesystem::path& out_dir, const std::string& timestamp) {
  std::filesystem::create_directories(out_dir);
  WrittenFiles files{out_dir / (std::string(to_string(report.kind)) + "_" + timestamp + ".csv"),
                     out_dir / "summary.json"};
  {
    std::ofstream csv(files.csv, std::ios::binary);
    csv << format_csv(report.table);
    if (!csv) throw std::runtime_error("cannot write " + files.csv.string());
  }
  {
    std::ofstream summary(files.summary, std::ios::binary);
    summary << format_summary_json(report, config) << '\n';
    if (!summary) throw std::runtime_error("cannot write " + files.summary.string());
  }
  return files;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

}  // namespace elmprune::experiments
