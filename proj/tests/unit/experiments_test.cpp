#include "elmprune/experiments.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace elmprune::experiments {
namespace {

std::filesystem::path temp_dir(const std::string& name) {
  const char* env = std::getenv("ELMPRUNE_TEST_TMP");
  auto dir = std::filesystem::path(env ? env : std::filesystem::temp_directory_path().string()) /
             ("experiments_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

ExperimentConfig small_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  SyntheticSource src;
  src.n_train = 20;
  src.n_test = 40;
  src.n_samples = 60;
  src.junk = 5;
  src.junk_counts = {0, 5};
  c.source = src;
  c.mstar = 60;
  c.seeds = {1, 2, 3};
  c.grid = GridSpec::parse("list:5,20,60");
  return c;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Kind, NamesRoundTrip) {
  for (auto kind : {ExperimentKind::kJunkSweep, ExperimentKind::kSizeSweep,
                    ExperimentKind::kFakeNeuron, ExperimentKind::kPruneCompare,
                    ExperimentKind::kMethodTable}) {
    EXPECT_EQ(parse_kind(to_string(kind)), kind);
  }
  EXPECT_THROW(parse_kind("tables"), ContractViolation);
}

TEST(GridSpec, ParsesTextForms) {
  EXPECT_EQ(GridSpec::parse("auto").kind, GridSpec::Kind::kAuto);
  const auto list = GridSpec::parse("list:5,10,20");
  EXPECT_EQ(list.sizes, (std::vector<std::size_t>{5, 10, 20}));
  const auto geom = GridSpec::parse("geom:1:0:1.5");
  EXPECT_EQ(geom.kind, GridSpec::Kind::kGeometric);
  EXPECT_EQ(geom.hi, 0u);
  for (const char* text : {"list:5,10,20", "geom:2:100:1.5", "lin:10:50:10", "auto"}) {
    EXPECT_EQ(GridSpec::parse(GridSpec::parse(text).to_string()).to_string(),
              GridSpec::parse(text).to_string());
  }
  EXPECT_THROW(GridSpec::parse("bogus"), ConfigError);
  EXPECT_THROW(GridSpec::parse("list:"), ConfigError);
  EXPECT_THROW(GridSpec::parse("geom:1:10"), ConfigError);
}

TEST(ResolveGrid, BoundsAndAuto) {
  auto c = small_config(ExperimentKind::kSizeSweep);
  c.grid = GridSpec::parse("lin:10:0:10");
  EXPECT_EQ(resolve_grid(c, 20), (std::vector<std::size_t>{10, 20, 30, 40, 50, 60}));
  c.grid = GridSpec::parse("auto");
  const auto g = resolve_grid(c, 20);
  EXPECT_NE(std::find(g.begin(), g.end(), 20u), g.end());
  EXPECT_EQ(g.back(), 60u);
  c.grid = GridSpec::parse("list:5,61");
  EXPECT_THROW(resolve_grid(c, 20), ConfigError);
}

TEST(Config, ValidationNamesTheField) {
  auto c = small_config(ExperimentKind::kSizeSweep);
  c.seeds.clear();
  try {
    validate(c);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "seeds");
  }
  c = small_config(ExperimentKind::kSizeSweep);
  c.mstar = 0;
  EXPECT_THROW(validate(c), ConfigError);
  c = small_config(ExperimentKind::kSizeSweep);
  c.delta = -1.0;
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  auto c = small_config(ExperimentKind::kMethodTable);
  c.delta = pruning::kNeverStop;
  c.metric = pruning::SelectionMetric::kAuc;
  c.activation = Activation::kRelu;
  c.repeats = {3, 4};
  const ExperimentConfig back = parse_config(config_to_json(c));
  EXPECT_EQ(config_to_json(back), config_to_json(c));
  EXPECT_EQ(back.kind, ExperimentKind::kMethodTable);
  EXPECT_TRUE(std::isinf(back.delta));
}

TEST(Config, RejectsUnknownKeysAndBadJson) {
  try {
    parse_config(R"({"experiment": "size-sweep", "mstar_typo": 5})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "mstar_typo");
  }
  EXPECT_THROW(parse_config("{"), ConfigError);
  EXPECT_THROW(parse_config(R"({"mstar": "many"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"source": {"type": "ftp"}})"), ConfigError);
}

TEST(JunkSweep, RowCountMatchesGrid) {
  auto c = small_config(ExperimentKind::kJunkSweep);
  std::get<SyntheticSource>(c.source).junk_counts = {0};
  const RunReport r = run(c);
  EXPECT_EQ(r.table.rows.size(), 3u);
  EXPECT_EQ(r.table.columns,
            (std::vector<std::string>{"junk_count", "M", "mean_acc", "sd_acc", "n_runs"}));
  EXPECT_EQ(r.records.size(), 3u * 3u);
}

TEST(SizeSweep, ShapeAndInterpolation) {
  auto c = small_config(ExperimentKind::kSizeSweep);
  c.repeats = {0, 1};
  const RunReport r = run(c);
  ASSERT_EQ(r.table.rows.size(), 3u);
  EXPECT_EQ(r.table.number(1, "M"), 20.0);
  EXPECT_EQ(r.table.number(1, "mean_train_acc"), 1.0);
  EXPECT_EQ(r.table.number(0, "n_runs"), 6.0);
  for (std::size_t row = 0; row < 3; ++row) {
    EXPECT_GE(r.table.number(row, "mean_test_acc"), 0.0);
    EXPECT_LE(r.table.number(row, "mean_test_acc"), 1.0);
  }
}

TEST(FakeNeuron, BetaIncludesFakeWeight) {
  const auto layer = init_hidden(7, 2, Activation::kTanh, 3);
  const Dataset train_set = data::gen_two_moons(10, 0.1, 4);
  const Vector beta = fit_with_fake_neuron(layer, train_set, 5);
  EXPECT_EQ(beta.size(), 8);
  const Matrix h = append_fake_neuron(hidden_output(layer, train_set.x()), 5);
  EXPECT_TRUE(beta.isApprox(linalg::min_norm_lsq(h, train_set.y())));
  const RunReport r = run(small_config(ExperimentKind::kFakeNeuron));
  EXPECT_EQ(r.table.rows.size(), 3u);
}

TEST(PruneCompare, SingletonGridGivesThreeRows) {
  auto c = small_config(ExperimentKind::kPruneCompare);
  c.grid = GridSpec::parse("list:60");
  const RunReport r = run(c);
  ASSERT_EQ(r.table.rows.size(), 3u);
  std::set<std::string> methods;
  for (std::size_t i = 0; i < 3; ++i) methods.insert(r.table.text(i, "method"));
  EXPECT_EQ(methods, (std::set<std::string>{"FWD", "RND", "RBP"}));
}

TEST(MethodTable, ThreeRowsAndSharedSplits) {
  auto c = small_config(ExperimentKind::kMethodTable);
  c.repeats = {0, 1};
  const RunReport r = run(c);
  ASSERT_EQ(r.table.rows.size(), 3u);
  EXPECT_EQ(r.table.text(0, "method"), "STD");
  EXPECT_EQ(r.table.text(1, "method"), "FWD");
  EXPECT_EQ(r.table.text(2, "method"), "RBP");
  ASSERT_EQ(r.records.size(), 3u * 3u * 2u);
  // Each (repeat, seed) cell holds one record per method on one split.
  for (std::size_t i = 0; i < r.records.size(); i += 3) {
    EXPECT_EQ(r.records[i].split_fingerprint, r.records[i + 1].split_fingerprint);
    EXPECT_EQ(r.records[i].split_fingerprint, r.records[i + 2].split_fingerprint);
    EXPECT_EQ(r.records[i].seed, r.records[i + 2].seed);
  }
  EXPECT_NE(r.records[0].split_fingerprint, r.records[9].split_fingerprint);
  EXPECT_EQ(r.table.timing_columns, (std::vector<std::string>{"mean_time_s", "sd_time_s"}));
}

TEST(MethodTable, CsvSourceIsResplitPerRepeat) {
  const auto dir = temp_dir("csv");
  const Dataset pool = data::add_junk_features(data::gen_two_moons(30, 0.1, 1), 3, 2);
  data::write_csv(dir / "pool.csv", pool);
  auto c = small_config(ExperimentKind::kMethodTable);
  c.source = CsvSource{dir / "pool.csv", std::string("label")};
  c.standardize = true;
  c.repeats = {5, 6};
  const RunReport r = run(c);
  EXPECT_EQ(r.records.size(), 18u);
  EXPECT_NE(r.records[0].split_fingerprint, r.records[9].split_fingerprint);
  c.source = CsvSource{dir / "absent.csv", -1L};
  EXPECT_THROW(run(c), data::CsvError);
}

TEST(Report, ReproducibleApartFromTiming) {
  for (auto kind : {ExperimentKind::kSizeSweep, ExperimentKind::kMethodTable}) {
    const auto c = small_config(kind);
    Table a = run(c).table;
    Table b = run(c).table;
    for (Table* t : {&a, &b}) {
      for (const auto& col : t->timing_columns) {
        const std::size_t idx = t->column(col);
        for (auto& row : t->rows) row[idx] = 0.0;
      }
    }
    EXPECT_EQ(format_csv(a), format_csv(b));
  }
}

TEST(Report, ThreadCountDoesNotChangeResults) {
  auto c = small_config(ExperimentKind::kPruneCompare);
  c.threads = 1;
  const std::string serial = format_csv(run(c).table);
  c.threads = 4;
  EXPECT_EQ(format_csv(run(c).table), serial);
}

TEST(Report, WritesCsvAndSummary) {
  const auto dir = temp_dir("write");
  const auto c = small_config(ExperimentKind::kJunkSweep);
  const RunReport r = run(c);
  const WrittenFiles files = write_report(r, c, dir, "20260101T000000Z");
  EXPECT_EQ(files.csv.filename(), "junk-sweep_20260101T000000Z.csv");
  EXPECT_EQ(files.summary.filename(), "summary.json");
  EXPECT_EQ(read_file(files.csv), format_csv(r.table));
  const auto summary = nlohmann::json::parse(read_file(files.summary));
  EXPECT_EQ(summary["rng"], "mt19937_64/v1");
  EXPECT_EQ(summary["records"].size(), r.records.size());
  EXPECT_EQ(summary["columns"].size(), r.table.columns.size());
}

TEST(Report, TextTableHasHeaderAndRows) {
  const RunReport r = run(small_config(ExperimentKind::kJunkSweep));
  const std::string text = format_text(r.table);
  EXPECT_NE(text.find("junk_count"), std::string::npos);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), static_cast<long>(r.table.rows.size() + 1));
}

TEST(Timestamp, Format) {
  const std::string ts = utc_timestamp();
  ASSERT_EQ(ts.size(), 16u);
  EXPECT_EQ(ts[8], 'T');
  EXPECT_EQ(ts.back(), 'Z');
}

}  // namespace
}  // namespace elmprune::experiments
