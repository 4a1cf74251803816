#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ptkr/experiments/cli.hpp"

using namespace ptkr;
using namespace ptkr::experiments;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ptkr_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

int run_cli(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
  args.insert(args.begin(), "ptkr");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int rc = cli_main(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return rc;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Table, RoundTripIsExact) {
  ResultTable t({{"x", ColumnType::real}, {"n", ColumnType::integer}, {"s", ColumnType::text}});
  t.set_meta("source", "unit test");
  t.set_meta("k", "v = w");
  t.add_row({0.1, std::int64_t{-3}, std::string("ok")});
  t.add_row({1.0 / 3.0, std::int64_t{1} << 40, std::string("nan row")});
  t.add_row({std::nan(""), std::int64_t{0}, std::string("")});
  t.add_row({-1e-300, std::int64_t{7}, std::string("x")});
  const ResultTable back = ResultTable::from_csv(t.to_csv());
  EXPECT_TRUE(back == t);
  EXPECT_EQ(back.to_csv(), t.to_csv());
  EXPECT_EQ(*back.meta("k"), "v = w");
}

TEST(Table, SeventeenDigits) {
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(parse_real(format_real(two_pi)), two_pi);
  EXPECT_EQ(format_real(2.0), "2");
}

TEST(Table, RejectsMalformedInput) {
  ResultTable t({{"x", ColumnType::real}});
  EXPECT_THROW(t.add_row({std::int64_t{1}}), Error);
  EXPECT_THROW(t.add_row({1.0, 2.0}), Error);
  EXPECT_THROW(ResultTable::from_csv("x\n1\n"), Error);
  EXPECT_THROW(ResultTable::from_csv("# column_types = real\nx\n1,2\n"), Error);
  ResultTable s({{"s", ColumnType::text}});
  EXPECT_THROW(s.add_row({std::string("a,b")}), Error);
}

TEST(Config, ParsesFlatKeyValue) {
  std::istringstream is("# comment\nK = 5.5\n\n  lambdas = 0.1, 0.2 ,0.3\n--kicks=10\nquick = true\n");
  const Config c = parse_config(is);
  EXPECT_EQ(c.get_double("K", 0), 5.5);
  EXPECT_EQ(c.get_list("lambdas", {}), (std::vector<double>{0.1, 0.2, 0.3}));
  EXPECT_EQ(c.get_int("kicks", 0), 10);
  EXPECT_TRUE(c.get_bool("quick", false));
  EXPECT_NO_THROW(c.reject_unused());
  std::istringstream bad("K 5\n");
  EXPECT_THROW(parse_config(bad), ConfigError);
}

TEST(Config, TypeErrorsAndUnknownKeys) {
  Config c;
  c.set("K", "five");
  c.set("typo", "1");
  EXPECT_THROW((void)c.get_double("K", 0), ConfigError);
  EXPECT_THROW(c.reject_unused(), ConfigError);
}

TEST(Config, ArithmeticGrid) {
  const auto g = arithmetic_grid(0.0, 0.3, 0.1);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_NEAR(g.back(), 0.3, 1e-15);
  EXPECT_THROW(arithmetic_grid(0, 1, 0), ConfigError);
}

TEST(Config, ThreadOverride) {
  ::setenv("PTKR_THREADS", "3", 1);
  EXPECT_EQ(worker_count(8), 3);
  ::setenv("PTKR_THREADS", "zero", 1);
  EXPECT_THROW(worker_count(1), ConfigError);
  ::unsetenv("PTKR_THREADS");
  EXPECT_EQ(worker_count(5), 5);
}

TEST(Figures, Fig1QuickZeroGainRow) {
  Config c;
  c.set("quick", "true");
  c.set("lambdas", "0,0.3");
  const FigureOutput out = run_fig1(fig1_settings(c));
  ASSERT_EQ(out.table.size(), 4u);
  const auto lam = out.table.real_column("lambda");
  const auto m = out.table.real_column("mean_abs_imag");
  for (std::size_t i = 0; i < lam.size(); ++i) {
    if (lam[i] == 0.0) EXPECT_LE(m[i], 1e-10);
    if (lam[i] == 0.3) EXPECT_GT(m[i], 1e-6);
  }
  EXPECT_EQ(*out.table.meta("config.N"), "512");
}

TEST(Figures, Fig2ControlRunAndReproducibility) {
  Config c;
  c.set("quick", "true");
  c.set("lambdas", "0,0.09");
  c.set("kicks", "60");
  const auto s = fig2_settings(c);
  const FigureOutput a = run_fig2(s);
  const FigureOutput b = run_fig2(s);
  EXPECT_EQ(a.table.to_csv(), b.table.to_csv());
  const auto lam = a.table.real_column("lambda");
  const auto mp = a.table.real_column("mean_p");
  for (std::size_t i = 0; i < lam.size(); ++i)
    if (lam[i] == 0.0) EXPECT_LE(std::abs(mp[i]), 1e-10);
}

TEST(Figures, WorkerCountDoesNotChangeResults) {
  Config c1, c8;
  for (Config* c : {&c1, &c8}) {
    c->set("quick", "true");
    c->set("ks", "4,6.283185307179586,9,12.5");
    c->set("kicks", "60");
    c->set("window", "50");
  }
  c1.set("workers", "1");
  c8.set("workers", "8");
  ::unsetenv("PTKR_THREADS");
  const auto a = run_fig4(fig4_settings(c1));
  const auto b = run_fig4(fig4_settings(c8));
  EXPECT_EQ(a.table.to_csv(), b.table.to_csv());
  const auto dc = a.table.real_column("D_classical");
  const auto dp = a.table.real_column("D_predicted");
  for (std::size_t i = 0; i < dc.size(); ++i) EXPECT_NEAR(dc[i], dp[i], 1e-9);
}

TEST(Figures, ConfigEchoReproducesTheRun) {
  Config c;
  c.set("K", "5");
  c.set("lambda", "0.2");
  c.set("N", "256");
  c.set("kicks", "80");
  const FigureOutput a = run_evolve(evolve_settings(c));
  Config echo;
  for (const auto& [k, v] : a.table.metadata())
    if (k.starts_with("config.") && k != "config.kind") echo.set(k.substr(7), v);
  const FigureOutput b = run_evolve(evolve_settings(echo));
  EXPECT_TRUE(a.table == b.table);
}

TEST(Cli, EvolveUnitaritySmoke) {
  TempDir d;
  const auto out = (d.path / "e.csv").string();
  ASSERT_EQ(run_cli({"evolve", "--K", "5", "--lambda", "0", "--hbar", "1", "--kicks", "100", "--out", out}), 0);
  const ResultTable t = load_table(out);
  EXPECT_LE(std::abs(t.real_column("log_norm").back()), 1e-10);
  EXPECT_EQ(t.size(), 101u);
}

TEST(Cli, Fig1QuickWritesAParseableTable) {
  TempDir d;
  const auto out = (d.path / "f1.csv").string();
  ASSERT_EQ(run_cli({"fig1", "--quick", "--lambdas", "0,0.3", "--out", out}), 0);
  const ResultTable t = load_table(out);
  EXPECT_EQ(t.columns().size(), 4u);
  EXPECT_EQ(t.to_csv(), slurp(out));
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
  TempDir d;
  const auto cfg = d.path / "run.cfg";
  std::ofstream(cfg) << "K = 5\nlambda = 0\nkicks = 30\nN = 128\n";
  const auto out = (d.path / "e.csv").string();
  ASSERT_EQ(run_cli({"evolve", "--config", cfg.string(), "--kicks", "20", "--out", out}), 0);
  const ResultTable t = load_table(out);
  EXPECT_EQ(t.size(), 21u);
  EXPECT_EQ(*t.meta("config.N"), "128");
}

TEST(Cli, ExitCodes) {
  TempDir d;
  std::string err;
  EXPECT_EQ(run_cli({"fig1", "--bogus"}, nullptr, &err), 1);
  EXPECT_NE(err.find("--bogus"), std::string::npos);
  EXPECT_EQ(run_cli({}), 1);
  const auto missing = (d.path / "nowhere" / "x.csv").string();
  EXPECT_EQ(run_cli({"evolve", "--quick", "--out", missing}, nullptr, &err), 1);
  EXPECT_NE(err.find((d.path / "nowhere").string()), std::string::npos);
  EXPECT_EQ(run_cli({"evolve", "--K", "-1", "--out", (d.path / "a.csv").string()}), 1);
  const auto cfg = d.path / "typo.cfg";
  std::ofstream(cfg) << "kiks = 3\n";
  EXPECT_EQ(run_cli({"evolve", "--config", cfg.string(), "--out", (d.path / "b.csv").string()}), 1);
  // lattice far too small for the run: the current hits the edge and D cannot be measured
  EXPECT_EQ(run_cli({"fig4", "--ks", "6.3", "--N", "64", "--kicks", "60", "--window", "50", "--out",
                     (d.path / "c.csv").string()}),
            0);
  EXPECT_EQ(run_cli({"oracle-compare", "--lambda", "0.01", "--kicks", "10", "--out", (d.path / "o.csv").string()}),
            2);
}
