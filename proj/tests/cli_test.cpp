#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lassokit/cli.hpp"

using namespace lassokit;
namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct Result {
  int code = -1;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "lassokit");
  std::vector<const char *> argv;
  for (const auto &a : args)
    argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string &name) {
  const fs::path d = fs::temp_directory_path() / ("lassokit_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void put(const fs::path &p, const std::string &text) { std::ofstream(p) << text; }

Result gen(const fs::path &dir, std::vector<std::string> extra = {}) {
  std::vector<std::string> a{"gen", "--m", "64", "--n", "128", "--k", "8", "--seed", "5",
                             "--out", dir.string()};
  a.insert(a.end(), extra.begin(), extra.end());
  return run(a);
}

} // namespace

TEST(Solve, TrivialOneDimensional) {
  const fs::path d = scratch("trivial");
  put(d / "A.mtx", "%%MatrixMarket matrix array real general\n1 1\n1\n");
  put(d / "b.txt", "2\n");
  put(d / "m.txt", "A=A.mtx\nb=b.txt\ntau=1\n");
  const Result r = run({"solve", (d / "m.txt").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["status"], "optimal");
  EXPECT_EQ(j["gap"], 0.0);
  EXPECT_DOUBLE_EQ(j["f"].get<double>(), 0.5);
  std::vector<std::string> keys;
  for (const auto &item : j.items())
    keys.push_back(item.key());
  const std::vector<std::string> expected{"schema",   "problem",  "solver",    "options",
                                          "iterations", "qn_steps", "pg_steps", "runtime_s",
                                          "f",        "gap",      "status"};
  EXPECT_EQ(keys, expected);
}

TEST(Solve, MissingBIsBadInput) {
  const fs::path d = scratch("missing");
  put(d / "A.mtx", "%%MatrixMarket matrix array real general\n1 1\n1\n");
  put(d / "m.txt", "A=A.mtx\ntau=1\n");
  const Result r = run({"solve", (d / "m.txt").string()});
  EXPECT_EQ(r.code, 64);
  EXPECT_NE(r.err.find("'b'"), std::string::npos) << r.err;
}

TEST(Solve, SigmaManifestIsRejected) {
  const fs::path d = scratch("sigmasolve");
  ASSERT_EQ(gen(d, {"--sigma-frac", "0.01"}).code, 0);
  const Result r = run({"solve", (d / "manifest.txt").string()});
  EXPECT_EQ(r.code, 64);
  EXPECT_NE(r.err.find("sigma"), std::string::npos);
}

TEST(Solve, SolversAgreeOnGeneratedInstance) {
  const fs::path d = scratch("agree");
  ASSERT_EQ(gen(d).code, 0);
  const std::string m = (d / "manifest.txt").string();
  const Result a = run({"solve", m, "--solver", "spg", "--max-iter", "5000"});
  const Result b = run({"solve", m, "--solver", "hybrid", "--max-iter", "5000"});
  ASSERT_EQ(a.code, 0) << a.out;
  ASSERT_EQ(b.code, 0) << b.out;
  const double fa = Json::parse(a.out)["f"], fb = Json::parse(b.out)["f"];
  EXPECT_LE(std::abs(fa - fb) / std::max(fb, 1e-3), 1e-8);
  EXPECT_EQ(Json::parse(a.out)["qn_steps"], 0);
}

TEST(Solve, ExitCodeForIterationLimit) {
  const fs::path d = scratch("iterlimit");
  ASSERT_EQ(gen(d).code, 0);
  const Result r =
      run({"solve", (d / "manifest.txt").string(), "--max-iter", "1", "--tol", "1e-14"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(Json::parse(r.out)["status"], "iter_limit");
}

TEST(Solve, TraceCsv) {
  const fs::path d = scratch("trace");
  ASSERT_EQ(gen(d).code, 0);
  const fs::path t = d / "trace.csv";
  const Result r = run({"solve", (d / "manifest.txt").string(), "--line-search", "arc-global",
                        "--trace", t.string()});
  ASSERT_EQ(r.code, 0);
  std::istringstream csv(slurp(t));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "iteration,f,gap,kind,face_dim");
  long rows = 0;
  while (std::getline(csv, line))
    ++rows;
  EXPECT_EQ(rows, Json::parse(r.out)["iterations"].get<long>());
}

TEST(Solve, BadFlagsAreBadInput) {
  EXPECT_EQ(run({"solve", "x", "--solver", "newton"}).code, 64);
  EXPECT_EQ(run({"frobnicate"}).code, 64);
  EXPECT_EQ(run({}).code, 64);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Root, GeneratedSigmaInstance) {
  const fs::path d = scratch("root");
  ASSERT_EQ(gen(d, {"--kind", "sphere-walk", "--gamma", "0.1", "--sigma-frac", "0.01"}).code, 0);
  const Result r = run({"root", (d / "manifest.txt").string()});
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["status"], "root");
  EXPECT_LE(j["relative_misfit"].get<double>(), 1e-5);
}

TEST(Root, TauManifestIsRejected) {
  const fs::path d = scratch("roottau");
  ASSERT_EQ(gen(d).code, 0);
  EXPECT_EQ(run({"root", (d / "manifest.txt").string()}).code, 64);
}

TEST(Gen, DeterministicBundles) {
  const fs::path d1 = scratch("gen1"), d2 = scratch("gen2");
  const std::vector<std::string> flags{"--kind", "sphere-walk", "--gamma", "0.01", "--dist",
                                       "pm-one", "--noise", "0.05"};
  ASSERT_EQ(gen(d1, flags).code, 0);
  ASSERT_EQ(gen(d2, flags).code, 0);
  for (const char *f : {"A.mtx", "b.txt", "x0.txt", "manifest.txt", "meta.json"})
    EXPECT_EQ(slurp(d1 / f), slurp(d2 / f)) << f;
  const Json meta = Json::parse(slurp(d1 / "meta.json"));
  EXPECT_EQ(meta["seed"], 5);
  EXPECT_EQ(meta["spec"]["kind"], "sphere_walk");
  EXPECT_GT(meta["x0_norm1"].get<double>(), 0.0);
  EXPECT_GT(meta["b_norm2"].get<double>(), 0.0);
  const Vector x0 = read_vector(d1 / "x0.txt");
  EXPECT_EQ((x0.array() != 0.0).count(), 8);
  EXPECT_EQ(x0.cwiseAbs().maxCoeff(), 1.0);
}

TEST(Gen, RejectsConflictingFlags) {
  const fs::path d = scratch("genbad");
  EXPECT_EQ(gen(d, {"--tau-mult", "1", "--sigma-frac", "0.1"}).code, 64);
  EXPECT_EQ(gen(d, {"--kind", "sphere-walk", "--gamma", "3"}).code, 64);
  EXPECT_EQ(gen(d, {"--dist", "cauchy"}).code, 64);
}

TEST(Bench, EmptySweepIsHeaderOnly) {
  const fs::path d = scratch("benchempty");
  put(d / "sweep.json", R"({"k": [5], "dist": ["gaussian"], "solvers": ["spg"], "tol": [1e-6]})");
  const Result r = run({"bench", (d / "sweep.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "k,dist,solver,tol,mean_time,mean_iters,pct_solved,median_gap,"
                   "mean_speedup_vs_spg\n");
  put(d / "none.json", "{}");
  EXPECT_EQ(run({"bench", (d / "none.json").string()}).out, r.out);
}

TEST(Bench, SingleInstanceMatchesSolve) {
  const fs::path d = scratch("bench1");
  put(d / "sweep.json", R"({"m": 64, "n": 128, "instances": 1, "seed": 5, "k": [8],
      "dist": ["gaussian"], "solvers": ["spg", "hybrid"], "tol": [1e-6]})");
  const fs::path rec = d / "runs.jsonl";
  const Result r = run({"bench", (d / "sweep.json").string(), "--records", rec.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(gen(d / "inst").code, 0);
  std::istringstream csv(r.out);
  std::string line;
  std::getline(csv, line);
  for (const char *solver : {"spg", "hybrid"}) {
    ASSERT_TRUE(std::getline(csv, line));
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');)
      cells.push_back(c);
    ASSERT_EQ(cells.size(), 9u) << line;
    EXPECT_EQ(cells[2], solver);
    const Result s = run({"solve", (d / "inst" / "manifest.txt").string(), "--solver", solver});
    const Json j = Json::parse(s.out);
    EXPECT_EQ(std::stol(cells[5]), j["iterations"].get<long>());
    EXPECT_EQ(cells[6], j["status"] == "optimal" ? "100" : "0");
  }
  EXPECT_FALSE(std::getline(csv, line));
  std::istringstream lines(slurp(rec));
  int n = 0;
  while (std::getline(lines, line)) {
    EXPECT_EQ(Json::parse(line)["schema"], 1);
    ++n;
  }
  EXPECT_EQ(n, 2);
}

TEST(Bench, BadConfigIsBadInput) {
  const fs::path d = scratch("benchbad");
  put(d / "a.json", "{not json");
  put(d / "b.json", R"({"solvers": ["newton"]})");
  put(d / "c.json", R"({"colour": 3})");
  for (const char *f : {"a.json", "b.json", "c.json", "missing.json"})
    EXPECT_EQ(run({"bench", (d / f).string()}).code, 64) << f;
}

TEST(Bench, ThreadCapFromEnvironment) {
  ::setenv("LASSOKIT_THREADS", "1", 1);
  EXPECT_EQ(cli::bench_threads(), 1);
  ::unsetenv("LASSOKIT_THREADS");
  EXPECT_GE(cli::bench_threads(), 1);
}

TEST(ArcAudit, SmallConstructions) {
  const Result one = run({"arc-audit", "--n", "1", "--trials", "10"});
  EXPECT_EQ(one.code, 0);
  EXPECT_NE(one.out.find("extremal_construction breakpoints=2 PASS"), std::string::npos);
  const Result three = run({"arc-audit", "--n", "3", "--trials", "10"});
  EXPECT_EQ(three.code, 0);
  EXPECT_NE(three.out.find("extremal_construction breakpoints=10 PASS"), std::string::npos);
}

TEST(ArcAudit, RandomTrialsRespectBound) {
  const Result r = run({"arc-audit", "--n", "8", "--trials", "2000", "--seed", "3"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("bound=30 PASS"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("breakpoints=30 PASS"), std::string::npos) << r.out;
}
