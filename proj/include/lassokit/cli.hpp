#pragma once

// Command-line front end. Every command writes to caller-supplied streams and
// returns its exit code, so the whole tool can be driven in-process.
//
// Exit codes: 0 success, 1 audit failure, 2 iteration limit / root budget
// exhausted, 3 line-search failure / stalled root search, 64 bad input.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lassokit/arc.hpp"
#include "lassokit/io.hpp"
#include "lassokit/probgen.hpp"
#include "lassokit/rootfind.hpp"
#include "lassokit/solver.hpp"

namespace lassokit::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int {
  exit_ok = 0,
  exit_audit_failed = 1,
  exit_iter_limit = 2,
  exit_linesearch_failure = 3,
  exit_bad_input = 64,
};

inline int exit_code(SolverStatus s) {
  switch (s) {
  case SolverStatus::optimal: return exit_ok;
  case SolverStatus::iter_limit: return exit_iter_limit;
  case SolverStatus::linesearch_failure: return exit_linesearch_failure;
  }
  return exit_bad_input;
}

inline int exit_code(RootStatus s) {
  switch (s) {
  case RootStatus::root: return exit_ok;
  case RootStatus::budget_exhausted: return exit_iter_limit;
  case RootStatus::stalled: return exit_linesearch_failure;
  }
  return exit_bad_input;
}

inline LineSearchMode parse_line_search(const std::string &s) {
  if (s == "backtrack")
    return LineSearchMode::backtracking;
  if (s == "arc-first")
    return LineSearchMode::arc_first_local;
  if (s == "arc-global")
    return LineSearchMode::arc_global;
  throw DomainError("unknown line search '" + s + "'");
}

inline const char *line_search_name(LineSearchMode m) {
  switch (m) {
  case LineSearchMode::backtracking: return "backtrack";
  case LineSearchMode::arc_first_local: return "arc-first";
  case LineSearchMode::arc_global: return "arc-global";
  }
  return "?";
}

inline SolverKind parse_solver(const std::string &s) {
  if (s == "spg")
    return SolverKind::spg;
  if (s == "hybrid")
    return SolverKind::hybrid;
  throw DomainError("unknown solver '" + s + "'");
}

/// Seconds rounded to three significant digits.
inline double round_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", s);
  return std::strtod(buf, nullptr);
}

inline SolverReport run_solver(SolverKind kind, const LassoProblem &p, const Vector &x0,
                               const SolverOptions &opt) {
  return kind == SolverKind::spg ? spg_solve(p, x0, opt) : hybrid_solve(p, x0, opt);
}

struct TimedReport {
  SolverReport report;
  double seconds = 0.0;
};

inline TimedReport timed_solve(SolverKind kind, const LassoProblem &p, const SolverOptions &opt) {
  const Vector x0 = Vector::Zero(p.cols());
  const auto t0 = std::chrono::steady_clock::now();
  TimedReport out{run_solver(kind, p, x0, opt), 0.0};
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

/// Solver flags shared by solve and root.
struct SolveFlags {
  std::string manifest;
  std::string solver = "hybrid";
  double tol = 1e-6;
  std::string line_search = "backtrack";
  long max_iter = -1;
  std::string trace;

  SolverOptions options() const {
    SolverOptions o;
    o.opt_tol = tol;
    o.max_iter = max_iter;
    o.line_search_mode = parse_line_search(line_search);
    o.record_trace = !trace.empty();
    o.validate();
    return o;
  }
};

inline Json options_json(const SolveFlags &f) {
  Json o;
  o["tol"] = f.tol;
  o["line_search"] = f.line_search;
  o["max_iter"] = f.max_iter;
  return o;
}

inline Json problem_json(const std::string &source, const LassoProblem &p) {
  Json j;
  j["source"] = source;
  j["m"] = p.rows();
  j["n"] = p.cols();
  j["tau"] = p.tau;
  j["mu"] = p.mu;
  return j;
}

/// The RunRecord: one solve, fields in a fixed order.
inline Json run_record(const Json &problem, const std::string &solver, const Json &options,
                       const SolverReport &r, double seconds) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["problem"] = problem;
  j["solver"] = solver;
  j["options"] = options;
  j["iterations"] = r.iterations;
  j["qn_steps"] = r.qn_steps;
  j["pg_steps"] = r.pg_steps;
  j["runtime_s"] = round_seconds(seconds);
  j["f"] = r.f;
  j["gap"] = r.dual_gap_relative;
  j["status"] = to_string(r.status);
  return j;
}

inline void write_trace_csv(std::ostream &out, const std::vector<TraceRecord> &trace) {
  out << "iteration,f,gap,kind,face_dim\n" << std::setprecision(17);
  for (const TraceRecord &t : trace)
    out << t.iteration << ',' << t.f << ',' << t.gap_relative << ',' << to_string(t.kind) << ','
        << t.face_dim << '\n';
}

inline void add_solve_flags(CLI::App &cmd, SolveFlags &f) {
  cmd.add_option("manifest", f.manifest, "problem manifest")->required();
  cmd.add_option("--solver", f.solver, "spg or hybrid")
      ->check(CLI::IsMember({"spg", "hybrid"}));
  cmd.add_option("--tol", f.tol, "relative duality gap tolerance");
  cmd.add_option("--line-search", f.line_search, "backtrack, arc-first or arc-global")
      ->check(CLI::IsMember({"backtrack", "arc-first", "arc-global"}));
  cmd.add_option("--max-iter", f.max_iter, "iteration cap (default 10 * rows)");
  cmd.add_option("--trace", f.trace, "CSV file for per-iteration records");
}

inline int cmd_solve(const SolveFlags &f, std::ostream &out, std::ostream &err) {
  LoadedProblem lp;
  SolverOptions opt;
  try {
    lp = load_problem(std::filesystem::path(f.manifest));
    if (lp.sigma)
      throw ManifestError("sigma", "solve needs tau; use the root command for sigma manifests");
    opt = f.options();
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return exit_bad_input;
  }
  const TimedReport t = timed_solve(parse_solver(f.solver), lp.problem, opt);
  if (!f.trace.empty()) {
    std::ofstream tr(f.trace);
    if (!tr) {
      err << "error: cannot write trace '" << f.trace << "'\n";
      return exit_bad_input;
    }
    write_trace_csv(tr, t.report.trace);
  }
  out << run_record(problem_json(f.manifest, lp.problem), f.solver, options_json(f), t.report,
                    t.seconds)
             .dump()
      << '\n';
  return exit_code(t.report.status);
}

inline int cmd_root(const SolveFlags &f, double root_tol, int max_subproblems, std::ostream &out,
                    std::ostream &err) {
  LoadedProblem lp;
  RootOptions ro;
  try {
    lp = load_problem(std::filesystem::path(f.manifest));
    if (!lp.sigma)
      throw ManifestError("sigma", "missing; root finding needs a sigma manifest");
    ro.solver = parse_solver(f.solver);
    ro.inner = f.options();
    ro.inner.record_trace = false;
    ro.root_tol = root_tol;
    ro.max_subproblems = max_subproblems;
    if (!(root_tol > 0.0) || max_subproblems < 1)
      throw DomainError("root tolerance and subproblem budget must be positive");
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return exit_bad_input;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const RootReport r = solve_bpdn(lp.problem, *lp.sigma, ro);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!f.trace.empty()) {
    std::ofstream tr(f.trace);
    if (!tr) {
      err << "error: cannot write trace '" << f.trace << "'\n";
      return exit_bad_input;
    }
    tr << "subproblem,tau,misfit,lambda,iterations,status\n" << std::setprecision(17);
    for (std::size_t i = 0; i < r.path.size(); ++i)
      tr << i << ',' << r.path[i].tau << ',' << r.path[i].misfit << ',' << r.path[i].lambda << ','
         << r.path[i].iterations << ',' << to_string(r.path[i].status) << '\n';
  }

  Json j;
  j["schema"] = kSchemaVersion;
  Json prob = problem_json(f.manifest, lp.problem);
  prob.erase("tau");
  prob["sigma"] = *lp.sigma;
  j["problem"] = prob;
  j["solver"] = f.solver;
  Json o = options_json(f);
  o["root_tol"] = root_tol;
  o["max_subproblems"] = max_subproblems;
  j["options"] = o;
  j["tau_root"] = r.tau_root;
  j["misfit"] = r.misfit;
  j["relative_misfit"] = relative_misfit(*lp.sigma, r.misfit);
  j["subproblems"] = r.subproblem_count;
  j["iterations"] = r.total_inner_iterations;
  j["runtime_s"] = round_seconds(secs);
  j["status"] = to_string(r.status);
  out << j.dump() << '\n';
  return exit_code(r.status);
}

struct GenFlags {
  GeneratorSpec spec;
  std::string kind = "gaussian";
  std::string dist = "gaussian";
  std::optional<double> tau_mult;
  std::optional<double> sigma_frac;
  std::string out_dir;
};

inline Json spec_json(const GeneratorSpec &s) {
  Json j;
  j["m"] = s.m;
  j["n"] = s.n;
  j["kind"] = to_string(s.kind);
  if (s.kind == MatrixKind::sphere_walk)
    j["gamma"] = s.gamma;
  j["k"] = s.k;
  j["dist"] = to_string(s.signal);
  j["noise"] = s.noise_fraction;
  j["seed"] = s.seed;
  if (s.sigma_frac)
    j["sigma_frac"] = *s.sigma_frac;
  else
    j["tau_mult"] = s.tau_mult;
  return j;
}

/// Writes the problem bundle plus x0.txt and meta.json; returns the metadata.
inline Json write_instance(const std::filesystem::path &dir, const GeneratedInstance &g) {
  if (g.sigma)
    write_problem_bundle(dir, g.a, g.b, std::nullopt, g.sigma);
  else
    write_problem_bundle(dir, g.a, g.b, g.tau, std::nullopt);
  write_vector(dir / "x0.txt", g.x0);
  Json meta;
  meta["schema"] = kSchemaVersion;
  meta["seed"] = g.spec.seed;
  meta["spec"] = spec_json(g.spec);
  meta["x0_norm1"] = g.x0_norm1;
  meta["b_norm2"] = g.b_norm2;
  if (g.sigma)
    meta["sigma"] = *g.sigma;
  else
    meta["tau"] = g.tau;
  std::ofstream mf(dir / "meta.json");
  if (!mf)
    throw IoError("cannot write '" + (dir / "meta.json").string() + "'");
  mf << meta.dump(2) << '\n';
  return meta;
}

inline int cmd_gen(GenFlags f, std::ostream &out, std::ostream &err) {
  try {
    f.spec.kind = parse_matrix_kind(f.kind);
    f.spec.signal = parse_signal_dist(f.dist);
    if (f.tau_mult)
      f.spec.tau_mult = *f.tau_mult;
    f.spec.sigma_frac = f.sigma_frac;
    f.spec.validate();
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return exit_bad_input;
  }
  try {
    const GeneratedInstance g = gen_instance(f.spec);
    out << write_instance(f.out_dir, g).dump() << '\n';
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return exit_bad_input;
  }
  return exit_ok;
}

/// Benchmark sweep read from a JSON file. Every list is crossed with the others;
/// instance i of a group uses seed + i, so rows match `gen --seed` runs.
struct SweepConfig {
  Index m = 256;
  Index n = 512;
  std::string kind = "gaussian";
  double gamma = 0.1;
  double noise = 0.0;
  double tau_mult = 0.99;
  int instances = 0;
  std::uint64_t seed = 1;
  std::vector<Index> k;
  std::vector<std::string> dist;
  std::vector<std::string> solvers;
  std::vector<double> tol;
  std::string line_search = "backtrack";
  long max_iter = -1;

  static SweepConfig from_json(const Json &j) {
    SweepConfig c;
    static const char *known[] = {"m",      "n",     "kind",    "gamma",       "noise",
                                  "tau_mult", "instances", "seed", "k",        "dist",
                                  "solvers", "tol",  "line_search", "max_iter"};
    if (!j.is_object())
      throw DomainError("sweep config must be a JSON object");
    for (const auto &item : j.items())
      if (std::find_if(std::begin(known), std::end(known),
                       [&](const char *k) { return item.key() == k; }) == std::end(known))
        throw DomainError("sweep config: unknown key '" + item.key() + "'");
    auto get = [&](const char *key, auto &dst) {
      if (j.contains(key)) {
        try {
          j.at(key).get_to(dst);
        } catch (const nlohmann::json::exception &) {
          throw DomainError(std::string("sweep config: bad value for '") + key + "'");
        }
      }
    };
    get("m", c.m);
    get("n", c.n);
    get("kind", c.kind);
    get("gamma", c.gamma);
    get("noise", c.noise);
    get("tau_mult", c.tau_mult);
    get("instances", c.instances);
    get("seed", c.seed);
    get("k", c.k);
    get("dist", c.dist);
    get("solvers", c.solvers);
    get("tol", c.tol);
    get("line_search", c.line_search);
    get("max_iter", c.max_iter);
    if (c.instances < 0)
      throw DomainError("sweep config: instances must be nonnegative");
    parse_matrix_kind(c.kind);
    parse_line_search(c.line_search);
    for (const auto &d : c.dist)
      parse_signal_dist(d);
    for (const auto &s : c.solvers)
      parse_solver(s);
    for (double t : c.tol)
      if (!(t > 0.0))
        throw DomainError("sweep config: tolerances must be positive");
    return c;
  }

  GeneratorSpec spec(Index kk, const std::string &d, int instance) const {
    GeneratorSpec s;
    s.m = m;
    s.n = n;
    s.kind = parse_matrix_kind(kind);
    s.gamma = gamma;
    s.signal = parse_signal_dist(d);
    s.k = kk;
    s.noise_fraction = noise;
    s.seed = seed + static_cast<std::uint64_t>(instance);
    s.tau_mult = tau_mult;
    return s;
  }
};

inline int bench_threads() {
  int cap = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char *env = std::getenv("LASSOKIT_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0)
      cap = std::min(cap, v);
  }
  return cap;
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <class Fn> void parallel_for(int count, int threads, Fn &&fn) {
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++)
      fn(i);
  };
  const int t = std::max(1, std::min(threads, count));
  std::vector<std::thread> pool;
  for (int i = 1; i < t; ++i)
    pool.emplace_back(worker);
  worker();
  for (auto &th : pool)
    th.join();
}

inline std::string csv_number(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

struct BenchRun {
  Index k = 0;
  std::string dist;
  double tol = 0.0;
  int instance = 0;
  std::string solver;
  TimedReport result;
};

inline int cmd_bench(const std::string &config_path, const std::string &records_path,
                     std::ostream &out, std::ostream &err) {
  SweepConfig cfg;
  try {
    std::ifstream in(config_path);
    if (!in)
      throw IoError("cannot open '" + config_path + "'");
    Json j;
    try {
      j = Json::parse(in);
    } catch (const nlohmann::json::exception &e) {
      throw DomainError(std::string("sweep config: ") + e.what());
    }
    cfg = SweepConfig::from_json(j);
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return exit_bad_input;
  }

  struct Job {
    Index k;
    std::string dist;
    double tol;
    int instance;
  };
  std::vector<Job> jobs;
  for (Index k : cfg.k)
    for (const auto &d : cfg.dist)
      for (double t : cfg.tol)
        for (int i = 0; i < cfg.instances; ++i)
          jobs.push_back({k, d, t, i});
  if (cfg.solvers.empty())
    jobs.clear();

  std::vector<std::vector<BenchRun>> results(jobs.size());
  std::string failure;
  std::mutex failure_mu;
  parallel_for(static_cast<int>(jobs.size()), bench_threads(), [&](int idx) {
    const Job &job = jobs[static_cast<std::size_t>(idx)];
    try {
      const GeneratedInstance g = gen_instance(cfg.spec(job.k, job.dist, job.instance));
      const LassoProblem p = g.lasso();
      SolverOptions opt;
      opt.opt_tol = job.tol;
      opt.max_iter = cfg.max_iter;
      opt.line_search_mode = parse_line_search(cfg.line_search);
      for (const auto &s : cfg.solvers)
        results[static_cast<std::size_t>(idx)].push_back(
            {job.k, job.dist, job.tol, job.instance, s, timed_solve(parse_solver(s), p, opt)});
    } catch (const std::exception &e) {
      std::lock_guard<std::mutex> lock(failure_mu);
      if (failure.empty())
        failure = e.what();
    }
  });
  if (!failure.empty()) {
    err << "error: " << failure << '\n';
    return exit_bad_input;
  }

  if (!records_path.empty()) {
    std::ofstream rec(records_path);
    if (!rec) {
      err << "error: cannot write '" << records_path << "'\n";
      return exit_bad_input;
    }
    Json opts;
    opts["line_search"] = cfg.line_search;
    opts["max_iter"] = cfg.max_iter;
    for (std::size_t i = 0; i < jobs.size(); ++i)
      for (const BenchRun &r : results[i]) {
        Json prob;
        prob["source"] = "generated";
        prob["spec"] = spec_json(cfg.spec(r.k, r.dist, r.instance));
        Json o = opts;
        o["tol"] = r.tol;
        rec << run_record(prob, r.solver, o, r.result.report, r.result.seconds).dump() << '\n';
      }
  }

  out << "k,dist,solver,tol,mean_time,mean_iters,pct_solved,median_gap,mean_speedup_vs_spg\n";
  const bool has_spg =
      std::find(cfg.solvers.begin(), cfg.solvers.end(), "spg") != cfg.solvers.end();
  std::size_t group = 0;
  for (Index k : cfg.k)
    for (const auto &d : cfg.dist)
      for (double t : cfg.tol) {
        if (cfg.instances == 0 || cfg.solvers.empty())
          continue;
        const std::size_t first = group * static_cast<std::size_t>(cfg.instances);
        ++group;
        for (std::size_t s = 0; s < cfg.solvers.size(); ++s) {
          double time = 0.0, iters = 0.0, solved = 0.0, speedup = 0.0;
          std::vector<double> gaps;
          for (int i = 0; i < cfg.instances; ++i) {
            const auto &runs = results[first + static_cast<std::size_t>(i)];
            const SolverReport &r = runs[s].result.report;
            time += runs[s].result.seconds;
            iters += static_cast<double>(r.iterations);
            solved += r.status == SolverStatus::optimal;
            gaps.push_back(r.dual_gap_relative);
            if (has_spg) {
              const auto spg = std::find_if(runs.begin(), runs.end(),
                                            [](const BenchRun &b) { return b.solver == "spg"; });
              speedup += spg->result.seconds / std::max(runs[s].result.seconds, 1e-9);
            }
          }
          const double n = cfg.instances;
          std::sort(gaps.begin(), gaps.end());
          const std::size_t h = gaps.size() / 2;
          const double median = gaps.size() % 2 ? gaps[h] : 0.5 * (gaps[h - 1] + gaps[h]);
          out << k << ',' << d << ',' << cfg.solvers[s] << ',' << csv_number(t) << ','
              << csv_number(round_seconds(time / n)) << ',' << csv_number(iters / n) << ','
              << csv_number(100.0 * solved / n) << ',' << csv_number(median) << ','
              << (has_spg ? csv_number(speedup / n) : std::string()) << '\n';
        }
      }
  return exit_ok;
}

/// Random two-sided lines in dimension n; the largest breakpoint count seen.
inline std::size_t audit_random_lines(Index n, long trials, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::size_t worst = 0;
  for (long t = 0; t < trials; ++t) {
    Vector s(n), d(n), w(n);
    for (Index i = 0; i < n; ++i) {
      s[i] = rng.normal();
      d[i] = rng.normal();
      w[i] = rng.uniform(0.2, 3.0);
    }
    const double tau = rng.uniform(0.01, 1.5) * std::max(weighted_l1(s, w), 1e-3);
    worst = std::max(worst, enumerate_line(s, d, w, tau).breakpoint_count());
  }
  return worst;
}

inline int cmd_arc_audit(Index n, long trials, std::uint64_t seed, std::ostream &out,
                         std::ostream &err) {
  if (n < 1 || trials < 0) {
    err << "error: need n >= 1 and trials >= 0\n";
    return exit_bad_input;
  }
  const auto bound = static_cast<std::size_t>(4 * n - 2);
  const std::size_t worst = audit_random_lines(n, trials, seed);
  const ArcInstance ex = extremal_construction(static_cast<int>(n), seed);
  const std::size_t ex_count = enumerate_line(ex.s, ex.d, ex.w, ex.tau).breakpoint_count();
  const bool random_ok = worst <= bound;
  const bool ex_ok = ex_count == bound;
  out << "n=" << n << " trials=" << trials << " seed=" << seed << '\n';
  out << "max_breakpoints=" << worst << " bound=" << bound << ' '
      << (random_ok ? "PASS" : "FAIL") << '\n';
  out << "extremal_construction breakpoints=" << ex_count << ' ' << (ex_ok ? "PASS" : "FAIL")
      << '\n';
  return random_ok && ex_ok ? exit_ok : exit_audit_failed;
}

/// Parses argv and dispatches. argv[0] is the program name.
inline int run(int argc, const char *const *argv, std::ostream &out = std::cout,
               std::ostream &err = std::cerr) {
  CLI::App app{"Lasso and basis-pursuit denoise solvers", "lassokit"};
  app.require_subcommand(1);

  SolveFlags solve_f;
  auto *solve = app.add_subcommand("solve", "solve a Lasso problem from a tau manifest");
  add_solve_flags(*solve, solve_f);

  SolveFlags root_f;
  double root_tol = 1e-5;
  int max_sub = 100;
  auto *root = app.add_subcommand("root", "solve basis-pursuit denoise from a sigma manifest");
  add_solve_flags(*root, root_f);
  root->add_option("--root-tol", root_tol, "relative misfit tolerance");
  root->add_option("--max-subproblems", max_sub, "subproblem budget");

  GenFlags gen_f;
  auto *gen = app.add_subcommand("gen", "generate a problem bundle");
  gen->add_option("--m", gen_f.spec.m, "rows")->required();
  gen->add_option("--n", gen_f.spec.n, "columns")->required();
  gen->add_option("--kind", gen_f.kind, "gaussian or sphere-walk");
  gen->add_option("--gamma", gen_f.spec.gamma, "sphere-walk step, 0 < gamma <= 2");
  gen->add_option("--k", gen_f.spec.k, "nonzeros in x0");
  gen->add_option("--dist", gen_f.dist, "pm-one, uniform or gaussian");
  gen->add_option("--noise", gen_f.spec.noise_fraction, "noise norm as a fraction of ||A x0||");
  gen->add_option("--seed", gen_f.spec.seed, "RNG seed");
  auto *tm = gen->add_option("--tau-mult", gen_f.tau_mult, "tau = mult * ||x0||_1");
  auto *sf = gen->add_option("--sigma-frac", gen_f.sigma_frac, "sigma = frac * ||b||_2");
  tm->excludes(sf);
  gen->add_option("--out", gen_f.out_dir, "output directory")->required();

  std::string bench_cfg, bench_records;
  auto *bench = app.add_subcommand("bench", "run a benchmark sweep, CSV on stdout");
  bench->add_option("config", bench_cfg, "sweep config (JSON)")->required();
  bench->add_option("--records", bench_records, "JSON-lines file for per-run records");

  Index audit_n = 8;
  long audit_trials = 1000;
  std::uint64_t audit_seed = 1;
  auto *audit = app.add_subcommand("arc-audit", "check projection-arc breakpoint bounds");
  audit->add_option("--n", audit_n, "dimension");
  audit->add_option("--trials", audit_trials, "random lines");
  audit->add_option("--seed", audit_seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? exit_ok : exit_bad_input;
  }

  try {
    if (*solve)
      return cmd_solve(solve_f, out, err);
    if (*root)
      return cmd_root(root_f, root_tol, max_sub, out, err);
    if (*gen)
      return cmd_gen(gen_f, out, err);
    if (*bench)
      return cmd_bench(bench_cfg, bench_records, out, err);
    if (*audit)
      return cmd_arc_audit(audit_n, audit_trials, audit_seed, out, err);
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return exit_bad_input;
  }
  return exit_bad_input;
}

} // namespace lassokit::cli
