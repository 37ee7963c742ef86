#include "lowrank/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "lowrank/bench.hpp"
#include "lowrank/diagnostics.hpp"
#include "lowrank/errors.hpp"
#include "lowrank/matrix_io.hpp"
#include "lowrank/mc.hpp"
#include "lowrank/operators.hpp"
#include "lowrank/problem_gen.hpp"
#include "lowrank/report.hpp"
#include "lowrank/rpca.hpp"

namespace lowrank {

namespace {

namespace fs = std::filesystem;
using report::Json;

// Top-level keys are flags of the subcommand being run; nested objects
// address a subcommand by name.
class JsonConfig final : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* root) : root_(root) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}\n"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(input);
    } catch (const nlohmann::json::exception& ex) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + ex.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    std::vector<std::string> base;
    const auto subs = root_->get_subcommands();
    if (!subs.empty()) base.push_back(subs.front()->get_name());
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        collect(value, {key}, items);
      } else {
        nlohmann::json one;
        one[key] = value;
        collect(one, base, items);
      }
    }
    return items;
  }

 private:
  const CLI::App* root_;

  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void collect(const nlohmann::json& j, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto p = parents;
        p.push_back(key);
        collect(value, p, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      std::replace(item.name.begin(), item.name.end(), '_', '-');
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }
};

struct SolverFlags {
  std::optional<double> lambda;
  std::optional<double> mu0;
  std::optional<double> rho;
  std::optional<double> eps1;
  std::optional<double> eps2;
  std::optional<int> max_iter;
  std::optional<int> sv0;
  std::uint64_t seed = 0;
  std::string trace;
};

void add_solver_flags(CLI::App* sub, SolverFlags& f, bool with_lambda) {
  if (with_lambda) sub->add_option("--lambda", f.lambda, "Sparsity weight (default rows^-1/2)");
  sub->add_option("--mu0", f.mu0, "Initial penalty");
  sub->add_option("--rho", f.rho, "Penalty growth factor");
  sub->add_option("--eps1", f.eps1, "Primal feasibility tolerance");
  sub->add_option("--eps2", f.eps2, "Dual tolerance");
  sub->add_option("--max-iter", f.max_iter, "Iteration cap");
  sub->add_option("--sv0", f.sv0, "Initial predicted rank");
  sub->add_option("--seed", f.seed, "Seed of the Lanczos start vectors");
  sub->add_option("--trace", f.trace, "Write the summary, trace and output paths as JSON");
}

double round_ms(double seconds) { return std::round(seconds * 1000.0) / 1000.0; }

std::string absolute_string(const std::string& p) { return fs::absolute(p).lexically_normal().string(); }

fs::path manifest_file(const fs::path& manifest_path, const report::Manifest& m, const std::string& key) {
  const auto it = m.files.find(key);
  if (it == m.files.end()) throw InvalidArgument("manifest has no '" + key + "' file");
  const fs::path p(it->second);
  return p.is_absolute() ? p : manifest_path.parent_path() / p;
}

// ---- gen --------------------------------------------------------------------

struct GenArgs {
  std::string kind;
  Index m = 0;
  Index r = 0;
  double corruption = 0.05;
  std::optional<Index> p;
  double ratio = 6.0;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string format = "mtx";
};

int run_gen(const GenArgs& a, std::ostream& out) {
  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  const std::string ext = a.format == "csv" ? ".csv" : ".mtx";
  report::Manifest man;
  man.kind = a.kind;
  man.m = a.m;
  man.r = a.r;
  man.seed = a.seed;
  if (a.kind == "rpca") {
    const RpcaInstance inst = gen_rpca(a.m, a.r, a.corruption, a.seed);
    io::write_dense(dir / ("D" + ext), inst.d);
    io::write_dense(dir / ("A_star" + ext), inst.a_star);
    io::write_dense(dir / ("E_star" + ext), inst.e_star);
    man.corruption_frac = a.corruption;
    man.e_card = inst.e_card;
    man.lambda = inst.lambda;
    man.files = {{"D", "D" + ext}, {"A_star", "A_star" + ext}, {"E_star", "E_star" + ext}};
  } else {
    const Index dr = degrees_of_freedom(a.m, a.r);
    const Index p = a.p ? *a.p : static_cast<Index>(std::llround(a.ratio * static_cast<double>(dr)));
    const McInstance inst = gen_mc(a.m, a.r, p, a.seed);
    io::write_samples(dir / "samples.mtx", {inst.omega, inst.d_values});
    io::write_dense(dir / ("A_star" + ext), inst.a_star);
    man.p = p;
    man.d_r = inst.d_r;
    man.files = {{"samples", "samples.mtx"}, {"A_star", "A_star" + ext}};
  }
  const Json j = report::to_json(man);
  report::write_json(dir / "manifest.json", j);
  out << j.dump(2) << '\n';
  return kExitOk;
}

// ---- solve-rpca -------------------------------------------------------------

struct SolveRpcaArgs {
  std::string alg;
  std::string input;
  std::string manifest;
  std::string output_a;
  std::string output_e;
  std::string output_y;
  SolverFlags flags;
};

int run_solve_rpca(const SolveRpcaArgs& a, std::ostream& out) {
  fs::path input_path;
  std::optional<DenseMatrix> a_star;
  if (!a.manifest.empty()) {
    const report::Manifest man = report::read_manifest(a.manifest);
    if (man.kind != "rpca") throw InvalidArgument("solve-rpca needs an rpca manifest");
    input_path = manifest_file(a.manifest, man, "D");
    a_star = io::read_dense(manifest_file(a.manifest, man, "A_star"));
  } else {
    input_path = a.input;
  }
  const DenseMatrix d = io::read_dense(input_path);

  RpcaConfig cfg;
  cfg.lambda = a.flags.lambda;
  cfg.mu0 = a.flags.mu0;
  cfg.rho = a.flags.rho;
  cfg.eps1 = a.flags.eps1;
  cfg.eps2 = a.flags.eps2;
  cfg.max_iter = a.flags.max_iter;
  cfg.sv0 = a.flags.sv0;
  cfg.svd.seed = a.flags.seed;

  const auto t0 = std::chrono::steady_clock::now();
  const SolveResult r = solve_rpca(parse_rpca_algorithm(a.alg), d, cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Json summary = report::summarize(r, a_star ? &a_star->eigen() : nullptr);
  summary["wall_time_seconds"] = round_ms(secs);

  Json outputs = Json::object();
  if (!a.output_a.empty()) {
    io::write_dense(a.output_a, r.A);
    outputs["A"] = absolute_string(a.output_a);
  }
  if (!a.output_e.empty()) {
    io::write_dense(a.output_e, r.E);
    outputs["E"] = absolute_string(a.output_e);
  }
  if (!a.output_y.empty()) {
    io::write_dense(a.output_y, DenseMatrix(r.Y));
    outputs["Y"] = absolute_string(a.output_y);
  }
  if (!a.flags.trace.empty()) {
    Json t = summary;
    t["input"] = absolute_string(input_path.string());
    if (!a.manifest.empty()) t["manifest"] = absolute_string(a.manifest);
    t["outputs"] = outputs;
    t["trace"] = report::trace_to_json(r.trace);
    report::write_json(a.flags.trace, t);
  }
  out << summary.dump(2) << '\n';
  return r.converged ? kExitOk : kExitNotConverged;
}

// ---- solve-mc ---------------------------------------------------------------

struct SolveMcArgs {
  std::string input;
  std::string manifest;
  std::string output_a;
  std::string schedule = "geometric";
  SolverFlags flags;
};

int run_solve_mc(const SolveMcArgs& a, std::ostream& out) {
  fs::path input_path;
  std::optional<DenseMatrix> a_star;
  if (!a.manifest.empty()) {
    const report::Manifest man = report::read_manifest(a.manifest);
    if (man.kind != "mc") throw InvalidArgument("solve-mc needs an mc manifest");
    input_path = manifest_file(a.manifest, man, "samples");
    a_star = io::read_dense(manifest_file(a.manifest, man, "A_star"));
  } else {
    input_path = a.input;
  }
  const io::SparseSamples s = io::read_samples(input_path);

  McConfig cfg;
  cfg.mu0 = a.flags.mu0;
  cfg.rho = a.flags.rho;
  if (a.flags.eps1) cfg.eps1 = *a.flags.eps1;
  if (a.flags.eps2) cfg.eps2 = *a.flags.eps2;
  if (a.flags.max_iter) cfg.max_iter = *a.flags.max_iter;
  if (a.flags.sv0) cfg.sv0 = *a.flags.sv0;
  cfg.schedule = a.schedule == "adaptive" ? MuSchedule::adaptive : MuSchedule::geometric;
  cfg.svd.seed = a.flags.seed;

  const auto t0 = std::chrono::steady_clock::now();
  const McResult r = solve_mc_ialm(s.omega, s.values, cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Json summary = report::summarize(r, cfg, a_star ? &a_star->eigen() : nullptr);
  summary["wall_time_seconds"] = round_ms(secs);
  Json outputs = Json::object();
  if (!a.output_a.empty()) {
    io::write_dense(a.output_a, DenseMatrix(r.A.materialize()));
    outputs["A"] = absolute_string(a.output_a);
  }
  if (!a.flags.trace.empty()) {
    Json t = summary;
    t["input"] = absolute_string(input_path.string());
    if (!a.manifest.empty()) t["manifest"] = absolute_string(a.manifest);
    t["outputs"] = outputs;
    t["trace"] = report::trace_to_json(r.trace);
    report::write_json(a.flags.trace, t);
  }
  out << summary.dump(2) << '\n';
  return r.converged ? kExitOk : kExitNotConverged;
}

// ---- bench ------------------------------------------------------------------

struct BenchArgs {
  int table = 1;
  std::vector<Index> scales;
  std::vector<std::string> algs;
  std::uint64_t seed = 0;
  std::string output;
};

int run_bench_cmd(const BenchArgs& a, std::ostream& out) {
  std::vector<Index> scales = a.scales;
  if (scales.empty()) scales = {a.table == 3 ? Index{1000} : Index{500}};
  std::vector<std::string> algs = a.algs;
  if (algs.empty()) algs = a.table == 3 ? std::vector<std::string>{"ialm"} : std::vector<std::string>{"apg", "ealm", "ialm"};
  const auto cells = bench_cells(a.table, scales, algs);
  const auto rows = run_bench(cells, a.seed, bench_worker_slots());
  if (a.output.empty()) {
    write_bench_csv(out, rows);
  } else {
    std::ofstream f(a.output);
    if (!f) throw InvalidArgument("cannot open '" + a.output + "' for writing");
    write_bench_csv(f, rows);
  }
  return kExitOk;
}

// ---- check ------------------------------------------------------------------

struct CheckArgs {
  std::string result;
  std::string manifest;
  bool lyapunov = false;
  double slack = 1e-8;
};

struct Verdicts {
  Json list = Json::array();
  bool passed = true;

  void add(const std::string& name, bool ok, double value, double threshold, const std::string& detail = {}) {
    Json v{{"name", name}, {"status", ok ? "pass" : "fail"}, {"value", value}, {"threshold", threshold}};
    if (!detail.empty()) v["detail"] = detail;
    list.push_back(v);
    passed = passed && ok;
  }
  void skip(const std::string& name, const std::string& why) {
    list.push_back({{"name", name}, {"status", "skipped"}, {"detail", why}});
  }
  void info(const std::string& name, double value, const std::string& detail = {}) {
    Json v{{"name", name}, {"status", "info"}, {"value", value}};
    if (!detail.empty()) v["detail"] = detail;
    list.push_back(v);
  }
};

std::optional<fs::path> output_path(const Json& res, const char* key) {
  if (!res.contains("outputs") || !res["outputs"].contains(key)) return std::nullopt;
  return fs::path(res["outputs"][key].get<std::string>());
}

// Relative deviation of each mu ratio from the allowed set.
void check_mu(Verdicts& v, const std::vector<IterRecord>& trace, const std::string& schedule, double rho) {
  if (trace.size() < 2) {
    v.skip("mu_schedule", "fewer than two iterations");
    return;
  }
  double worst = 0.0;
  for (std::size_t k = 1; k < trace.size(); ++k) {
    const double ratio = trace[k].mu / trace[k - 1].mu;
    double dev = 0.0;
    if (schedule == "adaptive")
      dev = std::min(std::abs(ratio - 1.0), std::abs(ratio - rho) / rho);
    else if (schedule == "geometric")
      dev = std::abs(ratio - rho) / rho;
    else if (schedule == "nonincreasing")
      dev = std::max(0.0, ratio - 1.0);
    else
      dev = std::abs(ratio - 1.0);
    worst = std::max(worst, dev);
  }
  v.add("mu_schedule", worst <= 1e-9, worst, 1e-9, "schedule " + schedule);
}

void check_rank(Verdicts& v, const std::vector<IterRecord>& trace) {
  int drops = 0;
  for (std::size_t k = 1; k < trace.size(); ++k)
    if (trace[k].rank_a < trace[k - 1].rank_a) ++drops;
  v.info("rank_decreases", drops, "iterations where rank(A_k) decreased");
}

int run_check(const CheckArgs& a, std::ostream& out) {
  const Json res = report::read_json(a.result);
  if (!res.contains("problem") || !res.contains("trace") || !res.contains("config"))
    throw InvalidArgument("result file lacks problem, config or trace; write it with --trace");
  const std::string problem = res["problem"].get<std::string>();
  const Json& cfg = res["config"];
  const std::vector<IterRecord> trace = report::trace_from_json(res["trace"]);
  const double eps1 = cfg.at("eps1").get<double>();
  const bool converged = res.at("converged").get<bool>();

  std::optional<report::Manifest> man;
  if (!a.manifest.empty()) man = report::read_manifest(a.manifest);
  if (man && man->kind != problem) throw InvalidArgument("manifest kind does not match the result");
  auto input_file = [&](const char* manifest_key) {
    if (man) return manifest_file(a.manifest, *man, manifest_key);
    if (!res.contains("input")) throw InvalidArgument("no manifest given and the result names no input");
    return fs::path(res["input"].get<std::string>());
  };

  Verdicts v;
  v.add("converged", converged, converged ? 1.0 : 0.0, 1.0);
  if (!trace.empty()) v.add("trace_feasibility", !converged || trace.back().feas < eps1, trace.back().feas, eps1);

  if (problem == "rpca") {
    const std::string alg = cfg.at("algorithm").get<std::string>();
    const double lambda = cfg.at("lambda").get<double>();
    const DenseMatrix d = io::read_dense(input_file("D"));
    const auto pa = output_path(res, "A");
    const auto pe = output_path(res, "E");
    if (pa && pe) {
      const DenseMatrix A = io::read_dense(*pa);
      const DenseMatrix E = io::read_dense(*pe);
      const Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(d.rows(), d.cols());
      const KktReport k = kkt_report(d.eigen(), A.eigen(), E.eigen(), Y, lambda, 0.0, 0.0);
      v.add("feasibility", !converged || k.feas < eps1, k.feas, eps1);
      v.info("objective", k.objective);
      if (man) {
        const DenseMatrix a_star = io::read_dense(manifest_file(a.manifest, *man, "A_star"));
        v.info("rel_error", (A.eigen() - a_star.eigen()).norm() / a_star.eigen().norm());
      }
    } else {
      v.skip("feasibility", "result has no A and E outputs");
    }
    if (const auto py = output_path(res, "Y"); py && (alg == "ialm" || alg == "ealm")) {
      const DualFeasibility f = dual_feasibility(io::read_dense(*py).eigen(), lambda);
      v.add("dual_feasibility", f.ok, std::max(f.spectral, f.scaled_linf), 1.0 + 1e-3,
            "max of ||Y||_2 and ||Y||_inf / lambda");
    } else {
      v.skip("dual_feasibility", "needs the Y output of an ALM solver");
    }
    const double rho = cfg.at("rho").get<double>();
    if (alg == "ialm")
      check_mu(v, trace, "adaptive", rho);
    else if (alg == "ealm")
      check_mu(v, trace, "geometric", rho);
    else if (alg == "apg")
      check_mu(v, trace, "nonincreasing", rho);
    else
      check_mu(v, trace, "constant", rho);
    check_rank(v, trace);

    if (a.lyapunov) {
      if (alg != "ialm") throw InvalidArgument("--lyapunov applies to ialm results");
      if (std::min(d.rows(), d.cols()) > 300) throw InvalidArgument("--lyapunov is limited to min(m, n) <= 300");
      RpcaConfig tight;
      tight.lambda = lambda;
      tight.eps1 = 1e-10;
      tight.inner_tol = 1e-10;
      tight.max_iter = 1000;
      const SolveResult oracle = solve_ealm(d, tight);
      RpcaConfig rc;
      rc.lambda = lambda;
      rc.mu0 = cfg.at("mu0").get<double>();
      rc.rho = rho;
      rc.eps1 = eps1;
      rc.eps2 = cfg.at("eps2").get<double>();
      rc.max_iter = cfg.at("max_iter").get<int>();
      rc.sv0 = cfg.at("sv0").get<int>();
      std::vector<LyapunovState> states;
      IalmOptions io_opts;
      io_opts.observer = [&](const IterationSnapshot& s) { states.push_back({s.A, s.Y, s.mu_next}); };
      solve_ialm(d, rc, io_opts);
      const auto values = lyapunov_trace(states, oracle.A.eigen(), oracle.Y);
      const MonotonicityCheck c = check_nonincreasing(values, a.slack);
      v.add("lyapunov", c.ok, values.empty() ? 0.0 : c.worst_increase / values.front(), a.slack,
            "largest increase of V_k relative to V_0");
    }
  } else {
    const io::SparseSamples s = io::read_samples(input_file("samples"));
    if (const auto pa = output_path(res, "A")) {
      const DenseMatrix A = io::read_dense(*pa);
      if (A.rows() != s.omega.rows() || A.cols() != s.omega.cols())
        throw InvalidArgument("A output does not match the sample shape");
      double num = 0.0;
      double den = 0.0;
      for (std::size_t k = 0; k < s.omega.size(); ++k) {
        const double z = s.values[k] - A(s.omega[k].row, s.omega[k].col);
        num += z * z;
        den += s.values[k] * s.values[k];
      }
      const double feas = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
      v.add("feasibility", !converged || feas < eps1, feas, eps1);
      if (man) {
        const DenseMatrix a_star = io::read_dense(manifest_file(a.manifest, *man, "A_star"));
        v.info("rel_error", (A.eigen() - a_star.eigen()).norm() / a_star.eigen().norm());
      }
    } else {
      v.skip("feasibility", "result has no A output");
    }
    check_mu(v, trace, cfg.at("schedule").get<std::string>(), cfg.at("rho").get<double>());
    check_rank(v, trace);
  }

  const Json verdict{{"problem", problem}, {"passed", v.passed}, {"invariants", v.list}};
  out << verdict.dump(2) << '\n';
  return v.passed ? kExitOk : kExitNotConverged;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Low-rank matrix recovery: robust PCA and matrix completion", "lowrank"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonConfig>(&app));
  app.set_config("--config", "", "JSON file supplying flags of the subcommand (may follow it)");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic instance");
  gen_cmd->add_option("--kind", gen.kind, "rpca or mc")->required()->check(CLI::IsMember({"rpca", "mc"}));
  gen_cmd->add_option("--m", gen.m, "Matrix dimension (square)")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--r", gen.r, "Rank of A*")->required()->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--corruption", gen.corruption, "Fraction of corrupted entries (rpca)")->capture_default_str();
  gen_cmd->add_option("--p", gen.p, "Number of samples (mc)");
  gen_cmd->add_option("--ratio", gen.ratio, "Samples per degree of freedom when --p is absent (mc)")
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Instance seed")->capture_default_str();
  gen_cmd->add_option("--out-dir", gen.out_dir, "Output directory")->required();
  gen_cmd->add_option("--format", gen.format, "Dense file format")->check(CLI::IsMember({"mtx", "csv"}))
      ->capture_default_str();

  SolveRpcaArgs srp;
  auto* srp_cmd = app.add_subcommand("solve-rpca", "Robust PCA on a dense matrix");
  srp_cmd->add_option("--alg", srp.alg, "it, apg, ealm or ialm")->required()->check(
      CLI::IsMember({"it", "apg", "ealm", "ialm"}));
  auto* srp_in = srp_cmd->add_option("--input", srp.input, "Dense input D (.csv or Matrix Market)");
  auto* srp_man = srp_cmd->add_option("--manifest", srp.manifest, "Instance manifest from gen");
  srp_in->excludes(srp_man);
  srp_cmd->add_option("--output-a", srp.output_a, "Write the low-rank part");
  srp_cmd->add_option("--output-e", srp.output_e, "Write the sparse part");
  srp_cmd->add_option("--output-y", srp.output_y, "Write the final multiplier");
  add_solver_flags(srp_cmd, srp.flags, true);

  SolveMcArgs smc;
  auto* smc_cmd = app.add_subcommand("solve-mc", "Matrix completion from Matrix Market coordinate samples");
  auto* smc_in = smc_cmd->add_option("--input", smc.input, "Observed entries (coordinate format)");
  auto* smc_man = smc_cmd->add_option("--manifest", smc.manifest, "Instance manifest from gen");
  smc_in->excludes(smc_man);
  smc_cmd->add_option("--output-a", smc.output_a, "Write the completed matrix (dense)");
  smc_cmd->add_option("--schedule", smc.schedule, "Penalty schedule")
      ->check(CLI::IsMember({"geometric", "adaptive"}))
      ->capture_default_str();
  add_solver_flags(smc_cmd, smc.flags, false);

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run a table sweep and print CSV");
  bench_cmd->add_option("--table", bench.table, "1, 2 (robust PCA) or 3 (matrix completion)")
      ->required()
      ->check(CLI::IsMember({1, 2, 3}));
  bench_cmd->add_option("--scale", bench.scales, "Matrix dimension(s), comma separated")->delimiter(',');
  bench_cmd->add_option("--algs", bench.algs, "Algorithms, comma separated")->delimiter(',');
  bench_cmd->add_option("--seed", bench.seed, "Instance seed")->capture_default_str();
  bench_cmd->add_option("--output", bench.output, "CSV file (default stdout)");
  // Vector options keep every value.
  for (auto* o : {bench_cmd->get_option("--scale"), bench_cmd->get_option("--algs")})
    o->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

  CheckArgs check;
  auto* check_cmd = app.add_subcommand("check", "Verify solver invariants for a traced result");
  check_cmd->add_option("--result", check.result, "JSON written by solve-rpca/solve-mc --trace")->required();
  check_cmd->add_option("--manifest", check.manifest, "Instance manifest (adds ground-truth checks)");
  check_cmd->add_flag("--lyapunov", check.lyapunov, "Rerun IALM against a tightened EALM oracle");
  check_cmd->add_option("--slack", check.slack, "Relative slack of the Lyapunov check")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << "run with --help for usage\n";
    return kExitInvalidInput;
  }

  try {
    if (gen_cmd->parsed()) return run_gen(gen, out);
    if (srp_cmd->parsed()) {
      if (srp.input.empty() && srp.manifest.empty()) throw InvalidArgument("solve-rpca needs --input or --manifest");
      return run_solve_rpca(srp, out);
    }
    if (smc_cmd->parsed()) {
      if (smc.input.empty() && smc.manifest.empty()) throw InvalidArgument("solve-mc needs --input or --manifest");
      return run_solve_mc(smc, out);
    }
    if (bench_cmd->parsed()) return run_bench_cmd(bench, out);
    if (check_cmd->parsed()) return run_check(check, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const NumericalFailure& e) {
    err << "error: " << e.what() << '\n';
    return kExitNotConverged;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }
  return kExitInvalidInput;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"lowrank"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace lowrank
