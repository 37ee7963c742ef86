#include "lowrank/report.hpp"

#include <fstream>

#include "lowrank/errors.hpp"
#include "lowrank/operators.hpp"

namespace lowrank::report {

Json to_json(const IterRecord& r) {
  return Json{{"iter", r.iter},       {"mu", r.mu},         {"feas", r.feas},       {"dual_est", r.dual_est},
              {"rank_a", r.rank_a},   {"e_card", r.e_card}, {"sv_pred", r.sv_pred}, {"svp", r.svp}};
}

Json trace_to_json(std::span<const IterRecord> trace) {
  Json arr = Json::array();
  for (const auto& r : trace) arr.push_back(to_json(r));
  return arr;
}

std::vector<IterRecord> trace_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("trace must be a JSON array");
  std::vector<IterRecord> out;
  out.reserve(j.size());
  try {
    for (const auto& e : j) {
      IterRecord r;
      r.iter = e.at("iter").get<int>();
      r.mu = e.at("mu").get<double>();
      r.feas = e.at("feas").get<double>();
      r.dual_est = e.at("dual_est").get<double>();
      r.rank_a = e.at("rank_a").get<Index>();
      r.e_card = e.at("e_card").get<Index>();
      r.sv_pred = e.at("sv_pred").get<Index>();
      r.svp = e.at("svp").get<Index>();
      out.push_back(r);
    }
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidArgument(std::string("malformed trace record: ") + ex.what());
  }
  return out;
}

Json to_json(const ResolvedRpcaConfig& c) {
  Json j{{"algorithm", std::string(to_string(c.algorithm))},
         {"lambda", c.lambda},
         {"mu0", c.mu0},
         {"rho", c.rho},
         {"eps1", c.eps1},
         {"eps2", c.eps2},
         {"max_iter", c.max_iter},
         {"sv0", c.sv0}};
  switch (c.algorithm) {
    case RpcaAlgorithm::it:
      j["tau"] = c.it_tau;
      j["delta"] = c.it_delta;
      break;
    case RpcaAlgorithm::apg:
      j["mu_bar"] = c.apg_mu_bar;
      j["eta"] = c.apg_eta;
      break;
    case RpcaAlgorithm::ealm:
      j["inner_tol"] = c.inner_tol;
      j["max_inner_iter"] = c.max_inner_iter;
      break;
    case RpcaAlgorithm::ialm:
      break;
  }
  return j;
}

namespace {

double rel_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& a_star) {
  if (a.rows() != a_star.rows() || a.cols() != a_star.cols())
    throw InvalidArgument("ground truth shape does not match the recovered matrix");
  const double n = a_star.norm();
  return n > 0.0 ? (a - a_star).norm() / n : (a - a_star).norm();
}

}  // namespace

Json summarize(const SolveResult& r, const Eigen::MatrixXd* a_star) {
  Json j{{"problem", "rpca"},
         {"config", to_json(r.config)},
         {"converged", r.converged},
         {"iterations", r.iterations},
         {"svd_count", r.svd_count},
         {"rank", r.trace.empty() ? Index{0} : r.trace.back().rank_a},
         {"e_card", count_nonzeros(r.E.eigen())}};
  if (a_star) j["rel_error"] = rel_error(r.A.eigen(), *a_star);
  j["warnings"] = r.warnings;
  return j;
}

Json summarize(const McResult& r, const McConfig& cfg, const Eigen::MatrixXd* a_star) {
  Json config{{"mu0", r.mu0},
              {"rho", r.rho},
              {"eps1", cfg.eps1},
              {"eps2", cfg.eps2},
              {"max_iter", cfg.max_iter},
              {"sv0", cfg.sv0},
              {"schedule", cfg.schedule == MuSchedule::geometric ? "geometric" : "adaptive"}};
  Json j{{"problem", "mc"},     {"config", config}, {"converged", r.converged}, {"iterations", r.iterations},
         {"rank", r.A.rank()}};
  if (a_star) j["rel_error"] = rel_error(r.A.materialize(), *a_star);
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const Manifest& m) {
  Json j{{"kind", m.kind}, {"m", m.m}, {"r", m.r}, {"seed", m.seed}};
  if (m.kind == "rpca") {
    j["corruption_frac"] = m.corruption_frac;
    j["e_card"] = m.e_card;
    j["lambda"] = m.lambda;
  } else {
    j["p"] = m.p;
    j["d_r"] = m.d_r;
  }
  j["files"] = m.files;
  return j;
}

Manifest manifest_from_json(const Json& j) {
  Manifest m;
  try {
    m.kind = j.at("kind").get<std::string>();
    if (m.kind != "rpca" && m.kind != "mc") throw InvalidArgument("manifest kind must be 'rpca' or 'mc'");
    m.m = j.at("m").get<Index>();
    m.r = j.at("r").get<Index>();
    m.seed = j.at("seed").get<std::uint64_t>();
    if (m.kind == "rpca") {
      m.corruption_frac = j.at("corruption_frac").get<double>();
      m.e_card = j.at("e_card").get<Index>();
      m.lambda = j.at("lambda").get<double>();
    } else {
      m.p = j.at("p").get<Index>();
      m.d_r = j.at("d_r").get<Index>();
    }
    m.files = j.at("files").get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidArgument(std::string("malformed manifest: ") + ex.what());
  }
  return m;
}

Manifest read_manifest(const std::filesystem::path& path) { return manifest_from_json(read_json(path)); }

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw InvalidArgument("failed writing '" + path.string() + "'");
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "' for reading");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidArgument("invalid JSON in '" + path.string() + "': " + ex.what());
  }
}

}  // namespace lowrank::report
