#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "lowrank/mc.hpp"
#include "lowrank/rpca.hpp"

namespace lowrank::report {

using Json = nlohmann::ordered_json;

Json to_json(const IterRecord& r);
Json trace_to_json(std::span<const IterRecord> trace);
std::vector<IterRecord> trace_from_json(const Json& j);

Json to_json(const ResolvedRpcaConfig& c);

/// converged, iterations, svd_count, rank, e_card, warnings and the resolved
/// config; rel_error when a_star is given. The trace is added separately.
Json summarize(const SolveResult& r, const Eigen::MatrixXd* a_star = nullptr);
Json summarize(const McResult& r, const McConfig& cfg, const Eigen::MatrixXd* a_star = nullptr);

/// Description of a generated instance; file paths are relative to the
/// manifest's directory.
struct Manifest {
  std::string kind;  // "rpca" or "mc"
  Index m = 0;
  Index r = 0;
  std::uint64_t seed = 0;
  double corruption_frac = 0.0;  // rpca
  Index e_card = 0;              // rpca
  double lambda = 0.0;           // rpca
  Index p = 0;                   // mc
  Index d_r = 0;                 // mc
  std::map<std::string, std::string> files;
};

Json to_json(const Manifest& m);
/// Throws InvalidArgument on missing or mistyped fields.
Manifest manifest_from_json(const Json& j);
Manifest read_manifest(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

}  // namespace lowrank::report
