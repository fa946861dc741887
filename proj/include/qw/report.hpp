#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qw/internal_spectral.hpp"
#include "qw/tailed_graph.hpp"

namespace qw {

struct RunConfig {
  std::string preset;      // "cycle:4", ...
  std::string graph_file;  // JSON graph, used when preset is empty
  std::string tails;       // overrides tails in the graph file when non-empty
  std::vector<double> eps{0.25};
  int grid = 512;
  int inflow = 1;  // 1-based
  std::string out_dir = ".";
  std::string format = "csv";
  double tol_cluster = kClusterTol;
  double tol_circle = kCircleTol;
};

// "0.1,0.2" or "a:b:n" (n points, both ends included). Values must lie in [0,1].
std::vector<double> parse_eps(const std::string& text);
// %.17g
std::string fmt17(double x);

TailedGraph load_graph(const RunConfig& cfg);
// Checks ranges; throws Config errors.
void validate(const RunConfig& cfg, const TailedGraph& g);

// Each command writes into cfg.out_dir and returns the paths it wrote (sidecars excluded).
std::vector<std::string> cmd_resonances(const RunConfig& cfg);
std::vector<std::string> cmd_transmission(const RunConfig& cfg);
std::vector<std::string> cmd_perturb(const RunConfig& cfg);

struct VerifyOutcome {
  int failed = 0;
  std::vector<std::string> lines;
  std::string json;
};
VerifyOutcome cmd_verify(const std::vector<std::string>& fixtures, std::optional<double> tol,
                         const std::string& out_dir);

}  // namespace qw
