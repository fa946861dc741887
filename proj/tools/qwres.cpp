// qwres: resonances, scattering and perturbation reports for Grover walks on graphs with tails.
#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "qw/error.hpp"
#include "qw/report.hpp"

namespace {

void add_graph_options(CLI::App* sub, qw::RunConfig& cfg, std::string& eps_text) {
  sub->add_option("--preset", cfg.preset, "cycle:<n> or complete:<n>");
  sub->add_option("--graph", cfg.graph_file, "graph JSON file");
  sub->add_option("--tails", cfg.tails, "tail attachments, e.g. v0,v1,v2 or v0*2");
  sub->add_option("--eps", eps_text, "epsilon list (a,b,c) or range a:b:n");
  sub->add_option("--out", cfg.out_dir, "output directory");
  sub->add_option("--format", cfg.format, "csv or json");
  sub->add_option("--tol-cluster", cfg.tol_cluster, "eigenvalue clustering tolerance");
  sub->add_option("--tol-circle", cfg.tol_circle, "unit-circle tolerance");
}

int run(int argc, char** argv) {
  CLI::App app{"Resonances and scattering of tunable Grover walks on graphs with tails"};
  app.set_version_flag("--version", QWRES_VERSION);
  app.require_subcommand(1);

  qw::RunConfig cfg;
  std::string eps_text;
  auto* res = app.add_subcommand("resonances", "spectrum of E_eps per epsilon");
  add_graph_options(res, cfg, eps_text);

  auto* tr = app.add_subcommand("transmission", "transmission and reflection over a lambda grid");
  add_graph_options(tr, cfg, eps_text);
  tr->add_option("--grid", cfg.grid, "lambda grid size (>= 8)");
  tr->add_option("--inflow", cfg.inflow, "inflow port (1-based)");

  auto* pt = app.add_subcommand("perturb", "reduction ledger and asymptotics over an epsilon ladder");
  add_graph_options(pt, cfg, eps_text);

  std::vector<std::string> fixtures;
  double tol_override = 0;
  std::string verify_out;
  auto* vf = app.add_subcommand("verify", "run the acceptance suite on the built-in fixtures");
  vf->add_option("--fixture", fixtures, "restrict to fixture id (repeatable)");
  auto* tol_opt = vf->add_option("--tol", tol_override, "replace absolute residual tolerances");
  vf->add_option("--out", verify_out, "directory for verify.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (vf->parsed()) {
      const auto out = qw::cmd_verify(fixtures, tol_opt->count() ? std::optional<double>(tol_override) : std::nullopt,
                                      verify_out);
      for (const auto& l : out.lines) std::printf("%s\n", l.c_str());
      if (verify_out.empty()) std::printf("%s", out.json.c_str());
      return out.failed == 0 ? 0 : 1;
    }
    if (!eps_text.empty())
      cfg.eps = qw::parse_eps(eps_text);
    else if (pt->parsed())
      cfg.eps = {0.02, 0.01, 0.005};
    std::vector<std::string> files;
    if (res->parsed()) files = qw::cmd_resonances(cfg);
    if (tr->parsed()) files = qw::cmd_transmission(cfg);
    if (pt->parsed()) files = qw::cmd_perturb(cfg);
    for (const auto& f : files) std::printf("%s\n", f.c_str());
    return 0;
  } catch (const qw::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return qw::is_config_error(e.kind()) ? 2 : 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
