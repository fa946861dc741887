#include "qw/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "qw/acceptance.hpp"
#include "qw/coin_evolution.hpp"
#include "qw/error.hpp"
#include "qw/fixtures.hpp"
#include "qw/perturbation.hpp"
#include "qw/scattering.hpp"
#include "qw/smt_laplacian.hpp"

namespace qw {

using nlohmann::json;

namespace {

double parse_double(const std::string& s) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Config, "bad number '" + s + "'");
  }
}

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

json mat_json(const Mat& M) {
  json rows = json::array();
  for (int r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < M.cols(); ++c) row.push_back(cjson(M(r, c)));
    rows.push_back(row);
  }
  return rows;
}

std::string eps_tag(double e) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", e);
  return buf;
}

class Writer {
 public:
  Writer(const RunConfig& cfg, std::string command, const TailedGraph& g) : cfg_(cfg), command_(std::move(command)) {
    std::filesystem::create_directories(cfg.out_dir);
    graph_ = json::parse(graph_to_json_text(g));
  }

  // Writes `body` and its sidecar; `extra` lands in the sidecar.
  std::string write(const std::string& name, const std::string& body, json extra = json::object()) {
    const std::string path = (std::filesystem::path(cfg_.out_dir) / name).string();
    put(path, body);
    json meta = {{"file", name},
                 {"command", command_},
                 {"version", QWRES_VERSION},
                 {"tolerances", {{"cluster", cfg_.tol_cluster}, {"circle", cfg_.tol_circle}}},
                 {"graph", graph_},
                 {"epsilon", cfg_.eps}};
    for (auto& [k, v] : extra.items()) meta[k] = v;
    put(path + ".meta.json", meta.dump(2) + "\n");
    written_.push_back(path);
    return path;
  }

  const std::vector<std::string>& written() const { return written_; }

 private:
  static void put(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::Config, "cannot write " + path);
    f << body;
  }

  const RunConfig& cfg_;
  std::string command_;
  json graph_;
  std::vector<std::string> written_;
};

json cluster_decisions(const SpectralData& sd, double circle_tol) {
  json out = json::array();
  for (const auto& c : sd.clusters)
    out.push_back({{"mu", cjson(c.mu)},
                   {"multiplicity", c.mult},
                   {"spread", c.spread},
                   {"nilpotent", c.nilpotent},
                   {"on_circle", std::abs(std::abs(c.mu) - 1) <= circle_tol}});
  return out;
}

}  // namespace

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> parse_eps(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw Error(ErrorKind::Config, "range must be a:b:n");
    const double a = parse_double(parts[0]), b = parse_double(parts[1]);
    const double nd = parse_double(parts[2]);
    const int n = static_cast<int>(nd);
    if (n < 1 || n != nd) throw Error(ErrorKind::Config, "range point count must be a positive integer");
    for (int k = 0; k < n; ++k) out.push_back(n == 1 ? a : a + (b - a) * k / (n - 1));
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(parse_double(p));
  }
  if (out.empty()) throw Error(ErrorKind::Config, "empty epsilon list");
  for (double e : out)
    if (!(e >= 0 && e <= 1)) throw Error(ErrorKind::Config, "epsilon " + fmt17(e) + " outside [0,1]");
  return out;
}

TailedGraph load_graph(const RunConfig& cfg) {
  if (!cfg.preset.empty() && !cfg.graph_file.empty())
    throw Error(ErrorKind::Config, "--preset and --graph are mutually exclusive");
  if (!cfg.preset.empty()) {
    if (cfg.tails.empty()) throw Error(ErrorKind::Config, "--tails is required with --preset");
    return attach_tails(preset_graph(cfg.preset), parse_tails(cfg.tails));
  }
  if (cfg.graph_file.empty()) throw Error(ErrorKind::Config, "one of --preset or --graph is required");
  TailedGraph g = graph_from_json_file(cfg.graph_file);
  if (!cfg.tails.empty()) g = attach_tails(g.internal(), parse_tails(cfg.tails));
  if (g.tail_count() == 0) throw Error(ErrorKind::Config, "graph has no tails");
  return g;
}

void validate(const RunConfig& cfg, const TailedGraph& g) {
  if (cfg.grid < 8) throw Error(ErrorKind::Config, "--grid must be >= 8");
  if (cfg.inflow < 1 || cfg.inflow > g.tail_count())
    throw Error(ErrorKind::Config, "--inflow must be within 1.." + std::to_string(g.tail_count()));
  if (cfg.format != "csv" && cfg.format != "json") throw Error(ErrorKind::Config, "--format must be csv or json");
  if (!(cfg.tol_cluster > 0) || !(cfg.tol_circle > 0)) throw Error(ErrorKind::Config, "tolerances must be > 0");
  for (double e : cfg.eps)
    if (!(e >= 0 && e <= 1)) throw Error(ErrorKind::Config, "epsilon outside [0,1]");
}

std::vector<std::string> cmd_resonances(const RunConfig& cfg) {
  const TailedGraph g = load_graph(cfg);
  validate(cfg, g);
  Writer w(cfg, "resonances", g);
  std::vector<SpectralData> sds(cfg.eps.size());
  parallel_for(static_cast<int>(cfg.eps.size()),
               [&](int k) { sds[k] = spectral_decompose(build_E(g, cfg.eps[k]), cfg.tol_cluster); });

  std::ostringstream csv;
  json rows = json::array(), decisions = json::array(), warnings = json::array();
  csv << "epsilon,re_mu,im_mu,abs_mu,multiplicity,on_circle\n";
  for (size_t k = 0; k < cfg.eps.size(); ++k) {
    const auto& sd = sds[k];
    // One row per eigenvalue; multiplicity is that of its cluster.
    for (const auto& c : sd.clusters) {
      const bool on = std::abs(std::abs(c.mu) - 1) <= cfg.tol_circle;
      for (int r = 0; r < c.mult; ++r) {
        csv << fmt17(cfg.eps[k]) << ',' << fmt17(c.mu.real()) << ',' << fmt17(c.mu.imag()) << ','
            << fmt17(std::abs(c.mu)) << ',' << c.mult << ',' << (on ? "true" : "false") << '\n';
        rows.push_back({{"epsilon", cfg.eps[k]},
                        {"re_mu", c.mu.real()},
                        {"im_mu", c.mu.imag()},
                        {"abs_mu", std::abs(c.mu)},
                        {"multiplicity", c.mult},
                        {"on_circle", on}});
      }
    }
    decisions.push_back({{"epsilon", cfg.eps[k]}, {"clusters", cluster_decisions(sd, cfg.tol_circle)}});
    for (const auto& s : sd.warnings) warnings.push_back({{"epsilon", cfg.eps[k]}, {"warning", s}});
  }
  const json extra = {{"cluster_decisions", decisions}, {"warnings", warnings}};
  if (cfg.format == "csv")
    w.write("resonances.csv", csv.str(), extra);
  else
    w.write("resonances.json", rows.dump(2) + "\n", extra);

  std::ostringstream circle;
  circle << "theta,re,im\n";
  for (int k = 0; k <= 360; ++k) {
    const double t = 2 * kPi * k / 360;
    circle << fmt17(t) << ',' << fmt17(std::cos(t)) << ',' << fmt17(std::sin(t)) << '\n';
  }
  w.write("unit_circle.csv", circle.str());
  return w.written();
}

std::vector<std::string> cmd_transmission(const RunConfig& cfg) {
  const TailedGraph g = load_graph(cfg);
  validate(cfg, g);
  Writer w(cfg, "transmission", g);
  const auto grid = lambda_grid(cfg.grid);
  const int in = cfg.inflow - 1;
  std::vector<int> outs;
  for (int j = 0; j < g.tail_count(); ++j)
    if (j != in) outs.push_back(j);

  for (double eps : cfg.eps) {
    const ClosedFormSigma cf(g, eps, cfg.tol_cluster, cfg.tol_circle);
    std::vector<Mat> sig(grid.size());
    parallel_for(static_cast<int>(grid.size()), [&](int i) { sig[i] = cf.sigma(grid[i]); });

    std::ostringstream csv;
    json rows = json::array();
    csv << "lambda,re_exp_minus_i_lambda,im_exp_minus_i_lambda,tau_sq,reflection_sq\n";
    for (size_t i = 0; i < grid.size(); ++i) {
      const Vec col = sig[i].col(in);
      const double refl = std::norm(col(in));
      double tau = 0;
      for (int j : outs) tau += std::norm(col(j));
      const cplx z = std::exp(cplx(0, -grid[i]));
      csv << fmt17(grid[i]) << ',' << fmt17(z.real()) << ',' << fmt17(z.imag()) << ',' << fmt17(tau) << ','
          << fmt17(refl) << '\n';
      rows.push_back({{"lambda", grid[i]},
                      {"re_exp_minus_i_lambda", z.real()},
                      {"im_exp_minus_i_lambda", z.imag()},
                      {"tau_sq", tau},
                      {"reflection_sq", refl}});
    }
    const json extra = {{"epsilon_value", eps},
                        {"inflow_port", cfg.inflow},
                        {"grid", cfg.grid},
                        {"cluster_decisions", cluster_decisions(cf.spectral(), cfg.tol_circle)},
                        {"warnings", cf.warnings()}};
    const std::string tag = eps_tag(eps);
    if (cfg.format == "csv")
      w.write("transmission_eps" + tag + ".csv", csv.str(), extra);
    else
      w.write("transmission_eps" + tag + ".json", rows.dump(2) + "\n", extra);

    json dump = {{"epsilon", eps}, {"lambda", grid}, {"sigma", json::array()}};
    for (const auto& S : sig) dump["sigma"].push_back(mat_json(S));
    w.write("sigma_eps" + tag + ".json", dump.dump() + "\n", extra);
  }
  return w.written();
}

std::vector<std::string> cmd_perturb(const RunConfig& cfg) {
  const TailedGraph g = load_graph(cfg);
  validate(cfg, g);
  if (cfg.eps.size() < 3) throw Error(ErrorKind::Config, "perturb needs an epsilon ladder with >= 3 points");
  for (double e : cfg.eps)
    if (e <= 0) throw Error(ErrorKind::Config, "perturb ladder values must be > 0");
  Writer w(cfg, "perturb", g);

  const ESplit sp = build_E_split(g);
  const SpectralData sd0 = spectral_decompose(sp.E0, cfg.tol_cluster);
  const EigenClassification cls = classify(g, sd0);
  const ReductionLedger ledger = build_ledger(sp.E0, sp.E1, sd0, cfg.tol_cluster);
  const auto tracks = track_branches(g, sp.E0, sp.E1, sd0, ledger, cfg.eps);

  // Ledger
  json L = json::array();
  for (const auto& e : ledger.entries) {
    json branches = json::array();
    for (const auto& b1 : e.stage1)
      for (const auto& b2 : b1.stage2)
        branches.push_back({{"mu1", cjson(b1.mu1)},
                            {"mu2", cjson(b2.mu2)},
                            {"multiplicity", b2.mult},
                            {"persistent", b2.persistent}});
    const auto bound = mu2_bound_check(g, sd0, sp.E1, e);
    L.push_back({{"mu", cjson(e.mu)},
                 {"m", e.m},
                 {"branches", branches},
                 {"mu2_bound", {{"bound", bound.bound}, {"max_abs_mu2", bound.max_abs_mu2}, {"holds", bound.holds}}}});
  }
  json cls_json = {{"bipartite", cls.bipartite},
                   {"M_plus", cls.M_plus},
                   {"M_minus", cls.M_minus},
                   {"birth_dim_plus", cls.birth_dim_plus},
                   {"birth_dim_minus", cls.birth_dim_minus},
                   {"entries", json::array()}};
  for (const auto& e : cls.entries)
    cls_json["entries"].push_back({{"mu", cjson(e.value)},
                                   {"e0_multiplicity", e.e0_mult},
                                   {"inherited", e.inherited_mult},
                                   {"birth", e.birth_mult},
                                   {"t", e.has_t ? json(e.t_eigenvalue) : json(nullptr)},
                                   {"match_error", e.match_error}});
  const json decisions = {{"cluster_decisions", cluster_decisions(sd0, cfg.tol_circle)}};
  w.write("ledger.json", L.dump(2) + "\n", decisions);
  w.write("classification.json", cls_json.dump(2) + "\n", decisions);

  // Branch table and predicted-vs-true eigenvalues
  std::ostringstream br, asym;
  br << "branch,re_mu,im_mu,re_mu1,im_mu1,re_mu2,im_mu2,multiplicity,persistent,slope_first,slope_second,max_err_first,"
        "assumption_range,assumption_complete,assumption_nondegenerate,assumption_estimate\n";
  asym << "epsilon,re_true,im_true,re_pred,im_pred,abs_err,branch\n";
  auto tf = [](bool b) { return b ? "true" : "false"; };
  for (size_t k = 0; k < tracks.size(); ++k) {
    const auto& t = tracks[k];
    br << k << ',' << fmt17(t.mu.real()) << ',' << fmt17(t.mu.imag()) << ',' << fmt17(t.mu1.real()) << ','
       << fmt17(t.mu1.imag()) << ',' << fmt17(t.mu2.real()) << ',' << fmt17(t.mu2.imag()) << ',' << t.mult << ','
       << tf(t.persistent) << ',' << fmt17(t.slope_first) << ',' << fmt17(t.slope_second) << ','
       << fmt17(*std::max_element(t.err_first.begin(), t.err_first.end())) << ',' << tf(t.assumption_range) << ',' << tf(t.assumption_complete) << ',' << tf(t.assumption_nondegenerate) << ','
       << tf(t.assumption_estimate) << '\n';
    for (size_t i = 0; i < t.eps.size(); ++i) {
      const cplx pred = resonance_asymptote(t.mu, t.mu1, t.mu2, t.eps[i]);
      asym << fmt17(t.eps[i]) << ',' << fmt17(t.truth[i].real()) << ',' << fmt17(t.truth[i].imag()) << ','
           << fmt17(pred.real()) << ',' << fmt17(pred.imag()) << ',' << fmt17(std::abs(t.truth[i] - pred)) << ','
           << k << '\n';
    }
  }
  w.write("branches.csv", br.str());
  w.write("asymptote.csv", asym.str(), {{"prediction", "second-order Puiseux asymptote"}});

  // Non-resonant scattering: deviation from I and from the tail-tail block H_eps
  std::vector<double> lams;
  for (int k = 0; k < 64 && lams.size() < 8; ++k) {
    const double lam = 2 * kPi * (k + 0.5) / 64;
    double d = 1e9;
    for (const auto& c : sd0.clusters) d = std::min(d, std::abs(std::exp(cplx(0, -lam)) - c.mu));
    if (d > 0.2) lams.push_back(lam);
  }
  std::ostringstream nr;
  nr << "lambda,epsilon,sigma_minus_identity,sigma_minus_tail_block\n";
  for (double eps : cfg.eps) {
    const ClosedFormSigma cf(g, eps, cfg.tol_cluster, cfg.tol_circle);
    for (double lam : lams) {
      const Mat S = cf.sigma(lam);
      nr << fmt17(lam) << ',' << fmt17(eps) << ',' << fmt17((S - Mat::Identity(S.rows(), S.cols())).norm()) << ','
         << fmt17((S - cf.blocks().H).norm()) << '\n';
    }
  }
  w.write("nonresonant.csv", nr.str());

  // Resonant limit along lambda_eps
  std::ostringstream rl;
  rl << "branch,re_mu,im_mu,re_mu1,im_mu1,epsilon,lambda,abs_err,caveat\n";
  json limits = json::array();
  int bi = 0;
  for (const auto& e : ledger.entries) {
    for (int b = 0; b < static_cast<int>(e.stage1.size()); ++b, ++bi) {
      const auto& b1 = e.stage1[b];
      if (std::abs(b1.mu1) < 1e-9) continue;
      bool ok = true;
      for (const auto& t : tracks)
        if (std::abs(t.mu - e.mu) < 1e-9 && std::abs(t.mu1 - b1.mu1) < 1e-9) ok = ok && t.assumption_ok();
      const auto lim = resonant_sigma_limit(g, e, b, ok);
      for (double eps : cfg.eps) {
        const double lam = resonant_lambda(e.mu, b1.mu1, eps);
        const Mat S = ClosedFormSigma(g, eps, cfg.tol_cluster, cfg.tol_circle).sigma(lam);
        const double err = (S - Mat::Identity(S.rows(), S.cols()) - lim.sigma1).norm();
        rl << bi << ',' << fmt17(e.mu.real()) << ',' << fmt17(e.mu.imag()) << ',' << fmt17(b1.mu1.real()) << ','
           << fmt17(b1.mu1.imag()) << ',' << fmt17(eps) << ',' << fmt17(lam) << ',' << fmt17(err) << ','
           << tf(lim.caveat) << '\n';
      }
      json rho = json::array();
      for (cplx r : lim.rho) rho.push_back(cjson(r));
      limits.push_back({{"branch", bi},
                        {"mu", cjson(e.mu)},
                        {"mu1", cjson(b1.mu1)},
                        {"sigma1", mat_json(lim.sigma1)},
                        {"rho", rho},
                        {"caveat", lim.caveat},
                        {"note", lim.note}});
    }
  }
  w.write("resonant_limit.csv", rl.str());
  w.write("resonant_limit.json", limits.dump(2) + "\n");
  return w.written();
}

VerifyOutcome cmd_verify(const std::vector<std::string>& fixtures, std::optional<double> tol,
                         const std::string& out_dir) {
  AcceptanceOptions opt;
  opt.fixtures = fixtures;
  opt.tol = tol;
  const auto results = run_acceptance(opt);
  VerifyOutcome out;
  for (const auto& r : results) {
    out.lines.push_back(format_line(r));
    if (r.status == "FAIL") ++out.failed;
  }
  json j = {{"version", QWRES_VERSION},
            {"fixtures", fixtures},
            {"tolerance_override", tol ? json(*tol) : json(nullptr)},
            {"failed", out.failed},
            {"criteria", json::parse(results_to_json(results))}};
  out.json = j.dump(2) + "\n";
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream f(std::filesystem::path(out_dir) / "verify.json", std::ios::binary);
    if (!f) throw Error(ErrorKind::Config, "cannot write verify.json");
    f << out.json;
  }
  return out;
}

}  // namespace qw
