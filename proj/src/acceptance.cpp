#include "qw/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <json.hpp>
#include <limits>
#include <random>
#include <sstream>

#include "qw/coin_evolution.hpp"
#include "qw/error.hpp"
#include "qw/fixtures.hpp"
#include "qw/internal_spectral.hpp"
#include "qw/perturbation.hpp"
#include "qw/scattering.hpp"
#include "qw/smt_laplacian.hpp"

namespace qw {

namespace {

struct Setup {
  Fixture fx;
  ESplit split;
  SpectralData sd0;
  ReductionLedger ledger;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::string fmtc(cplx z) { return "(" + fmt(z.real()) + "," + fmt(z.imag()) + ")"; }

bool is_c4(const Setup& s) { return s.fx.id.rfind("c4", 0) == 0; }
bool is_k4(const Setup& s) { return s.fx.id.rfind("k4", 0) == 0; }

double tol_or(const AcceptanceOptions& o, double t) { return o.tol ? *o.tol : t; }

CriterionResult make(int id, const std::string& title, bool pass, double measured, double threshold,
                     const std::string& detail) {
  return {id, title, pass ? "PASS" : "FAIL", measured, threshold, detail, 0};
}

CriterionResult skip(int id, const std::string& title, const std::string& why) {
  return {id, title, "SKIP", 0, 0, why, 0};
}

// ---- 1: C4 unperturbed spectrum
CriterionResult c1(const std::vector<Setup>& S, const AcceptanceOptions& o) {
  const std::string title = "C4 unperturbed spectrum {1,-1,i,-i}, m=2, D=0";
  const Setup* s = nullptr;
  for (const auto& x : S)
    if (is_c4(x)) s = &x;
  if (!s) return skip(1, title, "no C4 fixture selected");
  const double tol = tol_or(o, 1e-10);
  const SpectralData sd = spectral_decompose(build_E(s->fx.graph, 0.0));
  bool ok = sd.clusters.size() == 4;
  double err = 0, dmax = 0;
  for (cplx target : {cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)}) {
    int hits = 0;
    for (cplx ev : sd.eigenvalues)
      if (std::abs(ev - target) < 1e-6) {
        ++hits;
        err = std::max(err, std::abs(ev - target));
      }
    ok = ok && hits == 2;
  }
  for (const auto& c : sd.clusters) {
    dmax = std::max(dmax, c.D.norm());
    ok = ok && c.mult == 2 && !c.nilpotent;
  }
  ok = ok && err < tol && dmax < tol;
  return make(1, title, ok, std::max(err, dmax), tol,
              "clusters=" + std::to_string(sd.clusters.size()) + " max_eig_err=" + fmt(err) + " max|D|=" + fmt(dmax));
}

// ---- 2: scattering unitarity
CriterionResult c2(const std::vector<Setup>& S, const AcceptanceOptions& o) {
  const double tol = tol_or(o, 1e-9);
  double worst = 0;
  std::string where;
  for (const auto& s : S) {
    for (double eps : {0.1, 0.25, 0.5}) {
      const ClosedFormSigma cf(s.fx.graph, eps);
      for (double lam : lambda_grid(256)) {
        const Mat Sg = cf.sigma(lam);
        const double r = (Sg.adjoint() * Sg - Mat::Identity(Sg.rows(), Sg.cols())).norm();
        if (r > worst) {
          worst = r;
          where = s.fx.id + " eps=" + fmt(eps);
        }
      }
    }
  }
  return make(2, "scattering matrix unitary on 256-point grid, eps in {0.1,0.25,0.5}", worst < tol, worst, tol,
              "fixtures=" + std::to_string(S.size()) + " worst at " + where);
}

// ---- 3: stationary iteration vs closed form
CriterionResult c3(const std::vector<Setup>& S, const AcceptanceOptions& o) {
  const double tol = tol_or(o, 1e-7);
  double worst = 0;
  int samples = 0;
  for (size_t fi = 0; fi < S.size(); ++fi) {
    const auto& g = S[fi].fx.graph;
    std::mt19937 rng(1234 + static_cast<unsigned>(fi));
    std::uniform_real_distribution<double> U(0.0, 2 * kPi);
    std::normal_distribution<double> N(0.0, 1.0);
    for (double eps : {0.1, 0.25, 0.5}) {
      const ClosedFormSigma cf(g, eps);
      for (int k = 0; k < 16; ++k) {
        const double lam = k == 0 ? kPi : U(rng);  // k = 0: e^{-i lambda} = -1
        Vec a(g.tail_count());
        for (int j = 0; j < a.size(); ++j) a(j) = cplx(N(rng), N(rng));
        a.normalize();
        const auto it = stationary_iterate(g, eps, lam, a, 1000000, 1e-12);
        worst = std::max(worst, (it.alpha_out - cf.alpha_out(lam, a)).norm());
        ++samples;
      }
    }
  }
  return make(3, "stationary iteration equals closed form (incl. e^{-i lambda}=-1)", worst < tol, worst, tol,
              "samples=" + std::to_string(samples));
}

// ---- 4: confinement to the closed unit disc
CriterionResult c4(const std::vector<Setup>& S, const AcceptanceOptions& o) {
  const double tol = tol_or(o, 1e-10);
  double worst = 0;
  for (const auto& s : S)
    for (int k = 0; k <= 10; ++k) {
      Eigen::ComplexEigenSolver<Mat> es(build_E(s.fx.graph, k / 10.0), false);
      worst = std::max(worst, es.eigenvalues().cwiseAbs().maxCoeff());
    }
  return make(4, "max |mu| <= 1 + tol over an 11-point eps grid", worst <= 1 + tol, worst - 1, tol,
              "max|mu|-1=" + fmt(worst - 1));
}

// ---- 5: outgoing residual
CriterionResult c5(const std::vector<Setup>& S, const AcceptanceOptions& o) {
  const double tol = tol_or(o, 1e-8);
  double worst = 0;
  int count = 0;
  for (const auto& s : S)
    for (double eps : {0.1, 0.25, 0.5}) {
      const Mat E = build_E(s.fx.graph, eps);
      const SpectralData sd = spectral_decompose(E);
      for (const auto& c : sd.clusters) {
        if (std::abs(c.mu) >= 1 - 1e-6) continue;
        const Mat basis = column_basis(c.P, 1e-8);
        for (int k = 0; k < basis.cols(); ++k) {
          const Vec u = basis.col(k).normalized();
          const auto rep = verify_outgoing(s.fx.graph, eps, c.mu, u, 20);
          worst = std::max(worst, rep.residual);
          ++count;
        }
      }
    }
  return make(5, "outgoing extension residual on depth-20 truncation", count > 0 && worst < tol, worst, tol,
              "resonant states checked=" + std::to_string(count));
}

// ---- 6: spectral mapping
CriterionResult c6(const std::vector<Setup>& S, const AcceptanceOptions& o) {
  const double tol = tol_or(o, 1e-9);
  bool ok = true;
  double err = 0;
  std::ostringstream det;
  for (const auto& s : S) {
    try {
      const auto cls = classify(s.fx.graph, s.sd0);
      for (const auto& e : cls.entries) err = std::max(err, e.match_error);
      int want_p = cls.M_plus, want_m = cls.M_minus;
      if (is_c4(s)) want_p = 1, want_m = 1;
      if (is_k4(s)) want_p = 3, want_m = 2;
      const bool m_ok = cls.M_plus == want_p && cls.M_minus == want_m && cls.birth_dim_plus == want_p &&
                        cls.birth_dim_minus == want_m;
      ok = ok && m_ok;
      det << s.fx.id << ":M+=" << cls.M_plus << ",M-=" << cls.M_minus << " ";
    } catch (const Error& e) {
      ok = false;
      det << s.fx.id << ":" << e.what() << " ";
    }
  }
  ok = ok && err < tol;
  det << "max_preimage_err=" << fmt(err);
  return make(6, "Joukowsky preimages match E_0|L, birth multiplicities exact", ok, err, tol, det.str());
}

// ---- 7: birth states persist
CriterionResult c7(const std::vector<Setup>& S, const AcceptanceOptions& o) {
  const double tol = tol_or(o, 1e-9);
  double worst = 0;
  int states = 0;
  for (const auto& s : S) {
    const auto cls = classify(s.fx.graph, s.sd0);
    for (double eps : {0.1, 0.5}) {
      const Mat E = build_E(s.fx.graph, eps);
      for (const auto& [mu, B] : {std::pair<cplx, Mat>{1.0, cls.birth_plus}, {-1.0, cls.birth_minus}}) {
        for (int k = 0; k < B.cols(); ++k) {
          worst = std::max(worst, (E * B.col(k) - mu * B.col(k)).norm());
          ++states;
        }
      }
    }
  }
  return make(7, "birth +-1 states satisfy (E_eps -+ 1)u = 0 at eps in {0.1,0.5}", states > 0 && worst < tol, worst,
              tol, "state checks=" + std::to_string(states));
}

std::vector<BranchTrack> tracks_for(const Setup& s, const std::vector<double>& ladder) {
  return track_branches(s.fx.graph, s.split.E0, s.split.E1, s.sd0, s.ledger, ladder);
}

// ---- 8: first- and second-order asymptotics
CriterionResult c8(const std::vector<Setup>& S, const AcceptanceOptions&) {
  const std::vector<double> ladder{0.02, 0.01, 0.005};
  double min1 = std::numeric_limits<double>::infinity(), min2 = min1;
  int n1 = 0, n2 = 0, exact = 0;
  bool ok = true;
  for (const auto& s : S) {
    for (const auto& t : tracks_for(s, ladder)) {
      if (t.persistent) continue;
      // Residuals at roundoff level mean the expansion is exact along this branch.
      const double e1max = *std::max_element(t.err_first.begin(), t.err_first.end());
      if (e1max < 1e-12) {
        ++exact;
      } else {
        min1 = std::min(min1, t.slope_first);
        ok = ok && t.slope_first >= 1.8;
      }
      ++n1;
      if (t.assumption_ok()) {
        min2 = std::min(min2, t.slope_second);
        ok = ok && t.slope_second >= 1.8;
        ++n2;
      }
    }
  }
  ok = ok && n1 > 0;
  return make(8, "resonance asymptotics: first-order and second-order residual slopes >= 1.8", ok,
              std::min(min1, min2), 1.8,
              "branches=" + std::to_string(n1) + " (exact to roundoff: " + std::to_string(exact) +
                  ") min_slope_first=" + fmt(min1) + " second-order branches=" + std::to_string(n2) +
                  " min_slope_second=" + fmt(min2));
}

// ---- 9: projection expansion order
CriterionResult c9(const std::vector<Setup>& S, const AcceptanceOptions&) {
  double worst = std::numeric_limits<double>::infinity();
  int n = 0, exact = 0;
  std::string where;
  const cplx k1 = kappa_of(0.02);
  for (const auto& s : S) {
    for (int i = 0; i < static_cast<int>(s.sd0.clusters.size()); ++i) {
      const auto pe = projection_expansion(s.split.E0, s.split.E1, s.sd0, i);
      const double r = 0.5 * s.sd0.min_gap(i);
      const double e_a =
          (total_projection(s.split.E0, s.split.E1, s.sd0, i, k1, r) - pe.sum(k1)).norm();
      const double e_b =
          (total_projection(s.split.E0, s.split.E1, s.sd0, i, k1 / 2.0, r) - pe.sum(k1 / 2.0)).norm();
      ++n;
      if (e_a < 1e-11) {
        ++exact;
        continue;
      }
      const double order = std::log2(e_a / e_b);
      if (order < worst) {
        worst = order;
        where = s.fx.id + " mu=" + fmtc(s.sd0.clusters[i].mu);
      }
    }
  }
  return make(9, "projection expansion ratio-test order >= 3.7", n > 0 && worst >= 3.7, worst, 3.7,
              "clusters=" + std::to_string(n) + " (exact: " + std::to_string(exact) + ") min order at " + where);
}

std::vector<double> nonresonant_lambdas(const SpectralData& sd0) {
  std::vector<double> cand;
  for (int k = 0; k < 64; ++k) {
    const double lam = 2 * kPi * (k + 0.5) / 64;
    const cplx z = std::exp(cplx(0, -lam));
    double d = std::numeric_limits<double>::infinity();
    for (const auto& c : sd0.clusters) d = std::min(d, std::abs(z - c.mu));
    if (d > 0.2) cand.push_back(lam);
  }
  std::vector<double> out;
  for (int k = 0; k < 8 && !cand.empty(); ++k) out.push_back(cand[k * cand.size() / 8]);
  return out;
}

// ---- 10: non-resonant scattering
CriterionResult c10(const std::vector<Setup>& S, const AcceptanceOptions&) {
  const std::vector<double> ladder{0.04, 0.02, 0.01};
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, lo_h = lo, hi_h = -lo;
  int n = 0;
  for (const auto& s : S) {
    const auto lams = nonresonant_lambdas(s.sd0);
    std::vector<std::vector<double>> dev(lams.size()), dev_h(lams.size());
    for (double eps : ladder) {
      const ClosedFormSigma cf(s.fx.graph, eps);
      for (size_t k = 0; k < lams.size(); ++k) {
        const Mat Sg = cf.sigma(lams[k]);
        dev[k].push_back((Sg - Mat::Identity(Sg.rows(), Sg.cols())).norm());
        dev_h[k].push_back((Sg - cf.blocks().H).norm());
      }
    }
    for (size_t k = 0; k < lams.size(); ++k) {
      const double sl = loglog_slope(ladder, dev[k]);
      const double sh = loglog_slope(ladder, dev_h[k]);
      lo = std::min(lo, sl);
      hi = std::max(hi, sl);
      lo_h = std::min(lo_h, sh);
      hi_h = std::max(hi_h, sh);
      ++n;
    }
  }
  const bool ok = n > 0 && lo >= 1.8 && hi <= 2.2;
  return make(10, "non-resonant |Sigma_eps - I| slope 2 +- 0.2", ok, lo, 2.0,
              "lambda samples=" + std::to_string(n) + " slope range [" + fmt(lo) + ", " + fmt(hi) +
                  "]; tail-tail coin block moves at O(eps): |Sigma_eps - H_eps| slope range [" + fmt(lo_h) + ", " +
                  fmt(hi_h) + "]");
}

// ---- 11: resonant scattering limit
CriterionResult c11(const std::vector<Setup>& S, const AcceptanceOptions&) {
  const std::vector<double> ladder{0.04, 0.02, 0.01};
  int run = 0, skipped = 0;
  bool ok = true;
  double worst_ratio = 0;
  for (const auto& s : S) {
    const auto tracks = tracks_for(s, ladder);
    for (const auto& e : s.ledger.entries) {
      for (int b = 0; b < static_cast<int>(e.stage1.size()); ++b) {
        const auto& br = e.stage1[b];
        if (std::abs(br.mu1) < 1e-9) continue;
        bool assume = true;
        for (const auto& t : tracks)
          if (std::abs(t.mu - e.mu) < 1e-9 && std::abs(t.mu1 - br.mu1) < 1e-9) assume = assume && t.assumption_ok();
        if (!assume) {
          ++skipped;
          continue;
        }
        const auto lim = resonant_sigma_limit(s.fx.graph, e, b, true);
        std::vector<double> err;
        for (double eps : ladder) {
          const ClosedFormSigma cf(s.fx.graph, eps);
          const Mat Sg = cf.sigma(resonant_lambda(e.mu, br.mu1, eps));
          err.push_back((Sg - Mat::Identity(Sg.rows(), Sg.cols()) - lim.sigma1).norm());
        }
        const bool dec = err[1] < err[0] && err[2] < err[1];
        const double ratio = err[2] / err[0];
        worst_ratio = std::max(worst_ratio, ratio);
        ok = ok && dec && ratio < 0.5;
        ++run;
      }
    }
  }
  if (run == 0) return skip(11, "resonant limit", "no branch passed the assumption checks");
  return make(11, "resonant |Sigma_eps(lambda_eps) - I - Sigma_0^(1)| decreases, final < 0.5 initial", ok,
              worst_ratio, 0.5,
              "branches run=" + std::to_string(run) + " skipped=" + std::to_string(skipped) +
                  " worst final/initial=" + fmt(worst_ratio));
}

// ---- 12: stage-1 scalar at +-1
CriterionResult c12(const std::vector<Setup>& S, const AcceptanceOptions& o) {
  const std::string title = "stage-1 scalar at mu=+-1 on C4+3 tails equals -(1/#A) sum n_i/n";
  const double tol = tol_or(o, 1e-10);
  bool any = false, ok = true;
  double err = 0;
  std::ostringstream det;
  for (const auto& s : S) {
    const auto& g = s.fx.graph;
    if (!is_c4(s) || g.tail_count() != 3) continue;
    any = true;
    double expect = 0;
    for (int v : g.boundary_vertices()) expect += double(g.n_i(v)) / g.n(v);
    expect /= -g.arc_count();
    for (cplx mu : {cplx(1, 0), cplx(-1, 0)}) {
      const int idx = s.sd0.find(mu, 1e-6);
      const auto& e = s.ledger.entries[idx];
      int nonzero = 0;
      for (const auto& b : e.stage1) {
        if (std::abs(b.mu1) < 1e-9) continue;
        ++nonzero;
        const cplx eta = b.mu1 / gamma_of(mu);
        err = std::max({err, std::abs(eta - expect), std::abs(expect + 0.25)});
        det << s.fx.id << " mu=" << fmt(mu.real()) << ": eigenvalue " << fmtc(b.mu1) << " = gamma(mu)*" << fmtc(eta)
            << "; ";
      }
      ok = ok && nonzero == 1;
    }
  }
  if (!any) return skip(12, title, "no C4+3 tails fixture selected");
  ok = ok && err < tol;
  std::string d = det.str();
  if (d.size() >= 2) d.resize(d.size() - 2);
  return make(12, title, ok, err, tol, d);
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
  std::vector<Setup> setups;
  for (auto& f : acceptance_fixtures()) {
    if (!opt.fixtures.empty() && std::find(opt.fixtures.begin(), opt.fixtures.end(), f.id) == opt.fixtures.end())
      continue;
    Setup s{f, build_E_split(f.graph), {}, {}};
    s.sd0 = spectral_decompose(s.split.E0);
    s.ledger = build_ledger(s.split.E0, s.split.E1, s.sd0);
    setups.push_back(std::move(s));
  }
  for (const auto& id : opt.fixtures) fixture_by_id(id);  // rejects unknown ids

  using Fn = std::function<CriterionResult(const std::vector<Setup>&, const AcceptanceOptions&)>;
  const std::vector<std::pair<int, Fn>> all{{1, c1}, {2, c2}, {3, c3},  {4, c4},   {5, c5},   {6, c6},
                                            {7, c7}, {8, c8}, {9, c9}, {10, c10}, {11, c11}, {12, c12}};
  std::vector<CriterionResult> out;
  for (const auto& [id, fn] : all) {
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = fn(setups, opt);
    } catch (const std::exception& e) {
      r = {id, "criterion " + std::to_string(id), "FAIL", 0, 0, std::string("exception: ") + e.what(), 0};
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  char head[64];
  std::snprintf(head, sizeof head, "[%s] %2d ", r.status.c_str(), r.id);
  std::string line = head + r.title;
  if (r.status != "SKIP") line += " | measured=" + fmt(r.measured) + " threshold=" + fmt(r.threshold);
  line += " | " + r.detail + " | " + fmt(r.seconds) + "s";
  return line;
}

std::string results_to_json(const std::vector<CriterionResult>& rs) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rs)
    j.push_back({{"id", r.id},
                 {"title", r.title},
                 {"status", r.status},
                 {"measured", r.measured},
                 {"threshold", r.threshold},
                 {"detail", r.detail},
                 {"seconds", r.seconds}});
  return j.dump(2);
}

}  // namespace qw
