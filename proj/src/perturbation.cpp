#include "qw/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "qw/coin_evolution.hpp"
#include "qw/error.hpp"

namespace qw {

namespace {

Mat identity_like(const Mat& A) { return Mat::Identity(A.rows(), A.cols()); }

// Spectral data of Op restricted to Ran(Pi), lifted back to the full space.
struct RangePart {
  cplx value;
  int mult;
  Mat P, S;
  double nilpotent;
};

std::vector<RangePart> reduce_on_range(const Mat& Pi, const Mat& Op, double cluster_tol) {
  const int r = static_cast<int>(std::lround(Pi.trace().real()));
  std::vector<RangePart> out;
  if (r <= 0) return out;
  Eigen::JacobiSVD<Mat> svd(Pi, Eigen::ComputeThinU);
  const Mat Q = svd.matrixU().leftCols(r);
  const Mat Yh = Q.adjoint() * Pi;  // P_range = Q Yh, Yh Q = I
  const Mat B = Yh * Op * Q;
  const SpectralData sd = spectral_decompose(B, cluster_tol);
  for (int i = 0; i < static_cast<int>(sd.clusters.size()); ++i) {
    const auto& c = sd.clusters[i];
    RangePart p;
    p.value = c.mu;
    p.mult = c.mult;
    p.P = Q * c.P * Yh;
    p.S = Q * reduced_resolvent(B, sd, i) * Yh;
    p.nilpotent = c.D.norm();
    out.push_back(std::move(p));
  }
  return out;
}

bool is_pm_one(cplx z) { return std::abs(z - 1.0) < 1e-9 || std::abs(z + 1.0) < 1e-9; }

}  // namespace

Mat reduced_resolvent(const Mat& A, const SpectralData& sd, int index) {
  const cplx mu = sd.clusters[index].mu;
  Mat S = Mat::Zero(A.rows(), A.cols());
  for (int k = 0; k < static_cast<int>(sd.clusters.size()); ++k) {
    if (k == index) continue;
    const auto& c = sd.clusters[k];
    const Mat N = A - c.mu * identity_like(A);
    Mat term = c.P;
    const int nmax = c.nilpotent ? c.mult : 1;
    for (int n = 0; n < nmax; ++n) {
      S -= std::pow(mu - c.mu, -n - 1) * term;
      term = N * term;
    }
  }
  return S;
}

Mat total_projection(const Mat& E0, const Mat& E1, const SpectralData& sd0, int index, cplx kappa, double radius,
                     int nodes) {
  const Mat Ek = E0 + kappa * E1;
  const cplx mu = sd0.clusters[index].mu;
  Eigen::ComplexEigenSolver<Mat> es(Ek, false);
  int inside = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()(i) - mu) < radius) ++inside;
  if (inside != sd0.clusters[index].mult) {
    std::ostringstream os;
    os << inside << " eigenvalues inside the contour around " << mu << ", expected " << sd0.clusters[index].mult;
    throw Error(ErrorKind::GroupEscapedContour, os.str());
  }
  return projection_contour_oracle(Ek, mu, radius, nodes);
}

ProjectionExpansion projection_expansion(const Mat& E0, const Mat& E1, const SpectralData& sd0, int index) {
  ProjectionExpansion pe;
  pe.P = sd0.clusters[index].P;
  pe.S = reduced_resolvent(E0, sd0, index);
  const Mat& A = E1;
  // P^(n) = (-1)^{n+1} sum over k_1+...+k_{n+1} = n of X_{k_1} A X_{k_2} ... A X_{k_{n+1}},
  // with X_0 = -P and X_k = S^k.
  std::vector<Mat> X{-pe.P, pe.S, pe.S * pe.S, pe.S * pe.S * pe.S};
  auto coeff = [&](int n) -> Mat {
    Mat total = Mat::Zero(A.rows(), A.cols());
    std::function<void(int, int, const Mat&)> rec = [&](int slot, int left, const Mat& acc) {
      if (slot == n) {
        total += acc * X[left];
        return;
      }
      for (int k = 0; k <= left; ++k) rec(slot + 1, left - k, Mat(acc * X[k] * A));
    };
    rec(0, n, identity_like(A));
    return ((n + 1) % 2 == 0 ? 1.0 : -1.0) * total;
  };
  pe.P1 = coeff(1);
  pe.P2 = coeff(2);
  pe.P3 = coeff(3);
  return pe;
}

LedgerEntry reduce(const Mat& E0, const Mat& E1, const SpectralData& sd0, int index, double cluster_tol) {
  LedgerEntry e;
  e.cluster = index;
  e.mu = sd0.clusters[index].mu;
  e.m = sd0.clusters[index].mult;
  e.P = sd0.clusters[index].P;
  e.S = reduced_resolvent(E0, sd0, index);
  const Mat& A = E1;
  const Mat& P = e.P;
  const Mat& S = e.S;
  e.A1 = P * A * P;
  // Kato: coefficient of kappa in kappa^{-1}(E_kappa - mu) P_{kappa,mu}.
  e.A11 = -(P * A * P * A * S + P * A * S * A * P + S * A * P * A * P);

  for (auto& p1 : reduce_on_range(P, e.A1, cluster_tol)) {
    if (p1.nilpotent > 1e-8) {
      std::ostringstream os;
      os << "stage-1 nilpotent norm " << p1.nilpotent << " at mu=" << e.mu << ", mu1=" << p1.value;
      throw Error(ErrorKind::Stage1NotSemisimple, os.str());
    }
    Stage1Branch b;
    b.mu1 = p1.value;
    b.mult = p1.mult;
    b.P1 = p1.P;
    b.S1 = p1.S;
    b.nilpotent = p1.nilpotent;
    b.A2 = b.P1 * e.A11 * b.P1;
    for (auto& p2 : reduce_on_range(b.P1, b.A2, cluster_tol)) {
      Stage2Branch s;
      s.mu2 = p2.value;
      s.mult = p2.mult;
      s.P2 = p2.P;
      s.S2 = p2.S;
      s.nilpotent = p2.nilpotent;
      s.persistent = std::abs(b.mu1) < 1e-9 && std::abs(s.mu2) < 1e-9;
      b.stage2.push_back(std::move(s));
    }
    e.stage1.push_back(std::move(b));
  }
  return e;
}

ReductionLedger build_ledger(const Mat& E0, const Mat& E1, const SpectralData& sd0, double cluster_tol) {
  ReductionLedger L;
  L.entries.resize(sd0.clusters.size());
  parallel_for(static_cast<int>(sd0.clusters.size()),
               [&](int i) { L.entries[i] = reduce(E0, E1, sd0, i, cluster_tol); });
  return L;
}

cplx gamma_of(cplx mu) { return is_pm_one(mu) ? mu : mu / 2.0; }

cplx omega_of(cplx z) {
  if (std::abs(z - 1.0) < 1e-9) return cplx(0, 1);
  if (std::abs(z + 1.0) < 1e-9) return cplx(0, -1);
  return (std::sin(std::arg(z)) > 0 ? 1.0 : -1.0) / std::sqrt(2.0);
}

cplx omega_displayed(cplx z) {
  if (std::abs(z - 1.0) < 1e-9) return -1.0;
  if (std::abs(z + 1.0) < 1e-9) return 1.0;
  return (std::sin(std::arg(z)) > 0 ? 1.0 : -1.0) / std::sqrt(2.0);
}

double boundary_weight_max(const TailedGraph& g) {
  double w = 0;
  for (int v : g.boundary_vertices()) w = std::max(w, double(g.tails_count_at(v)) / g.n(v));
  return w;
}

Mat build_M1(const LaplacianOps& ops, const Mat& basis) {
  return -weighted_gram(ops.weight, ops.D * basis, basis).transpose();
}

Mat build_M2(const LaplacianOps& ops, const Mat& basis_zeta, const Mat& basis_mu) {
  return -weighted_gram(ops.weight, ops.D * basis_mu, basis_zeta);
}

Mu2BoundReport mu2_bound_check(const TailedGraph& g, const SpectralData& sd0, const Mat& E1, const LedgerEntry& entry) {
  Mu2BoundReport rep;
  const double dmax = boundary_weight_max(g);
  const int nsig = static_cast<int>(sd0.clusters.size());
  rep.bound = (nsig - 1) * dmax * dmax / sd0.min_gap(entry.cluster);
  for (const auto& b1 : entry.stage1) {
    for (const auto& b2 : b1.stage2) rep.max_abs_mu2 = std::max(rep.max_abs_mu2, std::abs(b2.mu2));
    Mat formula = Mat::Zero(E1.rows(), E1.cols());
    for (int k = 0; k < nsig; ++k) {
      if (k == entry.cluster) continue;
      const auto& c = sd0.clusters[k];
      formula -= (1.0 / (c.mu - entry.mu)) * (b1.P1 * E1 * c.P * E1 * b1.P1);
    }
    rep.e12_residual = std::max(rep.e12_residual, (formula - b1.A2).norm());
  }
  rep.holds = rep.max_abs_mu2 <= rep.bound * (1 + 1e-12) + 1e-14;
  return rep;
}

cplx resonance_asymptote(cplx mu, cplx mu1, cplx mu2, double eps) {
  const cplx ge = mu1 / mu;  // gamma * eta
  const double e2 = eps * eps * kPi * kPi / 2;
  return mu * std::exp(cplx(0, -kPi * eps) * ge) + e2 * (mu * ge * ge + mu1 - 2.0 * mu2);
}

namespace {

// Assigns truth[i] to pred[perm[i]] minimizing the summed squared distance.
std::vector<int> best_assignment(const std::vector<cplx>& truth, const std::vector<cplx>& pred) {
  const int m = static_cast<int>(truth.size());
  std::vector<int> perm(m), best;
  std::iota(perm.begin(), perm.end(), 0);
  double best_cost = std::numeric_limits<double>::infinity();
  if (m > 8) {
    // Greedy fallback for large groups.
    std::vector<char> used(m, 0);
    best.assign(m, -1);
    for (int i = 0; i < m; ++i) {
      int arg = -1;
      double bd = std::numeric_limits<double>::infinity();
      for (int j = 0; j < m; ++j)
        if (!used[j] && std::abs(truth[i] - pred[j]) < bd) {
          bd = std::abs(truth[i] - pred[j]);
          arg = j;
        }
      used[arg] = 1;
      best[i] = arg;
    }
    return best;
  }
  do {
    double cost = 0;
    for (int i = 0; i < m; ++i) cost += std::norm(truth[i] - pred[perm[i]]);
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

std::vector<BranchTrack> track_branches(const TailedGraph& g, const Mat& E0, const Mat& E1, const SpectralData& sd0,
                                        const ReductionLedger& ledger, const std::vector<double>& eps_ladder) {
  std::vector<BranchTrack> tracks;
  const int nsig = static_cast<int>(sd0.clusters.size());
  int nu_minus = std::numeric_limits<int>::max(), nu_plus = 0;
  for (int v : g.boundary_vertices()) {
    nu_minus = std::min(nu_minus, g.n(v));
    nu_plus = std::max(nu_plus, g.n(v));
  }

  struct Group {
    int entry;
    std::vector<int> track_of_slot;
    std::vector<cplx> mu1_of_slot, mu2_of_slot;
  };
  std::vector<Group> groups;
  for (int ei = 0; ei < static_cast<int>(ledger.entries.size()); ++ei) {
    const auto& e = ledger.entries[ei];
    Group grp{ei, {}, {}, {}};
    Mat sumP2 = Mat::Zero(e.P.rows(), e.P.cols());
    for (const auto& b1 : e.stage1)
      for (const auto& b2 : b1.stage2) sumP2 += b2.P2;
    const bool complete = (sumP2 - e.P).norm() < 1e-9;
    const double gap = sd0.min_gap(e.cluster);
    for (const auto& b1 : e.stage1) {
      for (const auto& b2 : b1.stage2) {
        BranchTrack t;
        t.mu = e.mu;
        t.mu1 = b1.mu1;
        t.mu2 = b2.mu2;
        t.mult = b2.mult;
        t.persistent = b2.persistent;
        t.assumption_complete = complete;
        const cplx ge = b1.mu1 / e.mu;
        t.assumption_nondegenerate = std::abs(e.mu * ge * (ge + 1.0) - 2.0 * b2.mu2) > 1e-9;
        if (nu_minus >= 3) {
          const double lhs = 2.0 / gap * (nsig - 1) / double(nu_minus) / double(nu_minus);
          const double rhs = 0.5 / double(nu_plus) * (1.0 - 1.0 / nu_minus);
          t.assumption_estimate = lhs < rhs;
        }
        t.assumption_range = true;
        for (int k = 0; k < b2.mult; ++k) {
          grp.track_of_slot.push_back(static_cast<int>(tracks.size()));
          grp.mu1_of_slot.push_back(b1.mu1);
          grp.mu2_of_slot.push_back(b2.mu2);
        }
        tracks.push_back(std::move(t));
      }
    }
    groups.push_back(std::move(grp));
  }

  for (double eps : eps_ladder) {
    const cplx kap = kappa_of(eps);
    Eigen::ComplexEigenSolver<Mat> es(E0 + kap * E1, false);
    std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::vector<std::vector<cplx>> per_track(tracks.size());
    for (const auto& grp : groups) {
      const auto& e = ledger.entries[grp.entry];
      const int m = e.m;
      std::vector<std::pair<double, int>> dist;
      for (int i = 0; i < static_cast<int>(ev.size()); ++i) dist.push_back({std::abs(ev[i] - e.mu), i});
      std::sort(dist.begin(), dist.end());
      if (dist[m - 1].first >= 0.5 * sd0.min_gap(e.cluster))
        throw Error(ErrorKind::GroupEscapedContour, "eigenvalue group left its disc during tracking");
      std::vector<cplx> truth, pred;
      for (int k = 0; k < m; ++k) {
        truth.push_back(ev[dist[k].second]);
        pred.push_back(e.mu + kap * grp.mu1_of_slot[k] + kap * kap * grp.mu2_of_slot[k]);
      }
      const auto asg = best_assignment(truth, pred);
      for (int k = 0; k < m; ++k) per_track[grp.track_of_slot[asg[k]]].push_back(truth[k]);
    }
    for (size_t ti = 0; ti < tracks.size(); ++ti) {
      auto& t = tracks[ti];
      cplx mean = 0;
      for (cplx z : per_track[ti]) mean += z;
      mean /= double(per_track[ti].size());
      double spread = 0, e1 = 0, e2 = 0;
      const cplx p1 = t.mu + kap * t.mu1;
      const cplx p2 = resonance_asymptote(t.mu, t.mu1, t.mu2, eps);
      for (cplx z : per_track[ti]) {
        spread = std::max(spread, std::abs(z - mean));
        e1 = std::max(e1, std::abs(z - p1));
        e2 = std::max(e2, std::abs(z - p2));
      }
      t.eps.push_back(eps);
      t.truth.push_back(mean);
      t.err_first.push_back(e1);
      t.err_second.push_back(e2);
      t.spread.push_back(spread);
      if (spread > 1e-7) t.assumption_range = false;
    }
  }
  for (auto& t : tracks) {
    auto positive = [](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(), [](double x) { return x > 0; });
    };
    t.slope_first = positive(t.err_first) ? loglog_slope(t.eps, t.err_first) : std::numeric_limits<double>::infinity();
    t.slope_second = positive(t.err_second) ? loglog_slope(t.eps, t.err_second) : std::numeric_limits<double>::infinity();
  }
  return tracks;
}

double resonant_lambda(cplx mu, cplx mu1, double eps) {
  const double ge = std::real(mu1 / mu);
  return -std::arg(mu * std::exp(cplx(0, -kPi * ge * eps)));
}

ResonantLimit resonant_sigma_limit(const TailedGraph& g, const LedgerEntry& entry, int b1, bool assumption_ok,
                                   int nilpotency_index) {
  const BoundaryBlocks first = boundary_blocks(g, first_order_coins(g));
  const auto& br = entry.stage1[b1];
  const cplx mu = entry.mu;
  const cplx ge = br.mu1 / mu;
  const cplx a = mu * ge * (ge + 1.0);
  ResonantLimit out;
  out.sigma1 = Mat::Zero(g.tail_count(), g.tail_count());
  if (std::abs(br.mu1) < 1e-9) {
    out.note = "persistent branch, no contribution";
    return out;
  }
  for (const auto& b2 : br.stage2) {
    const cplx X = a - 2.0 * b2.mu2;
    const cplx rho = -2.0 * b2.mu2 / X;
    out.rho.push_back(rho);
    const cplx coef = 2.0 * (1.0 - std::pow(rho, std::min(b2.mult, nilpotency_index))) / a;
    out.sigma1 += coef * (first.G * b2.P2 * first.F);
    if (std::abs(X) < 1e-9) {
      out.caveat = true;
      out.note = "degenerate denominator";
    }
  }
  if (!assumption_ok) {
    out.caveat = true;
    if (out.note.empty()) out.note = "AssumptionViolated";
  }
  return out;
}

}  // namespace qw
