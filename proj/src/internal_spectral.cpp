#include "qw/internal_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qw/error.hpp"
#include "qw/smt_laplacian.hpp"

namespace qw {

Mat build_E(const TailedGraph& g, double eps) { return boundary_blocks(g, tunable_coins(g, eps)).E; }

ESplit build_E_split(const TailedGraph& g) {
  const LaplacianOps ops = build_operators(g);
  const int na = g.arc_count();
  ESplit s;
  s.E0 = ops.S * (2.0 * ops.dstar * ops.d - Mat::Identity(na, na));
  s.E1 = -ops.S * ops.dstar * ops.D * ops.d;
  return s;
}

int SpectralData::find(cplx z, double tol) const {
  int best = -1;
  double bd = tol;
  for (int i = 0; i < static_cast<int>(clusters.size()); ++i) {
    double d = std::abs(clusters[i].mu - z);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  return best;
}

double SpectralData::min_gap(int i) const {
  double gap = std::numeric_limits<double>::infinity();
  for (int j = 0; j < static_cast<int>(clusters.size()); ++j)
    if (j != i) gap = std::min(gap, std::abs(clusters[i].mu - clusters[j].mu));
  return gap;
}

namespace {

Mat matrix_power(const Mat& A, int m) {
  Mat R = Mat::Identity(A.rows(), A.cols());
  for (int k = 0; k < m; ++k) R = R * A;
  return R;
}

}  // namespace

SpectralData spectral_decompose(const Mat& E, double cluster_tol) {
  const int n = static_cast<int>(E.rows());
  SpectralData sd;
  sd.dim = n;
  sd.cluster_tol = cluster_tol;
  if (n == 0) return sd;
  Eigen::ComplexEigenSolver<Mat> es(E, false);
  for (int i = 0; i < n; ++i) sd.eigenvalues.push_back(es.eigenvalues()(i));

  const double normE = std::max(E.norm(), 1e-300);
  for (const auto& members : greedy_cluster(sd.eigenvalues, cluster_tol)) {
    Cluster c;
    c.mult = static_cast<int>(members.size());
    cplx sum = 0;
    for (int i : members) sum += sd.eigenvalues[i];
    c.mu = sum / double(c.mult);
    for (int i : members) c.spread = std::max(c.spread, std::abs(sd.eigenvalues[i] - c.mu));

    const Mat Am = matrix_power(E - c.mu * Mat::Identity(n, n), c.mult);
    const Mat V = smallest_right_singular(Am, c.mult);
    const Mat W = smallest_right_singular(Am.adjoint(), c.mult);
    c.P = V * (W.adjoint() * V).inverse() * W.adjoint();
    c.D = (E - c.mu * Mat::Identity(n, n)) * c.P;
    c.nilpotent = c.D.norm() >= 1e-8 * normE;
    sd.clusters.push_back(std::move(c));
  }
  std::sort(sd.clusters.begin(), sd.clusters.end(), [](const Cluster& a, const Cluster& b) {
    double ta = std::arg(a.mu), tb = std::arg(b.mu);
    if (ta < 0) ta += 2 * kPi;
    if (tb < 0) tb += 2 * kPi;
    if (std::abs(ta - tb) > 1e-12) return ta < tb;
    return std::abs(a.mu) > std::abs(b.mu);
  });

  for (size_t i = 0; i < sd.clusters.size(); ++i) {
    for (size_t j = i + 1; j < sd.clusters.size(); ++j) {
      double d = std::abs(sd.clusters[i].mu - sd.clusters[j].mu);
      if (d < 10 * cluster_tol) {
        std::ostringstream os;
        os.precision(17);
        os << "ClusterAmbiguity: clusters at " << sd.clusters[i].mu << " and " << sd.clusters[j].mu
           << " are " << d << " apart";
        sd.warnings.push_back(os.str());
      }
    }
    if (sd.clusters[i].nilpotent) {
      std::ostringstream os;
      os.precision(17);
      os << "nonzero eigennilpotent at " << sd.clusters[i].mu << " with norm " << sd.clusters[i].D.norm();
      sd.warnings.push_back(os.str());
    }
  }
  return sd;
}

Mat projection_contour_oracle(const Mat& E, cplx center, double radius, int nodes) {
  const int n = static_cast<int>(E.rows());
  if (nodes < 64) throw Error(ErrorKind::OutOfRange, "contour needs at least 64 nodes");
  Eigen::ComplexEigenSolver<Mat> es(E, false);
  for (int i = 0; i < n; ++i) {
    if (std::abs(std::abs(es.eigenvalues()(i) - center) - radius) < 1e-3 * radius)
      throw Error(ErrorKind::SingularResolventNearContour, "eigenvalue near contour");
  }
  Mat P = Mat::Zero(n, n);
  const Mat I = Mat::Identity(n, n);
  for (int k = 0; k < nodes; ++k) {
    const cplx w = radius * std::exp(cplx(0, 2 * kPi * k / nodes));
    // -(1/2 pi i) R(z) dz with dz = i w dtheta, dtheta = 2 pi / nodes
    P -= (w / double(nodes)) * (E - (center + w) * I).partialPivLu().inverse();
  }
  return P;
}

std::vector<SpectrumRow> spectrum_rows(const SpectralData& sd, double circle_tol) {
  std::vector<SpectrumRow> rows;
  for (const auto& c : sd.clusters)
    rows.push_back({c.mu, c.mult, std::abs(std::abs(c.mu) - 1.0) <= circle_tol});
  return rows;
}

std::vector<SpectrumRow> resonances(const SpectralData& sd, double circle_tol) {
  std::vector<SpectrumRow> out;
  for (const auto& r : spectrum_rows(sd, circle_tol))
    if (!r.on_circle && std::abs(r.mu) < 1.0 - circle_tol) out.push_back(r);
  return out;
}

OutgoingReport verify_outgoing(const TailedGraph& g, double eps, cplx mu, const Vec& u, int depth) {
  if (std::abs(mu) >= 1.0) throw Error(ErrorKind::NotAResonance, "|mu| >= 1");
  const WalkOperator W(g, eps, depth + 1);
  const int na = g.arc_count();
  Vec psi = Vec::Zero(W.dim());
  psi.head(na) = u;
  const Vec Upsi0 = W.U() * psi;
  OutgoingReport rep;
  rep.tail_growth.assign(depth, 0.0);
  for (int j = 0; j < g.tail_count(); ++j) {
    cplx amp = Upsi0(W.outgoing_index(j, 1)) / mu;
    for (int l = 1; l <= depth; ++l) {
      psi(W.outgoing_index(j, l)) = amp;
      rep.tail_growth[l - 1] = std::max(rep.tail_growth[l - 1], std::abs(amp));
      rep.max_tail_amplitude = std::max(rep.max_tail_amplitude, std::abs(amp));
      amp /= mu;
    }
  }
  const Vec r = W.U() * psi - mu * psi;
  double res = r.head(na).cwiseAbs().maxCoeff();
  for (int j = 0; j < g.tail_count(); ++j) {
    for (int k = 0; k < depth; ++k) res = std::max(res, std::abs(r(W.incoming_index(j, k))));
    for (int l = 1; l <= depth; ++l) res = std::max(res, std::abs(r(W.outgoing_index(j, l))));
  }
  rep.residual = res;
  return rep;
}

double zero_extension_residual(const TailedGraph& g, double eps, cplx mu, const Vec& u, int depth) {
  const WalkOperator W(g, eps, depth);
  Vec psi = Vec::Zero(W.dim());
  psi.head(g.arc_count()) = u;
  return (W.U() * psi - mu * psi).cwiseAbs().maxCoeff();
}

}  // namespace qw
