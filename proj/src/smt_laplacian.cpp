#include "qw/smt_laplacian.hpp"

#include <cmath>
#include <sstream>

#include "qw/error.hpp"
#include "qw/internal_spectral.hpp"

namespace qw {

LaplacianOps build_operators(const TailedGraph& g) {
  const auto& ig = g.internal();
  const int nv = g.vertex_count(), na = g.arc_count();
  LaplacianOps o;
  o.d = Mat::Zero(nv, na);
  o.dstar = Mat::Zero(na, nv);
  o.D = Mat::Zero(nv, nv);
  o.S = Mat::Zero(na, na);
  o.weight.resize(nv);
  for (int a = 0; a < na; ++a) {
    const int t = ig.arc(a).terminal;
    o.d(t, a) = 1.0 / g.n_i(t);
    o.dstar(a, t) = 1.0;
    o.S(ig.reverse(a), a) = 1.0;
  }
  for (int v = 0; v < nv; ++v) {
    o.weight(v) = g.n_i(v);
    if (g.is_boundary(v)) o.D(v, v) = double(g.tails_count_at(v)) / g.n(v);
  }
  o.T = o.d * o.S * o.dstar;
  return o;
}

Mat weighted_gram(const Eigen::VectorXd& w, const Mat& F, const Mat& H) {
  return H.adjoint() * w.cast<cplx>().asDiagonal() * F;
}

double phi_qw_real(cplx z) { return std::real((z + 1.0 / z) / 2.0); }

std::vector<cplx> joukowsky_preimages(double t) {
  if (!(std::abs(t) <= 1.0 + 1e-12)) throw Error(ErrorKind::OutOfRange, "t=" + std::to_string(t));
  t = std::clamp(t, -1.0, 1.0);
  if (t == 1.0 || t == -1.0) return {cplx(t, 0)};
  const double s = std::sqrt(1.0 - t * t);
  return {cplx(t, s), cplx(t, -s)};
}

std::vector<TEigenspace> t_eigenspaces(const TailedGraph& g, double tol) {
  const LaplacianOps o = build_operators(g);
  const Eigen::VectorXd sq = o.weight.cwiseSqrt();
  const RMat A = o.T.real();
  // W^{1/2} T W^{-1/2} is symmetric since W T is the adjacency matrix.
  const RMat Ssym = sq.asDiagonal() * A * sq.cwiseInverse().asDiagonal();
  Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (Ssym + Ssym.transpose()));
  std::vector<cplx> vals;
  for (int i = 0; i < es.eigenvalues().size(); ++i) vals.emplace_back(es.eigenvalues()(i), 0);
  std::vector<TEigenspace> out;
  for (const auto& members : greedy_cluster(vals, tol)) {
    TEigenspace sp;
    double t = 0;
    for (int i : members) t += es.eigenvalues()(i);
    sp.t = t / members.size();
    if (std::abs(sp.t - 1.0) < tol) sp.t = 1.0;
    if (std::abs(sp.t + 1.0) < tol) sp.t = -1.0;
    sp.basis = Mat::Zero(g.vertex_count(), members.size());
    for (size_t k = 0; k < members.size(); ++k)
      sp.basis.col(k) = (sq.cwiseInverse().asDiagonal() * es.eigenvectors().col(members[k])).cast<cplx>();
    out.push_back(std::move(sp));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.t > b.t; });
  return out;
}

namespace {

bool is_pm_one(cplx lambda) { return std::abs(lambda - 1.0) < 1e-12 || std::abs(lambda + 1.0) < 1e-12; }

}  // namespace

Mat lift(const LaplacianOps& ops, cplx lambda, const Mat& f) {
  if (is_pm_one(lambda)) return ops.dstar * f;
  const double c = 1.0 / (std::sqrt(2.0) * std::abs(std::sin(std::arg(lambda))));
  const Mat df = ops.dstar * f;
  return c * (df - lambda * (ops.S * df));
}

Mat project_down(const LaplacianOps& ops, cplx lambda, const Mat& u) {
  if (is_pm_one(lambda)) return ops.d * u;
  const double c = 1.0 / (std::sqrt(2.0) * std::abs(std::sin(std::arg(lambda))));
  return c * ops.d * (u - std::conj(lambda) * (ops.S * u));
}

int birth_multiplicity(const InternalGraph& g, int sign) {
  const int half = g.arc_count() / 2, nv = g.vertex_count();
  if (sign > 0) return std::max(0, half - nv + 1);
  return std::max(0, half - nv + (g.bipartite() ? 1 : 0));
}

EigenClassification classify(const TailedGraph& g, const SpectralData& sd0, double match_tol) {
  const LaplacianOps o = build_operators(g);
  const auto& ig = g.internal();
  const int na = g.arc_count();
  EigenClassification cls;
  cls.bipartite = ig.bipartite();
  cls.M_plus = birth_multiplicity(ig, +1);
  cls.M_minus = birth_multiplicity(ig, -1);

  Mat stack_plus(g.vertex_count() + na, na), stack_minus(g.vertex_count() + na, na);
  stack_plus << o.d, o.S + Mat::Identity(na, na);
  stack_minus << o.d, o.S - Mat::Identity(na, na);
  cls.birth_plus = null_space(stack_plus, 1e-9);
  cls.birth_minus = null_space(stack_minus, 1e-9);
  cls.birth_dim_plus = static_cast<int>(cls.birth_plus.cols());
  cls.birth_dim_minus = static_cast<int>(cls.birth_minus.cols());

  const std::vector<int> bverts = g.boundary_vertices();
  for (const auto& sp : t_eigenspaces(g)) {
    const int k = static_cast<int>(sp.basis.cols());
    Mat B(bverts.size(), k);
    for (size_t r = 0; r < bverts.size(); ++r) B.row(r) = sp.basis.row(bverts[r]);
    const Mat Cper = bverts.empty() ? Mat(Mat::Identity(k, k)) : null_space(B, 1e-9);
    const Mat Cmov = Cper.cols() == 0 ? Mat(Mat::Identity(k, k)) : null_space(Cper.adjoint(), 1e-9);
    for (cplx mu : joukowsky_preimages(sp.t)) {
      InheritedSpace is;
      is.mu = mu;
      is.t = sp.t;
      is.f = sp.basis;
      is.f_per = sp.basis * Cper;
      is.f_mov = sp.basis * Cmov;
      cls.inherited.push_back(std::move(is));
    }
  }

  cls.entries.resize(sd0.clusters.size());
  for (size_t i = 0; i < sd0.clusters.size(); ++i) {
    cls.entries[i].value = sd0.clusters[i].mu;
    cls.entries[i].e0_mult = sd0.clusters[i].mult;
  }
  auto locate = [&](cplx mu) {
    int idx = sd0.find(mu, match_tol);
    if (idx < 0) {
      std::ostringstream os;
      os << "no E_0 cluster near " << mu;
      throw Error(ErrorKind::ClassificationMismatch, os.str());
    }
    return idx;
  };
  for (const auto& is : cls.inherited) {
    auto& e = cls.entries[locate(is.mu)];
    e.inherited_mult += static_cast<int>(is.f.cols());
    e.persistent_mult += static_cast<int>(is.f_per.cols());
    e.t_eigenvalue = is.t;
    e.has_t = true;
    e.match_error = std::max(e.match_error, std::abs(e.value - is.mu));
  }
  if (cls.M_plus > 0) {
    auto& e = cls.entries[locate(1.0)];
    e.birth_mult += cls.M_plus;
    e.persistent_mult += cls.M_plus;
  }
  if (cls.M_minus > 0) {
    auto& e = cls.entries[locate(-1.0)];
    e.birth_mult += cls.M_minus;
    e.persistent_mult += cls.M_minus;
  }
  for (const auto& e : cls.entries) {
    if (e.inherited_mult + e.birth_mult != e.e0_mult) {
      std::ostringstream os;
      os << "eigenvalue " << e.value << ": E_0 multiplicity " << e.e0_mult << " vs inherited " << e.inherited_mult
         << " + birth " << e.birth_mult;
      throw Error(ErrorKind::ClassificationMismatch, os.str());
    }
  }
  if (cls.birth_dim_plus != cls.M_plus || cls.birth_dim_minus != cls.M_minus)
    throw Error(ErrorKind::ClassificationMismatch, "birth kernel dimension disagrees with the multiplicity formula");
  return cls;
}

std::vector<PersistentState> persistent_eigenvalues(const TailedGraph& g, const EigenClassification& cls) {
  const LaplacianOps o = build_operators(g);
  std::vector<PersistentState> out;
  for (const auto& is : cls.inherited) {
    if (is.f_per.cols() > 0) out.push_back({is.mu, lift(o, is.mu, is.f_per), false});
  }
  if (cls.birth_plus.cols() > 0) out.push_back({cplx(1, 0), cls.birth_plus, true});
  if (cls.birth_minus.cols() > 0) out.push_back({cplx(-1, 0), cls.birth_minus, true});
  return out;
}

}  // namespace qw
