#include <doctest.h>

#include "qw/coin_evolution.hpp"
#include "qw/internal_spectral.hpp"
#include "qw/perturbation.hpp"
#include "qw/scattering.hpp"
#include "qw/smt_laplacian.hpp"
#include "support.hpp"

using namespace qw;
using qwtest::error_kind;

namespace {

struct Setup {
  TailedGraph g;
  ESplit sp;
  SpectralData sd;
};

Setup setup(const std::string& id) {
  auto g = fixture_by_id(id).graph;
  auto sp = build_E_split(g);
  auto sd = spectral_decompose(sp.E0);
  return {g, sp, sd};
}

int cluster(const SpectralData& sd, cplx mu) {
  const int i = sd.find(mu, 1e-8);
  REQUIRE(i >= 0);
  return i;
}

}  // namespace

TEST_CASE("total_projection") {
  const auto s = setup("c4-3tails");
  const int i = cluster(s.sd, cplx(0, 1));
  const double r = 0.5 * s.sd.min_gap(i);
  CHECK((total_projection(s.sp.E0, s.sp.E1, s.sd, i, 0.0, r) - s.sd.clusters[i].P).norm() < 1e-10);
  const Mat P = total_projection(s.sp.E0, s.sp.E1, s.sd, i, kappa_of(0.05), r);
  CHECK(std::abs(P.trace() - 2.0) < 1e-10);
  CHECK((P * P - P).norm() < 1e-8);
  CHECK(error_kind([&] { total_projection(s.sp.E0, s.sp.E1, s.sd, i, 0.0, 1.5); }) ==
        ErrorKind::GroupEscapedContour);
}

TEST_CASE("projection_expansion: structure and convergence order") {
  const auto s = setup("c4-3tails");
  const int i = cluster(s.sd, cplx(0, 1));
  const auto pe = projection_expansion(s.sp.E0, s.sp.E1, s.sd, i);
  CHECK((pe.P * pe.P1 * pe.P).norm() < 1e-12);
  const double r = 0.5 * s.sd.min_gap(i);
  const cplx k = kappa_of(0.02);
  const double ea = (total_projection(s.sp.E0, s.sp.E1, s.sd, i, k, r) - pe.sum(k)).norm();
  const double eb = (total_projection(s.sp.E0, s.sp.E1, s.sd, i, k / 2.0, r) - pe.sum(k / 2.0)).norm();
  CHECK(std::log2(ea / eb) >= 3.7);

  const Mat Z = Mat::Zero(s.sp.E1.rows(), s.sp.E1.cols());
  const auto pz = projection_expansion(s.sp.E0, Z, s.sd, i);
  CHECK(pz.P1.norm() == 0.0);
  CHECK(pz.P2.norm() == 0.0);
  CHECK(pz.P3.norm() == 0.0);
}

TEST_CASE("projection_expansion: coefficients match contour finite differences") {
  const auto s = setup("k4-3tails");
  for (int i = 0; i < static_cast<int>(s.sd.clusters.size()); ++i) {
    const auto pe = projection_expansion(s.sp.E0, s.sp.E1, s.sd, i);
    const double r = 0.5 * s.sd.min_gap(i);
    const cplx h = 1e-3;
    auto Pk = [&](cplx k) { return total_projection(s.sp.E0, s.sp.E1, s.sd, i, k, r, 512); };
    const Mat fd1 = (Pk(h) - Pk(-h)) / (2.0 * h);
    const Mat fd2 = (Pk(h) - 2.0 * pe.P + Pk(-h)) / (2.0 * h * h);
    CHECK((pe.P1 - fd1).norm() < 1e-5);
    CHECK((pe.P2 - fd2).norm() < 1e-4);
  }
}

TEST_CASE("reduce: stage projections resolve their parents") {
  for (const auto& id : {"c4-3tails", "c4-4tails", "k4-3tails", "k4-4tails"}) {
    const auto s = setup(id);
    const auto L = build_ledger(s.sp.E0, s.sp.E1, s.sd);
    for (const auto& e : L.entries) {
      Mat sum1 = Mat::Zero(e.P.rows(), e.P.cols());
      int m1 = 0;
      for (const auto& b : e.stage1) {
        sum1 += b.P1;
        m1 += b.mult;
        Mat sum2 = Mat::Zero(e.P.rows(), e.P.cols());
        int m2 = 0;
        for (const auto& c : b.stage2) {
          sum2 += c.P2;
          m2 += c.mult;
        }
        CHECK((sum2 - b.P1).norm() < 1e-9);
        CHECK(m2 == b.mult);
      }
      CHECK((sum1 - e.P).norm() < 1e-10);
      CHECK(m1 == e.m);
    }
  }
}

TEST_CASE("reduce: stage-1 values at +-1 and at i on C4 with three tails") {
  const auto s = setup("c4-3tails");
  const auto L = build_ledger(s.sp.E0, s.sp.E1, s.sd);
  for (cplx mu : {cplx(1, 0), cplx(-1, 0)}) {
    const auto& e = L.entries[cluster(s.sd, mu)];
    REQUIRE(e.stage1.size() == 2);
    std::vector<cplx> etas;
    for (const auto& b : e.stage1) etas.push_back(b.mu1 / gamma_of(mu));
    std::sort(etas.begin(), etas.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
    // -(1/8)(2/3 + 2/3 + 2/3)
    CHECK(std::abs(etas[0] + 0.25) < 1e-10);
    CHECK(std::abs(etas[1]) < 1e-10);
  }

  const int i = cluster(s.sd, cplx(0, 1));
  const auto ops = build_operators(s.g);
  Mat basis;
  for (const auto& ts : t_eigenspaces(s.g))
    if (std::abs(ts.t) < 1e-9) basis = ts.basis;
  REQUIRE(basis.cols() == 2);
  const Mat M1 = build_M1(ops, basis);
  Eigen::ComplexEigenSolver<Mat> es(M1);
  for (const auto& b : L.entries[i].stage1) {
    const cplx eta = b.mu1 / (cplx(0, 1) / 2.0);
    CHECK(eta.real() < 0);
    CHECK(std::abs(eta.imag()) < 1e-10);
    double d = 1e9;
    for (int k = 0; k < 2; ++k) d = std::min(d, std::abs(es.eigenvalues()(k) - eta));
    CHECK(d < 1e-10);
  }
}

TEST_CASE("build_M1 agrees with the lifted first-order operator") {
  const auto s = setup("c4-3tails");
  const auto ops = build_operators(s.g);
  const cplx mu(0, 1);
  Mat basis;
  for (const auto& ts : t_eigenspaces(s.g))
    if (std::abs(ts.t) < 1e-9) basis = ts.basis;
  const Mat Lf = lift(ops, mu, basis);
  const Mat direct = Lf.adjoint() * s.sp.E1 * Lf;
  CHECK((direct - gamma_of(mu) * build_M1(ops, basis).transpose()).norm() < 1e-10);
  CHECK(build_M1(ops, Mat::Zero(4, 0)).size() == 0);
}

TEST_CASE("M1 range with a tail at every vertex of C4") {
  const auto g = fixture_by_id("c4-4tails").graph;
  const auto ops = build_operators(g);
  for (const auto& ts : t_eigenspaces(g)) {
    Eigen::SelfAdjointEigenSolver<Mat> es(build_M1(ops, ts.basis));
    CHECK(es.eigenvalues().minCoeff() >= -1.0 / 3 - 1e-12);
    CHECK(es.eigenvalues().maxCoeff() < 0);
  }
}

TEST_CASE("build_M2: explicit values, adjoint symmetry, norm bound, lifted cross-check") {
  const auto g = fixture_by_id("c4-3tails").graph;
  const auto ops = build_operators(g);
  // Weighted-orthonormal (n_i = 2) eigenfunctions of T for t = 1 and t = 0.
  Mat fz(4, 1), fm(4, 2);
  fz.setConstant(1 / std::sqrt(8.0));
  fm << 0.5, 0, 0, 0.5, -0.5, 0, 0, -0.5;
  const Mat M2 = build_M2(ops, fz, fm);
  REQUIRE(M2.rows() == 1);
  REQUIRE(M2.cols() == 2);
  CHECK(std::abs(M2(0, 0)) < 1e-15);
  CHECK(std::abs(M2(0, 1) + 1 / (3 * std::sqrt(8.0))) < 1e-15);

  const auto sp = build_E_split(g);
  const auto spaces = t_eigenspaces(g);
  for (const auto& a : spaces)
    for (const auto& b : spaces) {
      const Mat Mab = build_M2(ops, a.basis, b.basis);
      CHECK((Mab - build_M2(ops, b.basis, a.basis).adjoint()).norm() < 1e-14);
      Eigen::JacobiSVD<Mat> svd(Mab);
      if (svd.singularValues().size() > 0) CHECK(svd.singularValues()(0) <= 1.0 / 3 + 1e-10);
      for (cplx zeta : joukowsky_preimages(a.t))
        for (cplx mu : joukowsky_preimages(b.t)) {
          const Mat direct = lift(ops, zeta, a.basis).adjoint() * sp.E1 * lift(ops, mu, b.basis);
          CHECK((direct - mu * omega_of(mu) * std::conj(omega_of(zeta)) * Mab).norm() < 1e-10);
        }
    }
}

TEST_CASE("mu2_bound_check") {
  const auto s = setup("c4-3tails");
  const auto L = build_ledger(s.sp.E0, s.sp.E1, s.sd);
  for (const auto& e : L.entries) {
    const auto rep = mu2_bound_check(s.g, s.sd, s.sp.E1, e);
    CHECK(rep.holds);
    CHECK(rep.max_abs_mu2 <= rep.bound);
    CHECK(rep.e12_residual < 1e-9);
  }
  const Mat Z = Mat::Zero(s.sp.E1.rows(), s.sp.E1.cols());
  const auto Lz = build_ledger(s.sp.E0, Z, s.sd);
  for (const auto& e : Lz.entries) {
    const auto rep = mu2_bound_check(s.g, s.sd, Z, e);
    CHECK(rep.holds);
    CHECK(rep.max_abs_mu2 == 0.0);
  }
}

TEST_CASE("gamma and omega conventions") {
  CHECK(gamma_of(1.0) == cplx(1.0));
  CHECK(gamma_of(-1.0) == cplx(-1.0));
  CHECK(std::abs(gamma_of(cplx(0, 1)) - cplx(0, 0.5)) < 1e-16);
  CHECK(omega_of(1.0) == cplx(0, 1));
  CHECK(omega_of(-1.0) == cplx(0, -1));
  CHECK(omega_displayed(1.0) == cplx(-1.0));
  CHECK(omega_displayed(-1.0) == cplx(1.0));
  CHECK(std::abs(omega_of(cplx(0, 1)) - 1 / std::sqrt(2.0)) < 1e-16);
}

TEST_CASE("resonance asymptotes and branch tracking") {
  CHECK(resonance_asymptote(cplx(0, 1), cplx(-0.1, 0.2), cplx(0.3, 0), 0.0) == cplx(0, 1));

  const auto s = setup("c4-3tails");
  const auto L = build_ledger(s.sp.E0, s.sp.E1, s.sd);
  const auto tracks = track_branches(s.g, s.sp.E0, s.sp.E1, s.sd, L, {0.02, 0.01, 0.005});
  int moving = 0;
  for (const auto& t : tracks) {
    if (t.persistent) {
      for (cplx z : t.truth) CHECK(std::abs(z - t.mu) < 1e-10);
      continue;
    }
    ++moving;
    CHECK(t.slope_first >= 1.8);
    if (t.assumption_ok()) CHECK(t.slope_second >= 1.8);
  }
  CHECK(moving > 0);
}

TEST_CASE("resonant limit") {
  const auto s = setup("c4-3tails");
  const auto L = build_ledger(s.sp.E0, s.sp.E1, s.sd);
  const std::vector<double> ladder{0.04, 0.02, 0.01};
  int run = 0;
  for (const auto& e : L.entries) {
    for (int b = 0; b < static_cast<int>(e.stage1.size()); ++b) {
      const auto& br = e.stage1[b];
      const auto lim = resonant_sigma_limit(s.g, e, b, true);
      if (std::abs(br.mu1) < 1e-9) {
        // Only persistent directions: no first-order scattering correction.
        CHECK(lim.sigma1.norm() < 1e-12);
        continue;
      }
      std::vector<double> err;
      for (double eps : ladder) {
        const Mat S = closed_form_sigma(s.g, eps, resonant_lambda(e.mu, br.mu1, eps));
        err.push_back((S - Mat::Identity(3, 3) - lim.sigma1).norm());
      }
      CHECK(err[1] < err[0]);
      CHECK(err[2] < err[1]);
      CHECK(err[2] < 0.5 * err[0]);
      ++run;
    }
  }
  CHECK(run > 0);
}
