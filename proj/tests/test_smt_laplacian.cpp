#include <doctest.h>

#include "qw/coin_evolution.hpp"
#include "qw/internal_spectral.hpp"
#include "qw/smt_laplacian.hpp"
#include "support.hpp"

using namespace qw;
using qwtest::error_kind;

TEST_CASE("build_operators: C4 average operator") {
  const auto g = qwtest::tailed("cycle:4", "v0,v1,v2");
  const auto ops = build_operators(g);
  Mat adj = Mat::Zero(4, 4);
  for (int v = 0; v < 4; ++v) adj(v, (v + 1) % 4) = adj(v, (v + 3) % 4) = 0.5;
  CHECK((ops.T - adj).norm() < 1e-14);
  Eigen::SelfAdjointEigenSolver<RMat> es(ops.T.real());
  const Eigen::Vector4d want(-1, 0, 0, 1);
  CHECK((es.eigenvalues() - want).norm() < 1e-12);
}

TEST_CASE("build_operators: d d* = I, D on the boundary, T weighted-symmetric") {
  for (const auto& f : acceptance_fixtures()) {
    const auto& g = f.graph;
    const auto ops = build_operators(g);
    const int nv = g.vertex_count();
    CHECK((ops.d * ops.dstar - Mat::Identity(nv, nv)).norm() < 1e-13);
    for (int v = 0; v < nv; ++v) {
      for (int w = 0; w < nv; ++w)
        if (v != w) CHECK(std::abs(ops.D(v, w)) == 0.0);
      const double want = g.is_boundary(v) ? double(g.tails_count_at(v)) / g.n(v) : 0.0;
      CHECK(std::abs(ops.D(v, v) - want) < 1e-15);
    }
    const Mat W = ops.weight.cast<cplx>().asDiagonal();
    CHECK((W * ops.T - (W * ops.T).adjoint()).norm() < 1e-12);
    Eigen::ComplexEigenSolver<Mat> es(ops.T, false);
    for (int i = 0; i < nv; ++i) {
      CHECK(std::abs(es.eigenvalues()(i).real()) <= 1 + 1e-10);
      CHECK(std::abs(es.eigenvalues()(i).imag()) < 1e-10);
    }
  }
}

TEST_CASE("joukowsky_preimages") {
  auto z0 = joukowsky_preimages(0.0);
  REQUIRE(z0.size() == 2);
  CHECK(std::abs(z0[0] * z0[1] - 1.0) < 1e-15);
  CHECK(std::abs(std::abs(z0[0].imag()) - 1.0) < 1e-15);
  CHECK(std::abs(z0[0] + z0[1]) < 1e-15);
  const auto z1 = joukowsky_preimages(1.0);
  REQUIRE(z1.size() == 1);
  CHECK(std::abs(z1[0] - 1.0) < 1e-15);
  const auto zm = joukowsky_preimages(-1.0);
  REQUIRE(zm.size() == 1);
  CHECK(std::abs(zm[0] + 1.0) < 1e-15);
  for (double th : {0.3, 1.1, 2.7}) {
    const auto z = joukowsky_preimages(std::cos(th));
    REQUIRE(z.size() == 2);
    const cplx e = std::exp(cplx(0, th));
    const double d = std::min(std::abs(z[0] - e) + std::abs(z[1] - std::conj(e)),
                              std::abs(z[1] - e) + std::abs(z[0] - std::conj(e)));
    CHECK(d < 1e-14);
    for (cplx w : z) CHECK(phi_qw_real(w) == doctest::Approx(std::cos(th)).epsilon(1e-14));
  }
  CHECK(error_kind([] { joukowsky_preimages(1.5); }) == ErrorKind::OutOfRange);
}

TEST_CASE("birth multiplicity formula") {
  CHECK(birth_multiplicity(preset_graph("cycle:4"), +1) == 1);
  CHECK(birth_multiplicity(preset_graph("cycle:4"), -1) == 1);
  CHECK(birth_multiplicity(preset_graph("cycle:5"), -1) == 0);
  CHECK(birth_multiplicity(preset_graph("complete:4"), +1) == 3);
  CHECK(birth_multiplicity(preset_graph("complete:4"), -1) == 2);
  const auto path = build_internal(3, {{0, 1}, {1, 2}});
  CHECK(birth_multiplicity(path, +1) == 0);
  CHECK(birth_multiplicity(path, -1) == 0);
}

TEST_CASE("classify: C4 inherited/birth split") {
  const auto g = fixture_by_id("c4-3tails").graph;
  const auto sd = spectral_decompose(build_E(g, 0.0));
  const auto cls = classify(g, sd);
  CHECK(cls.bipartite);
  CHECK(cls.M_plus == 1);
  CHECK(cls.M_minus == 1);
  CHECK(cls.birth_dim_plus == 1);
  CHECK(cls.birth_dim_minus == 1);
  for (const auto& e : cls.entries) {
    CHECK(e.e0_mult == 2);
    CHECK(e.inherited_mult + e.birth_mult == 2);
    const bool pm = std::abs(std::abs(e.value.real()) - 1) < 1e-9;
    CHECK(e.birth_mult == (pm ? 1 : 0));
    CHECK(e.match_error < 1e-9);
  }
}

TEST_CASE("classify: K4 and a tree") {
  const auto k4 = fixture_by_id("k4-3tails").graph;
  const auto cls = classify(k4, spectral_decompose(build_E(k4, 0.0)));
  CHECK(!cls.bipartite);
  CHECK(cls.M_plus == 3);
  CHECK(cls.M_minus == 2);
  int total = 0;
  for (const auto& e : cls.entries) total += e.inherited_mult + e.birth_mult;
  CHECK(total == k4.arc_count());

  const auto tree = attach_tails(build_internal(4, {{0, 1}, {1, 2}, {1, 3}}), parse_tails("v0,v2"));
  const auto ct = classify(tree, spectral_decompose(build_E(tree, 0.0)));
  CHECK(ct.M_plus == 0);
  CHECK(ct.M_minus == 0);
  CHECK(ct.birth_plus.cols() == 0);
  CHECK(ct.birth_minus.cols() == 0);
  for (const auto& e : ct.entries) CHECK(e.birth_mult == 0);
}

TEST_CASE("lift is an isometry onto E_0 eigenvectors") {
  const auto g = fixture_by_id("k4-4tails").graph;
  const Mat E0 = build_E(g, 0.0);
  const auto ops = build_operators(g);
  for (const auto& ts : t_eigenspaces(g)) {
    for (cplx mu : joukowsky_preimages(ts.t)) {
      const Mat L = lift(ops, mu, ts.basis);
      const Mat gram_w = weighted_gram(ops.weight, ts.basis, ts.basis);
      CHECK((L.adjoint() * L - gram_w).norm() < 1e-12);
      CHECK((E0 * L - mu * L).norm() < 1e-12);
      CHECK((project_down(ops, mu, L) - ts.basis).norm() < 1e-12);
    }
  }
}

TEST_CASE("persistent eigenvalues") {
  const auto c3 = fixture_by_id("c4-3tails").graph;
  const auto cls3 = classify(c3, spectral_decompose(build_E(c3, 0.0)));
  const auto p3 = persistent_eigenvalues(c3, cls3);
  int births = 0;
  for (const auto& p : p3) {
    for (double e : {0.1, 0.6}) {
      const Mat E = build_E(c3, e);
      CHECK((E * p.states - p.mu * p.states).norm() < 1e-10);
    }
    births += p.birth ? static_cast<int>(p.states.cols()) : 0;
  }
  CHECK(births == 2);

  const auto c4 = fixture_by_id("c4-4tails").graph;
  for (const auto& p : persistent_eigenvalues(c4, classify(c4, spectral_decompose(build_E(c4, 0.0)))))
    CHECK(p.birth);

  const auto c1 = qwtest::tailed("cycle:4", "v0");
  bool beyond = false;
  for (const auto& p : persistent_eigenvalues(c1, classify(c1, spectral_decompose(build_E(c1, 0.0)))))
    beyond = beyond || std::abs(std::abs(p.mu.real()) - 1) > 1e-6;
  CHECK(beyond);
}
