#include <doctest.h>

#include "qw/coin_evolution.hpp"
#include "support.hpp"

using namespace qw;
using qwtest::error_kind;

namespace {

double unitarity_defect(const Mat& M) { return (M.adjoint() * M - Mat::Identity(M.cols(), M.cols())).norm(); }

}  // namespace

TEST_CASE("grover: small cases and involution") {
  Mat g2(2, 2);
  g2 << 0, 1, 1, 0;
  CHECK((grover(2) - g2).norm() < 1e-15);
  Mat g3(3, 3);
  g3 << -1, 2, 2, 2, -1, 2, 2, 2, -1;
  CHECK((grover(3) - g3 / 3.0).norm() < 1e-15);
  for (int n = 2; n <= 6; ++n) CHECK((grover(n) * grover(n) - Mat::Identity(n, n)).norm() < 1e-14);
  CHECK(error_kind([] { grover(0); }) == ErrorKind::BadBlockSizes);
}

TEST_CASE("tunable_block: endpoints and n = 1") {
  for (int n = 1; n <= 5; ++n) {
    CHECK((tunable_block(n, 0.0) - grover(n)).norm() < 1e-14);
    CHECK((tunable_block(n, 1.0) - Mat::Identity(n, n)).norm() < 1e-14);
  }
  for (double e : {0.0, 0.3, 0.9}) CHECK(std::abs(tunable_block(1, e)(0, 0) - 1.0) < 1e-15);
  CHECK(error_kind([] { tunable_block(3, 1.5); }) == ErrorKind::ParamOutOfRange);
  CHECK(error_kind([] { tunable_block(3, -0.1); }) == ErrorKind::ParamOutOfRange);
}

TEST_CASE("boundary_coin: n = 3, n_i = 2, eps = 0.25") {
  // Product formula evaluated independently in double precision.
  Mat want(3, 3);
  want << cplx(-0.048815536468908766, 0.11785113019775791), cplx(0.95118446353109121, 0.117851130197758),
      cplx(0.097631072937817504, -0.23570226039551581), cplx(0.95118446353109121, 0.117851130197758),
      cplx(-0.04881553646890878, 0.11785113019775792), cplx(0.097631072937817504, -0.23570226039551584),
      cplx(0.097631072937817504, -0.23570226039551584), cplx(0.097631072937817504, -0.23570226039551584),
      cplx(0.80473785412436505, 0.47140452079103179);
  const Mat c = boundary_coin(3, 2, 0.25);
  CHECK((c - want).norm() < 1e-14);
  CHECK(unitarity_defect(c) < 1e-12);
}

TEST_CASE("boundary_coin: limits in eps") {
  for (auto [n, ni] : {std::pair{3, 2}, {5, 3}, {4, 1}}) {
    Mat g0 = Mat::Identity(n, n);
    g0.topLeftCorner(ni, ni) = grover(ni);
    CHECK((boundary_coin(n, ni, 0.0) - g0).norm() < 1e-14);
    CHECK((boundary_coin(n, ni, 1.0) - grover(n)).norm() < 1e-14);
    for (double e : {0.1, 0.5, 0.77}) CHECK(unitarity_defect(boundary_coin(n, ni, e)) < 1e-12);
  }
  CHECK(error_kind([] { boundary_coin(3, 3, 0.2); }) == ErrorKind::BadBlockSizes);
  CHECK(error_kind([] { boundary_coin(3, 0, 0.2); }) == ErrorKind::BadBlockSizes);
}

TEST_CASE("linearize: exact in kappa, symmetric first-order part") {
  const auto s = linearize(3, 2);
  for (double e : {0.0, 0.37, 0.8}) {
    const cplx k = kappa_of(e);
    CHECK((s.g0 + k * s.g1 - boundary_coin(3, 2, e)).norm() < 1e-14);
  }
  CHECK(std::abs(kappa_of(0.0)) == 0.0);
  for (auto [n, ni] : {std::pair{3, 2}, {5, 3}, {6, 2}}) {
    const auto t = linearize(n, ni);
    CHECK((t.g1 - t.g1.transpose()).norm() < 1e-15);
    // Internal block of the first-order part is -(N/(n n_i)) J.
    const double c = -double(n - ni) / (n * ni);
    CHECK((t.g1.topLeftCorner(ni, ni) - Mat::Constant(ni, ni, c)).norm() < 1e-14);
  }
}

TEST_CASE("coin families are unitary; free coins on tail-interior vertices swap") {
  for (const auto& f : acceptance_fixtures()) {
    for (double e : {0.0, 0.25, 1.0}) {
      const auto cf = tunable_coins(f.graph, e);
      for (const auto& c : cf.coins) CHECK(unitarity_defect(c) < 1e-12);
      CHECK(unitarity_defect(boundary_blocks(f.graph, cf).full()) < 1e-12);
    }
  }
}

TEST_CASE("C4 at eps = 0 is two counter-rotating cyclic shifts") {
  const auto g = qwtest::tailed("cycle:4", "v0,v1,v2");
  const Mat E0 = boundary_blocks(g, free_coins(g)).E;
  // Reorder arcs as (j -> j+1) for j = 0..3, then (j+1 -> j).
  const auto& ig = g.internal();
  std::vector<int> order(8);
  for (int a = 0; a < 8; ++a) {
    const auto& arc = ig.arc(a);
    if (arc.terminal == (arc.origin + 1) % 4)
      order[arc.origin] = a;
    else
      order[4 + arc.terminal] = a;
  }
  Mat B(8, 8);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) B(r, c) = E0(order[r], order[c]);
  Mat Q = Mat::Zero(4, 4);
  for (int j = 0; j < 4; ++j) Q((j + 1) % 4, j) = 1;
  const bool forward = (B.topLeftCorner(4, 4) - Q).norm() < 1e-14;
  const Mat Qb = forward ? Mat(Q) : Mat(Q.adjoint());
  CHECK((B.topLeftCorner(4, 4) - Qb).norm() < 1e-14);
  CHECK((B.bottomRightCorner(4, 4) - Qb.adjoint()).norm() < 1e-14);
  CHECK(B.topRightCorner(4, 4).norm() < 1e-14);
  CHECK(B.bottomLeftCorner(4, 4).norm() < 1e-14);
}

TEST_CASE("WalkOperator: tail transport, unitarity and locality of the perturbation") {
  const auto g = qwtest::tailed("cycle:4", "v0,v1,v2");
  const WalkOperator W(g, 0.3, 12);

  Vec d = Vec::Zero(W.dim());
  d(W.incoming_index(1, 5)) = 1;
  const Vec img = W.apply(d);
  CHECK(std::abs(img(W.incoming_index(1, 4)) - 1.0) < 1e-15);
  CHECK(std::abs(img.norm() - 1.0) < 1e-15);

  Vec o = Vec::Zero(W.dim());
  o(W.outgoing_index(2, 3)) = 1;
  CHECK(std::abs(W.apply(o)(W.outgoing_index(2, 4)) - 1.0) < 1e-15);

  Vec psi = Vec::Zero(W.dim());
  for (int a = 0; a < g.arc_count(); ++a) psi(a) = cplx(std::cos(a), std::sin(2.0 * a));
  for (int j = 0; j < g.tail_count(); ++j)
    for (int k = 0; k < 6; ++k) psi(W.incoming_index(j, k)) = cplx(0.1 * k, -0.2 * j);
  CHECK(std::abs(W.apply(psi).norm() - psi.norm()) < 1e-12);

  Vec internal = Vec::Zero(W.dim());
  internal.head(g.arc_count()) = psi.head(g.arc_count());
  const Vec u0 = W.U0() * internal;
  CHECK(u0.tail(W.dim() - g.arc_count()).norm() < 1e-15);

  // U_eps - U_0 lives on rows of arcs leaving boundary vertices.
  const Mat diff = Mat(W.U()) - Mat(W.U0());
  const auto out_mask = W.boundary_out_mask();
  for (int r = 0; r < W.dim(); ++r)
    if (!out_mask[r]) CHECK(diff.row(r).norm() < 1e-15);
  CHECK((Mat(W.U()) - Mat(W.U0()) - W.kappa() * Mat(W.U1())).norm() < 1e-14);
}

TEST_CASE("WalkOperator: DepthTooSmall when support reaches the window edge") {
  const auto g = qwtest::tailed("cycle:4", "v0,v1,v2");
  const WalkOperator W(g, 0.3, 4);
  Vec psi = Vec::Zero(W.dim());
  psi(W.outgoing_index(0, 4)) = 1;
  CHECK(error_kind([&] { W.apply(psi); }) == ErrorKind::DepthTooSmall);
}

TEST_CASE("boundary blocks at eps = 0 decouple the tails") {
  const auto g = qwtest::tailed("complete:4", "v0,v1,v2,v3");
  const auto b = boundary_blocks(g, free_coins(g));
  CHECK(b.F.norm() < 1e-15);
  CHECK(b.G.norm() < 1e-15);
  CHECK((b.H - Mat::Identity(4, 4)).norm() < 1e-15);
}
