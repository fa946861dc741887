#include "qw/coin_evolution.hpp"

#include <string>

#include "qw/error.hpp"

namespace qw {

Mat grover(int n) {
  if (n < 1) throw Error(ErrorKind::BadBlockSizes, "grover size " + std::to_string(n));
  return Mat::Constant(n, n, 2.0 / n) - Mat::Identity(n, n);
}

Mat tunable_block(int n, double eps) {
  if (n < 1) throw Error(ErrorKind::BadBlockSizes, "block size " + std::to_string(n));
  if (!(eps >= 0.0 && eps <= 1.0)) throw Error(ErrorKind::ParamOutOfRange, "eps=" + std::to_string(eps));
  Mat J = Mat::Constant(n, n, 1.0 / n);
  return J - std::exp(cplx(0, -kPi * eps)) * (Mat::Identity(n, n) - J);
}

Mat boundary_coin(int n, int n_i, double eps) {
  if (n_i < 1 || n_i >= n)
    throw Error(ErrorKind::BadBlockSizes, "n=" + std::to_string(n) + " n_i=" + std::to_string(n_i));
  Mat left = Mat::Identity(n, n);
  left.topLeftCorner(n_i, n_i) = tunable_block(n_i, eps);
  return left * tunable_block(n, 1.0 - eps);
}

CoinSplit linearize(int n, int n_i) {
  if (n_i < 1 || n_i >= n)
    throw Error(ErrorKind::BadBlockSizes, "n=" + std::to_string(n) + " n_i=" + std::to_string(n_i));
  CoinSplit s;
  s.g0 = Mat::Identity(n, n);
  s.g0.topLeftCorner(n_i, n_i) = grover(n_i);
  // g1 = J_n / n - blockdiag(J_{n_i} / n_i, I)
  s.g1 = Mat::Constant(n, n, 1.0 / n);
  s.g1.topLeftCorner(n_i, n_i).array() -= 1.0 / n_i;
  s.g1.bottomRightCorner(n - n_i, n - n_i) -= Mat::Identity(n - n_i, n - n_i);
  return s;
}

CoinFamily tunable_coins(const TailedGraph& g, double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw Error(ErrorKind::ParamOutOfRange, "eps=" + std::to_string(eps));
  CoinFamily c;
  c.eps = eps;
  c.kappa = kappa_of(eps);
  for (int v = 0; v < g.vertex_count(); ++v)
    c.coins.push_back(g.is_boundary(v) ? boundary_coin(g.n(v), g.n_i(v), eps) : grover(g.n_i(v)));
  return c;
}

CoinFamily free_coins(const TailedGraph& g) {
  CoinFamily c;
  for (int v = 0; v < g.vertex_count(); ++v)
    c.coins.push_back(g.is_boundary(v) ? linearize(g.n(v), g.n_i(v)).g0 : grover(g.n_i(v)));
  return c;
}

CoinFamily first_order_coins(const TailedGraph& g) {
  CoinFamily c;
  for (int v = 0; v < g.vertex_count(); ++v)
    c.coins.push_back(g.is_boundary(v) ? linearize(g.n(v), g.n_i(v)).g1 : Mat::Zero(g.n(v), g.n(v)));
  return c;
}

Mat BoundaryBlocks::full() const {
  const auto na = E.rows(), nt = H.rows();
  Mat M(na + nt, na + nt);
  M << E, F, G, H;
  return M;
}

namespace {

int slot_position(const std::vector<ArcSlot>& slots, bool is_tail, int index) {
  for (int p = 0; p < static_cast<int>(slots.size()); ++p)
    if (slots[p].is_tail == is_tail && slots[p].index == index) return p;
  return -1;
}

}  // namespace

BoundaryBlocks boundary_blocks(const TailedGraph& g, const CoinFamily& c) {
  const int na = g.arc_count(), nt = g.tail_count();
  const auto& ig = g.internal();
  BoundaryBlocks b;
  b.E = Mat::Zero(na, na);
  b.F = Mat::Zero(na, nt);
  b.G = Mat::Zero(nt, na);
  b.H = Mat::Zero(nt, nt);
  for (int v = 0; v < g.vertex_count(); ++v) {
    const auto slots = g.slots(v);
    const Mat& coin = c.coins[v];
    // Output arcs leaving v: internal a with o(a)=v uses the row of its reversal.
    for (int a : ig.out_arcs(v)) {
      const int p = slot_position(slots, false, ig.reverse(a));
      for (int q = 0; q < static_cast<int>(slots.size()); ++q) {
        if (slots[q].is_tail)
          b.F(a, slots[q].index) = coin(p, q);
        else
          b.E(a, slots[q].index) = coin(p, q);
      }
    }
    for (int j : g.tails_at(v)) {
      const int p = slot_position(slots, true, j);
      for (int q = 0; q < static_cast<int>(slots.size()); ++q) {
        if (slots[q].is_tail)
          b.H(j, slots[q].index) = coin(p, q);
        else
          b.G(j, slots[q].index) = coin(p, q);
      }
    }
  }
  return b;
}

namespace {

SpMat assemble(const TailedGraph& g, const BoundaryBlocks& b, int depth, bool transport,
               const std::function<int(int, int)>& in_idx, const std::function<int(int, int)>& out_idx, int dim) {
  const int na = g.arc_count(), nt = g.tail_count();
  std::vector<Eigen::Triplet<cplx>> trip;
  auto put = [&](int r, int col, cplx val) {
    if (val != cplx(0)) trip.emplace_back(r, col, val);
  };
  for (int a = 0; a < na; ++a) {
    for (int bb = 0; bb < na; ++bb) put(a, bb, b.E(a, bb));
    for (int j = 0; j < nt; ++j) put(a, in_idx(j, 0), b.F(a, j));
  }
  for (int j = 0; j < nt; ++j) {
    for (int bb = 0; bb < na; ++bb) put(out_idx(j, 1), bb, b.G(j, bb));
    for (int k = 0; k < nt; ++k) put(out_idx(j, 1), in_idx(k, 0), b.H(j, k));
  }
  if (transport) {
    for (int j = 0; j < nt; ++j) {
      for (int k = 0; k + 1 < depth; ++k) trip.emplace_back(in_idx(j, k), in_idx(j, k + 1), 1.0);
      for (int l = 1; l < depth; ++l) trip.emplace_back(out_idx(j, l + 1), out_idx(j, l), 1.0);
    }
  }
  SpMat M(dim, dim);
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

}  // namespace

WalkOperator::WalkOperator(const TailedGraph& g, double eps, int depth)
    : g_(g), eps_(eps), kappa_(kappa_of(eps)), depth_(depth), na_(g.arc_count()) {
  if (depth < 1) throw Error(ErrorKind::DepthTooSmall, "depth must be >= 1");
  dim_ = na_ + 2 * depth_ * g.tail_count();
  auto in_idx = [this](int j, int k) { return incoming_index(j, k); };
  auto out_idx = [this](int j, int l) { return outgoing_index(j, l); };
  U_ = assemble(g, boundary_blocks(g, tunable_coins(g, eps)), depth, true, in_idx, out_idx, dim_);
  U0_ = assemble(g, boundary_blocks(g, free_coins(g)), depth, true, in_idx, out_idx, dim_);
  U1_ = assemble(g, boundary_blocks(g, first_order_coins(g)), depth, false, in_idx, out_idx, dim_);
}

Vec WalkOperator::apply(const Vec& psi) const {
  if (psi.size() != dim_) throw Error(ErrorKind::DepthTooSmall, "state size does not match truncation");
  for (int j = 0; j < g_.tail_count(); ++j) {
    if (psi(outgoing_index(j, depth_)) != cplx(0))
      throw Error(ErrorKind::DepthTooSmall, "support reaches outgoing truncation boundary on tail " + std::to_string(j));
  }
  return U_ * psi;
}

std::vector<char> WalkOperator::boundary_in_mask() const {
  std::vector<char> m(dim_, 0);
  const auto& ig = g_.internal();
  for (int v : g_.boundary_vertices())
    for (int a : ig.in_arcs(v)) m[a] = 1;
  for (int j = 0; j < g_.tail_count(); ++j) m[incoming_index(j, 0)] = 1;
  return m;
}

std::vector<char> WalkOperator::boundary_out_mask() const {
  std::vector<char> m(dim_, 0);
  const auto& ig = g_.internal();
  for (int v : g_.boundary_vertices())
    for (int a : ig.out_arcs(v)) m[a] = 1;
  for (int j = 0; j < g_.tail_count(); ++j) m[outgoing_index(j, 1)] = 1;
  return m;
}

}  // namespace qw
