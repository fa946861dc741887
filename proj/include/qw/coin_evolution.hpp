#pragma once

#include <Eigen/SparseCore>
#include <vector>

#include "qw/linalg.hpp"
#include "qw/tailed_graph.hpp"

namespace qw {

using SpMat = Eigen::SparseMatrix<cplx>;

inline cplx kappa_of(double eps) { return 1.0 - std::exp(cplx(0, kPi * eps)); }

Mat grover(int n);
Mat tunable_block(int n, double eps);
// blockdiag(G_{n_i,eps}, I_{n-n_i}) * G_{n,1-eps} in the internal-first basis.
Mat boundary_coin(int n, int n_i, double eps);

struct CoinSplit {
  Mat g0;  // blockdiag(grover(n_i), I)
  Mat g1;  // first-order coefficient in kappa (exact: g_eps = g0 + kappa g1)
};
CoinSplit linearize(int n, int n_i);

// Per-vertex coins indexed by TailedGraph::slots(v).
struct CoinFamily {
  double eps = 0;
  cplx kappa = 0;
  std::vector<Mat> coins;
};

CoinFamily tunable_coins(const TailedGraph& g, double eps);
// Free-walk coins (kappa = 0) and their kappa-coefficients.
CoinFamily free_coins(const TailedGraph& g);
CoinFamily first_order_coins(const TailedGraph& g);

// U restricted to arcs entering the internal graph or its boundary:
//   [internal out]   [E F] [internal in]
//   [a#_{j,1}   ] =  [G H] [a^b_{j,0}  ]
struct BoundaryBlocks {
  Mat E, F, G, H;
  // The full (#A_int + N) square block, unitary when the coins are.
  Mat full() const;
};

BoundaryBlocks boundary_blocks(const TailedGraph& g, const CoinFamily& c);

// Truncated arc space: internal arcs, then per tail j the incoming arcs
// a^b_{j,k} (k = 0..depth-1) followed by outgoing arcs a#_{j,l} (l = 1..depth).
class WalkOperator {
 public:
  WalkOperator(const TailedGraph& g, double eps, int depth);

  int dim() const { return dim_; }
  int depth() const { return depth_; }
  double eps() const { return eps_; }
  cplx kappa() const { return kappa_; }
  int internal_index(int a) const { return a; }
  int incoming_index(int j, int k) const { return na_ + j * 2 * depth_ + k; }
  int outgoing_index(int j, int l) const { return na_ + j * 2 * depth_ + depth_ + (l - 1); }

  const SpMat& U() const { return U_; }
  const SpMat& U0() const { return U0_; }
  const SpMat& U1() const { return U1_; }

  // One step. Throws DepthTooSmall if psi has weight on a#_{j,depth}, which would leave the window.
  Vec apply(const Vec& psi) const;

  // Indicator vectors of B^flat (arcs into boundary vertices) and B^sharp (arcs out of them).
  std::vector<char> boundary_in_mask() const;
  std::vector<char> boundary_out_mask() const;

 private:
  TailedGraph g_;
  double eps_;
  cplx kappa_;
  int depth_, na_, dim_;
  SpMat U_, U0_, U1_;
};

}  // namespace qw
