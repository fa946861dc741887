#pragma once

#include <vector>

#include "qw/linalg.hpp"
#include "qw/tailed_graph.hpp"

namespace qw {

struct SpectralData;

struct LaplacianOps {
  Mat d;      // #V x #A, averaging over arcs into v
  Mat dstar;  // #A x #V, u(t(a))
  Mat D;      // #V x #V diagonal boundary weight N_v / n(v)
  Mat S;      // #A x #A arc reversal
  Mat T;      // d S d*
  Eigen::VectorXd weight;  // n_i(v), the l2_{n_i} weight
};

LaplacianOps build_operators(const TailedGraph& g);

// <f, h>_{n_i} = sum n_i(v) f(v) conj(h(v)); returns the Gram matrix H^* W F.
Mat weighted_gram(const Eigen::VectorXd& w, const Mat& F, const Mat& H);

double phi_qw_real(cplx z);
// Solutions of (z + 1/z)/2 = t on the unit circle; one entry when t = +-1.
std::vector<cplx> joukowsky_preimages(double t);

struct TEigenspace {
  double t;
  Mat basis;  // #V x k, orthonormal in l2_{n_i}, real entries
};
std::vector<TEigenspace> t_eigenspaces(const TailedGraph& g, double tol = 1e-9);

// Lift d*-type map of an eigenfunction to arc space, isometric from l2_{n_i}.
Mat lift(const LaplacianOps& ops, cplx lambda, const Mat& f);
Mat project_down(const LaplacianOps& ops, cplx lambda, const Mat& u);

struct InheritedSpace {
  cplx mu;
  double t;
  Mat f;      // basis of Ker(T - t)
  Mat f_per;  // subspace vanishing on the boundary (V_per)
  Mat f_mov;  // its l2_{n_i}-orthogonal complement inside Ker(T - t)
};

struct EigenEntry {
  cplx value;
  int e0_mult = 0;
  int inherited_mult = 0;
  int birth_mult = 0;
  int persistent_mult = 0;
  double t_eigenvalue = 0;
  bool has_t = false;
  double match_error = 0;  // |centroid - preimage|
};

struct EigenClassification {
  bool bipartite = false;
  int M_plus = 0, M_minus = 0;
  int birth_dim_plus = 0, birth_dim_minus = 0;  // measured Ker(d) cap Ker(S +- 1)
  std::vector<EigenEntry> entries;              // in SpectralData cluster order
  std::vector<InheritedSpace> inherited;
  Mat birth_plus, birth_minus;                  // orthonormal arc-space bases
};

int birth_multiplicity(const InternalGraph& g, int sign);
EigenClassification classify(const TailedGraph& g, const SpectralData& sd0, double match_tol = 1e-6);

struct PersistentState {
  cplx mu;
  Mat states;  // columns are arc-space eigenvectors of E_eps for every eps
  bool birth;
};
std::vector<PersistentState> persistent_eigenvalues(const TailedGraph& g, const EigenClassification& cls);

}  // namespace qw
