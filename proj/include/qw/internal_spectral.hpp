#pragma once

#include <string>
#include <vector>

#include "qw/coin_evolution.hpp"
#include "qw/linalg.hpp"
#include "qw/tailed_graph.hpp"

namespace qw {

inline constexpr double kClusterTol = 1e-7;
inline constexpr double kCircleTol = 1e-8;

Mat build_E(const TailedGraph& g, double eps);

struct ESplit {
  Mat E0, E1;
};
// E_0 = S(2d*d - I), E_0^(1) = -S d* D d.
ESplit build_E_split(const TailedGraph& g);

struct Cluster {
  cplx mu;
  int mult = 0;
  Mat P;
  Mat D;
  bool nilpotent = false;  // D above the zero threshold
  double spread = 0;       // max distance of members to centroid
};

struct SpectralData {
  int dim = 0;
  double cluster_tol = kClusterTol;
  std::vector<cplx> eigenvalues;
  std::vector<Cluster> clusters;
  std::vector<std::string> warnings;  // ClusterAmbiguity and nilpotent flags

  int find(cplx z, double tol) const;  // index of the cluster within tol of z, or -1
  double min_gap(int i) const;         // distance from cluster i to the nearest other cluster
};

SpectralData spectral_decompose(const Mat& E, double cluster_tol = kClusterTol);

// -(1/2 pi i) * contour integral of (E - z)^{-1} over |z - center| = radius.
Mat projection_contour_oracle(const Mat& E, cplx center, double radius, int nodes = 256);

struct SpectrumRow {
  cplx mu;
  int mult;
  bool on_circle;
};
// All clusters, flagged; resonances are rows with !on_circle and |mu| < 1 - tol.
std::vector<SpectrumRow> spectrum_rows(const SpectralData& sd, double circle_tol = kCircleTol);
std::vector<SpectrumRow> resonances(const SpectralData& sd, double circle_tol = kCircleTol);

struct OutgoingReport {
  double residual = 0;        // max |(U - mu) psi| over the window
  double max_tail_amplitude = 0;
  std::vector<double> tail_growth;  // |psi(a#_{j,l})| for l = 1..depth, maximized over j
};

OutgoingReport verify_outgoing(const TailedGraph& g, double eps, cplx mu, const Vec& u, int depth);
// Zero extension of an on-circle eigenvector: residual of U chi* u - mu chi* u.
double zero_extension_residual(const TailedGraph& g, double eps, cplx mu, const Vec& u, int depth);

}  // namespace qw
