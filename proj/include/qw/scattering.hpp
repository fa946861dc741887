#pragma once

#include <string>
#include <vector>

#include "qw/coin_evolution.hpp"
#include "qw/internal_spectral.hpp"

namespace qw {

struct StationaryResult {
  Vec v_inf;      // internal stationary state
  Vec alpha_out;  // alpha^sharp(lambda)
  int iterations = 0;
  double last_gap = 0;
};

// Iterates u_{t+1} = E u_t + e^{-i lambda t} f_0 and returns the rescaled limit.
StationaryResult stationary_iterate(const TailedGraph& g, double eps, double lambda, const Vec& alpha_in,
                                    int t_max = 1000000, double conv_tol = 1e-14);

// Closed-form scattering matrix from the eigenprojections of E_eps.
class ClosedFormSigma {
 public:
  ClosedFormSigma(const TailedGraph& g, double eps, double cluster_tol = kClusterTol, double circle_tol = kCircleTol);

  Mat sigma(double lambda) const;
  Vec alpha_out(double lambda, const Vec& alpha_in) const;
  const SpectralData& spectral() const { return sd_; }
  const BoundaryBlocks& blocks() const { return b_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  BoundaryBlocks b_;
  SpectralData sd_;
  struct Term {
    cplx mu;
    int power;  // coefficient of (z - mu)^{-power-1}
    Mat R;      // G P (E - mu)^power P F
  };
  std::vector<Term> terms_;
  std::vector<std::string> warnings_;
};

Mat closed_form_sigma(const TailedGraph& g, double eps, double lambda);

std::vector<double> lambda_grid(int n);

struct TransmissionRow {
  double lambda;
  double tau_sq;
  double reflection_sq;
};
// Ports are 0-based here; the CLI converts from 1-based.
std::vector<TransmissionRow> transmission_curve(const TailedGraph& g, double eps, const std::vector<double>& grid,
                                                int inflow_port, const std::vector<int>& outflow_ports);

}  // namespace qw
