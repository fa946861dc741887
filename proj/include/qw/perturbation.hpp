#pragma once

#include <string>
#include <vector>

#include "qw/internal_spectral.hpp"
#include "qw/smt_laplacian.hpp"

namespace qw {

// S_mu = -sum_{zeta != mu} sum_n (mu - zeta)^{-n-1} (A - zeta)^n P_zeta.
Mat reduced_resolvent(const Mat& A, const SpectralData& sd, int index);

// Contour integral of (E0 + kappa E1 - z)^{-1} around E_0's cluster `index`.
// Throws GroupEscapedContour if the eigenvalue count inside differs from m(mu).
Mat total_projection(const Mat& E0, const Mat& E1, const SpectralData& sd0, int index, cplx kappa, double radius,
                     int nodes = 512);

struct ProjectionExpansion {
  Mat P, S, P1, P2, P3;
  Mat sum(cplx kappa) const { return P + kappa * P1 + kappa * kappa * P2 + kappa * kappa * kappa * P3; }
};
// Coefficients of P_{kappa,mu} from the resolvent Laurent data (complete expansion).
ProjectionExpansion projection_expansion(const Mat& E0, const Mat& E1, const SpectralData& sd0, int index);

struct Stage2Branch {
  cplx mu2;
  int mult = 0;
  Mat P2, S2;
  double nilpotent = 0;
  bool persistent = false;
};

struct Stage1Branch {
  cplx mu1;
  int mult = 0;
  Mat P1, S1;
  double nilpotent = 0;
  Mat A2;  // P1 A11 P1
  std::vector<Stage2Branch> stage2;
};

struct LedgerEntry {
  cplx mu;
  int m = 0;
  int cluster = -1;
  Mat P, S;
  Mat A1;   // P E1 P
  Mat A11;  // first-order coefficient of the reduced operator
  std::vector<Stage1Branch> stage1;
};

struct ReductionLedger {
  std::vector<LedgerEntry> entries;
};

LedgerEntry reduce(const Mat& E0, const Mat& E1, const SpectralData& sd0, int index, double cluster_tol = 1e-7);
ReductionLedger build_ledger(const Mat& E0, const Mat& E1, const SpectralData& sd0, double cluster_tol = 1e-7);

// gamma(mu) = mu/2 off +-1, mu at +-1.
cplx gamma_of(cplx mu);
// Phase factor so that <E1 lift_mu g_j, lift_zeta h_k> = mu * omega(mu) * conj(omega(zeta)) * M2.
cplx omega_of(cplx z);
// The displayed convention: sign(sin arg z)/sqrt 2 off +-1, -+1 at +-1.
cplx omega_displayed(cplx z);

// Largest boundary weight max_v N_v / n(v); equals 1/min n(v) when each boundary vertex has one tail.
double boundary_weight_max(const TailedGraph& g);

// M1(j,k) = -<D g_j, g_k>_{n_i}.
Mat build_M1(const LaplacianOps& ops, const Mat& basis);
// M2(k,j) = -<D g^mu_j, g^zeta_k>_{n_i}; shape s(zeta) x s(mu).
Mat build_M2(const LaplacianOps& ops, const Mat& basis_zeta, const Mat& basis_mu);

struct Mu2BoundReport {
  double bound = 0;
  double max_abs_mu2 = 0;
  bool holds = false;
  double e12_residual = 0;  // formula route vs reduce() route
};
Mu2BoundReport mu2_bound_check(const TailedGraph& g, const SpectralData& sd0, const Mat& E1, const LedgerEntry& entry);

cplx resonance_asymptote(cplx mu, cplx mu1, cplx mu2, double eps);

struct BranchTrack {
  cplx mu, mu1, mu2;
  int mult = 0;
  bool persistent = false;
  std::vector<double> eps;
  std::vector<cplx> truth;  // mean of matched eigenvalues
  std::vector<double> err_first, err_second, spread;
  double slope_first = 0, slope_second = 0;
  bool assumption_range = false;     // single eigenvalue per branch at every eps
  bool assumption_complete = false;  // sum of stage-2 projections recovers P_mu
  bool assumption_nondegenerate = false;
  bool assumption_estimate = false;  // the sufficient inequality, evaluated with constant 1
  bool assumption_ok() const { return assumption_range && assumption_complete && assumption_nondegenerate; }
};

std::vector<BranchTrack> track_branches(const TailedGraph& g, const Mat& E0, const Mat& E1, const SpectralData& sd0,
                                        const ReductionLedger& ledger, const std::vector<double>& eps_ladder);

struct ResonantLimit {
  Mat sigma1;     // Sigma_0^(1)(mu)
  std::vector<cplx> rho;
  bool caveat = false;  // AssumptionViolated
  std::string note;
};
// First-order resonant scattering correction for the stage-1 branch `b1` of `entry`.
// The geometric series in rho runs to the nilpotency index of the perturbed resonance
// (1 when it is semisimple), since higher powers of its eigennilpotent vanish.
ResonantLimit resonant_sigma_limit(const TailedGraph& g, const LedgerEntry& entry, int b1, bool assumption_ok,
                                   int nilpotency_index = 1);
// lambda_eps with e^{-i lambda} = mu exp(-i pi gamma eta eps).
double resonant_lambda(cplx mu, cplx mu1, double eps);

}  // namespace qw
