#include "qw/scattering.hpp"

#include <cmath>
#include <sstream>

#include "qw/error.hpp"

namespace qw {

StationaryResult stationary_iterate(const TailedGraph& g, double eps, double lambda, const Vec& alpha_in, int t_max,
                                    double conv_tol) {
  if (t_max < 1) throw Error(ErrorKind::OutOfRange, "t_max must be >= 1");
  if (alpha_in.size() != g.tail_count()) throw Error(ErrorKind::OutOfRange, "inflow size != tail count");
  const BoundaryBlocks b = boundary_blocks(g, tunable_coins(g, eps));
  const Vec f0 = b.F * alpha_in;
  const cplx phase = std::exp(cplx(0, lambda));
  const double scale = std::max(1.0, f0.cwiseAbs().maxCoeff());

  // w_t = e^{i lambda t} u_t satisfies w_{t+1} = e^{i lambda} (E w_t + f_0).
  Vec w = Vec::Zero(g.arc_count());
  StationaryResult res;
  int quiet = 0;
  for (int t = 0; t < t_max; ++t) {
    Vec next = phase * (b.E * w + f0);
    const double gap = (next - w).cwiseAbs().maxCoeff();
    w = std::move(next);
    res.iterations = t + 1;
    res.last_gap = gap;
    quiet = gap < conv_tol * scale ? quiet + 1 : 0;
    if (quiet >= 5) break;
  }
  if (quiet < 5) {
    std::ostringstream os;
    os << "no convergence after " << t_max << " steps, last gap " << res.last_gap;
    throw Error(ErrorKind::NoConvergence, os.str());
  }
  res.v_inf = w;
  res.alpha_out = phase * (b.G * w + b.H * alpha_in);
  return res;
}

ClosedFormSigma::ClosedFormSigma(const TailedGraph& g, double eps, double cluster_tol, double circle_tol)
    : b_(boundary_blocks(g, tunable_coins(g, eps))), sd_(spectral_decompose(b_.E, cluster_tol)) {
  const int na = g.arc_count();
  for (const auto& c : sd_.clusters) {
    if (std::abs(std::abs(c.mu) - 1.0) <= circle_tol) {
      const double leak = (c.P * b_.F).norm();
      if (leak > 1e-7) {
        std::ostringstream os;
        os << "on-circle cluster " << c.mu << " has |P f_0| = " << leak;
        warnings_.push_back(os.str());
      }
      continue;
    }
    Mat Np = c.P;
    const Mat N = b_.E - c.mu * Mat::Identity(na, na);
    const int smax = c.nilpotent ? c.mult : 1;
    for (int s = 0; s < smax; ++s) {
      terms_.push_back({c.mu, s, b_.G * Np * b_.F});
      Np = N * Np;
    }
  }
}

Mat ClosedFormSigma::sigma(double lambda) const {
  const cplx z = std::exp(cplx(0, -lambda));
  Mat S = b_.H;
  for (const auto& t : terms_) S += std::pow(z - t.mu, -t.power - 1) * t.R;
  return S;
}

Vec ClosedFormSigma::alpha_out(double lambda, const Vec& alpha_in) const {
  return std::exp(cplx(0, lambda)) * (sigma(lambda) * alpha_in);
}

Mat closed_form_sigma(const TailedGraph& g, double eps, double lambda) { return ClosedFormSigma(g, eps).sigma(lambda); }

std::vector<double> lambda_grid(int n) {
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = 2 * kPi * k / n;
  return out;
}

std::vector<TransmissionRow> transmission_curve(const TailedGraph& g, double eps, const std::vector<double>& grid,
                                                int inflow_port, const std::vector<int>& outflow_ports) {
  const int nt = g.tail_count();
  if (inflow_port < 0 || inflow_port >= nt) throw Error(ErrorKind::OutOfRange, "inflow port");
  for (int p : outflow_ports)
    if (p < 0 || p >= nt) throw Error(ErrorKind::OutOfRange, "outflow port");
  const ClosedFormSigma cf(g, eps);
  std::vector<TransmissionRow> rows(grid.size());
  parallel_for(static_cast<int>(grid.size()), [&](int i) {
    const Mat S = cf.sigma(grid[i]);
    double tau = 0;
    for (int p : outflow_ports) tau += std::norm(S(p, inflow_port));
    rows[i] = {grid[i], tau, std::norm(S(inflow_port, inflow_port))};
  });
  return rows;
}

}  // namespace qw
