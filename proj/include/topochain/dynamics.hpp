#ifndef TOPOCHAIN_DYNAMICS_HPP
#define TOPOCHAIN_DYNAMICS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "topochain/errors.hpp"
#include "topochain/lattice.hpp"
#include "topochain/spectral.hpp"

namespace topochain {

/// Uniform integration grid over [t0, t1] with n_steps intervals; the
/// trajectory visits the n_steps+1 grid points.
struct TimeGrid {
  double t0 = 0.0;
  double t1 = 1.0;
  int n_steps = 1;

  double dt() const { return (t1 - t0) / n_steps; }
  double time_at(int k) const { return t0 + k * dt(); }

  void validate() const {
    if (!(t1 > t0)) throw InvalidSpecError("TimeGrid: t1 must exceed t0");
    if (n_steps < 1) throw InvalidSpecError("TimeGrid: n_steps must be >= 1");
  }
};

enum class StepMethod { spectral_expansion, midpoint_exponential, rk4 };

struct StepperConfig {
  StepMethod method = StepMethod::midpoint_exponential;
  double dt_max = 0.01;      // integration step cap; grid intervals are subdivided to honor it
  double tolerance = 1e-8;   // norm-drift bound over the whole run
  int record_stride = 1;     // observables kept every record_stride-th grid point
  bool retain_states = false;

  void validate() const {
    if (!(dt_max > 0.0)) throw InvalidSpecError("StepperConfig: dt_max must be > 0");
    if (!(tolerance > 0.0)) throw InvalidSpecError("StepperConfig: tolerance must be > 0");
    if (record_stride < 1) throw InvalidSpecError("StepperConfig: record_stride must be >= 1");
  }
};

/// Recorded time evolution. sigma_z(row, n) = <sigma_n^z> at times(row);
/// states are kept (aligned with times) only when requested.
struct Trajectory {
  Eigen::VectorXd times;
  Eigen::MatrixXd sigma_z;
  std::vector<StateVector> states;

  int sites() const { return static_cast<int>(sigma_z.cols()); }
  int samples() const { return static_cast<int>(times.size()); }
};

/// |e_site>: the excitation flipped onto one site, all others down.
inline StateVector initial_excitation(int cells, int site) {
  const int n = 2 * cells;
  if (site < 1 || site > n)
    throw std::out_of_range("initial_excitation: site index " + std::to_string(site) +
                            " outside 1.." + std::to_string(n));
  StateVector psi = StateVector::Zero(n);
  psi(site - 1) = 1.0;
  return psi;
}

namespace detail {

inline void check_normalized(const StateVector& psi, const char* where) {
  if (std::abs(psi.norm() - 1.0) > 1e-8)
    throw InvalidSpecError(std::string(where) + ": initial state is not normalized");
}

inline void record_sample(Trajectory& traj, int row, double t, const StateVector& psi,
                          bool retain) {
  traj.times(row) = t;
  traj.sigma_z.row(row) = sigma_z_profile(psi).transpose();
  if (retain) traj.states.push_back(psi);
}

}  // namespace detail

/// Exact-to-roundoff evolution under a static Hamiltonian through its
/// eigen-expansion: psi(t) = V exp(-i E (t-t0)) V^T psi(0).
inline Trajectory evolve_static(const TridiagonalHamiltonian& h, const StateVector& psi0,
                                const TimeGrid& grid, bool retain_states = false) {
  grid.validate();
  detail::check_normalized(psi0, "evolve_static");
  if (psi0.size() != h.size())
    throw InvalidSpecError("evolve_static: state and Hamiltonian sizes differ");
  const EigenSystem es = eigh_tridiagonal(h);
  const Eigen::VectorXcd coeff = es.vectors.transpose() * psi0;

  Trajectory traj;
  traj.times.resize(grid.n_steps + 1);
  traj.sigma_z.resize(grid.n_steps + 1, h.size());
  if (retain_states) traj.states.reserve(grid.n_steps + 1);
  for (int k = 0; k <= grid.n_steps; ++k) {
    const double t = grid.time_at(k) - grid.t0;
    Eigen::VectorXcd phased(coeff.size());
    for (int l = 0; l < coeff.size(); ++l)
      phased(l) = coeff(l) * std::exp(Complex(0.0, -es.values(l) * t));
    const StateVector psi = es.vectors * phased;
    detail::record_sample(traj, k, grid.time_at(k), psi, retain_states);
  }
  return traj;
}

/// Stepper for a time-dependent chain. The default midpoint-exponential
/// rule applies exp(-i H(t + dt/2) dt) through the instantaneous
/// eigen-decomposition, which is unitary per step up to roundoff. rk4 is
/// kept as an independent cross-check. Grid intervals larger than
/// cfg.dt_max are subdivided; observables are recorded on the grid.
inline Trajectory evolve_time_dependent(
    const std::function<TridiagonalHamiltonian(double)>& hamiltonian_at,
    const StateVector& psi0, const TimeGrid& grid, const StepperConfig& cfg) {
  grid.validate();
  cfg.validate();
  detail::check_normalized(psi0, "evolve_time_dependent");
  if (cfg.method == StepMethod::spectral_expansion)
    throw InvalidSpecError(
        "evolve_time_dependent: spectral_expansion applies to static Hamiltonians only");

  const int substeps = std::max(1, static_cast<int>(std::ceil(grid.dt() / cfg.dt_max - 1e-12)));
  const double dt = grid.dt() / substeps;
  const int n = static_cast<int>(psi0.size());

  const int n_records = grid.n_steps / cfg.record_stride + 1 +
                        ((grid.n_steps % cfg.record_stride) ? 1 : 0);
  Trajectory traj;
  traj.times.resize(n_records);
  traj.sigma_z.resize(n_records, n);
  if (cfg.retain_states) traj.states.reserve(n_records);

  StateVector psi = psi0;
  int row = 0;
  detail::record_sample(traj, row++, grid.t0, psi, cfg.retain_states);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  for (int k = 0; k < grid.n_steps; ++k) {
    for (int s = 0; s < substeps; ++s) {
      const double t_step = grid.time_at(k) + s * dt;
      if (cfg.method == StepMethod::midpoint_exponential) {
        const TridiagonalHamiltonian h = hamiltonian_at(t_step + 0.5 * dt);
        if (h.size() != n)
          throw InvalidSpecError("evolve_time_dependent: builder changed the chain size");
        solver.computeFromTridiagonal(h.diag, h.offdiag, Eigen::ComputeEigenvectors);
        if (solver.info() != Eigen::Success)
          throw SolverError("evolve_time_dependent: instantaneous diagonalization failed");
        Eigen::VectorXcd c = solver.eigenvectors().transpose() * psi;
        for (int l = 0; l < n; ++l)
          c(l) *= std::exp(Complex(0.0, -solver.eigenvalues()(l) * dt));
        psi = solver.eigenvectors() * c;
      } else {  // rk4 on d psi/dt = -i H(t) psi
        const Complex mi(0.0, -1.0);
        const TridiagonalHamiltonian h0 = hamiltonian_at(t_step);
        const TridiagonalHamiltonian h1 = hamiltonian_at(t_step + 0.5 * dt);
        const TridiagonalHamiltonian h2 = hamiltonian_at(t_step + dt);
        if (h0.size() != n)
          throw InvalidSpecError("evolve_time_dependent: builder changed the chain size");
        const StateVector k1 = mi * h0.apply(psi);
        const StateVector k2 = mi * h1.apply(psi + 0.5 * dt * k1);
        const StateVector k3 = mi * h1.apply(psi + 0.5 * dt * k2);
        const StateVector k4 = mi * h2.apply(psi + dt * k3);
        psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
    }
    if (std::abs(psi.norm() - 1.0) > cfg.tolerance)
      throw StepSizeError("evolve_time_dependent: norm drift exceeded tolerance, halve dt");
    if ((k + 1) % cfg.record_stride == 0 || k + 1 == grid.n_steps)
      detail::record_sample(traj, row++, grid.time_at(k + 1), psi, cfg.retain_states);
  }
  traj.times.conservativeResize(row);
  traj.sigma_z.conservativeResize(row, n);
  return traj;
}

/// Validating accessor for the observable array.
inline const Eigen::MatrixXd& sigma_z_trajectory(const Trajectory& traj) {
  if (traj.sigma_z.rows() != traj.times.size())
    throw InvalidSpecError("sigma_z_trajectory: times/observable size mismatch");
  for (int r = 0; r < traj.sigma_z.rows(); ++r) {
    double excitation = 0.0;
    for (int c = 0; c < traj.sigma_z.cols(); ++c) {
      const double v = traj.sigma_z(r, c);
      if (v < -1.0 - 1e-9 || v > 1.0 + 1e-9)
        throw InvalidSpecError("sigma_z_trajectory: observable outside [-1, 1]");
      excitation += (v + 1.0) / 2.0;
    }
    if (std::abs(excitation - 1.0) > 1e-8)
      throw InvalidSpecError("sigma_z_trajectory: single excitation not conserved");
  }
  return traj.sigma_z;
}

/// First recorded time where <sigma_site^z> exceeds the threshold.
inline double front_arrival_time(const Trajectory& traj, int site, double threshold) {
  if (threshold <= -1.0 || threshold >= 1.0)
    throw InvalidSpecError("front_arrival_time: threshold must lie in (-1, 1)");
  if (site < 1 || site > traj.sites())
    throw std::out_of_range("front_arrival_time: site outside the chain");
  for (int r = 0; r < traj.samples(); ++r)
    if (traj.sigma_z(r, site - 1) > threshold) return traj.times(r);
  throw NeverCrossedError("front_arrival_time: threshold never crossed at site " +
                          std::to_string(site));
}

}  // namespace topochain

#endif
