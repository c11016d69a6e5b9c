#ifndef TOPOCHAIN_PUMPING_HPP
#define TOPOCHAIN_PUMPING_HPP

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <vector>

#include "topochain/dynamics.hpp"
#include "topochain/errors.hpp"
#include "topochain/lattice.hpp"
#include "topochain/spectral.hpp"

namespace topochain {

/// Periodic drive of the Rice-Mele chain. The closed curve
/// (a(t) - b(t), u(t)) must wind once around the degenerate point (0, 0);
/// that is what makes the cycle pump.
struct PumpSchedule {
  double period = 100.0;
  double u_amp = 1.0;
  std::function<double(double)> a_of_t;
  std::function<double(double)> b_of_t;
  std::function<double(double)> u_of_t;

  TridiagonalHamiltonian chain_at(double t, int cells, double omega = 0.0) const {
    ChainSpec spec{cells, a_of_t(t), b_of_t(t), omega, u_of_t(t)};
    return build_rice_mele(spec);
  }
};

/// Signed winding number of (a - b, u) around the origin over one period,
/// by discretized angle accumulation.
inline int winding_number(const PumpSchedule& schedule, int samples = 1024) {
  double total = 0.0;
  double prev = std::atan2(schedule.u_of_t(0.0), schedule.a_of_t(0.0) - schedule.b_of_t(0.0));
  for (int k = 1; k <= samples; ++k) {
    const double t = schedule.period * k / samples;
    const double angle =
        std::atan2(schedule.u_of_t(t), schedule.a_of_t(t) - schedule.b_of_t(t));
    double delta = angle - prev;
    while (delta > M_PI) delta -= 2.0 * M_PI;
    while (delta < -M_PI) delta += 2.0 * M_PI;
    total += delta;
    prev = angle;
  }
  return static_cast<int>(std::lround(total / (2.0 * M_PI)));
}

/// The pump cycle a(t) = 1 - cos(2 pi t / T), b(t) = 1,
/// u(t) = -u_amp sin(2 pi t / T).
inline PumpSchedule make_pump_schedule(double period, double u_amp) {
  if (!(period > 0.0)) throw InvalidSpecError("make_pump_schedule: period must be > 0");
  if (u_amp == 0.0 || !std::isfinite(u_amp))
    throw InvalidSpecError("make_pump_schedule: u_amp must be nonzero and finite");
  PumpSchedule schedule;
  schedule.period = period;
  schedule.u_amp = u_amp;
  schedule.a_of_t = [period](double t) { return 1.0 - std::cos(2.0 * M_PI * t / period); };
  schedule.b_of_t = [](double) { return 1.0; };
  schedule.u_of_t = [period, u_amp](double t) {
    return -u_amp * std::sin(2.0 * M_PI * t / period);
  };
  if (std::abs(winding_number(schedule)) != 1)
    throw InvalidSpecError("make_pump_schedule: cycle does not encircle the degenerate point");
  return schedule;
}

/// Eigenvalues of the frozen Rice-Mele chain across one cycle, plus the
/// branch adiabatically connected to the left edge state at t = 0+,
/// followed by maximal successive eigenvector overlap.
struct InstantaneousSpectrum {
  Eigen::VectorXd t_samples;
  Eigen::MatrixXd levels;          // [n_samples x 2L], each row ascending
  std::vector<int> edge_branch;    // tracked level index per sample
  Eigen::MatrixXd tracked_states;  // tracked eigenvector per sample (rows)

  double tracked_level(int sample) const { return levels(sample, edge_branch[sample]); }
};

inline InstantaneousSpectrum instantaneous_spectrum(const PumpSchedule& schedule, int cells,
                                                    int n_samples) {
  if (n_samples < 2) throw InvalidSpecError("instantaneous_spectrum: need >= 2 samples");
  const int n = 2 * cells;
  InstantaneousSpectrum out;
  out.t_samples.resize(n_samples);
  out.levels.resize(n_samples, n);
  out.edge_branch.resize(n_samples);
  out.tracked_states.resize(n_samples, n);

  Eigen::VectorXd tracked = Eigen::VectorXd::Zero(n);
  tracked(0) = 1.0;  // left edge state at t = 0+
  for (int s = 0; s < n_samples; ++s) {
    const double t = schedule.period * s / (n_samples - 1);
    out.t_samples(s) = t;
    const EigenSystem es = eigh_tridiagonal(schedule.chain_at(t, cells));
    out.levels.row(s) = es.values.transpose();
    int best = 0;
    double best_overlap = -1.0;
    for (int k = 0; k < n; ++k) {
      const double overlap = std::abs(es.vectors.col(k).dot(tracked));
      if (overlap > best_overlap) {
        best_overlap = overlap;
        best = k;
      }
    }
    if (best_overlap < 0.5)
      throw BranchTrackingError("instantaneous_spectrum: successive overlap " +
                                    std::to_string(best_overlap) + " below 0.5 at sample " +
                                    std::to_string(s),
                                s);
    Eigen::VectorXd chosen = es.vectors.col(best);
    if (chosen.dot(tracked) < 0) chosen = -chosen;  // keep the branch smooth
    tracked = chosen;
    out.edge_branch[s] = best;
    out.tracked_states.row(s) = tracked.transpose();
  }
  return out;
}

/// Drive the chain from |e_1> through n_cycles of the schedule. Disorder
/// is quenched: one Gaussian draw per matrix entry, frozen for the whole
/// run and added on top of the modulated clean chain.
inline Trajectory run_pump(int cells, const PumpSchedule& schedule, int n_cycles,
                           const DisorderSpec& disorder, const StepperConfig& cfg) {
  if (cells < 1) throw InvalidSpecError("run_pump: cells must be >= 1");
  if (n_cycles < 1) throw InvalidSpecError("run_pump: n_cycles must be >= 1");
  cfg.validate();
  const int n = 2 * cells;
  const auto [diag_noise, bond_noise] = draw_disorder(n, disorder);
  const auto builder = [&schedule, cells, diag_noise = diag_noise,
                        bond_noise = bond_noise](double t) {
    TridiagonalHamiltonian h = schedule.chain_at(t, cells);
    h.diag += diag_noise;
    h.offdiag += bond_noise;
    return h;
  };
  TimeGrid grid{0.0, n_cycles * schedule.period,
                static_cast<int>(std::ceil(n_cycles * schedule.period / cfg.dt_max - 1e-12))};
  return evolve_time_dependent(builder, initial_excitation(cells, 1), grid, cfg);
}

/// |<psi_track(t) | psi(t)>|^2 against the clean-chain instantaneous
/// eigenstate tracked from the left edge, one value per retained sample.
inline std::vector<double> adiabatic_fidelity(const Trajectory& traj,
                                              const PumpSchedule& schedule) {
  if (traj.states.empty())
    throw MissingStatesError("adiabatic_fidelity: trajectory retained no states");
  if (static_cast<int>(traj.states.size()) != traj.samples())
    throw MissingStatesError("adiabatic_fidelity: retained states misaligned with samples");
  const int n = traj.sites();
  std::vector<double> fidelity(traj.states.size());
  Eigen::VectorXd tracked = Eigen::VectorXd::Zero(n);
  tracked(0) = 1.0;
  for (int s = 0; s < traj.samples(); ++s) {
    const EigenSystem es = eigh_tridiagonal(schedule.chain_at(traj.times(s), n / 2));
    int best = 0;
    double best_overlap = -1.0;
    for (int k = 0; k < n; ++k) {
      const double overlap = std::abs(es.vectors.col(k).dot(tracked));
      if (overlap > best_overlap) {
        best_overlap = overlap;
        best = k;
      }
    }
    if (best_overlap < 0.5)
      throw BranchTrackingError("adiabatic_fidelity: branch lost at sample " +
                                    std::to_string(s),
                                s);
    Eigen::VectorXd chosen = es.vectors.col(best);
    if (chosen.dot(tracked) < 0) chosen = -chosen;
    tracked = chosen;
    fidelity[s] = std::norm(tracked.cast<Complex>().dot(traj.states[s]));
  }
  return fidelity;
}

/// Site population |psi_site(t)|^2 = (<sigma^z> + 1)/2 at the recorded
/// time nearest to t.
inline double transfer_probability(const Trajectory& traj, int site, double t) {
  if (site < 1 || site > traj.sites())
    throw std::out_of_range("transfer_probability: site outside the chain");
  const double lo = traj.times(0), hi = traj.times(traj.samples() - 1);
  const double slack = 1e-9 * std::max(1.0, std::abs(hi));
  if (t < lo - slack || t > hi + slack)
    throw std::out_of_range("transfer_probability: time outside the trajectory range");
  int nearest = 0;
  double best = std::numeric_limits<double>::max();
  for (int r = 0; r < traj.samples(); ++r) {
    const double d = std::abs(traj.times(r) - t);
    if (d < best) {
      best = d;
      nearest = r;
    }
  }
  return (traj.sigma_z(nearest, site - 1) + 1.0) / 2.0;
}

}  // namespace topochain

#endif
