#ifndef TOPOCHAIN_CIRCUIT_HPP
#define TOPOCHAIN_CIRCUIT_HPP

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cmath>
#include <complex>
#include <vector>

#include "topochain/errors.hpp"
#include "topochain/spectral.hpp"

namespace topochain {

/// Gap-tunable flux qubit in reduced-flux units. All fluxes are divided by
/// the flux quantum, energies by the Josephson energy of the large
/// junctions (default reference 1), and loop currents come out as energy
/// per reduced flux. Defaults reproduce the reference working point:
/// E_J/E_C = 50, alpha = 0.5, beta = 0.05, one trapped fluxoid (N = n = 1),
/// charge cutoff 15.
struct CircuitParams {
  double ej = 1.0;           // Josephson energy of the large junctions
  double ej_over_ec = 50.0;  // E_J / E_C
  double alpha = 0.5;        // small-junction size ratio
  double beta = 0.05;        // alpha-loop / trap-loop circumference ratio
  double f_alpha = 0.0;      // reduced flux through the alpha loop
  double f_eps = 0.0;        // asymmetric reduced flux f_eps1 - f_eps2
  double f_sigma = 0.0;      // total reduced flux f_eps1 + f_eps2 + f_alpha
  int fluxoids = 1;          // trapped fluxoid number N
  int fluxoid_diff = 1;      // fluxoid difference n
  int n_charge = 15;         // charge-basis cutoff per junction

  double charging_energy() const { return ej / ej_over_ec; }
  int dim() const { return (2 * n_charge + 1) * (2 * n_charge + 1); }

  // Phase of the alpha-junction term, A = pi [beta (N - f_sigma) + f_alpha].
  double alpha_phase() const {
    return M_PI * (beta * (fluxoids - f_sigma) + f_alpha);
  }
  // Phase shift of the combined junction, B = pi (n - f_eps).
  double eps_phase() const { return M_PI * (fluxoid_diff - f_eps); }

  void validate() const {
    if (!(ej > 0.0)) throw InvalidSpecError("CircuitParams: ej must be > 0");
    if (!(ej_over_ec > 0.0)) throw InvalidSpecError("CircuitParams: ej_over_ec must be > 0");
    if (!(alpha > 0.0)) throw InvalidSpecError("CircuitParams: alpha must be > 0");
    if (!(beta > 0.0 && beta < 1.0)) throw InvalidSpecError("CircuitParams: beta outside (0, 1)");
    if (n_charge < 4) throw InvalidSpecError("CircuitParams: charge cutoff below 4");
    if (!std::isfinite(f_alpha) || !std::isfinite(f_eps) || !std::isfinite(f_sigma))
      throw InvalidSpecError("CircuitParams: fluxes must be finite");
  }

  /// Working point with the conventional tie f_sigma = 50 f_alpha.
  static CircuitParams at_flux(double f_alpha_value, double f_eps_value = 0.0) {
    CircuitParams p;
    p.f_alpha = f_alpha_value;
    p.f_sigma = 50.0 * f_alpha_value;
    p.f_eps = f_eps_value;
    return p;
  }
};

/// Hermitian operator on the two-junction charge lattice
/// (n1, n2) in [-N_c, N_c]^2, stored sparse (7 entries per row).
struct ChargeBasisHamiltonian {
  int n_charge = 0;
  SparseOperator matrix;

  int dim() const { return static_cast<int>(matrix.rows()); }
  DenseOperator dense() const { return DenseOperator(matrix); }
};

struct QubitReduction {
  double omega = 0.0;     // splitting of the lowest doublet at the working point
  double delta = 0.0;     // splitting at f_eps = 0 (tunneling energy)
  double eps_bias = 0.0;  // sign-resolved sqrt(omega^2 - delta^2)
  double persistent_current = 0.0;  // I_p, slope of eps_bias / (2 f_eps)
};

struct CouplingReport {
  double g_perp = 0.0;  // <e| dH/df_eps |g>, transverse element
  double g_par = 0.0;   // <+| dH/df_eps |->, longitudinal element
  double current_ground = 0.0;   // <g| dH/df_eps |g>
  double current_excited = 0.0;  // <e| dH/df_eps |e>
};

namespace detail {

inline int charge_index(int n1, int n2, int n_charge) {
  return (n1 + n_charge) * (2 * n_charge + 1) + (n2 + n_charge);
}

}  // namespace detail

/// Charge-basis circuit Hamiltonian:
///   H = 4 E_C/(1+4a) [(1+2a) n1^2 - 4a n1 n2 + (1+2a) n2^2]
///     + E_J [2(1+a) - cos phi1 - cos phi2 - 2a cos A cos(phi1 + phi2 + B)].
/// cos phi1/phi2 hop single charges with amplitude -E_J/2; the combined
/// alpha junction hops both charges together with amplitude
/// -a E_J cos A e^{-iB} (phase sign tied to the hop direction). Hops
/// leaving the cutoff square are dropped.
inline ChargeBasisHamiltonian build_charge_hamiltonian(const CircuitParams& p) {
  p.validate();
  const int nc = p.n_charge;
  const int dim = p.dim();
  const double kinetic_scale = 4.0 * p.charging_energy() / (1.0 + 4.0 * p.alpha);
  const double a2 = 1.0 + 2.0 * p.alpha;
  const double cos_a = std::cos(p.alpha_phase());
  const Complex alpha_hop = -p.alpha * p.ej * cos_a * std::exp(Complex(0.0, p.eps_phase()));
  const double single_hop = -p.ej / 2.0;
  const double offset = 2.0 * (1.0 + p.alpha) * p.ej;

  std::vector<Eigen::Triplet<Complex>> entries;
  entries.reserve(static_cast<size_t>(dim) * 7);
  for (int n1 = -nc; n1 <= nc; ++n1) {
    for (int n2 = -nc; n2 <= nc; ++n2) {
      const int i = detail::charge_index(n1, n2, nc);
      const double kinetic =
          kinetic_scale * (a2 * n1 * n1 - 4.0 * p.alpha * n1 * n2 + a2 * n2 * n2);
      entries.emplace_back(i, i, Complex(kinetic + offset));
      if (n1 + 1 <= nc) {
        const int j = detail::charge_index(n1 + 1, n2, nc);
        entries.emplace_back(j, i, Complex(single_hop));
        entries.emplace_back(i, j, Complex(single_hop));
      }
      if (n2 + 1 <= nc) {
        const int j = detail::charge_index(n1, n2 + 1, nc);
        entries.emplace_back(j, i, Complex(single_hop));
        entries.emplace_back(i, j, Complex(single_hop));
      }
      if (n1 + 1 <= nc && n2 + 1 <= nc) {
        const int j = detail::charge_index(n1 + 1, n2 + 1, nc);
        entries.emplace_back(j, i, alpha_hop);
        entries.emplace_back(i, j, std::conj(alpha_hop));
      }
    }
  }
  ChargeBasisHamiltonian h;
  h.n_charge = nc;
  h.matrix.resize(dim, dim);
  h.matrix.setFromTriplets(entries.begin(), entries.end());
  return h;
}

/// Analytic dH/df_eps at fixed f_sigma:
///   -2 pi a E_J cos A sin(phi1 + phi2 + B),
/// a traceless Hermitian operator on the diagonal charge hops only.
inline ChargeBasisHamiltonian d_hamiltonian_d_feps(const CircuitParams& p) {
  p.validate();
  const int nc = p.n_charge;
  const double cos_a = std::cos(p.alpha_phase());
  // sin(x) = (e^{ix} - e^{-ix}) / 2i turns the prefactor into
  // +i pi a E_J cos A on the up-hop.
  const Complex up_hop =
      Complex(0.0, M_PI) * p.alpha * p.ej * cos_a * std::exp(Complex(0.0, p.eps_phase()));

  std::vector<Eigen::Triplet<Complex>> entries;
  entries.reserve(static_cast<size_t>(p.dim()) * 2);
  for (int n1 = -nc; n1 < nc; ++n1) {
    for (int n2 = -nc; n2 < nc; ++n2) {
      const int i = detail::charge_index(n1, n2, nc);
      const int j = detail::charge_index(n1 + 1, n2 + 1, nc);
      entries.emplace_back(j, i, up_hop);
      entries.emplace_back(i, j, std::conj(up_hop));
    }
  }
  ChargeBasisHamiltonian d;
  d.n_charge = nc;
  d.matrix.resize(p.dim(), p.dim());
  d.matrix.setFromTriplets(entries.begin(), entries.end());
  return d;
}

/// Lowest n_levels circuit energies, ascending.
inline Eigen::VectorXd qubit_spectrum(const CircuitParams& p, int n_levels) {
  if (n_levels < 1 || n_levels > 10)
    throw InvalidSpecError("qubit_spectrum: n_levels must lie in 1..10");
  const ChargeBasisHamiltonian h = build_charge_hamiltonian(p);
  return lowest_eigenpairs(h.matrix, n_levels).values;
}

/// Qubit gap omega = E_1 - E_0 along an alpha-flux sweep at f_eps = 0.
/// By default the total flux follows the f_sigma = 50 f_alpha convention.
inline Eigen::VectorXd gap_vs_falpha(const CircuitParams& p,
                                     const std::vector<double>& f_alpha_values,
                                     bool tie_sigma = true) {
  Eigen::VectorXd gaps(static_cast<int>(f_alpha_values.size()));
  for (size_t i = 0; i < f_alpha_values.size(); ++i) {
    CircuitParams q = p;
    q.f_eps = 0.0;
    q.f_alpha = f_alpha_values[i];
    if (tie_sigma) q.f_sigma = 50.0 * f_alpha_values[i];
    const Eigen::VectorXd levels = qubit_spectrum(q, 2);
    gaps(static_cast<int>(i)) = levels(1) - levels(0);
  }
  return gaps;
}

/// Loop-current matrix elements of dH/df_eps between the lowest doublet.
///
/// Gauge: |g> gets its largest-magnitude component rotated real positive;
/// |e> is then rotated so the transverse element <e|dH|g> is real and
/// nonnegative. With that relative phase fixed, <+|dH|-> collapses to the
/// real combination (I_1 - I_0)/2.
inline CouplingReport coupling_elements(const CircuitParams& p) {
  const ChargeBasisHamiltonian h = build_charge_hamiltonian(p);
  const ComplexEigenSystem pair = lowest_eigenpairs(h.matrix, 2);
  if (pair.values(1) - pair.values(0) <= 1e-8)
    throw DegenerateLevelsError("coupling_elements: lowest doublet is degenerate");
  Eigen::VectorXcd ground = pair.vectors.col(0);
  Eigen::VectorXcd excited = pair.vectors.col(1);

  int anchor = 0;
  ground.cwiseAbs().maxCoeff(&anchor);
  ground *= std::conj(ground(anchor)) / std::abs(ground(anchor));

  const SparseOperator& d = d_hamiltonian_d_feps(p).matrix;
  const Eigen::VectorXcd d_ground = d * ground;
  const Complex transverse = excited.dot(d_ground);
  if (std::abs(transverse) > 1e-14) excited *= transverse / std::abs(transverse);

  CouplingReport report;
  report.g_perp = excited.dot(d_ground).real();
  report.current_ground = ground.dot(d_ground).real();
  report.current_excited = excited.dot(d * excited).real();
  const Eigen::VectorXcd plus = (excited + ground) / std::sqrt(2.0);
  const Eigen::VectorXcd minus = (excited - ground) / std::sqrt(2.0);
  report.g_par = plus.dot(d * minus).real();
  return report;
}

/// Two-level reduction of the circuit: omega = sqrt(eps^2 + delta^2) with
/// delta the gap at f_eps = 0 and eps = 2 f_eps I_p. At f_eps = 0 the
/// persistent current is a Richardson-extrapolated slope.
inline QubitReduction two_level_reduction(const CircuitParams& p) {
  CircuitParams symmetric = p;
  symmetric.f_eps = 0.0;
  const auto gap_at = [](const CircuitParams& q) {
    const Eigen::VectorXd levels = qubit_spectrum(q, 2);
    return levels(1) - levels(0);
  };
  QubitReduction red;
  red.delta = gap_at(symmetric);
  red.omega = (p.f_eps == 0.0) ? red.delta : gap_at(p);
  if (red.omega < red.delta - 1e-8)
    throw InconsistentDoubletError(
        "two_level_reduction: omega below delta, two-level form breaks down");
  const double eps_sq = std::max(red.omega * red.omega - red.delta * red.delta, 0.0);
  red.eps_bias = std::copysign(std::sqrt(eps_sq), p.f_eps);
  if (p.f_eps != 0.0) {
    red.persistent_current = red.eps_bias / (2.0 * p.f_eps);
  } else {
    const auto slope_at = [&](double h) {
      CircuitParams q = symmetric;
      q.f_eps = h;
      const double w = gap_at(q);
      return std::sqrt(std::max(w * w - red.delta * red.delta, 0.0)) / (2.0 * h);
    };
    const double coarse = slope_at(2e-3), fine = slope_at(1e-3);
    red.persistent_current = (4.0 * fine - coarse) / 3.0;  // h^2 extrapolation
  }
  return red;
}

/// Inductive qubit-qubit coupling J = M g_perp^(j) g_perp^(j+1); this is
/// the chain coupling fed back into the lattice builders.
inline double chain_coupling_strength(const CircuitParams& left, const CircuitParams& right,
                                      double mutual_inductance) {
  return mutual_inductance * coupling_elements(left).g_perp * coupling_elements(right).g_perp;
}

}  // namespace topochain

#endif
