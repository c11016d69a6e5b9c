#include <catch2/catch.hpp>
#include <algorithm>
#include <cmath>
#include <vector>

#include "topochain/circuit.hpp"
#include "topochain/spectral.hpp"

using namespace topochain;

namespace {

// Reduced cutoff keeps dense oracles cheap; the working point is otherwise
// the reference parameter set.
CircuitParams small_params(double f_alpha = 0.2, double f_eps = 0.0) {
  CircuitParams p = CircuitParams::at_flux(f_alpha, f_eps);
  p.n_charge = 8;
  return p;
}

}  // namespace

TEST_CASE("charge_hamiltonian_dimension_and_hermiticity") {
  const CircuitParams p = CircuitParams::at_flux(0.2);
  const ChargeBasisHamiltonian h = build_charge_hamiltonian(p);
  REQUIRE(h.dim() == 961);  // (2*15+1)^2
  const SparseOperator gap = SparseOperator(h.matrix - SparseOperator(h.matrix.adjoint()));
  double max_abs = 0.0;
  for (int k = 0; k < gap.outerSize(); ++k)
    for (SparseOperator::InnerIterator it(gap, k); it; ++it)
      max_abs = std::max(max_abs, std::abs(it.value()));
  CHECK(max_abs <= 1e-12);
}

TEST_CASE("charge_hamiltonian_param_validation") {
  CircuitParams p = small_params();
  p.n_charge = 3;
  CHECK_THROWS_AS(build_charge_hamiltonian(p), InvalidSpecError);
  p = small_params();
  p.alpha = 0.0;
  CHECK_THROWS_AS(build_charge_hamiltonian(p), InvalidSpecError);
  p = small_params();
  p.beta = 1.5;
  CHECK_THROWS_AS(build_charge_hamiltonian(p), InvalidSpecError);
}

TEST_CASE("charge_hamiltonian_separates_without_alpha_junction") {
  // cos A = 0 switches the combined junction off; with a negligible size
  // ratio the kinetic cross term drops too and the two junctions decouple
  // into independent single-junction problems.
  CircuitParams p;
  p.alpha = 1e-9;
  p.n_charge = 6;
  p.f_alpha = 0.5;
  p.f_sigma = 1.0;  // A = pi [beta (1 - 1) + 0.5] = pi/2
  p.f_eps = 0.0;
  REQUIRE(std::abs(std::cos(p.alpha_phase())) < 1e-12);
  const ComplexEigenSystem es = eigh_dense_hermitian(build_charge_hamiltonian(p).dense());

  // Single-junction oracle: 4 E_C n^2 - E_J cos(phi) + E_J (1 + alpha).
  const int m = 2 * p.n_charge + 1;
  DenseOperator single = DenseOperator::Zero(m, m);
  for (int n = -p.n_charge; n <= p.n_charge; ++n) {
    const int i = n + p.n_charge;
    single(i, i) = 4.0 * p.charging_energy() * n * n + (1.0 + p.alpha) * p.ej;
    if (i + 1 < m) {
      single(i + 1, i) = -p.ej / 2.0;
      single(i, i + 1) = -p.ej / 2.0;
    }
  }
  const ComplexEigenSystem one = eigh_dense_hermitian(single);
  std::vector<double> sums;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) sums.push_back(one.values(i) + one.values(j));
  std::sort(sums.begin(), sums.end());
  for (int k = 0; k < 6; ++k) CHECK(es.values(k) == Approx(sums[k]).margin(1e-8));
}

TEST_CASE("charge_hamiltonian_periodic_in_feps") {
  const CircuitParams base = small_params(0.2, 0.003);
  CircuitParams shifted = base;
  shifted.f_eps += 2.0;
  const Eigen::VectorXd a = qubit_spectrum(base, 3);
  const Eigen::VectorXd b = qubit_spectrum(shifted, 3);
  CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("flux_derivative_matches_central_differences") {
  // 5-point parameter grid, h = 1e-5, agreement to 1e-8.
  const double f_alphas[] = {0.1, 0.2, 0.3};
  const double f_epss[] = {0.0, 0.004};
  const double h = 1e-5;
  for (double fa : f_alphas) {
    for (double fe : f_epss) {
      CircuitParams p = small_params(fa, fe);
      CircuitParams plus = p, minus = p;
      plus.f_eps += h;
      minus.f_eps -= h;
      const DenseOperator fd =
          (build_charge_hamiltonian(plus).dense() - build_charge_hamiltonian(minus).dense()) /
          (2.0 * h);
      const DenseOperator analytic = d_hamiltonian_d_feps(p).dense();
      REQUIRE((analytic - fd).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }
}

TEST_CASE("flux_derivative_vanishes_at_zero_cos_a") {
  CircuitParams p = small_params();
  p.f_alpha = 0.5;
  p.f_sigma = 1.0;  // A = pi/2
  const ChargeBasisHamiltonian d = d_hamiltonian_d_feps(p);
  double max_abs = 0.0;
  for (int k = 0; k < d.matrix.outerSize(); ++k)
    for (SparseOperator::InnerIterator it(d.matrix, k); it; ++it)
      max_abs = std::max(max_abs, std::abs(it.value()));
  CHECK(max_abs <= 1e-15);
}

TEST_CASE("flux_derivative_is_traceless") {
  const ChargeBasisHamiltonian d = d_hamiltonian_d_feps(small_params());
  Complex trace = 0.0;
  for (int k = 0; k < d.matrix.outerSize(); ++k)
    for (SparseOperator::InnerIterator it(d.matrix, k); it; ++it)
      if (it.row() == it.col()) trace += it.value();
  CHECK(std::abs(trace) == 0.0);
}

TEST_CASE("qubit_spectrum_is_even_in_feps") {
  for (double fe : {0.002, 0.006}) {
    const Eigen::VectorXd plus = qubit_spectrum(small_params(0.2, fe), 4);
    const Eigen::VectorXd minus = qubit_spectrum(small_params(0.2, -fe), 4);
    CHECK((plus - minus).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("qubit_doublet_is_well_separated") {
  const Eigen::VectorXd levels = qubit_spectrum(small_params(), 3);
  const double doublet = levels(1) - levels(0);
  const double to_next = levels(2) - levels(1);
  CHECK(to_next / doublet > 2.0);
}

TEST_CASE("qubit_spectrum_cutoff_convergence") {
  CircuitParams coarse = CircuitParams::at_flux(0.2);
  coarse.n_charge = 10;
  const CircuitParams fine = CircuitParams::at_flux(0.2);  // n_charge 15
  const Eigen::VectorXd a = qubit_spectrum(coarse, 2);
  const Eigen::VectorXd b = qubit_spectrum(fine, 2);
  CHECK(std::abs((a(1) - a(0)) - (b(1) - b(0))) < 1e-6);
  CHECK_THROWS_AS(qubit_spectrum(fine, 11), InvalidSpecError);
}

TEST_CASE("sparse_lowest_pairs_agree_with_dense") {
  // Cutoff 13 puts the solver on the shift-invert path (dim 729 > 600).
  CircuitParams p = CircuitParams::at_flux(0.2, 0.003);
  p.n_charge = 13;
  const ChargeBasisHamiltonian h = build_charge_hamiltonian(p);
  const ComplexEigenSystem fast = lowest_eigenpairs(h.matrix, 4);
  const ComplexEigenSystem full = eigh_dense_hermitian(h.dense());
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(fast.values(i) - full.values(i)) <= 1e-9);
    // Same one-dimensional eigenspaces.
    CHECK(std::abs(fast.vectors.col(i).dot(full.vectors.col(i))) == Approx(1.0).margin(1e-7));
  }
}

TEST_CASE("gap_is_tunable_through_falpha") {
  std::vector<double> sweep;
  for (int i = 0; i <= 25; ++i) sweep.push_back(0.5 * i / 25.0);
  const Eigen::VectorXd gaps = gap_vs_falpha(small_params(), sweep);
  const double lo = gaps.minCoeff(), hi = gaps.maxCoeff();
  CHECK(lo > 0.0);
  CHECK(hi / lo > 1.5);
  // No level crossing among the lowest two along the sweep.
  for (int i = 0; i < gaps.size(); ++i) REQUIRE(gaps(i) > 1e-9);
}

TEST_CASE("gap_depends_on_falpha_only_through_the_phase") {
  // With f_sigma held fixed, f_alpha and f_alpha + 2 give the same A mod 2pi.
  CircuitParams p = small_params();
  p.f_sigma = 4.0;
  const Eigen::VectorXd gaps = gap_vs_falpha(p, {0.13, 2.13}, /*tie_sigma=*/false);
  CHECK(std::abs(gaps(0) - gaps(1)) <= 1e-9);
}

TEST_CASE("couplings_at_the_optimal_point") {
  const CouplingReport rep = coupling_elements(small_params(0.2, 0.0));
  CHECK(std::abs(rep.g_par) <= 1e-8);
  CHECK(std::abs(rep.current_ground) <= 1e-8);
  CHECK(std::abs(rep.current_excited) <= 1e-8);
  CHECK(rep.g_perp > 1.0);
  // g_perp peaks at f_eps = 0 over a symmetric sweep.
  for (double fe : {0.002, 0.005, 0.01}) {
    CHECK(coupling_elements(small_params(0.2, fe)).g_perp < rep.g_perp);
    CHECK(coupling_elements(small_params(0.2, -fe)).g_perp < rep.g_perp);
  }
}

TEST_CASE("coupling_parity_in_feps") {
  for (double fe : {0.002, 0.006}) {
    const CouplingReport plus = coupling_elements(small_params(0.2, fe));
    const CouplingReport minus = coupling_elements(small_params(0.2, -fe));
    CHECK(plus.g_perp == Approx(minus.g_perp).margin(1e-8));
    CHECK(plus.g_par == Approx(-minus.g_par).margin(1e-8));
    CHECK(plus.current_ground == Approx(-minus.current_ground).margin(1e-8));
    CHECK(plus.current_excited == Approx(-minus.current_excited).margin(1e-8));
  }
}

TEST_CASE("longitudinal_coupling_identity") {
  const CouplingReport rep = coupling_elements(small_params(0.2, 0.004));
  CHECK(rep.g_par ==
        Approx((rep.current_excited - rep.current_ground) / 2.0).margin(1e-10));
}

TEST_CASE("two_level_reduction_at_symmetry_point") {
  const QubitReduction red = two_level_reduction(small_params(0.2, 0.0));
  CHECK(red.eps_bias == 0.0);
  CHECK(red.omega == Approx(red.delta));
  CHECK(red.persistent_current > 0.0);
}

TEST_CASE("two_level_bias_grows_linearly") {
  const QubitReduction base = two_level_reduction(small_params(0.2, 0.0));
  // eps(f_eps) = 2 I_p f_eps: fit the slope over [0, 0.002] and check the
  // two-level form against the measured gaps.
  std::vector<double> fes, epss;
  for (int i = 1; i <= 8; ++i) {
    const double fe = 0.002 * i / 8.0;
    const QubitReduction red = two_level_reduction(small_params(0.2, fe));
    fes.push_back(fe);
    epss.push_back(red.eps_bias);
  }
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < fes.size(); ++i) {
    sxx += fes[i] * fes[i];
    sxy += fes[i] * epss[i];
  }
  const double slope = sxy / sxx;  // = 2 I_p
  double ss_res = 0, ss_tot = 0, mean = 0;
  for (double e : epss) mean += e;
  mean /= epss.size();
  for (size_t i = 0; i < fes.size(); ++i) {
    ss_res += (epss[i] - slope * fes[i]) * (epss[i] - slope * fes[i]);
    ss_tot += (epss[i] - mean) * (epss[i] - mean);
  }
  CHECK(1.0 - ss_res / ss_tot > 0.999);
  CHECK(slope / 2.0 == Approx(base.persistent_current).epsilon(0.01));
  // omega agrees with sqrt(eps^2 + delta^2) within 1% using the fitted eps.
  for (size_t i = 0; i < fes.size(); ++i) {
    const QubitReduction red = two_level_reduction(small_params(0.2, fes[i]));
    const double eps_fit = slope * fes[i];
    CHECK(red.omega ==
          Approx(std::sqrt(eps_fit * eps_fit + base.delta * base.delta)).epsilon(0.01));
  }
}

TEST_CASE("chain_coupling_strength_composition") {
  const CircuitParams p = small_params();
  const double g = coupling_elements(p).g_perp;
  CHECK(chain_coupling_strength(p, p, 1.0) == Approx(g * g));
  CHECK(chain_coupling_strength(p, p, 0.0) == 0.0);
}

TEST_CASE("circuit_feeds_topological_chain_parameters") {
  // Mutual inductances chosen so a/b = 0.1 land the chain in the
  // topological phase with detectable edge modes.
  const CircuitParams p = small_params();
  const double g = coupling_elements(p).g_perp;
  const double m_inter = 1.0 / (g * g);
  const double m_intra = 0.1 * m_inter;
  const ChainSpec spec{7, chain_coupling_strength(p, p, m_intra),
                       chain_coupling_strength(p, p, m_inter), 0.0, 0.0};
  CHECK(spec.inter == Approx(1.0));
  CHECK(spec.intra == Approx(0.1));
  const EdgeModeReport report = find_edge_modes(eigh_tridiagonal(build_ssh(spec)), spec);
  CHECK(report.splitting < 1e-5);
}
