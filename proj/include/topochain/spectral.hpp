#ifndef TOPOCHAIN_SPECTRAL_HPP
#define TOPOCHAIN_SPECTRAL_HPP

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "topochain/errors.hpp"
#include "topochain/lattice.hpp"

namespace topochain {

using StateVector = Eigen::VectorXcd;
using SparseOperator = Eigen::SparseMatrix<Complex>;

/// Eigen-decomposition of a real symmetric operator. Values ascending,
/// column k of `vectors` pairs with values(k), columns orthonormal.
struct EigenSystem {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Same contract for complex Hermitian input.
struct ComplexEigenSystem {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
};

struct EdgeModeReport {
  int lower_index = -1;          // position of the lower mid-gap state
  int upper_index = -1;          // position of the upper mid-gap state
  double splitting = 0.0;        // E_upper - E_lower
  StateVector left_state;        // support on odd sites in the clean chain
  StateVector right_state;       // support on even sites
  double xi_fit = 0.0;           // localization length fitted on the left state
  double xi_theory = std::numeric_limits<double>::quiet_NaN();  // 1/ln(b/a)
};

struct LocalizationFit {
  double xi = 0.0;
  double r_squared = 0.0;
};

namespace detail {

// Solver-independent sign convention: first non-negligible component positive.
inline void fix_real_sign(Eigen::MatrixXd& vectors) {
  for (int c = 0; c < vectors.cols(); ++c) {
    const double scale = vectors.col(c).cwiseAbs().maxCoeff();
    for (int r = 0; r < vectors.rows(); ++r) {
      if (std::abs(vectors(r, c)) > 1e-12 * scale) {
        if (vectors(r, c) < 0) vectors.col(c) = -vectors.col(c);
        break;
      }
    }
  }
}

}  // namespace detail

/// Diagonalize a real symmetric tridiagonal operator.
inline EigenSystem eigh_tridiagonal(const TridiagonalHamiltonian& h) {
  if (h.size() < 1 || h.offdiag.size() != h.diag.size() - 1)
    throw InvalidSpecError("eigh_tridiagonal: inconsistent tridiagonal storage");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(h.diag, h.offdiag, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw SolverError("eigh_tridiagonal: iteration cap exceeded");
  EigenSystem es{solver.eigenvalues(), solver.eigenvectors()};
  detail::fix_real_sign(es.vectors);
  return es;
}

/// Diagonalize a dense complex Hermitian operator. Non-Hermitian input is
/// rejected rather than symmetrized.
inline ComplexEigenSystem eigh_dense_hermitian(const DenseOperator& m) {
  if (m.rows() != m.cols()) throw InvalidSpecError("eigh_dense_hermitian: matrix not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InvalidSpecError("eigh_dense_hermitian: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
  if (solver.info() != Eigen::Success)
    throw SolverError("eigh_dense_hermitian: iteration cap exceeded");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Expectation values <sigma_n^z> = 2|psi_n|^2 - 1 on every site.
inline Eigen::VectorXd sigma_z_profile(const StateVector& s) {
  Eigen::VectorXd profile(s.size());
  for (int i = 0; i < s.size(); ++i) profile(i) = 2.0 * std::norm(s(i)) - 1.0;
  return profile;
}

/// Inverse participation ratio Sum |psi_n|^4: 1 for a single-site state,
/// 1/(2L) for a uniform superposition.
inline double ipr(const StateVector& s) {
  double sum = 0.0;
  for (int i = 0; i < s.size(); ++i) {
    const double p = std::norm(s(i));
    sum += p * p;
  }
  return sum;
}

/// Least-squares decay fit of an edge state. Amplitudes on the odd sites
/// are regressed as ln|a_j| against the unit-cell index (j-1)/2, so the
/// returned xi satisfies |a_j| ~ exp(-((j-1)/2)/xi). The even sites are
/// skipped: chiral symmetry forces zeros there and they would wreck the
/// regression.
inline LocalizationFit localization_length_fit(const StateVector& s) {
  std::vector<double> x, y;
  for (int j = 1; j <= s.size(); j += 2) {
    const double amp = std::abs(s(j - 1));
    if (amp > 1e-14) {
      x.push_back((j - 1) / 2.0);
      y.push_back(std::log(amp));
    }
  }
  if (x.size() < 3)
    throw InsufficientSupportError(
        "localization_length_fit: need nonzero amplitude on at least 3 odd sites");
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    ss_res += r * r;
    const double d = y[i] - sy / n;
    ss_tot += d * d;
  }
  LocalizationFit fit;
  fit.xi = -1.0 / slope;
  fit.r_squared = (ss_tot > 0) ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

/// Select the mid-gap doublet |E - omega_shift| < gap_tol and build the
/// edge states as the combinations of the pair maximizing the weight on
/// site 1 (left) and its orthogonal partner (right). For the open chain
/// the pair is symmetric/antisymmetric and this reduces to
/// (psi_+ +/- psi_-)/sqrt(2); at exact degeneracy, where the solver basis
/// is arbitrary, the same rotation still lands on the one-sided states.
/// Exactly two states must lie strictly inside the window; anything else
/// fails loudly (trivial phase, or gap_tol straddling the band edge).
inline EdgeModeReport find_edge_modes(const EigenSystem& es, double omega_shift,
                                      double gap_tol) {
  if (!(gap_tol > 0.0)) throw InvalidSpecError("find_edge_modes: gap_tol must be > 0");
  std::vector<int> inside;
  for (int k = 0; k < es.values.size(); ++k)
    if (std::abs(es.values(k) - omega_shift) < gap_tol) inside.push_back(k);
  if (inside.size() != 2)
    throw NoEdgeModeError("find_edge_modes: expected exactly two mid-gap states, found " +
                          std::to_string(inside.size()));

  EdgeModeReport report;
  report.lower_index = inside[0];
  report.upper_index = inside[1];
  report.splitting = es.values(inside[1]) - es.values(inside[0]);

  const Eigen::VectorXd lower = es.vectors.col(inside[0]);
  const Eigen::VectorXd upper = es.vectors.col(inside[1]);
  const double c_lower = lower(0);
  const double c_upper = upper(0);
  const double weight = std::hypot(c_lower, c_upper);
  if (weight < 1e-12)
    throw NoEdgeModeError("find_edge_modes: mid-gap pair carries no weight on site 1");
  Eigen::VectorXd left = (c_lower * lower + c_upper * upper) / weight;
  Eigen::VectorXd right = (-c_upper * lower + c_lower * upper) / weight;
  if (right(right.size() - 1) < 0) right = -right;
  report.left_state = left.cast<Complex>();
  report.right_state = right.cast<Complex>();
  try {
    report.xi_fit = localization_length_fit(report.left_state).xi;
  } catch (const InsufficientSupportError&) {
    // Fully dimerized limit: the state sits on one site, no decay to fit.
    report.xi_fit = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

/// Convenience overload using the chain parameters: gap_tol defaults to
/// half the bulk-gap estimate |inter - intra| and xi_theory = 1/ln(b/a)
/// is filled in for the topological side a < b.
inline EdgeModeReport find_edge_modes(const EigenSystem& es, const ChainSpec& spec) {
  const double gap_tol = 0.5 * std::abs(spec.inter - spec.intra);
  EdgeModeReport report = find_edge_modes(es, spec.omega, gap_tol);
  if (spec.intra > 0.0 && spec.intra < spec.inter)
    report.xi_theory = 1.0 / std::log(spec.inter / spec.intra);
  return report;
}

// ---------------------------------------------------------------------------
// Lowest-k eigenpairs of a large sparse Hermitian operator.
//
// Shift-invert Lanczos: factor (H - sigma I) once with sigma below the
// spectrum (Gershgorin bound), run Lanczos on the inverse through sparse
// solves with full reorthogonalization, and accept Ritz pairs only after
// their residuals check out in the original operator. Small problems and
// any non-converged case fall back to dense diagonalization, so the fast
// path can never change the answer, only the runtime.
// ---------------------------------------------------------------------------

inline ComplexEigenSystem lowest_eigenpairs(const SparseOperator& matrix, int k,
                                            double tol = 1e-9) {
  const int n = static_cast<int>(matrix.rows());
  if (matrix.cols() != n) throw InvalidSpecError("lowest_eigenpairs: matrix not square");
  if (k < 1 || k > n) throw InvalidSpecError("lowest_eigenpairs: bad pair count");

  const auto dense_path = [&]() {
    ComplexEigenSystem full = eigh_dense_hermitian(DenseOperator(matrix));
    return ComplexEigenSystem{full.values.head(k), full.vectors.leftCols(k)};
  };
  if (n <= 600) return dense_path();

  // Gershgorin lower bound, then a safety margin.
  double lower = std::numeric_limits<double>::max();
  double spread = 1.0;
  for (int col = 0; col < n; ++col) {
    double center = 0.0, radius = 0.0;
    for (SparseOperator::InnerIterator it(matrix, col); it; ++it) {
      if (it.row() == col)
        center = it.value().real();
      else
        radius += std::abs(it.value());
    }
    lower = std::min(lower, center - radius);
    spread = std::max(spread, std::abs(center) + radius);
  }
  const double sigma = lower - 1e-3 * spread;

  SparseOperator shifted = matrix;
  {
    SparseOperator identity(n, n);
    identity.setIdentity();
    shifted -= Complex(sigma) * identity;
  }
  Eigen::SimplicialLDLT<SparseOperator> factor(shifted);
  if (factor.info() != Eigen::Success) return dense_path();

  // Deterministic pseudo-random start vector.
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  const auto random_unit = [&]() {
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) {
      const double re = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
      const double im = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
      v(i) = Complex(re, im);
    }
    v.normalize();
    return v;
  };

  const int max_dim = std::min(n, std::max(4 * k + 40, 80));
  Eigen::MatrixXcd basis(n, max_dim);
  std::vector<double> alpha, beta;  // Lanczos tridiagonal of the inverse operator
  basis.col(0) = random_unit();

  int m = 0;
  while (m < max_dim) {
    Eigen::VectorXcd w = factor.solve(basis.col(m));
    const double a = (basis.col(m).adjoint() * w).value().real();
    alpha.push_back(a);
    w -= a * basis.col(m);
    if (m > 0) w -= beta[m - 1] * basis.col(m - 1);
    // Full reorthogonalization, two passes.
    for (int pass = 0; pass < 2; ++pass)
      w -= basis.leftCols(m + 1) * (basis.leftCols(m + 1).adjoint() * w);
    double b = w.norm();
    ++m;

    if (m < max_dim) {
      if (b < 1e-12) {
        // Invariant subspace hit: restart with a fresh orthogonal direction.
        b = 0.0;
        Eigen::VectorXcd fresh = random_unit();
        for (int pass = 0; pass < 2; ++pass)
          fresh -= basis.leftCols(m) * (basis.leftCols(m).adjoint() * fresh);
        basis.col(m) = fresh.normalized();
      } else {
        basis.col(m) = w / b;
      }
      beta.push_back(b);
    }

    if (m >= k + 2 && (m % 5 == 0 || m == max_dim)) {
      // Ritz pairs of the inverse operator; largest map to the lowest of H.
      Eigen::Map<const Eigen::VectorXd> ad(alpha.data(), m);
      Eigen::VectorXd bd(m - 1);
      for (int i = 0; i + 1 < m; ++i) bd(i) = beta[i];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small;
      small.computeFromTridiagonal(ad, bd);
      if (small.info() != Eigen::Success) break;

      Eigen::MatrixXcd ritz(n, k);
      Eigen::VectorXd values(k);
      bool ok = true;
      for (int i = 0; i < k; ++i) {
        const int col = m - 1 - i;  // descending theta = ascending lambda
        Eigen::VectorXcd x = basis.leftCols(m) * small.eigenvectors().col(col);
        x.normalize();
        const Eigen::VectorXcd hx = matrix * x;
        const double lambda = (x.adjoint() * hx).value().real();
        const double resid = (hx - lambda * x).norm();
        if (resid > tol * std::max(1.0, std::abs(lambda))) {
          ok = false;
          break;
        }
        values(i) = lambda;
        ritz.col(i) = x;
      }
      if (ok) {
        // Ascending order.
        std::vector<int> order(k);
        for (int i = 0; i < k; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](int a_, int b_) { return values(a_) < values(b_); });
        ComplexEigenSystem result;
        result.values.resize(k);
        result.vectors.resize(n, k);
        for (int i = 0; i < k; ++i) {
          result.values(i) = values(order[i]);
          result.vectors.col(i) = ritz.col(order[i]);
        }
        return result;
      }
    }
  }
  return dense_path();
}

}  // namespace topochain

#endif
