#ifndef TOPOCHAIN_LATTICE_HPP
#define TOPOCHAIN_LATTICE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>

#include "topochain/errors.hpp"
#include "topochain/random.hpp"

namespace topochain {

using Complex = std::complex<double>;
using DenseOperator = Eigen::MatrixXcd;

/// Parameters of a dimerized qubit chain with 2*cells sites.
///
/// Site indices are 1-based: odd sites are the A sublattice, even sites B.
/// Bond j connects sites j and j+1; odd bonds carry `intra`, even bonds
/// `inter`. `inter` is the reference energy unit (default 1) and all times
/// are measured in its inverse.
struct ChainSpec {
  int cells = 1;        // number of unit cells L; the chain has 2L sites
  double intra = 0.0;   // intracell coupling (odd bonds)
  double inter = 1.0;   // intercell coupling (even bonds), energy unit
  double omega = 0.0;   // uniform on-site frequency
  double stagger = 0.0; // staggered potential: +stagger on odd, -stagger on even sites

  int sites() const { return 2 * cells; }

  // Full contract: inter is the positive reference energy. Run
  // configurations go through this.
  void validate() const {
    validate_buildable();
    if (!(inter > 0.0)) throw InvalidSpecError("ChainSpec: intercell coupling must be > 0");
  }

  // Builder contract: inter = 0 is admitted so the fully dimerized limit
  // and the oracle parameter grid stay constructible.
  void validate_buildable() const {
    if (cells < 1) throw InvalidSpecError("ChainSpec: cells must be >= 1");
    if (inter < 0.0) throw InvalidSpecError("ChainSpec: intercell coupling must be >= 0");
    if (intra < 0.0) throw InvalidSpecError("ChainSpec: intracell coupling must be >= 0");
    if (!std::isfinite(intra) || !std::isfinite(inter) || !std::isfinite(omega) ||
        !std::isfinite(stagger))
      throw InvalidSpecError("ChainSpec: parameters must be finite");
  }
};

/// Real symmetric tridiagonal operator on the single-excitation subspace.
struct TridiagonalHamiltonian {
  Eigen::VectorXd diag;     // 2L on-site energies
  Eigen::VectorXd offdiag;  // 2L-1 bond couplings, stored once

  int size() const { return static_cast<int>(diag.size()); }

  Eigen::MatrixXd dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size(), size());
    for (int i = 0; i < size(); ++i) m(i, i) = diag(i);
    for (int i = 0; i + 1 < size(); ++i) m(i, i + 1) = m(i + 1, i) = offdiag(i);
    return m;
  }

  // y = H x without forming the dense matrix.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const {
    const int n = size();
    Eigen::VectorXcd y(n);
    for (int i = 0; i < n; ++i) {
      Complex v = diag(i) * x(i);
      if (i > 0) v += offdiag(i - 1) * x(i - 1);
      if (i + 1 < n) v += offdiag(i) * x(i + 1);
      y(i) = v;
    }
    return y;
  }
};

/// Gaussian quenched-disorder settings. A fixed seed reproduces the same
/// perturbed Hamiltonian bit for bit.
struct DisorderSpec {
  double coupling_sigma = 0.0;   // stddev added to every bond
  double frequency_sigma = 0.0;  // stddev added to every on-site energy
  std::uint64_t seed = 0;

  void validate() const {
    if (coupling_sigma < 0.0 || frequency_sigma < 0.0)
      throw InvalidSpecError("DisorderSpec: sigma values must be >= 0");
  }
};

/// Pure SSH chain: uniform diagonal omega, bonds alternating intra, inter,
/// ..., intra. There are L intra bonds and L-1 inter bonds.
inline TridiagonalHamiltonian build_ssh(const ChainSpec& spec) {
  spec.validate_buildable();
  if (spec.stagger != 0.0)
    throw InvalidSpecError("build_ssh: staggered potential must be 0 (use build_rice_mele)");
  const int n = spec.sites();
  TridiagonalHamiltonian h;
  h.diag = Eigen::VectorXd::Constant(n, spec.omega);
  h.offdiag.resize(n - 1);
  for (int i = 0; i + 1 < n; ++i) h.offdiag(i) = (i % 2 == 0) ? spec.intra : spec.inter;
  return h;
}

/// Rice-Mele chain: SSH bonds plus staggered diagonal omega +/- stagger.
inline TridiagonalHamiltonian build_rice_mele(const ChainSpec& spec) {
  spec.validate_buildable();
  const int n = spec.sites();
  TridiagonalHamiltonian h;
  h.diag.resize(n);
  for (int i = 0; i < n; ++i)
    h.diag(i) = spec.omega + ((i % 2 == 0) ? spec.stagger : -spec.stagger);
  h.offdiag.resize(n - 1);
  for (int i = 0; i + 1 < n; ++i) h.offdiag(i) = (i % 2 == 0) ? spec.intra : spec.inter;
  return h;
}

/// Harper-style chain: uniform coupling, cosine-modulated on-site energies
/// omega*cos(2*pi*j*modulation + phase) with 1-based site index j.
inline TridiagonalHamiltonian build_aah(int sites, double coupling, double omega,
                                        double modulation, double phase) {
  if (sites < 2) throw InvalidSpecError("build_aah: need at least 2 sites");
  if (!(coupling > 0.0)) throw InvalidSpecError("build_aah: coupling must be > 0");
  if (!std::isfinite(omega) || !std::isfinite(modulation) || !std::isfinite(phase))
    throw InvalidSpecError("build_aah: parameters must be finite");
  TridiagonalHamiltonian h;
  h.diag.resize(sites);
  for (int j = 1; j <= sites; ++j)
    h.diag(j - 1) = omega * std::cos(2.0 * M_PI * j * modulation + phase);
  h.offdiag = Eigen::VectorXd::Constant(sites - 1, coupling);
  return h;
}

/// One Gaussian draw per matrix entry: first all 2L diagonal entries
/// (frequency_sigma), then all 2L-1 bonds (coupling_sigma). This order is
/// shared with the pump runner so a seed means the same frozen disorder
/// everywhere.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> draw_disorder(int sites,
                                                                 const DisorderSpec& d) {
  d.validate();
  GaussianSampler gauss(d.seed);
  Eigen::VectorXd diag_noise(sites), bond_noise(sites - 1);
  for (int i = 0; i < sites; ++i) diag_noise(i) = d.frequency_sigma * gauss.standard();
  for (int i = 0; i + 1 < sites; ++i) bond_noise(i) = d.coupling_sigma * gauss.standard();
  return {std::move(diag_noise), std::move(bond_noise)};
}

inline TridiagonalHamiltonian apply_disorder(const TridiagonalHamiltonian& h,
                                             const DisorderSpec& d) {
  auto [diag_noise, bond_noise] = draw_disorder(h.size(), d);
  TridiagonalHamiltonian out;
  out.diag = h.diag + diag_noise;
  out.offdiag = h.offdiag + bond_noise;
  return out;
}

// ---------------------------------------------------------------------------
// Full-Hilbert-space oracles. Exponential in the chain length, test use only.
// ---------------------------------------------------------------------------

constexpr int kOracleMaxSites = 12;

/// Basis index of |e_j>: the computational state with only site j excited.
inline int excitation_basis_index(int site) { return 1 << (site - 1); }

/// Full 2^(2L)-dimensional chain Hamiltonian with sigma^+ sigma^- hopping
/// and (omega +/- u)/2 (sigma^z + 1) on-site terms. Its single-excitation
/// block reproduces the tridiagonal builders entrywise.
inline DenseOperator build_full_chain(const ChainSpec& spec) {
  spec.validate_buildable();
  const int n = spec.sites();
  if (n > kOracleMaxSites)
    throw SizeLimitError("build_full_chain: oracle limited to 12 sites");
  const int dim = 1 << n;
  DenseOperator h = DenseOperator::Zero(dim, dim);
  for (int state = 0; state < dim; ++state) {
    double onsite = 0.0;
    for (int site = 1; site <= n; ++site) {
      if (state & excitation_basis_index(site))
        onsite += spec.omega + ((site % 2 == 1) ? spec.stagger : -spec.stagger);
    }
    h(state, state) = onsite;
    for (int bond = 1; bond < n; ++bond) {
      const double coupling = (bond % 2 == 1) ? spec.intra : spec.inter;
      const int lo = excitation_basis_index(bond);
      const int hi = excitation_basis_index(bond + 1);
      // sigma^+_j sigma^-_{j+1} + h.c. moves the excitation across the bond.
      if ((state & lo) && !(state & hi)) {
        const int flipped = (state & ~lo) | hi;
        h(flipped, state) += coupling;
        h(state, flipped) += coupling;
      }
    }
  }
  return h;
}

/// Diagonal operator counting excited sites, Sum_j (sigma_j^z + 1)/2.
inline DenseOperator excitation_number_operator(int cells) {
  if (cells < 1) throw InvalidSpecError("excitation_number_operator: cells must be >= 1");
  const int n = 2 * cells;
  if (n > kOracleMaxSites)
    throw SizeLimitError("excitation_number_operator: oracle limited to 12 sites");
  const int dim = 1 << n;
  DenseOperator op = DenseOperator::Zero(dim, dim);
  for (int state = 0; state < dim; ++state)
    op(state, state) = static_cast<double>(__builtin_popcount(static_cast<unsigned>(state)));
  return op;
}

/// Single-excitation block of a full-chain operator, in the |e_1>..|e_2L>
/// basis order.
inline DenseOperator single_excitation_block(const DenseOperator& full, int sites) {
  DenseOperator block(sites, sites);
  for (int i = 1; i <= sites; ++i)
    for (int j = 1; j <= sites; ++j)
      block(i - 1, j - 1) = full(excitation_basis_index(i), excitation_basis_index(j));
  return block;
}

}  // namespace topochain

#endif
