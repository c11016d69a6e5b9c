#ifndef TOPOCHAIN_ERRORS_HPP
#define TOPOCHAIN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace topochain {

// Invalid model parameters, chain specs, or run configuration values.
struct InvalidSpecError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Full-Hilbert-space oracles are restricted to small chains.
struct SizeLimitError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numerical failure inside a diagonalization backend. Never silent.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoEdgeModeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientSupportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Norm drift exceeded the stepper tolerance; caller should halve dt.
struct StepSizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BranchTrackingError : std::runtime_error {
  BranchTrackingError(const std::string& what, int sample)
      : std::runtime_error(what), sample_index(sample) {}
  int sample_index;
};

struct DegenerateLevelsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two-level reduction found omega < delta beyond tolerance.
struct InconsistentDoubletError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingStatesError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NeverCrossedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Configuration / CLI front-end errors (exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace topochain

#endif
