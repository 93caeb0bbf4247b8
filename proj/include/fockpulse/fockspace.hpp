#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>

namespace fockpulse {

using Complex = std::complex<double>;
using OperatorMatrix = Eigen::MatrixXcd;

// Trap and laser constants plus the retained slice of the Fock ladder.
//
// All quantities are dimensionless with the trap frequency normalised to 1;
// one time unit is 1/(2*pi*1 MHz) ~= 0.1592 us. The retained Fock levels are
// fock_offset, ..., fock_offset + cutoff - 1. A non-zero offset gives a
// shifted window used when designing pulses for high Fock states.
struct SystemConfig {
  double eta = 0.084;
  double nu = 1.0;
  double hbar = 1.0;
  int cutoff = 4;
  int fock_offset = 0;

  // Throws Error(config) when a field is out of range.
  void validate() const;

  int dim() const { return 2 * cutoff; }
  int max_fock() const { return fock_offset + cutoff - 1; }
  bool contains_fock(int n) const { return n >= fock_offset && n <= max_fock(); }
};

// One microsecond expressed in dimensionless time (nu = 2*pi*1 MHz -> 1).
inline constexpr double kTimeUnitsPerMicrosecond = 6.283185307179586;

enum class Internal { ground, excited };

// Basis label. The flat index places the ground block first, then the
// excited block; `fock` is local to the retained window.
struct BasisIndex {
  Internal internal = Internal::ground;
  int fock = 0;

  int flat(int cutoff) const {
    return internal == Internal::ground ? fock : cutoff + fock;
  }
};

struct LadderOperators {
  OperatorMatrix creation;
  OperatorMatrix annihilation;
};

LadderOperators ladder_operators(const SystemConfig& cfg);

// exp(sign * (-i) * eta * (a^dag + a)) on the truncated Fock space.
OperatorMatrix displacement_exponential(const SystemConfig& cfg, int sign);

struct PulseParams;

// H = -delta |e><e| + nu a^dag a
//     + (omega/2) (e^{i phi} |e><g| exp(-i eta (a^dag + a)) + h.c.)
OperatorMatrix build_hamiltonian(const SystemConfig& cfg, const PulseParams& p);

// Same, reusing a precomputed displacement_exponential(cfg, +1).
OperatorMatrix build_hamiltonian(const SystemConfig& cfg, const PulseParams& p,
                                 const OperatorMatrix& displacement);

// Eigenpairs of a Hermitian matrix, kept so that exp(-iHt) can be formed for
// many t without refactoring H.
struct HermitianSpectrum {
  Eigen::VectorXd values;
  OperatorMatrix vectors;

  OperatorMatrix evolve(double t) const;
};

HermitianSpectrum hermitian_spectrum(const OperatorMatrix& h);

// exp(-iHt). Throws Error(contract) if H is not Hermitian.
OperatorMatrix propagate(const OperatorMatrix& h, double t);

// exp(i theta/2 (e^{i phi} sigma+ a^dag + e^{-i phi} sigma- a)): the ideal
// blue-sideband rotation used as an analytic baseline.
OperatorMatrix ideal_bsb_propagator(const SystemConfig& cfg, double theta, double phi);

double max_hermitian_defect(const OperatorMatrix& m);
double max_unitarity_defect(const OperatorMatrix& u);

}  // namespace fockpulse
