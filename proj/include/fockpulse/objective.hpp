#pragma once

#include "fockpulse/fockspace.hpp"

#include <string>

namespace fockpulse {

// Target moduli plus a 0/1 weight mask selecting which entries the loss
// compares. Unmasked entries of `modulus` are ignored.
struct TargetSpec {
  Eigen::MatrixXd modulus;
  Eigen::MatrixXd mask;

  int dim() const { return static_cast<int>(modulus.rows()); }
  void validate() const;
};

// Swaps |g,n> and |e,n+1>; every entry compared. `n` is local to the window.
TargetSpec swap_target(int cutoff, int n);

// Only the ground->ground quadrant is compared: identity except (g n, g n) = 0,
// so |g,n> must leave the ground manifold and every other |g,m> must stay.
TargetSpec shelving_target(int cutoff, int n);

// Same presets addressed by absolute Fock index within cfg's window.
TargetSpec swap_target(const SystemConfig& cfg, int fock);
TargetSpec shelving_target(const SystemConfig& cfg, int fock);

// Parses "swap(n)" / "shelve(n)"; n is an absolute Fock index.
TargetSpec target_from_preset(const SystemConfig& cfg, const std::string& preset);

// Frobenius norm of mask .* (|U| - modulus). Insensitive to any per-element
// phase of U, global phase included.
double modulus_loss(const OperatorMatrix& u, const TargetSpec& spec);

// Entry n: probability that |g,n> ends anywhere in the excited manifold.
Eigen::VectorXd excitation_profile(const OperatorMatrix& u);

Eigen::MatrixXd modulus_matrix(const OperatorMatrix& u);

}  // namespace fockpulse
