#include "fockpulse/fockspace.hpp"

#include "fockpulse/error.hpp"
#include "fockpulse/pulses.hpp"

#include <cmath>
#include <string>

namespace fockpulse {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::config: return "config";
    case ErrorCode::parameter: return "parameter";
    case ErrorCode::index: return "index";
    case ErrorCode::shape: return "shape";
    case ErrorCode::contract: return "contract";
    case ErrorCode::layout: return "layout";
    case ErrorCode::numerical: return "numerical";
    case ErrorCode::ill_conditioned: return "ill_conditioned";
    case ErrorCode::io: return "io";
    case ErrorCode::optimization: return "optimization";
  }
  return "unknown";
}

void SystemConfig::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw Error(ErrorCode::config, "eta must be positive, got " + std::to_string(eta));
  }
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw Error(ErrorCode::config, "nu must be positive, got " + std::to_string(nu));
  }
  if (!(hbar > 0.0) || !std::isfinite(hbar)) {
    throw Error(ErrorCode::config, "hbar must be positive, got " + std::to_string(hbar));
  }
  if (cutoff < 2) {
    throw Error(ErrorCode::config, "cutoff must be >= 2, got " + std::to_string(cutoff));
  }
  if (fock_offset < 0) {
    throw Error(ErrorCode::config,
                "fock_offset must be >= 0, got " + std::to_string(fock_offset));
  }
}

LadderOperators ladder_operators(const SystemConfig& cfg) {
  cfg.validate();
  const int n = cfg.cutoff;
  OperatorMatrix a = OperatorMatrix::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    a(k - 1, k) = std::sqrt(static_cast<double>(cfg.fock_offset + k));
  }
  return {a.adjoint(), a};
}

namespace {

// Real symmetric position-like operator eta * (a^dag + a).
Eigen::MatrixXd scaled_position(const SystemConfig& cfg) {
  const int n = cfg.cutoff;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double v = cfg.eta * std::sqrt(static_cast<double>(cfg.fock_offset + k));
    x(k - 1, k) = v;
    x(k, k - 1) = v;
  }
  return x;
}

void require_finite(const PulseParams& p) {
  if (!std::isfinite(p.delta) || !std::isfinite(p.omega) || !std::isfinite(p.phi) ||
      !std::isfinite(p.t)) {
    throw Error(ErrorCode::parameter, "pulse parameters must be finite");
  }
}

}  // namespace

OperatorMatrix displacement_exponential(const SystemConfig& cfg, int sign) {
  cfg.validate();
  if (sign != 1 && sign != -1) {
    throw Error(ErrorCode::parameter, "sign must be +1 or -1");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scaled_position(cfg));
  const Eigen::VectorXcd phases =
      (es.eigenvalues().cast<Complex>() * Complex(0.0, -static_cast<double>(sign)))
          .array()
          .exp();
  const Eigen::MatrixXcd v = es.eigenvectors().cast<Complex>();
  return v * phases.asDiagonal() * v.transpose();
}

OperatorMatrix build_hamiltonian(const SystemConfig& cfg, const PulseParams& p) {
  cfg.validate();
  return build_hamiltonian(cfg, p, displacement_exponential(cfg, 1));
}

OperatorMatrix build_hamiltonian(const SystemConfig& cfg, const PulseParams& p,
                                 const OperatorMatrix& displacement) {
  require_finite(p);
  if (displacement.rows() != cfg.cutoff || displacement.cols() != cfg.cutoff) {
    throw Error(ErrorCode::shape, "displacement operator does not match the cutoff");
  }
  const int n = cfg.cutoff;
  OperatorMatrix h = OperatorMatrix::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    const double phonons = cfg.nu * static_cast<double>(cfg.fock_offset + k);
    h(k, k) = phonons;
    h(n + k, n + k) = phonons - p.delta;
  }
  const OperatorMatrix coupling =
      (0.5 * p.omega) * std::polar(1.0, p.phi) * displacement;
  h.bottomLeftCorner(n, n) = coupling;
  h.topRightCorner(n, n) = coupling.adjoint();
  return h;
}

OperatorMatrix HermitianSpectrum::evolve(double t) const {
  const Eigen::VectorXcd phases =
      (values.cast<Complex>() * Complex(0.0, -t)).array().exp();
  return vectors * phases.asDiagonal() * vectors.adjoint();
}

HermitianSpectrum hermitian_spectrum(const OperatorMatrix& h) {
  if (h.rows() != h.cols()) {
    throw Error(ErrorCode::shape, "Hamiltonian must be square");
  }
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if (max_hermitian_defect(h) > 1e-12 * scale) {
    throw Error(ErrorCode::contract, "matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(h);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::numerical, "Hermitian eigendecomposition failed");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

OperatorMatrix propagate(const OperatorMatrix& h, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::parameter, "duration must be finite and >= 0");
  }
  return hermitian_spectrum(h).evolve(t);
}

OperatorMatrix ideal_bsb_propagator(const SystemConfig& cfg, double theta, double phi) {
  const auto ops = ladder_operators(cfg);
  const int n = cfg.cutoff;
  // Generator G = e^{i phi} sigma+ a^dag + h.c.; U = exp(i theta/2 G) = exp(-i G (-theta/2)).
  OperatorMatrix g = OperatorMatrix::Zero(2 * n, 2 * n);
  const OperatorMatrix raise = std::polar(1.0, phi) * ops.creation;
  g.bottomLeftCorner(n, n) = raise;
  g.topRightCorner(n, n) = raise.adjoint();
  const auto spec = hermitian_spectrum(g);
  const Eigen::VectorXcd phases =
      (spec.values.cast<Complex>() * Complex(0.0, 0.5 * theta)).array().exp();
  return spec.vectors * phases.asDiagonal() * spec.vectors.adjoint();
}

double max_hermitian_defect(const OperatorMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double max_unitarity_defect(const OperatorMatrix& u) {
  const auto n = u.rows();
  return (u.adjoint() * u - OperatorMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

}  // namespace fockpulse
