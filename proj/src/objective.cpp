#include "fockpulse/objective.hpp"

#include "fockpulse/error.hpp"

#include <regex>
#include <string>

namespace fockpulse {

void TargetSpec::validate() const {
  if (modulus.rows() != modulus.cols() || mask.rows() != modulus.rows() ||
      mask.cols() != modulus.cols()) {
    throw Error(ErrorCode::shape, "target modulus and mask must be equal square matrices");
  }
  if (modulus.size() > 0 && (modulus.minCoeff() < 0.0 || modulus.maxCoeff() > 1.0)) {
    throw Error(ErrorCode::parameter, "target moduli must lie in [0, 1]");
  }
}

TargetSpec swap_target(int cutoff, int n) {
  if (cutoff < 2) {
    throw Error(ErrorCode::config, "cutoff must be >= 2");
  }
  if (n < 0 || n + 1 >= cutoff) {
    throw Error(ErrorCode::index, "swap target needs 0 <= n and n + 1 < cutoff (n = " +
                                      std::to_string(n) + ", cutoff = " +
                                      std::to_string(cutoff) + ")");
  }
  const int dim = 2 * cutoff;
  const int g = n;
  const int e = cutoff + n + 1;
  TargetSpec spec{Eigen::MatrixXd::Identity(dim, dim), Eigen::MatrixXd::Ones(dim, dim)};
  spec.modulus(g, g) = 0.0;
  spec.modulus(e, e) = 0.0;
  spec.modulus(g, e) = 1.0;
  spec.modulus(e, g) = 1.0;
  return spec;
}

TargetSpec shelving_target(int cutoff, int n) {
  if (cutoff < 2) {
    throw Error(ErrorCode::config, "cutoff must be >= 2");
  }
  if (n < 0 || n >= cutoff) {
    throw Error(ErrorCode::index, "shelving target needs 0 <= n < cutoff (n = " +
                                      std::to_string(n) + ", cutoff = " +
                                      std::to_string(cutoff) + ")");
  }
  const int dim = 2 * cutoff;
  TargetSpec spec{Eigen::MatrixXd::Zero(dim, dim), Eigen::MatrixXd::Zero(dim, dim)};
  spec.modulus.topLeftCorner(cutoff, cutoff).setIdentity();
  spec.modulus(n, n) = 0.0;
  spec.mask.topLeftCorner(cutoff, cutoff).setOnes();
  return spec;
}

namespace {

int local_index(const SystemConfig& cfg, int fock) {
  cfg.validate();
  if (!cfg.contains_fock(fock)) {
    throw Error(ErrorCode::index, "Fock index " + std::to_string(fock) +
                                      " outside retained window [" +
                                      std::to_string(cfg.fock_offset) + ", " +
                                      std::to_string(cfg.max_fock()) + "]");
  }
  return fock - cfg.fock_offset;
}

}  // namespace

TargetSpec swap_target(const SystemConfig& cfg, int fock) {
  return swap_target(cfg.cutoff, local_index(cfg, fock));
}

TargetSpec shelving_target(const SystemConfig& cfg, int fock) {
  return shelving_target(cfg.cutoff, local_index(cfg, fock));
}

TargetSpec target_from_preset(const SystemConfig& cfg, const std::string& preset) {
  static const std::regex pattern(R"(\s*(swap|shelve)\s*\(\s*(\d+)\s*\)\s*)");
  std::smatch m;
  if (!std::regex_match(preset, m, pattern)) {
    throw Error(ErrorCode::config,
                "unknown target preset '" + preset + "' (expected swap(n) or shelve(n))");
  }
  const int n = std::stoi(m[2].str());
  return m[1].str() == "swap" ? swap_target(cfg, n) : shelving_target(cfg, n);
}

double modulus_loss(const OperatorMatrix& u, const TargetSpec& spec) {
  if (u.rows() != spec.modulus.rows() || u.cols() != spec.modulus.cols() ||
      spec.mask.rows() != spec.modulus.rows() || spec.mask.cols() != spec.modulus.cols()) {
    throw Error(ErrorCode::shape, "unitary is " + std::to_string(u.rows()) + "x" +
                                      std::to_string(u.cols()) + ", target is " +
                                      std::to_string(spec.modulus.rows()) + "x" +
                                      std::to_string(spec.modulus.cols()));
  }
  return (spec.mask.array() * (u.cwiseAbs().array() - spec.modulus.array())).matrix().norm();
}

Eigen::VectorXd excitation_profile(const OperatorMatrix& u) {
  if (u.rows() != u.cols() || u.rows() % 2 != 0) {
    throw Error(ErrorCode::shape, "unitary must be square with even dimension");
  }
  const auto n = u.rows() / 2;
  Eigen::VectorXd out = u.bottomLeftCorner(n, n).cwiseAbs2().colwise().sum().transpose();
  return out.cwiseMax(0.0).cwiseMin(1.0);
}

Eigen::MatrixXd modulus_matrix(const OperatorMatrix& u) { return u.cwiseAbs(); }

}  // namespace fockpulse
