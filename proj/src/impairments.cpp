// SPDX-License-Identifier: Apache-2.0
#include "mmfdr/impairments.hpp"

namespace mmfdr {

namespace {

DistortionCov scaled(const RVec& d, double level, DistortionKind kind) {
  if (!(level >= 0.0)) throw InvalidParameter("impairment level must be >= 0");
  if (d.size() > 0 && !(d.minCoeff() >= 0.0)) throw InvalidParameter("negative signal power");
  return {level * d, kind, level};
}

}  // namespace

DistortionCov tx_distortion_cov(const RVec& signal_cov_diag, double nu) {
  return scaled(signal_cov_diag, nu, DistortionKind::kTransmit);
}

DistortionCov rx_distortion_cov(const RVec& received_cov_diag, double mu) {
  return scaled(received_cov_diag, mu, DistortionKind::kReceive);
}

CVec sample_distortion(const DistortionCov& cov, Rng& rng) {
  CVec v(cov.diag.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const cd z = rng.cnormal();
    v(i) = std::sqrt(cov.diag(i)) * z;
  }
  return v;
}

DistortionCov relay_tx_distortion_cov_closed_form(const SystemConfig& cfg) {
  const RVec power = RVec::Constant(cfg.N_T, cfg.sum_E_R() / cfg.N_T);
  return tx_distortion_cov(power, cfg.nu_R);
}

DistortionCov relay_rx_distortion_cov_closed_form(const SystemConfig& cfg) {
  if (!cfg.single_antenna()) throw ModeError("closed-form relay distortion needs N_S = N_D = 1");
  double src = 0.0;
  for (int l = 0; l < cfg.K; ++l) src += cfg.nu_S[l] * cfg.E_S[l] * cfg.beta_SR[l];
  const double ei = cfg.beta_EI * cfg.nu_R * cfg.sum_E_R();
  const double v = cfg.mu_R * src + ei + cfg.mu_R;
  DistortionCov out;
  out.diag = RVec::Constant(cfg.N_R, v);
  out.kind = DistortionKind::kReceive;
  out.level = cfg.mu_R;
  return out;
}

double relay_rho(const SystemConfig& cfg, const CMat& C_EI_tx, const DistortionCov& theta_R_T) {
  return cfg.beta_EI * (C_EI_tx.diagonal().real().array() * theta_R_T.diag.array()).sum() + 1.0;
}

CMat ei_expected_cov(const SystemConfig& cfg, const CMat& C_EI, const CMat& C_EI_tx,
                     const DistortionCov& theta_R_T) {
  const double tr_theta = (C_EI_tx.diagonal().real().array() * theta_R_T.diag.array()).sum();
  double tr_signal;
  if (theta_R_T.level > 0.0) {
    tr_signal = tr_theta / theta_R_T.level;
  } else {
    // relay signal power taken directly, spread evenly over the transmit array
    tr_signal = C_EI_tx.diagonal().real().sum() * cfg.sum_E_R() / C_EI_tx.rows();
  }
  return cfg.beta_EI * (tr_signal + tr_theta) * C_EI;
}

}  // namespace mmfdr
