// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mmfdr/model.hpp"

namespace mmfdr {

enum class DistortionKind { kTransmit, kReceive };

struct DistortionCov {
  RVec diag;
  DistortionKind kind = DistortionKind::kTransmit;
  double level = 0.0;
};

DistortionCov tx_distortion_cov(const RVec& signal_cov_diag, double nu);
DistortionCov rx_distortion_cov(const RVec& received_cov_diag, double mu);

CVec sample_distortion(const DistortionCov& cov, Rng& rng);

// relay transmit distortion with the relay power spread evenly over the N_T antennas,
// so that Tr(C~_EI Theta) = nu_R * sum_k E_R[k] for any unit-diagonal C~_EI
DistortionCov relay_tx_distortion_cov_closed_form(const SystemConfig& cfg);

// single-antenna relay receive distortion, returned as an N_R diagonal
DistortionCov relay_rx_distortion_cov_closed_form(const SystemConfig& cfg);

// rho = beta_EI Tr(C~_EI Theta_R^T) + 1
double relay_rho(const SystemConfig& cfg, const CMat& C_EI_tx, const DistortionCov& theta_R_T);

// E[H_EI Omega_R H_EI^H] for Omega_R = relay signal covariance + Theta_R^T
CMat ei_expected_cov(const SystemConfig& cfg, const CMat& C_EI, const CMat& C_EI_tx,
                     const DistortionCov& theta_R_T);

}  // namespace mmfdr
