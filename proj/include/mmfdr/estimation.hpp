// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "mmfdr/transceiver.hpp"

namespace mmfdr {

enum class Side { kSR, kRD };

// C_eff = beta * lambda1 * P^H C_rx P
CMat effective_cov(double beta, const CMat& C_rx, double lambda1, const CMat& P);
CMat effective_cov(double beta, const CorrelationMatrix& C_rx, const CorrelationMatrix& C_tx,
                   const CMat& P, const CVec& p);

// white part of the training noise after despreading
double training_noise(double beta, double lambda1, double nu, double mu_R, double E_T, int tau);

CMat lmmse_gain(const CMat& C_eff, double beta, double lambda1, double nu, double mu_R, double E_T,
                int tau);
CMat lmmse_gain(const SystemConfig& cfg, const CMat& C_eff, Side side, int k, double lambda1);

// despread reduced-dimension pilot observation z~ = P^H Z phi^* / (tau E_T)
CVec simulate_pilot_rx(const CMat& H, const CMat& P, const CVec& p, double nu_tx, double mu_rx,
                       double E_T, int tau, Rng& rng);

inline CVec lmmse_estimate(const CVec& z_tilde, const CMat& C_eff, const CMat& Gamma) {
  return C_eff * (Gamma * z_tilde);
}

// second-order statistics of one effective link for a fixed outer beamformer
struct LinkStats {
  CMat C_rx_eff;  // P^H C_rx P
  CMat C_eff;     // beta lambda1 P^H C_rx P
  CMat Gamma;
  CMat M;         // C_eff Gamma
  CMat C_hat;  // C_eff Gamma C_eff
  CMat C_tx;   // node-side correlation
  CVec p;
  RVec diag_PChatP;  // diag(P C_hat P^H), relay-array length
  double lambda1 = 0, beta = 0, nu = 0, sigma2 = 0;
  double tr_eff = 0, tr_hat = 0, tr_hat2 = 0, tr_hat_eff = 0, tr_err = 0, s2 = 0;
  double pdp = 0;          // sum |p_i|^4
  double tr_cdcd = 0;      // Tr(C~ D C~ D), D = diag|p|^2
  double tr_cpdcpd = 0;    // same with C~ - lambda1 p p^H
  double diag4 = 0;        // sum_i |[beta lambda1 P M P^H C]_ii|^2
  double delta_printed = 0, delta_refined = 0, var_t = 0;
};

LinkStats make_link_stats(double beta, const CMat& C_rx, const CMat& C_tx, const HermitianEig& tx_eig,
                          const CMat& P, double nu, double mu_R, double E_T, int tau);

struct HiaStatistics {
  int A_R = 0, A_T = 0;
  CMat P_R, P_T;
  std::vector<CVec> p_S, p_D;
  std::vector<LinkStats> sr, rd;
  CMat ei_rx_eff;  // P_R^H C_EI P_R
  CMat ei_tx_eff;  // P_T^H C~_EI P_T
};

HiaStatistics prepare_hia(const SystemConfig& cfg, const ChannelStats& stats, int A_R, int A_T);

enum class DeltaForm { kPrinted, kRefined };

double delta_term(const LinkStats& link, DeltaForm form = DeltaForm::kPrinted);
double delta_term(const SystemConfig& cfg, Side side, int k, const HiaStatistics& hia,
                  DeltaForm form = DeltaForm::kPrinted);

struct EstimateSet {
  std::vector<CVec> h_hat_SR, h_hat_RD;
  std::vector<CVec> h_SR, h_RD;  // true effective channels of the same trial
};

EstimateSet estimate_effective_channels(const SystemConfig& cfg, const HiaStatistics& hia,
                                        const ChannelSet& ch, Rng& rng);

struct DofScalingReport {
  std::vector<double> sr_ratio, rd_ratio;  // Tr(C_eff)/N
  std::vector<bool> sr_flag, rd_flag;
  double threshold = 0.05;
  bool any_flagged() const;
};

DofScalingReport check_dof_scaling(const SystemConfig& cfg, const ChannelStats& stats, int A_R,
                                   int A_T, double threshold = 0.05);

}  // namespace mmfdr
