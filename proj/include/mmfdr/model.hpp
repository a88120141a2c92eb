// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "mmfdr/common.hpp"

namespace mmfdr {

struct SystemConfig {
  int K = 1;
  int N_S = 1, N_D = 1, N_R = 64, N_T = 64;
  int T = 300;
  int tau = 2;

  std::vector<double> E_S, E_S_max, E_R;
  double E_R_max = 0.0;
  double E_T = 10.0;

  std::vector<double> nu_S, nu_D, mu_D;
  double nu_R = 0.0, mu_R = 0.0;

  std::vector<double> beta_SR, beta_RD;
  double beta_EI = 1.0;

  std::vector<cd> r_SR, r_RD;
  cd r_EI = 0.0;

  // K pairs, every per-pair vector filled with the same value
  static SystemConfig uniform(int K, int N_S, int N_D, int N_R, int N_T);

  // resize per-pair vectors to K, repeating the first entry (or a default)
  void broadcast();
  void validate() const;
  bool homogeneous() const;
  bool single_antenna() const { return N_S == 1 && N_D == 1; }
  double prefactor() const { return double(T - 2 * K * tau) / double(T); }
  double sum_E_R() const;

  // set every per-pair entry of a vector-valued parameter
  void set_all_E_S(double v);
  void set_all_E_R(double v);
  void set_all_nu_S(double v);
  void set_all_nu_D(double v);
  void set_all_mu_D(double v);
  void set_all_beta_SR(double v);
  void set_all_beta_RD(double v);

  bool operator==(const SystemConfig&) const = default;
};

// draws r_SR, r_RD, r_EI with fixed magnitudes and phases uniform on [0, pi]
void assign_random_phases(SystemConfig& cfg, double r0, double r_ei_abs, std::uint64_t seed);

struct CorrelationMatrix {
  CMat C;
  bool rank_deficient = false;

  Eigen::Index n() const { return C.rows(); }
  // throws InvalidParameter / NotPsdError when an invariant fails
  void check() const;
};

CorrelationMatrix build_exponential_correlation(int n, cd r);

struct HermitianEig {
  RVec values;   // descending
  CMat vectors;  // columns match values, largest-magnitude entry real positive
};

HermitianEig hermitian_eig(const CMat& C);
void normalize_phase(CVec& v);

CMat hermitian_sqrt(const CMat& C);
inline CMat hermitian_sqrt(const CorrelationMatrix& C) { return hermitian_sqrt(C.C); }

// receive/transmit correlation of one link with cached square roots
struct LinkCorrelation {
  CorrelationMatrix rx, tx;
  CMat rx_sqrt, tx_sqrt;
  bool rx_identity = false, tx_identity = false;
};

LinkCorrelation make_link(int n_rx, int n_tx, cd r);

struct ChannelStats {
  std::vector<LinkCorrelation> sr, rd;
  LinkCorrelation ei;
  HermitianEig ei_rx_eig, ei_tx_eig;
  std::vector<HermitianEig> sr_tx_eig, rd_tx_eig;
};

ChannelStats build_channel_stats(const SystemConfig& cfg);

CMat sample_channel(const CorrelationMatrix& C_rx, const CorrelationMatrix& C_tx, double beta,
                    Rng& rng);
CMat sample_channel(const LinkCorrelation& link, double beta, Rng& rng);

struct ChannelSet {
  std::vector<CMat> H_SR;  // N_R x N_S
  std::vector<CMat> H_RD;  // N_T x N_D
  CMat H_EI;               // N_R x N_T
};

ChannelSet sample_channel_set(const SystemConfig& cfg, const ChannelStats& stats, Rng& rng);
ChannelSet sample_channel_set(const SystemConfig& cfg, Rng& rng);

}  // namespace mmfdr
