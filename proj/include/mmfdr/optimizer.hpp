// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <utility>
#include <vector>

#include "mmfdr/gp.hpp"
#include "mmfdr/rates.hpp"

namespace mmfdr {

// gamma_SR,k = E_S[k] / (sum_j aR(k,j) E_S[j] + sum_j bR(k,j) E_R[j] + awgn_sr[k])
// gamma_RD,k = gain_rd[k] E_R[k] / (sum_j bD(k,j) E_R[j] + awgn_rd[k])
struct SinrModel {
  int K = 0;
  RMat aR, bR, bD;
  RVec awgn_sr, gain_rd, awgn_rd;

  double gamma_sr(int k, const std::vector<double>& E_S, const std::vector<double>& E_R) const;
  double gamma_rd(int k, const std::vector<double>& E_R) const;
  double gamma(int k, const std::vector<double>& E_S, const std::vector<double>& E_R) const {
    return std::min(gamma_sr(k, E_S, E_R), gamma_rd(k, E_R));
  }
};

SinrModel build_sinr_model(const AsymCoefficients& c);
SinrModel build_sinr_model(const SystemConfig& cfg, const HiaStatistics& hia,
                           AsymForm form = AsymForm::kRefined);
SinrModel build_sinr_model(const SystemConfig& cfg, const ChannelStats& stats, int A_R, int A_T,
                           AsymForm form = AsymForm::kRefined);

struct PowerAllocation {
  std::vector<double> E_S, E_R;
  int A_R = 0, A_T = 0;
};

struct PowerCaps {
  std::vector<double> E_S_max;
  double E_R_max = 0;
};

PowerCaps caps_of(const SystemConfig& cfg);

// omega = g/(1+g), theta = g^-omega (1+g), so theta * g^omega <= 1 + g with equality at g
std::pair<double, double> monomial_approx(double gamma_hat);

struct PowerControlOptions {
  double tol = 1e-4;
  int max_iter = 30;
  double prefactor = 1.0;
  GpOptions gp;
};

struct PowerControlResult {
  PowerAllocation alloc;
  std::vector<double> gamma;        // min(gamma_SR, gamma_RD) at the returned powers
  double se = 0;                     // prefactor * sum log2(1 + gamma)
  std::vector<double> objective;     // prod (1 + gamma_hat) per iterate, starting with the initial point
  int iterations = 0;
  bool init_violates = false;        // C1/C2 at the initial point are not tight-feasible
};

PowerControlResult power_control_fixed_dof(const SinrModel& model, const PowerCaps& caps,
                                           const PowerAllocation& init,
                                           const PowerControlOptions& opt = {});
PowerAllocation default_init(const PowerCaps& caps, int K);

double se_of(const SinrModel& model, const PowerAllocation& a, double prefactor);

struct JdpoOptions {
  std::vector<int> subset_R, subset_T;  // empty: uniform sampling with step max{10, N/K}
  int L = 3;
  AsymForm form = AsymForm::kRefined;
  PowerControlOptions pc;
};

struct JdpoResult {
  PowerControlResult best;
  double initial_se = 0;
  int evaluations = 0;
  int infeasible = 0;
  std::map<std::pair<int, int>, double> visited;  // (A_R, A_T) -> SE, NaN if skipped
};

std::vector<int> default_dof_subset(int K, int N);

JdpoResult jdpo(const SystemConfig& cfg, const ChannelStats& stats, const JdpoOptions& opt = {});

struct EeOptions {
  JdpoOptions dof;
  double tol = 1e-7;  // relative change of gamma_hat between condensation steps
  int max_iter = 60;
};

struct EeResult {
  PowerAllocation alloc;
  std::vector<double> gamma;
  double total_power = 0;
  double se = 0;
  double ee = 0;
  int iterations = 0;
};

// minimum total power reaching SE target r_t at fixed DOF
EeResult min_power_fixed_dof(const SinrModel& model, const PowerCaps& caps, double r_t,
                             double prefactor, const EeOptions& opt = {});
EeResult jdpo_ee(const SystemConfig& cfg, const ChannelStats& stats, double r_t,
                 const EeOptions& opt = {});

}  // namespace mmfdr
