// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "mmfdr/estimation.hpp"
#include "mmfdr/impairments.hpp"

namespace mmfdr {

// Closed-form flavour of the HIA rate terms.
//  kRefined: finite-N deterministic equivalents (projected effective trace, fourth-moment
//            corrections of the estimation error and of the distortion terms).
//  kLeadingOrder: first-order large-array forms with Tr(C_hat) as the effective gain.
enum class AsymForm { kRefined, kLeadingOrder };

struct TermBreakdown {
  double desired = 0, var = 0, ei = 0, mui = 0, dt = 0, dr = 0, awgn = 0;
  double interference() const { return var + ei + mui + dt + dr + awgn; }
  double sinr() const;
};

double rate_from_sinr(double prefactor, double sinr);
inline double e2e_rate(double r_sr, double r_rd) { return r_sr < r_rd ? r_sr : r_rd; }

// Every closed-form term is linear in the powers.  For the S->R hop the desired power is
// gain_k * E_S[k]; the R->D hop uses gain_k * E_R[k].
struct SrCoefficients {
  RVec gain, var;  // times E_S[k]
  RMat mui, dt, dr_s;  // (k, j) times E_S[j]
  RMat ei, dr_r;       // (k, j) times E_R[j]
  RVec dr0, awgn;
};

struct RdCoefficients {
  RVec gain, var;     // times E_R[k]
  RMat mui, dt, dr;   // (k, j) times E_R[j]
  RVec dr0, awgn;
};

struct AsymCoefficients {
  SrCoefficients sr;
  RdCoefficients rd;
};

AsymCoefficients asym_coefficients(const SystemConfig& cfg, const HiaStatistics& hia,
                                   AsymForm form = AsymForm::kRefined);

TermBreakdown sr_terms(const SrCoefficients& c, int k, const std::vector<double>& E_S,
                       const std::vector<double>& E_R);
TermBreakdown rd_terms(const RdCoefficients& c, int k, const std::vector<double>& E_R);

struct PairAsym {
  double rate = 0;
  TermBreakdown terms;
};

std::vector<PairAsym> asym_rate_sr_hia(const SystemConfig& cfg, const HiaStatistics& hia,
                                       AsymForm form = AsymForm::kRefined);
std::vector<PairAsym> asym_rate_rd_hia(const SystemConfig& cfg, const HiaStatistics& hia,
                                       AsymForm form = AsymForm::kRefined);

// ---- Monte Carlo ----

BeamformerSet hia_beamformers(const HiaStatistics& hia, const EstimateSet& est);

struct UplinkTrialTerms {
  cd a;  // w^H H_SR,k p_S,k
  double ei = 0, mui = 0, dt = 0, dr = 0, w2 = 0;
};

struct DownlinkTrialTerms {
  cd b;  // p_D,k^H H_RD,k^H w_T,k
  double mui = 0, dt = 0, dr = 0;
};

// realized powers for one trial; distortion and symbols are averaged given the channels
std::vector<UplinkTrialTerms> mc_uplink_terms(const SystemConfig& cfg, const ChannelSet& ch,
                                              const BeamformerSet& bf);
std::vector<DownlinkTrialTerms> mc_downlink_terms(const SystemConfig& cfg, const ChannelSet& ch,
                                                  const BeamformerSet& bf);

struct PairAccumulator {
  cd sum_a = 0.0, sum_b = 0.0;
  double sum_a2 = 0, ei = 0, mui = 0, dt = 0, dr = 0, w2 = 0;
  double sum_b2 = 0, mui_d = 0, dt_d = 0, dr_d = 0;
};

struct McAccumulator {
  std::vector<PairAccumulator> pairs;
  long trials = 0;

  explicit McAccumulator(int K = 0) : pairs(K) {}
  void add(const std::vector<UplinkTrialTerms>& up, const std::vector<DownlinkTrialTerms>& dn);
  void merge(const McAccumulator& o);
};

McAccumulator run_monte_carlo(const SystemConfig& cfg, const ChannelStats& stats,
                              const HiaStatistics& hia, int trials, std::uint64_t seed,
                              int workers = 1);

TermBreakdown mc_terms_sr(const SystemConfig& cfg, const McAccumulator& acc, int k);
TermBreakdown mc_terms_rd(const SystemConfig& cfg, const McAccumulator& acc, int k);
double mc_rate_sr(const SystemConfig& cfg, const McAccumulator& acc, int k);
double mc_rate_rd(const SystemConfig& cfg, const McAccumulator& acc, int k);

// ---- reports ----

struct PairRates {
  double sr_mc = 0, rd_mc = 0, e2e_mc = 0;
  double sr_asym = 0, rd_asym = 0, e2e_asym = 0;
  TermBreakdown sr_mc_terms, rd_mc_terms, sr_asym_terms, rd_asym_terms;
};

struct RateReport {
  std::vector<PairRates> pairs;
  double se_mc = 0, se_asym = 0;
  double prefactor = 0;
  bool has_mc = false, has_asym = false;
};

struct RateOptions {
  bool mc = true;
  bool asym = true;
  int trials = 1000;
  std::uint64_t seed = 1;
  int workers = 1;
  AsymForm form = AsymForm::kRefined;
};

RateReport evaluate_rates(const SystemConfig& cfg, const ChannelStats& stats,
                          const HiaStatistics& hia, const RateOptions& opt);

// ---- single-antenna upper bounds ----

struct FixedPointState {
  CMat Psi;
  std::vector<double> delta;  // indexed by pair, entry k unused
  double rho = 1.0;
  double theta = 0.0;  // scalar of the relay receive distortion
  int iterations = 0;
  double residual = 0.0;
};

FixedPointState fixed_point_psi(const SystemConfig& cfg, const ChannelStats& stats, int k,
                                double tol = 1e-8, int max_iter = 500);
// residual of the delta map evaluated at `delta`
double fixed_point_residual(const SystemConfig& cfg, const ChannelStats& stats, int k,
                            const FixedPointState& st);

double upper_rate_sr(const SystemConfig& cfg, const ChannelStats& stats, int k);
double upper_rate_rd(const SystemConfig& cfg, int k);
double simplified_upper(const SystemConfig& cfg);

// ---- scaling probe ----

struct ScalingOptions {
  bool scale_nodes = false;  // N_S = N_D = floor(N / K)
  int pair = 0;
  AsymForm form = AsymForm::kRefined;
};

struct ScalingRow {
  int N = 0, A = 0, N_node = 0;
  TermBreakdown sr, rd;
  double rate_sr = 0, rate_rd = 0, rate_e2e = 0;
};

struct ScalingTable {
  std::vector<ScalingRow> rows;
  // least-squares log-log slopes over rows (NaN when a term is not positive everywhere)
  TermBreakdown sr_slope, rd_slope;
};

ScalingTable scaling_probe(const SystemConfig& tmpl, const std::vector<int>& N_list,
                           const ScalingOptions& opt = {});

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mmfdr
