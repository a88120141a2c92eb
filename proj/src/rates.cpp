// SPDX-License-Identifier: Apache-2.0
#include "mmfdr/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace mmfdr {

double TermBreakdown::sinr() const {
  const double den = interference();
  if (desired <= 0.0) return 0.0;
  if (den <= 0.0) return std::numeric_limits<double>::infinity();
  return desired / den;
}

double rate_from_sinr(double prefactor, double sinr) {
  if (!(sinr > 0.0)) return 0.0;
  return prefactor * std::log2(1.0 + sinr);
}

namespace {

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

struct CrossTraces {
  RMat hh;  // Tr(C_hat_k C_hat_j)
  RMat hx;  // Tr(C_hat_k P^H C_rx,j P)
};

CrossTraces cross_traces(const std::vector<LinkStats>& L) {
  const int K = int(L.size());
  CrossTraces c{RMat::Zero(K, K), RMat::Zero(K, K)};
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < K; ++j) {
      c.hh(k, j) = trace_prod(L[k].C_hat, L[j].C_hat).real();
      c.hx(k, j) = trace_prod(L[k].C_hat, L[j].C_rx_eff).real();
    }
  return c;
}

// Tr(C_hat_k) minus the share of the estimate subspace claimed by the other streams
double effective_trace(const std::vector<LinkStats>& L, const CrossTraces& c, int k) {
  const double tr = L[k].tr_hat;
  double t = tr;
  for (int j = 0; j < int(L.size()); ++j)
    if (j != k) t -= ratio(c.hh(k, j), L[j].tr_hat);
  const double A = double(L[k].C_hat.rows());
  return std::max(t, tr / A);
}

SrCoefficients sr_coefficients(const SystemConfig& cfg, const HiaStatistics& hia, AsymForm form,
                               const RVec& omega) {
  const int K = cfg.K;
  const auto& L = hia.sr;
  const CrossTraces c = cross_traces(L);
  SrCoefficients s;
  s.gain = RVec::Zero(K);
  s.var = RVec::Zero(K);
  s.mui = RMat::Zero(K, K);
  s.dt = RMat::Zero(K, K);
  s.dr_s = RMat::Zero(K, K);
  s.ei = RMat::Zero(K, K);
  s.dr_r = RMat::Zero(K, K);
  s.dr0 = RVec::Zero(K);
  s.awgn = RVec::Ones(K);
  const bool refined = form == AsymForm::kRefined;
  for (int k = 0; k < K; ++k) {
    const LinkStats& lk = L[k];
    const double tr = lk.tr_hat;
    if (!(tr > 0.0)) continue;
    const double t = refined ? effective_trace(L, c, k) : tr;
    const double w2 = refined ? (1.0 + lk.var_t / (t * t)) / t : 1.0 / tr;
    const auto q = [&](double x) { return x / (t * tr); };
    const double ei_proj = q(trace_prod(lk.C_hat, hia.ei_rx_eff).real());

    s.gain(k) = 1.0;
    s.var(k) = (refined ? lk.delta_refined : lk.delta_printed) / (t * t);
    s.awgn(k) = w2;
    s.dr0(k) = cfg.mu_R * w2;

    const double sn = lk.nu / cfg.tau;
    double own;
    if (refined) {
      const double ea2 = 1.0 + lk.delta_refined / (t * t);
      const double rho = tr / (lk.lambda1 * t);
      const double q1 = lk.tr_hat_eff / (lk.lambda1 * t * tr);
      own = ea2 * lk.pdp + rho * rho * sn * lk.tr_cpdcpd + q1 * (1.0 - lk.lambda1 * lk.pdp);
    } else {
      const double g = tr * tr * lk.pdp + sn * tr * tr * lk.tr_cdcd / (lk.lambda1 * lk.lambda1) +
                       lk.sigma2 * lk.s2 / lk.lambda1;
      own = g / (tr * tr);
    }
    s.dt(k, k) = cfg.nu_S[k] * own;

    for (int j = 0; j < K; ++j) {
      const LinkStats& lj = L[j];
      if (j != k) {
        const double c_eff_j = lj.beta * lj.lambda1 * c.hx(k, j);
        s.mui(k, j) = q(c_eff_j - c.hh(k, j));
        s.dt(k, j) = cfg.nu_S[j] * lj.beta * q(c.hx(k, j));
      }
      s.dr_s(k, j) = cfg.mu_R * w2 * lj.beta * (lj.lambda1 + lj.nu);
      s.ei(k, j) = cfg.beta_EI * omega(j) * ei_proj;
      s.dr_r(k, j) = cfg.mu_R * w2 * cfg.beta_EI * omega(j);
    }
    if (refined) s.dr_s(k, k) += cfg.mu_R * lk.diag4 / (t * t);
  }
  return s;
}

RdCoefficients rd_coefficients(const SystemConfig& cfg, const HiaStatistics& hia, AsymForm form) {
  const int K = cfg.K;
  const auto& L = hia.rd;
  const CrossTraces c = cross_traces(L);
  RdCoefficients s;
  s.gain = RVec::Zero(K);
  s.var = RVec::Zero(K);
  s.mui = RMat::Zero(K, K);
  s.dt = RMat::Zero(K, K);
  s.dr = RMat::Zero(K, K);
  s.dr0 = RVec::Zero(K);
  s.awgn = RVec::Ones(K);
  const bool refined = form == AsymForm::kRefined;
  RVec diag_sum(K);
  for (int l = 0; l < K; ++l) diag_sum(l) = L[l].diag_PChatP.sum();

  for (int k = 0; k < K; ++k) {
    const LinkStats& lk = L[k];
    const double tr = lk.tr_hat;
    s.dr0(k) = cfg.mu_D[k];
    if (!(tr > 0.0)) continue;
    const double sn = lk.nu / cfg.tau;
    if (refined) {
      const double t = effective_trace(L, c, k);
      s.gain(k) = t - lk.var_t / (4.0 * t);
      const double qq = lk.s2 / (2.0 * tr);
      const double s1 = sn * lk.pdp;
      const double r = sn / lk.lambda1;
      s.var(k) = (lk.tr_err + 0.25 * lk.tr_hat2) / t + s1 * tr * ((1 - qq) * (1 - qq) + qq * qq) +
                 r * r * lk.tr_cdcd * lk.s2 * lk.s2 / (4.0 * tr);
      const double eb2 = s.gain(k) + s.var(k);
      const double rho2 = tr * tr / (lk.lambda1 * lk.lambda1 * t);
      const double q1 = lk.tr_hat_eff / (lk.lambda1 * tr);
      const double own = eb2 * lk.pdp + rho2 * sn * lk.tr_cpdcpd + q1 * (1.0 - lk.lambda1 * lk.pdp);
      for (int j = 0; j < K; ++j) {
        const double tr_j = L[j].tr_hat;
        if (j != k) {
          s.mui(k, j) = ratio(lk.beta * lk.lambda1 * c.hx(j, k) - c.hh(k, j), tr_j);
          s.dr(k, j) = cfg.mu_D[k] * lk.beta * ratio(c.hx(j, k), tr_j);
        }
        s.dt(k, j) = cfg.nu_R * lk.beta * lk.lambda1 * ratio(diag_sum(j), tr_j);
        s.dr(k, j) += cfg.mu_D[k] * cfg.nu_R * lk.beta * ratio(diag_sum(j), tr_j);
      }
      s.dt(k, k) += cfg.nu_R * lk.diag4 / t;
      s.dr(k, k) += cfg.mu_D[k] * own;
    } else {
      s.gain(k) = tr;
      s.var(k) = lk.delta_printed / tr;
      for (int j = 0; j < K; ++j) {
        const double tr_j = L[j].tr_hat;
        if (j != k) {
          s.mui(k, j) = ratio(lk.beta * lk.lambda1 * c.hx(j, k) - c.hh(k, j), tr_j);
          s.dr(k, j) = cfg.mu_D[k] * L[j].beta * c.hx(j, k) / tr;
        }
        s.dt(k, j) = cfg.nu_R * lk.beta * lk.lambda1 * ratio(diag_sum(j), tr_j);
      }
      s.dr(k, k) = cfg.mu_D[k] * (lk.pdp * tr + lk.sigma2 * lk.s2 / (lk.lambda1 * tr));
    }
  }
  return s;
}

}  // namespace

AsymCoefficients asym_coefficients(const SystemConfig& cfg, const HiaStatistics& hia,
                                   AsymForm form) {
  // per-stream relay transmit covariance seen by the echo channel, normalised by E_R[l]
  RVec omega = RVec::Zero(cfg.K);
  for (int l = 0; l < cfg.K; ++l) {
    const LinkStats& ll = hia.rd[l];
    const double num = trace_prod(hia.ei_tx_eff, ll.C_hat).real() + cfg.nu_R * ll.diag_PChatP.sum();
    omega(l) = ratio(num, ll.tr_hat);
  }
  return {sr_coefficients(cfg, hia, form, omega), rd_coefficients(cfg, hia, form)};
}

TermBreakdown sr_terms(const SrCoefficients& c, int k, const std::vector<double>& E_S,
                       const std::vector<double>& E_R) {
  TermBreakdown t;
  t.desired = c.gain(k) * E_S[k];
  t.var = c.var(k) * E_S[k];
  for (int j = 0; j < int(E_S.size()); ++j) {
    t.mui += c.mui(k, j) * E_S[j];
    t.dt += c.dt(k, j) * E_S[j];
    t.dr += c.dr_s(k, j) * E_S[j] + c.dr_r(k, j) * E_R[j];
    t.ei += c.ei(k, j) * E_R[j];
  }
  t.dr += c.dr0(k);
  t.awgn = c.awgn(k);
  return t;
}

TermBreakdown rd_terms(const RdCoefficients& c, int k, const std::vector<double>& E_R) {
  TermBreakdown t;
  t.desired = c.gain(k) * E_R[k];
  t.var = c.var(k) * E_R[k];
  for (int j = 0; j < int(E_R.size()); ++j) {
    t.mui += c.mui(k, j) * E_R[j];
    t.dt += c.dt(k, j) * E_R[j];
    t.dr += c.dr(k, j) * E_R[j];
  }
  t.dr += c.dr0(k);
  t.awgn = c.awgn(k);
  return t;
}

std::vector<PairAsym> asym_rate_sr_hia(const SystemConfig& cfg, const HiaStatistics& hia,
                                       AsymForm form) {
  const AsymCoefficients c = asym_coefficients(cfg, hia, form);
  std::vector<PairAsym> out(cfg.K);
  for (int k = 0; k < cfg.K; ++k) {
    out[k].terms = sr_terms(c.sr, k, cfg.E_S, cfg.E_R);
    out[k].rate = rate_from_sinr(cfg.prefactor(), out[k].terms.sinr());
  }
  return out;
}

std::vector<PairAsym> asym_rate_rd_hia(const SystemConfig& cfg, const HiaStatistics& hia,
                                       AsymForm form) {
  const AsymCoefficients c = asym_coefficients(cfg, hia, form);
  std::vector<PairAsym> out(cfg.K);
  for (int k = 0; k < cfg.K; ++k) {
    out[k].terms = rd_terms(c.rd, k, cfg.E_R);
    out[k].rate = rate_from_sinr(cfg.prefactor(), out[k].terms.sinr());
  }
  return out;
}

// ---- Monte Carlo ----

BeamformerSet hia_beamformers(const HiaStatistics& hia, const EstimateSet& est) {
  const int K = int(est.h_hat_SR.size());
  CMat Hs(hia.A_R, K), Hd(hia.A_T, K);
  for (int k = 0; k < K; ++k) {
    Hs.col(k) = est.h_hat_SR[k];
    Hd.col(k) = est.h_hat_RD[k];
  }
  InnerZf zf = inner_zf(Hs, Hd);
  BeamformerSet bf;
  bf.P_R = hia.P_R;
  bf.P_T = hia.P_T;
  bf.W_R_inner = std::move(zf.W_R_inner);
  bf.W_T_inner = std::move(zf.W_T_inner);
  bf.Upsilon = std::move(zf.Upsilon);
  bf.p_S = hia.p_S;
  bf.p_D = hia.p_D;
  bf.A_R = hia.A_R;
  bf.A_T = hia.A_T;
  return bf;
}

namespace {

// per-antenna relay transmit power sum_l E_R[l] |W_T(n, l)|^2
RVec relay_tx_power(const SystemConfig& cfg, const CMat& W_T) {
  RVec s = RVec::Zero(W_T.rows());
  for (int l = 0; l < cfg.K; ++l) s += cfg.E_R[l] * W_T.col(l).cwiseAbs2();
  return s;
}

}  // namespace

std::vector<UplinkTrialTerms> mc_uplink_terms(const SystemConfig& cfg, const ChannelSet& ch,
                                              const BeamformerSet& bf) {
  const int K = cfg.K;
  const CMat W_R = bf.W_R();
  const CMat W_T = bf.W_T();
  const RVec s = relay_tx_power(cfg, W_T);

  // relay receive power per antenna (signal + echo + noise), feeds the receive distortion
  RVec rx = RVec::Ones(cfg.N_R);
  std::vector<CVec> g(K);
  RMat dt_acc = RMat::Zero(K, 1);
  for (int j = 0; j < K; ++j) {
    g[j] = ch.H_SR[j] * bf.p_S[j];
    rx += cfg.E_S[j] * g[j].cwiseAbs2();
    if (cfg.nu_S[j] > 0.0) {
      const RVec p2 = bf.p_S[j].cwiseAbs2();
      rx += cfg.nu_S[j] * cfg.E_S[j] * (ch.H_SR[j].cwiseAbs2() * p2);
      const CMat V = W_R.adjoint() * ch.H_SR[j];  // K x N_S
      dt_acc += cfg.nu_S[j] * cfg.E_S[j] * (V.cwiseAbs2() * p2);
    }
  }
  const bool echo = cfg.beta_EI > 0.0;
  CMat U, Y;
  if (echo) {
    const CMat HW = ch.H_EI * W_T;  // N_R x K
    for (int l = 0; l < K; ++l) rx += cfg.E_R[l] * HW.col(l).cwiseAbs2();
    if (cfg.nu_R > 0.0) rx += cfg.nu_R * (ch.H_EI.cwiseAbs2() * s);
    U = ch.H_EI.adjoint() * W_R;  // N_T x K
    Y = W_T.adjoint() * U;        // K x K
  }

  std::vector<UplinkTrialTerms> out(K);
  for (int k = 0; k < K; ++k) {
    UplinkTrialTerms& o = out[k];
    const auto w = W_R.col(k);
    o.a = w.dot(g[k]);
    for (int j = 0; j < K; ++j)
      if (j != k) o.mui += cfg.E_S[j] * std::norm(w.dot(g[j]));
    o.dt = dt_acc(k, 0);
    o.w2 = w.squaredNorm();
    o.dr = cfg.mu_R * (w.cwiseAbs2().array() * rx.array()).sum();
    if (echo) {
      for (int l = 0; l < K; ++l) o.ei += cfg.E_R[l] * std::norm(Y(l, k));
      if (cfg.nu_R > 0.0) o.ei += cfg.nu_R * (U.col(k).cwiseAbs2().array() * s.array()).sum();
    }
  }
  return out;
}

std::vector<DownlinkTrialTerms> mc_downlink_terms(const SystemConfig& cfg, const ChannelSet& ch,
                                                  const BeamformerSet& bf) {
  const int K = cfg.K;
  const CMat W_T = bf.W_T();
  const RVec s = relay_tx_power(cfg, W_T);
  std::vector<DownlinkTrialTerms> out(K);
  for (int k = 0; k < K; ++k) {
    DownlinkTrialTerms& o = out[k];
    const CMat& H = ch.H_RD[k];
    const CVec& p = bf.p_D[k];
    const CMat F = H.adjoint() * W_T;  // N_D x K
    const CVec pf = F.adjoint() * p;    // conj of p^H F
    o.b = std::conj(pf(k));
    for (int j = 0; j < K; ++j)
      if (j != k) o.mui += cfg.E_R[j] * std::norm(pf(j));
    if (cfg.nu_R > 0.0) o.dt = cfg.nu_R * ((H * p).cwiseAbs2().array() * s.array()).sum();
    if (cfg.mu_D[k] > 0.0) {
      RVec rx = RVec::Ones(cfg.N_D);
      for (int l = 0; l < K; ++l) rx += cfg.E_R[l] * F.col(l).cwiseAbs2();
      if (cfg.nu_R > 0.0) rx += cfg.nu_R * (H.cwiseAbs2().transpose() * s);
      o.dr = cfg.mu_D[k] * (p.cwiseAbs2().array() * rx.array()).sum();
    }
  }
  return out;
}

void McAccumulator::add(const std::vector<UplinkTrialTerms>& up,
                        const std::vector<DownlinkTrialTerms>& dn) {
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    PairAccumulator& p = pairs[k];
    p.sum_a += up[k].a;
    p.sum_a2 += std::norm(up[k].a);
    p.ei += up[k].ei;
    p.mui += up[k].mui;
    p.dt += up[k].dt;
    p.dr += up[k].dr;
    p.w2 += up[k].w2;
    p.sum_b += dn[k].b;
    p.sum_b2 += std::norm(dn[k].b);
    p.mui_d += dn[k].mui;
    p.dt_d += dn[k].dt;
    p.dr_d += dn[k].dr;
  }
  ++trials;
}

void McAccumulator::merge(const McAccumulator& o) {
  if (pairs.size() != o.pairs.size()) throw InvalidParameter("accumulator size mismatch");
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    PairAccumulator& p = pairs[k];
    const PairAccumulator& q = o.pairs[k];
    p.sum_a += q.sum_a;
    p.sum_a2 += q.sum_a2;
    p.ei += q.ei;
    p.mui += q.mui;
    p.dt += q.dt;
    p.dr += q.dr;
    p.w2 += q.w2;
    p.sum_b += q.sum_b;
    p.sum_b2 += q.sum_b2;
    p.mui_d += q.mui_d;
    p.dt_d += q.dt_d;
    p.dr_d += q.dr_d;
  }
  trials += o.trials;
}

McAccumulator run_monte_carlo(const SystemConfig& cfg, const ChannelStats& stats,
                              const HiaStatistics& hia, int trials, std::uint64_t seed,
                              int workers) {
  if (trials < 1) throw InvalidParameter("trials must be >= 1");
  workers = std::clamp(workers, 1, trials);
  const auto run_range = [&](int lo, int hi, McAccumulator& acc) {
    for (int t = lo; t < hi; ++t) {
      Rng rng = Rng::for_trial(seed, std::uint64_t(t));
      const ChannelSet ch = sample_channel_set(cfg, stats, rng);
      const EstimateSet est = estimate_effective_channels(cfg, hia, ch, rng);
      const BeamformerSet bf = hia_beamformers(hia, est);
      acc.add(mc_uplink_terms(cfg, ch, bf), mc_downlink_terms(cfg, ch, bf));
    }
  };
  std::vector<McAccumulator> parts(workers, McAccumulator(cfg.K));
  if (workers == 1) {
    run_range(0, trials, parts[0]);
    return parts[0];
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(workers);
  for (int w = 0; w < workers; ++w) {
    const int lo = int(std::int64_t(trials) * w / workers);
    const int hi = int(std::int64_t(trials) * (w + 1) / workers);
    pool.emplace_back([&, w, lo, hi] {
      try {
        run_range(lo, hi, parts[w]);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  McAccumulator total(cfg.K);
  for (const auto& p : parts) total.merge(p);
  return total;
}

TermBreakdown mc_terms_sr(const SystemConfig& cfg, const McAccumulator& acc, int k) {
  const PairAccumulator& p = acc.pairs.at(k);
  const double n = double(acc.trials);
  const cd mean = p.sum_a / n;
  TermBreakdown t;
  t.desired = cfg.E_S[k] * std::norm(mean);
  t.var = cfg.E_S[k] * std::max(p.sum_a2 / n - std::norm(mean), 0.0);
  t.ei = p.ei / n;
  t.mui = p.mui / n;
  t.dt = p.dt / n;
  t.dr = p.dr / n;
  t.awgn = p.w2 / n;
  return t;
}

TermBreakdown mc_terms_rd(const SystemConfig& cfg, const McAccumulator& acc, int k) {
  const PairAccumulator& p = acc.pairs.at(k);
  const double n = double(acc.trials);
  const cd mean = p.sum_b / n;
  TermBreakdown t;
  t.desired = cfg.E_R[k] * std::norm(mean);
  t.var = cfg.E_R[k] * std::max(p.sum_b2 / n - std::norm(mean), 0.0);
  t.mui = p.mui_d / n;
  t.dt = p.dt_d / n;
  t.dr = p.dr_d / n;
  t.awgn = 1.0;
  return t;
}

double mc_rate_sr(const SystemConfig& cfg, const McAccumulator& acc, int k) {
  return rate_from_sinr(cfg.prefactor(), mc_terms_sr(cfg, acc, k).sinr());
}

double mc_rate_rd(const SystemConfig& cfg, const McAccumulator& acc, int k) {
  return rate_from_sinr(cfg.prefactor(), mc_terms_rd(cfg, acc, k).sinr());
}

RateReport evaluate_rates(const SystemConfig& cfg, const ChannelStats& stats,
                          const HiaStatistics& hia, const RateOptions& opt) {
  RateReport r;
  r.prefactor = cfg.prefactor();
  r.pairs.resize(cfg.K);
  if (opt.asym) {
    r.has_asym = true;
    const AsymCoefficients c = asym_coefficients(cfg, hia, opt.form);
    for (int k = 0; k < cfg.K; ++k) {
      PairRates& p = r.pairs[k];
      p.sr_asym_terms = sr_terms(c.sr, k, cfg.E_S, cfg.E_R);
      p.rd_asym_terms = rd_terms(c.rd, k, cfg.E_R);
      p.sr_asym = rate_from_sinr(r.prefactor, p.sr_asym_terms.sinr());
      p.rd_asym = rate_from_sinr(r.prefactor, p.rd_asym_terms.sinr());
      p.e2e_asym = e2e_rate(p.sr_asym, p.rd_asym);
      r.se_asym += p.e2e_asym;
    }
  }
  if (opt.mc) {
    r.has_mc = true;
    const McAccumulator acc = run_monte_carlo(cfg, stats, hia, opt.trials, opt.seed, opt.workers);
    for (int k = 0; k < cfg.K; ++k) {
      PairRates& p = r.pairs[k];
      p.sr_mc_terms = mc_terms_sr(cfg, acc, k);
      p.rd_mc_terms = mc_terms_rd(cfg, acc, k);
      p.sr_mc = rate_from_sinr(r.prefactor, p.sr_mc_terms.sinr());
      p.rd_mc = rate_from_sinr(r.prefactor, p.rd_mc_terms.sinr());
      p.e2e_mc = e2e_rate(p.sr_mc, p.rd_mc);
      r.se_mc += p.e2e_mc;
    }
  }
  return r;
}

// ---- single-antenna upper bounds ----

namespace {

void need_single_antenna(const SystemConfig& cfg) {
  if (!cfg.single_antenna()) throw ModeError("upper bounds need N_S = N_D = 1");
}

CMat psi_inverse_arg(const SystemConfig& cfg, const ChannelStats& stats, int k,
                     const std::vector<double>& delta, double diag) {
  const int N = cfg.N_R;
  CMat B = diag * CMat::Identity(N, N);
  for (int j = 0; j < cfg.K; ++j) {
    if (j == k) continue;
    const double c = cfg.nu_S[j] * cfg.E_S[j] * cfg.beta_SR[j];
    if (c == 0.0) continue;
    B += (c / (N * (1.0 + delta[j]))) * stats.sr[j].rx.C;
  }
  return B;
}

CMat hpd_inverse(const CMat& B) {
  Eigen::LLT<CMat> llt(hermitian_part(B));
  if (llt.info() != Eigen::Success) throw SingularChannel("fixed-point matrix is not invertible");
  return llt.solve(CMat::Identity(B.rows(), B.cols()));
}

std::vector<double> delta_map(const SystemConfig& cfg, const ChannelStats& stats, int k,
                              const CMat& Psi) {
  std::vector<double> out(cfg.K, 0.0);
  for (int l = 0; l < cfg.K; ++l) {
    if (l == k) continue;
    const double c = cfg.nu_S[l] * cfg.E_S[l] * cfg.beta_SR[l];
    out[l] = c / cfg.N_R * trace_prod(stats.sr[l].rx.C, Psi).real();
  }
  return out;
}

}  // namespace

FixedPointState fixed_point_psi(const SystemConfig& cfg, const ChannelStats& stats, int k,
                                double tol, int max_iter) {
  need_single_antenna(cfg);
  if (k < 0 || k >= cfg.K) throw InvalidParameter("pair index out of range");
  FixedPointState st;
  const DistortionCov theta_t = relay_tx_distortion_cov_closed_form(cfg);
  st.rho = relay_rho(cfg, stats.ei.tx.C, theta_t);
  st.theta = relay_rx_distortion_cov_closed_form(cfg).diag(0);
  const double diag = st.theta + st.rho;
  st.delta.assign(cfg.K, 1.0 / st.rho);
  st.delta[k] = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    st.Psi = hpd_inverse(psi_inverse_arg(cfg, stats, k, st.delta, diag));
    const std::vector<double> next = delta_map(cfg, stats, k, st.Psi);
    double diff = 0.0;
    for (int l = 0; l < cfg.K; ++l) diff = std::max(diff, std::abs(next[l] - st.delta[l]));
    st.delta = next;
    st.iterations = it;
    if (diff < tol) {
      st.Psi = hpd_inverse(psi_inverse_arg(cfg, stats, k, st.delta, diag));
      st.residual = fixed_point_residual(cfg, stats, k, st);
      return st;
    }
  }
  st.residual = fixed_point_residual(cfg, stats, k, st);
  throw ConvergenceError("fixed point did not converge", st.residual, st.iterations);
}

double fixed_point_residual(const SystemConfig& cfg, const ChannelStats& stats, int k,
                            const FixedPointState& st) {
  const CMat Psi = hpd_inverse(psi_inverse_arg(cfg, stats, k, st.delta, st.theta + st.rho));
  const std::vector<double> m = delta_map(cfg, stats, k, Psi);
  double r = 0.0;
  for (int l = 0; l < cfg.K; ++l) r = std::max(r, std::abs(m[l] - st.delta[l]));
  return r;
}

double upper_rate_sr(const SystemConfig& cfg, const ChannelStats& stats, int k) {
  const FixedPointState st = fixed_point_psi(cfg, stats, k);
  const double x = cfg.E_S[k] * cfg.beta_SR[k] * trace_prod(stats.sr[k].rx.C, st.Psi).real();
  return rate_from_sinr(cfg.prefactor(), x / (1.0 + cfg.nu_S[k] * x));
}

double upper_rate_rd(const SystemConfig& cfg, int k) {
  need_single_antenna(cfg);
  const double sig = cfg.N_T * cfg.beta_RD[k] * cfg.E_R[k];
  const double dt = cfg.nu_R * cfg.beta_RD[k] * cfg.sum_E_R();
  const double den = dt + cfg.mu_D[k] * (sig + dt + 1.0) + 1.0;
  return rate_from_sinr(cfg.prefactor(), sig / den);
}

double simplified_upper(const SystemConfig& cfg) {
  if (!cfg.homogeneous()) throw ModeError("simplified bound needs homogeneous pairs");
  const double K = cfg.K;
  const double nu_S = cfg.nu_S[0], mu_D = cfg.mu_D[0];
  const double src = cfg.E_S[0] * cfg.beta_SR[0];
  double sr;
  if (src > 0.0) {
    const double den = nu_S + (K / cfg.N_R) * cfg.mu_R * nu_S +
                       (K / cfg.N_R) * cfg.nu_R * cfg.E_R[0] * cfg.beta_EI / src;
    sr = den > 0.0 ? 1.0 / den : std::numeric_limits<double>::infinity();
  } else {
    sr = 0.0;
  }
  const double rd_den = mu_D + (K / cfg.N_T) * cfg.nu_R * (1.0 + mu_D);
  const double rd = rd_den > 0.0 ? 1.0 / rd_den : std::numeric_limits<double>::infinity();
  return rate_from_sinr(cfg.prefactor(), std::min(sr, rd));
}

// ---- scaling probe ----

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

ScalingTable scaling_probe(const SystemConfig& tmpl, const std::vector<int>& N_list,
                           const ScalingOptions& opt) {
  for (std::size_t i = 1; i < N_list.size(); ++i)
    if (N_list[i] <= N_list[i - 1]) throw InvalidParameter("N list must be increasing");
  ScalingTable tab;
  for (int N : N_list) {
    SystemConfig cfg = tmpl;
    cfg.N_R = cfg.N_T = N;
    if (opt.scale_nodes) cfg.N_S = cfg.N_D = std::max(1, N / cfg.K);
    cfg.validate();
    const int A = std::max(cfg.K, 2 * N / 3);
    const ChannelStats stats = build_channel_stats(cfg);
    const HiaStatistics hia = prepare_hia(cfg, stats, A, A);
    const AsymCoefficients c = asym_coefficients(cfg, hia, opt.form);
    ScalingRow row;
    row.N = N;
    row.A = A;
    row.N_node = cfg.N_S;
    row.sr = sr_terms(c.sr, opt.pair, cfg.E_S, cfg.E_R);
    row.rd = rd_terms(c.rd, opt.pair, cfg.E_R);
    row.rate_sr = rate_from_sinr(cfg.prefactor(), row.sr.sinr());
    row.rate_rd = rate_from_sinr(cfg.prefactor(), row.rd.sinr());
    row.rate_e2e = e2e_rate(row.rate_sr, row.rate_rd);
    tab.rows.push_back(row);
  }
  std::vector<double> x;
  for (const auto& r : tab.rows) x.push_back(r.N);
  const auto slope = [&](auto get) {
    std::vector<double> y;
    for (const auto& r : tab.rows) y.push_back(get(r));
    return loglog_slope(x, y);
  };
  tab.sr_slope.desired = slope([](const ScalingRow& r) { return r.sr.desired; });
  tab.sr_slope.var = slope([](const ScalingRow& r) { return r.sr.var; });
  tab.sr_slope.ei = slope([](const ScalingRow& r) { return r.sr.ei; });
  tab.sr_slope.mui = slope([](const ScalingRow& r) { return r.sr.mui; });
  tab.sr_slope.dt = slope([](const ScalingRow& r) { return r.sr.dt; });
  tab.sr_slope.dr = slope([](const ScalingRow& r) { return r.sr.dr; });
  tab.sr_slope.awgn = slope([](const ScalingRow& r) { return r.sr.awgn; });
  tab.rd_slope.desired = slope([](const ScalingRow& r) { return r.rd.desired; });
  tab.rd_slope.var = slope([](const ScalingRow& r) { return r.rd.var; });
  tab.rd_slope.mui = slope([](const ScalingRow& r) { return r.rd.mui; });
  tab.rd_slope.dt = slope([](const ScalingRow& r) { return r.rd.dt; });
  tab.rd_slope.dr = slope([](const ScalingRow& r) { return r.rd.dr; });
  tab.rd_slope.awgn = slope([](const ScalingRow& r) { return r.rd.awgn; });
  return tab;
}

}  // namespace mmfdr
