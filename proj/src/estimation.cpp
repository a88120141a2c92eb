// SPDX-License-Identifier: Apache-2.0
#include "mmfdr/estimation.hpp"

#include <algorithm>

namespace mmfdr {

CMat effective_cov(double beta, const CMat& C_rx, double lambda1, const CMat& P) {
  return hermitian_part(beta * lambda1 * (P.adjoint() * C_rx * P));
}

CMat effective_cov(double beta, const CorrelationMatrix& C_rx, const CorrelationMatrix& C_tx,
                   const CMat& P, const CVec& p) {
  const double lambda1 = (p.adjoint() * C_tx.C * p)(0, 0).real();
  return effective_cov(beta, C_rx.C, lambda1, P);
}

double training_noise(double beta, double lambda1, double nu, double mu_R, double E_T, int tau) {
  if (!(E_T > 0.0)) throw InvalidParameter("E_T must be > 0");
  return 1.0 / (tau * E_T) + (mu_R / tau) * (1.0 / E_T + beta * (lambda1 + nu));
}

CMat lmmse_gain(const CMat& C_eff, double beta, double lambda1, double nu, double mu_R, double E_T,
                int tau) {
  const auto A = C_eff.rows();
  const double a = 1.0 + (lambda1 > 0.0 ? nu / (lambda1 * tau) : 0.0);
  const double s2 = training_noise(beta, lambda1, nu, mu_R, E_T, tau);
  const CMat B = a * C_eff + s2 * CMat::Identity(A, A);
  Eigen::LLT<CMat> llt(hermitian_part(B));
  if (llt.info() != Eigen::Success) throw SingularChannel("LMMSE bracket is singular");
  return hermitian_part(llt.solve(CMat::Identity(A, A)));
}

CMat lmmse_gain(const SystemConfig& cfg, const CMat& C_eff, Side side, int k, double lambda1) {
  const bool sr = side == Side::kSR;
  return lmmse_gain(C_eff, sr ? cfg.beta_SR[k] : cfg.beta_RD[k], lambda1,
                    sr ? cfg.nu_S[k] : cfg.nu_D[k], cfg.mu_R, cfg.E_T, cfg.tau);
}

CVec simulate_pilot_rx(const CMat& H, const CMat& P, const CVec& p, double nu_tx, double mu_rx,
                       double E_T, int tau, Rng& rng) {
  const auto n_rx = H.rows();
  const auto n_tx = H.cols();
  const double sq = std::sqrt(E_T);
  const CVec hp = H * p;
  const RVec p2 = p.cwiseAbs2();
  // per-antenna received power, averaged over the transmit distortion
  RVec rx_pow = E_T * hp.cwiseAbs2();
  if (nu_tx > 0.0) rx_pow += nu_tx * E_T * (H.cwiseAbs2() * p2);
  rx_pow.array() += 1.0;
  CVec acc = CVec::Zero(n_rx);
  CVec t(n_tx);
  for (int s = 0; s < tau; ++s) {
    CVec z = sq * hp;
    if (nu_tx > 0.0) {
      for (Eigen::Index m = 0; m < n_tx; ++m) t(m) = rng.cnormal(nu_tx * E_T * p2(m));
      z += H * t;
    }
    if (mu_rx > 0.0)
      for (Eigen::Index i = 0; i < n_rx; ++i) z(i) += rng.cnormal(mu_rx * rx_pow(i));
    for (Eigen::Index i = 0; i < n_rx; ++i) z(i) += rng.cnormal();
    acc += z * sq;  // phi^* with real pilot
  }
  return P.adjoint() * acc / (tau * E_T);
}

LinkStats make_link_stats(double beta, const CMat& C_rx, const CMat& C_tx, const HermitianEig& tx_eig,
                          const CMat& P, double nu, double mu_R, double E_T, int tau) {
  LinkStats s;
  s.beta = beta;
  s.nu = nu;
  s.C_tx = C_tx;
  s.p = tx_eig.vectors.col(0);
  s.lambda1 = tx_eig.values(0);
  const CMat PhC = P.adjoint() * C_rx;  // A x N
  s.C_rx_eff = hermitian_part(PhC * P);
  s.C_eff = beta * s.lambda1 * s.C_rx_eff;
  s.Gamma = lmmse_gain(s.C_eff, beta, s.lambda1, nu, mu_R, E_T, tau);
  s.sigma2 = training_noise(beta, s.lambda1, nu, mu_R, E_T, tau);
  s.M = s.C_eff * s.Gamma;
  s.C_hat = hermitian_part(s.M * s.C_eff);

  const CMat PCh = P * s.C_hat;
  s.diag_PChatP = (PCh.array() * P.conjugate().array()).rowwise().sum().real();

  s.tr_eff = s.C_eff.trace().real();
  s.tr_hat = s.C_hat.trace().real();
  s.tr_hat2 = trace_prod(s.C_hat, s.C_hat).real();
  s.tr_hat_eff = trace_prod(s.C_hat, s.C_eff).real();
  s.tr_err = s.tr_hat_eff - s.tr_hat2;
  // Tr(M^2 C_eff) = Tr(C_eff^3 Gamma^2)
  s.s2 = trace_prod(s.M * s.M, s.C_eff).real();

  const RVec d = s.p.cwiseAbs2();
  s.pdp = d.squaredNorm();
  const CMat CD = C_tx * d.asDiagonal();
  s.tr_cdcd = trace_prod(CD, CD).real();
  const CMat Cp = C_tx - s.lambda1 * s.p * s.p.adjoint();
  const CMat CpD = Cp * d.asDiagonal();
  s.tr_cpdcpd = trace_prod(CpD, CpD).real();

  const CMat PM = (beta * s.lambda1) * (P * s.M);
  const RVec dg = (PM.array() * PhC.transpose().array()).rowwise().sum().abs2();
  s.diag4 = dg.sum();

  const double sn = nu / tau;
  const double s1 = sn * s.pdp;
  const double r = s.lambda1 > 0.0 ? sn / s.lambda1 : 0.0;
  const double d_tr = s.tr_hat - s.s2;
  s.delta_refined = s1 * (d_tr * d_tr + s.s2 * s.s2) + r * r * s.tr_cdcd * s.s2 * s.s2 + s.tr_err;
  s.var_t = s.tr_hat2 + (2.0 * s1 + r * r * s.tr_cdcd) * s.s2 * s.s2;
  // noise weight multiplying Tr(C_eff^3 Gamma^2) in the leading-order error term
  const double sp2 = (mu_R / tau) * (1.0 / E_T + beta * (s.lambda1 + nu)) + 1.0 / (tau * E_T);
  s.delta_printed = sn * s.tr_hat * s.tr_hat * s.pdp + sp2 * s.s2;
  return s;
}

HiaStatistics prepare_hia(const SystemConfig& cfg, const ChannelStats& stats, int A_R, int A_T) {
  if (A_R < cfg.K || A_R > cfg.N_R || A_T < cfg.K || A_T > cfg.N_T)
    throw InvalidParameter("DOF parameters must satisfy K <= A <= N");
  HiaStatistics h;
  h.A_R = A_R;
  h.A_T = A_T;
  h.P_R = outer_basis(stats.ei_rx_eig, A_R);
  h.P_T = outer_basis(stats.ei_tx_eig, A_T);
  h.ei_rx_eff = hermitian_part(h.P_R.adjoint() * stats.ei.rx.C * h.P_R);
  h.ei_tx_eff = hermitian_part(h.P_T.adjoint() * stats.ei.tx.C * h.P_T);
  for (int k = 0; k < cfg.K; ++k) {
    h.sr.push_back(make_link_stats(cfg.beta_SR[k], stats.sr[k].rx.C, stats.sr[k].tx.C,
                                   stats.sr_tx_eig[k], h.P_R, cfg.nu_S[k], cfg.mu_R, cfg.E_T,
                                   cfg.tau));
    h.rd.push_back(make_link_stats(cfg.beta_RD[k], stats.rd[k].rx.C, stats.rd[k].tx.C,
                                   stats.rd_tx_eig[k], h.P_T, cfg.nu_D[k], cfg.mu_R, cfg.E_T,
                                   cfg.tau));
    h.p_S.push_back(h.sr.back().p);
    h.p_D.push_back(h.rd.back().p);
  }
  return h;
}

double delta_term(const LinkStats& link, DeltaForm form) {
  return form == DeltaForm::kPrinted ? link.delta_printed : link.delta_refined;
}

double delta_term(const SystemConfig& cfg, Side side, int k, const HiaStatistics& hia,
                  DeltaForm form) {
  if (k < 0 || k >= cfg.K) throw InvalidParameter("pair index out of range");
  return delta_term(side == Side::kSR ? hia.sr[k] : hia.rd[k], form);
}

EstimateSet estimate_effective_channels(const SystemConfig& cfg, const HiaStatistics& hia,
                                        const ChannelSet& ch, Rng& rng) {
  EstimateSet e;
  for (int k = 0; k < cfg.K; ++k) {
    const LinkStats& L = hia.sr[k];
    const CVec z = simulate_pilot_rx(ch.H_SR[k], hia.P_R, L.p, cfg.nu_S[k], cfg.mu_R, cfg.E_T,
                                     cfg.tau, rng);
    e.h_hat_SR.push_back(L.M * z);
    e.h_SR.push_back(hia.P_R.adjoint() * (ch.H_SR[k] * L.p));
  }
  for (int k = 0; k < cfg.K; ++k) {
    const LinkStats& L = hia.rd[k];
    const CVec z = simulate_pilot_rx(ch.H_RD[k], hia.P_T, L.p, cfg.nu_D[k], cfg.mu_R, cfg.E_T,
                                     cfg.tau, rng);
    e.h_hat_RD.push_back(L.M * z);
    e.h_RD.push_back(hia.P_T.adjoint() * (ch.H_RD[k] * L.p));
  }
  return e;
}

bool DofScalingReport::any_flagged() const {
  return std::any_of(sr_flag.begin(), sr_flag.end(), [](bool b) { return b; }) ||
         std::any_of(rd_flag.begin(), rd_flag.end(), [](bool b) { return b; });
}

DofScalingReport check_dof_scaling(const SystemConfig& cfg, const ChannelStats& stats, int A_R,
                                   int A_T, double threshold) {
  DofScalingReport r;
  r.threshold = threshold;
  const CMat P_R = outer_basis(stats.ei_rx_eig, A_R);
  const CMat P_T = outer_basis(stats.ei_tx_eig, A_T);
  for (int k = 0; k < cfg.K; ++k) {
    const double l_s = stats.sr_tx_eig[k].values(0);
    const double l_d = stats.rd_tx_eig[k].values(0);
    const double sr = cfg.beta_SR[k] * l_s *
                      trace_prod(P_R.adjoint(), stats.sr[k].rx.C * P_R).real() / cfg.N_R;
    const double rd = cfg.beta_RD[k] * l_d *
                      trace_prod(P_T.adjoint(), stats.rd[k].rx.C * P_T).real() / cfg.N_T;
    r.sr_ratio.push_back(sr);
    r.rd_ratio.push_back(rd);
    r.sr_flag.push_back(sr < threshold);
    r.rd_flag.push_back(rd < threshold);
  }
  return r;
}

}  // namespace mmfdr
