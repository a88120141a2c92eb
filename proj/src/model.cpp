// SPDX-License-Identifier: Apache-2.0
#include "mmfdr/model.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numbers>
#include <numeric>

namespace mmfdr {

namespace {

void fit(std::vector<double>& v, int K, double dflt) {
  const double fill = v.empty() ? dflt : v.front();
  if (int(v.size()) != K) v.assign(K, fill);
}

void fit(std::vector<cd>& v, int K) {
  const cd fill = v.empty() ? cd(0.0) : v.front();
  if (int(v.size()) != K) v.assign(K, fill);
}

bool all_equal(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

bool all_equal(const std::vector<cd>& v) {
  return std::all_of(v.begin(), v.end(), [&](cd x) { return std::abs(x) == std::abs(v.front()); });
}

void need_nonneg(const std::vector<double>& v, const char* name) {
  for (double x : v)
    if (!(x >= 0.0) || !std::isfinite(x))
      throw InvalidParameter(std::string(name) + " must be finite and >= 0");
}

void need_nonneg(double x, const char* name) {
  if (!(x >= 0.0) || !std::isfinite(x))
    throw InvalidParameter(std::string(name) + " must be finite and >= 0");
}

}  // namespace

SystemConfig SystemConfig::uniform(int K, int N_S, int N_D, int N_R, int N_T) {
  SystemConfig c;
  c.K = K;
  c.N_S = N_S;
  c.N_D = N_D;
  c.N_R = N_R;
  c.N_T = N_T;
  const double e = db_to_lin(5.0);
  c.E_S.assign(K, e);
  c.E_S_max.assign(K, e);
  c.E_R.assign(K, e);
  c.E_R_max = K * e;
  c.nu_S.assign(K, 0.0);
  c.nu_D.assign(K, 0.0);
  c.mu_D.assign(K, 0.0);
  c.beta_SR.assign(K, 1.0);
  c.beta_RD.assign(K, 1.0);
  c.r_SR.assign(K, 0.0);
  c.r_RD.assign(K, 0.0);
  return c;
}

void SystemConfig::broadcast() {
  if (K < 1) throw InvalidParameter("K must be >= 1");
  fit(E_S, K, db_to_lin(5.0));
  fit(E_S_max, K, E_S.front());
  fit(E_R, K, db_to_lin(5.0));
  fit(nu_S, K, 0.0);
  fit(nu_D, K, 0.0);
  fit(mu_D, K, 0.0);
  fit(beta_SR, K, 1.0);
  fit(beta_RD, K, 1.0);
  fit(r_SR, K);
  fit(r_RD, K);
}

double SystemConfig::sum_E_R() const { return std::accumulate(E_R.begin(), E_R.end(), 0.0); }

void SystemConfig::set_all_E_S(double v) { E_S.assign(K, v); }
void SystemConfig::set_all_E_R(double v) { E_R.assign(K, v); }
void SystemConfig::set_all_nu_S(double v) { nu_S.assign(K, v); }
void SystemConfig::set_all_nu_D(double v) { nu_D.assign(K, v); }
void SystemConfig::set_all_mu_D(double v) { mu_D.assign(K, v); }
void SystemConfig::set_all_beta_SR(double v) { beta_SR.assign(K, v); }
void SystemConfig::set_all_beta_RD(double v) { beta_RD.assign(K, v); }

void SystemConfig::validate() const {
  if (K < 1) throw InvalidParameter("K must be >= 1");
  if (N_S < 1 || N_D < 1 || N_R < 1 || N_T < 1)
    throw InvalidParameter("antenna counts must be >= 1");
  if (K > std::min(N_R, N_T)) throw InvalidParameter("K must not exceed min(N_R, N_T)");
  if (tau < 1) throw InvalidParameter("tau must be >= 1");
  if (T <= 2 * K * tau) throw InvalidParameter("T must exceed 2*K*tau");
  const auto sized = [&](std::size_t n, const char* name) {
    if (int(n) != K) throw InvalidParameter(std::string(name) + " must have K entries");
  };
  sized(E_S.size(), "E_S");
  sized(E_S_max.size(), "E_S_max");
  sized(E_R.size(), "E_R");
  sized(nu_S.size(), "nu_S");
  sized(nu_D.size(), "nu_D");
  sized(mu_D.size(), "mu_D");
  sized(beta_SR.size(), "beta_SR");
  sized(beta_RD.size(), "beta_RD");
  sized(r_SR.size(), "r_SR");
  sized(r_RD.size(), "r_RD");
  need_nonneg(E_S, "E_S");
  need_nonneg(E_S_max, "E_S_max");
  need_nonneg(E_R, "E_R");
  need_nonneg(nu_S, "nu_S");
  need_nonneg(nu_D, "nu_D");
  need_nonneg(mu_D, "mu_D");
  need_nonneg(beta_SR, "beta_SR");
  need_nonneg(beta_RD, "beta_RD");
  need_nonneg(E_R_max, "E_R_max");
  need_nonneg(E_T, "E_T");
  need_nonneg(nu_R, "nu_R");
  need_nonneg(mu_R, "mu_R");
  need_nonneg(beta_EI, "beta_EI");
  for (int k = 0; k < K; ++k) {
    if (E_S[k] > E_S_max[k] * (1.0 + 1e-12)) throw InvalidParameter("E_S exceeds E_S_max");
    if (std::abs(r_SR[k]) > 1.0 || std::abs(r_RD[k]) > 1.0)
      throw InvalidParameter("|r| must be <= 1");
  }
  if (std::abs(r_EI) > 1.0) throw InvalidParameter("|r_EI| must be <= 1");
  if (sum_E_R() > E_R_max * (1.0 + 1e-12)) throw InvalidParameter("sum of E_R exceeds E_R_max");
}

bool SystemConfig::homogeneous() const {
  return all_equal(E_S) && all_equal(E_R) && all_equal(nu_S) && all_equal(nu_D) &&
         all_equal(mu_D) && all_equal(beta_SR) && all_equal(beta_RD) && all_equal(r_SR) &&
         all_equal(r_RD);
}

void assign_random_phases(SystemConfig& cfg, double r0, double r_ei_abs, std::uint64_t seed) {
  Rng rng(seed);
  const auto draw = [&](double mag) {
    return std::polar(mag, std::numbers::pi * rng.uniform());
  };
  cfg.r_SR.resize(cfg.K);
  cfg.r_RD.resize(cfg.K);
  for (int k = 0; k < cfg.K; ++k) cfg.r_SR[k] = draw(r0);
  for (int k = 0; k < cfg.K; ++k) cfg.r_RD[k] = draw(r0);
  cfg.r_EI = draw(r_ei_abs);
}

void CorrelationMatrix::check() const {
  const auto n = C.rows();
  if (C.cols() != n || n < 1) throw InvalidParameter("correlation matrix must be square");
  if ((C - C.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidParameter("correlation matrix is not Hermitian");
  for (Eigen::Index d = 0; d < n; ++d)
    for (Eigen::Index i = 0; i + d < n; ++i) {
      if (std::abs(C(i, i + d) - C(0, d)) > 1e-12)
        throw InvalidParameter("correlation matrix is not Toeplitz");
    }
  if (std::abs(C(0, 0) - 1.0) > 1e-12) throw InvalidParameter("correlation diagonal must be 1");
  Eigen::SelfAdjointEigenSolver<CMat> es(C, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10) throw NotPsdError("correlation matrix is not PSD");
  if (es.eigenvalues().maxCoeff() > double(n) + 1e-9)
    throw InvalidParameter("spectral radius exceeds dimension");
}

CorrelationMatrix build_exponential_correlation(int n, cd r) {
  if (n < 1) throw InvalidParameter("dimension must be >= 1");
  if (std::abs(r) > 1.0 + 1e-15) throw InvalidParameter("|r| must be <= 1");
  CorrelationMatrix out;
  out.C.resize(n, n);
  std::vector<cd> pw(n);
  pw[0] = 1.0;
  for (int d = 1; d < n; ++d) pw[d] = pw[d - 1] * r;
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j) out.C(l, j) = l <= j ? pw[j - l] : std::conj(pw[l - j]);
  out.rank_deficient = n > 1 && std::abs(std::abs(r) - 1.0) < 1e-15;
  return out;
}

void normalize_phase(CVec& v) {
  if (v.size() == 0) return;
  const double m = v.cwiseAbs().maxCoeff();
  if (m == 0.0) return;
  Eigen::Index idx = 0;
  // first index within round-off of the max so symmetric vectors stay reproducible
  while (std::abs(v(idx)) < m * (1.0 - 1e-10)) ++idx;
  const cd ph = std::conj(v(idx)) / std::abs(v(idx));
  v *= ph;
  v(idx) = std::abs(v(idx));
}

HermitianEig hermitian_eig(const CMat& C) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(C));
  if (es.info() != Eigen::Success) throw Error("eigendecomposition failed");
  const auto n = C.rows();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  // ascending by (value, index), then reversed into descending order
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return es.eigenvalues()(a) < es.eigenvalues()(b);
  });
  std::reverse(order.begin(), order.end());
  HermitianEig out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.values(j) = es.eigenvalues()(order[j]);
    CVec v = es.eigenvectors().col(order[j]);
    normalize_phase(v);
    out.vectors.col(j) = v;
  }
  return out;
}

CMat hermitian_sqrt(const CMat& C) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(C));
  if (es.info() != Eigen::Success) throw Error("eigendecomposition failed");
  RVec ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -1e-8) throw NotPsdError("matrix has a negative eigenvalue");
    ev(i) = std::sqrt(std::max(ev(i), 0.0));
  }
  const CMat& V = es.eigenvectors();
  return V * ev.asDiagonal() * V.adjoint();
}

LinkCorrelation make_link(int n_rx, int n_tx, cd r) {
  LinkCorrelation L;
  L.rx = build_exponential_correlation(n_rx, r);
  L.tx = build_exponential_correlation(n_tx, r);
  L.rx_identity = r == cd(0.0) || n_rx == 1;
  L.tx_identity = r == cd(0.0) || n_tx == 1;
  L.rx_sqrt = L.rx_identity ? CMat(CMat::Identity(n_rx, n_rx)) : hermitian_sqrt(L.rx.C);
  L.tx_sqrt = L.tx_identity ? CMat(CMat::Identity(n_tx, n_tx)) : hermitian_sqrt(L.tx.C);
  return L;
}

ChannelStats build_channel_stats(const SystemConfig& cfg) {
  ChannelStats s;
  s.sr.reserve(cfg.K);
  s.rd.reserve(cfg.K);
  for (int k = 0; k < cfg.K; ++k) {
    s.sr.push_back(make_link(cfg.N_R, cfg.N_S, cfg.r_SR[k]));
    s.rd.push_back(make_link(cfg.N_T, cfg.N_D, cfg.r_RD[k]));
    s.sr_tx_eig.push_back(hermitian_eig(s.sr.back().tx.C));
    s.rd_tx_eig.push_back(hermitian_eig(s.rd.back().tx.C));
  }
  s.ei = make_link(cfg.N_R, cfg.N_T, cfg.r_EI);
  s.ei_rx_eig = hermitian_eig(s.ei.rx.C);
  s.ei_tx_eig = hermitian_eig(s.ei.tx.C);
  return s;
}

namespace {

CMat kronecker_draw(const CMat& rx_sqrt, bool rx_id, const CMat& tx_sqrt, bool tx_id, double beta,
                    Rng& rng) {
  CMat X = cgaussian(rx_sqrt.rows(), tx_sqrt.rows(), rng);
  if (beta == 0.0) return CMat::Zero(X.rows(), X.cols());
  if (!rx_id) X = rx_sqrt * X;
  if (!tx_id) X = X * tx_sqrt;
  return std::sqrt(beta) * X;
}

}  // namespace

CMat sample_channel(const CorrelationMatrix& C_rx, const CorrelationMatrix& C_tx, double beta,
                    Rng& rng) {
  if (beta < 0.0) throw InvalidParameter("beta must be >= 0");
  return kronecker_draw(hermitian_sqrt(C_rx.C), false, hermitian_sqrt(C_tx.C), false, beta, rng);
}

CMat sample_channel(const LinkCorrelation& link, double beta, Rng& rng) {
  if (beta < 0.0) throw InvalidParameter("beta must be >= 0");
  return kronecker_draw(link.rx_sqrt, link.rx_identity, link.tx_sqrt, link.tx_identity, beta, rng);
}

ChannelSet sample_channel_set(const SystemConfig& cfg, const ChannelStats& stats, Rng& rng) {
  ChannelSet cs;
  cs.H_SR.reserve(cfg.K);
  cs.H_RD.reserve(cfg.K);
  for (int k = 0; k < cfg.K; ++k) cs.H_SR.push_back(sample_channel(stats.sr[k], cfg.beta_SR[k], rng));
  for (int k = 0; k < cfg.K; ++k) cs.H_RD.push_back(sample_channel(stats.rd[k], cfg.beta_RD[k], rng));
  cs.H_EI = sample_channel(stats.ei, cfg.beta_EI, rng);
  return cs;
}

ChannelSet sample_channel_set(const SystemConfig& cfg, Rng& rng) {
  return sample_channel_set(cfg, build_channel_stats(cfg), rng);
}

}  // namespace mmfdr
