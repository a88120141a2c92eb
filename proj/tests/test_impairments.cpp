// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "mmfdr/impairments.hpp"
#include "mmfdr/transceiver.hpp"

using namespace mmfdr;

TEST_CASE("transmit distortion covariance") {
  RVec d(3);
  d << 1.0, 2.0, 0.5;
  CHECK(tx_distortion_cov(d, 0.0).diag.norm() == 0.0);
  RVec ones = RVec::Ones(2);
  const auto c = tx_distortion_cov(ones, 0.04);
  CHECK(c.diag(0) == doctest::Approx(0.04));
  CHECK(c.diag(1) == doctest::Approx(0.04));
  CHECK(c.kind == DistortionKind::kTransmit);
  CHECK(c.level == 0.04);
  RVec neg = ones;
  neg(1) = -1.0;
  CHECK_THROWS_AS(tx_distortion_cov(neg, 0.1), InvalidParameter);
  CHECK_THROWS_AS(tx_distortion_cov(ones, -0.1), InvalidParameter);
}

TEST_CASE("beamformed source signal distortion is nu E_S |p_i|^2") {
  const auto C = build_exponential_correlation(4, std::polar(0.5, 0.7));
  const CVec p = source_bf(C);
  const double E_S = 3.0, nu = 0.05;
  const RVec sig = (E_S * p * p.adjoint()).diagonal().real();
  const auto c = tx_distortion_cov(sig, nu);
  for (int i = 0; i < 4; ++i) CHECK(c.diag(i) == doctest::Approx(nu * E_S * std::norm(p(i))));
}

TEST_CASE("receive distortion covariance") {
  RVec d(2);
  d << 2.0, 3.0;
  CHECK(rx_distortion_cov(d, 0.0).diag.norm() == 0.0);
  const auto c = rx_distortion_cov(d, 0.01);
  CHECK(c.diag(0) == doctest::Approx(0.02));
  CHECK(c.diag(1) == doctest::Approx(0.03));
  CHECK(c.kind == DistortionKind::kReceive);
}

TEST_CASE("sampled distortion moments") {
  Rng rng(4);
  RVec d(2);
  d << 0.5, 0.5;
  const auto c = rx_distortion_cov(d, 1.0);
  const int n = 10000;
  CVec mean = CVec::Zero(2);
  RVec var = RVec::Zero(2);
  cd cross = 0.0;
  for (int t = 0; t < n; ++t) {
    const CVec v = sample_distortion(c, rng);
    mean += v;
    var += v.cwiseAbs2();
    cross += v(0) * std::conj(v(1));
  }
  mean /= n;
  var /= n;
  CHECK(std::abs(mean(0)) < 0.03);
  CHECK(var(0) == doctest::Approx(0.5).epsilon(0.05));
  CHECK(var(1) == doctest::Approx(0.5).epsilon(0.05));
  CHECK(std::abs(cross / double(n)) / 0.5 < 0.05);
}

TEST_CASE("sampled distortion with zero entries") {
  Rng rng(5);
  CHECK(sample_distortion(tx_distortion_cov(RVec::Zero(3), 0.2), rng).norm() == 0.0);
  RVec d(2);
  d << 1.0, 0.0;
  const CVec v = sample_distortion(tx_distortion_cov(d, 1.0), rng);
  CHECK(v(1) == cd(0.0));
  CHECK(v(0) != cd(0.0));
}

TEST_CASE("distortion is linear and monotone in its inputs") {
  RVec d(3);
  d << 0.3, 1.2, 2.0;
  const auto a = tx_distortion_cov(d, 0.07);
  const auto b = tx_distortion_cov(2.5 * d, 0.07);
  CHECK((b.diag - 2.5 * a.diag).norm() < 1e-14);
  const auto c = tx_distortion_cov(d, 0.08);
  CHECK((c.diag.array() >= a.diag.array()).all());
}

TEST_CASE("relay receive distortion closed form") {
  SystemConfig cfg = SystemConfig::uniform(2, 1, 1, 8, 8);
  cfg.set_all_nu_S(0.0);
  cfg.nu_R = 0.0;
  cfg.mu_R = 0.0;
  CHECK(relay_rx_distortion_cov_closed_form(cfg).diag.norm() == 0.0);
  cfg.mu_R = 0.01;
  const auto only_mu = relay_rx_distortion_cov_closed_form(cfg);
  CHECK(only_mu.diag.size() == 8);
  for (int i = 0; i < 8; ++i) CHECK(only_mu.diag(i) == doctest::Approx(0.01));

  cfg.mu_R = 0.02;
  cfg.nu_S = {0.01, 0.03};
  cfg.E_S = {2.0, 5.0};
  cfg.E_S_max = cfg.E_S;
  cfg.beta_SR = {1.0, 0.5};
  cfg.beta_EI = 3.0;
  cfg.nu_R = 0.04;
  cfg.E_R = {1.0, 2.0};
  // term-by-term arithmetic evaluated separately
  CHECK(relay_rx_distortion_cov_closed_form(cfg).diag(3) == doctest::Approx(0.3819).epsilon(1e-12));

  cfg.N_S = 2;
  CHECK_THROWS_AS(relay_rx_distortion_cov_closed_form(cfg), ModeError);
}

TEST_CASE("relay transmit distortion closed form traces to nu_R sum E_R") {
  SystemConfig cfg = SystemConfig::uniform(3, 1, 1, 6, 10);
  cfg.nu_R = 0.05;
  cfg.E_R = {1.0, 2.0, 0.5};
  const auto th = relay_tx_distortion_cov_closed_form(cfg);
  const auto Ct = build_exponential_correlation(10, std::polar(0.8, 0.2));
  const double tr = (Ct.C * th.diag.cast<cd>().asDiagonal()).trace().real();
  CHECK(tr == doctest::Approx(0.05 * 3.5));
  cfg.beta_EI = 2.0;
  CHECK(relay_rho(cfg, Ct.C, th) == doctest::Approx(2.0 * 0.05 * 3.5 + 1.0));
}

TEST_CASE("expected EI covariance") {
  SystemConfig cfg = SystemConfig::uniform(2, 1, 1, 4, 5);
  cfg.beta_EI = 2.0;
  const auto C = build_exponential_correlation(4, std::polar(0.6, 1.0));
  const CMat I5 = CMat::Identity(5, 5);

  SystemConfig off = cfg;
  off.E_R = {0.0, 0.0};
  off.nu_R = 0.1;
  CHECK(ei_expected_cov(off, C.C, I5, relay_tx_distortion_cov_closed_form(off)).norm() == 0.0);

  DistortionCov th;
  th.diag = RVec::Constant(5, 0.3);
  th.level = 0.1;
  const CMat got = ei_expected_cov(cfg, C.C, I5, th);
  const CMat ref = (1.0 + 1.0 / 0.1) * 2.0 * 0.3 * 5.0 * C.C;
  CHECK((got - ref).norm() < 1e-12);
}

TEST_CASE("expected EI covariance against Monte Carlo") {
  SystemConfig cfg = SystemConfig::uniform(2, 1, 1, 4, 5);
  cfg.beta_EI = 1.5;
  cfg.E_R = {1.0, 2.0};
  cfg.E_R_max = 3.0;
  cfg.nu_R = 0.2;
  const auto Crx = build_exponential_correlation(4, std::polar(0.7, 0.5));
  const auto Ctx = build_exponential_correlation(5, std::polar(0.5, 2.0));
  const auto th = relay_tx_distortion_cov_closed_form(cfg);
  const CMat model = ei_expected_cov(cfg, Crx.C, Ctx.C, th);
  // relay transmit covariance: even signal spread plus distortion
  const CMat Omega = (RVec::Constant(5, cfg.sum_E_R() / 5.0) + th.diag).cast<cd>().asDiagonal();
  Rng rng(8);
  CMat acc = CMat::Zero(4, 4);
  const int n = 10000;
  for (int t = 0; t < n; ++t) {
    const CMat H = sample_channel(Crx, Ctx, cfg.beta_EI, rng);
    acc += H * Omega * H.adjoint();
  }
  acc /= n;
  CHECK((acc - model).norm() / model.norm() < 0.05);

  SystemConfig ideal = cfg;
  ideal.nu_R = 0.0;
  const auto th0 = relay_tx_distortion_cov_closed_form(ideal);
  const CMat m0 = ei_expected_cov(ideal, Crx.C, Ctx.C, th0);
  const CMat ref0 = ideal.beta_EI * Ctx.C.trace().real() * ideal.sum_E_R() / 5.0 * Crx.C;
  CHECK((m0 - ref0).norm() < 1e-12);
}
