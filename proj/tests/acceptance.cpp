// SPDX-License-Identifier: Apache-2.0
// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "mmfdr/optimizer.hpp"

using namespace mmfdr;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

// max_seconds <= 0: no runtime bound
void criterion(int id, const std::string& name, const std::function<void(Outcome&)>& body,
               double max_seconds = 0.0) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (max_seconds > 0.0) o.require(dt < max_seconds, "runtime < " + std::to_string(max_seconds) + " s");
  std::printf("%s %2d %s:%s (%.2f s)\n", o.ok ? "PASS" : "FAIL", id, name.c_str(),
              o.detail.str().c_str(), dt);
  std::fflush(stdout);
  if (!o.ok) ++failures;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double mean_e2e(const SystemConfig& c, int A) {
  const ChannelStats st = build_channel_stats(c);
  const HiaStatistics h = prepare_hia(c, st, A, A);
  const auto sr = asym_rate_sr_hia(c, h);
  const auto rd = asym_rate_rd_hia(c, h);
  double s = 0.0;
  for (int k = 0; k < c.K; ++k) s += e2e_rate(sr[k].rate, rd[k].rate);
  return s / c.K;
}

SystemConfig scaled(int K, int N, double level, double r0, double r_ei, double beta_ei) {
  SystemConfig c = SystemConfig::uniform(K, N / K, N / K, N, N);
  c.set_all_nu_S(level);
  c.set_all_nu_D(level);
  c.set_all_mu_D(level);
  c.nu_R = c.mu_R = level;
  c.beta_EI = beta_ei;
  assign_random_phases(c, r0, r_ei, 1);
  return c;
}

SystemConfig random_config(Rng& rng, int K, int N_node, int N) {
  SystemConfig c = SystemConfig::uniform(K, N_node, N_node, N, N);
  for (int k = 0; k < K; ++k) {
    c.nu_S[k] = 0.1 * rng.uniform();
    c.nu_D[k] = 0.1 * rng.uniform();
    c.mu_D[k] = 0.1 * rng.uniform();
    c.beta_SR[k] = 0.2 + 2.0 * rng.uniform();
    c.beta_RD[k] = 0.2 + 2.0 * rng.uniform();
    c.E_S[k] = c.E_S_max[k] = 1.0 + 5.0 * rng.uniform();
  }
  c.nu_R = 0.1 * rng.uniform();
  c.mu_R = 0.1 * rng.uniform();
  c.beta_EI = 10.0 * rng.uniform();
  c.E_R_max = K * (1.0 + 5.0 * rng.uniform());
  c.set_all_E_R(c.E_R_max / K);
  assign_random_phases(c, 0.8 * rng.uniform(), 0.9 * rng.uniform(), rng.engine()());
  c.validate();
  return c;
}

bool feasible(const PosynomialProgram& p, const RVec& x) {
  for (const auto& g : p.ineq)
    if (eval(g, x) > 1.0) return false;
  return true;
}

double grid_oracle(const PosynomialProgram& p, double lo, double hi) {
  const int n = p.n, m = 7;
  RVec centre = RVec::Constant(n, 0.5 * (lo + hi));
  double half = 0.5 * (hi - lo), best = std::numeric_limits<double>::infinity();
  for (int round = 0; round < 80; ++round) {
    RVec best_y = centre;
    std::vector<int> idx(n, 0);
    for (;;) {
      RVec y(n);
      for (int i = 0; i < n; ++i) y(i) = centre(i) + half * (2.0 * idx[i] / (m - 1) - 1.0);
      const RVec x = y.array().exp();
      if (feasible(p, x)) {
        const double f = eval(p.objective, x);
        if (f < best) {
          best = f;
          best_y = y;
        }
      }
      int i = 0;
      while (i < n && ++idx[i] == m) idx[i++] = 0;
      if (i == n) break;
    }
    centre = best_y;
    half *= 0.75;
  }
  return best;
}

PosynomialProgram random_gp(Rng& rng, int n) {
  PosynomialProgram p;
  p.n = n;
  const auto exps = [&] {
    RVec a(n);
    for (int i = 0; i < n; ++i) a(i) = std::round(4.0 * rng.uniform() - 2.0) * 0.5;
    return a;
  };
  for (int t = 0; t < 3; ++t) p.objective.push_back({0.5 + rng.uniform(), exps()});
  for (int t = 0; t < 2; ++t) {
    Posynomial g;
    for (int u = 0; u < 3; ++u) g.push_back({0.5 + rng.uniform(), exps()});
    const double s = eval(g, RVec::Ones(n)) / (0.5 + 0.4 * rng.uniform());
    for (auto& mm : g) mm.c /= s;
    p.ineq.push_back(g);
  }
  for (int i = 0; i < n; ++i) {
    p.ineq.push_back({monomial(n, 1.0 / 20.0, {{i, 1.0}})});
    p.ineq.push_back({monomial(n, 0.05, {{i, -1.0}})});
  }
  return p;
}

// min E_S + E_R reaching the target SINR for a single pair: scan E_R, bisect E_S
double single_pair_min_power(const SinrModel& m, const PowerCaps& caps, double target) {
  double best = std::numeric_limits<double>::infinity();
  const int n = 20000;
  for (int i = 1; i <= n; ++i) {
    const double er = caps.E_R_max * i / n;
    if (m.gamma_rd(0, {er}) < target) continue;
    if (m.gamma_sr(0, {caps.E_S_max[0]}, {er}) < target) continue;
    double lo = 0.0, hi = caps.E_S_max[0];
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (m.gamma_sr(0, {mid}, {er}) >= target ? hi : lo) = mid;
    }
    best = std::min(best, er + hi);
  }
  return best;
}

}  // namespace

int main() {
  criterion(1, "ceiling effect with single-antenna nodes", [](Outcome& o) {
    const double lvl = 0.15 * 0.15;
    std::vector<double> r;
    double last_gap = std::numeric_limits<double>::infinity();
    SystemConfig c;
    for (int N : {32, 64, 128}) {
      c = SystemConfig::uniform(4, 1, 1, N, N);
      c.set_all_E_S(db_to_lin(8.0));
      c.set_all_E_R(db_to_lin(8.0));
      c.set_all_nu_S(lvl);
      c.set_all_mu_D(lvl);
      c.nu_R = c.mu_R = 0.01;
      r.push_back(simplified_upper(c));
      const double lim = c.prefactor() * std::log2(1.0 + 1.0 / lvl);
      const double gap = rel(r.back(), lim);
      o.require(gap < last_gap, "K/N correction shrinks");
      last_gap = gap;
    }
    const double spread = (*std::max_element(r.begin(), r.end()) - *std::min_element(r.begin(), r.end())) /
                          *std::min_element(r.begin(), r.end());
    const double lim = c.prefactor() * std::log2(1.0 + 1.0 / lvl);
    o.detail << " rates " << r[0] << ", " << r[1] << ", " << r[2] << "; spread " << spread
             << "; limit " << lim << " (gap " << last_gap << ")";
    o.require(spread < 0.02, "spread < 2%");
    o.require(last_gap < 0.05, "N=128 within 5% of the limit");
  }, 1.0);

  criterion(2, "rate grows without bound when node arrays scale", [](Outcome& o) {
    std::vector<double> r;
    for (int N : {32, 64, 128}) r.push_back(mean_e2e(scaled(4, N, 0.15 * 0.15, 0.2, 0.8, db_to_lin(5.0)), std::max(4, 2 * N / 3)));
    o.detail << " per-pair e2e " << r[0] << " -> " << r[1] << " -> " << r[2];
    o.require(r[1] - r[0] > 0.5, "gain 32->64 > 0.5");
    o.require(r[2] - r[1] > 0.5, "gain 64->128 > 0.5");
  }, 1.0);

  criterion(3, "simulation and closed forms agree", [](Outcome& o) {
    SystemConfig c = SystemConfig::uniform(4, 32, 32, 128, 128);
    c.set_all_nu_S(0.05);
    c.set_all_nu_D(0.05);
    c.set_all_mu_D(0.05);
    c.nu_R = c.mu_R = 0.05;
    c.beta_EI = db_to_lin(5.0);
    assign_random_phases(c, 0.4, 0.7, 1);
    const ChannelStats st = build_channel_stats(c);
    const HiaStatistics h = prepare_hia(c, st, 85, 85);
    RateOptions ro;
    ro.trials = 1000;
    ro.seed = 7;
    const RateReport rep = evaluate_rates(c, st, h, ro);
    double worst_term = 0.0, worst_rate = 0.0;
    const auto term = [&](double a, double m, const char* what, int k) {
      if (a == 0.0 && m == 0.0) return;
      const double e = rel(a, m);
      worst_term = std::max(worst_term, e);
      if (e > 0.10) o.require(false, std::string(what) + " pair " + std::to_string(k));
    };
    for (int k = 0; k < 4; ++k) {
      const PairRates& p = rep.pairs[k];
      const TermBreakdown &as = p.sr_asym_terms, &ms = p.sr_mc_terms;
      term(as.desired, ms.desired, "SR desired", k);
      term(as.var, ms.var, "SR var", k);
      term(as.ei, ms.ei, "SR EI", k);
      term(as.mui, ms.mui, "SR MUI", k);
      term(as.dt, ms.dt, "SR tx distortion", k);
      term(as.dr, ms.dr, "SR rx distortion", k);
      term(as.awgn, ms.awgn, "SR noise", k);
      const TermBreakdown &ad = p.rd_asym_terms, &md = p.rd_mc_terms;
      term(ad.desired, md.desired, "RD desired", k);
      term(ad.var, md.var, "RD var", k);
      term(ad.mui, md.mui, "RD MUI", k);
      term(ad.dt, md.dt, "RD tx distortion", k);
      term(ad.dr, md.dr, "RD rx distortion", k);
      for (auto [a, m] : {std::pair{p.sr_asym, p.sr_mc}, std::pair{p.rd_asym, p.rd_mc}}) {
        worst_rate = std::max(worst_rate, rel(a, m));
        if (rel(a, m) > 0.05) o.require(false, "rate pair " + std::to_string(k));
      }
    }
    o.detail << " worst term deviation " << worst_term << ", worst rate deviation " << worst_rate;
  }, 300.0);

  criterion(4, "inner zero forcing is exact", [](Outcome& o) {
    Rng rng(404);
    double worst_zf = 0.0, worst_norm = 0.0;
    for (int t = 0; t < 100; ++t) {
      const int K = 2 + t % 3;
      const SystemConfig c = random_config(rng, K, 2, 16 + 4 * (t % 4));
      const ChannelStats st = build_channel_stats(c);
      const int A = std::max(K, 2 * c.N_R / 3);
      const HiaStatistics h = prepare_hia(c, st, A, A);
      Rng tr = Rng::for_trial(t, 0);
      const ChannelSet ch = sample_channel_set(c, st, tr);
      const EstimateSet est = estimate_effective_channels(c, h, ch, tr);
      CMat Hs(A, K), Hd(A, K);
      for (int k = 0; k < K; ++k) {
        Hs.col(k) = est.h_hat_SR[k];
        Hd.col(k) = est.h_hat_RD[k];
      }
      const InnerZf z = inner_zf(Hs, Hd);
      worst_zf = std::max(worst_zf, (z.W_R_inner.adjoint() * Hs - CMat::Identity(K, K)).cwiseAbs().maxCoeff());
      for (int k = 0; k < K; ++k) worst_norm = std::max(worst_norm, std::abs(z.W_T_inner.col(k).norm() - 1.0));
    }
    o.detail << " max |W^H H - I| " << worst_zf << ", max |norm - 1| " << worst_norm;
    o.require(worst_zf < 1e-8, "ZF identity");
    o.require(worst_norm < 1e-8, "unit-norm transmit columns");
  });

  criterion(5, "LMMSE estimation contracts", [](Outcome& o) {
    Rng rng(505);
    double worst_eig = 0.0;
    for (int t = 0; t < 100; ++t) {
      const SystemConfig c = random_config(rng, 2, 2, 12);
      const ChannelStats st = build_channel_stats(c);
      const HiaStatistics h = prepare_hia(c, st, 8, 8);
      for (const auto* links : {&h.sr, &h.rd})
        for (const LinkStats& L : *links) {
          const double e = Eigen::SelfAdjointEigenSolver<CMat>(hermitian_part(L.C_eff - L.C_hat))
                               .eigenvalues()
                               .minCoeff();
          worst_eig = std::min(worst_eig, e / std::max(1.0, L.C_eff.norm()));
        }
    }
    o.require(worst_eig >= -1e-10, "C - C_hat PSD");

    SystemConfig ideal = SystemConfig::uniform(2, 2, 2, 12, 12);
    ideal.E_T = 1e6;
    assign_random_phases(ideal, 0.5, 0.5, 3);
    const HiaStatistics hi = prepare_hia(ideal, build_channel_stats(ideal), 8, 8);
    double worst_err = 0.0;
    for (const LinkStats& L : hi.sr) worst_err = std::max(worst_err, (L.tr_eff - L.tr_hat) / L.tr_eff);
    for (const LinkStats& L : hi.rd) worst_err = std::max(worst_err, (L.tr_eff - L.tr_hat) / L.tr_eff);
    o.require(worst_err < 1e-3, "high-E_T error trace");

    SystemConfig c = SystemConfig::uniform(2, 3, 3, 12, 10);
    c.set_all_nu_S(0.1);
    c.set_all_nu_D(0.1);
    c.mu_R = 0.05;
    assign_random_phases(c, 0.5, 0.7, 21);
    const ChannelStats st = build_channel_stats(c);
    const HiaStatistics h = prepare_hia(c, st, 6, 6);
    const int n = 10000, A = 6;
    CMat cross = CMat::Zero(A, A);
    double pe = 0.0, ph = 0.0;
    for (int t = 0; t < n; ++t) {
      Rng tr = Rng::for_trial(77, t);
      const ChannelSet ch = sample_channel_set(c, st, tr);
      const EstimateSet e = estimate_effective_channels(c, h, ch, tr);
      const CVec err = e.h_SR[0] - e.h_hat_SR[0];
      cross += e.h_hat_SR[0] * err.adjoint();
      ph += e.h_hat_SR[0].squaredNorm();
      pe += err.squaredNorm();
    }
    const double cc = (cross / n).norm() / std::sqrt((ph / n) * (pe / n));
    o.detail << " min eig " << worst_eig << ", error share at high E_T " << worst_err
             << ", normalized cross-correlation " << cc;
    o.require(cc < 0.05, "estimate/error cross-correlation");
  });

  criterion(6, "fixed point self-consistency", [](Outcome& o) {
    Rng rng(606);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      const int K = 1 + t % 8;
      SystemConfig c = random_config(rng, K, 1, 8 + 4 * (t % 5));
      const ChannelStats st = build_channel_stats(c);
      for (int k = 0; k < K; ++k) {
        const FixedPointState fp = fixed_point_psi(c, st, k);
        worst = std::max(worst, fixed_point_residual(c, st, k, fp));
      }
    }
    SystemConfig c1 = random_config(rng, 1, 1, 16);
    const FixedPointState fp = fixed_point_psi(c1, build_channel_stats(c1), 0);
    const double closed = (fp.Psi - CMat::Identity(16, 16) / (fp.theta + fp.rho)).cwiseAbs().maxCoeff();
    o.detail << " worst residual " << worst << ", K=1 closed-form gap " << closed;
    o.require(worst < 1e-8, "residual");
    o.require(closed < 1e-12, "K=1 closed form");
  });

  criterion(7, "geometric programming solver", [](Outcome& o) {
    PosynomialProgram a;
    a.n = 1;
    a.objective = {monomial(1, 1.0, {{0, 1.0}})};
    a.ineq = {{monomial(1, 2.0, {{0, -1.0}})}};
    const GpResult ra = solve_gp(a);
    PosynomialProgram b;
    b.n = 2;
    b.objective = {monomial(2, 1.0, {{0, -1.0}, {1, -1.0}})};
    b.ineq = {{monomial(2, 0.5, {{0, 1.0}}), monomial(2, 0.5, {{1, 1.0}})}};
    const GpResult rb = solve_gp(b);
    o.require(std::abs(ra.x(0) - 2.0) < 1e-6, "min x s.t. 2/x <= 1");
    o.require(std::abs(rb.x(0) - 1.0) < 1e-6 && std::abs(rb.x(1) - 1.0) < 1e-6, "min 1/(xy) s.t. (x+y)/2 <= 1");
    Rng rng(707);
    double worst = 0.0;
    for (int t = 0; t < 5; ++t) {
      const PosynomialProgram p = random_gp(rng, 5);
      const GpResult r = solve_gp(p);
      const double want = grid_oracle(p, std::log(0.05), std::log(20.0));
      worst = std::max(worst, rel(r.objective, want));
    }
    o.detail << " trivial errors " << std::abs(ra.x(0) - 2.0) << ", " << std::abs(rb.x(0) - 1.0)
             << "; worst random 5-variable gap " << worst;
    o.require(worst < 1e-3, "random GPs within 0.1%");
  });

  criterion(8, "successive GP power control", [](Outcome& o) {
    Rng rng(808);
    bool mono = true;
    for (int t = 0; t < 20; ++t) {
      const int K = 1 + t % 4;
      const SystemConfig c = random_config(rng, K, 2, 16);
      const SinrModel m = build_sinr_model(c, build_channel_stats(c), 10, 10);
      const PowerControlResult r = power_control_fixed_dof(m, caps_of(c), default_init(caps_of(c), K));
      for (std::size_t i = 1; i < r.objective.size(); ++i)
        if (r.objective[i] < r.objective[i - 1] * (1.0 - 1e-7)) mono = false;
    }
    o.require(mono, "monotone objective");
    double worst = 0.0;
    for (int t = 0; t < 3; ++t) {
      const SystemConfig c = random_config(rng, 1, 2, 16);
      const SinrModel m = build_sinr_model(c, build_channel_stats(c), 10, 10);
      const PowerCaps caps = caps_of(c);
      const PowerControlResult r = power_control_fixed_dof(m, caps, default_init(caps, 1));
      double best = 0.0;
      for (int i = 1; i <= 200; ++i)
        for (int j = 1; j <= 200; ++j)
          best = std::max(best, std::log2(1.0 + m.gamma(0, {caps.E_S_max[0] * i / 200}, {caps.E_R_max * j / 200})));
      worst = std::max(worst, rel(r.se, best));
    }
    o.detail << " monotone on 20 configs: " << (mono ? "yes" : "no") << "; K=1 grid gap " << worst;
    o.require(worst < 0.01, "K=1 grid within 1%");
  });

  criterion(9, "joint DOF and power optimization", [](Outcome& o) {
    SystemConfig c = SystemConfig::uniform(2, 2, 2, 12, 12);
    c.set_all_nu_S(0.02);
    c.set_all_nu_D(0.02);
    c.set_all_mu_D(0.02);
    c.nu_R = c.mu_R = 0.02;
    c.beta_EI = 3.0;
    assign_random_phases(c, 0.3, 0.6, 13);
    const ChannelStats st = build_channel_stats(c);
    JdpoOptions jo;
    for (int a = 2; a <= 12; ++a) {
      jo.subset_R.push_back(a);
      jo.subset_T.push_back(a);
    }
    const JdpoResult r = jdpo(c, st, jo);
    PowerControlOptions pc;
    pc.prefactor = c.prefactor();
    double best = 0.0;
    for (int ar = 2; ar <= 12; ++ar)
      for (int at = 2; at <= 12; ++at)
        best = std::max(best, power_control_fixed_dof(build_sinr_model(c, st, ar, at), caps_of(c),
                                                      default_init(caps_of(c), 2), pc).se);
    const double gap = (best - r.best.se) / best;
    o.detail << " JDPO " << r.best.se << " vs exhaustive " << best << " (gap " << gap << ")";
    o.require(gap < 0.02, "within 2% of exhaustive");

    for (double bei_db : {5.0, 15.0, 25.0}) {
      SystemConfig d = scaled(4, 32, 0.05, 0.4, 0.7, db_to_lin(bei_db));
      const ChannelStats sd = build_channel_stats(d);
      const JdpoResult j = jdpo(d, sd);
      PowerControlOptions p2;
      p2.prefactor = d.prefactor();
      const double base = power_control_fixed_dof(build_sinr_model(d, sd, 21, 21), caps_of(d),
                                                  default_init(caps_of(d), 4), p2).se;
      o.detail << "; beta_EI " << bei_db << " dB: " << j.best.se << " >= " << base;
      o.require(j.best.se >= base * (1.0 - 1e-9), "JDPO >= fixed-DOF baseline");
    }
  });

  criterion(10, "echo term decays with the array", [](Outcome& o) {
    SystemConfig c = SystemConfig::uniform(4, 1, 1, 32, 32);
    c.beta_EI = db_to_lin(5.0);
    c.set_all_nu_S(0.01);
    c.nu_R = c.mu_R = 0.01;
    assign_random_phases(c, 0.2, 0.8, 1);
    const ScalingTable t = scaling_probe(c, {32, 64, 128});
    o.detail << " log-log slope of the SR echo term " << t.sr_slope.ei;
    o.require(t.sr_slope.ei <= -0.9, "slope <= -0.9");
  });

  criterion(11, "hardware quality traded for antennas", [](Outcome& o) {
    const double a = mean_e2e(scaled(4, 64, 0.05, 0.4, 0.7, db_to_lin(5.0)), 42);
    const double b = mean_e2e(scaled(4, 128, 0.10, 0.4, 0.7, db_to_lin(5.0)), 85);
    o.detail << " (N=64, 0.05) " << a << " vs (N=128, 0.10) " << b << " (change " << (b - a) / a << ")";
    o.require(rel(b, a) < 0.10, "within 10%");
  });

  criterion(12, "energy-efficiency variant", [](Outcome& o) {
    const SystemConfig c = scaled(4, 32, 0.05, 0.2, 0.8, db_to_lin(10.0));
    const ChannelStats st = build_channel_stats(c);
    const double r_t = 4.0;
    const EeResult r = jdpo_ee(c, st, r_t);
    o.detail << " target " << r_t << " reached " << r.se << " with power " << r.total_power;
    o.require(std::abs(r.se - r_t) < 1e-3, "target SE within 1e-3");

    Rng rng(1212);
    double worst = 0.0;
    for (int t = 0; t < 3; ++t) {
      const SystemConfig s = random_config(rng, 1, 2, 16);
      const SinrModel m = build_sinr_model(s, build_channel_stats(s), 10, 10);
      const PowerCaps caps = caps_of(s);
      const double top = power_control_fixed_dof(m, caps, default_init(caps, 1)).se;
      const double rt = 0.6 * top;
      const EeResult e = min_power_fixed_dof(m, caps, rt, 1.0);
      const double want = single_pair_min_power(m, caps, std::exp2(rt) - 1.0);
      worst = std::max(worst, rel(e.total_power, want));
    }
    o.detail << "; K=1 bisection gap " << worst;
    o.require(worst < 0.01, "K=1 within 1% of bisection");
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
