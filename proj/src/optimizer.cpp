// SPDX-License-Identifier: Apache-2.0
#include "mmfdr/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

namespace mmfdr {

double SinrModel::gamma_sr(int k, const std::vector<double>& E_S,
                           const std::vector<double>& E_R) const {
  double den = awgn_sr(k);
  for (int j = 0; j < K; ++j) den += aR(k, j) * E_S[j] + bR(k, j) * E_R[j];
  return E_S[k] / den;
}

double SinrModel::gamma_rd(int k, const std::vector<double>& E_R) const {
  double den = awgn_rd(k);
  for (int j = 0; j < K; ++j) den += bD(k, j) * E_R[j];
  return gain_rd(k) * E_R[k] / den;
}

SinrModel build_sinr_model(const AsymCoefficients& c) {
  const int K = int(c.sr.gain.size());
  SinrModel m;
  m.K = K;
  m.aR = RMat::Zero(K, K);
  m.bR = RMat::Zero(K, K);
  m.bD = RMat::Zero(K, K);
  m.awgn_sr = RVec::Zero(K);
  m.gain_rd = RVec::Zero(K);
  m.awgn_rd = RVec::Zero(K);
  for (int k = 0; k < K; ++k) {
    const double g = c.sr.gain(k);
    if (!(g > 0.0) || !(c.rd.gain(k) > 0.0))
      throw InvalidParameter("pair " + std::to_string(k) + " has no usable effective channel");
    for (int j = 0; j < K; ++j) {
      m.aR(k, j) = (c.sr.mui(k, j) + c.sr.dt(k, j) + c.sr.dr_s(k, j)) / g;
      m.bR(k, j) = (c.sr.ei(k, j) + c.sr.dr_r(k, j)) / g;
      m.bD(k, j) = c.rd.mui(k, j) + c.rd.dt(k, j) + c.rd.dr(k, j);
    }
    m.aR(k, k) += c.sr.var(k) / g;
    m.bD(k, k) += c.rd.var(k);
    m.awgn_sr(k) = (c.sr.dr0(k) + c.sr.awgn(k)) / g;
    m.gain_rd(k) = c.rd.gain(k);
    m.awgn_rd(k) = c.rd.dr0(k) + c.rd.awgn(k);
  }
  return m;
}

SinrModel build_sinr_model(const SystemConfig& cfg, const HiaStatistics& hia, AsymForm form) {
  return build_sinr_model(asym_coefficients(cfg, hia, form));
}

SinrModel build_sinr_model(const SystemConfig& cfg, const ChannelStats& stats, int A_R, int A_T,
                           AsymForm form) {
  return build_sinr_model(cfg, prepare_hia(cfg, stats, A_R, A_T), form);
}

PowerCaps caps_of(const SystemConfig& cfg) { return {cfg.E_S_max, cfg.E_R_max}; }

std::pair<double, double> monomial_approx(double g) {
  if (!(g > 0.0) || !std::isfinite(g)) throw InvalidParameter("gamma_hat must be positive and finite");
  const double w = g / (1.0 + g);
  // theta = (1+g) g^-w, evaluated in logs to stay finite for large g
  const double theta = std::exp(std::log1p(g) - w * std::log(g));
  return {w, theta};
}

PowerAllocation default_init(const PowerCaps& caps, int K) {
  PowerAllocation a;
  a.E_S = caps.E_S_max;
  a.E_R.assign(K, caps.E_R_max / K);
  return a;
}

double se_of(const SinrModel& model, const PowerAllocation& a, double prefactor) {
  double se = 0.0;
  for (int k = 0; k < model.K; ++k) se += rate_from_sinr(prefactor, model.gamma(k, a.E_S, a.E_R));
  return se;
}

namespace {

// variable layout: E_S (0..K-1), E_R (K..2K-1), gamma (2K..3K-1)
struct Layout {
  int K;
  int es(int k) const { return k; }
  int er(int k) const { return K + k; }
  int g(int k) const { return 2 * K + k; }
  int n() const { return 3 * K; }
};

void add_term(Posynomial& p, int n, double c, std::initializer_list<std::pair<int, double>> pw) {
  if (c > 0.0) p.push_back(monomial(n, c, pw));
}

// C1 to C4 on (E_S, E_R, gamma)
std::vector<Posynomial> sinr_constraints(const SinrModel& m, const PowerCaps& caps) {
  const Layout L{m.K};
  const int n = L.n();
  std::vector<Posynomial> out;
  for (int k = 0; k < m.K; ++k) {
    Posynomial c1;
    for (int j = 0; j < m.K; ++j) {
      add_term(c1, n, m.aR(k, j), {{L.g(k), 1.0}, {L.es(j), 1.0}, {L.es(k), -1.0}});
      add_term(c1, n, m.bR(k, j), {{L.g(k), 1.0}, {L.er(j), 1.0}, {L.es(k), -1.0}});
    }
    add_term(c1, n, m.awgn_sr(k), {{L.g(k), 1.0}, {L.es(k), -1.0}});
    out.push_back(std::move(c1));

    Posynomial c2;
    const double g = m.gain_rd(k);
    for (int j = 0; j < m.K; ++j)
      add_term(c2, n, m.bD(k, j) / g, {{L.g(k), 1.0}, {L.er(j), 1.0}, {L.er(k), -1.0}});
    add_term(c2, n, m.awgn_rd(k) / g, {{L.g(k), 1.0}, {L.er(k), -1.0}});
    out.push_back(std::move(c2));
  }
  for (int k = 0; k < m.K; ++k) {
    if (!(caps.E_S_max[k] > 0.0)) throw InvalidParameter("source power caps must be > 0");
    out.push_back({monomial(n, 1.0 / caps.E_S_max[k], {{L.es(k), 1.0}})});
  }
  if (!(caps.E_R_max > 0.0)) throw InvalidParameter("relay power cap must be > 0");
  Posynomial c4;
  for (int k = 0; k < m.K; ++k) c4.push_back(monomial(n, 1.0 / caps.E_R_max, {{L.er(k), 1.0}}));
  out.push_back(std::move(c4));
  return out;
}

PowerAllocation unpack(const RVec& x, int K) {
  PowerAllocation a;
  for (int k = 0; k < K; ++k) {
    a.E_S.push_back(x(k));
    a.E_R.push_back(x(K + k));
  }
  return a;
}

std::vector<double> gammas(const SinrModel& m, const PowerAllocation& a) {
  std::vector<double> g(m.K);
  for (int k = 0; k < m.K; ++k) g[k] = m.gamma(k, a.E_S, a.E_R);
  return g;
}

double prod1p(const std::vector<double>& g) {
  double p = 1.0;
  for (double x : g) p *= 1.0 + x;
  return p;
}

}  // namespace

PowerControlResult power_control_fixed_dof(const SinrModel& model, const PowerCaps& caps,
                                           const PowerAllocation& init,
                                           const PowerControlOptions& opt) {
  const int K = model.K;
  const Layout L{K};
  PowerControlResult r;
  r.alloc = init;
  r.alloc.E_S.resize(K);
  r.alloc.E_R.resize(K);
  for (int k = 0; k < K; ++k)
    if (init.E_S[k] > caps.E_S_max[k] * (1 + 1e-12)) r.init_violates = true;
  if (std::accumulate(init.E_R.begin(), init.E_R.end(), 0.0) > caps.E_R_max * (1 + 1e-12))
    r.init_violates = true;

  const std::vector<Posynomial> cons = sinr_constraints(model, caps);
  std::vector<double> g_hat = gammas(model, r.alloc);
  r.objective.push_back(prod1p(g_hat));
  for (int it = 0; it < opt.max_iter; ++it) {
    PosynomialProgram prog;
    prog.n = L.n();
    prog.ineq = cons;
    Monomial obj{1.0, RVec::Zero(prog.n)};
    for (int k = 0; k < K; ++k) obj.a(L.g(k)) = -monomial_approx(g_hat[k]).first;
    prog.objective = {obj};
    const GpResult s = solve_gp(prog, opt.gp);
    PowerAllocation next = unpack(s.x, K);
    next.A_R = init.A_R;
    next.A_T = init.A_T;
    const std::vector<double> g_next = gammas(model, next);
    double diff = 0.0;
    for (int k = 0; k < K; ++k) diff = std::max(diff, std::abs(g_next[k] - g_hat[k]));
    r.alloc = next;
    g_hat = g_next;
    r.objective.push_back(prod1p(g_hat));
    r.iterations = it + 1;
    if (diff < opt.tol) break;
  }
  r.gamma = g_hat;
  r.se = 0.0;
  for (double g : g_hat) r.se += rate_from_sinr(opt.prefactor, g);
  return r;
}

std::vector<int> default_dof_subset(int K, int N) {
  const int step = std::max(10, N / K);
  std::vector<int> s;
  for (int a = K; a <= N; a += step) s.push_back(a);
  const int a0 = std::max(K, 2 * N / 3);
  if (std::find(s.begin(), s.end(), a0) == s.end()) s.push_back(a0);
  std::sort(s.begin(), s.end());
  return s;
}

namespace {

// generic alternating 1-D DOF sweep maximizing `score`; NaN marks a skipped point
template <class Eval>
std::pair<int, int> dof_sweep(const SystemConfig& cfg, const JdpoOptions& opt, Eval&& eval) {
  int best_R = std::max(cfg.K, 2 * cfg.N_R / 3);
  int best_T = std::max(cfg.K, 2 * cfg.N_T / 3);
  double best = eval(best_R, best_T);
  if (std::isnan(best)) best = -std::numeric_limits<double>::infinity();
  std::vector<int> sub_R = opt.subset_R.empty() ? default_dof_subset(cfg.K, cfg.N_R) : opt.subset_R;
  std::vector<int> sub_T = opt.subset_T.empty() ? default_dof_subset(cfg.K, cfg.N_T) : opt.subset_T;
  std::sort(sub_R.begin(), sub_R.end());
  std::sort(sub_T.begin(), sub_T.end());
  const auto better = [](double v, int a, double b, int ab) {
    if (std::isnan(v)) return false;
    const double tol = 1e-12 * std::max(1.0, std::abs(b));
    return v > b + tol || (std::abs(v - b) <= tol && a < ab);
  };
  for (int rep = 0; rep < opt.L; ++rep) {
    for (int a : sub_R) {
      const double v = eval(a, best_T);
      if (better(v, a, best, best_R)) {
        best = v;
        best_R = a;
      }
    }
    for (int a : sub_T) {
      const double v = eval(best_R, a);
      if (better(v, a, best, best_T)) {
        best = v;
        best_T = a;
      }
    }
  }
  return {best_R, best_T};
}

}  // namespace

JdpoResult jdpo(const SystemConfig& cfg, const ChannelStats& stats, const JdpoOptions& opt) {
  JdpoResult res;
  PowerControlOptions pc = opt.pc;
  pc.prefactor = cfg.prefactor();
  const PowerCaps caps = caps_of(cfg);
  std::map<std::pair<int, int>, PowerControlResult> cache;
  const auto eval = [&](int A_R, int A_T) -> double {
    const auto key = std::make_pair(A_R, A_T);
    if (auto it = res.visited.find(key); it != res.visited.end()) return it->second;
    ++res.evaluations;
    double se = std::numeric_limits<double>::quiet_NaN();
    try {
      const SinrModel m = build_sinr_model(cfg, stats, A_R, A_T, opt.form);
      PowerAllocation init = default_init(caps, cfg.K);
      init.A_R = A_R;
      init.A_T = A_T;
      PowerControlResult r = power_control_fixed_dof(m, caps, init, pc);
      se = r.se;
      cache.emplace(key, std::move(r));
    } catch (const Infeasible&) {
      ++res.infeasible;
    } catch (const SingularChannel&) {
      ++res.infeasible;
    } catch (const InvalidParameter&) {
      ++res.infeasible;
    }
    res.visited[key] = se;
    return se;
  };
  const int A_R0 = std::max(cfg.K, 2 * cfg.N_R / 3);
  const int A_T0 = std::max(cfg.K, 2 * cfg.N_T / 3);
  const auto [bR, bT] = dof_sweep(cfg, opt, eval);
  res.initial_se = res.visited.at({A_R0, A_T0});
  const auto it = cache.find({bR, bT});
  if (it == cache.end()) throw Infeasible("no feasible DOF point found");
  res.best = it->second;
  return res;
}

namespace {

// model and caps over the pairs listed in `idx`; the others transmit nothing
std::pair<SinrModel, PowerCaps> restrict_pairs(const SinrModel& m, const PowerCaps& caps,
                                               const std::vector<int>& idx) {
  const int n = int(idx.size());
  SinrModel r;
  r.K = n;
  r.aR = RMat(n, n);
  r.bR = RMat(n, n);
  r.bD = RMat(n, n);
  r.awgn_sr = RVec(n);
  r.gain_rd = RVec(n);
  r.awgn_rd = RVec(n);
  PowerCaps c{{}, caps.E_R_max};
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      r.aR(a, b) = m.aR(idx[a], idx[b]);
      r.bR(a, b) = m.bR(idx[a], idx[b]);
      r.bD(a, b) = m.bD(idx[a], idx[b]);
    }
    r.awgn_sr(a) = m.awgn_sr(idx[a]);
    r.gain_rd(a) = m.gain_rd(idx[a]);
    r.awgn_rd(a) = m.awgn_rd(idx[a]);
    c.E_S_max.push_back(caps.E_S_max[idx[a]]);
  }
  return {r, c};
}

}  // namespace

EeResult min_power_fixed_dof(const SinrModel& model, const PowerCaps& caps, double r_t,
                             double prefactor, const EeOptions& opt) {
  const int K = model.K;
  if (!(r_t > 0.0)) throw InvalidParameter("target SE must be > 0");
  PowerControlOptions pc = opt.dof.pc;
  pc.prefactor = prefactor;
  const PowerControlResult top = power_control_fixed_dof(model, caps, default_init(caps, K), pc);
  if (top.se < r_t * (1.0 - 1e-9))
    throw Infeasible("target SE " + std::to_string(r_t) + " exceeds the achievable " +
                     std::to_string(top.se));
  const double log_target = r_t / prefactor * std::log(2.0);

  // A sum target may be met most cheaply with some pairs silent.  Such pairs drift towards
  // zero SINR; once below kOff they are removed and the rest re-solved.
  constexpr double kOff = 1e-8;
  std::vector<double> g_hat = top.gamma;
  EeResult r;
  r.alloc = top.alloc;
  std::vector<int> idx(K);
  std::iota(idx.begin(), idx.end(), 0);
  auto [sub, sub_caps] = restrict_pairs(model, caps, idx);
  std::vector<Posynomial> cons = sinr_constraints(sub, sub_caps);
  for (int it = 0; it < opt.max_iter; ++it) {
    const int n = int(idx.size());
    const Layout L{n};
    PosynomialProgram prog;
    prog.n = L.n();
    for (int a = 0; a < n; ++a) {
      prog.objective.push_back(monomial(L.n(), 1.0, {{L.es(a), 1.0}}));
      prog.objective.push_back(monomial(L.n(), 1.0, {{L.er(a), 1.0}}));
    }
    prog.ineq = cons;
    Monomial eq{1.0, RVec::Zero(prog.n)};
    double log_c = -log_target;
    for (int a = 0; a < n; ++a) {
      const auto [w, th] = monomial_approx(g_hat[idx[a]]);
      eq.a(L.g(a)) = w;
      log_c += std::log(th);
    }
    eq.c = std::exp(log_c);
    prog.eq = {eq};
    const GpResult s = solve_gp(prog, opt.dof.pc.gp);
    PowerAllocation next;
    next.E_S.assign(K, 0.0);
    next.E_R.assign(K, 0.0);
    for (int a = 0; a < n; ++a) {
      next.E_S[idx[a]] = s.x(L.es(a));
      next.E_R[idx[a]] = s.x(L.er(a));
    }
    const std::vector<double> g_next = gammas(model, next);
    double diff = 0.0;
    for (int k : idx) diff = std::max(diff, std::abs(g_next[k] - g_hat[k]) / std::max(1.0, g_hat[k]));
    r.alloc.E_S = next.E_S;
    r.alloc.E_R = next.E_R;
    g_hat = g_next;
    r.iterations = it + 1;

    std::vector<int> keep;
    for (int k : idx)
      if (g_hat[k] >= kOff) keep.push_back(k);
    if (keep.empty()) throw Infeasible("every pair was switched off");
    if (keep.size() != idx.size()) {
      for (int k : idx)
        if (g_hat[k] < kOff) r.alloc.E_S[k] = r.alloc.E_R[k] = g_hat[k] = 0.0;
      idx = keep;
      std::tie(sub, sub_caps) = restrict_pairs(model, caps, idx);
      cons = sinr_constraints(sub, sub_caps);
      continue;
    }
    if (diff < opt.tol) break;
  }
  r.gamma = g_hat;
  r.total_power = std::accumulate(r.alloc.E_S.begin(), r.alloc.E_S.end(), 0.0) +
                  std::accumulate(r.alloc.E_R.begin(), r.alloc.E_R.end(), 0.0);
  r.se = 0.0;
  for (double g : g_hat) r.se += rate_from_sinr(prefactor, g);
  r.ee = r.total_power > 0.0 ? r_t / r.total_power : 0.0;
  return r;
}

EeResult jdpo_ee(const SystemConfig& cfg, const ChannelStats& stats, double r_t,
                 const EeOptions& opt) {
  const PowerCaps caps = caps_of(cfg);
  std::map<std::pair<int, int>, double> visited;
  std::map<std::pair<int, int>, EeResult> cache;
  const auto eval = [&](int A_R, int A_T) -> double {
    const auto key = std::make_pair(A_R, A_T);
    if (auto it = visited.find(key); it != visited.end()) return it->second;
    double score = std::numeric_limits<double>::quiet_NaN();
    try {
      const SinrModel m = build_sinr_model(cfg, stats, A_R, A_T, opt.dof.form);
      EeResult r = min_power_fixed_dof(m, caps, r_t, cfg.prefactor(), opt);
      r.alloc.A_R = A_R;
      r.alloc.A_T = A_T;
      score = -r.total_power;
      cache.emplace(key, std::move(r));
    } catch (const Infeasible&) {
    } catch (const SingularChannel&) {
    } catch (const InvalidParameter&) {
    }
    visited[key] = score;
    return score;
  };
  const auto [bR, bT] = dof_sweep(cfg, opt.dof, eval);
  const auto it = cache.find({bR, bT});
  if (it == cache.end()) throw Infeasible("target SE is not reachable at any DOF point");
  return it->second;
}

}  // namespace mmfdr
