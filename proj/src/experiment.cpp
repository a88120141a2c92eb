// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "mmfdr/config.hpp"
#include "mmfdr/optimizer.hpp"

namespace mmfdr {

const char* const kCsvHeader =
    "sweep_var,sweep_value,k,rate_sr_mc,rate_rd_mc,rate_e2e_mc,rate_sr_asym,rate_rd_asym,"
    "rate_e2e_asym,se_total,p_desired,p_var,p_ei,p_mui,p_dt,p_dr,a_r,a_t,e_s,e_r";

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

CsvRow blank_row(const std::string& var, double value, int k) {
  CsvRow r;
  r.sweep_var = var;
  r.sweep_value = value;
  r.k = k;
  r.rate_sr_mc = r.rate_rd_mc = r.rate_e2e_mc = kNaN;
  r.rate_sr_asym = r.rate_rd_asym = r.rate_e2e_asym = kNaN;
  r.se_total = kNaN;
  r.p_desired = r.p_var = r.p_ei = r.p_mui = r.p_dt = r.p_dr = kNaN;
  return r;
}

void put_terms(CsvRow& r, const TermBreakdown& t) {
  r.p_desired = t.desired;
  r.p_var = t.var;
  r.p_ei = t.ei;
  r.p_mui = t.mui;
  r.p_dt = t.dt;
  r.p_dr = t.dr;
}

std::vector<CsvRow> rate_rows(const ExperimentSpec& spec, const SystemConfig& cfg, double value,
                              int A_R, int A_T) {
  const ChannelStats stats = build_channel_stats(cfg);
  const HiaStatistics hia = prepare_hia(cfg, stats, A_R, A_T);
  RateOptions ro;
  ro.mc = spec.mode == Mode::kMc || spec.mode == Mode::kBoth;
  ro.asym = spec.mode == Mode::kAsym || spec.mode == Mode::kBoth;
  ro.trials = spec.trials;
  ro.seed = spec.seed;
  ro.workers = 1;
  ro.form = spec.form;
  const RateReport rep = evaluate_rates(cfg, stats, hia, ro);
  std::vector<CsvRow> rows;
  for (int k = 0; k < cfg.K; ++k) {
    const PairRates& p = rep.pairs[k];
    CsvRow r = blank_row(spec.sweep_var, value, k);
    if (rep.has_mc) {
      r.rate_sr_mc = p.sr_mc;
      r.rate_rd_mc = p.rd_mc;
      r.rate_e2e_mc = p.e2e_mc;
      put_terms(r, p.sr_mc_terms);
    }
    if (rep.has_asym) {
      r.rate_sr_asym = p.sr_asym;
      r.rate_rd_asym = p.rd_asym;
      r.rate_e2e_asym = p.e2e_asym;
      put_terms(r, p.sr_asym_terms);
    }
    r.se_total = rep.has_asym ? rep.se_asym : rep.se_mc;
    r.a_r = A_R;
    r.a_t = A_T;
    r.e_s = cfg.E_S[k];
    r.e_r = cfg.E_R[k];
    rows.push_back(r);
  }
  return rows;
}

// closed-form rows at an optimized allocation
std::vector<CsvRow> allocation_rows(const ExperimentSpec& spec, SystemConfig cfg, double value,
                                    const ChannelStats& stats, const PowerAllocation& a,
                                    double se_total) {
  cfg.E_S = a.E_S;
  cfg.E_R = a.E_R;
  const HiaStatistics hia = prepare_hia(cfg, stats, a.A_R, a.A_T);
  const auto sr = asym_rate_sr_hia(cfg, hia, spec.form);
  const auto rd = asym_rate_rd_hia(cfg, hia, spec.form);
  std::vector<CsvRow> rows;
  for (int k = 0; k < cfg.K; ++k) {
    CsvRow r = blank_row(spec.sweep_var, value, k);
    r.rate_sr_asym = sr[k].rate;
    r.rate_rd_asym = rd[k].rate;
    r.rate_e2e_asym = e2e_rate(sr[k].rate, rd[k].rate);
    put_terms(r, sr[k].terms);
    r.se_total = se_total;
    r.a_r = a.A_R;
    r.a_t = a.A_T;
    r.e_s = a.E_S[k];
    r.e_r = a.E_R[k];
    rows.push_back(r);
  }
  return rows;
}

std::vector<CsvRow> run_point(const ExperimentSpec& spec, double value) {
  const SystemConfig cfg = scenario_at(spec, value);
  cfg.validate();
  const int A_R = spec.A_R ? spec.A_R : default_dof(cfg.K, cfg.N_R);
  const int A_T = spec.A_T ? spec.A_T : default_dof(cfg.K, cfg.N_T);
  if (spec.mode == Mode::kMc || spec.mode == Mode::kAsym || spec.mode == Mode::kBoth)
    return rate_rows(spec, cfg, value, A_R, A_T);

  const ChannelStats stats = build_channel_stats(cfg);
  JdpoOptions jo;
  jo.L = spec.jdpo_L;
  jo.form = spec.form;
  if (spec.A_R) jo.subset_R = {spec.A_R};
  if (spec.A_T) jo.subset_T = {spec.A_T};
  if (spec.mode == Mode::kOptimizeSe) {
    const JdpoResult res = jdpo(cfg, stats, jo);
    return allocation_rows(spec, cfg, value, stats, res.best.alloc, res.best.se);
  }
  EeOptions eo;
  eo.dof = jo;
  const double r_t = spec.sweep_var == "target_rate" ? value : spec.target_rate;
  const EeResult res = jdpo_ee(cfg, stats, r_t, eo);
  return allocation_rows(spec, cfg, value, stats, res.alloc, res.se);
}

std::string fmt9(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::vector<CsvRow> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const std::vector<double> pts =
      spec.sweep_var.empty() ? std::vector<double>{0.0} : spec.sweep_values;
  std::vector<std::vector<CsvRow>> out(pts.size());
  std::vector<std::exception_ptr> errs(pts.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i; (i = next++) < pts.size();) {
      try {
        out[i] = run_point(spec, pts[i]);
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
  };
  const int nw = std::min<int>(spec.workers, int(pts.size()));
  if (nw <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!errs[i]) continue;
    const std::string where = spec.sweep_var.empty()
                                  ? std::string("scenario")
                                  : spec.sweep_var + " = " + fmt9(pts[i]);
    try {
      std::rethrow_exception(errs[i]);
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(where + ": " + e.what(), e.residual(), e.iterations());
    } catch (const std::exception& e) {
      throw Error(where + ": " + e.what());
    }
  }
  std::vector<CsvRow> rows;
  for (auto& v : out) rows.insert(rows.end(), v.begin(), v.end());
  return rows;
}

void write_csv(std::ostream& os, const std::vector<CsvRow>& rows) {
  os << kCsvHeader << '\n';
  for (const CsvRow& r : rows) {
    os << r.sweep_var << ',' << fmt9(r.sweep_value) << ',' << r.k;
    for (double v : {r.rate_sr_mc, r.rate_rd_mc, r.rate_e2e_mc, r.rate_sr_asym, r.rate_rd_asym,
                     r.rate_e2e_asym, r.se_total, r.p_desired, r.p_var, r.p_ei, r.p_mui, r.p_dt,
                     r.p_dr})
      os << ',' << fmt9(v);
    os << ',' << r.a_r << ',' << r.a_t << ',' << fmt9(r.e_s) << ',' << fmt9(r.e_r) << '\n';
  }
}

std::string format_csv(const std::vector<CsvRow>& rows) {
  std::ostringstream os;
  write_csv(os, rows);
  return os.str();
}

}  // namespace mmfdr
