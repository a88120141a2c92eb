// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mmfdr/model.hpp"
#include "mmfdr/rates.hpp"

namespace mmfdr {

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

enum class Mode { kMc, kAsym, kBoth, kOptimizeSe, kOptimizeEe };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct ExperimentSpec {
  SystemConfig scenario;
  // phase draw applied to the scenario and redone at every sweep point
  double r0 = 0.0, r_ei = 0.0;
  std::uint64_t phase_seed = 1;
  bool scale_nodes = false;  // N_S = floor(N_R/K), N_D = floor(N_T/K)

  std::string sweep_var;  // empty: single point
  std::vector<double> sweep_values;

  Mode mode = Mode::kAsym;
  int trials = 1000;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string output;

  int A_R = 0, A_T = 0;  // 0: max{K, floor(2N/3)}
  int jdpo_L = 3;
  double target_rate = 0.0;  // total SE target for optimize-ee
  AsymForm form = AsymForm::kRefined;

  void validate() const;
  bool operator==(const ExperimentSpec&) const = default;
};

// names accepted by sweep_var
const std::vector<std::string>& sweep_variables();

ExperimentSpec parse_config_text(const std::string& text);
ExperimentSpec parse_config(const std::string& path);
std::string serialize(const ExperimentSpec& spec);

// scenario of one sweep point, phases drawn and node arrays scaled
SystemConfig scenario_at(const ExperimentSpec& spec, double sweep_value);
int default_dof(int K, int N);

struct Preset {
  ExperimentSpec spec;
  std::vector<double> caption_grid;  // grid at figure scale
  std::string deviation;             // what the desk-scale run changes
};

const std::vector<std::string>& preset_names();
Preset preset(const std::string& name);

struct CsvRow {
  std::string sweep_var;
  double sweep_value = 0;
  int k = 0;
  double rate_sr_mc, rate_rd_mc, rate_e2e_mc;
  double rate_sr_asym, rate_rd_asym, rate_e2e_asym;
  double se_total;
  double p_desired, p_var, p_ei, p_mui, p_dt, p_dr;
  int a_r = 0, a_t = 0;
  double e_s = 0, e_r = 0;
};

extern const char* const kCsvHeader;

std::vector<CsvRow> run_experiment(const ExperimentSpec& spec);
void write_csv(std::ostream& os, const std::vector<CsvRow>& rows);
std::string format_csv(const std::vector<CsvRow>& rows);

}  // namespace mmfdr
