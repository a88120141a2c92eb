// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "mmfdr/common.hpp"

namespace mmfdr {

// c * prod_i x_i^a_i
struct Monomial {
  double c = 1.0;
  RVec a;
};

using Posynomial = std::vector<Monomial>;

Monomial monomial(int n, double c, std::initializer_list<std::pair<int, double>> powers);

double eval(const Monomial& m, const RVec& x);
double eval(const Posynomial& p, const RVec& x);

// minimize objective s.t. ineq[i](x) <= 1 and eq[j](x) = 1, x > 0
struct PosynomialProgram {
  int n = 0;
  Posynomial objective;
  std::vector<Posynomial> ineq;
  std::vector<Monomial> eq;

  void check() const;
};

struct GpOptions {
  double gap_tol = 1e-10;   // m / t at exit, in log-objective units
  double newton_tol = 1e-12;
  int max_newton = 200;     // per centering step
  double t0 = 1.0;
  double t_mult = 10.0;
  double unbounded_log = 60.0;  // log-objective below -unbounded_log reports Unbounded
};

struct GpResult {
  RVec x;
  RVec y;  // log x
  double objective = 0;
  RVec lambda;  // inequality multipliers (log domain)
  RVec nu;      // equality multipliers
  double kkt_residual = 0;
  double max_violation = 0;  // max over ineq of (value - 1), and |eq - 1|
  int newton_steps = 0;
  double phase1_s = 0;  // optimal Phase I slack when it was needed
};

// throws Infeasible or Unbounded
GpResult solve_gp(const PosynomialProgram& prog, const GpOptions& opt = {});

}  // namespace mmfdr
