// SPDX-License-Identifier: Apache-2.0
#include "mmfdr/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>

namespace mmfdr {

Monomial monomial(int n, double c, std::initializer_list<std::pair<int, double>> powers) {
  Monomial m{c, RVec::Zero(n)};
  for (const auto& [i, a] : powers) m.a(i) += a;
  return m;
}

double eval(const Monomial& m, const RVec& x) {
  double v = m.c;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (m.a(i) != 0.0) v *= std::pow(x(i), m.a(i));
  return v;
}

double eval(const Posynomial& p, const RVec& x) {
  double v = 0.0;
  for (const auto& m : p) v += eval(m, x);
  return v;
}

void PosynomialProgram::check() const {
  if (n < 1) throw InvalidParameter("program needs at least one variable");
  const auto chk = [&](const Monomial& m) {
    if (!(m.c > 0.0) || !std::isfinite(m.c)) throw InvalidParameter("monomial coefficients must be > 0");
    if (m.a.size() != n) throw InvalidParameter("exponent vector has wrong length");
  };
  if (objective.empty()) throw InvalidParameter("empty objective");
  for (const auto& m : objective) chk(m);
  for (const auto& p : ineq) {
    if (p.empty()) throw InvalidParameter("empty constraint");
    for (const auto& m : p) chk(m);
  }
  for (const auto& m : eq) chk(m);
}

namespace {

// log-sum-exp of an affine map, f(y) = log sum exp(A y + b)
struct Lse {
  RMat A;
  RVec b;

  explicit Lse(const Posynomial& p, int n) : A(p.size(), n), b(p.size()) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      A.row(i) = p[i].a.transpose();
      b(i) = std::log(p[i].c);
    }
  }

  double value(const RVec& y) const {
    const RVec u = A * y + b;
    const double m = u.maxCoeff();
    return m + std::log((u.array() - m).exp().sum());
  }

  // value, gradient and Hessian in y
  double eval(const RVec& y, RVec& g, RMat& H) const {
    const RVec u = A * y + b;
    const double m = u.maxCoeff();
    RVec p = (u.array() - m).exp();
    const double s = p.sum();
    p /= s;
    g = A.transpose() * p;
    H = A.transpose() * p.asDiagonal() * A - g * g.transpose();
    return m + std::log(s);
  }
};

struct Reduced {
  RVec y0;
  RMat Z;  // y = y0 + Z z
};

Reduced reduce_equalities(const std::vector<Monomial>& eq, int n) {
  Reduced r;
  if (eq.empty()) {
    r.y0 = RVec::Zero(n);
    r.Z = RMat::Identity(n, n);
    return r;
  }
  RMat E(eq.size(), n);
  RVec d(eq.size());
  for (std::size_t i = 0; i < eq.size(); ++i) {
    E.row(i) = eq[i].a.transpose();
    d(i) = -std::log(eq[i].c);
  }
  Eigen::JacobiSVD<RMat> svd(E, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVec& sv = svd.singularValues();
  const double tol = std::max<double>(E.rows(), n) * 1e-12 * (sv.size() ? sv(0) : 1.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  RVec c = svd.matrixU().transpose() * d;
  RVec w = RVec::Zero(n);
  for (int i = 0; i < rank; ++i) w(i) = c(i) / sv(i);
  r.y0 = svd.matrixV() * w;
  if ((E * r.y0 - d).norm() > 1e-9 * (1.0 + d.norm())) throw Infeasible("equality constraints are inconsistent");
  r.Z = svd.matrixV().rightCols(n - rank);
  return r;
}

RVec solve_psd(const RMat& H, const RVec& rhs) {
  Eigen::LDLT<RMat> ldlt(H);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    const RVec d = ldlt.vectorD();
    if (d.minCoeff() > 1e-13 * std::max(1.0, d.maxCoeff())) return ldlt.solve(rhs);
  }
  const double reg = 1e-10 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
  RMat Hr = H;
  Hr.diagonal().array() += reg;
  return Hr.ldlt().solve(rhs);
}

class Barrier {
 public:
  Barrier(const PosynomialProgram& prog, const GpOptions& opt)
      : n_(prog.n), f0_(prog.objective, prog.n), opt_(opt), red_(reduce_equalities(prog.eq, prog.n)) {
    for (const auto& p : prog.ineq) fi_.emplace_back(p, prog.n);
  }

  int m() const { return int(fi_.size()); }
  int p() const { return int(red_.Z.cols()); }
  RVec y_of(const RVec& z) const { return red_.y0 + red_.Z * z; }

  double max_f(const RVec& y) const {
    double v = -std::numeric_limits<double>::infinity();
    for (const auto& f : fi_) v = std::max(v, f.value(y));
    return v;
  }

  // Phase I: minimize s subject to f_i(y) <= s; returns a strictly feasible z
  RVec phase1(double& s_out, int& steps) {
    RVec z = RVec::Zero(p());
    double s = max_f(y_of(z));
    if (s < -1e-8) {
      s_out = s;
      return z;
    }
    s += 1.0;
    double t = opt_.t0;
    const int dim = p() + 1;
    RVec v(dim);
    v << z, s;
    double best = std::numeric_limits<double>::infinity();
    for (int outer = 0; outer < 200; ++outer) {
      const auto F = [&](const RVec& vv, RVec* g, RMat* H) -> double {
        const RVec zz = vv.head(p());
        const double ss = vv(p());
        const RVec y = y_of(zz);
        double val = t * ss;
        if (g) {
          g->setZero(dim);
          (*g)(p()) = t;
          H->setZero(dim, dim);
        }
        for (const auto& f : fi_) {
          RVec gy;
          RMat Hy;
          const double fv = g ? f.eval(y, gy, Hy) : f.value(y);
          const double slack = ss - fv;
          if (!(slack > 0.0)) return std::numeric_limits<double>::infinity();
          val -= std::log(slack);
          if (g) {
            RVec gv(dim);
            gv << -(red_.Z.transpose() * gy), 1.0;
            *g -= gv / slack;
            H->noalias() += gv * gv.transpose() / (slack * slack);
            H->topLeftCorner(p(), p()).noalias() += red_.Z.transpose() * Hy * red_.Z / slack;
          }
        }
        return val;
      };
      steps += center(F, v, [&](const RVec& vv) { return max_f(y_of(vv.head(p()))) < -1e-8; });
      const double cur = max_f(y_of(v.head(p())));
      best = std::min(best, cur);
      if (cur < -1e-8) {
        s_out = cur;
        return v.head(p());
      }
      if (double(m()) / t < 1e-10) break;
      t *= opt_.t_mult;
    }
    s_out = best;
    throw Infeasible("posynomial program is infeasible (Phase I optimum " + std::to_string(best) + ")");
  }

  // Phase II barrier method from a strictly feasible z
  RVec phase2(RVec z, double& t_out, int& steps) {
    double t = opt_.t0;
    const int dim = p();
    if (dim == 0) {
      t_out = t;
      return z;
    }
    for (int outer = 0; outer < 400; ++outer) {
      const auto F = [&](const RVec& zz, RVec* g, RMat* H) -> double {
        const RVec y = y_of(zz);
        RVec gy;
        RMat Hy;
        double val;
        if (g) {
          val = t * f0_.eval(y, gy, Hy);
          *g = t * (red_.Z.transpose() * gy);
          *H = t * (red_.Z.transpose() * Hy * red_.Z);
        } else {
          val = t * f0_.value(y);
        }
        for (const auto& f : fi_) {
          const double fv = g ? f.eval(y, gy, Hy) : f.value(y);
          if (!(fv < 0.0)) return std::numeric_limits<double>::infinity();
          val -= std::log(-fv);
          if (g) {
            const RVec gz = red_.Z.transpose() * gy;
            *g += gz / (-fv);
            H->noalias() += gz * gz.transpose() / (fv * fv);
            H->noalias() += red_.Z.transpose() * Hy * red_.Z / (-fv);
          }
        }
        return val;
      };
      steps += center(F, z, nullptr);
      const RVec y = y_of(z);
      if (f0_.value(y) < -opt_.unbounded_log) throw Unbounded("posynomial program is unbounded below");
      if (m() == 0 || double(m()) / t < opt_.gap_tol) {
        t_out = t;
        return z;
      }
      t *= opt_.t_mult;
    }
    t_out = t;
    return z;
  }

  const Lse& f0() const { return f0_; }
  const std::vector<Lse>& fi() const { return fi_; }
  const Reduced& red() const { return red_; }

 private:
  template <class Fn, class Stop>
  int center(const Fn& F, RVec& v, const Stop& early) {
    int it = 0;
    for (; it < opt_.max_newton; ++it) {
      RVec g;
      RMat H;
      const double f = F(v, &g, &H);
      RVec dv = solve_psd(H, -g);
      const double lam2 = -g.dot(dv);
      if (!(lam2 > 2.0 * opt_.newton_tol)) break;
      // at most a factor e^2 per variable per step
      const double big = dv.cwiseAbs().maxCoeff();
      if (big > 2.0) dv *= 2.0 / big;
      const double slope = -g.dot(dv);
      double step = 1.0;
      double fn = F(v + step * dv, nullptr, nullptr);
      // near the centre rounding in F swamps the Armijo margin; take the full step
      if (lam2 < 1e-3 && big <= 2.0 && std::isfinite(fn)) {
        v += dv;
        continue;
      }
      while (!(fn <= f - 0.25 * step * slope) && step > 1e-16) {
        step *= 0.5;
        fn = F(v + step * dv, nullptr, nullptr);
      }
      if (step <= 1e-16) break;
      v += step * dv;
      if (v.cwiseAbs().maxCoeff() > 10.0 * opt_.unbounded_log) break;
      if constexpr (!std::is_same_v<Stop, std::nullptr_t>) {
        if (early(v)) {
          ++it;
          break;
        }
      }
    }
    return it;
  }

  int n_;
  Lse f0_;
  std::vector<Lse> fi_;
  GpOptions opt_;
  Reduced red_;
};

}  // namespace

GpResult solve_gp(const PosynomialProgram& prog, const GpOptions& opt) {
  prog.check();
  Barrier B(prog, opt);
  GpResult r;
  double s = 0.0;
  int steps = 0;
  RVec z = B.phase1(s, steps);
  r.phase1_s = s;
  double t = opt.t0;
  z = B.phase2(z, t, steps);
  r.newton_steps = steps;
  r.y = B.y_of(z);
  r.x = r.y.array().exp();
  r.objective = eval(prog.objective, r.x);

  // Multipliers in the log domain.  The barrier estimate 1/(t |f_i|) only selects the active
  // set; the values are refitted by least squares since f_i ~ 1/t carries few digits.
  RVec g0;
  RMat H;
  B.f0().eval(r.y, g0, H);
  const int m = B.m(), ne = int(prog.eq.size());
  RMat G(prog.n, m + ne);
  RVec fv(m);
  r.max_violation = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    RVec gi;
    fv(i) = B.fi()[i].eval(r.y, gi, H);
    G.col(i) = gi;
    r.max_violation = std::max(r.max_violation, std::exp(fv(i)) - 1.0);
  }
  for (int i = 0; i < ne; ++i) {
    G.col(m + i) = prog.eq[i].a;
    r.max_violation = std::max(r.max_violation, std::abs(eval(prog.eq[i], r.x) - 1.0));
  }
  if (m == 0 && ne == 0) r.max_violation = 0.0;

  std::vector<int> cols;
  for (int i = 0; i < m; ++i)
    if (1.0 / (t * (-fv(i))) > 1e-6) cols.push_back(i);
  for (int i = 0; i < ne; ++i) cols.push_back(m + i);
  RVec mult = RVec::Zero(m + ne);
  // drop inequality columns whose fitted multiplier comes out negative
  for (bool again = true; again && !cols.empty();) {
    RMat Ga(prog.n, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) Ga.col(j) = G.col(cols[j]);
    const RVec l = Ga.colPivHouseholderQr().solve(-g0);
    again = false;
    int worst = -1;
    for (int j = 0; j < int(cols.size()); ++j)
      if (cols[j] < m && l(j) < 0.0 && (worst < 0 || l(j) < l(worst))) worst = j;
    if (worst >= 0) {
      cols.erase(cols.begin() + worst);
      again = true;
      continue;
    }
    mult.setZero();
    for (std::size_t j = 0; j < cols.size(); ++j) mult(cols[j]) = l(j);
  }
  r.lambda = mult.head(m);
  r.nu = mult.tail(ne);
  double comp = 0.0;
  for (int i = 0; i < m; ++i) comp = std::max(comp, r.lambda(i) * std::abs(fv(i)));
  r.kkt_residual = std::max((g0 + G * mult).norm(), comp);
  return r;
}

}  // namespace mmfdr
