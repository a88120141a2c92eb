// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace mmfdr {

using cd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class NotPsdError : public Error {
 public:
  using Error::Error;
};

class ModeError : public Error {
 public:
  using Error::Error;
};

class SingularChannel : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

class Infeasible : public Error {
 public:
  using Error::Error;
};

class Unbounded : public Error {
 public:
  using Error::Error;
};

// SplitMix64 finalizer, used to turn (seed ^ trial) into a well-mixed stream seed.
std::uint64_t splitmix64(std::uint64_t x);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}

  // stream for Monte Carlo trial `trial` of a scenario seeded with `seed`
  static Rng for_trial(std::uint64_t seed, std::uint64_t trial) {
    return Rng(seed ^ trial);
  }

  double normal() { return gauss_(eng_); }
  double uniform() { return unif_(eng_); }

  // circular symmetric complex Gaussian with variance `var`
  cd cnormal(double var = 1.0) {
    const double s = std::sqrt(var / 2.0);
    const double re = gauss_(eng_);
    const double im = gauss_(eng_);
    return {s * re, s * im};
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

CMat cgaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng);

inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin_to_db(double x) { return 10.0 * std::log10(x); }

// Tr(A B) without forming the product
inline cd trace_prod(const CMat& A, const CMat& B) {
  return (A.array() * B.transpose().array()).sum();
}

inline CMat hermitian_part(const CMat& A) { return 0.5 * (A + A.adjoint()); }

}  // namespace mmfdr
