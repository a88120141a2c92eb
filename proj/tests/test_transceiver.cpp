// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <numbers>

#include "mmfdr/transceiver.hpp"

using namespace mmfdr;

namespace {

CMat random_orthonormal(int n, int a, Rng& rng) {
  Eigen::HouseholderQR<CMat> qr(cgaussian(n, a, rng));
  return qr.householderQ() * CMat::Identity(n, a);
}

double smallest_sum(const RVec& desc, int A) { return desc.tail(A).sum(); }

}  // namespace

TEST_CASE("outer beamformer with identity EI correlation is orthonormal") {
  const auto I = build_exponential_correlation(6, 0.0);
  const auto [P_R, P_T] = outer_bf(I, I, 6, 4);
  CHECK((P_R.adjoint() * P_R - CMat::Identity(6, 6)).norm() < 1e-10);
  CHECK((P_T.adjoint() * P_T - CMat::Identity(4, 4)).norm() < 1e-10);
}

TEST_CASE("2x2 outer beamformer picks the small eigenvector") {
  const auto C = build_exponential_correlation(2, 0.8);
  const auto [P, Q] = outer_bf(C, C, 1, 1);
  CHECK(std::abs(std::abs(P(0, 0)) - 1.0 / std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(P(0, 0) + P(1, 0)) < 1e-12);
  CHECK((P.adjoint() * C.C * P)(0, 0).real() == doctest::Approx(0.2));
}

TEST_CASE("outer beamformer trace equals sum of smallest eigenvalues") {
  const auto C = build_exponential_correlation(8, std::polar(0.8, 0.9));
  const auto eig = hermitian_eig(C.C);
  for (int A = 1; A <= 8; ++A) {
    const auto [P, Q] = outer_bf(C, C, A, A);
    const double tr = (P.adjoint() * C.C * P).trace().real();
    CHECK(tr == doctest::Approx(smallest_sum(eig.values, A)).epsilon(1e-12));
    CHECK((P.adjoint() * P - CMat::Identity(A, A)).norm() < 1e-10);
    if (A < 8) {
      const auto [P1, Q1] = outer_bf(C, C, A + 1, A + 1);
      const double tr1 = (P1.adjoint() * C.C * P1).trace().real();
      CHECK(tr == doctest::Approx(tr1 - eig.values(8 - A - 1)).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(outer_bf(C, C, 0, 3), InvalidParameter);
  CHECK_THROWS_AS(outer_bf(C, C, 3, 9), InvalidParameter);
}

TEST_CASE("outer beamformer beats random orthonormal candidates on the surrogate") {
  const auto C = build_exponential_correlation(8, std::polar(0.7, 2.2));
  const auto Ct = build_exponential_correlation(6, std::polar(0.6, 0.4));
  const auto [P_R, P_T] = outer_bf(C, Ct, 4, 3);
  const double best = (P_T.adjoint() * Ct.C * P_T).trace().real() *
                      (P_R.adjoint() * C.C * P_R).trace().real();
  Rng rng(12);
  for (int t = 0; t < 1000; ++t) {
    const CMat R = random_orthonormal(8, 4, rng), T = random_orthonormal(6, 3, rng);
    const double v = (T.adjoint() * Ct.C * T).trace().real() * (R.adjoint() * C.C * R).trace().real();
    CHECK(best <= v + 1e-12);
  }
}

TEST_CASE("source and destination beamformers") {
  CHECK(source_bf(build_exponential_correlation(1, 0.3)) == CVec::Ones(1));
  CHECK(dest_bf(build_exponential_correlation(1, 0.3)) == CVec::Ones(1));
  const CVec p = source_bf(build_exponential_correlation(2, 0.5));
  CHECK(std::abs(p(0) - 1.0 / std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(p(1) - 1.0 / std::sqrt(2.0)) < 1e-12);
  const CVec d = dest_bf(build_exponential_correlation(2, 0.9));
  CHECK(std::abs(std::abs(d(0)) - 1.0 / std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(d(0) - d(1)) < 1e-12);
  const auto C6 = build_exponential_correlation(6, std::polar(0.6, 1.3));
  const double l1 = hermitian_eig(C6.C).values(0);
  for (const CVec& v : {source_bf(C6), dest_bf(C6)}) {
    CHECK(v.norm() == doctest::Approx(1.0));
    CHECK((v.adjoint() * C6.C * v)(0, 0).real() == doctest::Approx(l1).epsilon(1e-12));
  }
}

TEST_CASE("inner ZF for a single pair") {
  Rng rng(1);
  const CMat h = cgaussian(5, 1, rng);
  const InnerZf z = inner_zf(h, h);
  CHECK((z.W_R_inner - h / h.squaredNorm()).norm() < 1e-12);
  CHECK((z.W_T_inner - h / h.norm()).norm() < 1e-12);
  CHECK(z.Upsilon(0) == doctest::Approx(1.0 / h.squaredNorm()));
}

TEST_CASE("inner ZF with orthogonal columns") {
  CMat H = CMat::Zero(4, 2);
  H(0, 0) = 2.0;
  H(2, 1) = cd(0.0, 3.0);
  const CMat W = zf_receive(H);
  CHECK((W.col(0) - H.col(0) / 4.0).norm() < 1e-12);
  CHECK((W.col(1) - H.col(1) / 9.0).norm() < 1e-12);
}

TEST_CASE("inner ZF exactness and unit-norm transmit columns") {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const CMat H = cgaussian(8, 3, rng), G = cgaussian(7, 3, rng);
    const InnerZf z = inner_zf(H, G);
    CHECK((z.W_R_inner.adjoint() * H - CMat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
    for (int l = 0; l < 3; ++l) CHECK(std::abs(z.W_T_inner.col(l).norm() - 1.0) < 1e-8);
    const CMat off = z.W_T_inner.adjoint() * G;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) CHECK(std::abs(off(i, j)) < 1e-8);
  }
}

TEST_CASE("inner ZF rejects rank-deficient channels") {
  Rng rng(3);
  CMat H = cgaussian(6, 2, rng);
  H.col(1) = 2.0 * H.col(0);
  CHECK_THROWS_AS(zf_receive(H), SingularChannel);
  CHECK_THROWS_AS(zf_transmit(cgaussian(2, 3, rng)), SingularChannel);
}

TEST_CASE("upper-bound receive beamformer") {
  Rng rng(4);
  const CVec h = cgaussian(5, 1, rng);
  CHECK((upper_bound_rx_bf(CMat::Identity(5, 5), h) - h / h.norm()).norm() < 1e-12);
  CHECK((upper_bound_rx_bf(2.0 * CMat::Identity(5, 5), h) - h / h.norm()).norm() < 1e-12);
  CHECK_THROWS_AS(upper_bound_rx_bf(CMat::Zero(5, 5), h), SingularChannel);

  const CMat B = cgaussian(5, 5, rng);
  const CMat Q = B * B.adjoint() + 0.5 * CMat::Identity(5, 5);
  const CVec w = upper_bound_rx_bf(Q, h);
  const auto quot = [&](const CVec& v) {
    return std::norm(v.dot(h)) / v.dot(Q * v).real();
  };
  const double best = quot(w);
  for (int t = 0; t < 10000; ++t) {
    CVec v = cgaussian(5, 1, rng);
    v /= v.norm();
    CHECK(quot(v) <= best * (1 + 1e-12));
  }
}

TEST_CASE("eigen beamformer for the R->D hop") {
  CVec h(2);
  h << 1.0, 0.0;
  CHECK((eigen_bf_rd(h) - h).norm() == 0.0);
  h << 3.0, 4.0;
  const CVec w = eigen_bf_rd(h);
  CHECK(std::abs(w(0) - 0.6) < 1e-15);
  CHECK(std::abs(w(1) - 0.8) < 1e-15);
  Rng rng(5);
  const CVec g = cgaussian(7, 1, rng);
  const CVec u = eigen_bf_rd(g);
  CHECK(u.norm() == doctest::Approx(1.0));
  CHECK(std::abs(std::abs(u.dot(g)) - g.norm()) < 1e-12);
  CHECK_THROWS_AS(eigen_bf_rd(CVec::Zero(3)), InvalidParameter);
}
