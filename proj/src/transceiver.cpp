// SPDX-License-Identifier: Apache-2.0
#include "mmfdr/transceiver.hpp"

#include <Eigen/Eigenvalues>

namespace mmfdr {

namespace {

constexpr double kMaxGramCond = 1e10;

// inverse of the Gram matrix H^H H after a conditioning check
CMat gram_inverse(const CMat& H) {
  if (H.rows() < H.cols()) throw SingularChannel("effective channel has fewer rows than columns");
  const CMat G = hermitian_part(H.adjoint() * H);
  Eigen::SelfAdjointEigenSolver<CMat> es(G);
  const RVec& ev = es.eigenvalues();
  if (!(ev(0) > 0.0) || ev(ev.size() - 1) / ev(0) > kMaxGramCond)
    throw SingularChannel("Gram matrix is singular or ill-conditioned");
  const CMat& V = es.eigenvectors();
  return V * ev.cwiseInverse().asDiagonal() * V.adjoint();
}

}  // namespace

CMat outer_basis(const HermitianEig& eig, int A) {
  const auto n = eig.values.size();
  if (A < 1 || A > n) throw InvalidParameter("DOF parameter out of range");
  return eig.vectors.rightCols(A);
}

std::pair<CMat, CMat> outer_bf(const CorrelationMatrix& C_EI, const CorrelationMatrix& C_EI_tx,
                               int A_R, int A_T) {
  if (A_R < 1 || A_R > C_EI.n() || A_T < 1 || A_T > C_EI_tx.n())
    throw InvalidParameter("DOF parameter out of range");
  return {outer_basis(hermitian_eig(C_EI.C), A_R), outer_basis(hermitian_eig(C_EI_tx.C), A_T)};
}

CVec source_bf(const CorrelationMatrix& C_tx_SR) {
  if (C_tx_SR.n() == 1) return CVec::Ones(1);
  return hermitian_eig(C_tx_SR.C).vectors.col(0);
}

CVec dest_bf(const CorrelationMatrix& C_tx_RD) { return source_bf(C_tx_RD); }

CMat zf_receive(const CMat& H) { return H * gram_inverse(H); }

std::pair<CMat, RVec> zf_transmit(const CMat& H) {
  const CMat Gi = gram_inverse(H);
  RVec ups = Gi.diagonal().real();
  CMat W = H * Gi;
  for (Eigen::Index l = 0; l < W.cols(); ++l) W.col(l) /= std::sqrt(ups(l));
  return {W, ups};
}

InnerZf inner_zf(const CMat& H_eff_SR, const CMat& H_eff_RD) {
  InnerZf out;
  out.W_R_inner = zf_receive(H_eff_SR);
  auto [W, ups] = zf_transmit(H_eff_RD);
  out.W_T_inner = std::move(W);
  out.Upsilon = std::move(ups);
  return out;
}

CVec upper_bound_rx_bf(const CMat& Q, const CVec& h) {
  Eigen::LDLT<CMat> ldlt(hermitian_part(Q));
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().real().minCoeff() <= 1e-14 * ldlt.vectorD().real().maxCoeff())
    throw SingularChannel("Q is singular");
  CVec w = ldlt.solve(h);
  const double n = w.norm();
  if (!(n > 0.0)) throw InvalidParameter("zero channel vector");
  return w / n;
}

CVec eigen_bf_rd(const CVec& h) {
  const double n = h.norm();
  if (!(n > 0.0)) throw InvalidParameter("zero channel vector");
  return h / n;
}

}  // namespace mmfdr
