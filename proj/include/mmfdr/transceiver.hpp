// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "mmfdr/model.hpp"

namespace mmfdr {

struct BeamformerSet {
  CMat P_R, P_T;          // N_R x A_R, N_T x A_T
  CMat W_R_inner;         // A_R x K
  CMat W_T_inner;         // A_T x K
  RVec Upsilon;           // K
  std::vector<CVec> p_S;  // N_S each
  std::vector<CVec> p_D;  // N_D each
  int A_R = 0, A_T = 0;

  CMat W_R() const { return P_R * W_R_inner; }
  CMat W_T() const { return P_T * W_T_inner; }
};

// eigenvectors for the A smallest eigenvalues, column j paired with the (N-A+j)-th largest
CMat outer_basis(const HermitianEig& eig, int A);
std::pair<CMat, CMat> outer_bf(const CorrelationMatrix& C_EI, const CorrelationMatrix& C_EI_tx,
                               int A_R, int A_T);

CVec source_bf(const CorrelationMatrix& C_tx_SR);
CVec dest_bf(const CorrelationMatrix& C_tx_RD);

struct InnerZf {
  CMat W_R_inner, W_T_inner;
  RVec Upsilon;
};

InnerZf inner_zf(const CMat& H_eff_SR, const CMat& H_eff_RD);
CMat zf_receive(const CMat& H);
// returns (W, Upsilon) with unit-norm columns
std::pair<CMat, RVec> zf_transmit(const CMat& H);

CVec upper_bound_rx_bf(const CMat& Q, const CVec& h);
CVec eigen_bf_rd(const CVec& h);

}  // namespace mmfdr
