// SPDX-License-Identifier: Apache-2.0
#include "mmfdr/common.hpp"

namespace mmfdr {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

CMat cgaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  CMat X(rows, cols);
  // column-major fill keeps the draw order tied to the storage order
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) X(i, j) = rng.cnormal();
  return X;
}

}  // namespace mmfdr
