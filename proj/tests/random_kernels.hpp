#pragma once

#include <Eigen/Dense>

#include "treedpp/rng.hpp"

namespace treedpp::fixtures {

// U diag(lambda) U^H with U from the QR factor of a complex matrix of
// uniform entries and lambda uniform on [0, 1].
inline Eigen::MatrixXcd randomHermitianKernel(Eigen::Index n, Pcg32& rng) {
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = {rng.uniform() - 0.5, rng.uniform() - 0.5};
  }
  const Eigen::MatrixXcd u = Eigen::HouseholderQR<Eigen::MatrixXcd>(a).householderQ();
  Eigen::VectorXd lambda(n);
  for (Eigen::Index k = 0; k < n; ++k) lambda(k) = rng.uniform();
  Eigen::MatrixXcd k = u * lambda.cast<std::complex<double>>().asDiagonal() * u.adjoint();
  return 0.5 * (k + k.adjoint());
}

}  // namespace treedpp::fixtures
