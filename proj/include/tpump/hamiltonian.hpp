#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "tpump/drive.hpp"
#include "tpump/lattice.hpp"

namespace tpump {

/// Single-excitation Hamiltonian of the array at one instant.
///
/// In the sector with one flipped spin, (XX + YY)/2 on a bond acts as a hop of
/// the flip, and the Z terms leave omega_i on the diagonal plus a constant
/// -(1/2) sum_i omega_i that only contributes a global phase and is dropped.
/// All amplitudes are real in this basis.
struct HamiltonianSnapshot {
  std::size_t dimension = 0;
  std::vector<double> diagonal;
  std::vector<Link> bonds;  // i < j, each physical bond once
  double time = 0.0;

  Eigen::MatrixXd dense() const;
  void fill_dense(Eigen::MatrixXd& out) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& psi) const;
};

HamiltonianSnapshot assemble(const ArrayTopology& topology, const DriveParams& drive,
                             const DisorderRealization& disorder, double t, double hopping = 1.0);

inline constexpr std::size_t kDefaultDenseCap = 1024;

/// Eigenvalues in ascending order. Refuses matrices above `cap`.
std::vector<double> instantaneous_spectrum(const HamiltonianSnapshot& h,
                                           std::size_t cap = kDefaultDenseCap);

/// Row-major dense dump, each entry written as "re,im".
void write_dense_csv(std::ostream& os, const HamiltonianSnapshot& h);

}  // namespace tpump
