#pragma once

#include <vector>

#include <Eigen/Dense>

namespace tpump {

/// Clean, infinite modulated chain with b = p/q: q sites per unit cell,
/// onsite Delta cos(2 pi m p / q + phi) (m = 0..q-1) and hopping J.
///
/// Bloch states are psi_{n,m} = e^{i k n} u_m with k per unit cell, so the only
/// k dependence sits on the bond from sublattice q-1 to sublattice 0 of the next cell.
struct BlochModel {
  int p = 1;
  int q = 3;
  double amplitude = 45.0;
  double hopping = 1.0;

  void validate() const;
};

Eigen::MatrixXcd bloch_hamiltonian(const BlochModel& model, double k, double phi);

/// Ascending band energies at (k, phi).
Eigen::VectorXd bloch_bands(const BlochModel& model, double k, double phi);

struct ChernResult {
  std::vector<int> chern;  // ascending band energy
  int n_k = 0;
  int n_phi = 0;
  double residual = 0.0;  // max over bands of |total flux / 2 pi - C|
  double min_gap = 0.0;   // smallest interband separation seen on the grid
};

/// Lattice field-strength Chern numbers over the (k, phi) torus, both in [0, 2 pi).
///
/// Positive C means the band's Wannier centre advances by C unit cells towards
/// increasing site index per cycle of phi. Throws NumericalError("band touching
/// on grid ...") if neighbouring bands come within 1e-9 * max(Delta, J) at any
/// grid point, and ConfigError if either grid dimension is below 6.
ChernResult fhs_chern(const BlochModel& model, int n_k = 60, int n_phi = 60);

/// Smallest separation between adjacent bands over the grid.
double min_gap(const BlochModel& model, int n_k = 60, int n_phi = 60);

}  // namespace tpump
