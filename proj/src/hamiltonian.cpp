#include "tpump/hamiltonian.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "tpump/format.hpp"

namespace tpump {

Eigen::MatrixXd HamiltonianSnapshot::dense() const {
  Eigen::MatrixXd out;
  fill_dense(out);
  return out;
}

void HamiltonianSnapshot::fill_dense(Eigen::MatrixXd& out) const {
  const auto n = static_cast<Eigen::Index>(dimension);
  out.setZero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) out(i, i) = diagonal[static_cast<std::size_t>(i)];
  for (const auto& b : bonds) {
    const auto i = static_cast<Eigen::Index>(b.i);
    const auto j = static_cast<Eigen::Index>(b.j);
    out(i, j) += b.strength;
    out(j, i) += b.strength;
  }
}

Eigen::VectorXcd HamiltonianSnapshot::apply(const Eigen::VectorXcd& psi) const {
  Eigen::VectorXcd out(psi.size());
  for (Eigen::Index i = 0; i < psi.size(); ++i) out(i) = diagonal[static_cast<std::size_t>(i)] * psi(i);
  for (const auto& b : bonds) {
    const auto i = static_cast<Eigen::Index>(b.i);
    const auto j = static_cast<Eigen::Index>(b.j);
    out(i) += b.strength * psi(j);
    out(j) += b.strength * psi(i);
  }
  return out;
}

HamiltonianSnapshot assemble(const ArrayTopology& topology, const DriveParams& drive,
                             const DisorderRealization& disorder, double t, double hopping) {
  if (disorder.offsets.size() != topology.num_sites())
    throw ConfigError("dimension mismatch: disorder has " + std::to_string(disorder.offsets.size()) +
                      " sites, topology has " + std::to_string(topology.num_sites()));
  HamiltonianSnapshot h;
  h.dimension = topology.num_sites();
  h.time = t;
  h.diagonal = onsite_frequencies(drive, topology, t, disorder);
  h.bonds = topology.intra_chain_bonds(hopping);
  const auto links = topology.coupling_links();
  h.bonds.insert(h.bonds.end(), links.begin(), links.end());
  return h;
}

std::vector<double> instantaneous_spectrum(const HamiltonianSnapshot& h, std::size_t cap) {
  if (h.dimension > cap)
    throw NumericalError("dense solver refused: dimension " + std::to_string(h.dimension) +
                         " exceeds cap " + std::to_string(cap));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.dense(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver failed");
  const auto& ev = solver.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end());
  return out;
}

void write_dense_csv(std::ostream& os, const HamiltonianSnapshot& h) {
  const auto m = h.dense();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) os << ',';
      os << format_double(m(i, j)) << ',' << format_double(0.0);
    }
    os << '\n';
  }
}

}  // namespace tpump
