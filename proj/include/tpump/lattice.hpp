#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tpump {

/// Raised when a topology, config or other user-supplied input is malformed.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Edge { A, C };

std::string to_string(Edge e);
Edge parse_edge(const std::string& s);

struct ChainSpec {
  int id = 1;
  int length = 6;
  double phase = 0.0;  // theta_mu, radians
};

struct EdgeRef {
  int chain = 1;
  Edge edge = Edge::A;
};

/// Hopping of strength `strength` (units of J) between the terminal sites of two chains.
struct EdgeCoupling {
  EdgeRef from;
  EdgeRef to;
  double strength = 1.0;
};

struct SiteRef {
  int chain = 1;
  int site = 1;  // 1-based position along the chain

  bool operator==(const SiteRef&) const = default;
};

/// Named set of flat site indices.
struct RegionSpec {
  std::string name;
  std::vector<std::size_t> sites;
};

/// A resolved coupling between two flat indices.
struct Link {
  std::size_t i = 0;
  std::size_t j = 0;
  double strength = 1.0;
};

/// Chains of trimers joined through their A/C edges.
///
/// Immutable after construction. Flat indices enumerate chains in ascending
/// id order and sites in ascending position, so chain k occupies a contiguous
/// block [offset(k), offset(k) + L_k).
class ArrayTopology {
 public:
  /// Validates and builds; throws ConfigError naming the offending chain or coupling.
  static ArrayTopology build(std::vector<ChainSpec> chains, std::vector<EdgeCoupling> couplings);

  std::size_t num_sites() const { return num_sites_; }
  std::size_t num_chains() const { return chains_.size(); }
  std::size_t num_trimers() const { return num_sites_ / 3; }

  const std::vector<ChainSpec>& chains() const { return chains_; }
  const std::vector<EdgeCoupling>& couplings() const { return couplings_; }

  bool has_chain(int id) const;
  const ChainSpec& chain(int id) const;
  std::size_t chain_offset(int id) const;

  std::size_t flatten(SiteRef s) const;
  SiteRef unflatten(std::size_t index) const;

  /// Flat index of the A (first) or C (last) site of a chain.
  std::size_t edge_site(EdgeRef e) const;

  /// Nearest-neighbour bonds inside each chain, i < j.
  std::vector<Link> intra_chain_bonds(double hopping = 1.0) const;
  /// Inter-chain couplings resolved to flat indices.
  std::vector<Link> coupling_links() const;

  /// All flat indices belonging to the given chains.
  RegionSpec region_of_chains(std::string name, const std::vector<int>& chain_ids) const;

 private:
  std::vector<ChainSpec> chains_;
  std::vector<EdgeCoupling> couplings_;
  std::vector<std::size_t> offsets_;
  std::size_t num_sites_ = 0;
};

/// Seven chains of six sites, theta = pi/3, with 1 -> {2,3}, 2 -> {4,6}, 3 -> {5,7}
/// (C edge of the upstream chain coupled to the A edges downstream, K = J).
ArrayTopology fig1c_topology();

/// A z = 3 Bethe lattice of chains grown `depth` junction shells out from a
/// central C -> {A, A} junction. Every junction joins one C edge to two A edges.
ArrayTopology bethe_topology(int depth, int length = 6, double phase = 0.0, double coupling = 1.0);

/// Two chains of `length` sites closed into a ring by C->A couplings of strength
/// `coupling` at both junctions.
ArrayTopology ring_topology(int length, double phase = 0.0, double coupling = 1.0);

/// Checks regions are pairwise disjoint and in range.
void validate_regions(const ArrayTopology& topology, const std::vector<RegionSpec>& regions);

}  // namespace tpump
