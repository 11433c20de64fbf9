#include "tpump/lattice.hpp"

#include <algorithm>
#include <numbers>
#include <set>
#include <tuple>

namespace tpump {

std::string to_string(Edge e) { return e == Edge::A ? "A" : "C"; }

Edge parse_edge(const std::string& s) {
  if (s == "A" || s == "a") return Edge::A;
  if (s == "C" || s == "c") return Edge::C;
  throw ConfigError("unknown edge label '" + s + "' (expected A or C)");
}

namespace {

std::string describe(const EdgeCoupling& c) {
  return "(" + std::to_string(c.from.chain) + "," + to_string(c.from.edge) + ")-(" +
         std::to_string(c.to.chain) + "," + to_string(c.to.edge) + ")";
}

}  // namespace

ArrayTopology ArrayTopology::build(std::vector<ChainSpec> chains,
                                   std::vector<EdgeCoupling> couplings) {
  if (chains.empty()) throw ConfigError("topology has no chains");
  std::sort(chains.begin(), chains.end(),
            [](const ChainSpec& a, const ChainSpec& b) { return a.id < b.id; });
  for (std::size_t k = 0; k < chains.size(); ++k) {
    const auto& c = chains[k];
    if (c.id < 1) throw ConfigError("chain id " + std::to_string(c.id) + " must be >= 1");
    if (k > 0 && chains[k - 1].id == c.id)
      throw ConfigError("duplicate chain id " + std::to_string(c.id));
    if (c.length < 3 || c.length % 3 != 0)
      throw ConfigError("chain " + std::to_string(c.id) + ": length " + std::to_string(c.length) +
                        " is not a positive multiple of 3");
  }

  ArrayTopology t;
  t.chains_ = std::move(chains);
  t.offsets_.reserve(t.chains_.size());
  for (const auto& c : t.chains_) {
    t.offsets_.push_back(t.num_sites_);
    t.num_sites_ += static_cast<std::size_t>(c.length);
  }

  // Unordered pair of (chain, edge) endpoints.
  std::set<std::tuple<int, int, int, int>> seen;
  for (const auto& c : couplings) {
    if (!t.has_chain(c.from.chain) || !t.has_chain(c.to.chain))
      throw ConfigError("coupling " + describe(c) + " references an unknown chain");
    if (c.from.chain == c.to.chain)
      throw ConfigError("coupling " + describe(c) + " joins a chain to itself");
    if (c.from.edge == c.to.edge)
      throw ConfigError("coupling " + describe(c) + ": " + to_string(c.from.edge) +
                        " edge coupled to " + to_string(c.to.edge) + " edge");
    auto a = std::make_pair(c.from.chain, static_cast<int>(c.from.edge));
    auto b = std::make_pair(c.to.chain, static_cast<int>(c.to.edge));
    if (b < a) std::swap(a, b);
    if (!seen.emplace(a.first, a.second, b.first, b.second).second)
      throw ConfigError("duplicate coupling " + describe(c));
  }
  t.couplings_ = std::move(couplings);
  return t;
}

bool ArrayTopology::has_chain(int id) const {
  return std::binary_search(chains_.begin(), chains_.end(), ChainSpec{id, 3, 0.0},
                            [](const ChainSpec& a, const ChainSpec& b) { return a.id < b.id; });
}

const ChainSpec& ArrayTopology::chain(int id) const {
  auto it = std::lower_bound(chains_.begin(), chains_.end(), id,
                             [](const ChainSpec& a, int v) { return a.id < v; });
  if (it == chains_.end() || it->id != id)
    throw ConfigError("unknown chain id " + std::to_string(id));
  return *it;
}

std::size_t ArrayTopology::chain_offset(int id) const {
  const auto& c = chain(id);
  return offsets_[static_cast<std::size_t>(&c - chains_.data())];
}

std::size_t ArrayTopology::flatten(SiteRef s) const {
  const auto& c = chain(s.chain);
  if (s.site < 1 || s.site > c.length)
    throw ConfigError("site " + std::to_string(s.site) + " outside chain " +
                      std::to_string(s.chain) + " of length " + std::to_string(c.length));
  return chain_offset(s.chain) + static_cast<std::size_t>(s.site - 1);
}

SiteRef ArrayTopology::unflatten(std::size_t index) const {
  if (index >= num_sites_) throw ConfigError("flat index " + std::to_string(index) + " out of range");
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), index);
  const auto k = static_cast<std::size_t>(it - offsets_.begin()) - 1;
  return {chains_[k].id, static_cast<int>(index - offsets_[k]) + 1};
}

std::size_t ArrayTopology::edge_site(EdgeRef e) const {
  const auto& c = chain(e.chain);
  return flatten({e.chain, e.edge == Edge::A ? 1 : c.length});
}

std::vector<Link> ArrayTopology::intra_chain_bonds(double hopping) const {
  std::vector<Link> out;
  out.reserve(num_sites_);
  for (std::size_t k = 0; k < chains_.size(); ++k)
    for (int l = 0; l + 1 < chains_[k].length; ++l) {
      const auto i = offsets_[k] + static_cast<std::size_t>(l);
      out.push_back({i, i + 1, hopping});
    }
  return out;
}

std::vector<Link> ArrayTopology::coupling_links() const {
  std::vector<Link> out;
  out.reserve(couplings_.size());
  for (const auto& c : couplings_) {
    auto i = edge_site(c.from);
    auto j = edge_site(c.to);
    if (j < i) std::swap(i, j);
    out.push_back({i, j, c.strength});
  }
  return out;
}

RegionSpec ArrayTopology::region_of_chains(std::string name, const std::vector<int>& chain_ids) const {
  RegionSpec r{std::move(name), {}};
  for (int id : chain_ids) {
    const auto off = chain_offset(id);
    for (int l = 0; l < chain(id).length; ++l) r.sites.push_back(off + static_cast<std::size_t>(l));
  }
  std::sort(r.sites.begin(), r.sites.end());
  return r;
}

ArrayTopology fig1c_topology() {
  constexpr double theta = std::numbers::pi / 3.0;
  std::vector<ChainSpec> chains;
  for (int mu = 1; mu <= 7; ++mu) chains.push_back({mu, 6, theta});
  auto downstream = [](int up, int down) {
    return EdgeCoupling{{up, Edge::C}, {down, Edge::A}, 1.0};
  };
  return ArrayTopology::build(std::move(chains), {downstream(1, 2), downstream(1, 3),
                                                  downstream(3, 5), downstream(3, 7),
                                                  downstream(2, 6), downstream(2, 4)});
}

ArrayTopology bethe_topology(int depth, int length, double phase, double coupling) {
  if (depth < 1) throw ConfigError("bethe depth must be >= 1, got " + std::to_string(depth));

  std::vector<ChainSpec> chains;
  std::vector<EdgeCoupling> couplings;
  auto add_chain = [&] {
    const int id = static_cast<int>(chains.size()) + 1;
    chains.push_back({id, length, phase});
    return id;
  };

  // Central junction: chain 1's C edge feeds the A edges of chains 2 and 3.
  const int root = add_chain();
  const int left = add_chain();
  const int right = add_chain();
  couplings.push_back({{root, Edge::C}, {left, Edge::A}, coupling});
  couplings.push_back({{root, Edge::C}, {right, Edge::A}, coupling});
  std::vector<EdgeRef> free_ends{{root, Edge::A}, {left, Edge::C}, {right, Edge::C}};

  for (int shell = 2; shell <= depth; ++shell) {
    std::vector<EdgeRef> next;
    for (const auto& end : free_ends) {
      if (end.edge == Edge::C) {
        // C -> {A, A}
        const int a = add_chain();
        const int b = add_chain();
        couplings.push_back({end, {a, Edge::A}, coupling});
        couplings.push_back({end, {b, Edge::A}, coupling});
        next.push_back({a, Edge::C});
        next.push_back({b, Edge::C});
      } else {
        // A free end: a new chain supplies the C edge, another new chain the second A.
        const int feeder = add_chain();
        const int sibling = add_chain();
        couplings.push_back({{feeder, Edge::C}, end, coupling});
        couplings.push_back({{feeder, Edge::C}, {sibling, Edge::A}, coupling});
        next.push_back({feeder, Edge::A});
        next.push_back({sibling, Edge::C});
      }
    }
    free_ends = std::move(next);
  }
  return ArrayTopology::build(std::move(chains), std::move(couplings));
}

ArrayTopology ring_topology(int length, double phase, double coupling) {
  return ArrayTopology::build({{1, length, phase}, {2, length, phase}},
                              {{{1, Edge::C}, {2, Edge::A}, coupling},
                               {{2, Edge::C}, {1, Edge::A}, coupling}});
}

void validate_regions(const ArrayTopology& topology, const std::vector<RegionSpec>& regions) {
  std::vector<int> owner(topology.num_sites(), -1);
  for (std::size_t r = 0; r < regions.size(); ++r)
    for (auto s : regions[r].sites) {
      if (s >= topology.num_sites())
        throw ConfigError("region '" + regions[r].name + "' references site " + std::to_string(s) +
                          " outside the array");
      if (owner[s] == static_cast<int>(r))
        throw ConfigError("region '" + regions[r].name + "' lists site " + std::to_string(s) + " twice");
      if (owner[s] >= 0)
        throw ConfigError("regions '" + regions[static_cast<std::size_t>(owner[s])].name + "' and '" +
                          regions[r].name + "' overlap at site " + std::to_string(s));
      owner[s] = static_cast<int>(r);
    }
}

}  // namespace tpump
