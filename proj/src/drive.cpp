#include "tpump/drive.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace tpump {

double DriveParams::period() const { return 2.0 * std::numbers::pi / frequency; }

void DriveParams::validate() const {
  if (!(amplitude >= 0.0)) throw ConfigError("drive amplitude must be >= 0");
  if (!(frequency > 0.0)) throw ConfigError("drive frequency must be > 0");
  if (!std::isfinite(b)) throw ConfigError("drive b must be finite");
}

DisorderRealization DisorderRealization::clean(std::size_t num_sites) {
  return {0.0, 0, std::vector<double>(num_sites, 0.0)};
}

DisorderRealization sample_disorder(const ArrayTopology& topology, double strength, std::uint64_t seed) {
  if (!(strength >= 0.0)) throw ConfigError("disorder strength must be >= 0");
  DisorderRealization d{strength, seed, std::vector<double>(topology.num_sites(), 0.0)};
  std::mt19937_64 gen(seed);
  constexpr double scale = 1.0 / static_cast<double>((std::uint64_t{1} << 53) - 1);
  for (auto& x : d.offsets) {
    const double u = static_cast<double>(gen() >> 11) * scale;
    x = strength * (2.0 * u - 1.0);
  }
  return d;
}

double onsite_frequency(const DriveParams& drive, const ArrayTopology& topology, std::size_t site,
                        double t, const DisorderRealization& disorder) {
  const auto ref = topology.unflatten(site);
  const double base = drive.frequency * t + topology.chain(ref.chain).phase;
  return drive.amplitude * std::cos(2.0 * std::numbers::pi * (ref.site - 1) * drive.b + base) +
         disorder.offsets.at(site);
}

std::vector<double> onsite_frequencies(const DriveParams& drive, const ArrayTopology& topology,
                                       double t, const DisorderRealization& disorder) {
  if (disorder.offsets.size() != topology.num_sites())
    throw ConfigError("disorder has " + std::to_string(disorder.offsets.size()) +
                      " offsets but topology has " + std::to_string(topology.num_sites()) + " sites");
  std::vector<double> out(topology.num_sites());
  std::size_t i = 0;
  for (const auto& c : topology.chains()) {
    const double base = drive.frequency * t + c.phase;
    for (int l = 0; l < c.length; ++l, ++i)
      out[i] = drive.amplitude * std::cos(2.0 * std::numbers::pi * l * drive.b + base) +
               disorder.offsets[i];
  }
  return out;
}

namespace {

void check_trimer(const ArrayTopology& topology, int chain, int trimer) {
  const auto& c = topology.chain(chain);
  if (trimer < 1 || 3 * trimer > c.length)
    throw ConfigError("chain " + std::to_string(chain) + " has no trimer " + std::to_string(trimer));
}

}  // namespace

TrimerCurve trimer_curve(const DriveParams& drive, const ArrayTopology& topology,
                         const DisorderRealization& disorder, int chain, int trimer, int n_samples) {
  if (n_samples < 16) throw ConfigError("trimer curve needs at least 16 samples");
  check_trimer(topology, chain, trimer);
  const auto a = topology.flatten({chain, 3 * trimer - 2});
  TrimerCurve curve{chain, trimer, {}};
  curve.samples.reserve(static_cast<std::size_t>(n_samples));
  const double period = drive.period();
  for (int k = 0; k < n_samples; ++k) {
    const double t = period * k / n_samples;
    const double wa = onsite_frequency(drive, topology, a, t, disorder);
    const double wb = onsite_frequency(drive, topology, a + 1, t, disorder);
    const double wc = onsite_frequency(drive, topology, a + 2, t, disorder);
    curve.samples.push_back({wa - wb, wa - wc});
  }
  return curve;
}

namespace {

// Distance from the origin to segment p -> q.
double origin_distance(CurvePoint p, CurvePoint q) {
  const double dx = q.ab - p.ab;
  const double dy = q.ac - p.ac;
  const double len2 = dx * dx + dy * dy;
  double s = len2 > 0.0 ? -(p.ab * dx + p.ac * dy) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return std::hypot(p.ab + s * dx, p.ac + s * dy);
}

}  // namespace

int winding_number(const TrimerCurve& curve, double tolerance) {
  const auto& pts = curve.samples;
  if (pts.size() < 3) throw ConfigError("winding number needs at least 3 samples");
  double total = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto p = pts[k];
    const auto q = pts[(k + 1) % pts.size()];
    if (origin_distance(p, q) <= tolerance)
      throw NumericalError("gap closing: curve of chain " + std::to_string(curve.chain) + " trimer " +
                           std::to_string(curve.trimer) + " passes through the origin near sample " +
                           std::to_string(k));
    // Wrapped angle increment in (-pi, pi].
    total += std::atan2(p.ab * q.ac - p.ac * q.ab, p.ab * q.ab + p.ac * q.ac);
  }
  const double turns = total / (2.0 * std::numbers::pi);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) >= 1e-6)
    throw NumericalError("winding residual " + std::to_string(turns - rounded) + " too large");
  return static_cast<int>(rounded);
}

int winding_number(const TrimerCurve& curve, const DriveParams& drive) {
  return winding_number(curve, 1e-9 * drive.amplitude);
}

bool protection_certificate(double amplitude, CurvePoint offset) {
  if (!(amplitude > 0.0)) throw ConfigError("protection certificate needs a positive amplitude");
  const double s0 = (offset.ab + offset.ac) / std::numbers::sqrt2;
  const double d0 = (offset.ab - offset.ac) / std::numbers::sqrt2;
  const double a = 3.0 * amplitude / std::numbers::sqrt2;
  const double b = std::numbers::sqrt3 * amplitude / std::numbers::sqrt2;
  return (s0 / a) * (s0 / a) + (d0 / b) * (d0 / b) < 1.0;
}

CurvePoint trimer_offset(const ArrayTopology& topology, const DisorderRealization& disorder,
                         int chain, int trimer) {
  check_trimer(topology, chain, trimer);
  const auto a = topology.flatten({chain, 3 * trimer - 2});
  const auto& d = disorder.offsets;
  return {d.at(a) - d.at(a + 1), d.at(a) - d.at(a + 2)};
}

}  // namespace tpump
