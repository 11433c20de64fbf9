#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "tpump/drive.hpp"

using namespace tpump;

namespace {

constexpr double pi = std::numbers::pi;

TrimerCurve circle(double cx, double cy, double radius, int n) {
  TrimerCurve c;
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * pi * k / n;
    c.samples.push_back({cx + radius * std::cos(a), cy + radius * std::sin(a)});
  }
  return c;
}

DisorderRealization with_offsets(std::vector<double> o, double w) { return {w, 0, std::move(o)}; }

// Quadratic form of the certificate; < 1 means the origin is enclosed.
double ellipse_form(double amplitude, CurvePoint o) {
  const double s = (o.ab + o.ac) / std::sqrt(2.0);
  const double d = (o.ab - o.ac) / std::sqrt(2.0);
  const double a = 3.0 * amplitude / std::sqrt(2.0);
  const double b = std::sqrt(3.0) * amplitude / std::sqrt(2.0);
  return s * s / (a * a) + d * d / (b * b);
}

}  // namespace

TEST_CASE("onsite frequency follows the cosine modulation plus offset") {
  const auto topo = fig1c_topology();
  const DriveParams drive;
  auto dis = sample_disorder(topo, 20.0, 3);
  const double t = 123.456;
  const auto all = onsite_frequencies(drive, topo, t, dis);
  for (std::size_t i = 0; i < topo.num_sites(); ++i) {
    const auto s = topo.unflatten(i);
    const double expected =
        45.0 * std::cos(2.0 * pi * (s.site - 1) / 3.0 + 0.015 * t + pi / 3.0) + dis.offsets[i];
    CHECK(all[i] == doctest::Approx(expected).epsilon(1e-13));
    CHECK(onsite_frequency(drive, topo, i, t, dis) == all[i]);
  }
  CHECK_THROWS_AS(onsite_frequencies(drive, topo, t, DisorderRealization::clean(5)), ConfigError);
}

TEST_CASE("drive is periodic up to roundoff") {
  const auto topo = fig1c_topology();
  const DriveParams drive;
  const auto dis = sample_disorder(topo, 20.0, 11);
  const double T = drive.period();
  CHECK(T == doctest::Approx(2.0 * pi / 0.015));
  for (double t : {0.0, 17.0, 0.5 * T, 2.9 * T}) {
    const auto a = onsite_frequencies(drive, topo, t, dis);
    const auto b = onsite_frequencies(drive, topo, t + T, dis);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12 * drive.amplitude);
  }
}

TEST_CASE("drive parameter validation") {
  CHECK_THROWS_AS((DriveParams{45.0, 0.0, 1.0 / 3.0}.validate()), ConfigError);
  CHECK_THROWS_AS((DriveParams{-1.0, 0.015, 1.0 / 3.0}.validate()), ConfigError);
  CHECK_NOTHROW((DriveParams{0.0, 0.015, 1.0 / 3.0}.validate()));
}

TEST_CASE("disorder draws are reproducible and uniform on [-W, W]") {
  const auto big = ArrayTopology::build({{1, 300000, 0.0}}, {});
  const double W = 20.0;
  const auto d = sample_disorder(big, W, 42);
  CHECK(d.seed == 42);
  CHECK(d.strength == W);
  CHECK(d.offsets == sample_disorder(big, W, 42).offsets);
  CHECK(d.offsets != sample_disorder(big, W, 43).offsets);

  const double n = static_cast<double>(d.offsets.size());
  double mean = 0.0, m2 = 0.0;
  for (double x : d.offsets) {
    CHECK_UNARY(std::abs(x) <= W);
    mean += x;
    m2 += x * x;
  }
  mean /= n;
  m2 /= n;
  // Fixed seed; 5 sigma bounds.
  CHECK(std::abs(mean) < 5.0 * W / std::sqrt(3.0 * n));
  CHECK(std::abs(m2 - W * W / 3.0) < 5.0 * W * W * std::sqrt(4.0 / 45.0 / n));

  // Kolmogorov-Smirnov distance against U(-W, W), 0.1% critical value.
  auto sorted = d.offsets;
  std::sort(sorted.begin(), sorted.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = (sorted[i] + W) / (2.0 * W);
    ks = std::max({ks, std::abs(cdf - i / n), std::abs(cdf - (i + 1) / n)});
  }
  CHECK(ks < 1.95 / std::sqrt(n));

  CHECK_THROWS_AS(sample_disorder(big, -1.0, 1), ConfigError);
  const auto zero = sample_disorder(fig1c_topology(), 0.0, 9);
  CHECK(std::all_of(zero.offsets.begin(), zero.offsets.end(), [](double x) { return x == 0.0; }));
}

TEST_CASE("clean trimer curve is the sqrt(3) Delta ellipse traversed clockwise") {
  const auto topo = fig1c_topology();
  const DriveParams drive;
  const auto clean = DisorderRealization::clean(topo.num_sites());
  const auto c = trimer_curve(drive, topo, clean, 3, 2, 64);
  REQUIRE(c.samples.size() == 64);
  for (int k = 0; k < 64; ++k) {
    const double x = 2.0 * pi * k / 64 + pi / 3.0;
    CHECK(c.samples[k].ab == doctest::Approx(std::sqrt(3.0) * 45.0 * std::sin(x + pi / 3.0)).epsilon(1e-12));
    CHECK(c.samples[k].ac == doctest::Approx(std::sqrt(3.0) * 45.0 * std::sin(x + 2.0 * pi / 3.0)).epsilon(1e-12));
  }
  for (const auto& ch : topo.chains())
    for (int r = 1; r <= 2; ++r) CHECK(winding_number(trimer_curve(drive, topo, clean, ch.id, r), drive) == -1);

  CHECK_THROWS_AS(trimer_curve(drive, topo, clean, 1, 3), ConfigError);
  CHECK_THROWS_AS(trimer_curve(drive, topo, clean, 1, 0), ConfigError);
  CHECK_THROWS_AS(trimer_curve(drive, topo, clean, 1, 1, 15), ConfigError);
}

TEST_CASE("winding number of circles") {
  CHECK(winding_number(circle(0.0, 0.0, 1.0, 32), 1e-9) == 1);
  CHECK(winding_number(circle(0.3, -0.4, 1.0, 32), 1e-9) == 1);
  CHECK(winding_number(circle(3.0, 0.0, 1.0, 32), 1e-9) == 0);
  auto twice = circle(0.0, 0.0, 1.0, 32);
  auto copy = twice.samples;
  twice.samples.insert(twice.samples.end(), copy.begin(), copy.end());
  CHECK(winding_number(twice, 1e-9) == 2);
}

TEST_CASE("winding is invariant under cyclic rotation and flips under reversal") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto c = circle(u(gen), u(gen), 0.5 + std::abs(u(gen)), 40);
    for (auto& p : c.samples) {
      p.ab += 0.05 * u(gen);
      p.ac += 0.05 * u(gen);
    }
    int w0 = 0;
    try {
      w0 = winding_number(c, 1e-9);
    } catch (const NumericalError&) {
      continue;
    }
    auto rotated = c;
    std::rotate(rotated.samples.begin(), rotated.samples.begin() + trial % 40, rotated.samples.end());
    CHECK(winding_number(rotated, 1e-9) == w0);
    auto reversed = c;
    std::reverse(reversed.samples.begin(), reversed.samples.end());
    CHECK(winding_number(reversed, 1e-9) == -w0);
  }
}

TEST_CASE("a curve through the origin reports gap closing") {
  auto c = circle(1.0, 0.0, 1.0, 32);  // sample 16 sits on the origin
  try {
    winding_number(c, 1e-9);
    FAIL("no gap closing reported");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("gap closing") != std::string::npos);
  }
  CHECK_THROWS_AS(winding_number(TrimerCurve{1, 1, {{1, 0}, {0, 1}}}, 1e-9), ConfigError);
}

TEST_CASE("coarse and fine sampling give the same winding") {
  const auto topo = fig1c_topology();
  const DriveParams drive;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto dis = sample_disorder(topo, 20.0, seed);
    for (const auto& ch : topo.chains())
      for (int r = 1; r <= 2; ++r)
        CHECK(winding_number(trimer_curve(drive, topo, dis, ch.id, r, 16), drive) ==
              winding_number(trimer_curve(drive, topo, dis, ch.id, r, 4096), drive));
  }
}

TEST_CASE("certificate agrees with direct winding on random offsets") {
  const auto topo = ArrayTopology::build({{1, 3, 0.0}}, {});
  const DriveParams drive;
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int agreed = 0, skipped = 0, enclosed = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const double scale = 1.3 * drive.amplitude;
    const auto dis = with_offsets({scale * u(gen), scale * u(gen), scale * u(gen)}, scale);
    const auto off = trimer_offset(topo, dis, 1, 1);
    // The sampled polygon is inscribed in the ellipse; skip draws on the boundary.
    if (std::abs(ellipse_form(drive.amplitude, off) - 1.0) < 1e-4) {
      ++skipped;
      continue;
    }
    const int w = winding_number(trimer_curve(drive, topo, dis, 1, 1, 1024), drive);
    const bool cert = protection_certificate(drive.amplitude, off);
    CHECK(w * w <= 1);
    CHECK(cert == (w != 0));
    agreed += cert == (w != 0);
    enclosed += cert;
  }
  CHECK(agreed + skipped == 10000);
  CHECK(skipped < 20);
  CHECK(enclosed > 1000);
  CHECK(enclosed < 9000);
}

TEST_CASE("worst-case disorder: the corner (W, -W, -W) sets the exact bound 3/4") {
  const auto topo = ArrayTopology::build({{1, 3, 0.0}}, {});
  const DriveParams drive;
  const double D = drive.amplitude;
  CHECK(max_certified_disorder_ratio() == 0.75);

  // Largest form over the eight corners of the offset box equals 16/9 (W/D)^2.
  for (double ratio : {0.1, 0.5, 0.75}) {
    const double W = ratio * D;
    double worst = 0.0;
    for (int m = 0; m < 8; ++m) {
      const double a = (m & 1) ? W : -W, b = (m & 2) ? W : -W, c = (m & 4) ? W : -W;
      worst = std::max(worst, ellipse_form(D, {a - b, a - c}));
    }
    CHECK(worst == doctest::Approx(16.0 / 9.0 * ratio * ratio).epsilon(1e-12));
  }

  const double below = 0.74 * D;
  auto dis = with_offsets({below, -below, -below}, below);
  CHECK(protection_certificate(D, trimer_offset(topo, dis, 1, 1)));
  CHECK(winding_number(trimer_curve(drive, topo, dis, 1, 1), drive) == -1);

  const double above = 0.8 * D;
  dis = with_offsets({above, -above, -above}, above);
  CHECK_FALSE(protection_certificate(D, trimer_offset(topo, dis, 1, 1)));
  CHECK(winding_number(trimer_curve(drive, topo, dis, 1, 1), drive) == 0);

  // The smaller ratio 3 / (2 sqrt 7) is also sufficient.
  const double conservative = 3.0 / (2.0 * std::sqrt(7.0));
  CHECK(conservative < max_certified_disorder_ratio());
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double W = conservative * D;
    const double a = W * u(gen), b = W * u(gen), c = W * u(gen);
    CHECK(protection_certificate(D, {a - b, a - c}));
  }

  CHECK_THROWS_AS(protection_certificate(0.0, {0, 0}), ConfigError);
}

TEST_CASE("trimer offset reads the three sites of the trimer") {
  const auto topo = fig1c_topology();
  std::vector<double> o(42, 0.0);
  o[topo.flatten({4, 4})] = 3.0;
  o[topo.flatten({4, 5})] = 1.0;
  o[topo.flatten({4, 6})] = -2.0;
  const auto off = trimer_offset(topo, with_offsets(o, 3.0), 4, 2);
  CHECK(off.ab == 2.0);
  CHECK(off.ac == 5.0);
}
