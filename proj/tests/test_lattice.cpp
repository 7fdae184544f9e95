#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "cmbo/error.hpp"
#include "cmbo/lattice.hpp"
#include "cmbo/specfun.hpp"

using namespace cmbo;
using namespace cmbo::lattice;

namespace {

std::vector<double> random_vec(std::size_t n, double scale, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ud(-scale, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = ud(rng);
  return v;
}

double norm2(const std::vector<double>& v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

// Pairwise forces on absolute positions of the periodically extended chain.
std::vector<double> position_space_force(const std::vector<double>& r, double alpha, std::size_t M) {
  const long n = static_cast<long>(r.size());
  const double total = std::accumulate(r.begin(), r.end(), 0.0);
  std::vector<double> x0(n);
  for (long j = 1; j < n; ++j) x0[j] = x0[j - 1] + 1.0 + r[j - 1];
  auto x = [&](long j) {
    const long w = (j % n + n) % n;
    const long wraps = (j - w) / n;
    return x0[w] + static_cast<double>(wraps) * (static_cast<double>(n) + total);
  };
  std::vector<double> acc(n, 0.0);
  for (long j = 0; j < n; ++j) {
    for (long m = 1; m <= static_cast<long>(M); ++m) {
      acc[j] -= alpha * (std::pow(x(j + m) - x(j), -alpha - 1) - std::pow(x(j) - x(j - m), -alpha - 1));
    }
  }
  return acc;
}

std::vector<double> gaussian_r(std::size_t n, double amp, double width) {
  std::vector<double> r(n);
  const double mid = static_cast<double>(n) / 2;
  for (std::size_t j = 0; j < n; ++j) r[j] = amp * std::exp(-std::pow((j - mid) / width, 2));
  return r;
}

}  // namespace

TEST_CASE("windowed sums") {
  std::mt19937_64 rng(1);
  auto r = random_vec(64, 1.0, rng);
  CHECK(gsum(r, 1) == r);
  std::vector<double> c(64, 0.7);
  for (double v : gsum(c, 9)) CHECK(v == doctest::Approx(6.3));
  for (long m = 1; m <= 32; ++m) {
    const auto g = gsum(r, m);
    const auto gm = gsum(r, -m);
    for (long j = 0; j < 64; ++j) {
      double direct = 0, direct_neg = 0;
      for (long l = 0; l < m; ++l) {
        direct += r[(j + l) % 64];
        direct_neg += r[((j - m + l) % 64 + 64) % 64];
      }
      CHECK(g[j] == doctest::Approx(direct).epsilon(1e-13));
      CHECK(gm[j] == doctest::Approx(direct_neg).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(gsum(r, 0), ArgumentError);
  CHECK_THROWS_AS(gsum(r, 65), ArgumentError);
}

TEST_CASE("potentials") {
  for (double alpha : {1.6, 2.0, 2.5}) {
    for (long m : {1L, 3L, 10L}) {
      CHECK(v_m(0.0, m, alpha) == 0.0);
      CHECK(v_m_prime(0.0, m, alpha) == 0.0);
      const double h = 1e-4;
      const double second = (v_m_prime(h, m, alpha) - v_m_prime(-h, m, alpha)) / (2 * h);
      CHECK(second == doctest::Approx(alpha * (alpha + 1) * std::pow(m, -alpha - 2)).epsilon(1e-6));
      // continuity across the series crossover
      const double g = 1e-3 * m;
      CHECK(v_m(g * (1 - 1e-12), m, alpha) == doctest::Approx(v_m(g * (1 + 1e-12), m, alpha)).epsilon(1e-10));
      CHECK(v_m_prime(g * (1 - 1e-12), m, alpha) == doctest::Approx(v_m_prime(g * (1 + 1e-12), m, alpha)).epsilon(1e-10));
      // derivative consistency
      const double gg = 0.3;
      const double dv = (v_m(gg + 1e-5, m, alpha) - v_m(gg - 1e-5, m, alpha)) / 2e-5;
      CHECK(dv == doctest::Approx(v_m_prime(gg, m, alpha)).epsilon(1e-7));
    }
  }
  // tiny arguments keep full relative accuracy
  const double q = 1e-8;
  CHECK(v_m(q, 1, 2.0) == doctest::Approx(3 * q * q - 4 * q * q * q).epsilon(1e-12));
  for (long m = 1; m <= 10; ++m) {
    for (double g = -0.1; g <= 0.1; g += 0.01) CHECK(v_m(g, m, 2.0) >= 0.0);
  }
  CHECK_THROWS_AS(v_m(-1.0, 1, 2.0), CollisionError);
  CHECK_THROWS_AS(v_m_prime(-3.5, 3, 2.0), CollisionError);
}

TEST_CASE("two-point potential") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ud(-1, 1);
  for (double alpha : {1.6, 2.0, 2.5}) {
    for (long m : {1L, 2L, 5L, 17L}) {
      for (double a : {-0.3, 1e-5, 0.2}) CHECK(w_m(a, 0.0, m, alpha) == v_m(a, m, alpha));
      for (double b : {-0.3, 0.1}) {
        CHECK(w_m(0.0, b, m, alpha) == 0.0);
        CHECK(w_m_prime(0.0, b, m, alpha) == 0.0);
      }
      for (int trial = 0; trial < 200; ++trial) {
        double a = ud(rng) * m / 2, b = ud(rng) * m / 2;
        if (std::abs(a) + std::abs(b) > m / 2.0) {
          const double scale = (m / 2.0) / (std::abs(a) + std::abs(b));
          a *= scale;
          b *= scale;
        }
        const double w = w_m(a, b, m, alpha);
        const double k = alpha * (alpha + 1) * a * a / 2;
        const double spread = std::abs(a) + std::abs(b);
        CHECK(w >= k / std::pow(m + spread, alpha + 2) * (1 - 1e-12));
        CHECK(w <= k / std::pow(m - spread, alpha + 2) * (1 + 1e-12));
      }
      // partial derivatives against differences
      const double a = 0.21, b = -0.13, h = 1e-5;
      CHECK((w_m(a + h, b, m, alpha) - w_m(a - h, b, m, alpha)) / (2 * h) ==
            doctest::Approx(w_m_prime(a, b, m, alpha)).epsilon(1e-6));
      CHECK((w_m(a, b + h, m, alpha) - w_m(a, b - h, m, alpha)) / (2 * h) ==
            doctest::Approx(w_m_db(a, b, m, alpha)).epsilon(1e-6));
    }
  }
  CHECK_THROWS_AS(w_m(-0.6, -0.5, 1, 2.0), CollisionError);
}

TEST_CASE("force") {
  LatticeConfig cfg{32, 2.0, 15, 0.05, false};
  CHECK(norm2(force(std::vector<double>(32, 0.0), cfg)) == 0.0);
  for (double f : force(std::vector<double>(32, 0.05), cfg)) CHECK(std::abs(f) < 1e-15);

  std::mt19937_64 rng(4);
  for (double alpha : {1.6, 2.0, 2.5}) {
    cfg.alpha = alpha;
    auto r = random_vec(32, 0.05, rng);
    const auto f = force(r, cfg);
    const auto oracle = position_space_force(r, alpha, cfg.cutoff);
    for (std::size_t j = 0; j < 32; ++j) CHECK(std::abs(f[j] - oracle[j]) < 1e-12);
    CHECK(std::abs(std::accumulate(f.begin(), f.end(), 0.0)) < 1e-12);
  }
}

TEST_CASE("truncation tail") {
  std::mt19937_64 rng(8);
  const auto r = random_vec(256, 0.02, rng);
  for (double alpha : {1.6, 2.0, 2.5}) {
    for (std::size_t M : {8u, 20u, 60u}) {
      const auto f1 = force(r, {256, alpha, M, 0.05, false});
      const auto f2 = force(r, {256, alpha, 2 * M, 0.05, false});
      std::vector<double> d(256);
      for (std::size_t j = 0; j < 256; ++j) d[j] = f1[j] - f2[j];
      double bound = 0;
      for (std::size_t m = M + 1; m <= 2 * M; ++m) bound += std::pow(m, -alpha);
      CHECK(norm2(d) <= 2 * norm2(r) * bound);
    }
  }
}

TEST_CASE("harmonic tail correction") {
  // The tail symbol must reproduce the linearized m > M interactions that a
  // longer explicit cutoff includes.
  const std::size_t n = 512;
  std::mt19937_64 rng(12);
  auto r = gaussian_r(n, 1e-6, 20.0);
  for (double alpha : {1.8, 2.5}) {
    const auto with_tail = force(r, {n, alpha, 40, 0.05, true});
    const auto long_range = force(r, {n, alpha, 255, 0.05, true});
    const auto long_plain = force(r, {n, alpha, 255, 0.05, false});
    double diff = 0, ref = 0, change = 0;
    for (std::size_t j = 0; j < n; ++j) {
      diff = std::max(diff, std::abs(with_tail[j] - long_range[j]));
      change = std::max(change, std::abs(long_range[j] - long_plain[j]));
      ref = std::max(ref, std::abs(long_range[j]));
    }
    CHECK(diff < 1e-8 * ref);
    CHECK(change > 1e3 * diff);
    // zero net force and energy consistency with the force
    Lattice lat({n, alpha, 40, 0.05, true});
    const auto f = lat.force(r);
    CHECK(std::abs(std::accumulate(f.begin(), f.end(), 0.0)) < 1e-18);
    auto rp = r;
    rp[200] += 1e-9;
    auto rm = r;
    rm[200] -= 1e-9;
    const double dE = (lat.potential(rp) - lat.potential(rm)) / 2e-9;
    // dp/dt = delta_1^- dP/dr
    std::vector<double> grad(n);
    for (std::size_t j = 0; j < n; ++j) {
      auto a = r, b = r;
      a[j] += 1e-9;
      b[j] -= 1e-9;
      if (j == 199 || j == 200) grad[j] = (lat.potential(a) - lat.potential(b)) / 2e-9;
    }
    CHECK(grad[200] == doctest::Approx(dE));
    CHECK(f[200] == doctest::Approx(grad[200] - grad[199]).epsilon(1e-5));
  }
}

TEST_CASE("Verlet integration") {
  const std::size_t n = 256;
  LatticeConfig cfg{n, 2.0, n / 2 - 1, 0.05, false};
  LatticeState zero{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0.0};
  auto z1 = verlet_step(zero, cfg);
  CHECK(norm2(z1.r) == 0.0);
  CHECK(norm2(z1.p) == 0.0);
  CHECK(z1.t == doctest::Approx(0.05));

  LatticeState s{gaussian_r(n, 0.01, 12.0), std::vector<double>(n, 0.0), 0.0};
  for (std::size_t j = 0; j < n; ++j) s.p[j] = -std::sqrt(6 * specfun::zeta(2.0)) * s.r[j];
  Lattice lat(cfg);
  auto fwd = s;
  lat.advance(fwd, 200);
  lat.advance(fwd, 200, true);
  for (std::size_t j = 0; j < n; ++j) {
    CHECK(std::abs(fwd.r[j] - s.r[j]) < 1e-12);
    CHECK(std::abs(fwd.p[j] - s.p[j]) < 1e-12);
  }
  CHECK(std::abs(fwd.t) < 1e-12);
}

TEST_CASE("energy") {
  const std::size_t n = 64;
  LatticeConfig cfg{n, 2.0, 20, 0.05, false};
  LatticeState zero{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0.0};
  CHECK(energy(zero, cfg) == 0.0);
  std::mt19937_64 rng(3);
  auto p = random_vec(n, 1.0, rng);
  LatticeState kin{std::vector<double>(n, 0.0), p, 0.0};
  CHECK(energy(kin, cfg) == doctest::Approx(0.5 * std::pow(norm2(p), 2)).epsilon(1e-14));
  LatticeState pot{random_vec(n, 0.05, rng), std::vector<double>(n, 0.0), 0.0};
  CHECK(energy(pot, cfg) > 0.0);
}

TEST_CASE("norm equivalence functional") {
  std::vector<double> e0(128, 0.0);
  e0[0] = 1.0;
  for (double alpha : {1.6, 2.0, 2.5}) {
    double expected = 0;
    for (int m = 1; m <= 63; ++m) expected += std::pow(m, -alpha - 1);
    CHECK(p2_functional(e0, alpha, 63).value == doctest::Approx(expected).epsilon(1e-13));
    CHECK(p2_functional(std::vector<double>(128, 0.0), alpha, 63).value == 0.0);
  }
  std::mt19937_64 rng(21);
  for (double alpha : {1.6, 2.0, 2.5}) {
    const double za = specfun::zeta(alpha), za1 = specfun::zeta(alpha + 1);
    for (int trial = 0; trial < 200; ++trial) {
      auto eta = random_vec(128, 1.0, rng);
      const double n2 = std::pow(norm2(eta), 2);
      const auto p2 = p2_functional(eta, alpha, 127);
      CHECK(p2.value >= (2 * za1 - za) * n2);
      CHECK(p2.value <= za * n2);
      CHECK(p2.tail_bound == doctest::Approx(n2 * specfun::zeta_tail(alpha, 127)));
    }
  }
}

TEST_CASE("error energy") {
  const std::size_t n = 64;
  LatticeConfig cfg{n, 2.0, 31, 0.05, false};
  std::mt19937_64 rng(5);
  const auto xi = random_vec(n, 0.1, rng);
  const auto rt = random_vec(n, 0.02, rng);
  const std::vector<double> zero(n, 0.0);
  auto h = error_energy(xi, zero, rt, cfg);
  CHECK(h.value == doctest::Approx(0.5 * std::pow(norm2(xi), 2)).epsilon(1e-14));
  CHECK(h.potential == 0.0);

  const auto eta = random_vec(n, 0.02, rng);
  auto h0 = error_energy(zero, eta, zero, cfg);
  LatticeState st{eta, zero, 0.0};
  CHECK(h0.value == doctest::Approx(energy(st, cfg)).epsilon(1e-13));

  for (double alpha : {1.6, 2.0, 2.5}) {
    cfg.alpha = alpha;
    for (int trial = 0; trial < 50; ++trial) {
      const auto e = random_vec(n, 0.02, rng);
      const auto b = random_vec(n, 0.02, rng);
      const auto res = error_energy(xi, e, b, cfg);
      CHECK(res.small);
      CHECK(res.within_bounds);
      const double en = norm2(e);
      CHECK(std::sqrt(res.value - res.kinetic) >= std::sqrt(res.lower / (en * en)) * en);
      CHECK(std::sqrt(res.value - res.kinetic) <= std::sqrt(res.upper / (en * en)) * en);
    }
  }
  const auto big = random_vec(n, 0.5, rng);
  CHECK_THROWS_AS(error_energy(xi, big, rt, cfg), PreconditionError);
  CHECK_FALSE(error_energy(xi, big, rt, cfg, false).small);
}

TEST_CASE("configuration checks") {
  CHECK_THROWS_AS(validate({8, 2.0, 2, 0.05, false}), ArgumentError);
  CHECK_THROWS_AS(validate({64, 2.0, 32, 0.05, false}), ArgumentError);
  CHECK_THROWS_AS(validate({64, 2.0, 0, 0.05, false}), ArgumentError);
  CHECK_THROWS_AS(validate({64, 3.5, 10, 0.05, false}), DomainError);
  CHECK_THROWS_AS(validate({64, 2.0, 10, -0.1, false}), ArgumentError);

  std::vector<double> r(32, 0.0);
  r[3] = -1.2;
  LatticeState s{r, std::vector<double>(32, 0.0), 0.0};
  CHECK_THROWS_AS(verlet_step(s, {32, 2.0, 4, 0.05, false}), CollisionError);
}

TEST_CASE("energy and momentum over long runs") {
  const std::size_t n = 512;
  Lattice lat({n, 2.0, 16, 0.05, true});
  LatticeState s{gaussian_r(n, 0.01, 48.0), std::vector<double>(n, 0.0), 0.0};
  for (std::size_t j = 0; j < n; ++j) s.p[j] = -std::sqrt(6 * specfun::zeta(2.0)) * s.r[j];
  const double e0 = lat.energy(s);
  const double mom0 = std::accumulate(s.p.begin(), s.p.end(), 0.0);
  double worst = 0;
  for (int block = 0; block < 100; ++block) {
    lat.advance(s, 100);
    const double d = std::abs(lat.energy(s) - e0) / e0;
    worst = std::max(worst, d);
    const auto f = lat.force(s.r);
    CHECK(std::abs(std::accumulate(f.begin(), f.end(), 0.0)) < 1e-12);
  }
  CHECK(worst <= 1e-6);
  CHECK(std::abs(std::accumulate(s.p.begin(), s.p.end(), 0.0) - mom0) < 1e-10);
  CHECK(s.t == doctest::Approx(500.0));
}
