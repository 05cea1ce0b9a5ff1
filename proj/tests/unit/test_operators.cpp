#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ptychotomo/core/vector_ops.hpp"
#include "ptychotomo/operators/fft.hpp"
#include "ptychotomo/operators/linearization.hpp"
#include "ptychotomo/operators/ptycho.hpp"
#include "ptychotomo/operators/radon.hpp"
#include "support.hpp"

using namespace ptychotomo;
using testutil::random_array;
using testutil::rel_err;

namespace {

std::vector<double> even_angles(std::size_t n) {
  std::vector<double> a(n);
  for (std::size_t k = 0; k < n; ++k) a[k] = static_cast<double>(k) * std::numbers::pi / static_cast<double>(n);
  return a;
}

// Rotate-and-sum: resample each slice on the rotated grid with an independent bilinear
// sampler (zero outside), then sum every rotated column.
double bilinear(const Array3d& x, std::size_t z, double row, double col) {
  const long n = static_cast<long>(x.extent(1));
  const long r0 = static_cast<long>(std::floor(row)), c0 = static_cast<long>(std::floor(col));
  double acc = 0.0;
  for (long dr = 0; dr <= 1; ++dr) {
    for (long dc = 0; dc <= 1; ++dc) {
      const long r = r0 + dr, c = c0 + dc;
      if (r < 0 || c < 0 || r >= n || c >= n) continue;
      const double w = (1.0 - std::abs(row - static_cast<double>(r))) * (1.0 - std::abs(col - static_cast<double>(c)));
      acc += w * x(z, r, c);
    }
  }
  return acc;
}

Array3d rotate_and_sum(const Array3d& x, const std::vector<double>& angles) {
  const std::size_t nz = x.extent(0), n = x.extent(1);
  const double c = 0.5 * static_cast<double>(n - 1);
  Array3d p({angles.size(), nz, n});
  for (std::size_t a = 0; a < angles.size(); ++a) {
    const double ct = std::cos(angles[a]), st = std::sin(angles[a]);
    for (std::size_t z = 0; z < nz; ++z) {
      for (std::size_t u = 0; u < n; ++u) {
        double sum = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
          // the rotated image's pixel (t, u) sits at this point of the original slice
          const double du = static_cast<double>(u) - c, dt = static_cast<double>(t) - c;
          sum += bilinear(x, z, c + du * st + dt * ct, c + du * ct - dt * st);
        }
        p(a, z, u) = sum;
      }
    }
  }
  return p;
}

}  // namespace

TEST_CASE("radon of zero is zero") {
  RadonPlan plan(2, 8, even_angles(4));
  const auto p = radon_forward(Array3d({2, 8, 8}), plan);
  for (double v : p) CHECK(v == 0.0);
  const auto b = radon_adjoint(Array3d({4, 2, 8}), plan);
  for (double v : b) CHECK(v == 0.0);
}

TEST_CASE("radon at theta 0 sums columns") {
  const std::size_t n = 16;
  RadonPlan plan(1, n, {0.0});
  Array3d x({1, n, n});
  for (std::size_t r = 0; r < n; ++r) x(0, r, 5) = 1.0;
  const auto p = radon_forward(x, plan);
  for (std::size_t u = 0; u < n; ++u) CHECK(p(0, 0, u) == doctest::Approx(u == 5 ? static_cast<double>(n) : 0.0));
}

TEST_CASE("radon matches the rotate-and-sum oracle for a single voxel") {
  const std::size_t n = 16;
  const auto angles = even_angles(8);
  RadonPlan plan(1, n, angles);
  Array3d x({1, n, n});
  x(0, 6, 9) = 1.0;
  const auto p = radon_forward(x, plan);
  const auto ref = rotate_and_sum(x, angles);
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) worst = std::max(worst, std::abs(p[i] - ref[i]));
  CHECK(worst < 1e-4);
}

TEST_CASE("radon matches the rotate-and-sum oracle on a random volume") {
  const auto angles = even_angles(5);
  RadonPlan plan(2, 12, angles);
  const auto x = random_array<double, 3>({2, 12, 12}, 3);
  const auto p = radon_forward(x, plan);
  const auto ref = rotate_and_sum(x, angles);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == doctest::Approx(ref[i]).epsilon(1e-10));
}

TEST_CASE("radon adjoint is the transpose of the explicit matrix") {
  const std::size_t n = 8;
  RadonPlan plan(1, n, {0.0, 0.7, 2.0});
  const std::size_t cols = n * n, rows = 3 * n;
  std::vector<double> a(rows * cols);
  for (std::size_t j = 0; j < cols; ++j) {
    Array3d e({1, n, n});
    e[j] = 1.0;
    const auto p = radon_forward(e, plan);
    for (std::size_t i = 0; i < rows; ++i) a[i * cols + j] = p[i];
  }
  for (std::size_t i = 0; i < rows; ++i) {
    Array3d e({3, 1, n});
    e[i] = 1.0;
    const auto b = radon_adjoint(e, plan);
    for (std::size_t j = 0; j < cols; ++j) CHECK(b[j] == a[i * cols + j]);
  }
}

TEST_CASE("radon adjoint of ones at theta 0 is one everywhere") {
  const std::size_t n = 8;
  RadonPlan plan(1, n, {0.0});
  const auto b = radon_adjoint(Array3d({1, 1, n}, 1.0), plan);
  for (double v : b) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("radon dot-product identity, real and complex") {
  RadonPlan plan(3, 16, even_angles(8));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto x = random_array<double, 3>({3, 16, 16}, seed);
    const auto p = random_array<double, 3>({8, 3, 16}, seed + 100);
    const double lhs = real_dot(radon_forward(x, plan).flat(), p.flat());
    const double rhs = real_dot(x.flat(), radon_adjoint(p, plan).flat());
    CHECK(rel_err(lhs, rhs) < 1e-6);

    const auto xc = random_array<Complex, 3>({3, 16, 16}, seed + 200);
    const auto pc = random_array<Complex, 3>({8, 3, 16}, seed + 300);
    const Complex l = hermitian_dot(radon_forward(xc, plan).flat(), pc.flat());
    const Complex r = hermitian_dot(xc.flat(), radon_adjoint(pc, plan).flat());
    CHECK(std::abs(l - r) / std::abs(l) < 1e-6);
  }
}

TEST_CASE("radon linearity") {
  RadonPlan plan(2, 10, even_angles(6));
  const auto u = random_array<double, 3>({2, 10, 10}, 1);
  const auto v = random_array<double, 3>({2, 10, 10}, 2);
  Array3d w(u.shape());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 2.5 * u[i] - 0.75 * v[i];
  const auto pu = radon_forward(u, plan), pv = radon_forward(v, plan), pw = radon_forward(w, plan);
  for (std::size_t i = 0; i < pw.size(); ++i) {
    CHECK(std::abs(pw[i] - (2.5 * pu[i] - 0.75 * pv[i])) <= 1e-10 * (1.0 + std::abs(pw[i])));
  }
}

TEST_CASE("radon rejects mismatched shapes") {
  RadonPlan plan(2, 8, {0.0});
  CHECK_THROWS(radon_forward(Array3d({2, 8, 7}), plan));
  CHECK_THROWS(radon_adjoint(Array3d({2, 2, 8}), plan));
}

TEST_CASE("transmission identities") {
  const std::size_t n = 12;
  const double c = 0.3;
  RadonPlan plan(2, n, even_angles(5));
  const auto t0 = transmission(Array3c({2, n, n}), plan, c);
  for (const auto& v : t0) CHECK(v == Complex(1.0, 0.0));

  // constant real row at theta = 0: every ray crosses N voxels of value v
  RadonPlan flat(1, n, {0.0});
  const double v = 0.05;
  const auto t1 = transmission(Array3c({1, n, n}, Complex(v, 0.0)), flat, c);
  for (const auto& w : t1) {
    CHECK(w.real() == doctest::Approx(std::cos(c * v * n)));
    CHECK(w.imag() == doctest::Approx(std::sin(c * v * n)));
  }

  auto x = random_array<Complex, 3>({2, n, n}, 9, 0.01);
  for (auto& e : x) e = Complex(e.real(), std::abs(e.imag()));
  const auto psi = transmission(x, plan, c);
  Array3d beta(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) beta[i] = x[i].imag();
  const auto rb = radon_forward(beta, plan);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    CHECK(std::abs(std::abs(psi[i]) - std::exp(-c * rb[i])) < 1e-10);
    CHECK(std::abs(psi[i]) <= 1.0 + 1e-15);
  }
}

TEST_CASE("centered fft is unitary and centered") {
  CenteredFft2 fft(8);
  std::vector<Complex> a(64, Complex(1.0, 0.0));
  fft.forward(a);
  // constant input: all energy at the centre bin (4, 4), value 8
  for (std::size_t i = 0; i < 64; ++i) CHECK(std::abs(a[i] - Complex(i == 4 * 8 + 4 ? 8.0 : 0.0, 0.0)) < 1e-12);
  auto r = random_array<Complex, 2>({8, 8}, 4);
  std::vector<Complex> b(r.begin(), r.end());
  fft.forward(b);
  CHECK(rel_err(norm_sq(b), norm_sq(r.flat())) < 1e-12);
  fft.inverse(b);
  for (std::size_t i = 0; i < 64; ++i) CHECK(std::abs(b[i] - r[i]) < 1e-12);
}

TEST_CASE("ptycho forward of constant object is the padded probe spectrum") {
  auto g = testutil::small_geometry(8, 16, 4, 8, {0.0, 1.0}, 4, 5);
  PtychoOperator op(g);
  const auto y = op.forward(Array3c({2, 8, 16}, Complex(1.0, 0.0)));
  std::vector<Complex> ref(64);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) ref[(2 + i) * 8 + 2 + j] = g.probe(i, j);
  }
  CenteredFft2(8).forward(ref);
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t s = 0; s < g.scans_per_angle(); ++s) {
      for (std::size_t k = 0; k < 64; ++k) CHECK(std::abs(y(a, s, k / 8, k % 8) - ref[k]) < 1e-12);
    }
  }
  const auto zero = op.forward(Array3c({2, 8, 16}));
  for (const auto& v : zero) CHECK(v == Complex{});
}

TEST_CASE("ptycho forward satisfies Parseval per position") {
  auto g = testutil::small_geometry(12, 12, 6, 16, {0.0}, 3, 6);
  PtychoOperator op(g);
  const auto psi = random_array<Complex, 3>({1, 12, 12}, 11);
  const auto y = op.forward(psi);
  for (std::size_t s = 0; s < g.scans_per_angle(); ++s) {
    const auto [r0, c0] = g.scan_positions[0][s];
    double direct = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) direct += std::norm(g.probe(i, j) * psi(0, r0 + i, c0 + j));
    }
    double far = 0.0;
    for (std::size_t k = 0; k < 256; ++k) far += std::norm(y(0, s, k / 16, k % 16));
    CHECK(rel_err(far, direct) < 1e-10);
  }
}

TEST_CASE("ptycho adjoint dot-product identity") {
  auto g = testutil::small_geometry(16, 16, 8, 16, {0.0, 0.5, 1.5}, 4, 7);
  PtychoOperator op(g);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto psi = random_array<Complex, 3>({3, 16, 16}, seed);
    const auto y = random_array<Complex, 4>({3, g.scans_per_angle(), 16, 16}, seed + 50);
    const Complex l = hermitian_dot(op.forward(psi).flat(), y.flat());
    const Complex r = hermitian_dot(psi.flat(), op.adjoint(y).flat());
    CHECK(std::abs(l - r) / std::abs(l) < 1e-10);
  }
}

TEST_CASE("ptycho adjoint recovers an indicator patch") {
  ExperimentGeometry g;
  g.nz = 6;
  g.n = 6;
  g.angles = {0.0};
  g.probe = Array2c({4, 4}, Complex(1.0, 0.0));
  g.detector_size = 8;
  g.scan_positions = {{{1, 2}}};
  PtychoOperator op(g);
  // y = F(pad(indicator of patch pixel (1, 2)))
  std::vector<Complex> frame(64);
  frame[(2 + 1) * 8 + 2 + 2] = 1.0;
  CenteredFft2(8).forward(frame);
  Array4c y({1, 1, 8, 8}, std::vector<Complex>(frame.begin(), frame.end()));
  const auto back = op.adjoint(y);
  for (std::size_t r = 0; r < 6; ++r) {
    for (std::size_t c = 0; c < 6; ++c) {
      const double want = (r == 2 && c == 4) ? 1.0 : 0.0;
      CHECK(std::abs(back(0, r, c) - want) < 1e-12);
    }
  }
}

TEST_CASE("ptycho forward is translation consistent") {
  auto g = testutil::small_geometry(8, 12, 4, 8, {0.0}, 4, 8);
  const auto psi = random_array<Complex, 3>({1, 8, 12}, 12);
  const auto y = PtychoOperator(g).forward(psi);
  // shift object and positions by (2, 3) inside a larger slab
  auto g2 = g;
  g2.nz = 10;
  g2.n = 15;
  for (auto& p : g2.scan_positions[0]) p = {p.row + 2, p.col + 3};
  Array3c psi2({1, 10, 15});
  for (std::size_t r = 0; r < 8; ++r) {
    for (std::size_t c = 0; c < 12; ++c) psi2(0, r + 2, c + 3) = psi(0, r, c);
  }
  const auto y2 = PtychoOperator(g2).forward(psi2);
  CHECK(y2 == y);
}

TEST_CASE("ptycho operator linearity") {
  auto g = testutil::small_geometry(8, 8, 4, 8, {0.0, 1.0}, 2, 9);
  PtychoOperator op(g);
  const auto u = random_array<Complex, 3>({2, 8, 8}, 1), v = random_array<Complex, 3>({2, 8, 8}, 2);
  const Complex a(0.3, -1.2), b(2.0, 0.5);
  Array3c w(u.shape());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = a * u[i] + b * v[i];
  const auto gu = op.forward(u), gv = op.forward(v), gw = op.forward(w);
  for (std::size_t i = 0; i < gw.size(); ++i) CHECK(std::abs(gw[i] - (a * gu[i] + b * gv[i])) < 1e-10 * (1.0 + std::abs(gw[i])));
}

TEST_CASE("ptycho operator rejects bad shapes") {
  auto g = testutil::small_geometry(8, 8, 4, 8, {0.0}, 4, 9);
  PtychoOperator op(g);
  CHECK_THROWS(op.forward(Array3c({1, 8, 7})));
  CHECK_THROWS(op.adjoint(Array4c({1, 3, 8, 8})));
  g.scan_positions[0][0] = {5, 0};
  CHECK_THROWS(PtychoOperator{g});
}

TEST_CASE("k operator examples and adjoint") {
  const Array3c zero({2, 3, 4});
  const auto ones = Array3c({2, 3, 4}, Complex(1.0, 0.0));
  for (const auto& v : k_operator(zero, ones, 2.0 * std::numbers::pi)) CHECK(v == Complex{});
  const auto r = random_array<Complex, 3>({2, 3, 4}, 1);
  Array3c rr(r.shape());
  for (std::size_t i = 0; i < r.size(); ++i) rr[i] = r[i].real();
  const auto kr = k_operator(rr, ones, 2.0 * std::numbers::pi);
  for (std::size_t i = 0; i < kr.size(); ++i) CHECK(std::abs(kr[i] - Complex(0.0, rr[i].real())) < 1e-15);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto u = random_array<Complex, 3>({2, 3, 4}, seed);
    const auto y = random_array<Complex, 3>({2, 3, 4}, seed + 20);
    const auto w = random_array<Complex, 3>({2, 3, 4}, seed + 40);
    const Complex l = hermitian_dot(k_operator(u, w, 17.0).flat(), y.flat());
    const Complex rhs = hermitian_dot(u.flat(), k_operator_adjoint(y, w, 17.0).flat());
    CHECK(std::abs(l - rhs) / std::abs(l) < 1e-12);
  }
  CHECK_THROWS(k_operator(Array3c({1, 2, 3}), Array3c({1, 2, 2}), 1.0));
}

TEST_CASE("zeta term principal branch") {
  Array3c w({1, 1, 4});
  w[0] = 1.0;
  w[1] = std::numbers::e;
  w[2] = Complex(0.0, 1.0);
  w[3] = Complex(1e-13, 0.0);
  std::size_t floored = 0;
  const auto z = zeta_term(w, &floored);
  CHECK(std::abs(z[0]) < 1e-15);
  CHECK(std::abs(z[1] - std::numbers::e) < 1e-14);
  CHECK(std::abs(z[2] - Complex(-std::numbers::pi / 2.0, 0.0)) < 1e-14);
  CHECK(z[3] == Complex{});
  CHECK(floored == 1);
}

TEST_CASE("disk support examples") {
  const auto s4 = disk_support(4, 1.0);
  const std::vector<double> want4{0, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0};
  CHECK(s4 == want4);
  const auto s8 = disk_support(8, 3.0);
  REQUIRE(s8.size() == 64);
  for (std::size_t r = 0; r < 8; ++r) {
    for (std::size_t c = 0; c < 8; ++c) {
      CHECK(s8[r * 8 + c] == s8[c * 8 + r]);
      CHECK(s8[r * 8 + c] == s8[(7 - r) * 8 + c]);
    }
  }
  CHECK(s8[0] == 0.0);
  CHECK(s8[3 * 8 + 0] == 0.0);  // 3.5 from the centre column
  CHECK(s8[3 * 8 + 1] == 1.0);
}
