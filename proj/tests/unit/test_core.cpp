#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <numbers>

#include "ptychotomo/core/container.hpp"
#include "ptychotomo/core/error.hpp"
#include "ptychotomo/core/parallel.hpp"
#include "ptychotomo/core/types.hpp"
#include "support.hpp"

using namespace ptychotomo;
using testutil::random_array;

TEST_CASE("split_complex zero and constant volumes") {
  ObjectVolume zero(2, 3);
  auto s = split_complex(zero);
  for (double v : s.delta) CHECK(v == 0.0);
  for (double v : s.beta) CHECK(v == 0.0);

  ObjectVolume c(Array3c({2, 3, 3}, Complex(1.0, 2.0)));
  s = split_complex(c);
  for (double v : s.delta) CHECK(v == 1.0);
  for (double v : s.beta) CHECK(v == 2.0);
}

TEST_CASE("split_complex round trip is bit exact") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ObjectVolume x(random_array<Complex, 3>({3, 5, 5}, seed));
    const auto s = split_complex(x);
    CHECK(combine_complex(s.delta, s.beta) == x.data);
    for (std::size_t i = 0; i < x.data.size(); ++i) {
      CHECK(Complex(s.delta[i], s.beta[i]) == x.data[i]);
    }
  }
}

TEST_CASE("object volume validation") {
  CHECK_NOTHROW(ObjectVolume(1, 2).validate());
  CHECK_THROWS_AS(ObjectVolume(Array3c({1, 1, 1})).validate(), DataError);
  CHECK_THROWS_AS(ObjectVolume(Array3c({2, 3, 4})).validate(), DataError);
  ObjectVolume bad(2, 4);
  bad.data[3] = Complex(std::nan(""), 0.0);
  CHECK_THROWS_AS(bad.validate(), DataError);
}

namespace {
ExperimentGeometry valid_geometry() {
  ExperimentGeometry g;
  g.nz = 8;
  g.n = 16;
  g.angles = {0.0, 1.0};
  g.probe = Array2c({4, 4}, Complex(1.0, 0.0));
  g.detector_size = 8;
  g.scan_positions.assign(2, {{0, 0}, {4, 12}});
  return g;
}
}  // namespace

TEST_CASE("geometry validation") {
  CHECK_NOTHROW(valid_geometry().validate());

  auto g = valid_geometry();
  g.scan_positions[1][1] = {5, 12};  // window rows 5..8 exit an 8-row slab
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g = valid_geometry();
  g.scan_positions[0][0] = {0, 13};
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g = valid_geometry();
  g.scan_positions[0][0] = {-1, 0};
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g = valid_geometry();
  g.angles = {1.0, 1.0};
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g = valid_geometry();
  g.angles = {0.0, std::numbers::pi};
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g = valid_geometry();
  g.detector_size = 2;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g = valid_geometry();
  g.detector_size = 9;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g = valid_geometry();
  g.scan_positions[1].pop_back();
  CHECK_THROWS_AS(g.validate(), ConfigError);
}

TEST_CASE("wavenumber convention") {
  auto g = valid_geometry();
  g.voxel_size_nm = 5.0;
  g.wavelength_nm = 125.0;
  CHECK(g.wavenumber() == doctest::Approx(2.0 * std::numbers::pi * 5.0 / 125.0));
  CHECK(g.wavelength_voxels() == doctest::Approx(25.0));
  CHECK(2.0 * std::numbers::pi / g.wavelength_voxels() == doctest::Approx(g.wavenumber()));
}

TEST_CASE("recon config validation") {
  ReconConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.implied_noise_variance() == doctest::Approx(0.25));
  c.rho = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.tau = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.varphi = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.inner_cg_iters = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("diffraction data validation") {
  DiffractionData d{Array4d({1, 1, 2, 2}, 3.0), 1.0};
  CHECK_NOTHROW(d.validate());
  d.counts[0] = -1.0;
  CHECK_THROWS_AS(d.validate(), DataError);
}

TEST_CASE("container encodes the documented layout") {
  const std::array<std::size_t, 2> shape{1, 2};
  const std::vector<double> vals{1.5, -2.0};
  const std::string bytes = encode_container(shape, vals, Dtype::f32);
  REQUIRE(bytes.size() > 8);
  CHECK(bytes.substr(0, 4) == "PTVF");
  std::uint32_t len = 0;
  std::memcpy(&len, bytes.data() + 4, 4);
  const std::string header = bytes.substr(8, len);
  CHECK(header == R"({"shape":[1,2],"dtype":"f32","order":"row-major"})");
  REQUIRE(bytes.size() == 8 + len + 8);
  float f[2];
  std::memcpy(f, bytes.data() + 8 + len, 8);
  CHECK(f[0] == 1.5f);
  CHECK(f[1] == -2.0f);
}

TEST_CASE("container round trips every dtype") {
  const auto dir = std::filesystem::temp_directory_path() / "ptycho_core_container";
  std::filesystem::create_directories(dir);
  const auto c = random_array<Complex, 3>({2, 3, 4}, 7);
  save_array(dir / "c128.ptvf", c, Dtype::c128);
  CHECK(load_complex<3>(dir / "c128.ptvf") == c);
  save_array(dir / "c64.ptvf", c, Dtype::c64);
  const auto c64 = load_complex<3>(dir / "c64.ptvf");
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(c64[i].real() == static_cast<double>(static_cast<float>(c[i].real())));
    CHECK(c64[i].imag() == static_cast<double>(static_cast<float>(c[i].imag())));
  }
  const auto r = random_array<double, 2>({5, 2}, 8);
  save_array(dir / "f64.ptvf", r, Dtype::f64);
  CHECK(load_real<2>(dir / "f64.ptvf") == r);
  CHECK_THROWS_AS(load_real<2>(dir / "c128.ptvf"), DataError);
  CHECK_THROWS_AS(load_complex<2>(dir / "c128.ptvf"), DataError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("container rejects corrupt input") {
  CHECK_THROWS_AS(decode_container("nope"), DataError);
  const std::array<std::size_t, 1> shape{4};
  std::string bytes = encode_container(shape, std::vector<double>{1, 2, 3, 4}, Dtype::f64);
  CHECK_THROWS_AS(decode_container(bytes.substr(0, bytes.size() - 1)), DataError);
  bytes[0] = 'X';
  CHECK_THROWS_AS(decode_container(bytes), DataError);
}

TEST_CASE("parallel_for covers every index once and rethrows") {
  std::vector<std::atomic<int>> hits(97);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                    if (i == 7) throw DataError("boom");
                  }),
                  DataError);
}
