#include <doctest.h>

#include <sys/socket.h>
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <thread>

#include "ptychotomo/core/error.hpp"
#include "ptychotomo/denoise/denoiser.hpp"
#include "support.hpp"

using namespace ptychotomo;
using namespace std::chrono_literals;

namespace {

std::string fixture(const std::string& name) {
  std::ifstream in(std::string(PTYCHO_FIXTURE_DIR) + "/" + name, std::ios::binary);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string fake(const std::string& mode) { return std::string("exec:") + PTYCHO_WIRE_FAKE + " " + mode; }

const std::vector<float> kFixtureValues = {0.0f, 0.25f, -1.5f, 1e-3f, 3.0f, 0.5f};

SliceBatch random_batch(std::uint64_t seed) {
  SliceBatch b;
  b.data = testutil::random_array<double, 3>({3, 5, 7}, seed);
  // values exactly representable as f32, so the round trip is bit-exact
  for (auto& v : b.data) v = static_cast<float>(v);
  return b;
}

DenoiserError::Reason reason_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const DenoiserError& e) {
    return e.reason();
  }
  FAIL("no DenoiserError thrown");
  return DenoiserError::Reason::io;
}

// Reference server on one end of a socketpair, serving a single stream.
struct PairServer {
  int fds[2];
  std::thread thread;
  std::unique_ptr<Channel> client;
  explicit PairServer(const std::string& mode) {
    REQUIRE(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) == 0);
    client = std::make_unique<Channel>(fds[0], fds[0]);
    thread = std::thread([fd = fds[1], mode] {
      Channel ch(fd, fd);
      try {
        serve_stream(ch, make_wire_transform(mode));
      } catch (const DenoiserError&) {
      }
    });
  }
  ~PairServer() {
    client.reset();
    thread.join();
  }
};

}  // namespace

TEST_CASE("encoders reproduce the byte fixtures") {
  CHECK(encode_handshake() == fixture("handshake.bin"));
  CHECK(encode_handshake_reply() == fixture("handshake_reply.bin"));
  CHECK(encode_request(1, 2, 3, kFixtureValues) == fixture("request_1x2x3.bin"));
  CHECK(encode_response(WireStatus::ok, kFixtureValues) == fixture("response_ok_1x2x3.bin"));
  CHECK(encode_response(WireStatus::protocol) == fixture("response_status1.bin"));
  CHECK(encode_response(WireStatus::shape) == fixture("response_status2.bin"));
  CHECK(encode_response(WireStatus::failure) == fixture("response_status3.bin"));
}

TEST_CASE("decoders read the byte fixtures") {
  CHECK_NOTHROW(check_handshake(fixture("handshake.bin")));
  CHECK_NOTHROW(check_handshake_reply(fixture("handshake_reply.bin")));
  const auto req = decode_request(fixture("request_1x2x3.bin"));
  CHECK(req.m == 1);
  CHECK(req.h == 2);
  CHECK(req.w == 3);
  CHECK(req.values == kFixtureValues);
  const auto ok = fixture("response_ok_1x2x3.bin");
  CHECK(decode_response_header(ok.substr(0, kResponseHeaderSize)) == WireStatus::ok);
  CHECK(get_floats(ok.substr(kResponseHeaderSize)) == kFixtureValues);
  CHECK(decode_response_header(fixture("response_status2.bin")) == WireStatus::shape);
}

TEST_CASE("decoders reject malformed frames") {
  auto req = fixture("request_1x2x3.bin");
  CHECK(reason_of([&] { decode_request(req.substr(0, req.size() - 1)); }) == DenoiserError::Reason::protocol);
  CHECK(reason_of([&] { decode_request(req + "x"); }) == DenoiserError::Reason::protocol);
  auto bad_version = req;
  bad_version[4] = 2;
  CHECK(reason_of([&] { decode_request(bad_version); }) == DenoiserError::Reason::protocol);
  auto bad_magic = req;
  bad_magic[0] = 'X';
  CHECK(reason_of([&] { decode_request(bad_magic); }) == DenoiserError::Reason::protocol);
  CHECK(reason_of([] { check_handshake("PNPA\x01"); }) == DenoiserError::Reason::protocol);
  CHECK(reason_of([] { check_handshake(std::string("PNPH\x02")); }) == DenoiserError::Reason::protocol);
  CHECK(reason_of([] { decode_response_header("PNPD\x00"); }) == DenoiserError::Reason::protocol);
  CHECK(reason_of([] { encode_request(1, 2, 2, kFixtureValues); }) == DenoiserError::Reason::shape);
}

TEST_CASE("reference server answers the fixture request") {
  PairServer s("echo");
  s.client->write_all(fixture("handshake.bin"), 5s);
  CHECK(s.client->read_exact(5, 5s) == fixture("handshake_reply.bin"));
  s.client->write_all(fixture("request_1x2x3.bin"), 5s);
  const auto want = fixture("response_ok_1x2x3.bin");
  CHECK(s.client->read_exact(want.size(), 5s) == want);
}

TEST_CASE("reference server answers bad magic with status 1") {
  PairServer s("echo");
  s.client->write_all(fixture("handshake.bin"), 5s);
  s.client->read_exact(5, 5s);
  auto req = fixture("request_1x2x3.bin");
  req[1] = 'Q';
  s.client->write_all(req, 5s);
  CHECK(s.client->read_exact(5, 5s) == fixture("response_status1.bin"));
}

TEST_CASE("reference server rejects a bad handshake") {
  PairServer s("echo");
  s.client->write_all("HELLO", 5s);
  CHECK(s.client->read_exact(5, 5s) == fixture("response_status1.bin"));
}

TEST_CASE("echo round trip is bit-exact over a unix socket") {
  const auto path = std::filesystem::temp_directory_path() / ("ptycho_echo_" + std::to_string(::getpid()) + ".sock");
  const std::string endpoint = "unix:" + path.string();
  std::thread server([&] { listen_and_serve(endpoint, make_wire_transform("echo"), 1); });
  std::unique_ptr<ExternalDenoiser> d;
  for (int attempt = 0; attempt < 200 && !d; ++attempt) {
    try {
      d = std::make_unique<ExternalDenoiser>(endpoint, 5s);
    } catch (const DenoiserError&) {
      std::this_thread::sleep_for(10ms);
    }
  }
  REQUIRE(d);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto b = random_batch(seed);
    CHECK(d->round_trip(b).data == b.data);
  }
  d.reset();
  server.join();
  std::filesystem::remove(path);
}

TEST_CASE("echo and offset servers over stdio") {
  const auto b = random_batch(11);
  CHECK(denoise_external(b, fake("echo")).data == b.data);
  const auto shifted = denoise_external(b, fake("offset:1"));
  for (std::size_t i = 0; i < b.data.size(); ++i) {
    CHECK(shifted.data[i] == static_cast<double>(static_cast<float>(b.data[i]) + 1.0f));
  }
  CHECK(denoise_external(b, "exec:" + std::string(PTYCHO_WIRE_FAKE) + " offset:1").data == shifted.data);
}

TEST_CASE("external denoiser normalizes and restores") {
  ExternalDenoiser d(fake("echo"), 5s);
  auto x = testutil::random_array<double, 3>({2, 6, 6}, 4, 3.0);
  const auto y = d.denoise(x);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(y[i] - x[i]) <= 1e-6 * 6.0);
}

TEST_CASE("client errors are distinct") {
  const auto b = random_batch(12);
  using R = DenoiserError::Reason;
  CHECK(reason_of([&] { denoise_external(b, fake("short"), 5s); }) == R::protocol);
  CHECK(reason_of([&] { denoise_external(b, fake("long"), 5s); }) == R::protocol);
  CHECK(reason_of([&] { denoise_external(b, fake("nan"), 5s); }) == R::non_finite);
  CHECK(reason_of([&] { denoise_external(b, fake("status:2"), 5s); }) == R::shape);
  CHECK(reason_of([&] { denoise_external(b, fake("status:3"), 5s); }) == R::protocol);
  CHECK(reason_of([&] { denoise_external(b, fake("bad_reply"), 5s); }) == R::protocol);
  CHECK(reason_of([&] { denoise_external(b, fake("silent"), 300ms); }) == R::timeout);
  CHECK(reason_of([] { ExternalDenoiser("unix:/nonexistent/ptycho.sock"); }) == R::io);
  CHECK(reason_of([] { ExternalDenoiser("carrier-pigeon"); }) == R::io);
}

TEST_CASE("external denoiser reconnects after a failure") {
  // status:3 fails every request, yet the connection is re-established each time
  ExternalDenoiser d(fake("status:3"), 5s);
  const auto b = random_batch(13);
  CHECK_THROWS_AS(d.round_trip(b), DenoiserError);
  CHECK_THROWS_AS(d.round_trip(b), DenoiserError);
}
