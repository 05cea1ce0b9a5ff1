// Stdio denoiser server used by the protocol tests. Modes:
//   echo, offset:<v>     well-behaved reference server
//   short, long          payload one float short / one float too long
//   nan                  first value replaced by NaN
//   status:<s>           answers every request with status s and no payload
//   bad_reply            wrong handshake reply magic
//   silent               completes the handshake, then never answers
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <thread>

#include "ptychotomo/denoise/denoiser.hpp"

using namespace ptychotomo;

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "echo";
  Channel ch(0, 1, -1, false);
  try {
    if (mode == "echo" || mode.rfind("offset:", 0) == 0) {
      serve_stream(ch, make_wire_transform(mode));
      return 0;
    }
    check_handshake(ch.read_exact(5, Channel::kForever));
    if (mode == "bad_reply") {
      ch.write_all("PNPX\x01", Channel::kForever);
      return 0;
    }
    ch.write_all(encode_handshake_reply(), Channel::kForever);
    for (;;) {
      const std::string header = ch.read_or_eof(kRequestHeaderSize, Channel::kForever);
      if (header.empty()) return 0;
      WireRequest req = decode_request_header(header);
      req.values = get_floats(ch.read_exact(std::size_t{req.m} * req.h * req.w * sizeof(float), Channel::kForever));
      if (mode == "silent") {
        std::this_thread::sleep_for(std::chrono::seconds(30));
        return 0;
      }
      if (mode.rfind("status:", 0) == 0) {
        ch.write_all(encode_response(static_cast<WireStatus>(std::stoi(mode.substr(7)))), Channel::kForever);
        continue;
      }
      if (mode == "short") req.values.pop_back();
      if (mode == "long") req.values.push_back(0.0f);
      if (mode == "nan") req.values[0] = std::nanf("");
      ch.write_all(encode_response(WireStatus::ok, req.values), Channel::kForever);
      // a short reply leaves the client waiting; closing the stream turns that into EOF
      if (mode == "short") return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "wire_fake: %s\n", e.what());
    return 1;
  }
}
