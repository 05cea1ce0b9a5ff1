#include "ptychotomo/denoise/protocol.hpp"

#include <bit>
#include <cstring>

namespace ptychotomo {

static_assert(std::endian::native == std::endian::little, "wire encoding assumes a little-endian host");

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

std::uint32_t get_u32(std::string_view s, std::size_t at) {
  std::uint32_t v = 0;
  std::memcpy(&v, s.data() + at, 4);
  return v;
}

std::string tagged(const char* magic) {
  std::string s(magic, 4);
  s.push_back(static_cast<char>(kProtocolVersion));
  return s;
}

void check_tagged(std::string_view bytes, const char* magic, const char* what) {
  if (bytes.size() != 5 || bytes.substr(0, 4) != std::string_view(magic, 4)) {
    throw DenoiserError(DenoiserError::Reason::protocol, std::string(what) + ": bad magic");
  }
  if (static_cast<std::uint8_t>(bytes[4]) != kProtocolVersion) {
    throw DenoiserError(DenoiserError::Reason::protocol,
                        std::string(what) + ": unsupported version " + std::to_string(static_cast<std::uint8_t>(bytes[4])));
  }
}

}  // namespace

const char* reason_name(DenoiserError::Reason r) {
  switch (r) {
    case DenoiserError::Reason::timeout: return "timeout";
    case DenoiserError::Reason::protocol: return "protocol";
    case DenoiserError::Reason::shape: return "shape";
    case DenoiserError::Reason::non_finite: return "non-finite";
    case DenoiserError::Reason::io: return "io";
  }
  return "unknown";
}

std::string encode_handshake() { return tagged("PNPH"); }
std::string encode_handshake_reply() { return tagged("PNPA"); }
void check_handshake(std::string_view bytes) { check_tagged(bytes, "PNPH", "handshake"); }
void check_handshake_reply(std::string_view bytes) { check_tagged(bytes, "PNPA", "handshake reply"); }

void put_floats(std::string& out, std::span<const float> values) {
  out.append(reinterpret_cast<const char*>(values.data()), values.size() * sizeof(float));
}

std::vector<float> get_floats(std::string_view bytes) {
  std::vector<float> v(bytes.size() / sizeof(float));
  std::memcpy(v.data(), bytes.data(), v.size() * sizeof(float));
  return v;
}

std::string encode_request(std::uint32_t m, std::uint32_t h, std::uint32_t w, std::span<const float> values) {
  if (static_cast<std::size_t>(m) * h * w != values.size()) {
    throw DenoiserError(DenoiserError::Reason::shape, "request: payload size does not match M*H*W");
  }
  std::string out = tagged("PNPD");
  put_u32(out, m);
  put_u32(out, h);
  put_u32(out, w);
  put_floats(out, values);
  return out;
}

WireRequest decode_request_header(std::string_view header) {
  if (header.size() < kRequestHeaderSize) throw DenoiserError(DenoiserError::Reason::protocol, "request: short header");
  check_tagged(header.substr(0, 5), "PNPD", "request");
  return {get_u32(header, 5), get_u32(header, 9), get_u32(header, 13), {}};
}

WireRequest decode_request(std::string_view bytes) {
  WireRequest r = decode_request_header(bytes);
  const std::size_t want = kRequestHeaderSize + static_cast<std::size_t>(r.m) * r.h * r.w * sizeof(float);
  if (bytes.size() != want) {
    throw DenoiserError(DenoiserError::Reason::protocol, "request: payload length " +
                                                              std::to_string(bytes.size() - kRequestHeaderSize) +
                                                              " does not match the header");
  }
  r.values = get_floats(bytes.substr(kRequestHeaderSize));
  return r;
}

std::string encode_response(WireStatus status, std::span<const float> values) {
  std::string out("PNPR", 4);
  out.push_back(static_cast<char>(status));
  if (status == WireStatus::ok) put_floats(out, values);
  return out;
}

WireStatus decode_response_header(std::string_view header) {
  if (header.size() != kResponseHeaderSize || header.substr(0, 4) != "PNPR") {
    throw DenoiserError(DenoiserError::Reason::protocol, "response: bad magic");
  }
  const auto s = static_cast<std::uint8_t>(header[4]);
  if (s > 3) throw DenoiserError(DenoiserError::Reason::protocol, "response: unknown status " + std::to_string(s));
  return static_cast<WireStatus>(s);
}

}  // namespace ptychotomo
