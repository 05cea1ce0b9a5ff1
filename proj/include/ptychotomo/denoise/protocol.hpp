#pragma once

// Denoiser wire protocol. All integers and floats little-endian.
//   handshake        "PNPH" | u8 version          reply  "PNPA" | u8 version
//   request          "PNPD" | u8 version | u32 M | u32 H | u32 W | M*H*W f32
//   response         "PNPR" | u8 status | M*H*W f32 when status == 0, nothing otherwise
// Nonzero status: 1 protocol violation, 2 unsupported shape, 3 server failure.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ptychotomo/core/error.hpp"

namespace ptychotomo {

inline constexpr std::uint8_t kProtocolVersion = 1;
inline constexpr std::size_t kRequestHeaderSize = 17;
inline constexpr std::size_t kResponseHeaderSize = 5;

enum class WireStatus : std::uint8_t { ok = 0, protocol = 1, shape = 2, failure = 3 };

class DenoiserError : public Error {
 public:
  enum class Reason { timeout, protocol, shape, non_finite, io };
  DenoiserError(Reason reason, const std::string& what) : Error(ErrorKind::Denoiser, what), reason_(reason) {}
  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

const char* reason_name(DenoiserError::Reason r);

struct WireRequest {
  std::uint32_t m = 0;
  std::uint32_t h = 0;
  std::uint32_t w = 0;
  std::vector<float> values;
};

std::string encode_handshake();
std::string encode_handshake_reply();
/// Throws DenoiserError(protocol) unless bytes is a valid handshake (reply) of our version.
void check_handshake(std::string_view bytes);
void check_handshake_reply(std::string_view bytes);

std::string encode_request(std::uint32_t m, std::uint32_t h, std::uint32_t w, std::span<const float> values);
/// Parses the 17-byte header only; throws DenoiserError(protocol) on bad magic or version.
WireRequest decode_request_header(std::string_view header);
WireRequest decode_request(std::string_view bytes);

std::string encode_response(WireStatus status, std::span<const float> values = {});
/// Parses the 5-byte response header and returns its status; throws on bad magic.
WireStatus decode_response_header(std::string_view header);

void put_floats(std::string& out, std::span<const float> values);
std::vector<float> get_floats(std::string_view bytes);

}  // namespace ptychotomo
