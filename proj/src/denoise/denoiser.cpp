#include "ptychotomo/denoise/denoiser.hpp"

#include <sys/socket.h>
#include <unistd.h>

#include <charconv>
#include <cmath>
#include <sstream>
#include <vector>

#include "ptychotomo/core/error.hpp"
#include "ptychotomo/denoise/filters.hpp"

namespace ptychotomo {

Array3d NormalizedDenoiser::denoise(const Array3d& slices) {
  SliceBatch b = SliceBatch::normalize(slices);
  b.data = filter_(b.data);
  return b.restore();
}

// External client ----------------------------------------------------------------------------

ExternalDenoiser::ExternalDenoiser(std::string endpoint, Channel::Timeout timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {
  open();
}

void ExternalDenoiser::open() {
  channel_.reset();
  auto ch = Channel::connect(endpoint_);
  ch->write_all(encode_handshake(), timeout_);
  check_handshake_reply(ch->read_exact(5, timeout_));
  channel_ = std::move(ch);
}

SliceBatch ExternalDenoiser::round_trip(const SliceBatch& batch) {
  if (!channel_) open();
  try {
    const Array3d& v = batch.data;
    std::vector<float> values(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) values[i] = static_cast<float>(v[i]);
    const auto m = static_cast<std::uint32_t>(v.extent(0));
    const auto h = static_cast<std::uint32_t>(v.extent(1));
    const auto w = static_cast<std::uint32_t>(v.extent(2));
    channel_->write_all(encode_request(m, h, w, values), timeout_);

    const WireStatus status = decode_response_header(channel_->read_exact(kResponseHeaderSize, timeout_));
    if (status == WireStatus::shape) {
      throw DenoiserError(DenoiserError::Reason::shape, "server rejected shape " + shape_string(v.shape()));
    }
    if (status != WireStatus::ok) {
      throw DenoiserError(DenoiserError::Reason::protocol,
                          "server answered status " + std::to_string(static_cast<int>(status)));
    }
    const auto reply = get_floats(channel_->read_exact(values.size() * sizeof(float), timeout_));
    if (channel_->readable_now()) throw DenoiserError(DenoiserError::Reason::protocol, "response longer than expected");

    SliceBatch out{Array3d(v.shape()), batch.lo, batch.hi, batch.normalized};
    for (std::size_t i = 0; i < reply.size(); ++i) {
      if (!std::isfinite(reply[i])) throw DenoiserError(DenoiserError::Reason::non_finite, "response has non-finite values");
      out.data[i] = reply[i];
    }
    return out;
  } catch (const DenoiserError&) {
    channel_.reset();
    throw;
  }
}

Array3d ExternalDenoiser::denoise(const Array3d& slices) {
  return round_trip(SliceBatch::normalize(slices)).restore();
}

SliceBatch denoise_external(const SliceBatch& batch, const std::string& endpoint, Channel::Timeout timeout) {
  ExternalDenoiser d(endpoint, timeout);
  return d.round_trip(batch);
}

// Factory ------------------------------------------------------------------------------------

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) out.push_back(item);
  return out;
}

template <typename T>
T number(const std::string& text, const std::string& selector) {
  T v{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("denoiser '" + selector + "': bad number '" + text + "'");
  return v;
}

}  // namespace

std::unique_ptr<Denoiser> make_denoiser(const std::string& selector) {
  if (selector.rfind("external:", 0) == 0) return std::make_unique<ExternalDenoiser>(selector.substr(9));
  const auto parts = split(selector, ':');
  if (parts.empty()) throw ConfigError("denoiser: empty selector");
  const std::string& kind = parts[0];
  auto arg = [&](std::size_t i) -> const std::string* { return i < parts.size() ? &parts[i] : nullptr; };

  if (kind == "identity" && parts.size() == 1) return std::make_unique<IdentityDenoiser>();
  if (kind == "gaussian" && parts.size() <= 2) {
    const double sigma = arg(1) ? number<double>(*arg(1), selector) : 1.0;
    if (!(sigma > 0.0)) throw ConfigError("denoiser '" + selector + "': sigma must be > 0");
    return std::make_unique<NormalizedDenoiser>(selector, [sigma](const Array3d& v) { return denoise_gaussian(v, sigma); });
  }
  if (kind == "median" && parts.size() <= 2) {
    const int width = arg(1) ? number<int>(*arg(1), selector) : 3;
    if (width < 1 || width % 2 == 0) throw ConfigError("denoiser '" + selector + "': width must be odd");
    return std::make_unique<NormalizedDenoiser>(selector, [width](const Array3d& v) { return denoise_median(v, width); });
  }
  if (kind == "tv" && parts.size() <= 3) {
    const double weight = arg(1) ? number<double>(*arg(1), selector) : 0.1;
    const int iters = arg(2) ? number<int>(*arg(2), selector) : 100;
    if (!(weight > 0.0) || iters < 1) throw ConfigError("denoiser '" + selector + "': need weight > 0 and iters >= 1");
    return std::make_unique<NormalizedDenoiser>(selector,
                                                [weight, iters](const Array3d& v) { return denoise_tv(v, weight, iters); });
  }
  throw ConfigError("denoiser: unknown selector '" + selector + "'");
}

Array3d apply_pnp(const Array3d& x_tilde, Denoiser& denoiser, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("apply_pnp: alpha must be in [0, 1]");
  if (alpha == 0.0) return x_tilde;
  Array3d d = denoiser.denoise(x_tilde);
  if (d.shape() != x_tilde.shape()) {
    throw DenoiserError(DenoiserError::Reason::shape, "denoiser '" + denoiser.name() + "' changed the batch shape");
  }
  if (alpha == 1.0) return d;
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = x_tilde[i] + alpha * (d[i] - x_tilde[i]);
  return d;
}

// Reference server ---------------------------------------------------------------------------

WireTransform make_wire_transform(const std::string& mode) {
  if (mode == "echo") return [](WireRequest&) {};
  if (mode.rfind("offset:", 0) == 0) {
    const auto v = number<float>(mode.substr(7), mode);
    return [v](WireRequest& r) {
      for (float& x : r.values) x += v;
    };
  }
  throw ConfigError("denoise server: unknown mode '" + mode + "' (echo | offset:<v>)");
}

std::size_t serve_stream(Channel& channel, const WireTransform& transform) {
  const std::string hello = channel.read_or_eof(5, Channel::kForever);
  if (hello.empty()) return 0;
  try {
    check_handshake(hello);
  } catch (const DenoiserError&) {
    channel.write_all(encode_response(WireStatus::protocol), Channel::kForever);
    return 0;
  }
  channel.write_all(encode_handshake_reply(), Channel::kForever);

  std::size_t served = 0;
  for (;;) {
    const std::string header = channel.read_or_eof(kRequestHeaderSize, Channel::kForever);
    if (header.empty()) return served;
    WireRequest req;
    try {
      req = decode_request_header(header);
    } catch (const DenoiserError&) {
      channel.write_all(encode_response(WireStatus::protocol), Channel::kForever);
      return served;
    }
    const std::size_t count = static_cast<std::size_t>(req.m) * req.h * req.w;
    req.values = get_floats(channel.read_exact(count * sizeof(float), Channel::kForever));
    std::string reply;
    try {
      transform(req);
      reply = req.values.size() == count ? encode_response(WireStatus::ok, req.values)
                                         : encode_response(WireStatus::shape);
    } catch (const std::exception&) {
      reply = encode_response(WireStatus::failure);
    }
    channel.write_all(reply, Channel::kForever);
    ++served;
  }
}

void listen_and_serve(const std::string& endpoint, const WireTransform& transform, std::size_t max_connections) {
  const int fd = listen_on(endpoint);
  for (std::size_t n = 0; max_connections == 0 || n < max_connections; ++n) {
    const int conn = ::accept(fd, nullptr, nullptr);
    if (conn < 0) continue;
    Channel ch(conn, conn);
    try {
      serve_stream(ch, transform);
    } catch (const DenoiserError&) {
      // client went away mid-request; keep serving
    }
  }
  ::close(fd);
}

}  // namespace ptychotomo
