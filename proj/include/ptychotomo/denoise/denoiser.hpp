#pragma once

#include <functional>
#include <memory>
#include <string>

#include "ptychotomo/core/array.hpp"
#include "ptychotomo/denoise/channel.hpp"
#include "ptychotomo/denoise/protocol.hpp"
#include "ptychotomo/denoise/slice_batch.hpp"

namespace ptychotomo {

/// Denoises a batch of real slices (M, N, N) and returns the same shape.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual std::string name() const = 0;
  virtual Array3d denoise(const Array3d& slices) = 0;
};

class IdentityDenoiser final : public Denoiser {
 public:
  std::string name() const override { return "identity"; }
  Array3d denoise(const Array3d& slices) override { return slices; }
};

/// Runs a filter on the batch mapped to [0, 1], then maps back.
class NormalizedDenoiser final : public Denoiser {
 public:
  using Filter = std::function<Array3d(const Array3d&)>;
  NormalizedDenoiser(std::string name, Filter filter) : name_(std::move(name)), filter_(std::move(filter)) {}
  std::string name() const override { return name_; }
  Array3d denoise(const Array3d& slices) override;

 private:
  std::string name_;
  Filter filter_;
};

/// Client for an out-of-process denoiser. The constructor connects and completes the handshake,
/// so an unreachable endpoint fails immediately. Slices are sent normalized to [0, 1].
/// After a failed call the connection is dropped and re-opened on the next call.
class ExternalDenoiser final : public Denoiser {
 public:
  explicit ExternalDenoiser(std::string endpoint, Channel::Timeout timeout = std::chrono::seconds(60));
  std::string name() const override { return "external:" + endpoint_; }
  Array3d denoise(const Array3d& slices) override;
  /// Sends the batch values as they are (no normalization) and returns the reply.
  SliceBatch round_trip(const SliceBatch& batch);

 private:
  void open();

  std::string endpoint_;
  Channel::Timeout timeout_;
  std::unique_ptr<Channel> channel_;
};

/// One-shot call: connect, handshake, send batch, return the reply.
SliceBatch denoise_external(const SliceBatch& batch, const std::string& endpoint,
                            Channel::Timeout timeout = std::chrono::seconds(60));

/// "identity", "gaussian[:sigma=1]", "median[:width=3]", "tv[:weight=0.1[:iters=100]]" or
/// "external:<endpoint>". Throws ConfigError on a malformed selector.
std::unique_ptr<Denoiser> make_denoiser(const std::string& selector);

/// eta = alpha * D(x) + (1 - alpha) * x, written as x + alpha (D(x) - x). alpha == 0 returns x
/// without calling the denoiser; alpha == 1 returns D(x).
Array3d apply_pnp(const Array3d& x_tilde, Denoiser& denoiser, double alpha);

// Reference server -------------------------------------------------------------------------

/// Transforms request values in place; throwing answers the request with status 3.
using WireTransform = std::function<void(WireRequest&)>;

/// "echo" or "offset:<v>".
WireTransform make_wire_transform(const std::string& mode);

/// Serves one stream: handshake, then requests until EOF. Protocol violations are answered with
/// a nonzero status and end the stream. Returns the number of requests served.
std::size_t serve_stream(Channel& channel, const WireTransform& transform);

/// Accepts connections on a unix/tcp endpoint and serves them one at a time. Stops after
/// max_connections connections when it is nonzero.
void listen_and_serve(const std::string& endpoint, const WireTransform& transform, std::size_t max_connections = 0);

}  // namespace ptychotomo
