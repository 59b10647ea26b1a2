#pragma once

#include <cstdint>

namespace spdsliced {

/// Identifies an independent random stream. Every sampler is a pure function
/// of this value.
struct RngState {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    /// Child stream for index k; children of distinct k never share a stream id
    /// with each other in practice (64-bit mixing).
    RngState derive(std::uint64_t k) const;

    friend bool operator==(const RngState &, const RngState &) = default;
};

/// Counter-based generator: output k of stream (seed, stream_id) is a keyed
/// SplitMix64 finalizer of k, so any position can be computed independently.
class RandomStream {
public:
    explicit RandomStream(const RngState &state);

    std::uint64_t next_u64();
    /// Uniform on the open interval (0, 1).
    double uniform();
    /// Standard normal by inverse CDF.
    double normal();

    std::uint64_t position() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

/// Φ⁻¹(u) for u in (0, 1), accurate to a few ulps.
double normal_quantile(double u);

}  // namespace spdsliced
