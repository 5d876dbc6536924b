#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace wsaa {

//! A reproducible random stream identified by (seed, stream_id).
//!
//! The engine is std::mt19937_64 seeded through std::seed_seq, both of which
//! the standard specifies exactly. Uniform and normal variates are produced
//! here rather than by the <random> distributions, whose algorithms vary
//! between standard libraries.
class RngStream
{
public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }
  //! Uniform on [0, 1) with 53 random bits.
  double uniform();
  //! Uniform on the open interval (0, 1).
  double uniform_open();
  //! Standard normal (Marsaglia polar method).
  double normal();
  //! Uniform integer in [0, n).
  std::size_t below(std::size_t n);

private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace wsaa
