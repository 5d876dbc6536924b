#include "wsaa/rng.hpp"

#include "wsaa/error.hpp"

#include <cmath>

namespace wsaa {

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
  : seed_(seed)
  , stream_id_(stream_id)
{
  std::seed_seq seq{ static_cast<std::uint32_t>(seed),
                     static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(stream_id),
                     static_cast<std::uint32_t>(stream_id >> 32) };
  engine_.seed(seq);
}

double
RngStream::uniform()
{
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double
RngStream::uniform_open()
{
  double u;
  do {
    u = uniform();
  } while (u == 0.0);
  return u;
}

double
RngStream::normal()
{
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * scale;
  has_spare_ = true;
  return u * scale;
}

std::size_t
RngStream::below(std::size_t n)
{
  if (n == 0)
    throw InvalidArgument("RngStream::below needs n > 0");
  // rejection keeps the draw unbiased
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return static_cast<std::size_t>(r % bound);
}

} // namespace wsaa
