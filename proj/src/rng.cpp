#include "ltisid/rng.hpp"

#include <cstdio>
#include <cstring>

namespace ltisid {

std::uint64_t Rng::bounded(std::uint64_t n) {
  if (n == 0) return 0;
  const std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % n;
  }
}

void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.bounded(i));
    std::swap(idx[i - 1], idx[j]);
  }
}

Fingerprint& Fingerprint::bytes(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    state_ ^= p[i];
    state_ *= 0x100000001b3ULL;
  }
  return *this;
}

Fingerprint& Fingerprint::add(double v) {
  if (v == 0.0) v = 0.0;  // merge signed zeros
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  return add(bits);
}

Fingerprint& Fingerprint::add(std::uint64_t v) { return bytes(&v, sizeof v); }

Fingerprint& Fingerprint::add(const std::string& s) {
  add(static_cast<std::uint64_t>(s.size()));
  return bytes(s.data(), s.size());
}

std::string Fingerprint::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
  return std::string(buf);
}

}  // namespace ltisid
