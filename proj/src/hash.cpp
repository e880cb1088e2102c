#include "magnograph/hash.hpp"

#include <cstring>
#include <cstdio>

namespace magnograph {

void Fnv1a::add_bytes(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    state_ ^= p[i];
    state_ *= 1099511628211ull;
  }
}

void Fnv1a::add(std::string_view s) {
  add(static_cast<std::int64_t>(s.size()));
  add_bytes(s.data(), s.size());
}

void Fnv1a::add(double x) {
  if (x == 0.0) x = 0.0;  // fold -0
  add_bytes(&x, sizeof x);
}

void Fnv1a::add(std::int64_t x) { add_bytes(&x, sizeof x); }

void Fnv1a::add(const Eigen::VectorXd& v) {
  add(static_cast<std::int64_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) add(v[i]);
}

void Fnv1a::add(const Eigen::VectorXcd& v) {
  add(static_cast<std::int64_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    add(v[i].real());
    add(v[i].imag());
  }
}

std::string hex_hash(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace magnograph
