#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace magnograph {

/// 64-bit FNV-1a over a byte stream; numbers are hashed by their bit pattern.
class Fnv1a {
 public:
  void add_bytes(const void* data, std::size_t n);
  void add(std::string_view s);
  void add(double x);
  void add(std::int64_t x);
  void add(const Eigen::VectorXd& v);
  void add(const Eigen::VectorXcd& v);
  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = 14695981039346656037ull;
};

std::string hex_hash(std::uint64_t h);

}  // namespace magnograph
