#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rnc {

/// Base class of every error raised by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A lazy sequence produced no 1 (or was asked for a bit) past its
/// materialization cap.
class cap_exceeded : public error {
 public:
  explicit cap_exceeded(std::uint64_t cap)
      : error("materialization cap of " + std::to_string(cap) +
              " indices exceeded"),
        cap_(cap) {}
  std::uint64_t cap() const noexcept { return cap_; }

 private:
  std::uint64_t cap_;
};

class invalid_parameter : public error {
 public:
  using error::error;
};

/// Some ratio m_n(0)/m_n(1) is not an integer power of the requested base.
class not_power_compatible : public error {
 public:
  using error::error;
};

/// Exact evaluation was requested where only log-domain bounds are feasible.
class too_large : public error {
 public:
  using error::error;
};

class index_out_of_prefix : public error {
 public:
  using error::error;
};

class depth_mismatch : public error {
 public:
  using error::error;
};

class config_error : public error {
 public:
  using error::error;
};

}  // namespace rnc
