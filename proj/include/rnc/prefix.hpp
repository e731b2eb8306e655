#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rnc/error.hpp"

namespace rnc {

/// Finite binary word a_0 a_1 ... a_{d-1}; also names the cylinder [a_0 ... a_{d-1}].
/// The empty prefix is the whole space.
class BitPrefix {
 public:
  BitPrefix() = default;
  explicit BitPrefix(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_) {
      if (b > 1) throw invalid_parameter("prefix bits must be 0 or 1");
    }
  }

  /// Parses a literal over {0,1}; spaces are ignored.
  static BitPrefix parse(std::string_view text) {
    std::vector<std::uint8_t> bits;
    bits.reserve(text.size());
    for (char c : text) {
      if (c == '0' || c == '1') {
        bits.push_back(static_cast<std::uint8_t>(c - '0'));
      } else if (c != ' ' && c != '_') {
        throw invalid_parameter("prefix literal may only contain 0 and 1: '" +
                                std::string(text) + "'");
      }
    }
    return BitPrefix(std::move(bits));
  }

  /// Depth-d prefix whose bit i is bit i of `code`.
  static BitPrefix from_code(std::uint64_t code, std::size_t depth) {
    std::vector<std::uint8_t> bits(depth);
    for (std::size_t i = 0; i < depth; ++i) bits[i] = (code >> i) & 1U;
    return BitPrefix(std::move(bits));
  }

  std::uint64_t code() const noexcept {
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < bits_.size() && i < 64; ++i) c |= std::uint64_t{bits_[i]} << i;
    return c;
  }

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  void push_back(std::uint8_t b) {
    if (b > 1) throw invalid_parameter("prefix bits must be 0 or 1");
    bits_.push_back(b);
  }

  BitPrefix flipped(std::size_t n) const {
    if (n >= bits_.size()) throw index_out_of_prefix("flip index beyond prefix depth");
    BitPrefix out = *this;
    out.bits_[n] ^= 1U;
    return out;
  }

  BitPrefix concat(const BitPrefix& tail) const {
    BitPrefix out = *this;
    out.bits_.insert(out.bits_.end(), tail.bits_.begin(), tail.bits_.end());
    return out;
  }

  /// True when this word starts with `other`, i.e. this cylinder sits inside `other`.
  bool starts_with(const BitPrefix& other) const noexcept {
    if (other.size() > size()) return false;
    for (std::size_t i = 0; i < other.size(); ++i) {
      if (bits_[i] != other.bits_[i]) return false;
    }
    return true;
  }

  std::string str() const {
    std::string s;
    s.reserve(bits_.size());
    for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
    return s;
  }

  friend bool operator==(const BitPrefix&, const BitPrefix&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

}  // namespace rnc
