// Copyright 2026 The ANQS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <bit>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace anqs {

using complex_t = std::complex<double>;

/// Computational basis vector. Bit i holds the occupation of qubit i (0-based);
/// at most 64 qubits.
using basis_t = std::uint64_t;

inline constexpr std::size_t max_qubits = 64;

struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : std::runtime_error(what), line_(0) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a caller breaks an operation's precondition that the type
/// system cannot express (e.g. asking for the children of an unphysical node).
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr basis_t low_mask(std::size_t n) noexcept {
  return n >= 64 ? ~basis_t{0} : (basis_t{1} << n) - 1;
}

inline constexpr int bit_at(basis_t x, std::size_t i) noexcept { return static_cast<int>((x >> i) & 1U); }

inline int popcount(basis_t x) noexcept { return std::popcount(x); }

inline void check_qubit_count(std::size_t n) {
  if (n == 0 || n > max_qubits) throw InputError("qubit count must be in [1, 64], got " + std::to_string(n));
}

/// Throws if `x` has bits set at positions >= n.
inline void check_basis(basis_t x, std::size_t n) {
  if ((x & ~low_mask(n)) != 0) throw InputError("basis vector has bits beyond qubit count " + std::to_string(n));
}

/// "0110" -> basis vector; character k is qubit k.
inline basis_t parse_bits(std::string_view s, std::size_t n) {
  if (s.size() != n)
    throw InputError("bit string '" + std::string(s) + "' has length " + std::to_string(s.size()) + ", expected " +
                     std::to_string(n));
  basis_t x = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (s[i] == '1')
      x |= basis_t{1} << i;
    else if (s[i] != '0')
      throw InputError("bit string '" + std::string(s) + "' contains a character other than 0/1");
  }
  return x;
}

inline basis_t parse_bits(std::string_view s) { return parse_bits(s, s.size()); }

inline std::string format_bits(basis_t x, std::size_t n) {
  std::string s(n, '0');
  for (std::size_t i = 0; i < n; ++i)
    if (bit_at(x, i)) s[i] = '1';
  return s;
}

/// Reverses the low n bits, so that ascending integer order on the result is
/// lexicographic order on the bit strings.
inline basis_t reverse_bits(basis_t x, std::size_t n) noexcept {
  basis_t r = 0;
  for (std::size_t i = 0; i < n; ++i) r |= static_cast<basis_t>(bit_at(x, i)) << (n - 1 - i);
  return r;
}

inline constexpr std::uint64_t splitmix_finalize(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Order-sensitive hash combining, used to derive per-node random streams.
inline constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) noexcept {
  return splitmix_finalize(seed + 0x9e3779b97f4a7c15ULL + splitmix_finalize(v));
}

/// SplitMix64. Small-state generator so that every sampling-tree node can own
/// an independent stream keyed by its position.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix_finalize(state_);
  }

 private:
  std::uint64_t state_;
};

/// Runs fn(begin, end) over fixed-size chunks of [0, n). Chunk boundaries do
/// not depend on the thread count, so per-chunk results combined in chunk
/// order are identical for any `threads`.
template <class Fn>
void parallel_chunks(std::size_t n, std::size_t chunk, std::size_t threads, Fn&& fn) {
  if (n == 0) return;
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t n_chunks = (n + chunk - 1) / chunk;
  threads = std::clamp<std::size_t>(threads, 1, n_chunks);
  auto run_chunk = [&](std::size_t c) { fn(c * chunk, std::min(n, (c + 1) * chunk)); };
  if (threads == 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t c = t; c < n_chunks; c += threads) run_chunk(c);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace anqs
