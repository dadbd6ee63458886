/*
 * Copyright 2026 The edysec Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef EDYSEC_COMMON_HPP_
#define EDYSEC_COMMON_HPP_

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

namespace edysec {

// Every failure surfaced by the library carries one of these codes so callers
// (CLI, HTTP service, tests) can branch on the kind without parsing messages.
enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kMissingColumn,
  kBadNumeric,
  kBadLabel,
  kDuplicateId,
  kBadManifest,
  kEmptySelection,
  kBadRatios,
  kUnknownColumn,
  kWrongKind,
  kRowMismatch,
  kBadK,
  kEmptyResult,
  kLayoutMismatch,
  kUnknownFeature,
  kWidthMismatch,
  kStateMissing,
  kShapeMismatch,
  kLengthMismatch,
  kSingleClass,
  kTooFewScores,
  kTooManyFeatures,
  kSingularSystem,
  kFeatureMismatch,
  kVersionMismatch,
  kCorruptArtifact,
  kMissingFeature,
  kMalformedRequest,
  kBindFailure,
  kWriteFailure,
};

inline std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kBadNumeric: return "BadNumeric";
    case ErrorCode::kBadLabel: return "BadLabel";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kBadManifest: return "BadManifest";
    case ErrorCode::kEmptySelection: return "EmptySelection";
    case ErrorCode::kBadRatios: return "BadRatios";
    case ErrorCode::kUnknownColumn: return "UnknownColumn";
    case ErrorCode::kWrongKind: return "WrongKind";
    case ErrorCode::kRowMismatch: return "RowMismatch";
    case ErrorCode::kBadK: return "BadK";
    case ErrorCode::kEmptyResult: return "EmptyResult";
    case ErrorCode::kLayoutMismatch: return "LayoutMismatch";
    case ErrorCode::kUnknownFeature: return "UnknownFeature";
    case ErrorCode::kWidthMismatch: return "WidthMismatch";
    case ErrorCode::kStateMissing: return "StateMissing";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kTooFewScores: return "TooFewScores";
    case ErrorCode::kTooManyFeatures: return "TooManyFeatures";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kFeatureMismatch: return "FeatureMismatch";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kCorruptArtifact: return "CorruptArtifact";
    case ErrorCode::kMissingFeature: return "MissingFeature";
    case ErrorCode::kMalformedRequest: return "MalformedRequest";
    case ErrorCode::kBindFailure: return "BindFailure";
    case ErrorCode::kWriteFailure: return "WriteFailure";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> row = std::nullopt,
        std::string subject = {})
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code),
        row_(row),
        subject_(std::move(subject)) {}

  ErrorCode code() const noexcept { return code_; }
  // 1-based data row for load errors.
  std::optional<std::size_t> row() const noexcept { return row_; }
  // Column or feature name the error is about, when there is one.
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> row_;
  std::string subject_;
};

inline void Require(bool condition, const std::string& message,
                    ErrorCode code = ErrorCode::kInvalidArgument) {
  if (!condition) throw Error(code, message);
}

// splitmix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t stream,
                                std::uint64_t index = 0) {
  return MixSeed(MixSeed(MixSeed(master) ^ stream) + index);
}

// Portable random stream. The distributions are written out by hand so that
// identical seeds give identical draws across standard library vendors.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Unbiased integer in [0, n).
  std::size_t Index(std::size_t n) {
    if (n <= 1) return 0;
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = 0;
    do {
      x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
  }

  double Normal() {
    if (spare_) {
      const double s = *spare_;
      spare_.reset();
      return s;
    }
    double u1 = 0.0;
    do {
      u1 = Uniform();
    } while (u1 <= 0.0);
    const double u2 = Uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    spare_ = r * std::sin(kTwoPi * u2);
    return r * std::cos(kTwoPi * u2);
  }

  template <typename T>
  void Shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[Index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
  std::span<double> Row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> Row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }

  bool operator==(const Matrix&) const = default;
};

// 64-bit FNV-1a, used for dataset fingerprints and artifact checksums.
inline std::uint64_t Fnv1a64(std::string_view bytes,
                             std::uint64_t hash = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

inline std::string Hex64(std::uint64_t value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[value & 0xf];
    value >>= 4;
  }
  return out;
}

// Shortest round-trip decimal form of a double.
inline std::string FormatDouble(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) return std::to_string(value);
  return std::string(buffer, ptr);
}

// Fixed-point formatting used for paper-style display columns.
inline std::string FormatFixed(double value, int decimals) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                 std::chars_format::fixed, decimals);
  if (ec != std::errc()) return std::to_string(value);
  std::string out(buffer, ptr);
  if (out.size() > 1 && out[0] == '-' &&
      out.find_first_not_of("-0.") == std::string::npos) {
    out.erase(0, 1);
  }
  return out;
}

}  // namespace edysec

#endif  // EDYSEC_COMMON_HPP_
