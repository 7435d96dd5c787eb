#pragma once

// MinHash signatures over shingle sets and the two Jaccard routes: the exact
// set computation and the signature-agreement estimate.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "quotematch/error.hpp"
#include "quotematch/hash.hpp"
#include "quotematch/textnorm.hpp"

namespace quotematch {

struct MinHashParams {
  std::size_t k = 256;
  std::uint64_t seed = 0x5eed'c0de'1234'5678ULL;
  std::size_t bands = 128;
  std::size_t rows = 2;

  void validate() const {
    if (k < 16) throw ParamError("minhash k must be >= 16, got " + std::to_string(k));
    if (bands < 1 || rows < 1) throw ParamError("bands and rows must be >= 1");
    if (bands * rows != k)
      throw ParamError("bands * rows must equal k (" + std::to_string(bands) + " * " + std::to_string(rows) +
                       " != " + std::to_string(k) + ")");
  }
  friend bool operator==(const MinHashParams&, const MinHashParams&) = default;
};

// Probability that a pair with Jaccard `s` shares at least one band.
inline double lsh_capture_probability(double s, std::size_t bands, std::size_t rows) {
  double band = 1.0;
  for (std::size_t r = 0; r < rows; ++r) band *= s;
  double miss = 1.0;
  for (std::size_t b = 0; b < bands; ++b) miss *= 1.0 - band;
  return 1.0 - miss;
}

struct MinHashSignature {
  static constexpr std::uint64_t kSentinel = std::numeric_limits<std::uint64_t>::max();

  std::vector<std::uint64_t> values;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return values.size(); }
  // Signature of the empty set: every component is the sentinel.
  bool is_sentinel() const noexcept {
    return std::all_of(values.begin(), values.end(), [](std::uint64_t v) { return v == kSentinel; });
  }
  friend bool operator==(const MinHashSignature&, const MinHashSignature&) = default;
};

// Seeded family h_i(x) = xorshift(a_i * x + b_i) with odd a_i; each h_i is a
// bijection on 64-bit words.
class MinHasher {
 public:
  explicit MinHasher(const MinHashParams& p) : params_(p) {
    p.validate();
    mul_.resize(p.k);
    add_.resize(p.k);
    for (std::size_t i = 0; i < p.k; ++i) {
      mul_[i] = mix64(p.seed + 2 * i + 1) | 1ULL;
      add_[i] = mix64(p.seed ^ ((i + 1) * 0x9e3779b97f4a7c15ULL));
    }
  }

  const MinHashParams& params() const noexcept { return params_; }

  MinHashSignature operator()(const ShingleSet& s) const {
    MinHashSignature sig;
    sig.seed = params_.seed;
    sig.values.assign(params_.k, MinHashSignature::kSentinel);
    for (const auto& sh : s.shingles) {
      const std::uint64_t x = stable_hash(sh);
      for (std::size_t i = 0; i < params_.k; ++i) {
        std::uint64_t v = mul_[i] * x + add_[i];
        v ^= v >> 29;
        if (v < sig.values[i]) sig.values[i] = v;
      }
    }
    return sig;
  }

 private:
  MinHashParams params_;
  std::vector<std::uint64_t> mul_;
  std::vector<std::uint64_t> add_;
};

inline MinHashSignature minhash_signature(const ShingleSet& s, const MinHashParams& p) {
  return MinHasher(p)(s);
}

// Fraction of agreeing components. A sentinel on either side estimates 0.
inline double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b) {
  if (a.size() != b.size())
    throw ParamError("signature length mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  if (a.seed != b.seed) throw ParamError("signature seed mismatch");
  if (a.values.empty() || a.is_sentinel() || b.is_sentinel()) return 0.0;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) agree += a.values[i] == b.values[i];
  return static_cast<double>(agree) / static_cast<double>(a.size());
}

// |a ∩ b| / |a ∪ b|; 0 when both are empty.
inline double exact_jaccard(const ShingleSet& a, const ShingleSet& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  auto ia = a.shingles.begin();
  auto ib = b.shingles.begin();
  while (ia != a.shingles.end() && ib != b.shingles.end()) {
    const int c = ia->compare(*ib);
    if (c == 0) {
      ++inter;
      ++ia;
      ++ib;
    } else if (c < 0) {
      ++ia;
    } else {
      ++ib;
    }
  }
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace quotematch
