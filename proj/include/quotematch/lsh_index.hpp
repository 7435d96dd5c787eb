#pragma once

// Banded LSH index over a reference corpus. Each quote's MinHash signature is
// cut into `bands` groups of `rows` components; a query collides with a quote
// when any full band agrees. Candidate sets are supersets that the matcher
// verifies.

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "quotematch/corpus.hpp"
#include "quotematch/error.hpp"
#include "quotematch/hash.hpp"
#include "quotematch/io.hpp"
#include "quotematch/minhash.hpp"
#include "quotematch/textnorm.hpp"

namespace quotematch {

class LshIndex {
 public:
  static constexpr char kMagic[8] = {'Q', 'M', 'L', 'S', 'H', 'I', 'X', '\0'};
  static constexpr std::uint32_t kFormatVersion = 1;

  // Throws ContractError for an empty corpus.
  static LshIndex build(const ReferenceCorpus& c, const MinHashParams& p, std::size_t shingle_n = 1) {
    if (c.empty()) throw ContractError("cannot index an empty corpus");
    if (shingle_n == 0) throw ParamError("shingle size must be >= 1");
    LshIndex ix(p, shingle_n);
    ix.corpus_fingerprint_ = c.fingerprint();
    ix.shingles_.reserve(c.size());
    ix.signatures_.reserve(c.size());
    for (const auto& q : c.quotes()) {
      ix.shingles_.push_back(shingle(NormalizedText{q.normalized_text, tokens(q.normalized_text).size()}, shingle_n));
      ix.signatures_.push_back(ix.hasher_(ix.shingles_.back()));
    }
    ix.fill_tables();
    return ix;
  }

  const MinHashParams& params() const noexcept { return hasher_.params(); }
  std::size_t shingle_n() const noexcept { return shingle_n_; }
  std::size_t corpus_size() const noexcept { return signatures_.size(); }
  std::uint64_t corpus_fingerprint() const noexcept { return corpus_fingerprint_; }
  const MinHasher& hasher() const noexcept { return hasher_; }

  const ShingleSet& quote_shingles(std::size_t pos) const { return shingles_.at(pos); }
  const MinHashSignature& quote_signature(std::size_t pos) const { return signatures_.at(pos); }
  // False for quotes whose shingle set is empty (fewer tokens than n).
  bool indexed(std::size_t pos) const { return !signatures_.at(pos).is_sentinel(); }

  // Number of buckets across all bands holding quote `pos`.
  std::size_t bucket_count_of(std::size_t pos) const {
    std::size_t n = 0;
    for (const auto& table : tables_)
      for (const auto& [key, ids] : table) n += static_cast<std::size_t>(std::count(ids.begin(), ids.end(), pos));
    return n;
  }

  // Sorted corpus positions sharing at least one band with the signature.
  std::vector<std::size_t> query_signature(const MinHashSignature& sig) const {
    std::vector<std::size_t> out;
    if (sig.size() != params().k || sig.seed != params().seed)
      throw ParamError("query signature was built with different minhash parameters");
    if (sig.is_sentinel()) return out;
    for (std::size_t b = 0; b < tables_.size(); ++b) {
      auto it = tables_[b].find(band_key(sig, b));
      if (it == tables_[b].end()) continue;
      out.insert(out.end(), it->second.begin(), it->second.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::vector<std::size_t> query_candidates(const ShingleSet& s) const { return query_signature(hasher_(s)); }

  // Versioned little-endian binary image: params, corpus fingerprint and all
  // signatures. Band tables are rebuilt on load.
  std::string serialize() const {
    std::string out(kMagic, sizeof kMagic);
    put32(out, kFormatVersion);
    put32(out, static_cast<std::uint32_t>(params().k));
    put32(out, static_cast<std::uint32_t>(params().bands));
    put32(out, static_cast<std::uint32_t>(params().rows));
    put32(out, static_cast<std::uint32_t>(shingle_n_));
    put64(out, params().seed);
    put64(out, corpus_fingerprint_);
    put64(out, signatures_.size());
    for (const auto& sig : signatures_)
      for (auto v : sig.values) put64(out, v);
    return out;
  }

  // Throws ParseError on a malformed image and VersionMismatch when the
  // image was built from a different corpus or format version.
  static LshIndex deserialize(std::string_view bytes, const ReferenceCorpus& c) {
    Reader r{bytes};
    if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
      throw ParseError("not a quotematch index file");
    r.pos = sizeof kMagic;
    const auto version = r.u32();
    if (version != kFormatVersion)
      throw VersionMismatch("index format version " + std::to_string(version) + " unsupported");
    MinHashParams p;
    p.k = r.u32();
    p.bands = r.u32();
    p.rows = r.u32();
    const std::size_t n = r.u32();
    p.seed = r.u64();
    const auto fp = r.u64();
    const auto count = r.u64();
    p.validate();
    if (fp != c.fingerprint() || count != c.size())
      throw VersionMismatch("index was built from a different corpus");
    LshIndex ix(p, n);
    ix.corpus_fingerprint_ = fp;
    for (const auto& q : c.quotes())
      ix.shingles_.push_back(shingle(NormalizedText{q.normalized_text, tokens(q.normalized_text).size()}, n));
    for (std::uint64_t i = 0; i < count; ++i) {
      MinHashSignature sig;
      sig.seed = p.seed;
      sig.values.resize(p.k);
      for (auto& v : sig.values) v = r.u64();
      ix.signatures_.push_back(std::move(sig));
    }
    if (r.pos != bytes.size()) throw ParseError("trailing bytes in index file");
    ix.fill_tables();
    return ix;
  }

  void save(const std::filesystem::path& path) const { io::write_file(path, serialize()); }
  static LshIndex load(const std::filesystem::path& path, const ReferenceCorpus& c) {
    return deserialize(io::read_file(path), c);
  }

 private:
  LshIndex(const MinHashParams& p, std::size_t n) : hasher_(p), shingle_n_(n), tables_(p.bands) {}

  std::uint64_t band_key(const MinHashSignature& sig, std::size_t band) const {
    std::uint64_t h = mix64(band + 1);
    const std::size_t rows = params().rows;
    for (std::size_t r = 0; r < rows; ++r) h = hash_combine(h, sig.values[band * rows + r]);
    return h;
  }

  void fill_tables() {
    for (std::size_t pos = 0; pos < signatures_.size(); ++pos) {
      if (signatures_[pos].is_sentinel()) continue;
      for (std::size_t b = 0; b < tables_.size(); ++b) tables_[b][band_key(signatures_[pos], b)].push_back(pos);
    }
  }

  static void put32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  static void put64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }

  struct Reader {
    std::string_view bytes;
    std::size_t pos = 0;
    std::uint64_t take(int width) {
      if (pos + static_cast<std::size_t>(width) > bytes.size()) throw ParseError("truncated index file");
      std::uint64_t v = 0;
      for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
      pos += static_cast<std::size_t>(width);
      return v;
    }
    std::uint32_t u32() { return static_cast<std::uint32_t>(take(4)); }
    std::uint64_t u64() { return take(8); }
  };

  MinHasher hasher_;
  std::size_t shingle_n_;
  std::uint64_t corpus_fingerprint_ = 0;
  std::vector<ShingleSet> shingles_;
  std::vector<MinHashSignature> signatures_;
  std::vector<std::unordered_map<std::uint64_t, std::vector<std::size_t>>> tables_;
};

inline LshIndex build_index(const ReferenceCorpus& c, const MinHashParams& p, std::size_t shingle_n = 1) {
  return LshIndex::build(c, p, shingle_n);
}

inline std::vector<std::size_t> query_candidates(const LshIndex& ix, const ShingleSet& s) {
  return ix.query_candidates(s);
}

}  // namespace quotematch
