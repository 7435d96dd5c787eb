#pragma once

#include <array>
#include <filesystem>
#include <random>
#include <string>

#include "quotematch/quotematch.hpp"

namespace qmtest {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("qm_" + tag + "_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline quotematch::ReferenceQuote quote(const std::string& id, const std::string& text,
                                        quotematch::AuthenticityLevel level = quotematch::AuthenticityLevel::Fabricated,
                                        const std::string& source = "test") {
  quotematch::ReferenceQuote q;
  q.id = id;
  q.raw_text = text;
  q.normalized_text = quotematch::quote_key(text, quotematch::PrefixLexicon::defaults());
  q.authenticity = level;
  q.source = source;
  return q;
}

inline std::string corpus_tsv(std::initializer_list<std::array<std::string, 3>> rows) {
  std::string s = "id\tauthenticity\tsource\ttext\n";
  for (const auto& r : rows) s += r[0] + "\t" + r[1] + "\tfixture\t" + r[2] + "\n";
  return s;
}

}  // namespace qmtest
