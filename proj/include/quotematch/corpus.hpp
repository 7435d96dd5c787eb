#pragma once

// Reference quote corpora: TSV loading with normalization-based dedup,
// merging of independently scraped sources, and id-based exclusion filters.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "quotematch/error.hpp"
#include "quotematch/hash.hpp"
#include "quotematch/io.hpp"
#include "quotematch/textnorm.hpp"

namespace quotematch {

enum class AuthenticityLevel { Authentic, Good, Weak, Fabricated };

inline std::string_view to_string(AuthenticityLevel a) {
  switch (a) {
    case AuthenticityLevel::Authentic: return "authentic";
    case AuthenticityLevel::Good: return "good";
    case AuthenticityLevel::Weak: return "weak";
    case AuthenticityLevel::Fabricated: return "fabricated";
  }
  return "?";
}

inline std::optional<AuthenticityLevel> parse_authenticity(std::string_view s) {
  std::string lower(s);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "authentic" || lower == "sahih") return AuthenticityLevel::Authentic;
  if (lower == "good" || lower == "hasan") return AuthenticityLevel::Good;
  if (lower == "weak" || lower == "daif") return AuthenticityLevel::Weak;
  if (lower == "fabricated" || lower == "mawdu") return AuthenticityLevel::Fabricated;
  return std::nullopt;
}

struct ReferenceQuote {
  std::string id;
  std::string raw_text;
  std::string normalized_text;
  AuthenticityLevel authenticity = AuthenticityLevel::Fabricated;
  std::string source;

  bool fabricated() const noexcept { return authenticity == AuthenticityLevel::Fabricated; }
};

// Normal form used for both dedup and matching: normalize, then strip the
// quote introduction.
inline std::string quote_key(std::string_view raw, const PrefixLexicon& lex) {
  return strip_quote_prefix(normalize_arabic(raw), lex).text;
}

// Immutable-after-build collection of unique quotes. Unique ids and unique
// normalized texts are enforced by add().
class ReferenceCorpus {
 public:
  enum class AddOutcome { Added, DuplicateText };

  // Throws ValidationError on empty normalized text or a reused id.
  AddOutcome add(ReferenceQuote q) {
    if (q.normalized_text.empty()) throw ValidationError("quote '" + q.id + "' is empty after normalization");
    if (by_text_.count(q.normalized_text)) return AddOutcome::DuplicateText;
    if (by_id_.count(q.id)) throw ValidationError("duplicate quote id '" + q.id + "'");
    by_id_.emplace(q.id, quotes_.size());
    by_text_.emplace(q.normalized_text, quotes_.size());
    add_provenance(q.source);
    quotes_.push_back(std::move(q));
    return AddOutcome::Added;
  }

  void add_provenance(const std::string& tag) {
    if (!tag.empty() && std::find(provenance_.begin(), provenance_.end(), tag) == provenance_.end())
      provenance_.push_back(tag);
  }

  const std::vector<ReferenceQuote>& quotes() const noexcept { return quotes_; }
  const std::vector<std::string>& provenance() const noexcept { return provenance_; }
  std::size_t size() const noexcept { return quotes_.size(); }
  bool empty() const noexcept { return quotes_.empty(); }
  const ReferenceQuote& operator[](std::size_t i) const { return quotes_[i]; }

  const ReferenceQuote* find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &quotes_[it->second];
  }
  std::optional<std::size_t> position_of(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
  }
  const ReferenceQuote* find_text(const std::string& normalized) const {
    auto it = by_text_.find(normalized);
    return it == by_text_.end() ? nullptr : &quotes_[it->second];
  }
  bool has_id(std::string_view id) const { return by_id_.count(std::string(id)) > 0; }

  std::vector<const ReferenceQuote*> by_level(AuthenticityLevel level) const {
    std::vector<const ReferenceQuote*> out;
    for (const auto& q : quotes_)
      if (q.authenticity == level) out.push_back(&q);
    return out;
  }

  // Order-sensitive content hash binding downstream artifacts to this corpus.
  std::uint64_t fingerprint() const {
    std::uint64_t h = fnv1a64("quotematch.corpus.v1");
    for (const auto& q : quotes_) {
      h = hash_combine(h, fnv1a64(q.id));
      h = hash_combine(h, static_cast<std::uint64_t>(q.authenticity));
      h = hash_combine(h, fnv1a64(q.normalized_text));
    }
    return h;
  }

 private:
  std::vector<ReferenceQuote> quotes_;
  std::vector<std::string> provenance_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::size_t> by_text_;
};

struct Collapse {
  std::string dropped_id;
  std::string kept_id;
};

struct CorpusLoad {
  ReferenceCorpus corpus;
  std::vector<Collapse> collapsed;
};

// Parses the TSV corpus format: header `id<TAB>authenticity<TAB>source<TAB>text`.
// Rows whose normalized text repeats an earlier row are collapsed into it.
inline CorpusLoad parse_corpus(std::string_view content, const std::string& default_source,
                               const PrefixLexicon& lex = PrefixLexicon::defaults()) {
  CorpusLoad out;
  const auto lines = io::split_lines(content);
  std::size_t first = 0;
  while (first < lines.size() && lines[first].empty()) ++first;
  if (first == lines.size()) return out;

  auto split_tabs = [](std::string_view line) {
    std::vector<std::string_view> f;
    std::size_t s = 0;
    while (true) {
      auto e = line.find('\t', s);
      if (e == std::string_view::npos) {
        f.push_back(line.substr(s));
        break;
      }
      f.push_back(line.substr(s, e - s));
      s = e + 1;
    }
    return f;
  };

  const auto header = split_tabs(lines[first]);
  auto col = [&](std::string_view name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw ParseError("corpus header lacks column '" + std::string(name) + "'", first + 1);
  };
  const std::size_t c_id = col("id"), c_auth = col("authenticity"), c_src = col("source"), c_text = col("text");

  for (std::size_t li = first + 1; li < lines.size(); ++li) {
    const std::size_t lineno = li + 1;
    if (lines[li].empty()) continue;
    const auto f = split_tabs(lines[li]);
    if (f.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " tab-separated fields, got " +
                           std::to_string(f.size()),
                       lineno);
    if (f[c_id].empty()) throw ParseError("empty quote id", lineno);
    if (f[c_text].empty()) throw ParseError("empty quote text", lineno);
    const auto level = parse_authenticity(f[c_auth]);
    if (!level) throw ValidationError("unknown authenticity label '" + std::string(f[c_auth]) + "'", lineno);

    ReferenceQuote q;
    q.id = std::string(f[c_id]);
    q.raw_text = std::string(f[c_text]);
    q.normalized_text = quote_key(q.raw_text, lex);
    q.authenticity = *level;
    q.source = f[c_src].empty() ? default_source : std::string(f[c_src]);
    if (q.normalized_text.empty()) throw ValidationError("quote text is empty after normalization", lineno);

    if (const auto* kept = out.corpus.find_text(q.normalized_text)) {
      out.collapsed.push_back({q.id, kept->id});
      continue;
    }
    if (out.corpus.has_id(q.id)) throw ValidationError("duplicate quote id '" + q.id + "'", lineno);
    out.corpus.add(std::move(q));
  }
  return out;
}

inline CorpusLoad load_corpus(const std::filesystem::path& path,
                              const PrefixLexicon& lex = PrefixLexicon::defaults()) {
  return parse_corpus(io::read_file(path), path.stem().string(), lex);
}

inline std::string sanitize_field(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  return out;
}

inline std::string format_corpus(const ReferenceCorpus& c) {
  std::string out = "id\tauthenticity\tsource\ttext\n";
  for (const auto& q : c.quotes()) {
    out += sanitize_field(q.id);
    out += '\t';
    out += to_string(q.authenticity);
    out += '\t';
    out += sanitize_field(q.source);
    out += '\t';
    out += sanitize_field(q.raw_text);
    out += '\n';
  }
  return out;
}

struct MergeResult {
  ReferenceCorpus corpus;
  // Quotes of `b` whose normalized text already existed in `a`.
  std::vector<Collapse> collisions;
  // (old id, new id) for quotes of `b` re-namespaced to avoid an id clash.
  std::vector<std::pair<std::string, std::string>> renamed;
};

// Union by normalized text; `a` wins on collision.
inline MergeResult merge_corpora(const ReferenceCorpus& a, const ReferenceCorpus& b) {
  MergeResult r;
  r.corpus = a;
  for (const auto& tag : b.provenance()) r.corpus.add_provenance(tag);
  for (const auto& q : b.quotes()) {
    if (const auto* kept = r.corpus.find_text(q.normalized_text)) {
      r.collisions.push_back({q.id, kept->id});
      continue;
    }
    ReferenceQuote copy = q;
    if (r.corpus.has_id(copy.id)) {
      std::string base = (copy.source.empty() ? std::string("b") : copy.source) + ":" + copy.id;
      std::string candidate = base;
      for (int n = 2; r.corpus.has_id(candidate); ++n) candidate = base + "#" + std::to_string(n);
      r.renamed.emplace_back(copy.id, candidate);
      copy.id = candidate;
    }
    r.corpus.add(std::move(copy));
  }
  return r;
}

struct FilterResult {
  ReferenceCorpus corpus;
  std::vector<std::string> unknown_ids;
  std::size_t removed = 0;
};

inline FilterResult filter_corpus(const ReferenceCorpus& c, const std::set<std::string>& exclude_ids) {
  FilterResult r;
  for (const auto& tag : c.provenance()) r.corpus.add_provenance(tag);
  for (const auto& q : c.quotes()) {
    if (exclude_ids.count(q.id)) {
      ++r.removed;
      continue;
    }
    r.corpus.add(q);
  }
  for (const auto& id : exclude_ids)
    if (!c.has_id(id)) r.unknown_ids.push_back(id);
  return r;
}

// One id per line; blank lines and '#' comments ignored; surrounding blanks trimmed.
inline std::set<std::string> parse_exclusion_list(std::string_view content) {
  std::set<std::string> ids;
  for (auto& line : io::split_lines(content)) {
    std::string_view v = line;
    while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
    while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
    if (v.empty() || v.front() == '#') continue;
    ids.emplace(v);
  }
  return ids;
}

inline std::set<std::string> load_exclusion_list(const std::filesystem::path& path) {
  return parse_exclusion_list(io::read_file(path));
}

}  // namespace quotematch
