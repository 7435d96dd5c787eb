#pragma once

// Arabic-aware text normalization, quote-introduction stripping and token
// shingling. Everything that compares texts goes through this header so the
// comparison space is defined in exactly one place.

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "quotematch/error.hpp"
#include "quotematch/utf8.hpp"

namespace quotematch {

namespace chars {

inline constexpr char32_t kAlef = U'ا';
inline constexpr char32_t kHeh = U'ه';
inline constexpr char32_t kYeh = U'ي';
inline constexpr char32_t kWaw = U'و';

// Harakat, tanween, shadda, sukun and the superscript alef.
constexpr bool is_diacritic(char32_t c) {
  return (c >= 0x064B && c <= 0x0652) || c == 0x0670;
}

constexpr bool is_tatweel(char32_t c) { return c == 0x0640; }

// Zero-width and bidi format characters. Dropped without leaving a gap.
constexpr bool is_invisible_format(char32_t c) {
  return c == 0xFEFF || (c >= 0x200C && c <= 0x200F) || (c >= 0x202A && c <= 0x202E) ||
         (c >= 0x2060 && c <= 0x2064) || (c >= 0x2066 && c <= 0x2069);
}

constexpr bool is_space_like(char32_t c) {
  return c <= 0x20 || c == 0x7F || (c >= 0x80 && c <= 0xA0) || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200B) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
         c == 0x205F || c == 0x3000;
}

constexpr bool is_punctuation(char32_t c) {
  if (c < 0x80) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
           (c >= 0x7B && c <= 0x7E);
  }
  return (c >= 0xA1 && c <= 0xBF) || c == 0xD7 || c == 0xF7 ||
         // Arabic comma, date separator, semicolon, triple dot, question mark,
         // percent/decimal/thousands/star, full stop.
         c == 0x060C || c == 0x060D || c == 0x061B || c == 0x061E || c == 0x061F ||
         (c >= 0x066A && c <= 0x066D) || c == 0x06D4 || c == 0xFD3E || c == 0xFD3F ||
         (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) ||
         (c >= 0x3001 && c <= 0x303F) || (c >= 0xFF01 && c <= 0xFF0F) ||
         (c >= 0xFF1A && c <= 0xFF20) || (c >= 0xFF3B && c <= 0xFF40) ||
         (c >= 0xFF5B && c <= 0xFF65);
}

// Letter folding table. Returns the input for code points it does not fold.
constexpr char32_t fold_letter(char32_t c) {
  switch (c) {
    case 0x0623:  // alef with hamza above
    case 0x0625:  // alef with hamza below
    case 0x0622:  // alef with madda
    case 0x0671:  // alef wasla
      return kAlef;
    case 0x0629:  // teh marbuta
      return kHeh;
    case 0x0649:  // alef maksura
    case 0x0626:  // yeh with hamza
      return kYeh;
    case 0x0624:  // waw with hamza
      return kWaw;
    default:
      break;
  }
  if (c >= 'A' && c <= 'Z') return c + ('a' - 'A');
  return c;
}

constexpr bool is_handle_char(char32_t c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

}  // namespace chars

// Text in normal form: no diacritics or tatweel, folded letters, single
// spaces between tokens and none at either end.
struct NormalizedText {
  std::string text;
  std::size_t token_count = 0;

  bool empty() const noexcept { return text.empty(); }
  friend bool operator==(const NormalizedText&, const NormalizedText&) = default;
};

namespace detail {

inline bool starts_with_ci(const std::vector<char32_t>& cps, std::size_t at, std::u32string_view pat) {
  if (at + pat.size() > cps.size()) return false;
  for (std::size_t k = 0; k < pat.size(); ++k) {
    char32_t c = cps[at + k];
    if (c >= 'A' && c <= 'Z') c += 'a' - 'A';
    if (c != pat[k]) return false;
  }
  return true;
}

inline std::size_t count_tokens(std::string_view s) {
  if (s.empty()) return 0;
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), ' ')) + 1;
}

// Replaces URLs and @-mentions with a single space.
inline std::vector<char32_t> drop_urls_and_mentions(const std::vector<char32_t>& in) {
  std::vector<char32_t> out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    const bool at_token_start = i == 0 || chars::is_space_like(in[i - 1]);
    const bool url = starts_with_ci(in, i, U"http://") || starts_with_ci(in, i, U"https://") ||
                     (at_token_start && starts_with_ci(in, i, U"www."));
    if (url) {
      while (i < in.size() && !chars::is_space_like(in[i])) ++i;
      out.push_back(U' ');
      continue;
    }
    if (in[i] == U'@' && i + 1 < in.size() && chars::is_handle_char(in[i + 1])) {
      ++i;
      while (i < in.size() && chars::is_handle_char(in[i])) ++i;
      out.push_back(U' ');
      continue;
    }
    out.push_back(in[i]);
    ++i;
  }
  return out;
}

}  // namespace detail

// Maps raw post or quote text into the comparison space. Total: invalid UTF-8
// bytes become separators. Hashtags keep their body (the '#' and underscores
// are punctuation); URLs and @-mentions are removed.
inline NormalizedText normalize_arabic(std::string_view raw) {
  const auto cps = detail::drop_urls_and_mentions(utf8::decode(raw));
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char32_t c : cps) {
    if (c == utf8::kInvalid || chars::is_space_like(c) || chars::is_punctuation(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (chars::is_diacritic(c) || chars::is_tatweel(c) || chars::is_invisible_format(c)) continue;
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    utf8::append(out, chars::fold_letter(c));
  }
  NormalizedText nt;
  nt.token_count = detail::count_tokens(out);
  nt.text = std::move(out);
  return nt;
}

inline std::vector<std::string_view> tokens(std::string_view normalized) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < normalized.size()) {
    std::size_t end = normalized.find(' ', start);
    if (end == std::string_view::npos) end = normalized.size();
    if (end > start) out.push_back(normalized.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

// Ordered quote-introduction phrases, stored normalized and longest first.
class PrefixLexicon {
 public:
  PrefixLexicon() = default;

  explicit PrefixLexicon(const std::vector<std::string>& phrases) {
    for (const auto& p : phrases) add(p);
  }

  void add(std::string_view phrase) {
    auto nt = normalize_arabic(phrase);
    if (nt.empty()) return;
    if (std::find(patterns_.begin(), patterns_.end(), nt.text) != patterns_.end()) return;
    patterns_.push_back(std::move(nt.text));
    std::stable_sort(patterns_.begin(), patterns_.end(),
                     [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
  }

  const std::vector<std::string>& patterns() const noexcept { return patterns_; }
  bool empty() const noexcept { return patterns_.empty(); }
  std::size_t size() const noexcept { return patterns_.size(); }

  static PrefixLexicon defaults() {
    return PrefixLexicon({
        "قال رسول الله صلى الله عليه وسلم",
        "قال رسول الله عليه الصلاة والسلام",
        "قال رسول الله ﷺ",
        "قال رسول الله",
        "قال النبي صلى الله عليه وسلم",
        "قال النبي عليه الصلاة والسلام",
        "قال النبي ﷺ",
        "قال النبي",
        "قال صلى الله عليه وسلم",
        "سمعت رسول الله صلى الله عليه وسلم يقول",
        "سمعت رسول الله يقول",
        "سمعت النبي صلى الله عليه وسلم يقول",
        "سمعت النبي يقول",
        "قال محمد صلى الله عليه وسلم",
        "قال محمد عليه الصلاة والسلام",
        "عن النبي صلى الله عليه وسلم قال",
        "عن رسول الله صلى الله عليه وسلم قال",
    });
  }

  // One phrase per line; blank lines and lines starting with '#' are skipped.
  static PrefixLexicon load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingInput("cannot open prefix lexicon: " + path);
    PrefixLexicon lex;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      std::string_view v = line;
      if (first) v = utf8::strip_bom(v);
      first = false;
      if (!v.empty() && v.front() == '#') continue;
      lex.add(v);
    }
    return lex;
  }

 private:
  std::vector<std::string> patterns_;
};

namespace detail {

inline bool is_quote_mark(std::string_view s, std::size_t& len) {
  static constexpr std::string_view kMarks[] = {"\"", "'", "«", "»", "“",
                                                "”", "„", "‘", "’"};
  for (auto m : kMarks) {
    if (s.substr(0, m.size()) == m) {
      len = m.size();
      return true;
    }
  }
  return false;
}

inline NormalizedText make_normalized(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return NormalizedText{std::string(s), count_tokens(s)};
}

}  // namespace detail

// Removes the longest lexicon phrase found at the start of the text (after an
// optional leading quote mark). Matches whole tokens only; removes once.
inline NormalizedText strip_quote_prefix(const NormalizedText& t, const PrefixLexicon& lex) {
  std::string_view s = t.text;
  std::size_t mark = 0;
  if (detail::is_quote_mark(s, mark)) {
    s.remove_prefix(mark);
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  }
  for (const auto& p : lex.patterns()) {
    if (s.size() >= p.size() && s.compare(0, p.size(), p) == 0 &&
        (s.size() == p.size() || s[p.size()] == ' ')) {
      return detail::make_normalized(s.substr(p.size()));
    }
  }
  return t;
}

// Set of consecutive n-token windows, tokens joined by a single space.
// Stored sorted and unique.
struct ShingleSet {
  std::vector<std::string> shingles;
  std::size_t source_token_count = 0;

  std::size_t size() const noexcept { return shingles.size(); }
  bool empty() const noexcept { return shingles.empty(); }
  bool contains(std::string_view s) const {
    return std::binary_search(shingles.begin(), shingles.end(), s,
                              [](auto&& a, auto&& b) { return std::string_view(a) < std::string_view(b); });
  }
  friend bool operator==(const ShingleSet& a, const ShingleSet& b) { return a.shingles == b.shingles; }
};

inline ShingleSet shingle(const NormalizedText& t, std::size_t n = 1) {
  if (n == 0) throw ParamError("shingle size must be >= 1");
  const auto toks = tokens(t.text);
  ShingleSet out;
  out.source_token_count = toks.size();
  if (toks.size() < n) return out;
  out.shingles.reserve(toks.size() - n + 1);
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    std::string g(toks[i]);
    for (std::size_t k = 1; k < n; ++k) {
      g.push_back(' ');
      g.append(toks[i + k]);
    }
    out.shingles.push_back(std::move(g));
  }
  std::sort(out.shingles.begin(), out.shingles.end());
  out.shingles.erase(std::unique(out.shingles.begin(), out.shingles.end()), out.shingles.end());
  return out;
}

// Builds a ShingleSet directly from tokens (test fixtures, synthetic data).
inline ShingleSet shingle_tokens(std::initializer_list<std::string_view> toks, std::size_t n = 1) {
  std::string joined;
  for (auto tk : toks) {
    if (!joined.empty()) joined.push_back(' ');
    joined.append(tk);
  }
  return shingle(NormalizedText{joined, detail::count_tokens(joined)}, n);
}

}  // namespace quotematch
