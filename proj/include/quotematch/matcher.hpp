#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "quotematch/corpus.hpp"
#include "quotematch/error.hpp"
#include "quotematch/lsh_index.hpp"
#include "quotematch/minhash.hpp"
#include "quotematch/textnorm.hpp"

namespace quotematch {

// Phrases that mark a shared hadith as non-authentic, stored normalized.
class RefuteLexicon {
 public:
  RefuteLexicon() = default;
  explicit RefuteLexicon(const std::vector<std::string>& phrases) {
    for (const auto& p : phrases) add(p);
  }

  void add(std::string_view phrase) {
    auto nt = normalize_arabic(phrase);
    if (nt.empty()) return;
    if (std::find(phrases_.begin(), phrases_.end(), nt.text) == phrases_.end()) phrases_.push_back(std::move(nt.text));
  }

  const std::vector<std::string>& phrases() const noexcept { return phrases_; }
  std::size_t size() const noexcept { return phrases_.size(); }
  bool empty() const noexcept { return phrases_.empty(); }

  // The fourteen refuting terms used for collection and refute counting.
  static const std::vector<std::string>& default_phrases() {
    static const std::vector<std::string> kPhrases = {
        "حديث موضوع",     "حديث مفبرك",   "حديث مفترى",     "حديث غير صحيح",
        "حديث مكذوب",     "حديث كذب على رسول الله",     "حديث لا يصح",
        "حديث لا أصل له", "الدرجة: لا يصح", "حديث ضعيف",      "الدرجة: موضوع",
        "حديث ليس صحيح",  "حديث لم يرد",   "حديث مختلق",
    };
    return kPhrases;
  }

  static RefuteLexicon defaults() { return RefuteLexicon(default_phrases()); }

  static RefuteLexicon load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingInput("cannot open refute lexicon: " + path);
    RefuteLexicon lex;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      std::string_view v = line;
      if (first) v = utf8::strip_bom(v);
      first = false;
      if (!v.empty() && v.front() == '#') continue;
      lex.add(v);
    }
    if (lex.empty()) throw ValidationError("refute lexicon " + path + " has no phrases");
    return lex;
  }

 private:
  std::vector<std::string> phrases_;
};

// Whole-token phrase search over already normalized text.
inline bool contains_refute_term(const NormalizedText& t, const RefuteLexicon& rl) {
  if (t.empty()) return false;
  const std::string padded = " " + t.text + " ";
  for (const auto& p : rl.phrases()) {
    if (padded.find(" " + p + " ") != std::string::npos) return true;
  }
  return false;
}

inline bool contains_refute_term(std::string_view post_text, const RefuteLexicon& rl) {
  return contains_refute_term(normalize_arabic(post_text), rl);
}

enum class MatchKind { Circulation, Refute, NonFabricatedShare };

inline std::string_view to_string(MatchKind k) {
  switch (k) {
    case MatchKind::Circulation: return "circulation";
    case MatchKind::Refute: return "refute";
    case MatchKind::NonFabricatedShare: return "non_fabricated_share";
  }
  return "?";
}

inline MatchKind classify_match(AuthenticityLevel level, bool has_refute_term) {
  if (level != AuthenticityLevel::Fabricated) return MatchKind::NonFabricatedShare;
  return has_refute_term ? MatchKind::Refute : MatchKind::Circulation;
}

struct MatchResult {
  std::string post_id;
  std::string quote_id;
  std::size_t quote_pos = 0;
  double similarity = 0.0;
  AuthenticityLevel authenticity = AuthenticityLevel::Fabricated;
  MatchKind kind = MatchKind::Circulation;
};

enum class ScoreMode {
  Exact,      // candidates verified with exact Jaccard
  Signature,  // candidates scored by signature agreement only
};

struct MatchOptions {
  double threshold = 0.35;
  ScoreMode mode = ScoreMode::Exact;

  void validate() const {
    if (!(threshold > 0.0 && threshold < 1.0))
      throw ParamError("threshold must be in (0, 1), got " + std::to_string(threshold));
  }
};

// Read-only view bundling everything a post match needs. Cheap to copy;
// callers share one across threads.
class Matcher {
 public:
  Matcher(const LshIndex& ix, const ReferenceCorpus& c, const RefuteLexicon& rl, const PrefixLexicon& pl,
          MatchOptions opts = {})
      : ix_(&ix), corpus_(&c), refute_(&rl), prefix_(&pl), opts_(opts) {
    opts_.validate();
    if (ix.corpus_fingerprint() != c.fingerprint()) throw VersionMismatch("index does not belong to this corpus");
  }

  const MatchOptions& options() const noexcept { return opts_; }

  struct Best {
    std::size_t pos = 0;
    double similarity = 0.0;
  };

  // Highest-similarity quote strictly above the threshold, ties to the
  // lowest quote id. Ignores refute terms.
  std::optional<Best> best_quote(const NormalizedText& normalized_post) const {
    const auto body = strip_quote_prefix(normalized_post, *prefix_);
    const auto sh = shingle(body, ix_->shingle_n());
    if (sh.empty()) return std::nullopt;
    const auto sig = ix_->hasher()(sh);
    std::optional<Best> best;
    for (std::size_t pos : ix_->query_signature(sig)) {
      const double s = opts_.mode == ScoreMode::Exact ? exact_jaccard(sh, ix_->quote_shingles(pos))
                                                      : estimate_jaccard(sig, ix_->quote_signature(pos));
      if (!(s > opts_.threshold)) continue;
      if (!best || s > best->similarity ||
          (s == best->similarity && (*corpus_)[pos].id < (*corpus_)[best->pos].id)) {
        best = Best{pos, s};
      }
    }
    return best;
  }

  std::optional<MatchResult> match(std::string_view post_id, std::string_view post_text) const {
    const auto normalized = normalize_arabic(post_text);
    auto best = best_quote(normalized);
    if (!best) return std::nullopt;
    const auto& q = (*corpus_)[best->pos];
    MatchResult r;
    r.post_id = std::string(post_id);
    r.quote_id = q.id;
    r.quote_pos = best->pos;
    r.similarity = best->similarity;
    r.authenticity = q.authenticity;
    r.kind = classify_match(q.authenticity, contains_refute_term(normalized, *refute_));
    return r;
  }

  bool has_refute_term(std::string_view post_text) const { return contains_refute_term(post_text, *refute_); }

  const ReferenceCorpus& corpus() const noexcept { return *corpus_; }

 private:
  const LshIndex* ix_;
  const ReferenceCorpus* corpus_;
  const RefuteLexicon* refute_;
  const PrefixLexicon* prefix_;
  MatchOptions opts_;
};

inline std::optional<MatchResult> match_post(std::string_view post_text, const LshIndex& ix,
                                             const ReferenceCorpus& c, const RefuteLexicon& rl,
                                             double threshold = 0.35,
                                             const PrefixLexicon& pl = PrefixLexicon::defaults()) {
  MatchOptions opts;
  opts.threshold = threshold;
  return Matcher(ix, c, rl, pl, opts).match("", post_text);
}

}  // namespace quotematch
