// Acceptance run: one PASS/FAIL line per criterion, non-zero exit when any
// criterion fails. Tolerances are pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "quotematch/quotematch.hpp"

using namespace quotematch;
namespace fs = std::filesystem;

namespace {

constexpr double kThreshold = 0.35;
constexpr std::size_t kFixtures = 20;
constexpr double kFixtureSeconds = 10.0;
constexpr std::size_t kCalibrationPairs = 2000;
constexpr double kMeanAbsErrorMax = 0.125;             // 2 / sqrt(256)
constexpr double kSpreadMax = 1.2 * (1.0 / 16.0);     // 1 / sqrt(256), 20% slack
constexpr double kCalibrationSeconds = 30.0;
constexpr double kRecallHigh = 0.99;                   // pairs with J >= 0.5
constexpr double kRecallLow = 0.90;                    // pairs with J >= 0.35
constexpr double kCvAccuracyMin = 0.95;
constexpr std::size_t kPlantedInTop10Min = 8;
constexpr double kModelSeconds = 60.0;
constexpr double kGradientRelErr = 1e-5;
constexpr double kWelchTol = 1e-3;
constexpr std::size_t kFuzzStrings = 1000;

int failures = 0;

void verdict(const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << " :: " << detail << std::endl;
  if (!ok) ++failures;
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ReferenceQuote make_quote(const std::string& id, const std::string& text, AuthenticityLevel level) {
  ReferenceQuote q;
  q.id = id;
  q.raw_text = text;
  q.normalized_text = quote_key(text, PrefixLexicon::defaults());
  q.authenticity = level;
  q.source = "acceptance";
  return q;
}

// Arabic-letter words that never coincide with a lexicon token.
std::vector<std::string> make_words(std::mt19937_64& rng, std::size_t n) {
  static constexpr std::u32string_view kLetters = U"بتثجحخدذرزسشصضطظعغفقكلمنهوي";
  std::set<std::string> reserved;
  const auto refute = RefuteLexicon::defaults();
  const auto prefix = PrefixLexicon::defaults();
  for (const auto& p : refute.phrases())
    for (auto t : tokens(p)) reserved.emplace(t);
  for (const auto& p : prefix.patterns())
    for (auto t : tokens(p)) reserved.emplace(t);
  std::set<std::string> seen;
  std::vector<std::string> out;
  while (out.size() < n) {
    std::string w;
    const auto len = 3 + rng() % 4;
    for (std::size_t i = 0; i < len; ++i) utf8::append(w, kLetters[rng() % kLetters.size()]);
    if (reserved.count(w) || !seen.insert(w).second) continue;
    out.push_back(std::move(w));
  }
  return out;
}

std::string join(const std::vector<std::string>& ws) {
  std::string s;
  for (const auto& w : ws) s += (s.empty() ? "" : " ") + w;
  return s;
}

// ------------------------------------------------------------ fixtures

struct Fixture {
  ReferenceCorpus corpus;
  std::vector<std::string> posts;
};

Fixture make_fixture(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto words = make_words(rng, 1500);
  const auto pick = [&] { return words[rng() % words.size()]; };
  Fixture f;
  const std::size_t n_quotes = 200 + rng() % 301;
  std::vector<std::vector<std::string>> quote_words;
  for (std::size_t i = 0; f.corpus.size() < n_quotes; ++i) {
    std::vector<std::string> ws(6 + rng() % 15);
    for (auto& w : ws) w = pick();
    char id[16];
    std::snprintf(id, sizeof id, "Q%04zu", i);
    const auto level = rng() % 2 ? AuthenticityLevel::Fabricated : AuthenticityLevel::Authentic;
    if (f.corpus.add(make_quote(id, join(ws), level)) == ReferenceCorpus::AddOutcome::Added)
      quote_words.push_back(ws);
  }
  const std::size_t n_posts = 1000 + rng() % 1001;
  std::uniform_real_distribution<double> keep_dist(0.2, 1.0);
  for (std::size_t p = 0; p < n_posts; ++p) {
    std::vector<std::string> ws;
    const auto kind = rng() % 10;
    if (kind < 6) {
      // Perturbed quote: token drop rate and padding spread Jaccard over ~0.2..1.
      const auto& src = quote_words[rng() % quote_words.size()];
      const double keep = keep_dist(rng);
      for (const auto& w : src)
        if (std::uniform_real_distribution<double>(0, 1)(rng) < keep) ws.push_back(w);
      for (std::size_t e = rng() % 7; e > 0; --e) ws.insert(ws.begin() + rng() % (ws.size() + 1), pick());
    } else if (kind < 8) {
      // Halves of two different quotes.
      const auto& a = quote_words[rng() % quote_words.size()];
      const auto& b = quote_words[rng() % quote_words.size()];
      ws.assign(a.begin(), a.begin() + a.size() / 2);
      ws.insert(ws.end(), b.begin() + b.size() / 2, b.end());
    } else {
      for (std::size_t e = 3 + rng() % 15; e > 0; --e) ws.push_back(pick());
    }
    std::string text = join(ws);
    if (rng() % 5 == 0) text = "قال رسول الله صلى الله عليه وسلم: «" + text + "»";
    if (rng() % 7 == 0) text += " https://t.co/abc @someone";
    f.posts.push_back(std::move(text));
  }
  return f;
}

using TokenSet = std::set<std::string>;

TokenSet token_set(std::string_view normalized) {
  TokenSet s;
  for (auto t : tokens(normalized)) s.emplace(t);
  return s;
}

double set_jaccard(const TokenSet& a, const TokenSet& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.count(x);
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

struct OracleMatch {
  std::string quote_id;
  double similarity;
  bool operator==(const OracleMatch& o) const {
    return quote_id == o.quote_id && std::fabs(similarity - o.similarity) < 1e-12;
  }
};

struct BruteForce {
  std::vector<TokenSet> post_sets;
  std::map<std::size_t, OracleMatch> best;                     // post -> best match above threshold
  std::vector<std::pair<std::size_t, std::size_t>> pairs_035;  // (post, quote pos) with J >= 0.35
  std::vector<std::pair<std::size_t, std::size_t>> pairs_050;  // (post, quote pos) with J >= 0.5
};

BruteForce brute_force(const Fixture& f) {
  const auto pl = PrefixLexicon::defaults();
  BruteForce out;
  std::vector<TokenSet> quote_sets;
  for (const auto& q : f.corpus.quotes()) quote_sets.push_back(token_set(q.normalized_text));
  for (std::size_t p = 0; p < f.posts.size(); ++p) {
    const auto body = strip_quote_prefix(normalize_arabic(f.posts[p]), pl);
    out.post_sets.push_back(token_set(body.text));
    const auto& ps = out.post_sets.back();
    for (std::size_t q = 0; q < quote_sets.size(); ++q) {
      const double j = set_jaccard(ps, quote_sets[q]);
      if (j >= 0.35) out.pairs_035.push_back({p, q});
      if (j >= 0.5) out.pairs_050.push_back({p, q});
      if (!(j > kThreshold)) continue;
      auto it = out.best.find(p);
      const auto& id = f.corpus[q].id;
      if (it == out.best.end() || j > it->second.similarity ||
          (j == it->second.similarity && id < it->second.quote_id))
        out.best[p] = {id, j};
    }
  }
  return out;
}

// ------------------------------------------------------------ criteria

struct RecallTally {
  std::size_t hit_050 = 0, total_050 = 0, hit_035 = 0, total_035 = 0;
  void add(const Fixture& f, const BruteForce& bf, const LshIndex& ix) {
    const auto pl = PrefixLexicon::defaults();
    std::map<std::size_t, std::set<std::size_t>> cands;
    auto candidates = [&](std::size_t p) -> const std::set<std::size_t>& {
      auto it = cands.find(p);
      if (it != cands.end()) return it->second;
      const auto body = strip_quote_prefix(normalize_arabic(f.posts[p]), pl);
      const auto c = ix.query_candidates(shingle(body, 1));
      return cands[p] = std::set<std::size_t>(c.begin(), c.end());
    };
    for (auto [p, q] : bf.pairs_050) hit_050 += candidates(p).count(q);
    for (auto [p, q] : bf.pairs_035) hit_035 += candidates(p).count(q);
    total_050 += bf.pairs_050.size();
    total_035 += bf.pairs_035.size();
  }
  double recall_050() const { return total_050 ? double(hit_050) / double(total_050) : 1.0; }
  double recall_035() const { return total_035 ? double(hit_035) / double(total_035) : 1.0; }
};

void oracle_and_recall() {
  const auto refute = RefuteLexicon::defaults();
  const auto prefix = PrefixLexicon::defaults();
  MinHashParams paper_params;
  paper_params.bands = 32;
  paper_params.rows = 8;
  RecallTally at_32x8, at_default;
  std::size_t identical = 0, total_matches = 0;
  double slowest = 0.0;
  std::string first_diff;
  for (std::size_t i = 0; i < kFixtures; ++i) {
    const auto f = make_fixture(1000 + i);
    const auto t0 = std::chrono::steady_clock::now();
    const auto ix = build_index(f.corpus, {});
    const Matcher m(ix, f.corpus, refute, prefix);
    std::map<std::size_t, OracleMatch> got;
    for (std::size_t p = 0; p < f.posts.size(); ++p)
      if (auto r = m.match(std::to_string(p), f.posts[p])) got[p] = {r->quote_id, r->similarity};
    slowest = std::max(slowest, seconds_since(t0));
    const auto bf = brute_force(f);
    if (got == bf.best) {
      ++identical;
    } else if (first_diff.empty()) {
      first_diff = " first mismatch in fixture " + std::to_string(i);
    }
    total_matches += bf.best.size();
    at_default.add(f, bf, ix);
    at_32x8.add(f, bf, build_index(f.corpus, paper_params));
  }
  verdict("oracle-equivalence", identical == kFixtures && slowest < kFixtureSeconds,
          std::to_string(identical) + "/" + std::to_string(kFixtures) + " fixtures set-identical to brute force (" +
              std::to_string(total_matches) + " matches), slowest fixture " + fmt(slowest, 2) + " s < " +
              fmt(kFixtureSeconds, 0) + " s" + first_diff);
  verdict("lsh-recall-32x8", at_32x8.recall_050() >= kRecallHigh && at_32x8.recall_035() >= kRecallLow,
          "recall J>=0.5 " + fmt(at_32x8.recall_050()) + " (need " + fmt(kRecallHigh, 2) + ", " +
              std::to_string(at_32x8.total_050) + " pairs), J>=0.35 " + fmt(at_32x8.recall_035()) + " (need " +
              fmt(kRecallLow, 2) + ", " + std::to_string(at_32x8.total_035) + " pairs)");
  std::cout << "INFO lsh-recall-128x2 (shipped default) :: J>=0.5 " << fmt(at_default.recall_050()) << ", J>=0.35 "
            << fmt(at_default.recall_035()) << std::endl;
}

void minhash_calibration() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(77);
  const MinHashParams params;  // k = 256
  double abs_sum = 0.0, err_sum = 0.0, err_sq = 0.0;
  for (std::size_t i = 0; i < kCalibrationPairs; ++i) {
    // Shared core plus private parts; sizes drawn so Jaccard spans 0..1.
    const std::size_t shared = rng() % 120, only_a = rng() % 120, only_b = rng() % 120;
    if (shared + only_a == 0 || shared + only_b == 0) {
      --i;
      continue;
    }
    std::vector<std::string> a, b;
    const std::string tag = "p" + std::to_string(i) + "q";
    for (std::size_t k = 0; k < shared; ++k) a.push_back(tag + "s" + std::to_string(k)), b.push_back(a.back());
    for (std::size_t k = 0; k < only_a; ++k) a.push_back(tag + "a" + std::to_string(k));
    for (std::size_t k = 0; k < only_b; ++k) b.push_back(tag + "b" + std::to_string(k));
    const double exact = static_cast<double>(shared) / static_cast<double>(shared + only_a + only_b);
    const auto sa = shingle(normalize_arabic(join(a)), 1), sb = shingle(normalize_arabic(join(b)), 1);
    const double est = estimate_jaccard(minhash_signature(sa, params), minhash_signature(sb, params));
    const double err = est - exact;
    abs_sum += std::fabs(err);
    err_sum += err;
    err_sq += err * err;
  }
  const double n = static_cast<double>(kCalibrationPairs);
  const double mean_abs = abs_sum / n;
  const double sd = std::sqrt(std::max(0.0, err_sq / n - (err_sum / n) * (err_sum / n)));
  const double secs = seconds_since(t0);
  verdict("minhash-calibration", mean_abs <= kMeanAbsErrorMax && sd <= kSpreadMax && secs < kCalibrationSeconds,
          std::to_string(kCalibrationPairs) + " pairs, mean |err| " + fmt(mean_abs) + " <= " + fmt(kMeanAbsErrorMax) +
              ", sd " + fmt(sd) + " <= " + fmt(kSpreadMax) + ", " + fmt(secs, 2) + " s");
}

void refute_grid() {
  std::mt19937_64 rng(5);
  const auto words = make_words(rng, 400);
  ReferenceCorpus c;
  for (std::size_t i = 0; i < 20; ++i) {
    std::vector<std::string> ws(8 + i % 5);
    for (auto& w : ws) w = words[(i * 13 + (&w - ws.data()) * 7) % words.size()];
    c.add(make_quote("F" + std::to_string(100 + i), join(ws), AuthenticityLevel::Fabricated));
    for (auto& w : ws) w = words[rng() % words.size()];
    c.add(make_quote("A" + std::to_string(100 + i), join(ws), AuthenticityLevel::Authentic));
  }
  const auto ix = build_index(c, {});
  const auto refute = RefuteLexicon::defaults();
  const auto prefix = PrefixLexicon::defaults();
  const Matcher m(ix, c, refute, prefix);
  std::size_t cells = 0, refutes = 0, circulations = 0;
  std::size_t ti = 0;
  for (const auto& phrase : RefuteLexicon::default_phrases()) {
    std::vector<Post> timeline;
    for (std::size_t qi = 0; qi < 20; ++qi) {
      const auto& q = *c.find("F" + std::to_string(100 + qi));
      std::string text;
      switch ((ti + qi) % 4) {
        case 0: text = phrase + " " + q.raw_text; break;
        case 1: text = q.raw_text + " " + phrase; break;
        case 2: text = "تنبيه: «" + q.raw_text + "» (" + phrase + ")"; break;
        default: text = "#" + phrase + "\n" + q.raw_text + " !!"; break;
      }
      Post p;
      p.id = std::to_string(ti) + "_" + std::to_string(qi);
      p.user_id = "term" + std::to_string(ti);
      p.text = text;
      timeline.push_back(p);
    }
    const auto s = scan_timeline(timeline, m).stats;
    cells += timeline.size();
    refutes += s.refutes;
    circulations += s.fabricated;
    ++ti;
  }
  verdict("refute-rule", cells == 280 && refutes == cells && circulations == 0,
          std::to_string(refutes) + "/" + std::to_string(cells) + " grid posts counted as refutes, " +
              std::to_string(circulations) + " as circulations");
}

void labeling_grid() {
  const LabelThresholds t;
  std::size_t cells = 0, mismatches = 0;
  for (std::size_t f = 0; f <= 5; ++f)
    for (std::size_t total = 1; total <= 100; ++total)
      for (std::size_t r = 0; r <= 5; ++r) {
        UserStats s;
        s.user_id = "u";
        s.fabricated = f;
        s.total_hadith = total;
        s.refutes = r;
        for (auto mode : {LabelMode::Strict, LabelMode::Balance}) {
          ++cells;
          // Integer form of the rules: f / total > 0.05  <=>  20 f > total.
          std::string expect = "neither";
          if (f > total) expect = "error";
          else if (f >= 2 && 20 * f > total) expect = "circulator";
          else if (f == 0 && r >= (mode == LabelMode::Strict ? 3u : 2u)) expect = "debunker";
          std::string got;
          try {
            got = std::string(to_string(label_user(s, t, mode)));
          } catch (const ContractError&) {
            got = "error";
          }
          if (got != expect) ++mismatches;
        }
      }
  verdict("labeling-grid", mismatches == 0,
          std::to_string(cells - mismatches) + "/" + std::to_string(cells) + " cells agree (f 0..5, total 1..100, " +
              "refutes 0..5, strict and balance)");
}

void gradient_check() {
  std::mt19937_64 rng(31);
  double worst = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    Dataset d;
    d.n_columns = 2 + rng() % 12;
    const std::size_t n = 4 + rng() % 30;
    for (std::size_t i = 0; i < n; ++i) {
      SparseRow row;
      for (std::uint32_t c = 0; c < d.n_columns; ++c)
        if (rng() % 3 == 0) row.push_back(c);
      d.rows.push_back(row);
      d.labels.push_back(rng() % 2 ? 1 : -1);
    }
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<double> w(d.n_columns);
    for (auto& x : w) x = nd(rng);
    const double b = nd(rng);
    const double l2 = std::array<double, 3>{0.0, 0.5, 1.0}[rng() % 3];
    const auto g = logistic_gradient(d, w, b, l2);
    const double h = 1e-5;
    double diff = 0.0, norm = 0.0;
    for (std::size_t j = 0; j <= w.size(); ++j) {
      double fd;
      if (j < w.size()) {
        auto wp = w, wm = w;
        wp[j] += h;
        wm[j] -= h;
        fd = (logistic_loss(d, wp, b, l2) - logistic_loss(d, wm, b, l2)) / (2 * h);
      } else {
        fd = (logistic_loss(d, w, b + h, l2) - logistic_loss(d, w, b - h, l2)) / (2 * h);
      }
      diff += (g[j] - fd) * (g[j] - fd);
      norm += std::max(g[j] * g[j], fd * fd);
    }
    worst = std::max(worst, std::sqrt(diff) / std::max(std::sqrt(norm), 1e-12));
  }
  verdict("gradient-check", worst <= kGradientRelErr,
          "50 instances, worst relative error " + sci(worst) + " <= 1e-5");
}

void welch() {
  struct Case {
    std::vector<double> a, b;
    double t, df, p;
  };
  // Reference values computed independently (scipy.stats.ttest_ind, equal_var=False) and frozen.
  const std::vector<Case> cases = {
      {{1, 2, 3}, {1, 2, 3}, 0.0, 4.0, 1.0},
      {{1, 2, 3, 4, 5}, {2, 3, 4, 5, 6}, -1.0, 8.0, 0.346593507087},
      {{10.1, 9.8, 10.4, 10.0, 9.7, 10.3}, {11.2, 12.5, 10.9, 13.1, 11.8}, -4.391092135317, 4.607861060329,
       0.008549066370},
  };
  std::size_t ok_cases = 0;
  for (const auto& c : cases) {
    const auto w = stats::welch_t_test(c.a, c.b);
    if (std::fabs(w.t_statistic - c.t) <= kWelchTol && std::fabs(w.degrees_of_freedom - c.df) <= kWelchTol &&
        std::fabs(w.p_value - c.p) <= kWelchTol)
      ++ok_cases;
  }
  std::mt19937_64 rng(19);
  std::size_t antisym = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> a(2 + rng() % 30), b(2 + rng() % 30);
    for (auto& x : a) x = std::normal_distribution<>(0, 1)(rng);
    for (auto& x : b) x = std::normal_distribution<>(0.3, 3)(rng);
    const auto ab = stats::welch_t_test(a, b), ba = stats::welch_t_test(b, a);
    if (ab.t_statistic == -ba.t_statistic && ab.p_value == ba.p_value &&
        ab.degrees_of_freedom == ba.degrees_of_freedom)
      ++antisym;
  }
  verdict("welch", ok_cases == cases.size() && antisym == 100,
          std::to_string(ok_cases) + "/3 oracle cases within 1e-3, antisymmetry " + std::to_string(antisym) + "/100");
}

void normalization_fuzz() {
  std::mt19937_64 rng(1234);
  const std::vector<std::string> pieces = {
      "ا", "أ", "إ", "آ", "ٱ", "ة", "ى", "ئ", "ؤ", "ب", "ت", "ح", "ق", "ل", "م", "ن", "ه", "و", "ي",
      "ً", "ٌ", "ٍ", "َ", "ُ", "ِ", "ّ", "ْ", "ٰ", "ـ",
      "a", "Z", "hello", "World", "42", " ", "  ", "\t", "\n", ".", ",", "!", "؟", "،", "«", "»", ":", "#",
      "@user_1", "https://example.com/x?y=1", "😀", "🕌", "❤️", "​", "‏", "‫", "\xFF", "\xC3",
      "é", "ß", "中"};
  const auto is_diacritic = [](char32_t c) { return (c >= 0x064B && c <= 0x0652) || c == 0x0670 || c == 0x0640; };
  std::size_t idempotent = 0, clean = 0;
  for (std::size_t i = 0; i < kFuzzStrings; ++i) {
    std::string s;
    for (std::size_t k = 1 + rng() % 40; k > 0; --k) s += pieces[rng() % pieces.size()];
    const auto once = normalize_arabic(s);
    const auto twice = normalize_arabic(once.text);
    if (once.text == twice.text) ++idempotent;
    bool has = false;
    for (char32_t c : utf8::decode(once.text)) has = has || is_diacritic(c) || c == utf8::kInvalid;
    if (!has) ++clean;
  }
  verdict("normalization-fuzz", idempotent == kFuzzStrings && clean == kFuzzStrings,
          std::to_string(idempotent) + "/" + std::to_string(kFuzzStrings) + " idempotent, " + std::to_string(clean) +
              "/" + std::to_string(kFuzzStrings) + " free of diacritics and tatweel");
}

// ------------------------------------------------------------ synthetic replica

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("qm_acceptance_" + tag + "_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = io::read_file(e.path());
  return out;
}

void synthetic_replica() {
  TempDir tmp("replica");
  const SyntheticSpec spec;  // 559 users per class, 20 planted features per class, 5% label noise
  const auto data = generate_synthetic(spec);
  write_synthetic(data, tmp.path / "in");
  write_synthetic(generate_synthetic(spec), tmp.path / "in_again");

  pipeline::RunArgs args;
  args.input_dir = tmp.path / "in";
  std::ostringstream out, err;
  args.out_dir = tmp.path / "run1";
  const auto t0 = std::chrono::steady_clock::now();
  const int rc1 = pipeline::run_all(args, out, err);
  const double secs = seconds_since(t0);
  args.out_dir = tmp.path / "run2";
  const int rc2 = pipeline::run_all(args, out, err);
  if (rc1 != 0 || rc2 != 0) {
    std::cerr << err.str();
    verdict("synthetic-replica", false, "pipeline exited with " + std::to_string(rc1));
    verdict("model-recovery", false, "pipeline exited with " + std::to_string(rc1));
    verdict("determinism", false, "pipeline exited with " + std::to_string(rc1) + "/" + std::to_string(rc2));
    return;
  }
  const auto run = tmp.path / "run1";

  // Replica: labeled users and the metrics table.
  std::size_t labeled = 0, circ = 0;
  for (const auto& row : io::parse_csv(io::read_file(run / "labels.csv")).rows) {
    ++labeled;
    circ += row.fields[1] == "circulator";
  }
  const auto metrics = io::read_file(run / "metrics.csv");
  const auto mt = io::parse_csv(metrics);
  std::cout << "---- metrics.csv (stratified 90/10 CV, mean of 10 repeats) ----\n" << metrics << "----" << std::endl;
  verdict("synthetic-replica",
          labeled == 2 * spec.users_per_class && circ == spec.users_per_class && mt.rows.size() == 3 &&
              mt.header == std::vector<std::string>{"class", "precision", "recall", "f1", "accuracy", "users"},
          std::to_string(labeled) + " labeled users (" + std::to_string(circ) + " circulators), metrics table with " +
              std::to_string(mt.rows.size()) + " rows");

  // Model recovery.
  const double accuracy = std::stod(mt.rows.back().fields[4]);
  std::set<std::string> planted_pos, planted_neg;
  for (const auto& k : data.planted_circulator) planted_pos.insert(k.target_id + "/" + std::string(to_string(k.kind)));
  for (const auto& k : data.planted_debunker) planted_neg.insert(k.target_id + "/" + std::string(to_string(k.kind)));
  std::size_t pos_hits = 0, neg_hits = 0;
  for (const auto& row : io::parse_csv(io::read_file(run / "coefficients.csv")).rows) {
    if (std::stoul(row.fields[1]) > 10) continue;
    const auto key = row.fields[2] + "/" + row.fields[3];
    if (row.fields[0] == "circulator") pos_hits += planted_pos.count(key);
    if (row.fields[0] == "debunker") neg_hits += planted_neg.count(key);
  }
  verdict("model-recovery",
          accuracy >= kCvAccuracyMin && pos_hits >= kPlantedInTop10Min && neg_hits >= kPlantedInTop10Min &&
              secs < kModelSeconds,
          "CV accuracy " + fmt(accuracy) + " >= " + fmt(kCvAccuracyMin, 2) + ", planted in top-10 " +
              std::to_string(pos_hits) + "/10 circulator and " + std::to_string(neg_hits) + "/10 debunker (need " +
              std::to_string(kPlantedInTop10Min) + "), pipeline " + fmt(secs, 2) + " s < " + fmt(kModelSeconds, 0) +
              " s");

  // Determinism: generator output and both runs byte-identical.
  const auto a = read_tree(run), b = read_tree(tmp.path / "run2");
  const bool inputs_same = read_tree(tmp.path / "in") == read_tree(tmp.path / "in_again");
  std::string differing;
  for (const auto& [name, content] : a) {
    auto it = b.find(name);
    if (it == b.end() || it->second != content) differing += " " + name;
  }
  verdict("determinism", inputs_same && a.size() == b.size() && differing.empty(),
          std::to_string(a.size()) + " artifacts compared, synthetic inputs " +
              (inputs_same ? "identical" : "differ") + (differing.empty() ? "" : ", differing:" + differing));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::pair<const char*, void (*)()>> steps = {
      {"synthetic-replica/model-recovery/determinism", synthetic_replica},
      {"oracle-equivalence/lsh-recall-32x8", oracle_and_recall},
      {"minhash-calibration", minhash_calibration},
      {"refute-rule", refute_grid},
      {"labeling-grid", labeling_grid},
      {"gradient-check", gradient_check},
      {"welch", welch},
      {"normalization-fuzz", normalization_fuzz},
  };
  for (const auto& [name, fn] : steps) {
    try {
      fn();
    } catch (const std::exception& e) {
      verdict(name, false, std::string("exception: ") + e.what());
    }
  }
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << " (" << fmt(seconds_since(t0), 1)
            << " s)" << std::endl;
  return failures == 0 ? 0 : 1;
}
