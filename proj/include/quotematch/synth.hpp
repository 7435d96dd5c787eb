#pragma once

// Seeded synthetic study data: a reference corpus, per-user timelines with
// planted circulation/refute behavior, network ties with planted
// class-exclusive accounts, ground-truth labels and a category map.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "quotematch/behavior.hpp"
#include "quotematch/corpus.hpp"
#include "quotematch/features.hpp"
#include "quotematch/hash.hpp"
#include "quotematch/io.hpp"
#include "quotematch/matcher.hpp"

namespace quotematch {

struct SyntheticSpec {
  std::size_t users_per_class = 559;
  // Debunkers with exactly two refutes; they only enter through balancing.
  std::size_t two_refute_debunkers = 216;
  std::size_t neither_users = 60;
  std::size_t planted_per_class = 20;
  double planted_tie_prob = 0.3;
  std::size_t background_accounts = 1500;
  std::size_t background_ties_per_user = 15;
  std::size_t timeline_length = 40;
  std::size_t fabricated_quotes = 60;
  std::size_t other_quotes = 60;
  // Probability that a shared quote is perturbed (diacritics, intro phrase,
  // hashtag, dropped token or extra commentary).
  double text_noise = 0.3;
  // With this probability a user's network class is redrawn uniformly.
  double label_noise = 0.05;
  double circulator_retweet_rate = 0.758;
  double debunker_retweet_rate = 0.279;
  double neither_retweet_rate = 0.5;
  std::uint64_t seed = 7;

  void validate() const {
    if (users_per_class == 0 || planted_per_class == 0 || timeline_length < 40 || fabricated_quotes == 0 ||
        other_quotes == 0 || background_accounts == 0)
      throw ParamError("synthetic spec sizes must be positive (timeline_length >= 40)");
    if (two_refute_debunkers > users_per_class) throw ParamError("two_refute_debunkers exceeds users_per_class");
    for (double p : {planted_tie_prob, text_noise, label_noise, circulator_retweet_rate, debunker_retweet_rate,
                     neither_retweet_rate})
      if (!(p >= 0.0 && p <= 1.0)) throw ParamError("synthetic probabilities must be in [0, 1]");
  }
};

struct SyntheticUser {
  std::string user_id;
  BehaviorLabel label = BehaviorLabel::Neither;
  BehaviorLabel network_class = BehaviorLabel::Neither;
};

struct SyntheticData {
  ReferenceCorpus corpus;
  std::vector<SyntheticUser> users;  // sorted by user_id
  std::map<std::string, std::vector<Post>> timelines;
  std::vector<TieRecord> ties;
  std::vector<FeatureKey> planted_circulator;
  std::vector<FeatureKey> planted_debunker;
  std::vector<std::pair<std::string, std::string>> categories;
};

namespace synth_detail {

class Vocabulary {
 public:
  Vocabulary(Rng& rng, std::size_t n, std::u32string_view first_letters) {
    static constexpr std::u32string_view kLetters = U"بتثجحخدذرزسشصضطظعغفقكلمنهوي";
    std::set<std::string> reserved;
    const auto refute = RefuteLexicon::defaults();
    const auto prefix = PrefixLexicon::defaults();
    for (const auto& p : refute.phrases())
      for (auto t : tokens(p)) reserved.emplace(t);
    for (const auto& p : prefix.patterns())
      for (auto t : tokens(p)) reserved.emplace(t);
    std::set<std::string> seen;
    while (words_.size() < n) {
      std::string w;
      utf8::append(w, first_letters[rng.below(first_letters.size())]);
      const auto len = rng.between(4, 6);
      for (std::int64_t i = 0; i < len; ++i) utf8::append(w, kLetters[rng.below(kLetters.size())]);
      if (reserved.count(w) || !seen.insert(w).second) continue;
      words_.push_back(std::move(w));
    }
  }
  const std::string& pick(Rng& rng) const { return words_[rng.below(words_.size())]; }

 private:
  std::vector<std::string> words_;
};

inline std::string add_diacritics(Rng& rng, const std::string& text) {
  static constexpr char32_t kMarks[] = {0x064E, 0x064F, 0x0650, 0x0651, 0x0652};
  std::string out;
  for (char32_t c : utf8::decode(text)) {
    utf8::append(out, c);
    if (c >= 0x0621 && c <= 0x064A && rng.bernoulli(0.3)) utf8::append(out, kMarks[rng.below(5)]);
  }
  return out;
}

inline std::string timestamp(std::size_t minutes) {
  char buf[32];
  const std::size_t day = 1 + (minutes / 1440) % 28, hour = (minutes / 60) % 24, minute = minutes % 60;
  std::snprintf(buf, sizeof buf, "2023-03-%02zuT%02zu:%02zu:00Z", day, hour, minute);
  return buf;
}

}  // namespace synth_detail

inline SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  using namespace synth_detail;
  spec.validate();
  Rng rng(spec.seed);
  SyntheticData data;

  // Quote words and filler words start with disjoint letters, so filler
  // posts never resemble a quote.
  const Vocabulary quote_vocab(rng, 3000, U"بتثجحخدذرزسش");
  const Vocabulary filler_vocab(rng, 3000, U"صضطظعغفقكلمن");

  std::vector<std::size_t> fabricated_pos, other_pos;
  const std::size_t n_quotes = spec.fabricated_quotes + spec.other_quotes;
  const auto prefix = PrefixLexicon::defaults();
  for (std::size_t i = 0; data.corpus.size() < n_quotes; ++i) {
    const bool fab = data.corpus.size() < spec.fabricated_quotes;
    std::string text;
    const auto len = rng.between(8, 16);
    for (std::int64_t k = 0; k < len; ++k) {
      if (k) text.push_back(' ');
      text += quote_vocab.pick(rng);
    }
    ReferenceQuote q;
    char id[32];
    std::snprintf(id, sizeof id, "%s%04zu", fab ? "F" : "A", data.corpus.size());
    q.id = id;
    q.raw_text = text;
    q.normalized_text = quote_key(text, prefix);
    if (fab) {
      q.authenticity = AuthenticityLevel::Fabricated;
    } else {
      static constexpr AuthenticityLevel kOthers[] = {AuthenticityLevel::Authentic, AuthenticityLevel::Good,
                                                      AuthenticityLevel::Weak};
      q.authenticity = kOthers[rng.below(3)];
    }
    q.source = fab ? "synthetic-fabricated" : "synthetic-reference";
    if (data.corpus.find_text(q.normalized_text)) continue;
    (fab ? fabricated_pos : other_pos).push_back(data.corpus.size());
    data.corpus.add(std::move(q));
  }

  const auto& refute_phrases = RefuteLexicon::default_phrases();
  static const std::vector<std::string> kIntros = {"قال رسول الله صلى الله عليه وسلم", "قال النبي ﷺ",
                                                   "سمعت رسول الله صلى الله عليه وسلم يقول"};

  auto share_text = [&](std::size_t pos) {
    std::string text = data.corpus[pos].raw_text;
    if (!rng.bernoulli(spec.text_noise)) return text;
    switch (rng.below(5)) {
      case 0: return add_diacritics(rng, text);
      case 1: return kIntros[rng.below(kIntros.size())] + ": " + text;
      case 2: {
        auto toks = tokens(text);
        std::string out;
        const auto drop = rng.below(toks.size());
        for (std::size_t i = 0; i < toks.size(); ++i) {
          if (i == drop) continue;
          if (!out.empty()) out.push_back(' ');
          out.append(toks[i]);
        }
        return out;
      }
      case 3: return "«" + text + "» " + filler_vocab.pick(rng) + " " + filler_vocab.pick(rng);
      default: {
        std::string tag = text;
        std::replace(tag.begin(), tag.end(), ' ', '_');
        return "#" + tag;
      }
    }
  };
  auto filler_text = [&] {
    std::string text;
    const auto len = rng.between(5, 15);
    for (std::int64_t k = 0; k < len; ++k) {
      if (k) text.push_back(' ');
      text += filler_vocab.pick(rng);
    }
    switch (rng.below(6)) {
      case 0: text += " https://t.co/x" + std::to_string(rng.below(100000)); break;
      case 1: text = "@user" + std::to_string(rng.below(1000)) + " " + text; break;
      case 2: text += " \xF0\x9F\x98\x82"; break;
      default: break;
    }
    return text;
  };
  auto refute_text = [&](std::size_t pos) {
    const auto& phrase = refute_phrases[rng.below(refute_phrases.size())];
    return rng.bernoulli(0.5) ? phrase + " " + share_text(pos) : share_text(pos) + " " + phrase;
  };

  // Behaviour plans, one per user, before ids are assigned.
  enum class Plan { Circulator, Debunker, TwoRefuteDebunker, NeitherSingleFab, NeitherBoundary, NeitherOneRefute };
  std::vector<Plan> plans;
  for (std::size_t i = 0; i < spec.users_per_class; ++i) plans.push_back(Plan::Circulator);
  for (std::size_t i = 0; i < spec.users_per_class; ++i)
    plans.push_back(i < spec.two_refute_debunkers ? Plan::TwoRefuteDebunker : Plan::Debunker);
  for (std::size_t i = 0; i < spec.neither_users; ++i)
    plans.push_back(i % 3 == 0 ? Plan::NeitherSingleFab : i % 3 == 1 ? Plan::NeitherBoundary : Plan::NeitherOneRefute);
  rng.shuffle(plans);

  std::vector<FeatureKey> planted[2];
  static constexpr TieKind kKinds[] = {TieKind::Follow, TieKind::RetweetAuthor, TieKind::LikeAuthor};
  for (std::size_t i = 0; i < spec.planted_per_class; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "circ_src_%02zu", i);
    planted[0].push_back({buf, kKinds[i % 3]});
    std::snprintf(buf, sizeof buf, "deb_src_%02zu", i);
    planted[1].push_back({buf, kKinds[i % 3]});
  }
  data.planted_circulator = planted[0];
  data.planted_debunker = planted[1];

  for (std::size_t u = 0; u < plans.size(); ++u) {
    char uid[32];
    std::snprintf(uid, sizeof uid, "u%05zu", u + 1);
    const Plan plan = plans[u];
    SyntheticUser su;
    su.user_id = uid;
    std::size_t fab = 0, other = 0, refutes = 0;
    double rt_rate = spec.neither_retweet_rate;
    switch (plan) {
      case Plan::Circulator:
        su.label = BehaviorLabel::Circulator;
        fab = rng.between(2, 6);
        other = rng.between(0, 10);
        rt_rate = spec.circulator_retweet_rate;
        break;
      case Plan::Debunker:
        su.label = BehaviorLabel::Debunker;
        refutes = rng.between(3, 5);
        other = rng.between(0, 10);
        rt_rate = spec.debunker_retweet_rate;
        break;
      case Plan::TwoRefuteDebunker:
        su.label = BehaviorLabel::Debunker;
        refutes = 2;
        other = rng.between(0, 10);
        rt_rate = spec.debunker_retweet_rate;
        break;
      case Plan::NeitherSingleFab:
        fab = 1;
        other = rng.between(1, 10);
        break;
      case Plan::NeitherBoundary:
        // Exactly 5% fabricated: not strictly above the threshold.
        fab = 2;
        other = 38;
        break;
      case Plan::NeitherOneRefute:
        refutes = 1;
        other = rng.between(0, 10);
        break;
    }

    std::vector<std::string> texts;
    for (std::size_t i = 0; i < fab; ++i) texts.push_back(share_text(fabricated_pos[rng.below(fabricated_pos.size())]));
    for (std::size_t i = 0; i < other; ++i) texts.push_back(share_text(other_pos[rng.below(other_pos.size())]));
    for (std::size_t i = 0; i < refutes; ++i)
      texts.push_back(refute_text(fabricated_pos[rng.below(fabricated_pos.size())]));
    while (texts.size() < spec.timeline_length) texts.push_back(filler_text());
    rng.shuffle(texts);

    auto& timeline = data.timelines[su.user_id];
    for (std::size_t i = 0; i < texts.size(); ++i) {
      Post p;
      p.id = su.user_id + "-" + std::to_string(i + 1);
      p.user_id = su.user_id;
      p.text = std::move(texts[i]);
      p.is_retweet = rng.bernoulli(rt_rate);
      p.created_at = timestamp(u * 97 + i * 13);
      timeline.push_back(std::move(p));
    }

    // Network ties.
    su.network_class = su.label;
    if (su.label != BehaviorLabel::Neither && rng.bernoulli(spec.label_noise))
      su.network_class = rng.bernoulli(0.5) ? BehaviorLabel::Circulator : BehaviorLabel::Debunker;
    if (su.network_class != BehaviorLabel::Neither) {
      const auto& mine = planted[su.network_class == BehaviorLabel::Circulator ? 0 : 1];
      std::vector<const FeatureKey*> chosen;
      for (const auto& k : mine)
        if (rng.bernoulli(spec.planted_tie_prob)) chosen.push_back(&k);
      if (chosen.empty()) chosen.push_back(&mine[rng.below(mine.size())]);
      for (const auto* k : chosen) data.ties.push_back({su.user_id, k->target_id, k->kind});
    }
    for (std::size_t i = 0; i < spec.background_ties_per_user; ++i) {
      const double x = rng.uniform();
      const auto acct = static_cast<std::size_t>(x * x * static_cast<double>(spec.background_accounts));
      char buf[32];
      std::snprintf(buf, sizeof buf, "acct_%04zu", acct);
      data.ties.push_back({su.user_id, buf, kKinds[rng.below(3)]});
    }
    data.users.push_back(std::move(su));
  }

  std::sort(data.ties.begin(), data.ties.end());
  data.ties.erase(std::unique(data.ties.begin(), data.ties.end()), data.ties.end());

  for (const auto& k : planted[0]) data.categories.emplace_back(k.target_id, "Shia Pages/Scholars");
  for (const auto& k : planted[1]) data.categories.emplace_back(k.target_id, "Sunni Scholars");
  static const char* kBackground[] = {"Sunni Pages", "Non-religious", "Personal"};
  for (std::size_t a = 0; a < std::min<std::size_t>(100, spec.background_accounts); ++a) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "acct_%04zu", a);
    data.categories.emplace_back(buf, kBackground[a % 3]);
  }
  std::sort(data.categories.begin(), data.categories.end());
  data.categories.erase(std::unique(data.categories.begin(), data.categories.end()), data.categories.end());
  return data;
}

// Writes corpus.tsv, timelines/<user>.jsonl, ties.csv, truth.csv and
// categories.csv under `dir`.
inline void write_synthetic(const SyntheticData& d, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "timelines");
  io::write_file(dir / "corpus.tsv", format_corpus(d.corpus));
  for (const auto& [uid, posts] : d.timelines) {
    std::string out;
    for (const auto& p : posts) out += post_to_json(p).dump() + "\n";
    io::write_file(dir / "timelines" / (uid + ".jsonl"), out);
  }
  io::write_file(dir / "ties.csv", format_ties(d.ties));
  std::string truth = "user_id,label,network_class\n";
  for (const auto& u : d.users)
    truth += io::csv_line({u.user_id, std::string(to_string(u.label)), std::string(to_string(u.network_class))});
  io::write_file(dir / "truth.csv", truth);
  std::string cats = "target_id,category\n";
  for (const auto& [t, c] : d.categories) cats += io::csv_line({t, c});
  io::write_file(dir / "categories.csv", cats);
}

}  // namespace quotematch
