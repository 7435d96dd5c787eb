#pragma once

// Per-user timeline scanning, circulator/debunker labeling and class
// balancing.

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "quotematch/error.hpp"
#include "quotematch/io.hpp"
#include "quotematch/matcher.hpp"
#include "quotematch/stats.hpp"

namespace quotematch {

struct Post {
  std::string id;
  std::string user_id;
  std::string text;
  bool is_retweet = false;
  std::string created_at;
  std::optional<std::string> parent_id;
};

inline Post post_from_json(const nlohmann::json& j, std::size_t line = 0) {
  if (!j.is_object()) throw ParseError("post must be a JSON object", line);
  auto str = [&](const char* key, bool required) -> std::string {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
      if (required) throw ParseError(std::string("post lacks field '") + key + "'", line);
      return {};
    }
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<long long>());
    throw ParseError(std::string("post field '") + key + "' must be a string", line);
  };
  Post p;
  p.id = str("id", true);
  p.user_id = str("user_id", true);
  p.text = str("text", false);
  p.created_at = str("created_at", false);
  if (auto it = j.find("is_retweet"); it != j.end() && !it->is_null()) {
    if (!it->is_boolean()) throw ParseError("post field 'is_retweet' must be a boolean", line);
    p.is_retweet = it->get<bool>();
  }
  if (auto parent = str("parent_id", false); !parent.empty()) p.parent_id = std::move(parent);
  return p;
}

inline nlohmann::ordered_json post_to_json(const Post& p) {
  nlohmann::ordered_json j;
  j["id"] = p.id;
  j["user_id"] = p.user_id;
  j["text"] = p.text;
  j["is_retweet"] = p.is_retweet;
  j["created_at"] = p.created_at;
  if (p.parent_id) j["parent_id"] = *p.parent_id;
  return j;
}

// Line-delimited JSON, one post per line. Blank lines are skipped.
inline std::vector<Post> parse_timeline(std::string_view content) {
  std::vector<Post> posts;
  const auto lines = io::split_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), i + 1);
    }
    posts.push_back(post_from_json(j, i + 1));
  }
  return posts;
}

inline std::vector<Post> load_timeline(const std::filesystem::path& path) { return parse_timeline(io::read_file(path)); }

struct UserStats {
  std::string user_id;
  std::size_t posts = 0;
  std::size_t retweets = 0;
  // Circulation + NonFabricatedShare matches.
  std::size_t total_hadith = 0;
  std::size_t fabricated = 0;
  std::size_t non_fabricated = 0;
  std::size_t refutes = 0;
  std::size_t unmatched = 0;

  double retweet_fraction() const {
    return posts == 0 ? 0.0 : static_cast<double>(retweets) / static_cast<double>(posts);
  }
};

// post id -> text of posts that replies may point at.
using ParentIndex = std::unordered_map<std::string, std::string>;

struct TimelineScan {
  UserStats stats;
  std::vector<MatchResult> matches;
};

// Runs every post through the matcher and aggregates counts. A reply that
// carries a refute term but matches nothing itself counts as a refute when
// its parent (looked up in `parents`) matches a fabricated quote.
inline TimelineScan scan_timeline(const std::vector<Post>& posts, const Matcher& m,
                                  const ParentIndex* parents = nullptr) {
  TimelineScan out;
  if (!posts.empty()) out.stats.user_id = posts.front().user_id;
  for (const auto& p : posts) {
    if (p.user_id != out.stats.user_id)
      throw ContractError("timeline mixes users '" + out.stats.user_id + "' and '" + p.user_id + "'");
  }
  auto& s = out.stats;
  for (const auto& p : posts) {
    ++s.posts;
    if (p.is_retweet) ++s.retweets;
    if (p.text.empty()) {
      ++s.unmatched;
      continue;
    }
    auto r = m.match(p.id, p.text);
    if (!r && parents && p.parent_id && m.has_refute_term(p.text)) {
      if (auto it = parents->find(*p.parent_id); it != parents->end()) {
        if (auto best = m.best_quote(normalize_arabic(it->second))) {
          const auto& q = m.corpus()[best->pos];
          if (q.fabricated()) {
            r = MatchResult{p.id, q.id, best->pos, best->similarity, q.authenticity, MatchKind::Refute};
          }
        }
      }
    }
    if (!r) {
      ++s.unmatched;
      continue;
    }
    switch (r->kind) {
      case MatchKind::Circulation:
        ++s.fabricated;
        ++s.total_hadith;
        break;
      case MatchKind::NonFabricatedShare:
        ++s.non_fabricated;
        ++s.total_hadith;
        break;
      case MatchKind::Refute:
        ++s.refutes;
        break;
    }
    out.matches.push_back(std::move(*r));
  }
  return out;
}

enum class BehaviorLabel { Circulator, Debunker, Neither };

inline std::string_view to_string(BehaviorLabel l) {
  switch (l) {
    case BehaviorLabel::Circulator: return "circulator";
    case BehaviorLabel::Debunker: return "debunker";
    case BehaviorLabel::Neither: return "neither";
  }
  return "?";
}

inline std::optional<BehaviorLabel> parse_label(std::string_view s) {
  if (s == "circulator") return BehaviorLabel::Circulator;
  if (s == "debunker") return BehaviorLabel::Debunker;
  if (s == "neither") return BehaviorLabel::Neither;
  return std::nullopt;
}

struct LabelThresholds {
  std::size_t min_fabricated = 2;
  double min_fabricated_fraction = 0.05;
  std::size_t min_refutes_strict = 3;
  std::size_t min_refutes_balance = 2;

  void validate() const {
    if (min_fabricated == 0 || !(min_fabricated_fraction > 0.0) || min_refutes_strict == 0 ||
        min_refutes_balance == 0)
      throw ParamError("label thresholds must be positive");
    if (min_refutes_balance > min_refutes_strict)
      throw ParamError("balance refute threshold exceeds the strict one");
  }
};

enum class LabelMode { Strict, Balance };

// Circulator: at least `min_fabricated` fabricated shares making up strictly
// more than `min_fabricated_fraction` of all hadith shares. Debunker: never
// shared a fabricated quote and refuted at least the mode's threshold.
inline BehaviorLabel label_user(const UserStats& s, const LabelThresholds& t, LabelMode mode = LabelMode::Strict) {
  if (s.fabricated > s.total_hadith)
    throw ContractError("user '" + s.user_id + "' has more fabricated shares than hadith shares");
  if (s.fabricated >= t.min_fabricated &&
      static_cast<double>(s.fabricated) / static_cast<double>(s.total_hadith) > t.min_fabricated_fraction)
    return BehaviorLabel::Circulator;
  const std::size_t need = mode == LabelMode::Strict ? t.min_refutes_strict : t.min_refutes_balance;
  if (s.fabricated == 0 && s.refutes >= need) return BehaviorLabel::Debunker;
  return BehaviorLabel::Neither;
}

struct LabeledUser {
  std::string user_id;
  BehaviorLabel label = BehaviorLabel::Neither;
  bool balance_fill = false;  // admitted under the relaxed debunker threshold
};

struct LabeledDataset {
  std::vector<LabeledUser> users;  // sorted by user_id
  std::size_t circulators = 0;
  std::size_t debunkers = 0;
  std::size_t strict_debunkers = 0;
  std::size_t balance_added = 0;
  std::vector<std::string> warnings;
};

// All circulators plus all strict debunkers. When debunkers are fewer, tops
// them up from users that only pass the balance threshold, most refutes
// first and then by user id, until the classes are equal or the pool runs out.
inline LabeledDataset build_labeled_dataset(const std::vector<UserStats>& all, const LabelThresholds& t,
                                            bool balance = true) {
  t.validate();
  std::set<std::string> seen;
  for (const auto& s : all)
    if (!seen.insert(s.user_id).second) throw ContractError("duplicate stats for user '" + s.user_id + "'");

  LabeledDataset d;
  std::vector<const UserStats*> pool;
  for (const auto& s : all) {
    const auto strict = label_user(s, t, LabelMode::Strict);
    if (strict == BehaviorLabel::Circulator) {
      d.users.push_back({s.user_id, strict, false});
      ++d.circulators;
    } else if (strict == BehaviorLabel::Debunker) {
      d.users.push_back({s.user_id, strict, false});
      ++d.strict_debunkers;
    } else if (label_user(s, t, LabelMode::Balance) == BehaviorLabel::Debunker) {
      pool.push_back(&s);
    }
  }
  d.debunkers = d.strict_debunkers;
  if (balance && d.debunkers < d.circulators) {
    std::sort(pool.begin(), pool.end(), [](const UserStats* a, const UserStats* b) {
      if (a->refutes != b->refutes) return a->refutes > b->refutes;
      return a->user_id < b->user_id;
    });
    for (const auto* s : pool) {
      if (d.debunkers >= d.circulators) break;
      d.users.push_back({s->user_id, BehaviorLabel::Debunker, true});
      ++d.debunkers;
      ++d.balance_added;
    }
    if (d.debunkers < d.circulators)
      d.warnings.push_back("balancing pool exhausted: " + std::to_string(d.circulators) + " circulators vs " +
                           std::to_string(d.debunkers) + " debunkers");
  }
  if (d.circulators == 0 && d.debunkers == 0) d.warnings.push_back("no circulators or debunkers found");
  std::sort(d.users.begin(), d.users.end(),
            [](const LabeledUser& a, const LabeledUser& b) { return a.user_id < b.user_id; });
  return d;
}

// Interaction counts behind the class comparison charts.
struct UserInteractions {
  std::string user_id;
  BehaviorLabel label = BehaviorLabel::Neither;
  double follows = 0;
  double retweets = 0;
  double likes = 0;
  double retweet_fraction = 0;
};

struct ClassSummary {
  BehaviorLabel label = BehaviorLabel::Neither;
  std::size_t users = 0;
  stats::Distribution follows;
  stats::Distribution retweets;
  stats::Distribution likes;
  double mean_retweet_fraction = 0.0;
};

// One summary per label present, in enum order.
inline std::vector<ClassSummary> interaction_summary(const std::vector<UserInteractions>& users) {
  std::map<BehaviorLabel, std::vector<const UserInteractions*>> by;
  for (const auto& u : users) by[u.label].push_back(&u);
  std::vector<ClassSummary> out;
  for (const auto& [label, members] : by) {
    ClassSummary cs;
    cs.label = label;
    cs.users = members.size();
    std::vector<double> f, r, l, rf;
    for (const auto* u : members) {
      f.push_back(u->follows);
      r.push_back(u->retweets);
      l.push_back(u->likes);
      rf.push_back(u->retweet_fraction);
    }
    cs.follows = stats::describe(f);
    cs.retweets = stats::describe(r);
    cs.likes = stats::describe(l);
    cs.mean_retweet_fraction = stats::mean(rf);
    out.push_back(std::move(cs));
  }
  return out;
}

}  // namespace quotematch
