#pragma once

// Multi-hot network-tie features. Every distinct (target account, tie kind)
// pair is one binary column; a user vector lists the columns they touch.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "quotematch/error.hpp"
#include "quotematch/hash.hpp"
#include "quotematch/io.hpp"

namespace quotematch {

enum class TieKind { Follow, RetweetAuthor, LikeAuthor };

inline std::string_view to_string(TieKind k) {
  switch (k) {
    case TieKind::Follow: return "follow";
    case TieKind::RetweetAuthor: return "retweet";
    case TieKind::LikeAuthor: return "like";
  }
  return "?";
}

inline std::optional<TieKind> parse_tie_kind(std::string_view s) {
  if (s == "follow") return TieKind::Follow;
  if (s == "retweet") return TieKind::RetweetAuthor;
  if (s == "like") return TieKind::LikeAuthor;
  return std::nullopt;
}

struct TieRecord {
  std::string user_id;
  std::string target_id;
  TieKind kind = TieKind::Follow;

  friend auto operator<=>(const TieRecord&, const TieRecord&) = default;
};

struct FeatureKey {
  std::string target_id;
  TieKind kind = TieKind::Follow;

  friend auto operator<=>(const FeatureKey&, const FeatureKey&) = default;
};

struct TieLoad {
  std::vector<TieRecord> ties;
  std::size_t self_ties = 0;
  std::size_t duplicates = 0;
};

// CSV `user_id,target_id,kind`. Self-ties and exact duplicates are dropped.
inline TieLoad parse_ties(std::string_view content) {
  const auto table = io::parse_csv(content);
  TieLoad out;
  if (table.header.empty()) return out;
  const auto cu = table.column("user_id"), ct = table.column("target_id"), ck = table.column("kind");
  std::set<TieRecord> seen;
  for (const auto& row : table.rows) {
    const auto kind = parse_tie_kind(row.fields[ck]);
    if (!kind) throw ValidationError("unknown tie kind '" + row.fields[ck] + "'", row.line);
    if (row.fields[cu].empty() || row.fields[ct].empty()) throw ParseError("empty user or target id", row.line);
    TieRecord t{row.fields[cu], row.fields[ct], *kind};
    if (t.user_id == t.target_id) {
      ++out.self_ties;
      continue;
    }
    if (!seen.insert(t).second) {
      ++out.duplicates;
      continue;
    }
    out.ties.push_back(std::move(t));
  }
  return out;
}

inline TieLoad load_ties(const std::filesystem::path& path) { return parse_ties(io::read_file(path)); }

inline std::string format_ties(const std::vector<TieRecord>& ties) {
  std::string out = "user_id,target_id,kind\n";
  for (const auto& t : ties) out += io::csv_line({t.user_id, t.target_id, std::string(to_string(t.kind))});
  return out;
}

struct FeatureVector {
  std::string user_id;
  std::vector<std::uint32_t> active;  // sorted, unique

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

class FeatureSpace;
struct PrunedFeatures;
inline FeatureSpace build_feature_space(const std::vector<TieRecord>& ties);
inline PrunedFeatures prune_features(const FeatureSpace&, const std::vector<FeatureVector>&, std::size_t);

class FeatureSpace {
 public:
  static constexpr int kManifestVersion = 1;

  FeatureSpace() = default;

  std::size_t n_columns() const noexcept { return keys_.size(); }
  const FeatureKey& key(std::size_t col) const { return keys_.at(col); }
  const std::vector<FeatureKey>& keys() const noexcept { return keys_; }
  std::size_t support(std::size_t col) const { return support_.at(col); }
  const std::vector<std::size_t>& supports() const noexcept { return support_; }

  std::optional<std::uint32_t> column_of(const FeatureKey& k) const {
    auto it = std::lower_bound(keys_.begin(), keys_.end(), k);
    if (it == keys_.end() || *it != k) return std::nullopt;
    return static_cast<std::uint32_t>(it - keys_.begin());
  }

  // Hash of the column mapping; binds models to the space they were fit on.
  std::uint64_t fingerprint() const {
    std::uint64_t h = fnv1a64("quotematch.features.v1");
    for (const auto& k : keys_) {
      h = hash_combine(h, fnv1a64(k.target_id));
      h = hash_combine(h, static_cast<std::uint64_t>(k.kind));
    }
    return h;
  }

  std::string fingerprint_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fingerprint()));
    return buf;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["format"] = "quotematch.features";
    j["version"] = kManifestVersion;
    j["hash"] = fingerprint_hex();
    j["n_columns"] = keys_.size();
    auto cols = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < keys_.size(); ++i) {
      nlohmann::ordered_json c;
      c["column"] = i;
      c["target_id"] = keys_[i].target_id;
      c["kind"] = to_string(keys_[i].kind);
      c["support"] = support_[i];
      cols.push_back(std::move(c));
    }
    j["columns"] = std::move(cols);
    return j;
  }

  static FeatureSpace from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "quotematch.features") throw ParseError("not a feature manifest");
    if (j.value("version", 0) != kManifestVersion) throw VersionMismatch("unsupported feature manifest version");
    FeatureSpace fs;
    for (const auto& c : j.at("columns")) {
      const auto kind = parse_tie_kind(c.at("kind").get<std::string>());
      if (!kind) throw ParseError("bad tie kind in manifest");
      fs.keys_.push_back({c.at("target_id").get<std::string>(), *kind});
      fs.support_.push_back(c.at("support").get<std::size_t>());
    }
    if (!std::is_sorted(fs.keys_.begin(), fs.keys_.end()) ||
        std::adjacent_find(fs.keys_.begin(), fs.keys_.end()) != fs.keys_.end())
      throw ParseError("feature manifest columns are not in canonical order");
    if (j.at("hash").get<std::string>() != fs.fingerprint_hex())
      throw VersionMismatch("feature manifest hash does not match its columns");
    return fs;
  }

 private:
  friend FeatureSpace build_feature_space(const std::vector<TieRecord>& ties);
  friend PrunedFeatures prune_features(const FeatureSpace&, const std::vector<FeatureVector>&, std::size_t);

  std::vector<FeatureKey> keys_;  // sorted by (target_id, kind)
  std::vector<std::size_t> support_;
};

// One column per distinct (target, kind); support counts distinct users.
inline FeatureSpace build_feature_space(const std::vector<TieRecord>& ties) {
  std::map<FeatureKey, std::set<std::string>> users;
  for (const auto& t : ties) {
    if (t.user_id == t.target_id) continue;
    users[{t.target_id, t.kind}].insert(t.user_id);
  }
  FeatureSpace fs;
  for (auto& [k, us] : users) {
    fs.keys_.push_back(k);
    fs.support_.push_back(us.size());
  }
  return fs;
}

struct EncodedUser {
  FeatureVector vector;
  std::size_t dropped = 0;  // ties whose (target, kind) is not in the space
};

// Encodes the ties belonging to `user_id`; ties of other users are ignored.
inline EncodedUser encode_user(std::string_view user_id, const std::vector<TieRecord>& ties, const FeatureSpace& fs) {
  EncodedUser e;
  e.vector.user_id = std::string(user_id);
  std::set<FeatureKey> missing;
  for (const auto& t : ties) {
    if (t.user_id != user_id || t.target_id == t.user_id) continue;
    FeatureKey k{t.target_id, t.kind};
    if (auto col = fs.column_of(k)) {
      e.vector.active.push_back(*col);
    } else {
      missing.insert(std::move(k));
    }
  }
  std::sort(e.vector.active.begin(), e.vector.active.end());
  e.vector.active.erase(std::unique(e.vector.active.begin(), e.vector.active.end()), e.vector.active.end());
  e.dropped = missing.size();
  return e;
}

// Encodes many users in one pass over the ties.
inline std::vector<EncodedUser> encode_users(const std::vector<std::string>& user_ids,
                                             const std::vector<TieRecord>& ties, const FeatureSpace& fs) {
  std::map<std::string, std::vector<TieRecord>> by_user;
  for (const auto& t : ties) by_user[t.user_id].push_back(t);
  std::vector<EncodedUser> out;
  out.reserve(user_ids.size());
  static const std::vector<TieRecord> kNone;
  for (const auto& u : user_ids) {
    auto it = by_user.find(u);
    out.push_back(encode_user(u, it == by_user.end() ? kNone : it->second, fs));
  }
  return out;
}

inline std::vector<FeatureKey> decode(const FeatureVector& v, const FeatureSpace& fs) {
  std::vector<FeatureKey> out;
  out.reserve(v.active.size());
  for (auto c : v.active) out.push_back(fs.key(c));
  return out;
}

// Dense 0/1 rows, for small spaces and debugging.
inline std::vector<std::vector<std::uint8_t>> to_dense(const std::vector<FeatureVector>& vs, std::size_t n_columns) {
  std::vector<std::vector<std::uint8_t>> out(vs.size(), std::vector<std::uint8_t>(n_columns, 0));
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (auto c : vs[i].active) out[i].at(c) = 1;
  return out;
}

struct PrunedFeatures {
  FeatureSpace space;
  std::vector<FeatureVector> vectors;
  std::vector<std::uint32_t> kept_columns;  // old column index of each new column
};

// Removes columns with support below `min_support`; surviving columns keep
// their relative order.
inline PrunedFeatures prune_features(const FeatureSpace& fs, const std::vector<FeatureVector>& vs,
                                     std::size_t min_support) {
  PrunedFeatures p;
  std::vector<std::int64_t> remap(fs.n_columns(), -1);
  for (std::size_t c = 0; c < fs.n_columns(); ++c) {
    if (fs.support(c) < min_support) continue;
    remap[c] = static_cast<std::int64_t>(p.kept_columns.size());
    p.kept_columns.push_back(static_cast<std::uint32_t>(c));
    p.space.keys_.push_back(fs.key(c));
    p.space.support_.push_back(fs.support(c));
  }
  p.vectors.reserve(vs.size());
  for (const auto& v : vs) {
    FeatureVector nv;
    nv.user_id = v.user_id;
    for (auto c : v.active)
      if (remap.at(c) >= 0) nv.active.push_back(static_cast<std::uint32_t>(remap[c]));
    p.vectors.push_back(std::move(nv));
  }
  return p;
}

}  // namespace quotematch
