#pragma once

// Coefficient ranking and category breakdown of the strongest predictors.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "quotematch/error.hpp"
#include "quotematch/features.hpp"
#include "quotematch/io.hpp"
#include "quotematch/logit.hpp"

namespace quotematch {

struct Coefficient {
  std::uint32_t column = 0;
  FeatureKey feature;
  double weight = 0.0;
};

// Positive weights point to circulators, negative ones to debunkers.
struct CoefficientReport {
  std::vector<Coefficient> top_positive;
  std::vector<Coefficient> top_negative;
};

inline CoefficientReport top_coefficients(const LogitModel& m, const FeatureSpace& fs, std::size_t k = 100) {
  if (m.weights.size() != fs.n_columns()) throw ParamError("model and feature space disagree on column count");
  if (k > fs.n_columns())
    throw ContractError("requested top " + std::to_string(k) + " of only " + std::to_string(fs.n_columns()) +
                        " columns");
  CoefficientReport r;
  std::vector<std::uint32_t> pos, neg;
  for (std::uint32_t c = 0; c < m.weights.size(); ++c) {
    if (m.weights[c] > 0) pos.push_back(c);
    if (m.weights[c] < 0) neg.push_back(c);
  }
  auto by_magnitude = [&](std::uint32_t a, std::uint32_t b) {
    const double wa = std::abs(m.weights[a]), wb = std::abs(m.weights[b]);
    return wa != wb ? wa > wb : a < b;
  };
  std::sort(pos.begin(), pos.end(), by_magnitude);
  std::sort(neg.begin(), neg.end(), by_magnitude);
  for (std::size_t i = 0; i < std::min(k, pos.size()); ++i) r.top_positive.push_back({pos[i], fs.key(pos[i]), m.weights[pos[i]]});
  for (std::size_t i = 0; i < std::min(k, neg.size()); ++i) r.top_negative.push_back({neg[i], fs.key(neg[i]), m.weights[neg[i]]});
  return r;
}

inline constexpr const char* kUnlabeled = "Unlabeled";

// target_id -> category. When a label set is declared, every mapping must
// use one of its labels.
class CategoryMap {
 public:
  CategoryMap() = default;
  explicit CategoryMap(std::set<std::string> declared) : declared_(std::move(declared)) {}

  void set(const std::string& target, const std::string& category, std::size_t line = 0) {
    if (!declared_.empty() && !declared_.count(category))
      throw ValidationError("category '" + category + "' is not in the declared label set", line);
    map_[target] = category;
  }

  const std::string& category_of(const std::string& target) const {
    static const std::string kNone = kUnlabeled;
    auto it = map_.find(target);
    return it == map_.end() ? kNone : it->second;
  }

  std::size_t size() const noexcept { return map_.size(); }

  // CSV `target_id,category`.
  static CategoryMap parse(std::string_view content, std::set<std::string> declared = {}) {
    CategoryMap cm(std::move(declared));
    const auto t = io::parse_csv(content);
    if (t.header.empty()) return cm;
    const auto ct = t.column("target_id"), cc = t.column("category");
    for (const auto& row : t.rows) cm.set(row.fields[ct], row.fields[cc], row.line);
    return cm;
  }
  static CategoryMap load(const std::filesystem::path& path, std::set<std::string> declared = {}) {
    return parse(io::read_file(path), std::move(declared));
  }

 private:
  std::set<std::string> declared_;
  std::map<std::string, std::string> map_;
};

struct CategoryCounts {
  std::map<std::string, std::size_t> positive;
  std::map<std::string, std::size_t> negative;
};

inline CategoryCounts categorize_report(const CoefficientReport& r, const CategoryMap& cm) {
  CategoryCounts out;
  for (const auto& c : r.top_positive) ++out.positive[cm.category_of(c.feature.target_id)];
  for (const auto& c : r.top_negative) ++out.negative[cm.category_of(c.feature.target_id)];
  return out;
}

}  // namespace quotematch
