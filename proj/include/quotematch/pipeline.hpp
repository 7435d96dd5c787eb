#pragma once

// File-level pipeline stages behind the `quotematch` command line tool.
// Each stage reads its inputs from disk, writes its artifacts and returns a
// process exit code:
//   0 ok, 2 missing input, 3 version mismatch, 4 contract violation.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "quotematch/behavior.hpp"
#include "quotematch/corpus.hpp"
#include "quotematch/error.hpp"
#include "quotematch/features.hpp"
#include "quotematch/io.hpp"
#include "quotematch/logit.hpp"
#include "quotematch/lsh_index.hpp"
#include "quotematch/matcher.hpp"
#include "quotematch/report.hpp"
#include "quotematch/stats.hpp"
#include "quotematch/synth.hpp"

namespace quotematch::pipeline {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kMissingInput = 2, kVersionMismatch = 3, kContractViolation = 4 };

// Runs `body`, mapping library errors onto exit codes and reporting them on `err`.
inline int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const MissingInput& e) {
    err << "error: " << e.what() << "\n";
    return kMissingInput;
  } catch (const VersionMismatch& e) {
    err << "error: " << e.what() << "\n";
    return kVersionMismatch;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kContractViolation;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed JSON artifact: " << e.what() << "\n";
    return kContractViolation;
  }
}

inline void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw MissingInput("no such file: " + p.string());
}

inline PrefixLexicon prefix_lexicon_from(const std::optional<fs::path>& p) {
  if (!p) return PrefixLexicon::defaults();
  require_file(*p);
  return PrefixLexicon::load(p->string());
}

inline RefuteLexicon refute_lexicon_from(const std::optional<fs::path>& p) {
  if (!p) return RefuteLexicon::defaults();
  require_file(*p);
  return RefuteLexicon::load(p->string());
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// ---------------------------------------------------------------- corpus

struct CorpusBuildArgs {
  std::vector<fs::path> inputs;  // merged left to right, earlier files win
  std::optional<fs::path> exclude;
  std::optional<fs::path> prefix_lexicon;
  fs::path out;
  fs::path report;
};

inline int corpus_build(const CorpusBuildArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (a.inputs.empty()) throw ContractError("corpus build needs at least one input");
    for (const auto& p : a.inputs) require_file(p);
    if (a.exclude) require_file(*a.exclude);
    const auto lex = prefix_lexicon_from(a.prefix_lexicon);
    nlohmann::ordered_json rep;
    rep["inputs"] = nlohmann::ordered_json::array();
    ReferenceCorpus corpus;
    std::size_t collapsed = 0, collisions = 0;
    for (const auto& p : a.inputs) {
      auto loaded = load_corpus(p, lex);
      collapsed += loaded.collapsed.size();
      nlohmann::ordered_json in;
      in["path"] = p.filename().string();
      in["quotes"] = loaded.corpus.size();
      in["collapsed"] = loaded.collapsed.size();
      auto merged = merge_corpora(corpus, loaded.corpus);
      in["collisions"] = merged.collisions.size();
      in["renamed"] = merged.renamed.size();
      collisions += merged.collisions.size();
      corpus = std::move(merged.corpus);
      rep["inputs"].push_back(std::move(in));
    }
    if (a.exclude) {
      auto f = filter_corpus(corpus, load_exclusion_list(*a.exclude));
      rep["excluded"] = f.removed;
      rep["unknown_exclusions"] = f.unknown_ids;
      for (const auto& id : f.unknown_ids) err << "warning: exclusion id not in corpus: " << id << "\n";
      corpus = std::move(f.corpus);
    }
    rep["size"] = corpus.size();
    rep["collapsed"] = collapsed;
    rep["collisions"] = collisions;
    rep["fingerprint"] = hex64(corpus.fingerprint());
    io::write_file(a.out, format_corpus(corpus));
    io::write_file(a.report, rep.dump(2) + "\n");
    out << corpus.size() << " quotes, " << collapsed << " collapsed, " << collisions << " collision"
        << (collisions == 1 ? "" : "s") << "\n";
    return kOk;
  });
}

struct CorpusMergeArgs {
  fs::path a, b;
  std::optional<fs::path> prefix_lexicon;
  fs::path out;
  fs::path report;
};

inline int corpus_merge(const CorpusMergeArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_file(a.a);
    require_file(a.b);
    const auto lex = prefix_lexicon_from(a.prefix_lexicon);
    const auto ca = load_corpus(a.a, lex), cb = load_corpus(a.b, lex);
    const auto m = merge_corpora(ca.corpus, cb.corpus);
    nlohmann::ordered_json rep;
    rep["a"] = ca.corpus.size();
    rep["b"] = cb.corpus.size();
    rep["size"] = m.corpus.size();
    rep["collisions"] = m.collisions.size();
    auto cl = nlohmann::ordered_json::array();
    for (const auto& c : m.collisions) cl.push_back({{"dropped", c.dropped_id}, {"kept", c.kept_id}});
    rep["collision_pairs"] = std::move(cl);
    auto rn = nlohmann::ordered_json::array();
    for (const auto& [from, to] : m.renamed) rn.push_back({{"from", from}, {"to", to}});
    rep["renamed"] = std::move(rn);
    rep["provenance"] = m.corpus.provenance();
    rep["fingerprint"] = hex64(m.corpus.fingerprint());
    io::write_file(a.out, format_corpus(m.corpus));
    io::write_file(a.report, rep.dump(2) + "\n");
    out << m.corpus.size() << " quotes, " << m.collisions.size() << " collision"
        << (m.collisions.size() == 1 ? "" : "s") << "\n";
    return kOk;
  });
}

struct CorpusFilterArgs {
  fs::path corpus;
  fs::path exclude;
  std::optional<fs::path> prefix_lexicon;
  fs::path out;
  fs::path report;
};

inline int corpus_filter(const CorpusFilterArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_file(a.corpus);
    require_file(a.exclude);
    const auto c = load_corpus(a.corpus, prefix_lexicon_from(a.prefix_lexicon));
    const auto f = filter_corpus(c.corpus, load_exclusion_list(a.exclude));
    for (const auto& id : f.unknown_ids) err << "warning: exclusion id not in corpus: " << id << "\n";
    nlohmann::ordered_json rep;
    rep["before"] = c.corpus.size();
    rep["removed"] = f.removed;
    rep["size"] = f.corpus.size();
    rep["unknown_exclusions"] = f.unknown_ids;
    rep["fingerprint"] = hex64(f.corpus.fingerprint());
    io::write_file(a.out, format_corpus(f.corpus));
    io::write_file(a.report, rep.dump(2) + "\n");
    out << f.corpus.size() << " quotes (" << f.removed << " removed)\n";
    return kOk;
  });
}

// ---------------------------------------------------------------- index

struct IndexArgs {
  fs::path corpus;
  std::optional<fs::path> prefix_lexicon;
  MinHashParams params;
  std::size_t shingle_n = 1;
  fs::path out;
};

inline int build_index_file(const IndexArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_file(a.corpus);
    const auto c = load_corpus(a.corpus, prefix_lexicon_from(a.prefix_lexicon));
    const auto ix = LshIndex::build(c.corpus, a.params, a.shingle_n);
    ix.save(a.out);
    out << "indexed " << c.corpus.size() << " quotes (k=" << a.params.k << ", bands=" << a.params.bands
        << ", rows=" << a.params.rows << ")\n";
    return kOk;
  });
}

// ---------------------------------------------------------------- scan

struct ScanArgs {
  fs::path corpus;
  fs::path index;
  fs::path timelines;
  std::optional<fs::path> prefix_lexicon;
  std::optional<fs::path> refute_lexicon;
  MatchOptions match;
  LabelThresholds thresholds;
  std::size_t max_posts = 3200;
  std::size_t threads = 0;  // 0: QUOTEMATCH_THREADS or hardware concurrency
  fs::path stats_out;
  fs::path matches_out;
};

inline std::size_t scan_threads(std::size_t requested) {
  std::size_t n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("QUOTEMATCH_THREADS")) n = static_cast<std::size_t>(std::strtoul(env, nullptr, 10));
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

inline std::string stats_header() { return "user_id,total_hadith,fabricated,refutes,retweet_fraction,label\n"; }

inline int scan(const ScanArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_file(a.corpus);
    require_file(a.index);
    if (!fs::is_directory(a.timelines)) throw MissingInput("no such directory: " + a.timelines.string());
    a.thresholds.validate();
    const auto prefix = prefix_lexicon_from(a.prefix_lexicon);
    const auto refute = refute_lexicon_from(a.refute_lexicon);
    const auto corpus = load_corpus(a.corpus, prefix).corpus;
    const auto ix = LshIndex::load(a.index, corpus);
    const Matcher matcher(ix, corpus, refute, prefix, a.match);

    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(a.timelines))
      if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
    std::sort(files.begin(), files.end());

    std::vector<std::vector<Post>> timelines;
    ParentIndex parents;
    for (const auto& f : files) {
      auto posts = load_timeline(f);
      if (posts.size() > a.max_posts) posts.resize(a.max_posts);
      for (const auto& p : posts)
        if (!p.text.empty()) parents.emplace(p.id, p.text);
      timelines.push_back(std::move(posts));
    }

    std::vector<TimelineScan> results(timelines.size());
    std::vector<std::string> errors(timelines.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < timelines.size(); i = next++) {
        try {
          results[i] = scan_timeline(timelines[i], matcher, &parents);
        } catch (const Error& e) {
          errors[i] = files[i].filename().string() + ": " + e.what();
        }
      }
    };
    const std::size_t n_threads = std::min(scan_threads(a.threads), std::max<std::size_t>(1, timelines.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
      if (!e.empty()) throw ContractError(e);

    std::sort(results.begin(), results.end(),
              [](const TimelineScan& x, const TimelineScan& y) { return x.stats.user_id < y.stats.user_id; });
    std::string stats_csv = stats_header();
    std::string matches;
    std::set<std::string> seen;
    std::size_t n_matches = 0;
    for (const auto& r : results) {
      const auto& s = r.stats;
      if (s.user_id.empty()) continue;  // empty timeline file
      if (!seen.insert(s.user_id).second) throw ContractError("user '" + s.user_id + "' appears in several timeline files");
      stats_csv += io::csv_line({s.user_id, std::to_string(s.total_hadith), std::to_string(s.fabricated),
                                 std::to_string(s.refutes), io::fixed(s.retweet_fraction()),
                                 std::string(to_string(label_user(s, a.thresholds, LabelMode::Strict)))});
      for (const auto& m : r.matches) {
        nlohmann::ordered_json j;
        j["user_id"] = s.user_id;
        j["post_id"] = m.post_id;
        j["quote_id"] = m.quote_id;
        j["similarity"] = std::round(m.similarity * 1e6) / 1e6;
        j["authenticity"] = to_string(m.authenticity);
        j["kind"] = to_string(m.kind);
        matches += j.dump() + "\n";
        ++n_matches;
      }
    }
    io::write_file(a.stats_out, stats_csv);
    io::write_file(a.matches_out, matches);
    out << "scanned " << seen.size() << " users, " << n_matches << " matches\n";
    return kOk;
  });
}

struct StatsRow {
  UserStats stats;
  double retweet_fraction = 0.0;
};

inline std::vector<StatsRow> read_stats(const fs::path& path) {
  require_file(path);
  const auto t = io::read_csv(path);
  std::vector<StatsRow> rows;
  if (t.header.empty()) return rows;
  const auto cu = t.column("user_id"), ct = t.column("total_hadith"), cf = t.column("fabricated"),
             cr = t.column("refutes"), cx = t.column("retweet_fraction");
  auto num = [](const std::string& s, std::size_t line) -> std::size_t {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw ParseError("expected a non-negative integer, got '" + s + "'", line);
    }
  };
  for (const auto& r : t.rows) {
    StatsRow row;
    row.stats.user_id = r.fields[cu];
    row.stats.total_hadith = num(r.fields[ct], r.line);
    row.stats.fabricated = num(r.fields[cf], r.line);
    row.stats.refutes = num(r.fields[cr], r.line);
    try {
      row.retweet_fraction = std::stod(r.fields[cx]);
    } catch (const std::exception&) {
      throw ParseError("bad retweet_fraction '" + r.fields[cx] + "'", r.line);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------- label

struct LabelArgs {
  fs::path stats;
  LabelThresholds thresholds;
  bool balance = true;
  fs::path out;
};

inline int label(const LabelArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::vector<UserStats> all;
    for (auto& r : read_stats(a.stats)) all.push_back(std::move(r.stats));
    const auto d = build_labeled_dataset(all, a.thresholds, a.balance);
    for (const auto& w : d.warnings) err << "warning: " << w << "\n";
    std::string csv = "user_id,label,balance_fill\n";
    for (const auto& u : d.users)
      csv += io::csv_line({u.user_id, std::string(to_string(u.label)), u.balance_fill ? "1" : "0"});
    io::write_file(a.out, csv);
    out << d.circulators << " circulators, " << d.debunkers << " debunkers (" << d.strict_debunkers << " strict, "
        << d.balance_added << " added by balancing)\n";
    return kOk;
  });
}

struct LabelRow {
  std::string user_id;
  BehaviorLabel label;
};

inline std::vector<LabelRow> read_labels(const fs::path& path) {
  require_file(path);
  const auto t = io::read_csv(path);
  std::vector<LabelRow> rows;
  if (t.header.empty()) return rows;
  const auto cu = t.column("user_id"), cl = t.column("label");
  for (const auto& r : t.rows) {
    const auto l = parse_label(r.fields[cl]);
    if (!l) throw ValidationError("unknown label '" + r.fields[cl] + "'", r.line);
    rows.push_back({r.fields[cu], *l});
  }
  return rows;
}

// ---------------------------------------------------------------- features

struct FeaturesArgs {
  fs::path ties;
  fs::path labels;
  std::size_t min_support = 0;
  fs::path manifest_out;
  fs::path vectors_out;
};

inline std::string format_vectors(const std::vector<FeatureVector>& vs, const std::vector<LabelRow>& labels) {
  std::map<std::string, BehaviorLabel> by;
  for (const auto& l : labels) by[l.user_id] = l.label;
  std::string csv = "user_id,label,columns\n";
  for (const auto& v : vs) {
    std::string cols;
    for (auto c : v.active) {
      if (!cols.empty()) cols.push_back(' ');
      cols += std::to_string(c);
    }
    csv += io::csv_line({v.user_id, std::string(to_string(by.at(v.user_id))), cols});
  }
  return csv;
}

inline int features(const FeaturesArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_file(a.ties);
    const auto labels = read_labels(a.labels);
    std::set<std::string> members;
    for (const auto& l : labels)
      if (l.label != BehaviorLabel::Neither) members.insert(l.user_id);
    const auto loaded = load_ties(a.ties);
    std::vector<TieRecord> ties;
    for (const auto& t : loaded.ties)
      if (members.count(t.user_id)) ties.push_back(t);
    auto space = build_feature_space(ties);
    std::vector<std::string> ids(members.begin(), members.end());
    std::vector<FeatureVector> vectors;
    for (auto& e : encode_users(ids, ties, space)) vectors.push_back(std::move(e.vector));
    if (a.min_support > 0) {
      auto p = prune_features(space, vectors, a.min_support);
      space = std::move(p.space);
      vectors = std::move(p.vectors);
    }
    std::vector<LabelRow> kept;
    for (const auto& l : labels)
      if (members.count(l.user_id)) kept.push_back(l);
    io::write_file(a.manifest_out, space.to_json().dump(1) + "\n");
    io::write_file(a.vectors_out, format_vectors(vectors, kept));
    if (loaded.self_ties) err << "note: dropped " << loaded.self_ties << " self-ties\n";
    out << space.n_columns() << " columns over " << vectors.size() << " users\n";
    return kOk;
  });
}

inline FeatureSpace read_manifest(const fs::path& p) {
  require_file(p);
  return FeatureSpace::from_json(nlohmann::json::parse(io::read_file(p)));
}

struct LabeledVectors {
  std::vector<std::string> user_ids;
  Dataset data;
};

inline LabeledVectors read_vectors(const fs::path& p, const FeatureSpace& space) {
  require_file(p);
  const auto t = io::read_csv(p);
  LabeledVectors lv;
  lv.data.n_columns = space.n_columns();
  if (t.header.empty()) return lv;
  const auto cu = t.column("user_id"), cl = t.column("label"), cc = t.column("columns");
  for (const auto& r : t.rows) {
    const auto l = parse_label(r.fields[cl]);
    if (!l || *l == BehaviorLabel::Neither) throw ValidationError("vector label must be circulator or debunker", r.line);
    SparseRow row;
    for (auto tok : tokens(r.fields[cc])) {
      std::size_t v = 0;
      for (char ch : tok) {
        if (ch < '0' || ch > '9') throw ParseError("bad column index '" + std::string(tok) + "'", r.line);
        v = v * 10 + static_cast<std::size_t>(ch - '0');
      }
      if (v >= space.n_columns()) throw VersionMismatch("vector column outside the feature manifest (line " + std::to_string(r.line) + ")");
      row.push_back(static_cast<std::uint32_t>(v));
    }
    lv.user_ids.push_back(r.fields[cu]);
    lv.data.rows.push_back(std::move(row));
    lv.data.labels.push_back(*l == BehaviorLabel::Circulator ? 1 : -1);
  }
  return lv;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  fs::path manifest;
  fs::path vectors;
  LogitHyperparams hp;
  std::size_t cv_repeats = 10;
  double test_fraction = 0.1;
  fs::path model_out;
  fs::path metrics_out;
};

inline std::string format_metrics(const Metrics& m, std::size_t users) {
  std::string csv = "class,precision,recall,f1,accuracy,users\n";
  const auto f = [](double v) { return io::fixed(v, 4); };
  csv += io::csv_line({"circulator", f(m.circulator.precision), f(m.circulator.recall), f(m.circulator.f1),
                       f(m.accuracy), std::to_string(users)});
  csv += io::csv_line({"debunker", f(m.debunker.precision), f(m.debunker.recall), f(m.debunker.f1), f(m.accuracy),
                       std::to_string(users)});
  csv += io::csv_line({"macro", f(m.macro_precision), f(m.macro_recall), f(m.macro_f1), f(m.accuracy),
                       std::to_string(users)});
  return csv;
}

inline int train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto space = read_manifest(a.manifest);
    const auto lv = read_vectors(a.vectors, space);
    const auto cv = cross_validate(lv.data, a.hp, a.test_fraction, a.cv_repeats);
    const auto model = train_logit(lv.data, a.hp);
    if (!model.converged)
      err << "warning: optimizer stopped after " << model.iterations << " iterations with gradient norm "
          << model.gradient_norm << "\n";
    io::write_file(a.model_out, model_to_json(model, space.fingerprint_hex()).dump(1) + "\n");
    io::write_file(a.metrics_out, format_metrics(cv.mean, lv.data.size()));
    out << "cv accuracy " << io::fixed(cv.mean.accuracy, 4) << " over " << a.cv_repeats << " repeats, "
        << lv.data.size() << " users\n";
    return kOk;
  });
}

// ---------------------------------------------------------------- report

struct ReportArgs {
  fs::path model;
  fs::path manifest;
  std::optional<fs::path> categories;
  std::size_t top_k = 100;
  // Optional inputs for the class interaction summary.
  std::optional<fs::path> labels;
  std::optional<fs::path> stats;
  std::optional<fs::path> ties;
  fs::path out_dir;
};

inline int report(const ReportArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto space = read_manifest(a.manifest);
    require_file(a.model);
    const auto stored = model_from_json(nlohmann::json::parse(io::read_file(a.model)));
    if (stored.feature_hash != space.fingerprint_hex())
      throw VersionMismatch("model was trained on feature space " + stored.feature_hash + ", manifest is " +
                            space.fingerprint_hex());
    CategoryMap cm;
    if (a.categories) {
      require_file(*a.categories);
      cm = CategoryMap::load(*a.categories);
    }
    const auto k = std::min(a.top_k, space.n_columns());
    const auto rep = top_coefficients(stored.model, space, k);
    std::string coef = "sign,rank,target_id,kind,weight,category\n";
    auto emit = [&](const std::vector<Coefficient>& cs, const char* sign) {
      for (std::size_t i = 0; i < cs.size(); ++i)
        coef += io::csv_line({sign, std::to_string(i + 1), cs[i].feature.target_id,
                              std::string(to_string(cs[i].feature.kind)), io::fixed(cs[i].weight),
                              cm.category_of(cs[i].feature.target_id)});
    };
    emit(rep.top_positive, "circulator");
    emit(rep.top_negative, "debunker");
    io::write_file(a.out_dir / "coefficients.csv", coef);

    const auto counts = categorize_report(rep, cm);
    std::string cats = "class,category,count\n";
    for (const auto& [c, n] : counts.positive) cats += io::csv_line({"circulator", c, std::to_string(n)});
    for (const auto& [c, n] : counts.negative) cats += io::csv_line({"debunker", c, std::to_string(n)});
    io::write_file(a.out_dir / "categories.csv", cats);

    if (a.labels && a.stats && a.ties) {
      const auto labels = read_labels(*a.labels);
      std::map<std::string, double> rt;
      for (const auto& r : read_stats(*a.stats)) rt[r.stats.user_id] = r.retweet_fraction;
      std::map<std::string, std::array<double, 3>> counts_by;
      for (const auto& t : load_ties(*a.ties).ties) counts_by[t.user_id][static_cast<int>(t.kind)] += 1;
      std::vector<UserInteractions> users;
      for (const auto& l : labels) {
        if (l.label == BehaviorLabel::Neither) continue;
        UserInteractions u;
        u.user_id = l.user_id;
        u.label = l.label;
        auto it = counts_by.find(l.user_id);
        if (it != counts_by.end()) {
          u.follows = it->second[0];
          u.retweets = it->second[1];
          u.likes = it->second[2];
        }
        u.retweet_fraction = rt.count(l.user_id) ? rt[l.user_id] : 0.0;
        users.push_back(u);
      }
      std::string sum = "class,users,metric,mean,median,q1,q3\n";
      for (const auto& cs : interaction_summary(users)) {
        const std::string cls(to_string(cs.label));
        for (const auto& [name, d] : {std::pair{"follows", cs.follows}, std::pair{"retweets", cs.retweets},
                                      std::pair{"likes", cs.likes}})
          sum += io::csv_line({cls, std::to_string(cs.users), name, io::fixed(d.mean), io::fixed(d.median),
                               io::fixed(d.q1), io::fixed(d.q3)});
        sum += io::csv_line({cls, std::to_string(cs.users), "retweet_fraction", io::fixed(cs.mean_retweet_fraction),
                             "", "", ""});
      }
      io::write_file(a.out_dir / "class_summary.csv", sum);

      std::string welch = "metric,t_statistic,degrees_of_freedom,p_value\n";
      auto column = [&](BehaviorLabel l, auto field) {
        std::vector<double> v;
        for (const auto& u : users)
          if (u.label == l) v.push_back(field(u));
        return v;
      };
      const std::vector<std::pair<std::string, std::function<double(const UserInteractions&)>>> metrics = {
          {"follows", [](const UserInteractions& u) { return u.follows; }},
          {"retweets", [](const UserInteractions& u) { return u.retweets; }},
          {"likes", [](const UserInteractions& u) { return u.likes; }},
          {"retweet_fraction", [](const UserInteractions& u) { return u.retweet_fraction; }}};
      for (const auto& [name, field] : metrics) {
        const auto c = column(BehaviorLabel::Circulator, field), d = column(BehaviorLabel::Debunker, field);
        try {
          const auto w = stats::welch_t_test(c, d);
          welch += io::csv_line({name, io::fixed(w.t_statistic), io::fixed(w.degrees_of_freedom),
                                 io::fixed(w.p_value, 10)});
        } catch (const ContractError& e) {
          err << "note: no t-test for " << name << ": " << e.what() << "\n";
        }
      }
      io::write_file(a.out_dir / "welch.csv", welch);
    }
    out << "top " << rep.top_positive.size() << " circulator and " << rep.top_negative.size()
        << " debunker predictors written to " << a.out_dir.string() << "\n";
    return kOk;
  });
}

// ---------------------------------------------------------------- synth

inline int synth(const SyntheticSpec& spec, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto d = generate_synthetic(spec);
    write_synthetic(d, out_dir);
    out << d.users.size() << " users, " << d.corpus.size() << " quotes, " << d.ties.size() << " ties\n";
    return kOk;
  });
}

// ---------------------------------------------------------------- run

struct RunArgs {
  fs::path input_dir;  // corpus.tsv, timelines/, ties.csv, optional categories.csv
  fs::path out_dir;
  MinHashParams params;
  std::size_t shingle_n = 1;
  MatchOptions match;
  LabelThresholds thresholds;
  bool balance = true;
  LogitHyperparams hp;
  std::size_t cv_repeats = 10;
  std::size_t top_k = 100;
  std::size_t threads = 0;
};

// corpus -> index -> scan -> label -> features -> train -> report.
inline int run_all(const RunArgs& a, std::ostream& out, std::ostream& err) {
  const auto& in = a.input_dir;
  const auto& o = a.out_dir;
  int rc = kOk;
  auto step = [&](int code) {
    if (rc == kOk) rc = code;
    return rc == kOk;
  };
  if (!fs::is_directory(in)) {
    err << "error: no such directory: " << in.string() << "\n";
    return kMissingInput;
  }
  fs::create_directories(o);
  if (!step(corpus_build({{in / "corpus.tsv"}, std::nullopt, std::nullopt, o / "corpus.tsv", o / "corpus_report.json"},
                         out, err)))
    return rc;
  if (!step(build_index_file({o / "corpus.tsv", std::nullopt, a.params, a.shingle_n, o / "index.bin"}, out, err)))
    return rc;
  ScanArgs s;
  s.corpus = o / "corpus.tsv";
  s.index = o / "index.bin";
  s.timelines = in / "timelines";
  s.match = a.match;
  s.thresholds = a.thresholds;
  s.threads = a.threads;
  s.stats_out = o / "stats.csv";
  s.matches_out = o / "matches.jsonl";
  if (!step(scan(s, out, err))) return rc;
  if (!step(label({o / "stats.csv", a.thresholds, a.balance, o / "labels.csv"}, out, err))) return rc;
  if (!step(features({in / "ties.csv", o / "labels.csv", 0, o / "features.json", o / "vectors.csv"}, out, err)))
    return rc;
  TrainArgs t;
  t.manifest = o / "features.json";
  t.vectors = o / "vectors.csv";
  t.hp = a.hp;
  t.cv_repeats = a.cv_repeats;
  t.model_out = o / "model.json";
  t.metrics_out = o / "metrics.csv";
  if (!step(train(t, out, err))) return rc;
  ReportArgs r;
  r.model = o / "model.json";
  r.manifest = o / "features.json";
  if (fs::exists(in / "categories.csv")) r.categories = in / "categories.csv";
  r.top_k = a.top_k;
  r.labels = o / "labels.csv";
  r.stats = o / "stats.csv";
  r.ties = in / "ties.csv";
  r.out_dir = o;
  step(report(r, out, err));
  return rc;
}

}  // namespace quotematch::pipeline
