// quotematch command line tool.
//
//   quotematch corpus build|merge|filter ...
//   quotematch index | scan | label | features | train | report | synth | run
//
// Exit codes: 0 ok, 1 usage, 2 missing input, 3 version mismatch,
// 4 contract violation.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "quotematch/pipeline.hpp"

namespace qp = quotematch::pipeline;
namespace fs = std::filesystem;

namespace {

struct Common {
  double threshold = 0.35;
  std::size_t k = 256;
  std::size_t bands = 128;
  std::size_t rows = 2;
  std::uint64_t seed = 0x5eedc0de12345678ULL;
  std::size_t min_refutes = 3;
  bool balance = true;
  double l2 = 1.0;
  std::size_t top_k = 100;
  std::string prefix_lexicon;
  std::string refute_lexicon;

  quotematch::MinHashParams params() const {
    quotematch::MinHashParams p;
    p.k = k;
    p.seed = seed;
    p.bands = bands;
    p.rows = rows;
    p.validate();
    return p;
  }
  quotematch::MatchOptions match() const {
    quotematch::MatchOptions m;
    m.threshold = threshold;
    m.validate();
    return m;
  }
  quotematch::LabelThresholds thresholds() const {
    quotematch::LabelThresholds t;
    t.min_refutes_strict = min_refutes;
    t.min_refutes_balance = std::min<std::size_t>(t.min_refutes_balance, min_refutes);
    return t;
  }
  std::optional<fs::path> prefix() const {
    return prefix_lexicon.empty() ? std::nullopt : std::optional<fs::path>(prefix_lexicon);
  }
  std::optional<fs::path> refute() const {
    return refute_lexicon.empty() ? std::nullopt : std::optional<fs::path>(refute_lexicon);
  }
};

void add_minhash_flags(CLI::App* app, Common& c) {
  app->add_option("--minhash-k", c.k, "MinHash signature length")->capture_default_str();
  app->add_option("--bands", c.bands, "LSH bands")->capture_default_str();
  app->add_option("--rows", c.rows, "LSH rows per band")->capture_default_str();
  app->add_option("--seed", c.seed, "MinHash seed")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-duplicate quote matching and circulator/debunker classification"};
  app.require_subcommand(1);
  Common c;
  app.add_option("--prefix-lexicon", c.prefix_lexicon, "Quote-introduction prefixes, one per line");

  int rc = 0;
  auto& out = std::cout;
  auto& err = std::cerr;

  // corpus
  auto* corpus = app.add_subcommand("corpus", "Build, merge or filter the reference corpus");
  corpus->require_subcommand(1);
  qp::CorpusBuildArgs build;
  std::vector<std::string> build_inputs;
  std::string build_exclude;
  auto* cb = corpus->add_subcommand("build", "Normalize, deduplicate and merge corpus TSVs");
  cb->add_option("inputs", build_inputs, "Corpus TSV files, earlier files win")->required();
  cb->add_option("--exclude", build_exclude, "Ids to drop, one per line");
  cb->add_option("-o,--out", build.out, "Output corpus TSV")->required();
  cb->add_option("--report", build.report, "Output JSON report")->required();
  cb->callback([&] {
    for (const auto& p : build_inputs) build.inputs.emplace_back(p);
    if (!build_exclude.empty()) build.exclude = build_exclude;
    build.prefix_lexicon = c.prefix();
    rc = qp::corpus_build(build, out, err);
  });

  qp::CorpusMergeArgs merge;
  auto* cm = corpus->add_subcommand("merge", "Merge two corpora; the first one wins collisions");
  cm->add_option("a", merge.a)->required();
  cm->add_option("b", merge.b)->required();
  cm->add_option("-o,--out", merge.out)->required();
  cm->add_option("--report", merge.report)->required();
  cm->callback([&] {
    merge.prefix_lexicon = c.prefix();
    rc = qp::corpus_merge(merge, out, err);
  });

  qp::CorpusFilterArgs filter;
  auto* cf = corpus->add_subcommand("filter", "Drop quotes by id");
  cf->add_option("corpus", filter.corpus)->required();
  cf->add_option("--exclude", filter.exclude)->required();
  cf->add_option("-o,--out", filter.out)->required();
  cf->add_option("--report", filter.report)->required();
  cf->callback([&] {
    filter.prefix_lexicon = c.prefix();
    rc = qp::corpus_filter(filter, out, err);
  });

  // index
  qp::IndexArgs index;
  auto* ix = app.add_subcommand("index", "Build the MinHash/LSH index for a corpus");
  ix->add_option("corpus", index.corpus)->required();
  ix->add_option("-o,--out", index.out)->required();
  ix->add_option("--shingle", index.shingle_n, "Word n-gram size")->capture_default_str();
  add_minhash_flags(ix, c);
  ix->callback([&] {
    index.prefix_lexicon = c.prefix();
    try {
      index.params = c.params();
    } catch (const quotematch::Error& e) {
      err << "error: " << e.what() << "\n";
      rc = qp::kContractViolation;
      return;
    }
    rc = qp::build_index_file(index, out, err);
  });

  // scan
  qp::ScanArgs scan;
  auto* sc = app.add_subcommand("scan", "Match every timeline post against the corpus");
  sc->add_option("--corpus", scan.corpus)->required();
  sc->add_option("--index", scan.index)->required();
  sc->add_option("--timelines", scan.timelines, "Directory of <user>.jsonl files")->required();
  sc->add_option("--stats", scan.stats_out, "Output per-user stats CSV")->required();
  sc->add_option("--matches", scan.matches_out, "Output match audit JSONL")->required();
  sc->add_option("--threshold", c.threshold, "Jaccard match threshold")->capture_default_str();
  sc->add_option("--min-refutes", c.min_refutes, "Refutes needed for a debunker")->capture_default_str();
  sc->add_option("--max-posts", scan.max_posts, "Posts read per timeline")->capture_default_str();
  sc->add_option("--refute-lexicon", c.refute_lexicon, "Refute phrases, one per line");
  sc->callback([&] {
    scan.prefix_lexicon = c.prefix();
    scan.refute_lexicon = c.refute();
    scan.thresholds = c.thresholds();
    try {
      scan.match = c.match();
    } catch (const quotematch::Error& e) {
      err << "error: " << e.what() << "\n";
      rc = qp::kContractViolation;
      return;
    }
    rc = qp::scan(scan, out, err);
  });

  // label
  qp::LabelArgs lab;
  auto* lb = app.add_subcommand("label", "Assign circulator/debunker labels from scan stats");
  lb->add_option("stats", lab.stats)->required();
  lb->add_option("-o,--out", lab.out)->required();
  lb->add_option("--min-refutes", c.min_refutes)->capture_default_str();
  lb->add_flag("--balance,!--no-balance", c.balance, "Top up debunkers to the circulator count")
      ->capture_default_str();
  lb->callback([&] {
    lab.thresholds = c.thresholds();
    lab.balance = c.balance;
    rc = qp::label(lab, out, err);
  });

  // features
  qp::FeaturesArgs feat;
  auto* fe = app.add_subcommand("features", "Encode network ties of labeled users");
  fe->add_option("--ties", feat.ties)->required();
  fe->add_option("--labels", feat.labels)->required();
  fe->add_option("--min-support", feat.min_support, "Drop columns used by fewer users")->capture_default_str();
  fe->add_option("--manifest", feat.manifest_out)->required();
  fe->add_option("--vectors", feat.vectors_out)->required();
  fe->callback([&] { rc = qp::features(feat, out, err); });

  // train
  qp::TrainArgs tr;
  auto* tn = app.add_subcommand("train", "Cross-validate and fit the logistic model");
  tn->add_option("--manifest", tr.manifest)->required();
  tn->add_option("--vectors", tr.vectors)->required();
  tn->add_option("--model", tr.model_out)->required();
  tn->add_option("--metrics", tr.metrics_out)->required();
  tn->add_option("--l2", tr.hp.l2, "L2 penalty strength")->capture_default_str();
  tn->add_option("--seed", tr.hp.seed, "Split seed")->capture_default_str();
  tn->add_option("--repeats", tr.cv_repeats, "Hold-out repeats")->capture_default_str();
  tn->callback([&] { rc = qp::train(tr, out, err); });

  // report
  qp::ReportArgs rep;
  std::string rep_categories, rep_labels, rep_stats, rep_ties;
  auto* rp = app.add_subcommand("report", "Top coefficients, category counts and class summaries");
  rp->add_option("--model", rep.model)->required();
  rp->add_option("--manifest", rep.manifest)->required();
  rp->add_option("--categories", rep_categories, "CSV target_id,category");
  rp->add_option("--top-k", rep.top_k)->capture_default_str();
  rp->add_option("--labels", rep_labels);
  rp->add_option("--stats", rep_stats);
  rp->add_option("--ties", rep_ties);
  rp->add_option("-o,--out", rep.out_dir)->required();
  rp->callback([&] {
    if (!rep_categories.empty()) rep.categories = rep_categories;
    if (!rep_labels.empty()) rep.labels = rep_labels;
    if (!rep_stats.empty()) rep.stats = rep_stats;
    if (!rep_ties.empty()) rep.ties = rep_ties;
    rc = qp::report(rep, out, err);
  });

  // synth
  quotematch::SyntheticSpec spec;
  std::string synth_out;
  auto* sy = app.add_subcommand("synth", "Generate a seeded synthetic dataset");
  sy->add_option("-o,--out", synth_out)->required();
  sy->add_option("--users-per-class", spec.users_per_class)->capture_default_str();
  sy->add_option("--two-refute", spec.two_refute_debunkers, "Debunkers with exactly two refutes")
      ->capture_default_str();
  sy->add_option("--neither", spec.neither_users, "Users matching neither label")->capture_default_str();
  sy->add_option("--planted", spec.planted_per_class)->capture_default_str();
  sy->add_option("--background", spec.background_accounts, "Unplanted tie targets")->capture_default_str();
  sy->add_option("--timeline-length", spec.timeline_length)->capture_default_str();
  sy->add_option("--text-noise", spec.text_noise)->capture_default_str();
  sy->add_option("--label-noise", spec.label_noise)->capture_default_str();
  sy->add_option("--seed", spec.seed)->capture_default_str();
  sy->callback([&] { rc = qp::synth(spec, synth_out, out, err); });

  // run
  qp::RunArgs run;
  auto* ru = app.add_subcommand("run", "Full pipeline over a directory with corpus.tsv, timelines/, ties.csv");
  ru->add_option("input", run.input_dir)->required();
  ru->add_option("-o,--out", run.out_dir)->required();
  ru->add_option("--threshold", c.threshold)->capture_default_str();
  ru->add_option("--min-refutes", c.min_refutes)->capture_default_str();
  ru->add_flag("--balance,!--no-balance", c.balance)->capture_default_str();
  ru->add_option("--l2", run.hp.l2)->capture_default_str();
  ru->add_option("--top-k", run.top_k)->capture_default_str();
  add_minhash_flags(ru, c);
  ru->callback([&] {
    try {
      run.params = c.params();
      run.match = c.match();
    } catch (const quotematch::Error& e) {
      err << "error: " << e.what() << "\n";
      rc = qp::kContractViolation;
      return;
    }
    run.thresholds = c.thresholds();
    run.balance = c.balance;
    rc = qp::run_all(run, out, err);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  return rc;
}
