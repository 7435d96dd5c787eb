#pragma once

// L2-regularized logistic regression over sparse binary rows, with
// confusion-matrix metrics and stratified repeated hold-out validation.
//
// Loss:  sum_i log(1 + exp(-y_i * (w.x_i + b))) + (l2 / 2) * |w|^2
// with y in {+1 (circulator), -1 (debunker)} and an unregularized bias.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "quotematch/error.hpp"
#include "quotematch/hash.hpp"

namespace quotematch {

using SparseRow = std::vector<std::uint32_t>;

struct Dataset {
  std::size_t n_columns = 0;
  std::vector<SparseRow> rows;
  std::vector<int> labels;  // +1 / -1

  std::size_t size() const noexcept { return rows.size(); }

  Dataset subset(const std::vector<std::size_t>& idx) const {
    Dataset d;
    d.n_columns = n_columns;
    d.rows.reserve(idx.size());
    d.labels.reserve(idx.size());
    for (auto i : idx) {
      d.rows.push_back(rows[i]);
      d.labels.push_back(labels[i]);
    }
    return d;
  }
};

struct LogitHyperparams {
  double l2 = 1.0;
  std::size_t max_iters = 2000;
  double tolerance = 1e-5;
  std::uint64_t seed = 42;
};

struct LogitModel {
  std::vector<double> weights;
  double bias = 0.0;
  LogitHyperparams hyperparams;
  bool converged = false;
  std::size_t iterations = 0;
  double gradient_norm = 0.0;

  double decision(const SparseRow& row) const {
    double z = bias;
    for (auto c : row) z += weights.at(c);
    return z;
  }
  double probability(const SparseRow& row) const { return 1.0 / (1.0 + std::exp(-decision(row))); }
  // Circulator (+1) when the sigmoid output is at least 0.5.
  int predict(const SparseRow& row) const { return decision(row) >= 0.0 ? 1 : -1; }
};

namespace logit_detail {

// log(1 + exp(-m)) without overflow.
inline double softplus_neg(double m) { return m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m)); }

// 1 / (1 + exp(m)), i.e. sigma(-m).
inline double sigmoid_neg(double m) {
  if (m >= 0) {
    const double e = std::exp(-m);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(m));
}

inline void check_dataset(const Dataset& d) {
  if (d.rows.size() != d.labels.size()) throw ContractError("feature rows and labels differ in length");
  for (int y : d.labels)
    if (y != 1 && y != -1) throw ContractError("labels must be +1 or -1");
  for (const auto& r : d.rows)
    for (auto c : r)
      if (c >= d.n_columns) throw ParamError("feature column out of range");
}

inline std::vector<double> margins(const Dataset& d, const std::vector<double>& w, double b) {
  std::vector<double> z(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    double s = b;
    for (auto c : d.rows[i]) s += w[c];
    z[i] = s;
  }
  return z;
}

}  // namespace logit_detail

inline double logistic_loss(const Dataset& d, const std::vector<double>& w, double b, double l2) {
  const auto z = logit_detail::margins(d, w, b);
  double f = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) f += logit_detail::softplus_neg(d.labels[i] * z[i]);
  double ww = 0.0;
  for (double x : w) ww += x * x;
  return f + 0.5 * l2 * ww;
}

// Gradient with respect to (w, b); the bias component is the last element.
inline std::vector<double> logistic_gradient(const Dataset& d, const std::vector<double>& w, double b, double l2) {
  const auto z = logit_detail::margins(d, w, b);
  std::vector<double> g(w.size() + 1, 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double y = d.labels[i];
    const double r = -y * logit_detail::sigmoid_neg(y * z[i]);
    for (auto c : d.rows[i]) g[c] += r;
    g.back() += r;
  }
  for (std::size_t j = 0; j < w.size(); ++j) g[j] += l2 * w[j];
  return g;
}

struct TrainTrace {
  std::vector<double> loss;  // loss after each accepted step, starting at w = 0
};

// Polak-Ribiere+ nonlinear conjugate gradient from zero with a 1-D Newton
// initial step and Armijo backtracking, so the loss never increases.
// Throws ContractError when only one class is present.
inline LogitModel train_logit(const Dataset& d, const LogitHyperparams& hp = {}, TrainTrace* trace = nullptr) {
  using namespace logit_detail;
  check_dataset(d);
  if (d.size() < 2) throw ContractError("training needs at least two examples");
  const bool has_pos = std::count(d.labels.begin(), d.labels.end(), 1) > 0;
  const bool has_neg = std::count(d.labels.begin(), d.labels.end(), -1) > 0;
  if (!has_pos || !has_neg) throw ContractError("training data contains a single class");
  if (!(hp.l2 >= 0.0)) throw ParamError("l2 strength must be non-negative");

  const std::size_t p = d.n_columns;
  LogitModel m;
  m.hyperparams = hp;
  m.weights.assign(p, 0.0);

  auto norm = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };
  auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };

  std::vector<double> z(d.size(), 0.0);
  double ww = 0.0;
  auto loss_at = [&](const std::vector<double>& zz, double wwv) {
    double f = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) f += softplus_neg(d.labels[i] * zz[i]);
    return f + 0.5 * hp.l2 * wwv;
  };

  double f = loss_at(z, ww);
  if (trace) trace->loss.push_back(f);
  auto g = logistic_gradient(d, m.weights, m.bias, hp.l2);
  std::vector<double> dir(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) dir[j] = -g[j];
  std::vector<double> zd(d.size()), zt(d.size());

  std::size_t it = 0;
  for (; it < hp.max_iters; ++it) {
    if (norm(g) <= hp.tolerance) break;
    double slope = dot(g, dir);
    if (slope >= 0.0) {
      for (std::size_t j = 0; j < g.size(); ++j) dir[j] = -g[j];
      slope = dot(g, dir);
    }
    // Directional margins and curvature.
    double dd = 0.0, wd = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      dd += dir[j] * dir[j];
      wd += m.weights[j] * dir[j];
    }
    double curv = hp.l2 * dd;
    for (std::size_t i = 0; i < d.size(); ++i) {
      double s = dir.back();
      for (auto c : d.rows[i]) s += dir[c];
      zd[i] = s;
      const double q = sigmoid_neg(d.labels[i] * z[i]);
      curv += q * (1.0 - q) * s * s;
    }
    double step = curv > 0.0 ? -slope / curv : 1.0;
    double f_new = f;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t i = 0; i < d.size(); ++i) zt[i] = z[i] + step * zd[i];
      const double ww_new = ww + 2.0 * step * wd + step * step * dd;
      f_new = loss_at(zt, ww_new);
      if (f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        ww = ww_new;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    for (std::size_t j = 0; j < p; ++j) m.weights[j] += step * dir[j];
    m.bias += step * dir.back();
    z.swap(zt);
    f = f_new;
    if (trace) trace->loss.push_back(f);

    auto g_new = logistic_gradient(d, m.weights, m.bias, hp.l2);
    double num = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) num += g_new[j] * (g_new[j] - g[j]);
    const double beta = std::max(0.0, num / dot(g, g));
    for (std::size_t j = 0; j < g.size(); ++j) dir[j] = -g_new[j] + beta * dir[j];
    g.swap(g_new);
  }
  m.iterations = it;
  m.gradient_norm = norm(g);
  m.converged = m.gradient_norm <= hp.tolerance;
  return m;
}

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct Metrics {
  double accuracy = 0.0;
  ClassMetrics circulator;  // +1
  ClassMetrics debunker;    // -1
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  // Confusion matrix, [true][predicted] with index 0 = circulator, 1 = debunker.
  std::size_t confusion[2][2] = {{0, 0}, {0, 0}};
};

inline Metrics compute_metrics(const std::vector<int>& truth, const std::vector<int>& predicted) {
  if (truth.size() != predicted.size()) throw ContractError("truth and prediction lengths differ");
  Metrics m;
  auto idx = [](int y) { return y == 1 ? 0 : 1; };
  for (std::size_t i = 0; i < truth.size(); ++i) ++m.confusion[idx(truth[i])][idx(predicted[i])];
  const double total = static_cast<double>(truth.size());
  m.accuracy = total > 0 ? static_cast<double>(m.confusion[0][0] + m.confusion[1][1]) / total : 0.0;
  auto per_class = [&](int k) {
    ClassMetrics c;
    const double tp = static_cast<double>(m.confusion[k][k]);
    const double pred = static_cast<double>(m.confusion[0][k] + m.confusion[1][k]);
    const double actual = static_cast<double>(m.confusion[k][0] + m.confusion[k][1]);
    c.precision = pred > 0 ? tp / pred : 0.0;
    c.recall = actual > 0 ? tp / actual : 0.0;
    c.f1 = c.precision + c.recall > 0 ? 2.0 * c.precision * c.recall / (c.precision + c.recall) : 0.0;
    return c;
  };
  m.circulator = per_class(0);
  m.debunker = per_class(1);
  m.macro_precision = (m.circulator.precision + m.debunker.precision) / 2.0;
  m.macro_recall = (m.circulator.recall + m.debunker.recall) / 2.0;
  m.macro_f1 = (m.circulator.f1 + m.debunker.f1) / 2.0;
  return m;
}

// Throws ParamError when the data's column count differs from the model's.
inline Metrics evaluate(const LogitModel& m, const Dataset& d) {
  if (d.n_columns != m.weights.size())
    throw ParamError("dataset has " + std::to_string(d.n_columns) + " columns, model has " +
                     std::to_string(m.weights.size()));
  logit_detail::check_dataset(d);
  std::vector<int> pred(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) pred[i] = m.predict(d.rows[i]);
  return compute_metrics(d.labels, pred);
}

struct CvResult {
  Metrics mean;
  std::vector<Metrics> folds;
};

// Repeated stratified shuffled hold-out: each repeat holds out
// `test_fraction` of every class (at least one example), trains on the rest
// and evaluates on the held-out part. Throws ContractError when a class has
// fewer than two examples.
inline CvResult cross_validate(const Dataset& d, const LogitHyperparams& hp, double test_fraction = 0.1,
                               std::size_t repeats = 10) {
  logit_detail::check_dataset(d);
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ParamError("test fraction must be in (0, 1)");
  if (repeats == 0) throw ParamError("at least one repeat is required");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < d.size(); ++i) (d.labels[i] == 1 ? pos : neg).push_back(i);
  if (pos.size() < 2 || neg.size() < 2)
    throw ContractError("each class needs at least two examples to stratify (have " + std::to_string(pos.size()) +
                        " and " + std::to_string(neg.size()) + ")");

  CvResult r;
  Rng rng(hp.seed);
  for (std::size_t rep = 0; rep < repeats; ++rep) {
    std::vector<std::size_t> train, test;
    for (auto* cls : {&pos, &neg}) {
      auto idx = *cls;
      rng.shuffle(idx);
      auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(idx.size())));
      n_test = std::clamp<std::size_t>(n_test, 1, idx.size() - 1);
      test.insert(test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
      train.insert(train.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    const auto model = train_logit(d.subset(train), hp);
    r.folds.push_back(evaluate(model, d.subset(test)));
  }
  auto& mm = r.mean;
  const double n = static_cast<double>(r.folds.size());
  for (const auto& f : r.folds) {
    mm.accuracy += f.accuracy / n;
    mm.circulator.precision += f.circulator.precision / n;
    mm.circulator.recall += f.circulator.recall / n;
    mm.circulator.f1 += f.circulator.f1 / n;
    mm.debunker.precision += f.debunker.precision / n;
    mm.debunker.recall += f.debunker.recall / n;
    mm.debunker.f1 += f.debunker.f1 / n;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) mm.confusion[a][b] += f.confusion[a][b];
  }
  mm.macro_precision = (mm.circulator.precision + mm.debunker.precision) / 2.0;
  mm.macro_recall = (mm.circulator.recall + mm.debunker.recall) / 2.0;
  mm.macro_f1 = (mm.circulator.f1 + mm.debunker.f1) / 2.0;
  return r;
}

inline nlohmann::ordered_json model_to_json(const LogitModel& m, const std::string& feature_hash) {
  nlohmann::ordered_json j;
  j["format"] = "quotematch.logit";
  j["version"] = 1;
  j["feature_hash"] = feature_hash;
  j["hyperparams"] = {{"l2", m.hyperparams.l2},
                      {"max_iters", m.hyperparams.max_iters},
                      {"tolerance", m.hyperparams.tolerance},
                      {"seed", m.hyperparams.seed}};
  j["converged"] = m.converged;
  j["iterations"] = m.iterations;
  j["gradient_norm"] = m.gradient_norm;
  j["bias"] = m.bias;
  j["weights"] = m.weights;
  return j;
}

struct StoredModel {
  LogitModel model;
  std::string feature_hash;
};

inline StoredModel model_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "quotematch.logit") throw ParseError("not a quotematch model");
  if (j.value("version", 0) != 1) throw VersionMismatch("unsupported model version");
  StoredModel s;
  s.feature_hash = j.at("feature_hash").get<std::string>();
  const auto& hp = j.at("hyperparams");
  s.model.hyperparams.l2 = hp.at("l2").get<double>();
  s.model.hyperparams.max_iters = hp.at("max_iters").get<std::size_t>();
  s.model.hyperparams.tolerance = hp.at("tolerance").get<double>();
  s.model.hyperparams.seed = hp.at("seed").get<std::uint64_t>();
  s.model.converged = j.at("converged").get<bool>();
  s.model.iterations = j.at("iterations").get<std::size_t>();
  s.model.gradient_norm = j.at("gradient_norm").get<double>();
  s.model.bias = j.at("bias").get<double>();
  s.model.weights = j.at("weights").get<std::vector<double>>();
  for (double w : s.model.weights)
    if (!std::isfinite(w)) throw ValidationError("model has a non-finite weight");
  return s;
}

}  // namespace quotematch
