#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "praisekit/augment.hpp"
#include "praisekit/baseline.hpp"
#include "praisekit/corpus.hpp"
#include "praisekit/dataset_io.hpp"
#include "praisekit/eda.hpp"
#include "praisekit/error.hpp"
#include "praisekit/finetune.hpp"
#include "praisekit/metrics.hpp"
#include "praisekit/mock_provider.hpp"
#include "praisekit/stats.hpp"

namespace praisekit {

enum class Backend { mock, gazetteer, predictions_file, remote };

inline std::string backend_name(Backend b) {
  switch (b) {
    case Backend::mock:
      return "mock";
    case Backend::gazetteer:
      return "gazetteer";
    case Backend::predictions_file:
      return "predictions_file";
    case Backend::remote:
      return "remote";
  }
  return "?";
}

enum class AugmentMethod { compositional, eda };

struct ExperimentConfig {
  std::string train_path;
  std::string test_path;
  Scheme scheme;
  std::size_t subset_n = 13;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::vector<std::size_t> set_sizes = {13, 26, 65, 130, 260, 520};
  Backend backend = Backend::gazetteer;
  MetricParams metric;
  Alternative mwu_alternative = Alternative::less;

  AugmentMethod augment_method = AugmentMethod::compositional;
  std::size_t n_synonyms = 15;
  double temperature = 0.0;
  std::string lexicon_path;    // eda method
  std::string stopwords_path;  // eda method, optional
  double p_edit = 0.1;

  std::string lesson_principle_path;  // mock / remote backends
  std::string predictions_template;   // predictions_file backend
  ProviderConfig provider;            // remote backend
  std::size_t test_span_multiplier = 1;
  std::string output_dir;
};

struct ResultRow {
  PraiseLabel label{};
  std::size_t set_size = 0;
  std::string metric;
  double mean = 0.0;
  std::optional<double> se;
  std::size_t n_runs = 0;
};

struct MwuRow {
  PraiseLabel label{};
  std::string metric;
  std::size_t size_a = 0;
  std::size_t size_b = 0;
  MwuResult result;
  Alternative alternative = Alternative::less;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<MwuRow> comparisons;
  std::vector<std::string> warnings;
  nlohmann::json manifest;
};

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& j,
                                     const std::string& key,
                                     const std::string& path) {
  if (!j.contains(key)) {
    throw ConfigError(path + "." + key + ": missing required field");
  }
  return j.at(key);
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(const nlohmann::json& top) {
  // A manifest embeds the config it ran under; accept either form.
  const nlohmann::json& j = top.contains("config") ? top.at("config") : top;
  ExperimentConfig cfg;
  cfg.train_path = detail::require(j, "train", "$").get<std::string>();
  cfg.test_path = detail::require(j, "test", "$").get<std::string>();

  if (j.contains("scheme")) {
    for (const auto& s : j.at("scheme")) {
      const auto l = parse_label(s.get<std::string>());
      if (!l) {
        throw ConfigError("$.scheme: unknown label '" + s.get<std::string>() +
                          "'");
      }
      cfg.scheme.push_back(*l);
    }
    std::sort(cfg.scheme.begin(), cfg.scheme.end());
    cfg.scheme.erase(std::unique(cfg.scheme.begin(), cfg.scheme.end()),
                     cfg.scheme.end());
  }

  cfg.subset_n = detail::require(j, "subset_n", "$").get<std::size_t>();
  if (cfg.subset_n == 0) throw ConfigError("$.subset_n: must be >= 1");

  cfg.seeds.clear();
  for (const auto& s : detail::require(j, "seeds", "$")) {
    cfg.seeds.push_back(s.get<std::uint64_t>());
  }
  if (cfg.seeds.empty()) throw ConfigError("$.seeds: must be non-empty");

  cfg.set_sizes.clear();
  std::size_t idx = 0;
  for (const auto& s : detail::require(j, "set_sizes", "$")) {
    const std::size_t size = s.get<std::size_t>();
    if (size == 0 || size % cfg.subset_n != 0) {
      throw ConfigError("$.set_sizes[" + std::to_string(idx) + "]: " +
                        std::to_string(size) + " is not a positive multiple " +
                        "of subset_n " + std::to_string(cfg.subset_n));
    }
    cfg.set_sizes.push_back(size);
    ++idx;
  }
  if (cfg.set_sizes.empty()) throw ConfigError("$.set_sizes: must be non-empty");

  const std::string backend =
      detail::require(j, "backend", "$").get<std::string>();
  if (backend == "mock") {
    cfg.backend = Backend::mock;
  } else if (backend == "gazetteer") {
    cfg.backend = Backend::gazetteer;
  } else if (backend == "predictions_file") {
    cfg.backend = Backend::predictions_file;
  } else if (backend == "remote") {
    cfg.backend = Backend::remote;
  } else {
    throw ConfigError("$.backend: unknown backend '" + backend + "'");
  }

  if (j.contains("metric")) {
    const auto& m = j.at("metric");
    if (m.contains("alpha")) cfg.metric.alpha = m.at("alpha").get<double>();
    if (m.contains("beta")) cfg.metric.beta = m.at("beta").get<double>();
  }
  if (cfg.metric.alpha < 0.0 || cfg.metric.alpha > 1.0) {
    throw ConfigError("$.metric.alpha: must be in [0, 1]");
  }
  if (cfg.metric.beta <= 0.0) throw ConfigError("$.metric.beta: must be > 0");

  if (j.contains("mwu_alternative")) {
    const std::string a = j.at("mwu_alternative").get<std::string>();
    if (a == "less") {
      cfg.mwu_alternative = Alternative::less;
    } else if (a == "greater") {
      cfg.mwu_alternative = Alternative::greater;
    } else if (a == "two_sided") {
      cfg.mwu_alternative = Alternative::two_sided;
    } else {
      throw ConfigError("$.mwu_alternative: unknown alternative '" + a + "'");
    }
  }

  if (j.contains("augmentation")) {
    const auto& a = j.at("augmentation");
    if (a.contains("method")) {
      const std::string m = a.at("method").get<std::string>();
      if (m == "compositional") {
        cfg.augment_method = AugmentMethod::compositional;
      } else if (m == "eda") {
        cfg.augment_method = AugmentMethod::eda;
      } else {
        throw ConfigError("$.augmentation.method: unknown method '" + m + "'");
      }
    }
    if (a.contains("n_synonyms")) {
      cfg.n_synonyms = a.at("n_synonyms").get<std::size_t>();
      if (cfg.n_synonyms == 0) {
        throw ConfigError("$.augmentation.n_synonyms: must be >= 1");
      }
    }
    if (a.contains("temperature")) {
      cfg.temperature = a.at("temperature").get<double>();
    }
    if (a.contains("lexicon")) {
      cfg.lexicon_path = a.at("lexicon").get<std::string>();
    }
    if (a.contains("stopwords")) {
      cfg.stopwords_path = a.at("stopwords").get<std::string>();
    }
    if (a.contains("p_edit")) cfg.p_edit = a.at("p_edit").get<double>();
  }
  if (cfg.augment_method == AugmentMethod::eda && cfg.lexicon_path.empty()) {
    throw ConfigError("$.augmentation.lexicon: required for the eda method");
  }

  if (j.contains("lesson_principle")) {
    cfg.lesson_principle_path = j.at("lesson_principle").get<std::string>();
  }
  if ((cfg.backend == Backend::mock || cfg.backend == Backend::remote) &&
      cfg.lesson_principle_path.empty()) {
    throw ConfigError("$.lesson_principle: required for mock/remote backends");
  }
  if (j.contains("predictions")) {
    cfg.predictions_template = j.at("predictions").get<std::string>();
  }
  if (cfg.backend == Backend::predictions_file &&
      cfg.predictions_template.empty()) {
    throw ConfigError(
        "$.predictions: required for the predictions_file backend "
        "(template with {seed} and {size} placeholders)");
  }
  if (j.contains("provider")) {
    const auto& p = j.at("provider");
    if (p.contains("base_url")) {
      cfg.provider.base_url = p.at("base_url").get<std::string>();
    }
    if (p.contains("api_key_env")) {
      cfg.provider.api_key_env = p.at("api_key_env").get<std::string>();
    }
    if (p.contains("model")) {
      cfg.provider.model = p.at("model").get<std::string>();
    }
    if (p.contains("timeout_seconds")) {
      cfg.provider.timeout_seconds = p.at("timeout_seconds").get<double>();
    }
    if (p.contains("max_retries")) {
      cfg.provider.max_retries = p.at("max_retries").get<int>();
    }
    if (p.contains("max_concurrency")) {
      cfg.provider.max_concurrency = p.at("max_concurrency").get<int>();
    }
  }
  if (j.contains("test_span_multiplier")) {
    cfg.test_span_multiplier =
        j.at("test_span_multiplier").get<std::size_t>();
    if (cfg.test_span_multiplier == 0) {
      throw ConfigError("$.test_span_multiplier: must be >= 1");
    }
  }
  if (j.contains("output_dir")) {
    cfg.output_dir = j.at("output_dir").get<std::string>();
  }
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  nlohmann::json j = nlohmann::json::parse(read_text_file(path), nullptr,
                                           false);
  if (j.is_discarded()) {
    throw ConfigError("config '" + path + "' is not valid JSON");
  }
  return parse_experiment_config(j);
}

/// Canonical JSON form of a config (sorted keys); hashed into the manifest.
inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["train"] = cfg.train_path;
  j["test"] = cfg.test_path;
  if (!cfg.scheme.empty()) {
    j["scheme"] = nlohmann::json::array();
    for (PraiseLabel l : cfg.scheme) j["scheme"].push_back(label_name(l));
  }
  j["subset_n"] = cfg.subset_n;
  j["seeds"] = cfg.seeds;
  j["set_sizes"] = cfg.set_sizes;
  j["backend"] = backend_name(cfg.backend);
  j["metric"] = {{"alpha", cfg.metric.alpha}, {"beta", cfg.metric.beta}};
  j["mwu_alternative"] = alternative_name(cfg.mwu_alternative);
  j["augmentation"] = {
      {"method", cfg.augment_method == AugmentMethod::eda ? "eda"
                                                          : "compositional"},
      {"n_synonyms", cfg.n_synonyms},
      {"temperature", cfg.temperature}};
  if (!cfg.lexicon_path.empty()) {
    j["augmentation"]["lexicon"] = cfg.lexicon_path;
    j["augmentation"]["p_edit"] = cfg.p_edit;
  }
  if (!cfg.stopwords_path.empty()) {
    j["augmentation"]["stopwords"] = cfg.stopwords_path;
  }
  if (!cfg.lesson_principle_path.empty()) {
    j["lesson_principle"] = cfg.lesson_principle_path;
  }
  if (!cfg.predictions_template.empty()) {
    j["predictions"] = cfg.predictions_template;
  }
  if (cfg.backend == Backend::remote) {
    j["provider"] = {{"base_url", cfg.provider.base_url},
                     {"api_key_env", cfg.provider.api_key_env},
                     {"model", cfg.provider.model},
                     {"timeout_seconds", cfg.provider.timeout_seconds},
                     {"max_retries", cfg.provider.max_retries},
                     {"max_concurrency", cfg.provider.max_concurrency}};
  }
  j["test_span_multiplier"] = cfg.test_span_multiplier;
  j["output_dir"] = cfg.output_dir;
  return j;
}

// ---------------------------------------------------------------------------
// Table formatting
// ---------------------------------------------------------------------------

/// Fixed 3-decimal formatting with ties rounded to even, matching the
/// rounding used in the result tables.
inline std::string format_score3(double x) {
  const double scaled = x * 1000.0;
  const long long n = static_cast<long long>(std::nearbyint(scaled));
  const long long a = n < 0 ? -n : n;
  std::string frac = std::to_string(a % 1000);
  while (frac.size() < 3) frac.insert(frac.begin(), '0');
  return (n < 0 ? std::string("-") : std::string()) +
         std::to_string(a / 1000) + "." + frac;
}

/// Shortest round-trip decimal form, for machine-readable CSV.
inline std::string format_full(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Experiment runner
// ---------------------------------------------------------------------------

namespace detail {

inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& contents) {
  std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  write_text_file(tmp.string(), contents);
  std::filesystem::rename(tmp, path);
}

inline std::string fill_template(std::string tmpl, std::uint64_t seed,
                                 std::size_t size) {
  const auto replace_all = [&](const std::string& key,
                               const std::string& value) {
    std::size_t at;
    while ((at = tmpl.find(key)) != std::string::npos) {
      tmpl.replace(at, key.size(), value);
    }
  };
  replace_all("{seed}", std::to_string(seed));
  replace_all("{size}", std::to_string(size));
  return tmpl;
}

template <typename Fn>
auto run_stage(std::uint64_t seed, std::size_t size, const char* stage,
               Fn&& fn) {
  const auto ctx = [&](const char* what) {
    return "seed " + std::to_string(seed) + ", size " + std::to_string(size) +
           ", stage " + stage + ": " + what;
  };
  try {
    return fn();
  } catch (const ProviderError& e) {
    throw ProviderError(ctx(e.what()));
  } catch (const IoError& e) {
    throw IoError(ctx(e.what()));
  } catch (const Error& e) {
    throw Error(ctx(e.what()));
  }
}

inline const std::vector<std::string>& metric_keys() {
  static const std::vector<std::string> keys = {"m_iou", "iou", "f_beta"};
  return keys;
}

inline double metric_by_key(const MetricScores& s, const std::string& key) {
  if (key == "m_iou") return s.m_iou;
  if (key == "iou") return s.iou;
  return s.f_beta;
}

inline std::string metric_display(const std::string& key) {
  if (key == "m_iou") return "M-IoU";
  if (key == "iou") return "IoU";
  return "F2";
}

inline nlohmann::ordered_json scores_to_json(const MetricScores& s) {
  return {{"m_iou", s.m_iou}, {"iou", s.iou}, {"f_beta", s.f_beta}};
}

}  // namespace detail

/// Runs the full experiment grid: for every seed, draw the low-resource
/// subset, augment it to every configured size, obtain predictions for the
/// fixed test set from the configured backend, and score per label; then
/// aggregate across seeds and compare every pair of sizes with the
/// Mann-Whitney U test. All artifacts land under output_dir. With the mock
/// or gazetteer backends a rerun of the same config is byte-identical.
inline ExperimentResult run_experiment(
    const ExperimentConfig& cfg, CompletionProvider* remote_provider = nullptr) {
  namespace fs = std::filesystem;
  if (cfg.output_dir.empty()) {
    throw ConfigError("$.output_dir: required to run an experiment");
  }
  if (cfg.backend == Backend::remote && remote_provider == nullptr) {
    throw ConfigError("remote backend requires a provider");
  }

  Dataset train = load_dataset(cfg.train_path);
  Dataset test = load_dataset(cfg.test_path);
  const Scheme scheme = cfg.scheme.empty() ? train.scheme : cfg.scheme;
  if (train.scheme != scheme || test.scheme != scheme) {
    throw ConfigError("dataset schemes do not match the configured scheme");
  }
  if (cfg.subset_n > train.records.size()) {
    throw ConfigError("$.subset_n: exceeds training set size " +
                      std::to_string(train.records.size()));
  }

  ExperimentResult result;

  std::string principle_text;
  if (cfg.backend == Backend::mock || cfg.backend == Backend::remote) {
    principle_text = read_text_file(cfg.lesson_principle_path);
  }
  SynonymLexicon lexicon;
  std::set<std::string> stopwords;
  if (cfg.augment_method == AugmentMethod::eda) {
    lexicon = load_lexicon(cfg.lexicon_path);
    if (!cfg.stopwords_path.empty()) {
      stopwords = load_stopwords(cfg.stopwords_path);
    }
  }

  // The test set is fixed across all seeds and sizes. The optional span
  // multiplier expands only the records that contain spans, with a constant
  // seed so every run sees the same expansion.
  if (cfg.test_span_multiplier > 1) {
    Dataset with_spans{scheme, {}}, without{scheme, {}};
    for (const LabeledResponse& r : test.records) {
      (r.spans.empty() ? without : with_spans).records.push_back(r);
    }
    AugmentPlan plan{cfg.test_span_multiplier, cfg.n_synonyms, cfg.temperature,
                     derive_seed(0, "test-span-augment")};
    MockProvider mock(plan.seed);
    Dataset expanded =
        augment_dataset(with_spans, plan, mock, &result.warnings);
    test.records = std::move(without.records);
    for (LabeledResponse& r : expanded.records) {
      test.records.push_back(std::move(r));
    }
  }
  // run_means[label][size][metric] -> one mean per seed
  std::map<PraiseLabel, std::map<std::size_t, std::map<std::string, std::vector<double>>>>
      run_means;

  const fs::path out_root(cfg.output_dir);
  fs::create_directories(out_root);
  std::vector<std::string> outputs;

  for (const std::uint64_t seed : cfg.seeds) {
    const Dataset sub = subset(train, cfg.subset_n, seed);
    for (const std::size_t size : cfg.set_sizes) {
      const std::size_t multiplier = size / cfg.subset_n;
      const fs::path cell_dir = out_root / ("cells") /
                                ("seed_" + std::to_string(seed)) /
                                ("size_" + std::to_string(size));

      // --- augment ---
      Dataset augmented = detail::run_stage(seed, size, "augment", [&] {
        if (cfg.augment_method == AugmentMethod::eda) {
          return eda_augment(sub, multiplier, lexicon,
                             derive_seed(seed, "eda@" + std::to_string(size)),
                             cfg.p_edit, stopwords, &result.warnings);
        }
        AugmentPlan plan{multiplier, cfg.n_synonyms, cfg.temperature,
                         derive_seed(seed, "aug@" + std::to_string(size))};
        MockProvider mock(plan.seed);
        CompletionProvider& aug_provider =
            cfg.backend == Backend::remote && remote_provider != nullptr
                ? *remote_provider
                : static_cast<CompletionProvider&>(mock);
        return augment_dataset(sub, plan, aug_provider, &result.warnings);
      });
      detail::write_file_atomic(cell_dir / "augmented.json",
                                dataset_to_string(augmented));

      // --- predict ---
      std::map<std::string, TaggedResponse> preds;
      std::size_t unaligned = 0;
      detail::run_stage(seed, size, "predict", [&] {
        switch (cfg.backend) {
          case Backend::gazetteer: {
            const Gazetteer g = build_gazetteer(augmented);
            Dataset pred_spans{scheme, {}};
            for (const LabeledResponse& r : test.records) {
              TaggedResponse tagged = gazetteer_tag(r.text, g);
              pred_spans.records.push_back(
                  {r.id, r.text, tags_to_spans(tagged)});
              preds[r.id] = std::move(tagged);
            }
            detail::write_file_atomic(cell_dir / "predictions.json",
                                      dataset_to_string(pred_spans));
            break;
          }
          case Backend::mock:
          case Backend::remote: {
            MockProvider mock(derive_seed(seed, "tag"));
            CompletionProvider& tagger =
                cfg.backend == Backend::remote
                    ? *remote_provider
                    : static_cast<CompletionProvider&>(mock);
            std::string jsonl;
            for (const LabeledResponse& r : test.records) {
              CompletionRequest req;
              req.model = cfg.provider.model;
              req.temperature = 0.0;
              req.messages =
                  build_evaluator_messages(scheme, principle_text, r.text);
              const std::string raw = tagger.complete(req);
              nlohmann::ordered_json line = {{"id", r.id}, {"raw", raw}};
              jsonl += line.dump() + "\n";
              AlignResult aligned =
                  align_phrases(r.text, parse_prediction(raw, scheme));
              unaligned += aligned.diagnostics.size();
              preds[r.id] = std::move(aligned.tagged);
            }
            detail::write_file_atomic(cell_dir / "predictions.jsonl", jsonl);
            break;
          }
          case Backend::predictions_file: {
            const std::string path =
                detail::fill_template(cfg.predictions_template, seed, size);
            std::map<std::string, std::string> raw_by_id;
            for (RawPrediction& p :
                 parse_predictions_jsonl(read_text_file(path), path)) {
              raw_by_id[p.id] = std::move(p.raw);
            }
            for (const LabeledResponse& r : test.records) {
              const auto it = raw_by_id.find(r.id);
              if (it == raw_by_id.end()) {
                throw MissingPrediction("no prediction for id '" + r.id +
                                        "' in " + path);
              }
              AlignResult aligned =
                  align_phrases(r.text, parse_prediction(it->second, scheme));
              unaligned += aligned.diagnostics.size();
              preds[r.id] = std::move(aligned.tagged);
            }
            break;
          }
        }
        return 0;
      });

      // --- score ---
      nlohmann::ordered_json cell_scores;
      cell_scores["seed"] = seed;
      cell_scores["size"] = size;
      cell_scores["labels"] = nlohmann::ordered_json::object();
      detail::run_stage(seed, size, "score", [&] {
        for (PraiseLabel label : scheme) {
          const CorpusScores cs = score_corpus(test, preds, label, cfg.metric);
          nlohmann::ordered_json entry;
          entry["n"] = cs.per_response.size();
          entry["mean"] = detail::scores_to_json(cs.mean);
          entry["degenerate_count"] = cs.degenerate_count;
          entry["mean_excluding_degenerate"] =
              cs.mean_excluding_degenerate
                  ? detail::scores_to_json(*cs.mean_excluding_degenerate)
                  : nlohmann::ordered_json();
          cell_scores["labels"][label_name(label)] = std::move(entry);
          for (const std::string& key : detail::metric_keys()) {
            run_means[label][size][key].push_back(
                detail::metric_by_key(cs.mean, key));
          }
        }
        return 0;
      });
      cell_scores["unaligned_phrases"] = unaligned;
      detail::write_file_atomic(cell_dir / "scores.json",
                                cell_scores.dump(2) + "\n");
    }
  }

  // --- aggregate ---
  for (PraiseLabel label : scheme) {
    for (const std::size_t size : cfg.set_sizes) {
      for (const std::string& key : detail::metric_keys()) {
        const std::vector<double>& means = run_means[label][size][key];
        const RunAggregate agg = aggregate_runs(means);
        result.rows.push_back(
            {label, size, key, agg.mean, agg.standard_error, means.size()});
      }
    }
  }
  for (PraiseLabel label : scheme) {
    for (std::size_t i = 0; i < cfg.set_sizes.size(); ++i) {
      for (std::size_t k = i + 1; k < cfg.set_sizes.size(); ++k) {
        for (const std::string& key : detail::metric_keys()) {
          MwuRow row;
          row.label = label;
          row.metric = key;
          row.size_a = cfg.set_sizes[i];
          row.size_b = cfg.set_sizes[k];
          row.alternative = cfg.mwu_alternative;
          row.result = mann_whitney_u(run_means[label][row.size_a][key],
                                      run_means[label][row.size_b][key],
                                      cfg.mwu_alternative);
          result.comparisons.push_back(std::move(row));
        }
      }
    }
  }

  // --- emit tables ---
  std::string csv = "label,set_size,metric,mean,se,n_runs\n";
  for (const ResultRow& r : result.rows) {
    csv += label_name(r.label) + "," + std::to_string(r.set_size) + "," +
           r.metric + "," + format_full(r.mean) + "," +
           (r.se ? format_full(*r.se) : std::string()) + "," +
           std::to_string(r.n_runs) + "\n";
  }
  detail::write_file_atomic(out_root / "results.csv", csv);
  outputs.push_back("results.csv");

  std::string mwu_csv = "label,metric,size_a,size_b,u_min,u1,p,method,alternative\n";
  for (const MwuRow& c : result.comparisons) {
    mwu_csv += label_name(c.label) + "," + c.metric + "," +
               std::to_string(c.size_a) + "," + std::to_string(c.size_b) +
               "," + format_full(c.result.u_min) + "," +
               format_full(c.result.u1) + "," + format_full(c.result.p) + "," +
               (c.result.method == MwuResult::Method::exact ? "exact"
                                                            : "normal_approx") +
               "," + alternative_name(c.alternative) + "\n";
  }
  detail::write_file_atomic(out_root / "mwu.csv", mwu_csv);
  outputs.push_back("mwu.csv");

  std::string md = "# Results\n";
  for (PraiseLabel label : scheme) {
    md += "\n## " + label_name(label) + "\n\n";
    md += "| Set Size | M-IoU | SE | IoU | SE | F2 | SE |\n";
    md += "|---:|---:|---:|---:|---:|---:|---:|\n";
    for (const std::size_t size : cfg.set_sizes) {
      md += "| " + std::to_string(size) + " |";
      for (const std::string& key : detail::metric_keys()) {
        const RunAggregate agg = aggregate_runs(run_means[label][size][key]);
        md += " " + format_score3(agg.mean) + " | " +
              (agg.standard_error ? format_score3(*agg.standard_error)
                                  : std::string("-")) +
              " |";
      }
      md += "\n";
    }
  }
  md += "\n## Pairwise Mann-Whitney U (" +
        alternative_name(cfg.mwu_alternative) + ", M-IoU)\n\n";
  md += "| Label | Sizes | U | p | Method |\n|---|---|---:|---:|---|\n";
  for (const MwuRow& c : result.comparisons) {
    if (c.metric != "m_iou") continue;
    md += "| " + label_name(c.label) + " | " + std::to_string(c.size_a) +
          " vs " + std::to_string(c.size_b) + " | " +
          format_score3(c.result.u_min) + " | " + format_full(c.result.p) +
          " | " +
          (c.result.method == MwuResult::Method::exact ? "exact"
                                                       : "normal_approx") +
          " |\n";
  }
  md += "\nPer-cell score files under cells/ include means with and without "
        "the score-1 convention for responses where a label is absent from "
        "both sides.\n";
  detail::write_file_atomic(out_root / "results.md", md);
  outputs.push_back("results.md");

  nlohmann::json manifest;
  const nlohmann::json config_json = config_to_json(cfg);
  manifest["tool"] = "praisekit";
  manifest["config"] = config_json;
  {
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(config_json.dump())));
    manifest["config_hash"] = std::string(hex);
  }
  manifest["seeds"] = cfg.seeds;
  manifest["outputs"] = outputs;
  manifest["warnings"] = result.warnings;
  detail::write_file_atomic(out_root / "manifest.json",
                            manifest.dump(2) + "\n");
  result.manifest = std::move(manifest);
  return result;
}

}  // namespace praisekit
