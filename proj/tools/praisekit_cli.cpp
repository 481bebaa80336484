// praisekit command-line interface: dataset validation and splitting,
// augmentation, fine-tune export, tagging, scoring, significance tests and
// the full experiment runner.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "praisekit/augment.hpp"
#include "praisekit/baseline.hpp"
#include "praisekit/corpus.hpp"
#include "praisekit/dataset_io.hpp"
#include "praisekit/eda.hpp"
#include "praisekit/error.hpp"
#include "praisekit/finetune.hpp"
#include "praisekit/harness.hpp"
#include "praisekit/http_transport.hpp"
#include "praisekit/metrics.hpp"
#include "praisekit/mock_provider.hpp"
#include "praisekit/provider.hpp"
#include "praisekit/stats.hpp"

namespace {

using namespace praisekit;

PraiseLabel parse_label_arg(const std::string& s) {
  const auto l = parse_label(s);
  if (!l) throw ConfigError("unknown label '" + s + "'");
  return *l;
}

Alternative parse_alternative_arg(const std::string& s) {
  if (s == "less") return Alternative::less;
  if (s == "greater") return Alternative::greater;
  if (s == "two_sided" || s == "two-sided") return Alternative::two_sided;
  throw ConfigError("unknown alternative '" + s + "'");
}

std::vector<double> load_score_list(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<double> out;
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') {
    const nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_array()) {
      throw ValidationError("score list '" + path +
                            "' is not a JSON array of numbers");
    }
    for (const auto& v : j) {
      if (!v.is_number()) {
        throw ValidationError("score list '" + path +
                              "' contains a non-number");
      }
      out.push_back(v.get<double>());
    }
  } else {
    std::istringstream in(text);
    double v;
    while (in >> v) out.push_back(v);
  }
  if (out.empty()) throw ValidationError("score list '" + path + "' is empty");
  return out;
}

std::unique_ptr<CompletionProvider> make_provider(const std::string& backend,
                                                  const ProviderConfig& cfg,
                                                  std::uint64_t seed) {
  if (backend == "mock") return std::make_unique<MockProvider>(seed);
  if (backend == "remote") {
    return std::make_unique<HttpProvider>(
        cfg, std::make_shared<HttplibTransport>());
  }
  throw ConfigError("unknown provider backend '" + backend + "'");
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

nlohmann::ordered_json scores_json(const MetricScores& s) {
  return {{"m_iou", s.m_iou}, {"iou", s.iou}, {"f_beta", s.f_beta}};
}

int run(int argc, char** argv) {
  CLI::App app{"span-annotated praise corpora: augmentation, fine-tune "
               "export, tagging and evaluation"};
  app.require_subcommand(1);

  // --- validate ---
  std::string val_path;
  auto* cmd_validate = app.add_subcommand("validate", "check a dataset file");
  cmd_validate->add_option("dataset", val_path)->required();

  // --- split ---
  std::string split_path, split_train_out, split_test_out;
  std::uint64_t split_seed = 0;
  std::size_t split_count = 0;
  auto* cmd_split =
      app.add_subcommand("split", "seeded shuffle + prefix split");
  cmd_split->add_option("dataset", split_path)->required();
  cmd_split->add_option("--seed", split_seed)->required();
  cmd_split->add_option("--train-count", split_count)->required();
  cmd_split->add_option("--train-out", split_train_out)->required();
  cmd_split->add_option("--test-out", split_test_out)->required();

  // --- subset ---
  std::string subset_path, subset_out;
  std::uint64_t subset_seed = 0;
  std::size_t subset_count = 0;
  auto* cmd_subset =
      app.add_subcommand("subset", "seeded sample without replacement");
  cmd_subset->add_option("dataset", subset_path)->required();
  cmd_subset->add_option("-n,--n", subset_count)->required();
  cmd_subset->add_option("--seed", subset_seed)->required();
  cmd_subset->add_option("--out", subset_out)->required();

  // --- augment ---
  std::string aug_path, aug_out, aug_backend = "mock";
  std::size_t aug_multiplier = 1, aug_n_synonyms = 15;
  double aug_temperature = 0.0;
  std::uint64_t aug_seed = 0;
  ProviderConfig aug_provider_cfg;
  auto* cmd_augment = app.add_subcommand(
      "augment", "compositional rewrite augmentation (decompose/rewrite/"
                 "recombine)");
  cmd_augment->add_option("dataset", aug_path)->required();
  cmd_augment->add_option("--multiplier", aug_multiplier)->required();
  cmd_augment->add_option("--seed", aug_seed);
  cmd_augment->add_option("--out", aug_out)->required();
  cmd_augment->add_option("--backend", aug_backend)
      ->check(CLI::IsMember({"mock", "remote"}));
  cmd_augment->add_option("--n-synonyms", aug_n_synonyms);
  cmd_augment->add_option("--temperature", aug_temperature);
  cmd_augment->add_option("--base-url", aug_provider_cfg.base_url);
  cmd_augment->add_option("--model", aug_provider_cfg.model);
  cmd_augment->add_option("--api-key-env", aug_provider_cfg.api_key_env);
  cmd_augment->add_option("--max-concurrency",
                          aug_provider_cfg.max_concurrency);

  // --- eda-augment ---
  std::string eda_path, eda_out, eda_lexicon, eda_stopwords;
  std::size_t eda_variants = 1;
  std::uint64_t eda_seed = 0;
  double eda_p = 0.1;
  auto* cmd_eda = app.add_subcommand(
      "eda-augment", "traditional augmentation (replace/insert/swap/delete)");
  cmd_eda->add_option("dataset", eda_path)->required();
  cmd_eda->add_option("--variants", eda_variants)->required();
  cmd_eda->add_option("--lexicon", eda_lexicon)->required();
  cmd_eda->add_option("--stopwords", eda_stopwords);
  cmd_eda->add_option("--seed", eda_seed);
  cmd_eda->add_option("--p-edit", eda_p);
  cmd_eda->add_option("--out", eda_out)->required();

  // --- export-finetune ---
  std::string ft_path, ft_principle, ft_out;
  auto* cmd_ft = app.add_subcommand("export-finetune",
                                    "write the chat-format JSONL training file");
  cmd_ft->add_option("dataset", ft_path)->required();
  cmd_ft->add_option("--principle", ft_principle)->required();
  cmd_ft->add_option("--out", ft_out)->required();

  // --- tag ---
  std::string tag_path, tag_train, tag_gazetteer, tag_save_gazetteer, tag_out;
  auto* cmd_tag =
      app.add_subcommand("tag", "gazetteer tagging of a dataset's texts");
  cmd_tag->add_option("dataset", tag_path)->required();
  cmd_tag->add_option("--train", tag_train);
  cmd_tag->add_option("--gazetteer", tag_gazetteer);
  cmd_tag->add_option("--save-gazetteer", tag_save_gazetteer);
  cmd_tag->add_option("--out", tag_out)->required();

  // --- score ---
  std::string score_gt, score_pred, score_label, score_out;
  double score_alpha = 0.2, score_beta = 2.0;
  auto* cmd_score =
      app.add_subcommand("score", "token-level IoU / M-IoU / F-beta");
  cmd_score->add_option("ground-truth", score_gt)->required();
  cmd_score->add_option("predictions", score_pred)->required();
  cmd_score->add_option("--label", score_label)->required();
  cmd_score->add_option("--alpha", score_alpha);
  cmd_score->add_option("--beta", score_beta);
  cmd_score->add_option("--out", score_out);

  // --- compare ---
  std::string cmp_a, cmp_b, cmp_alt = "less";
  auto* cmd_compare =
      app.add_subcommand("compare", "Mann-Whitney U on two score lists");
  cmd_compare->add_option("a", cmp_a)->required();
  cmd_compare->add_option("b", cmp_b)->required();
  cmd_compare->add_option("--alternative", cmp_alt)
      ->check(CLI::IsMember({"less", "greater", "two_sided", "two-sided"}));

  // --- stats spans ---
  auto* cmd_stats = app.add_subcommand("stats", "dataset statistics");
  cmd_stats->require_subcommand(1);
  std::string stats_path, stats_label;
  auto* cmd_spans =
      cmd_stats->add_subcommand("spans", "span token-length histogram");
  cmd_spans->add_option("dataset", stats_path)->required();
  cmd_spans->add_option("--label", stats_label)->required();

  // --- experiment ---
  std::string exp_config, exp_outdir;
  std::optional<std::uint64_t> exp_seed;
  std::optional<double> exp_alpha, exp_beta;
  auto* cmd_exp = app.add_subcommand(
      "experiment", "run the full multiplier/seed grid from a config (or a "
                    "manifest from a previous run)");
  cmd_exp->add_option("config", exp_config)->required();
  cmd_exp->add_option("--seed", exp_seed,
                      "replace the config's seed list with this single seed");
  cmd_exp->add_option("--alpha", exp_alpha);
  cmd_exp->add_option("--beta", exp_beta);
  cmd_exp->add_option("--output-dir", exp_outdir);

  CLI11_PARSE(app, argc, argv);

  if (cmd_validate->parsed()) {
    const Dataset d = load_dataset(val_path);
    std::cout << "ok: " << d.records.size() << " records, scheme";
    for (PraiseLabel l : d.scheme) std::cout << " " << label_name(l);
    std::cout << "\n";
    return 0;
  }

  if (cmd_split->parsed()) {
    const Dataset d = load_dataset(split_path);
    const auto [train, rest] = split_dataset(d, split_seed, split_count);
    save_dataset(train, split_train_out);
    save_dataset(rest, split_test_out);
    std::cout << "train: " << train.records.size()
              << ", test: " << rest.records.size() << "\n";
    return 0;
  }

  if (cmd_subset->parsed()) {
    const Dataset d = load_dataset(subset_path);
    save_dataset(subset(d, subset_count, subset_seed), subset_out);
    return 0;
  }

  if (cmd_augment->parsed()) {
    const Dataset d = load_dataset(aug_path);
    AugmentPlan plan{aug_multiplier, aug_n_synonyms, aug_temperature, aug_seed};
    auto provider = make_provider(aug_backend, aug_provider_cfg, aug_seed);
    std::vector<std::string> warnings;
    const Dataset out = augment_dataset(
        d, plan, *provider, &warnings,
        static_cast<std::size_t>(std::max(1, aug_provider_cfg.max_concurrency)));
    print_warnings(warnings);
    save_dataset(out, aug_out);
    std::cout << out.records.size() << " records written to " << aug_out
              << "\n";
    return 0;
  }

  if (cmd_eda->parsed()) {
    const Dataset d = load_dataset(eda_path);
    const SynonymLexicon lexicon = load_lexicon(eda_lexicon);
    std::set<std::string> stopwords;
    if (!eda_stopwords.empty()) stopwords = load_stopwords(eda_stopwords);
    std::vector<std::string> warnings;
    const Dataset out = eda_augment(d, eda_variants, lexicon, eda_seed, eda_p,
                                    stopwords, &warnings);
    print_warnings(warnings);
    save_dataset(out, eda_out);
    std::cout << out.records.size() << " records written to " << eda_out
              << "\n";
    return 0;
  }

  if (cmd_ft->parsed()) {
    const Dataset d = load_dataset(ft_path);
    const LessonPrinciple principle{d.scheme, read_text_file(ft_principle)};
    std::ofstream out(ft_out, std::ios::binary);
    if (!out) throw IoError("cannot write '" + ft_out + "'");
    export_finetune(d, principle, out);
    std::cout << d.records.size() << " training lines written to " << ft_out
              << "\n";
    return 0;
  }

  if (cmd_tag->parsed()) {
    if (tag_train.empty() == tag_gazetteer.empty()) {
      throw ConfigError("tag: provide exactly one of --train / --gazetteer");
    }
    Gazetteer g;
    if (!tag_train.empty()) {
      g = build_gazetteer(load_dataset(tag_train));
    } else {
      const nlohmann::json j =
          nlohmann::json::parse(read_text_file(tag_gazetteer), nullptr, false);
      if (j.is_discarded()) {
        throw ValidationError("gazetteer '" + tag_gazetteer +
                              "' is not valid JSON");
      }
      g = gazetteer_from_json(j);
    }
    if (!tag_save_gazetteer.empty()) {
      write_text_file(tag_save_gazetteer, gazetteer_to_json(g).dump(2) + "\n");
    }
    const Dataset d = load_dataset(tag_path);
    Dataset preds{d.scheme, {}};
    for (const LabeledResponse& r : d.records) {
      preds.records.push_back(
          {r.id, r.text, tags_to_spans(gazetteer_tag(r.text, g))});
    }
    save_dataset(preds, tag_out);
    std::cout << preds.records.size() << " tagged records written to "
              << tag_out << "\n";
    return 0;
  }

  if (cmd_score->parsed()) {
    const Dataset gt = load_dataset(score_gt);
    const Dataset pr = load_dataset(score_pred);
    const PraiseLabel label = parse_label_arg(score_label);
    std::map<std::string, TaggedResponse> preds;
    for (const LabeledResponse& r : pr.records) {
      preds[r.id] = spans_to_tags(r);
    }
    const MetricParams params{score_alpha, score_beta};
    const CorpusScores cs = score_corpus(gt, preds, label, params);
    std::cout << "label " << label_name(label) << " over "
              << cs.per_response.size() << " responses (alpha "
              << format_full(params.alpha) << ", beta "
              << format_full(params.beta) << ")\n"
              << "  M-IoU " << format_score3(cs.mean.m_iou) << "  IoU "
              << format_score3(cs.mean.iou) << "  F-beta "
              << format_score3(cs.mean.f_beta) << "\n";
    if (cs.degenerate_count > 0 && cs.mean_excluding_degenerate) {
      std::cout << "  excluding " << cs.degenerate_count
                << " both-empty responses: M-IoU "
                << format_score3(cs.mean_excluding_degenerate->m_iou)
                << "  IoU "
                << format_score3(cs.mean_excluding_degenerate->iou)
                << "  F-beta "
                << format_score3(cs.mean_excluding_degenerate->f_beta) << "\n";
    }
    if (!score_out.empty()) {
      nlohmann::ordered_json j;
      j["label"] = label_name(label);
      j["alpha"] = params.alpha;
      j["beta"] = params.beta;
      j["n"] = cs.per_response.size();
      j["mean"] = scores_json(cs.mean);
      j["degenerate_count"] = cs.degenerate_count;
      j["mean_excluding_degenerate"] =
          cs.mean_excluding_degenerate
              ? scores_json(*cs.mean_excluding_degenerate)
              : nlohmann::ordered_json();
      j["per_response"] = nlohmann::ordered_json::array();
      for (const ResponseScore& r : cs.per_response) {
        j["per_response"].push_back({{"id", r.id},
                                     {"tp", r.counts.tp},
                                     {"fp", r.counts.fp},
                                     {"fn", r.counts.fn},
                                     {"m_iou", r.scores.m_iou},
                                     {"iou", r.scores.iou},
                                     {"f_beta", r.scores.f_beta}});
      }
      write_text_file(score_out, j.dump(2) + "\n");
    }
    return 0;
  }

  if (cmd_compare->parsed()) {
    const std::vector<double> a = load_score_list(cmp_a);
    const std::vector<double> b = load_score_list(cmp_b);
    const Alternative alt = parse_alternative_arg(cmp_alt);
    const MwuResult res = mann_whitney_u(a, b, alt);
    std::cout << "n1 " << a.size() << ", n2 " << b.size() << ", alternative "
              << alternative_name(alt) << "\n"
              << "U1 " << format_full(res.u1) << ", U "
              << format_full(res.u_min) << ", p " << format_full(res.p)
              << " ("
              << (res.method == MwuResult::Method::exact ? "exact"
                                                         : "normal approx")
              << ")\n";
    return 0;
  }

  if (cmd_spans->parsed()) {
    const Dataset d = load_dataset(stats_path);
    const PraiseLabel label = parse_label_arg(stats_label);
    if (!scheme_contains(d.scheme, label)) {
      throw ConfigError("label '" + label_name(label) +
                        "' is not in the dataset scheme");
    }
    const SpanLengthStats st = span_length_stats(d, label);
    std::cout << "spans: " << st.count << "\n";
    for (const auto& [len, count] : st.histogram) {
      std::cout << "  length " << len << ": " << count << "\n";
    }
    if (st.count > 0) {
      std::cout << "mean " << format_full(st.mean) << ", variance "
                << format_full(st.variance) << "\n";
    }
    return 0;
  }

  if (cmd_exp->parsed()) {
    ExperimentConfig cfg = load_experiment_config(exp_config);
    if (exp_seed) cfg.seeds = {*exp_seed};
    if (exp_alpha) cfg.metric.alpha = *exp_alpha;
    if (exp_beta) cfg.metric.beta = *exp_beta;
    if (!exp_outdir.empty()) cfg.output_dir = exp_outdir;
    std::unique_ptr<CompletionProvider> remote;
    if (cfg.backend == Backend::remote) {
      remote = std::make_unique<HttpProvider>(
          cfg.provider, std::make_shared<HttplibTransport>());
    }
    const ExperimentResult res = run_experiment(cfg, remote.get());
    print_warnings(res.warnings);
    std::cout << "rows: " << res.rows.size()
              << ", comparisons: " << res.comparisons.size()
              << ", output: " << cfg.output_dir << "\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const praisekit::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const praisekit::ProviderError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const praisekit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
