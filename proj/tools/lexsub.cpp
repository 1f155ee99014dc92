// lexsub command-line entry point.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lexsub/augment.hpp"
#include "lexsub/datasets.hpp"
#include "lexsub/evaluation.hpp"
#include "lexsub/registry.hpp"
#include "lexsub/relations.hpp"
#include "lexsub/service.hpp"
#include "lexsub/wsi.hpp"

using namespace lexsub;

namespace {

struct ModelRef {
  std::string backend;
  std::optional<Injection> injection;
};

void WriteJsonl(const std::string& path, const std::vector<LexSubInstance>& instances) {
  if (path.empty()) {
    WriteInstancesJsonl(std::cout, instances);
    return;
  }
  std::ofstream out(path);
  if (!out) throw LexsubError(ErrorCode::kIo, "cannot write " + path);
  WriteInstancesJsonl(out, instances);
}

// "name" or "name+injection".
ModelRef ParseModelRef(const std::string& text) {
  const auto plus = text.find('+');
  if (plus == std::string::npos) return {text, std::nullopt};
  return {text.substr(0, plus), ParseInjection(text.substr(plus + 1))};
}

Model ResolveModel(const AppConfig& config, const ModelRegistry& registry,
                   const std::string& text) {
  const auto ref = ParseModelRef(text);
  return registry.MakeModel(
      ref.backend, registry.ResolveInjection(ref.backend, ref.injection, config.defaults),
      config.defaults);
}

const DatasetSpec* FindDataset(const AppConfig& config, const std::string& name) {
  for (const auto& d : config.datasets) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

// Named dataset from the config, or a canonical JSONL path.
std::vector<LexSubInstance> LexsubDataset(const AppConfig& config,
                                          const std::string& name) {
  if (const auto* spec = FindDataset(config, name)) {
    auto loaded = LoadDataset(*spec);
    if (!loaded.error.empty()) throw LexsubError(ErrorCode::kIo, loaded.error);
    return loaded.instances;
  }
  return ReadInstancesJsonl(std::filesystem::path(name));
}

std::vector<SlotUtterance> SnipsDataset(const AppConfig& config, const std::string& name) {
  if (const auto* spec = FindDataset(config, name)) return ReadSnips(spec->path);
  return ReadSnips(std::filesystem::path(name));
}

void Emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text << "\n";
  } else {
    WriteTextFile(out, text + "\n");
  }
}

AppConfig ConfigOrEmpty(const std::string& path) {
  return path.empty() ? AppConfig{} : LoadAppConfig(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lexical substitution workbench"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "App config JSON")->envname("LEXSUB_CONFIG");
  bool serial = false;
  app.add_flag("--serial", serial, "Run kernels on one thread");

  // generate
  auto* gen = app.add_subcommand("generate", "Substitutes for one sentence");
  std::string gen_model, gen_sentence, gen_pos = "noun", gen_postproc = "default";
  std::size_t gen_index = 0, gen_topk = 10;
  gen->add_option("--model", gen_model, "backend[+injection]")->required();
  gen->add_option("--sentence", gen_sentence)->required();
  gen->add_option("--target-index", gen_index, "Token index of the target")->required();
  gen->add_option("--pos", gen_pos);
  gen->add_option("--top-k", gen_topk);
  gen->add_option("--postproc", gen_postproc);

  // eval
  auto* eval = app.add_subcommand("eval", "Candidate or all-words evaluation");
  std::string ev_model, ev_dataset, ev_task = "candidate", ev_postproc = "default", ev_out;
  eval->add_option("--model", ev_model)->required();
  eval->add_option("--dataset", ev_dataset, "Config dataset name or JSONL path")->required();
  eval->add_option("--task", ev_task)->check(CLI::IsMember({"candidate", "all-words"}));
  eval->add_option("--postproc", ev_postproc);
  eval->add_option("--out", ev_out, "Report JSON path (default stdout)");

  // grid-search
  auto* grid = app.add_subcommand("grid-search", "Tune temperature and beta on dev GAP");
  std::string gs_model, gs_dataset, gs_postproc = "default";
  grid->add_option("--model", gs_model)->required();
  grid->add_option("--dataset", gs_dataset)->required();
  grid->add_option("--postproc", gs_postproc);

  // wsi
  auto* wsi = app.add_subcommand("wsi", "Induce senses by clustering substitute vectors");
  std::string wsi_model, wsi_dataset, wsi_k = "auto", wsi_out, wsi_report;
  std::size_t wsi_n = kDefaultSubstituteCount;
  wsi->add_option("--model", wsi_model)->required();
  wsi->add_option("--dataset", wsi_dataset, "JSONL with optional \"sense\"")->required();
  wsi->add_option("--n-subst", wsi_n);
  wsi->add_option("--k", wsi_k, "Cluster count or 'auto'");
  wsi->add_option("--out", wsi_out, "SemEval-format key file");
  wsi->add_option("--report", wsi_report, "JSON report path");

  // augment
  auto* aug = app.add_subcommand("augment", "Contextual augmentation of a SNIPS set");
  std::string aug_model, aug_dataset, aug_out;
  std::size_t aug_mult = 1;
  std::uint64_t aug_seed = 0;
  double aug_fraction = 1.0;
  aug->add_option("--model", aug_model)->required();
  aug->add_option("--dataset", aug_dataset)->required();
  aug->add_option("--multiplier", aug_mult);
  aug->add_option("--seed", aug_seed);
  aug->add_option("--fraction", aug_fraction, "Stratified train fraction first");
  aug->add_option("--out", aug_out)->required();

  // relstats
  auto* rel = app.add_subcommand("relstats", "WordNet relation statistics");
  std::string rel_models, rel_dataset, rel_out, rel_chart, rel_hops = "per-side",
                                                            rel_postproc = "default";
  std::size_t rel_topk = 10;
  rel->add_option("--models", rel_models, "Comma-separated models")->required();
  rel->add_option("--dataset", rel_dataset)->required();
  rel->add_option("--topk", rel_topk);
  rel->add_option("--postproc", rel_postproc);
  rel->add_option("--hops", rel_hops)->check(CLI::IsMember({"per-side", "total"}));
  rel->add_option("--out", rel_out);
  rel->add_option("--chart", rel_chart, "Chart data JSON");

  // serve
  auto* serve = app.add_subcommand("serve", "HTTP API");
  int serve_port = 0;
  serve->add_option("--port", serve_port);

  // converters
  auto* coinco = app.add_subcommand("convert-coinco", "CoInCo XML to JSONL");
  std::string cc_xml, cc_split = "all", cc_out;
  coinco->add_option("--xml", cc_xml)->required();
  coinco->add_option("--split", cc_split)->check(CLI::IsMember({"all", "first35", "last65"}));
  coinco->add_option("--out", cc_out, "JSONL path (default stdout)");

  auto* semeval = app.add_subcommand("convert-semeval", "SemEval-2007 gold + XML to JSONL");
  std::string se_gold, se_xml, se_out;
  semeval->add_option("--gold", se_gold)->required();
  semeval->add_option("--xml", se_xml);
  semeval->add_option("--out", se_out, "JSONL path (default stdout)");

  CLI11_PARSE(app, argc, argv);
  const Execution exec = serial ? Execution::kSerial : Execution::kParallel;

  try {
    if (*coinco) {
      WriteJsonl(cc_out, ConvertCoinco(std::filesystem::path(cc_xml),
                                       ParseCoincoSplit(cc_split)));
      return 0;
    }
    if (*semeval) {
      auto instances = load_semeval_gold(std::filesystem::path(se_gold));
      if (!se_xml.empty()) {
        instances = AttachSemevalContexts(std::move(instances), std::filesystem::path(se_xml));
      }
      WriteJsonl(se_out, instances);
      return 0;
    }

    const AppConfig config = ConfigOrEmpty(config_path);
    if (*serve) {
      AppConfig cfg = config;
      if (serve_port != 0) cfg.server.port = serve_port;
      auto service = LexsubService::FromConfig(cfg);
      Serve(*service);
      return 0;
    }
    const ModelRegistry registry = LoadRegistry(config);

    if (*gen) {
      LexSubInstance inst;
      inst.id = "cli";
      inst.tokens = SplitWhitespace(gen_sentence);
      inst.target_index = gen_index;
      inst.pos = ParsePos(gen_pos);
      Validate(inst);
      inst.lemma = DefaultLemmatizer()->Lemmatize(ToLower(inst.target()), inst.pos);
      const auto model = ResolveModel(config, registry, gen_model);
      const auto dist = postprocess(model.generate(inst), inst,
                                    PostprocVariant::Named(gen_postproc));
      Json rows = Json::array();
      for (const auto& [w, p] : rank(dist, gen_topk)) rows.push_back({w, p});
      std::cout << Json{{"model", model.name}, {"substitutes", rows}}.dump(2) << "\n";
      return 0;
    }
    if (*eval) {
      const auto data = LexsubDataset(config, ev_dataset);
      const auto model = ResolveModel(config, registry, ev_model);
      const auto postproc = PostprocVariant::Named(ev_postproc);
      const auto report =
          ev_task == "candidate"
              ? evaluate_candidate_ranking(model, data, build_candidate_pool(data),
                                           postproc, exec)
              : evaluate_all_words(model, data, postproc, exec);
      Json j = ToJson(report);
      j["model"] = model.name;
      Emit(ev_out, j.dump(2));
      std::cerr << model.name << " " << ev_task << ":";
      for (const auto& [k, v] : j["metrics"].items()) {
        if (!v.is_null()) std::cerr << " " << k << "=" << v.get<double>();
      }
      std::cerr << "\n";
      return 0;
    }
    if (*grid) {
      const auto ref = ParseModelRef(gs_model);
      const auto* entry = registry.Find(ref.backend);
      if (entry == nullptr || !entry->estimator) {
        throw LexsubError(ErrorCode::kNotFound, "model '" + ref.backend + "' unavailable");
      }
      const auto result = grid_search(
          entry->estimator,
          MakeEstimatorConfig(
              config.defaults, entry->kind,
              registry.ResolveInjection(ref.backend, ref.injection, config.defaults)),
          LexsubDataset(config, gs_dataset), PostprocVariant::Named(gs_postproc));
      Json grid_json = Json::array();
      for (const auto& p : result.grid) {
        grid_json.push_back({{"temperature", p.temperature}, {"beta", p.beta}, {"gap", p.gap}});
      }
      std::cout << Json{{"best", {{"temperature", result.best.temperature},
                                  {"beta", result.best.beta},
                                  {"gap", result.best.gap}}},
                        {"grid", grid_json}}
                       .dump(2)
                << "\n";
      return 0;
    }
    if (*wsi) {
      const auto* spec = FindDataset(config, wsi_dataset);
      const auto data = ReadWsiJsonl(spec ? spec->path : std::filesystem::path(wsi_dataset));
      WsiOptions options;
      options.n_substitutes = wsi_n;
      options.k = wsi_k == "auto" ? 0 : std::stoul(wsi_k);
      const auto report =
          induce_senses(data, ResolveModel(config, registry, wsi_model), options, exec);
      std::ostringstream key;
      WriteSemevalWsi(key, report);
      if (!wsi_out.empty()) WriteTextFile(wsi_out, key.str());
      Emit(wsi_report, ToJson(report).dump(2));
      return 0;
    }
    if (*aug) {
      auto data = SnipsDataset(config, aug_dataset);
      if (aug_fraction < 1.0) data = subsample_train(data, aug_fraction, aug_seed);
      const auto result = augment_dataset(data, ResolveModel(config, registry, aug_model),
                                          aug_mult, aug_seed, {}, exec);
      WriteTextFile(aug_out, SnipsToJson(result.dataset).dump(2));
      std::cerr << "wrote " << result.dataset.size() << " utterances (" << result.generated
                << " new, " << result.skipped << " skipped)\n";
      return 0;
    }
    if (*rel) {
      if (config.wordnet.empty()) {
        throw LexsubError(ErrorCode::kInvalidArgument, "config has no wordnet path");
      }
      const auto graph = SynsetGraph::FromWordNetDir(config.wordnet);
      const auto data = LexsubDataset(config, rel_dataset);
      RelationOptions options;
      options.hops = rel_hops == "total" ? CoHyponymHops::kTotalPath : CoHyponymHops::kPerSide;
      std::vector<std::pair<std::string, RelationStats>> series;
      std::stringstream names(rel_models);
      std::string name;
      while (std::getline(names, name, ',')) {
        const auto model = ResolveModel(config, registry, name);
        series.emplace_back(model.name,
                            relation_stats(ModelRelationQueries(
                                               model, data, PostprocVariant::Named(rel_postproc),
                                               rel_topk, exec),
                                           graph, std::nullopt, options, exec));
      }
      series.emplace_back("gold", relation_stats(GoldRelationQueries(data), graph,
                                                 std::nullopt, options, exec));
      const Json chart = RelationChartJson(series);
      Json stats = Json::object();
      for (const auto& [model, s] : series) {
        Json row = Json::object();
        for (auto label : kAllRelationLabels) {
          row[std::string(RelationName(label))] = s.percent(label);
        }
        stats[model] = std::move(row);
      }
      Emit(rel_out, Json{{"schema_version", kReportSchemaVersion}, {"percent", stats}}.dump(2));
      if (!rel_chart.empty()) WriteTextFile(rel_chart, chart.dump(2));
      return 0;
    }
  } catch (const LexsubError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
