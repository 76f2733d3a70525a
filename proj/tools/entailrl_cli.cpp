// entailrl: construct, train, and score entailment trees from the command line.
//
// Subcommands: ingest, pretrain, train, infer, eval, report, gen-synthetic.
// Exit codes: 0 ok, 2 input/validation error, 3 numerical failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "entailrl/dataset.hpp"
#include "entailrl/manifest.hpp"
#include "entailrl/synthetic.hpp"
#include "entailrl/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace entailrl;

namespace {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded())
    throw Error(ErrorCode::MalformedRecord, path + " is not valid JSON");
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << content;
}

std::uint64_t effective_seed(std::uint64_t config_seed) {
  if (const char* env = std::getenv("ENTAILRL_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return config_seed;
}

std::optional<TaskSetting> optional_setting(const std::string& value) {
  if (value.empty()) return std::nullopt;
  return parse_setting(value);
}

std::size_t parse_efficiency(const std::string& value) {
  // accepts "fact-4" or a bare count
  std::string digits = value;
  if (value.rfind("fact-", 0) == 0) digits = value.substr(5);
  std::size_t max_facts = std::strtoull(digits.c_str(), nullptr, 10);
  if (max_facts < 2)
    throw Error(ErrorCode::MalformedRecord, "bad efficiency split: " + value);
  return max_facts;
}

struct DataConfig {
  std::string train_data;
  std::string dev_data;
};

DataConfig data_paths(const json& config) {
  DataConfig paths;
  paths.train_data = config.value("train_data", "");
  paths.dev_data = config.value("dev_data", "");
  if (paths.train_data.empty())
    throw Error(ErrorCode::MalformedRecord, "config missing train_data");
  return paths;
}

void print_ingest_stats(const std::vector<Instance>& instances) {
  std::size_t steps = total_gold_steps(instances);
  std::cout << instances.size() << " instances, " << steps << " steps\n";

  std::map<std::size_t, std::size_t> by_leaves;
  for (const auto& inst : instances) ++by_leaves[inst.gold_tree.leaf_ids().size()];
  std::cout << "leaf-count histogram:";
  for (const auto& [leaves, count] : by_leaves)
    std::cout << "  " << leaves << ":" << count;
  std::cout << "\n";
}

int cmd_ingest(const std::string& input, const std::string& output,
               const std::string& setting) {
  std::vector<Instance> instances = load_jsonl(input, optional_setting(setting));
  print_ingest_stats(instances);
  if (!output.empty()) {
    write_jsonl(instances, output);
    std::cout << "wrote " << output << "\n";
  }
  return 0;
}

EvalOptions eval_options_from(const TrainConfig& cfg) {
  EvalOptions opts;
  opts.mode = cfg.mode;
  opts.in_hoc = cfg.in_hoc;
  opts.aligned_reward = cfg.aligned_reward;
  opts.gamma = cfg.gamma;
  opts.max_steps = cfg.max_steps;
  opts.workers = cfg.workers;
  opts.filter_top_k = cfg.filter_top_k;
  opts.filter_threshold = cfg.filter_threshold;
  opts.apply_filter = cfg.apply_filter;
  return opts;
}

int cmd_train(const std::string& config_path, const std::string& output_dir,
              int rl_epochs_override, int workers_override, bool skip_rl) {
  const char* command = skip_rl ? "pretrain" : "train";
  json config_json = read_json_file(config_path);
  TrainConfig cfg = TrainConfig::from_json(config_json);
  cfg.seed = effective_seed(cfg.seed);
  if (rl_epochs_override >= 0) cfg.rl_epochs = rl_epochs_override;
  if (workers_override >= 0) cfg.workers = workers_override;
  if (skip_rl) cfg.rl_epochs = 0;
  DataConfig paths = data_paths(config_json);

  fs::create_directories(output_dir);
  std::vector<Instance> train_set = load_jsonl(paths.train_data);
  std::vector<Instance> dev_set;
  if (!paths.dev_data.empty()) dev_set = load_jsonl(paths.dev_data);

  // supervised examples come from the unfiltered fact pool; the fact filter
  // applies to rollouts inside train_rl and evaluate
  std::vector<Instance> prepared = prepare_instances(
      train_set, cfg.mode, /*apply_filter=*/false, cfg.filter_top_k,
      cfg.filter_threshold);
  std::vector<GoldStepExample> examples;
  for (const auto& inst : prepared) {
    auto ex = extract_gold_steps(inst);
    examples.insert(examples.end(), ex.begin(), ex.end());
  }

  PolicyParams init;
  PolicyParams pretrained = pretrain(init, examples, cfg);
  pretrained.save(output_dir + "/pretrained.json");
  pretrained.save(output_dir + "/checkpoint.json");  // last-good fallback

  std::ofstream log_out(output_dir + "/train_log.jsonl");
  if (!log_out)
    throw Error(ErrorCode::IoError, "cannot write " + output_dir + "/train_log.jsonl");

  int exit_code = 0;
  try {
    TrainResult result = train_rl(
        pretrained, train_set, cfg, dev_set.empty() ? nullptr : &dev_set,
        [&](const PolicyParams& params, const EpochLog& entry) {
          params.save(output_dir + "/checkpoint.json");
          log_out << entry.to_json().dump() << "\n";
          log_out.flush();
          std::cout << "epoch " << entry.epoch << " ss=" << entry.ss_prob
                    << " mean_reward=" << entry.mean_total_reward
                    << " dev_steps_f1=" << entry.dev_steps_f1 << "\n";
        });
    result.params.save(output_dir + "/checkpoint.json");
  } catch (const Error& e) {
    if (!e.numerical()) throw;
    std::cerr << "training aborted: " << e.what()
              << " (last-good checkpoint retained)\n";
    exit_code = 3;
  }

  RunManifest::create(command, cfg.to_json(), cfg.seed,
                      {config_path, paths.train_data, paths.dev_data})
      .write(output_dir);
  return exit_code;
}

int cmd_pretrain(const std::string& config_path, const std::string& output_dir) {
  return cmd_train(config_path, output_dir, /*rl_epochs_override=*/-1,
                   /*workers_override=*/-1, /*skip_rl=*/true);
}

struct EvalCli {
  std::string checkpoint;
  std::string data;
  std::string output_dir;
  std::string setting = "task1";
  std::string mode = "post-hoc";  // post-hoc | in-hoc
  std::string ablation;           // "exact-reward" disables aligned rewards
  std::string efficiency;
  std::string similarity = "lexical_f1";
  std::string remote_endpoint;
  double threshold = -1.0;  // <0: follow the similarity function's default
  double gamma = 0.99;
  int workers = 0;
  int max_steps = 100;
  bool in_hoc = false;
  bool ablation_exact_reward = false;
  bool no_filter = false;
};

bool parse_mode_flag(const std::string& mode) {
  if (mode == "in-hoc") return true;
  if (mode == "post-hoc") return false;
  throw Error(ErrorCode::MalformedRecord, "unknown mode: " + mode);
}

int cmd_eval(const EvalCli& cli) {
  PolicyParams params = PolicyParams::load(cli.checkpoint);
  std::vector<Instance> dataset = load_jsonl(cli.data);
  if (!cli.efficiency.empty())
    dataset = efficiency_split(dataset, parse_efficiency(cli.efficiency));

  bool exact_ablation = cli.ablation_exact_reward;
  if (!cli.ablation.empty()) {
    if (cli.ablation != "exact-reward")
      throw Error(ErrorCode::MalformedRecord, "unknown ablation: " + cli.ablation);
    exact_ablation = true;
  }

  EvalOptions opts;
  opts.mode = parse_setting(cli.setting);
  opts.in_hoc = cli.in_hoc || parse_mode_flag(cli.mode);
  opts.aligned_reward = !exact_ablation;
  opts.gamma = cli.gamma;
  opts.max_steps = cli.max_steps;
  opts.workers = cli.workers;
  opts.apply_filter = !cli.no_filter;
  opts.sim.function = parse_similarity_fn(cli.similarity);
  opts.sim.threshold =
      cli.threshold >= 0.0 ? cli.threshold : default_threshold(opts.sim.function);
  if (opts.sim.function == SimilarityFn::External)
    throw Error(ErrorCode::UnknownSimilarityFunction,
                "the CLI ships no external similarity model; use lexical_f1");

  GeneratorEndpoint endpoint;
  if (!cli.remote_endpoint.empty()) {
    endpoint.url = cli.remote_endpoint;
    opts.deduce = make_deducer(&endpoint);
  }

  EvalResult result = evaluate(params, dataset, opts);
  std::string tsv = corpus_tsv(result.corpus);
  std::cout << tsv;
  std::cout << "mean_total_reward\t" << result.mean_total_reward << "\n";

  if (!cli.output_dir.empty()) {
    fs::create_directories(cli.output_dir);
    write_text_file(cli.output_dir + "/report.json", result.to_json().dump(2) + "\n");
    write_text_file(cli.output_dir + "/report.tsv", tsv);
    json config{{"checkpoint", cli.checkpoint},
                {"setting", cli.setting},
                {"in_hoc", opts.in_hoc},
                {"ablation_exact_reward", exact_ablation},
                {"similarity", cli.similarity},
                {"threshold", opts.sim.threshold},
                {"efficiency", cli.efficiency}};
    RunManifest::create("eval", config, effective_seed(0), {cli.checkpoint, cli.data})
        .write(cli.output_dir);
  }
  return 0;
}

int cmd_infer(const std::string& checkpoint, const std::string& data,
              const std::string& output_dir, const std::string& setting,
              bool in_hoc, int workers, const std::string& remote_endpoint) {
  PolicyParams params = PolicyParams::load(checkpoint);
  std::vector<Instance> dataset = load_jsonl(data);

  EvalOptions opts;
  opts.mode = parse_setting(setting);
  opts.in_hoc = in_hoc;
  opts.workers = workers;
  GeneratorEndpoint endpoint;
  if (!remote_endpoint.empty()) {
    endpoint.url = remote_endpoint;
    opts.deduce = make_deducer(&endpoint);
  }

  EvalResult result = evaluate(params, dataset, opts);
  fs::create_directories(output_dir);
  std::ofstream out(output_dir + "/predictions.jsonl");
  if (!out)
    throw Error(ErrorCode::IoError, "cannot write " + output_dir + "/predictions.jsonl");
  for (const auto& inst : result.instances) {
    out << json{{"id", inst.id},
                {"proof", inst.predicted_proof},
                {"trajectory", inst.trajectory}}
               .dump()
        << "\n";
  }
  RunManifest::create("infer", json{{"setting", setting}, {"in_hoc", in_hoc}},
                      effective_seed(0), {checkpoint, data})
      .write(output_dir);
  std::cout << "wrote " << result.instances.size() << " predictions\n";
  return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& output) {
  std::ostringstream table;
  table << "run\tleaves_f1\tleaves_allcorrect\tsteps_f1\tsteps_allcorrect\t"
           "intermediates_f1\tintermediates_allcorrect\toverall_allcorrect\n";
  for (const auto& path : inputs) {
    json report = read_json_file(path);
    const json& corpus = report.at("corpus");
    auto pct = [&](const char* key) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.1f", corpus.at(key).get<double>() * 100.0);
      return std::string(buf);
    };
    table << fs::path(path).parent_path().filename().string() << '\t'
          << pct("leaves_f1") << '\t' << pct("leaves_allcorrect") << '\t'
          << pct("steps_f1") << '\t' << pct("steps_allcorrect") << '\t'
          << pct("intermediates_f1") << '\t' << pct("intermediates_allcorrect")
          << '\t' << pct("overall_allcorrect") << '\n';
  }
  std::cout << table.str();
  if (!output.empty()) write_text_file(output, table.str());
  return 0;
}

int cmd_gen_synthetic(const std::string& kind, const std::string& output_dir,
                      int count, std::uint64_t seed, int distractors) {
  fs::create_directories(output_dir);
  if (kind == "separable") {
    auto corpus = synthetic::separable_corpus(count, seed, distractors);
    write_jsonl(corpus, output_dir + "/synthetic.jsonl");
    std::cout << "wrote " << corpus.size() << " instances to " << output_dir
              << "/synthetic.jsonl\n";
  } else if (kind == "official-shape") {
    for (const char* split : {"train", "dev", "test"}) {
      auto instances = synthetic::official_shape_split(split);
      write_jsonl(instances, output_dir + "/" + split + ".jsonl");
      std::cout << split << ": " << instances.size() << " instances, "
                << total_gold_steps(instances) << " steps\n";
    }
  } else {
    throw Error(ErrorCode::MalformedRecord, "unknown corpus kind: " + kind);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entailment-tree construction, training, and evaluation"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "validate and canonicalize a JSONL dataset");
  std::string ingest_input, ingest_output, ingest_setting;
  ingest->add_option("--input", ingest_input, "input JSONL")->required();
  ingest->add_option("--output", ingest_output, "canonical JSONL output path");
  ingest->add_option("--setting", ingest_setting, "force task1|task2|task3");

  // pretrain / train
  auto* pretrain_cmd = app.add_subcommand("pretrain", "supervised pretraining only");
  std::string pre_config, pre_output;
  pretrain_cmd->add_option("--config", pre_config, "config JSON")->required();
  pretrain_cmd->add_option("--output", pre_output, "output directory")->required();

  auto* train_cmd = app.add_subcommand("train", "pretrain then RL training");
  std::string train_config, train_output;
  int train_rl_epochs = -1;
  int train_workers = -1;
  train_cmd->add_option("--config", train_config, "config JSON")->required();
  train_cmd->add_option("--output", train_output, "output directory")->required();
  train_cmd->add_option("--rl-epochs", train_rl_epochs, "override rl_epochs");
  train_cmd->add_option("--workers", train_workers, "override rollout parallelism");

  // infer
  auto* infer_cmd = app.add_subcommand("infer", "greedy tree construction");
  std::string infer_ckpt, infer_data, infer_output, infer_setting = "task1",
              infer_remote;
  bool infer_in_hoc = false;
  int infer_workers = 0;
  infer_cmd->add_option("--checkpoint", infer_ckpt)->required();
  infer_cmd->add_option("--data", infer_data)->required();
  infer_cmd->add_option("--output", infer_output)->required();
  infer_cmd->add_option("--setting", infer_setting);
  infer_cmd->add_flag("--in-hoc", infer_in_hoc, "question-guided mode");
  infer_cmd->add_option("--workers", infer_workers);
  infer_cmd->add_option("--remote-endpoint", infer_remote, "deduction generator URL");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "score a checkpoint against gold trees");
  EvalCli eval_cli;
  eval_cmd->add_option("--checkpoint", eval_cli.checkpoint)->required();
  eval_cmd->add_option("--data", eval_cli.data)->required();
  eval_cmd->add_option("--output", eval_cli.output_dir, "report directory");
  eval_cmd->add_option("--setting", eval_cli.setting, "task1|task2|task3");
  eval_cmd->add_option("--efficiency", eval_cli.efficiency,
                       "keep instances with at most N gold facts, e.g. fact-4");
  eval_cmd->add_option("--similarity", eval_cli.similarity, "lexical_f1|external");
  eval_cmd->add_option("--threshold", eval_cli.threshold,
                       "similarity threshold (defaults per function)");
  eval_cmd->add_option("--gamma", eval_cli.gamma, "reward discount for diagnostics");
  eval_cmd->add_option("--workers", eval_cli.workers);
  eval_cmd->add_option("--max-steps", eval_cli.max_steps);
  eval_cmd->add_option("--remote-endpoint", eval_cli.remote_endpoint);
  eval_cmd->add_option("--mode", eval_cli.mode, "post-hoc|in-hoc");
  eval_cmd->add_option("--ablation", eval_cli.ablation, "exact-reward");
  eval_cmd->add_flag("--in-hoc", eval_cli.in_hoc, "question-guided mode");
  eval_cmd->add_flag("--ablation-exact-reward", eval_cli.ablation_exact_reward,
                     "reward diagnostics without alignment");
  eval_cmd->add_flag("--no-filter", eval_cli.no_filter, "skip the fact filter");

  // report
  auto* report_cmd = app.add_subcommand("report", "tabulate eval report JSON files");
  std::vector<std::string> report_inputs;
  std::string report_output;
  report_cmd->add_option("--input", report_inputs, "report.json paths")->required();
  report_cmd->add_option("--output", report_output, "TSV output path");

  // gen-synthetic
  auto* gen_cmd = app.add_subcommand("gen-synthetic", "write synthetic corpora");
  std::string gen_kind = "separable", gen_output;
  int gen_count = 50, gen_distractors = 0;
  std::uint64_t gen_seed = 7;
  gen_cmd->add_option("--kind", gen_kind, "separable|official-shape");
  gen_cmd->add_option("--output", gen_output, "output directory")->required();
  gen_cmd->add_option("--count", gen_count);
  gen_cmd->add_option("--seed", gen_seed);
  gen_cmd->add_option("--distractors", gen_distractors);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) return cmd_ingest(ingest_input, ingest_output, ingest_setting);
    if (*pretrain_cmd) return cmd_pretrain(pre_config, pre_output);
    if (*train_cmd)
      return cmd_train(train_config, train_output, train_rl_epochs,
                       train_workers, false);
    if (*infer_cmd)
      return cmd_infer(infer_ckpt, infer_data, infer_output, infer_setting,
                       infer_in_hoc, infer_workers, infer_remote);
    if (*eval_cmd) return cmd_eval(eval_cli);
    if (*report_cmd) return cmd_report(report_inputs, report_output);
    if (*gen_cmd)
      return cmd_gen_synthetic(gen_kind, gen_output, gen_count, gen_seed,
                               gen_distractors);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.numerical() ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
