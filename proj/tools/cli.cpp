#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "frad/data.hpp"
#include "frad/datagen.hpp"
#include "frad/eval.hpp"
#include "frad/features.hpp"
#include "frad/model.hpp"
#include "frad/parallel.hpp"
#include "frad/pipeline.hpp"

namespace frad::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr std::string_view kRunConfigFile = "run_config.json";
constexpr std::string_view kDatasetFile = "dataset.csv";
constexpr std::string_view kTrainFile = "train.csv";
constexpr std::string_view kTestFile = "test.csv";
constexpr std::string_view kCorrelationSvg = "correlation.svg";
constexpr std::string_view kCorrelationJson = "correlation.json";
constexpr double kTrainFraction = 0.8;

struct RunConfig {
  std::string subcommand;
  std::string data;
  std::size_t n = 9798;
  double noise = 0.25;
  std::vector<double> proportions{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  double suppression_tx_mean = 20.0;
  std::uint64_t seed = 42;
  std::vector<std::string> models{"rf", "gb", "xgb", "mlp"};
  int hpo_budget = 25;
  int hpo_init = 8;
  bool no_hpo = false;
  int mlp_epochs = 300;
  unsigned threads = 0;
  std::string out_dir;
  std::string output;
  std::string model_path;
};

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << h;
  return ss.str();
}

GeneratorConfig generator_config(const RunConfig& cfg) {
  GeneratorConfig g;
  g.n_total = cfg.n;
  if (cfg.proportions.size() != kNumClasses) throw Error(ErrorCode::InvalidArgument, "--proportions needs 3 values");
  std::copy(cfg.proportions.begin(), cfg.proportions.end(), g.class_proportions.begin());
  g.noise_sigma = cfg.noise;
  g.seed = cfg.seed;
  g.suppression_tx_mean = cfg.suppression_tx_mean;
  validate(g);
  return g;
}

/// Everything that influences results; thread count and paths are excluded.
json canonical_config(const RunConfig& cfg) {
  json j;
  if (cfg.data.empty()) {
    json g;
    g["n_total"] = cfg.n;
    g["class_proportions"] = cfg.proportions;
    g["noise_sigma"] = cfg.noise;
    g["suppression_tx_mean"] = cfg.suppression_tx_mean;
    j["dataset"] = {{"generator", g}};
  } else {
    j["dataset"] = {{"file_fnv1a", fnv1a_hex(read_file(cfg.data))}};
  }
  j["seed"] = cfg.seed;
  j["models"] = cfg.models;
  j["hpo"] = {{"enabled", !cfg.no_hpo}, {"budget", cfg.hpo_budget}, {"n_init", cfg.hpo_init}};
  j["mlp_epochs"] = cfg.mlp_epochs;
  j["train_fraction"] = kTrainFraction;
  return j;
}

struct RunMeta {
  std::string run_id;
  std::string config_hash;
};

RunMeta meta_for(const RunConfig& cfg) {
  RunMeta m;
  m.config_hash = fnv1a_hex(canonical_config(cfg).dump());
  m.run_id = "frad-s" + std::to_string(cfg.seed) + "-" + m.config_hash.substr(0, 8);
  return m;
}

class Logger {
 public:
  explicit Logger(std::ostream& err) : err_(err) {}
  void operator()(const std::string& msg) const { err_ << "frad: " << msg << '\n' << std::flush; }

 private:
  std::ostream& err_;
};

fs::path ensure_dir(const std::string& dir) {
  fs::path p = dir;
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw Error(ErrorCode::Unwritable, "cannot create output directory " + dir);
  return p;
}

std::vector<ModelKind> model_kinds(const RunConfig& cfg) {
  std::vector<ModelKind> out;
  for (const auto& key : cfg.models) {
    auto kind = parse_model_kind(key);
    if (!kind) throw Error(ErrorCode::InvalidArgument, "unknown model '" + key + "' (expected rf, gb, xgb, mlp)");
    if (std::find(out.begin(), out.end(), *kind) == out.end()) out.push_back(*kind);
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "no models selected");
  return out;
}

TrainSettings train_settings(const RunConfig& cfg) {
  TrainSettings s;
  s.hpo = !cfg.no_hpo;
  s.hpo_budget = cfg.hpo_budget;
  s.hpo_init = cfg.hpo_init;
  s.mlp_epochs = cfg.mlp_epochs;
  s.seed = cfg.seed;
  s.threads = cfg.threads == 0 ? default_thread_count() : cfg.threads;
  if (s.hpo && (s.hpo_init < 1 || s.hpo_budget < 1)) throw Error(ErrorCode::InvalidArgument, "HPO budget must be >= 1");
  if (s.mlp_epochs < 1) throw Error(ErrorCode::InvalidArgument, "--mlp-epochs must be >= 1");
  return s;
}

void write_meta_sidecar(const fs::path& artifact, const RunConfig& cfg, const RunMeta& meta) {
  json j;
  j["artifact"] = artifact.filename().string();
  j["run_id"] = meta.run_id;
  j["seed"] = cfg.seed;
  j["config_hash"] = meta.config_hash;
  j["config"] = canonical_config(cfg);
  auto path = artifact;
  path += ".meta.json";
  write_file_atomic(path, j.dump(2) + "\n");
}

/// Loads --data, or generates (and saves into out_dir) a synthetic dataset.
Dataset obtain_dataset(const RunConfig& cfg, const fs::path& out_dir, const RunMeta& meta, const Logger& log) {
  if (!cfg.data.empty()) {
    log("loading " + cfg.data);
    Dataset d = load_dataset(cfg.data);
    log("loaded " + std::to_string(d.n_rows()) + " rows");
    return d;
  }
  log("generating " + std::to_string(cfg.n) + " synthetic rows (noise_sigma=" + format_double(cfg.noise) +
      ", seed=" + std::to_string(cfg.seed) + ")");
  Dataset d = generate_dataset(generator_config(cfg));
  const auto path = out_dir / kDatasetFile;
  save_dataset(d, path);
  write_meta_sidecar(path, cfg, meta);
  return d;
}

int cmd_synth(const RunConfig& cfg, const Logger& log) {
  const RunMeta meta = meta_for(cfg);
  const Dataset d = generate_dataset(generator_config(cfg));
  fs::path path = cfg.output.empty() ? ensure_dir(cfg.out_dir) / kDatasetFile : fs::path(cfg.output);
  if (path.has_parent_path()) ensure_dir(path.parent_path().string());
  save_dataset(d, path);
  write_meta_sidecar(path, cfg, meta);
  log("wrote " + std::to_string(d.n_rows()) + " rows to " + path.string());
  return kOk;
}

void write_correlation(const Dataset& d, const fs::path& out_dir, const RunConfig& cfg, const RunMeta& meta,
                       const Logger& log) {
  const CorrelationMatrix c = pearson_correlation(d.features, d.feature_names);
  render_heatmap(c, out_dir / kCorrelationSvg,
                 "Feature correlation (run " + meta.run_id + ", seed " + std::to_string(cfg.seed) + ")");
  json j;
  j["run_id"] = meta.run_id;
  j["seed"] = cfg.seed;
  j["config_hash"] = meta.config_hash;
  j["feature_names"] = c.feature_names;
  json rows = json::array();
  for (std::size_t i = 0; i < c.entries.rows(); ++i) {
    auto r = c.entries.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  j["pearson"] = rows;
  write_file_atomic(out_dir / kCorrelationJson, j.dump(2) + "\n");
  log("wrote correlation heatmap to " + (out_dir / kCorrelationSvg).string());
}

int cmd_corr(const RunConfig& cfg, const Logger& log) {
  const RunMeta meta = meta_for(cfg);
  const fs::path out_dir = ensure_dir(cfg.out_dir);
  const Dataset d = obtain_dataset(cfg, out_dir, meta, log);
  write_correlation(d, out_dir, cfg, meta, log);
  return kOk;
}

std::string model_file_name(ModelKind kind) { return std::string(model_key(kind)) + ".model.json"; }
std::string trials_file_name(ModelKind kind) { return std::string(model_key(kind)) + ".trials.jsonl"; }

void train_models(const Dataset& data, const RunConfig& cfg, const RunMeta& meta, const fs::path& out_dir,
                  const Logger& log) {
  const auto kinds = model_kinds(cfg);
  const TrainSettings settings = train_settings(cfg);

  const SplitResult split = stratified_split(data, kTrainFraction, cfg.seed);
  save_dataset(split.train, out_dir / kTrainFile);
  save_dataset(split.test, out_dir / kTestFile);
  log("split " + std::to_string(data.n_rows()) + " rows into " + std::to_string(split.train.n_rows()) + " train / " +
      std::to_string(split.test.n_rows()) + " test");

  const Standardizer standardizer = fit_standardizer(split.train.features, split.train.feature_names);
  const Matrix X = apply_standardizer(standardizer, split.train.features);
  const auto y = label_codes(split.train);

  json run = json::object();
  run["run_id"] = meta.run_id;
  run["seed"] = cfg.seed;
  run["config_hash"] = meta.config_hash;
  run["dataset_provenance"] = data.provenance;
  run["config"] = canonical_config(cfg);
  json entries = json::array();

  for (auto kind : kinds) {
    const auto key = std::string(model_key(kind));
    const auto start = std::chrono::steady_clock::now();
    ParamSet hyper = default_hyperparameters(kind);
    std::string trials_file;
    if (settings.hpo) {
      log(key + ": Bayesian search, budget " + std::to_string(settings.hpo_budget));
      const HpoResult search = tune_model(kind, X, y, settings);
      hyper = search.best.params;
      trials_file = trials_file_name(kind);
      write_trial_log(search.trials, out_dir / trials_file);
      log(key + ": best validation accuracy " + format_double(search.best.objective) + " at trial " +
          std::to_string(search.best.index));
    }
    log(key + ": fitting on the full training partition");
    ModelFile file;
    file.model = fit_model(kind, hyper, X, y, settings);
    file.standardizer = standardizer;
    file.feature_names = split.train.feature_names;
    file.seed = cfg.seed;
    file.config_hash = meta.config_hash;
    save_model(file, out_dir / model_file_name(kind));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log(key + ": done in " + format_double(std::round(secs * 10.0) / 10.0) + " s");

    json e;
    e["name"] = key;
    e["model_file"] = model_file_name(kind);
    e["trials_file"] = trials_file.empty() ? json(nullptr) : json(trials_file);
    entries.push_back(e);
  }
  run["models"] = entries;
  write_file_atomic(out_dir / kRunConfigFile, run.dump(2) + "\n");
}

int cmd_train(const RunConfig& cfg, const Logger& log) {
  const RunMeta meta = meta_for(cfg);
  const fs::path out_dir = ensure_dir(cfg.out_dir);
  const Dataset d = obtain_dataset(cfg, out_dir, meta, log);
  train_models(d, cfg, meta, out_dir, log);
  return kOk;
}

void evaluate_models(const fs::path& out_dir, const Logger& log) {
  const auto run_path = out_dir / kRunConfigFile;
  if (!fs::exists(run_path)) throw Error(ErrorCode::MissingFile, "no " + std::string(kRunConfigFile) + " in " + out_dir.string());
  json run;
  try {
    run = json::parse(read_file(run_path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, "malformed " + run_path.string() + ": " + e.what());
  }

  const Dataset test = load_dataset(out_dir / kTestFile);
  const auto y_true = label_codes(test);

  ComparisonInputs in;
  try {
    in.run_id = run.at("run_id").get<std::string>();
    in.seed = run.at("seed").get<std::uint64_t>();
    in.config_hash = run.at("config_hash").get<std::string>();
    in.dataset_provenance = run.at("dataset_provenance").get<std::string>();
    for (const auto& e : run.at("models")) {
      const auto name = e.at("name").get<std::string>();
      const ModelFile f = load_model(out_dir / e.at("model_file").get<std::string>(), test.feature_names);
      const auto y_pred = argmax_rows(predict_raw(f, test.features));
      ModelEntry entry;
      entry.name = name;
      entry.params_json = model_params_json(f.model);
      entry.trials_file = e.at("trials_file").is_null() ? "" : e.at("trials_file").get<std::string>();
      entry.metrics = compute_metrics(confusion_matrix(y_true, y_pred), name);
      log(name + ": test accuracy " + format_double(entry.metrics.accuracy) + ", macro F1 " +
          format_double(entry.metrics.macro_f1));
      in.models.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, "malformed " + run_path.string() + ": " + e.what());
  }
  comparison_report(in, out_dir);
  log("wrote " + (out_dir / kComparisonJson).string());
}

int cmd_evaluate(const RunConfig& cfg, const Logger& log) {
  evaluate_models(cfg.out_dir, log);
  return kOk;
}

int cmd_run_all(const RunConfig& cfg, const Logger& log) {
  const RunMeta meta = meta_for(cfg);
  const fs::path out_dir = ensure_dir(cfg.out_dir);
  log("run " + meta.run_id + " -> " + out_dir.string());
  const Dataset d = obtain_dataset(cfg, out_dir, meta, log);
  write_correlation(d, out_dir, cfg, meta, log);
  train_models(d, cfg, meta, out_dir, log);
  evaluate_models(out_dir, log);
  return kOk;
}

int cmd_predict(const RunConfig& cfg, std::ostream& out, const Logger& log) {
  if (cfg.model_path.empty() || cfg.data.empty()) {
    throw Error(ErrorCode::InvalidArgument, "predict needs --model and --data");
  }
  const ModelFile f = load_model(cfg.model_path, feature_names());
  const Matrix rows = load_feature_rows(cfg.data);
  const Matrix proba = predict_raw(f, rows);
  const auto cls = argmax_rows(proba);
  std::string text = "p_displacement,p_insertion,p_suppression,predicted_label\n";
  for (std::size_t i = 0; i < proba.rows(); ++i) {
    for (double v : proba.row(i)) text += format_double(v) + ",";
    text += std::to_string(cls[i]) + "\n";
  }
  if (cfg.output.empty()) {
    out << text;
  } else {
    write_file_atomic(cfg.output, text);
    log("wrote " + std::to_string(proba.rows()) + " predictions to " + cfg.output);
  }
  return kOk;
}

std::string default_out_dir() {
  const char* env = std::getenv("FRAD_OUT_DIR");
  return env != nullptr && *env != '\0' ? std::string(env) : std::string("frad_out");
}

void add_output_dir(CLI::App& sub, RunConfig& cfg) {
  sub.add_option("--out-dir", cfg.out_dir, "Output directory (default: $FRAD_OUT_DIR or ./frad_out)");
}

void add_generator_options(CLI::App& sub, RunConfig& cfg) {
  sub.add_option("--n", cfg.n, "Number of synthetic rows")->capture_default_str();
  sub.add_option("--noise", cfg.noise, "Observation noise sigma")->capture_default_str()->check(CLI::NonNegativeNumber);
  sub.add_option("--proportions", cfg.proportions, "Class proportions (3 values summing to 1)")->expected(3);
  sub.add_option("--suppression-tx-mean", cfg.suppression_tx_mean, "Mean attacker tx count for suppression")
      ->capture_default_str();
  sub.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
}

void add_data_option(CLI::App& sub, RunConfig& cfg) {
  sub.add_option("--data", cfg.data, "Dataset CSV to use instead of generating one");
}

void add_training_options(CLI::App& sub, RunConfig& cfg) {
  sub.add_option("--models", cfg.models, "Models to run: any of rf,gb,xgb,mlp")->delimiter(',')->capture_default_str();
  sub.add_option("--hpo-budget", cfg.hpo_budget, "Bayesian-search trials per model")->capture_default_str();
  sub.add_option("--hpo-init", cfg.hpo_init, "Initial design size")->capture_default_str();
  sub.add_flag("--no-hpo", cfg.no_hpo, "Skip the search and use default hyperparameters");
  sub.add_option("--mlp-epochs", cfg.mlp_epochs, "MLP training epochs")->capture_default_str();
  sub.add_option("--threads", cfg.threads, "Worker threads (0 = all cores); results do not depend on it");
}

constexpr std::string_view kExitCodeHelp =
    "Exit codes: 0 success, 1 usage error, 2 I/O error (missing or unwritable file), "
    "3 schema error (malformed CSV/model, unknown label, feature mismatch), 4 numeric failure.";

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  cfg.out_dir = default_out_dir();
  CLI::App app{"frad: front-running attack detection toolkit"};
  app.footer(std::string(kExitCodeHelp));
  app.set_config("--config", "", "TOML file with option values (command-line flags override)");
  app.require_subcommand(1);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic labelled dataset");
  add_generator_options(*synth, cfg);
  add_output_dir(*synth, cfg);
  synth->add_option("--output", cfg.output, "Dataset CSV path (default: <out-dir>/dataset.csv)");

  auto* corr = app.add_subcommand("corr", "Feature correlation heatmap");
  add_data_option(*corr, cfg);
  add_generator_options(*corr, cfg);
  add_output_dir(*corr, cfg);

  auto* train = app.add_subcommand("train", "Split, standardize, search hyperparameters, fit and save models");
  add_data_option(*train, cfg);
  add_generator_options(*train, cfg);
  add_training_options(*train, cfg);
  add_output_dir(*train, cfg);

  auto* evaluate = app.add_subcommand("evaluate", "Score saved models on the held-out split and write reports");
  add_output_dir(*evaluate, cfg);

  auto* run_all = app.add_subcommand("run-all", "Generate or load data, then corr, train and evaluate");
  add_data_option(*run_all, cfg);
  add_generator_options(*run_all, cfg);
  add_training_options(*run_all, cfg);
  add_output_dir(*run_all, cfg);

  auto* predict = app.add_subcommand("predict", "Class probabilities for feature rows");
  predict->add_option("--model", cfg.model_path, "Model JSON file")->required();
  predict->add_option("--data", cfg.data, "CSV of feature rows (label column optional)")->required();
  predict->add_option("--output", cfg.output, "Write predictions here instead of stdout");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "frad: error: " << e.what() << '\n';
    if (std::string_view(e.get_name()) == "FileError") return kIo;
    return kUsage;
  }

  const Logger log(err);
  try {
    if (*synth) return cmd_synth(cfg, log);
    if (*corr) return cmd_corr(cfg, log);
    if (*train) return cmd_train(cfg, log);
    if (*evaluate) return cmd_evaluate(cfg, log);
    if (*run_all) return cmd_run_all(cfg, log);
    if (*predict) return cmd_predict(cfg, out, log);
  } catch (const Error& e) {
    err << "frad: error: " << e.what() << '\n';
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    err << "frad: error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace frad::cli
