#include "cli_app.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "distgen/bounds.hpp"
#include "distgen/compression.hpp"
#include "distgen/dataset.hpp"
#include "distgen/distributed.hpp"
#include "distgen/errors.hpp"
#include "distgen/features.hpp"
#include "distgen/learners.hpp"
#include "distgen/rate_distortion.hpp"
#include "distgen/rng.hpp"
#include "distgen/svg.hpp"

namespace distgen {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "distgen 0.1.0";
constexpr const char* kCsvHeader =
    "experiment,K,n,repeat,seed,gen_gap,emp_risk_local,emp_risk_agg,"
    "emp_risk_agg_margin,pop_risk,delta_emp,bound_expected,bound_tail,"
    "bound_centralized";

// Stable, locale-free number formatting for CSV cells.
std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt(*v) : std::string();
}

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where + ": unknown key \"" + key + "\"");
    }
  }
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("JSON parse error in " + path + " at byte " +
                      std::to_string(e.byte) + ": " + e.what());
  }
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".")
                                                    : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
}

void write_run_record(const fs::path& out_dir, const json& config_echo,
                      const std::vector<std::string>& outputs,
                      double wall_ms) {
  json record;
  record["version"] = kVersion;
  record["config"] = config_echo;
  record["outputs"] = outputs;
  record["wall_ms"] = wall_ms;  // nondeterministic section
  write_file(out_dir / "run_record.json", record.dump(2) + "\n");
}

// ---- dataset / feature assembly shared by experiment commands ----

struct DatasetSpec {
  std::string source = "synthetic";  // or "mnist"
  int pos_digit = 1;
  int neg_digit = 6;
  int dim = 32;
  int pool_size = 20000;
  int test_size = 10000;
  double separation = 2.0;
  double label_noise = 0.1;
  bool standardize = true;
  std::uint64_t seed = 101;
};

DatasetSpec parse_dataset(const json& j) {
  DatasetSpec spec;
  if (j.is_null()) return spec;
  reject_unknown_keys(j, {"source", "pos_digit", "neg_digit", "dim", "pool_size",
                          "test_size", "separation", "label_noise",
                          "standardize", "seed"},
                      "dataset");
  spec.source = j.value("source", spec.source);
  if (spec.source != "synthetic" && spec.source != "mnist") {
    throw ConfigError("dataset.source must be \"synthetic\" or \"mnist\"");
  }
  spec.pos_digit = j.value("pos_digit", spec.pos_digit);
  spec.neg_digit = j.value("neg_digit", spec.neg_digit);
  spec.dim = j.value("dim", spec.dim);
  spec.pool_size = j.value("pool_size", spec.pool_size);
  spec.test_size = j.value("test_size", spec.test_size);
  spec.separation = j.value("separation", spec.separation);
  spec.label_noise = j.value("label_noise", spec.label_noise);
  spec.standardize = j.value("standardize", spec.standardize);
  spec.seed = j.value("seed", spec.seed);
  return spec;
}

struct FeatureSpec {
  std::string type = "none";  // or "rff"
  double gamma = 0.01;
  int dim = 2000;
  std::uint64_t seed = 7;
};

FeatureSpec parse_features(const json& j) {
  FeatureSpec spec;
  if (j.is_null()) return spec;
  reject_unknown_keys(j, {"type", "gamma", "dim", "seed"}, "features");
  spec.type = j.value("type", spec.type);
  if (spec.type != "none" && spec.type != "rff") {
    throw ConfigError("features.type must be \"none\" or \"rff\"");
  }
  spec.gamma = j.value("gamma", spec.gamma);
  spec.dim = j.value("dim", spec.dim);
  spec.seed = j.value("seed", spec.seed);
  return spec;
}

SgdParams parse_sgd(const json& j) {
  SgdParams p;
  if (j.is_null()) return p;
  reject_unknown_keys(j, {"eta0", "alpha", "batch_size", "max_epochs",
                          "lr_decay_factor", "no_improve_tol",
                          "no_improve_epochs", "target_train_risk"},
                      "sgd");
  p.eta0 = j.value("eta0", p.eta0);
  p.alpha = j.value("alpha", p.alpha);
  p.batch_size = j.value("batch_size", p.batch_size);
  p.max_epochs = j.value("max_epochs", p.max_epochs);
  p.lr_decay_factor = j.value("lr_decay_factor", p.lr_decay_factor);
  p.no_improve_tol = j.value("no_improve_tol", p.no_improve_tol);
  p.no_improve_epochs = j.value("no_improve_epochs", p.no_improve_epochs);
  p.target_train_risk = j.value("target_train_risk", p.target_train_risk);
  return p;
}

struct LoadedData {
  Dataset pool;
  Dataset test;
};

LoadedData load_data(const DatasetSpec& spec, bool force_synthetic) {
  LoadedData data;
  if (spec.source == "mnist" && !force_synthetic) {
    const char* env = std::getenv("DISTGEN_DATA_DIR");
    if (env == nullptr) {
      throw DataError(
          "dataset.source is \"mnist\" but DISTGEN_DATA_DIR is unset "
          "(hint: point it at the IDX files or pass --synthetic)");
    }
    const fs::path dir(env);
    const auto train_images = dir / "train-images-idx3-ubyte";
    const auto train_labels = dir / "train-labels-idx1-ubyte";
    const auto test_images = dir / "t10k-images-idx3-ubyte";
    const auto test_labels = dir / "t10k-labels-idx1-ubyte";
    for (const auto& p : {train_images, train_labels, test_images, test_labels}) {
      if (!fs::exists(p)) {
        throw DataError("missing MNIST file " + p.string() +
                        " (hint: pass --synthetic for the synthetic fallback)");
      }
    }
    data.pool = filter_binary(load_idx(train_images.string(), train_labels.string()),
                              spec.pos_digit, spec.neg_digit);
    data.test = filter_binary(load_idx(test_images.string(), test_labels.string()),
                              spec.pos_digit, spec.neg_digit);
  } else {
    data.pool = synth_two_gaussians(spec.dim, spec.pool_size, spec.separation,
                                    spec.label_noise, spec.seed);
    data.test = synth_two_gaussians(spec.dim, spec.test_size, spec.separation,
                                    spec.label_noise,
                                    child_seed(spec.seed, "test-split"));
  }
  if (spec.standardize) {
    const auto stats = standardize_fit(data.pool);
    data.pool = standardize_apply(data.pool, stats);
    data.test = standardize_apply(data.test, stats);
  }
  return data;
}

LoadedData apply_features(LoadedData data, const FeatureSpec& spec) {
  if (spec.type == "rff") {
    RffMap map(data.pool.dim(), spec.dim, spec.gamma, spec.seed);
    data.pool = map.transform(data.pool);
    data.test = map.transform(data.test);
  }
  return data;
}

// ---- CSV assembly ----

std::string sweep_csv(const SweepTable& table) {
  std::ostringstream csv;
  csv << kCsvHeader << "\n";
  for (const auto& row : table.rows) {
    csv << row.experiment << ',' << row.clients << ',' << row.samples_per_client
        << ',' << row.repeat << ',' << row.seed << ','
        << fmt(row.report.gen_gap_theta) << ',' << fmt(row.report.local_emp_risk)
        << ',' << fmt(row.report.agg_emp_risk) << ','
        << fmt(row.report.agg_emp_risk_margin) << ',' << fmt(row.report.pop_risk)
        << ',' << fmt(row.report.delta_emp) << ',' << fmt_opt(row.bound_expected)
        << ',' << fmt_opt(row.bound_tail) << ',' << fmt_opt(row.bound_centralized)
        << "\n";
  }
  for (const auto& cell : table.cells) {
    csv << cell.experiment << "-mean," << cell.clients << ','
        << cell.samples_per_client << ",,," << fmt(cell.mean_gen_gap) << ",,,,"
        << fmt(cell.mean_pop_risk) << ',' << fmt(cell.mean_delta_emp) << ','
        << fmt_opt(cell.bound_expected) << ',' << fmt_opt(cell.bound_tail) << ','
        << fmt_opt(cell.bound_centralized) << "\n";
    csv << cell.experiment << "-se," << cell.clients << ','
        << cell.samples_per_client << ",,," << fmt(cell.se_gen_gap) << ",,,,"
        << fmt(cell.se_pop_risk) << ',' << fmt(cell.se_delta_emp) << ",,,\n";
  }
  return csv.str();
}

// ---- subcommand payloads ----

struct CommonOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  bool synthetic = false;
  int threads = 1;
  bool no_plots = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "JSON config file");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "master seed override");
  cmd->add_flag("--synthetic", opts.synthetic, "force the synthetic dataset");
  cmd->add_option("--threads", opts.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--no-plots", opts.no_plots, "skip SVG emission");
}

int cmd_dsvm_sweep(const CommonOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  json cfg = opts.config_path.empty() ? json::object() : load_json_file(opts.config_path);
  reject_unknown_keys(cfg, {"dataset", "features", "sweep", "sgd", "master_seed",
                            "bounds"},
                      "dsvm-sweep config");
  const auto data_spec = parse_dataset(cfg.value("dataset", json()));
  const auto feat_spec = parse_features(cfg.value("features", json()));
  const SgdParams sgd = parse_sgd(cfg.value("sgd", json()));

  SweepConfig sweep;
  sweep.master_seed = opts.seed.value_or(cfg.value("master_seed", 1234ULL));
  sweep.threads = opts.threads;
  if (cfg.contains("sweep")) {
    const auto& s = cfg["sweep"];
    reject_unknown_keys(s, {"clients", "samples", "repeats", "theta"}, "sweep");
    sweep.clients_grid = s.value("clients", std::vector<int>{1, 5, 10, 25, 50});
    sweep.samples_grid = s.value("samples", std::vector<int>{100});
    sweep.repeats = s.value("repeats", 10);
    sweep.theta = s.value("theta", 0.2);
  } else {
    sweep.clients_grid = {1, 5, 10, 25, 50};
    sweep.samples_grid = {100};
  }
  if (cfg.contains("bounds")) {
    const auto& b = cfg["bounds"];
    reject_unknown_keys(b, {"fill", "feature_norm_bound"}, "bounds");
    sweep.fill_bounds = b.value("fill", true);
    if (b.contains("feature_norm_bound") && !b["feature_norm_bound"].is_null()) {
      sweep.feature_norm_bound = b["feature_norm_bound"].get<double>();
    }
  }

  const auto data = apply_features(load_data(data_spec, opts.synthetic), feat_spec);
  const auto table = run_sweep(data.pool, data.test, sweep, sgd);

  const fs::path out_dir(opts.out_dir);
  write_file(out_dir / "sweep.csv", sweep_csv(table));
  std::vector<std::string> outputs = {"sweep.csv"};

  if (!opts.no_plots) {
    for (const int n : sweep.samples_grid) {
      SvgChart chart;
      chart.title = "generalization gap vs clients (n=" + std::to_string(n) + ")";
      chart.x_label = "clients K";
      chart.y_label = "gap / bound";
      chart.log_y = true;
      SvgSeries dist{"distributed", {}, {}}, cent{"centralized", {}, {}};
      SvgSeries bdist{"bound (distributed)", {}, {}}, bcent{"bound (centralized)", {}, {}};
      for (const auto& cell : table.cells) {
        if (cell.samples_per_client != n) continue;
        const double k = cell.clients;
        if (cell.experiment == "dsvm") {
          dist.x.push_back(k);
          dist.y.push_back(cell.mean_gen_gap);
          if (cell.bound_expected) {
            bdist.x.push_back(k);
            bdist.y.push_back(*cell.bound_expected);
          }
          if (cell.bound_centralized) {
            bcent.x.push_back(k);
            bcent.y.push_back(*cell.bound_centralized);
          }
        } else {
          cent.x.push_back(k);
          cent.y.push_back(cell.mean_gen_gap);
        }
      }
      chart.series = {dist, cent};
      if (!bdist.x.empty()) chart.series.push_back(bdist);
      if (!bcent.x.empty()) chart.series.push_back(bcent);
      const std::string name = "sweep_n" + std::to_string(n) + ".svg";
      write_file(out_dir / name, render_svg(chart));
      outputs.push_back(name);
    }
  }

  const double wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();
  json echo = cfg;
  echo["resolved_master_seed"] = sweep.master_seed;
  write_run_record(out_dir, echo, outputs, wall);
  std::cout << "wrote " << (out_dir / "sweep.csv").string() << " ("
            << table.rows.size() << " rows)\n";
  return 0;
}

int cmd_population_study(const CommonOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  json cfg = opts.config_path.empty() ? json::object() : load_json_file(opts.config_path);
  reject_unknown_keys(cfg, {"dataset", "features", "clients", "samples",
                            "repeats", "limit_replicas", "sgd", "master_seed"},
                      "population-study config");
  const auto data_spec = parse_dataset(cfg.value("dataset", json()));
  const auto feat_spec = parse_features(cfg.value("features", json()));
  const SgdParams sgd = parse_sgd(cfg.value("sgd", json()));
  const auto clients = cfg.value("clients", std::vector<int>{1, 2, 5, 10, 25, 50, 100, 200});
  const int samples = cfg.value("samples", 100);
  const int repeats = cfg.value("repeats", 10);
  const int limit_replicas = cfg.value("limit_replicas", 200);
  const std::uint64_t master_seed = opts.seed.value_or(cfg.value("master_seed", 4321ULL));

  const auto data = apply_features(load_data(data_spec, opts.synthetic), feat_spec);

  SweepConfig sweep;
  sweep.clients_grid = clients;
  sweep.samples_grid = {samples};
  sweep.repeats = repeats;
  sweep.master_seed = master_seed;
  sweep.theta = 0.0;
  sweep.fill_bounds = false;
  sweep.threads = opts.threads;
  const auto table = run_sweep(data.pool, data.test, sweep, sgd);

  const auto limit = estimate_limit_gap(data.pool, data.test, samples, sgd,
                                        limit_replicas,
                                        child_seed(master_seed, "limit"));

  const fs::path out_dir(opts.out_dir);
  std::ostringstream csv;
  csv << sweep_csv(table);
  // The limit estimate is K-independent; emitted as its own row with the
  // value in delta_emp and its standard error in pop_risk's se row slot.
  csv << "limit,,,," << "," << "" << ",,,," << fmt(limit.pop_at_mean) << ','
      << fmt(limit.value) << ",,,\n";
  csv << "limit-se,,,,," << "" << ",,,," << fmt(limit.std_err) << ','
      << fmt(limit.std_err) << ",,,\n";
  write_file(out_dir / "population.csv", csv.str());
  std::vector<std::string> outputs = {"population.csv"};

  if (!opts.no_plots) {
    SvgChart chart;
    chart.title = "population risk and empirical-risk bias vs clients";
    chart.x_label = "clients K";
    chart.y_label = "risk";
    SvgSeries pop{"pop risk (distributed)", {}, {}};
    SvgSeries cpop{"pop risk (centralized)", {}, {}};
    SvgSeries delta{"delta emp", {}, {}};
    SvgSeries limit_line{"limit", {}, {}};
    for (const auto& cell : table.cells) {
      if (cell.experiment == "dsvm") {
        pop.x.push_back(cell.clients);
        pop.y.push_back(cell.mean_pop_risk);
        delta.x.push_back(cell.clients);
        delta.y.push_back(cell.mean_delta_emp);
        limit_line.x.push_back(cell.clients);
        limit_line.y.push_back(limit.value);
      } else {
        cpop.x.push_back(cell.clients);
        cpop.y.push_back(cell.mean_pop_risk);
      }
    }
    chart.series = {pop, cpop, delta, limit_line};
    write_file(out_dir / "population.svg", render_svg(chart));
    outputs.push_back("population.svg");
  }

  json summary;
  summary["limit_estimate"] = limit.value;
  summary["limit_std_err"] = limit.std_err;
  summary["pop_at_mean_hypothesis"] = limit.pop_at_mean;
  summary["mean_own_empirical_risk"] = limit.mean_emp;
  write_file(out_dir / "population_summary.json", summary.dump(2) + "\n");
  outputs.push_back("population_summary.json");

  const double wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();
  json echo = cfg;
  echo["resolved_master_seed"] = master_seed;
  write_run_record(out_dir, echo, outputs, wall);
  std::cout << "wrote " << (out_dir / "population.csv").string() << "\n";
  return 0;
}

int cmd_fsgld(const CommonOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  json cfg = opts.config_path.empty() ? json::object() : load_json_file(opts.config_path);
  reject_unknown_keys(cfg, {"dataset", "clients", "samples", "minibatch_size",
                            "rounds", "eta", "beta", "replicas", "polyak",
                            "sigma", "master_seed", "variance_mode"},
                      "fsgld config");
  const auto data_spec = parse_dataset(cfg.value("dataset", json()));
  const auto clients_grid = cfg.value("clients", std::vector<int>{1, 4, 16});
  const int samples = cfg.value("samples", 32);
  const int minibatch_size = cfg.value("minibatch_size", 8);
  const int rounds = cfg.value("rounds", 200);
  const int replicas = cfg.value("replicas", 20);
  const bool polyak = cfg.value("polyak", true);
  const double sigma = cfg.value("sigma", 1.0);
  const std::string variance_mode = cfg.value("variance_mode", std::string("replicas"));
  if (variance_mode != "replicas" && variance_mode != "proxy") {
    throw ConfigError("fsgld.variance_mode must be \"replicas\" or \"proxy\"");
  }
  const std::uint64_t master_seed = opts.seed.value_or(cfg.value("master_seed", 777ULL));
  if (samples % minibatch_size != 0) {
    throw ConfigError("fsgld: samples must be divisible by minibatch_size");
  }
  const int minibatch_count = samples / minibatch_size;

  const auto eta_json = cfg.value("eta", json(0.05));
  const auto beta_json = cfg.value("beta", json(1e4));
  const auto expand = [&](const json& j, const char* name) {
    std::vector<double> out;
    if (j.is_number()) {
      out.assign(static_cast<std::size_t>(rounds), j.get<double>());
    } else if (j.is_array()) {
      out = j.get<std::vector<double>>();
      if (out.size() != static_cast<std::size_t>(rounds)) {
        throw ConfigError(std::string(name) + " schedule length must equal rounds");
      }
    } else {
      throw ConfigError(std::string(name) + " must be a number or an array");
    }
    return out;
  };

  const auto data = load_data(data_spec, opts.synthetic);

  std::ostringstream csv;
  csv << kCsvHeader << "\n";
  json summary = json::array();
  for (const int k : clients_grid) {
    FsgldConfig config;
    config.clients = k;
    config.samples_per_client = samples;
    config.minibatch_size = minibatch_size;
    config.schedule = FsgldSchedule::cyclic(rounds, 0.0, 0.0, minibatch_count);
    config.schedule.eta = expand(eta_json, "eta");
    config.schedule.beta = expand(beta_json, "beta");
    config.polyak_average = polyak;
    config.seed = child_seed(master_seed, "fsgld-k", static_cast<std::uint64_t>(k));

    const auto study = run_fsgld_replicas(data.pool, data.test, config,
                                          surrogate_grad_logistic, replicas,
                                          sigma, config.seed);
    FsgldBoundInputs inputs = study.bound_inputs;
    if (variance_mode == "proxy") {
      FsgldConfig proxy_cfg = config;
      proxy_cfg.seed = child_seed(config.seed, "fsgld-replica", 0);
      inputs.grad_variance =
          fsgld_variance_proxy(data.pool, proxy_cfg, study.traces.front(),
                               surrogate_grad_logistic);
    }
    const double bound = fsgld_bound(inputs);

    csv << "fsgld," << k << ',' << samples << ",," << config.seed << ','
        << fmt(study.mean_gen_gap) << ",,,,,," << fmt(bound) << ",,\n";

    json cell;
    cell["clients"] = k;
    cell["samples"] = samples;
    cell["rounds"] = rounds;
    cell["replicas"] = replicas;
    cell["mean_gen_gap"] = study.mean_gen_gap;
    cell["gen_gap_std_err"] = study.gen_gap_std_err;
    cell["bound"] = bound;
    cell["bound_label"] =
        k == 1 ? "single-client (Wang-form)" : "federated (K-client form)";
    cell["variance_mode"] = variance_mode;
    summary.push_back(cell);
  }

  const fs::path out_dir(opts.out_dir);
  write_file(out_dir / "fsgld.csv", csv.str());
  write_file(out_dir / "fsgld_summary.json", summary.dump(2) + "\n");

  const double wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();
  json echo = cfg;
  echo["resolved_master_seed"] = master_seed;
  write_run_record(out_dir, echo, {"fsgld.csv", "fsgld_summary.json"}, wall);
  std::cout << summary.dump(2) << "\n";
  return 0;
}

Eigen::MatrixXd json_matrix(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw ConfigError(name + " must be a 2-D array");
  }
  const std::size_t rows = j.size(), cols = j[0].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols) throw ConfigError(name + " rows are ragged");
    for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
  }
  return m;
}

int cmd_rd_solve(const CommonOptions& opts, const std::string& instance_path) {
  const json inst = load_json_file(instance_path);
  reject_unknown_keys(inst, {"type", "source", "distortion", "epsilon", "tol",
                             "joint", "gen", "gen_hat", "joint_su", "gen_bar",
                             "delta", "mixture_steps"},
                      "rd-solve instance");
  const std::string type = inst.value("type", std::string("classic"));
  const double epsilon = inst.at("epsilon").get<double>();
  RdSolveOptions solve;
  solve.tol = inst.value("tol", 1e-6);

  json result;
  result["input"] = inst;
  if (type == "classic") {
    RdInstance rd;
    rd.source.probs = inst.at("source").get<std::vector<double>>();
    rd.distortion = json_matrix(inst.at("distortion"), "distortion");
    result["rate_nats"] = rd_at_distortion(rd, epsilon, solve);
  } else if (type == "algorithm") {
    AlgorithmRdInstance rd;
    rd.joint = json_matrix(inst.at("joint"), "joint");
    rd.gen = json_matrix(inst.at("gen"), "gen");
    rd.gen_hat = json_matrix(inst.at("gen_hat"), "gen_hat");
    result["rate_nats"] = algorithm_rd(rd, epsilon, solve);
  } else if (type == "conditional" || type == "robust") {
    ConditionalRdInstance rd;
    rd.joint_su = json_matrix(inst.at("joint_su"), "joint_su");
    rd.gen_bar = json_matrix(inst.at("gen_bar"), "gen_bar");
    for (const auto& g : inst.at("gen_hat")) {
      rd.gen_hat.push_back(json_matrix(g, "gen_hat[u]"));
    }
    if (type == "conditional") {
      result["rate_nats"] = conditional_algorithm_rd(rd, epsilon, solve);
    } else {
      RobustGridSpec spec;
      spec.mixture_steps = inst.value("mixture_steps", 8);
      result["rate_nats"] = robust_rd(rd, inst.at("delta").get<double>(),
                                      epsilon, spec, solve);
      result["semantics"] = "grid lower estimate of the sup";
    }
  } else {
    throw ConfigError("rd-solve: unknown instance type \"" + type + "\"");
  }

  const fs::path out_dir(opts.out_dir);
  write_file(out_dir / "rd_solve.json", result.dump(2) + "\n");
  std::cout << result.dump(2) << "\n";
  return 0;
}

int cmd_jl_validate(const CommonOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  json cfg = opts.config_path.empty() ? json::object() : load_json_file(opts.config_path);
  reject_unknown_keys(cfg, {"grid", "model", "mc_samples", "matrix_samples",
                            "master_seed", "term3_check"},
                      "jl-validate config");
  const int mc_samples = cfg.value("mc_samples", 10000);
  const int matrix_samples = cfg.value("matrix_samples", 20);
  const std::uint64_t master_seed = opts.seed.value_or(cfg.value("master_seed", 555ULL));

  ValidationModel model;
  if (cfg.contains("model")) {
    const auto& m = cfg["model"];
    reject_unknown_keys(m, {"dim", "feature_norm_bound", "typical_norm"}, "model");
    model.dim = m.value("dim", model.dim);
    model.feature_norm_bound = m.value("feature_norm_bound", model.feature_norm_bound);
    model.typical_norm = m.value("typical_norm", model.typical_norm);
  }

  std::vector<CompressionParams> grid;
  if (cfg.contains("grid")) {
    for (const auto& g : cfg["grid"]) {
      reject_unknown_keys(g, {"clients", "theta", "feature_norm_bound", "jl_dim",
                              "c1", "c2", "nu"},
                          "grid entry");
      const int clients = g.value("clients", 10);
      const double theta = g.value("theta", 0.2);
      const double bound_B = g.value("feature_norm_bound", 1.0);
      auto params = CompressionParams::from_bound_params(
          SvmBoundParams::fit_defaults(1, clients, theta, bound_B));
      if (g.contains("jl_dim")) params.jl_dim = g["jl_dim"].get<int>();
      if (g.contains("c1")) params.c1 = g["c1"].get<double>();
      if (g.contains("c2")) params.c2 = g["c2"].get<double>();
      if (g.contains("nu")) params.nu = g["nu"].get<double>();
      grid.push_back(params);
    }
  } else {
    grid.push_back(CompressionParams::from_bound_params(
        SvmBoundParams::fit_defaults(1, 10, 0.2, 1.0)));
  }

  const auto report = validate_lemma3(grid, model, mc_samples, matrix_samples,
                                      master_seed);

  json out;
  out["all_pass"] = report.all_pass;
  out["points"] = json::array();
  std::ostringstream csv;
  csv << "jl_dim,c1,c2,nu,clients,theta,B,empirical_mean,std_err,analytic_eps,"
         "pass,term1,term2,term3,term4\n";
  for (const auto& p : report.points) {
    json point;
    point["jl_dim"] = p.params.jl_dim;
    point["c1"] = p.params.c1;
    point["c2"] = p.params.c2;
    point["nu"] = p.params.nu;
    point["clients"] = p.params.clients;
    point["theta"] = p.params.margin;
    point["feature_norm_bound"] = p.params.feature_norm_bound;
    point["empirical_mean"] = p.empirical_mean;
    point["std_err"] = p.std_err;
    point["analytic_epsilon"] = p.analytic_epsilon;
    point["pass"] = p.pass;
    point["terms"] = {p.term1, p.term2, p.term3, p.term4};
    out["points"].push_back(point);
    csv << p.params.jl_dim << ',' << fmt(p.params.c1) << ',' << fmt(p.params.c2)
        << ',' << fmt(p.params.nu) << ',' << p.params.clients << ','
        << fmt(p.params.margin) << ',' << fmt(p.params.feature_norm_bound) << ','
        << fmt(p.empirical_mean) << ',' << fmt(p.std_err) << ','
        << fmt(p.analytic_epsilon) << ',' << (p.pass ? 1 : 0) << ','
        << fmt(p.term1) << ',' << fmt(p.term2) << ',' << fmt(p.term3) << ','
        << fmt(p.term4) << "\n";
  }

  const fs::path out_dir(opts.out_dir);
  write_file(out_dir / "jl_validate.json", out.dump(2) + "\n");
  write_file(out_dir / "jl_validate.csv", csv.str());
  const double wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();
  write_run_record(out_dir, cfg, {"jl_validate.json", "jl_validate.csv"}, wall);
  std::cout << out.dump(2) << "\n";
  return report.all_pass ? 0 : 4;
}

struct BoundsOptions {
  int n = 100;
  int clients = 10;
  double theta = 0.2;
  double feature_norm_bound = 1.0;
  double delta = 0.05;
  double sigma = 1.0;
  bool optimize = false;
};

int cmd_bounds(const CommonOptions& opts, const BoundsOptions& b) {
  const auto params = SvmBoundParams::fit_defaults(
      b.n, b.clients, b.theta, b.feature_norm_bound, b.delta, b.sigma);
  const auto eps = epsilon_terms(params);

  json out;
  out["input"] = {{"n", b.n},
                  {"clients", b.clients},
                  {"theta", b.theta},
                  {"feature_norm_bound", b.feature_norm_bound},
                  {"delta", b.delta},
                  {"sigma", b.sigma}};
  out["params"] = {{"jl_dim", params.jl_dim},
                   {"c1", params.c1},
                   {"c2", params.c2},
                   {"nu", params.nu}};
  out["epsilon"] = {{"term1", eps.term1},
                    {"term2", eps.term2},
                    {"term2_log", eps.term2_log},
                    {"term3", eps.term3},
                    {"term4", eps.term4},
                    {"total", eps.total}};
  out["rate_nats"] = dsvm_rate_term(params);
  out["expected_bound"] = dsvm_expected_bound(params);
  out["tail_bound"] = dsvm_tail_bound(params);
  out["centralized_expected_bound"] = centralized_expected_bound(
      b.n, b.clients, b.theta, b.feature_norm_bound, b.sigma);
  if (b.optimize) {
    const auto best = optimize_svm_bound(b.n, b.clients, b.theta,
                                         b.feature_norm_bound);
    out["optimized"] = {{"value", best.value},
                        {"jl_dim", best.params.jl_dim},
                        {"c1", best.params.c1},
                        {"c2", best.params.c2},
                        {"nu", best.params.nu}};
  }

  const fs::path out_dir(opts.out_dir);
  write_file(out_dir / "bounds.json", out.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"distributed-learning generalization toolkit"};
  app.require_subcommand(1);

  CommonOptions sweep_opts, pop_opts, fsgld_opts, rd_opts, jl_opts, bounds_common;
  BoundsOptions bounds_opts;
  std::string rd_instance;

  auto* sweep = app.add_subcommand("dsvm-sweep", "distributed-vs-centralized SVM sweep");
  add_common(sweep, sweep_opts);
  auto* pop = app.add_subcommand("population-study", "population risk and bias term study");
  add_common(pop, pop_opts);
  auto* fsgld = app.add_subcommand("fsgld", "federated Langevin dynamics with its bound");
  add_common(fsgld, fsgld_opts);
  auto* rd = app.add_subcommand("rd-solve", "rate-distortion solvers on a JSON instance");
  add_common(rd, rd_opts);
  rd->add_option("instance", rd_instance, "instance JSON file")->required();
  auto* jl = app.add_subcommand("jl-validate", "distortion bound validation");
  add_common(jl, jl_opts);
  auto* bounds = app.add_subcommand("bounds", "closed-form bound evaluation");
  add_common(bounds, bounds_common);
  bounds->add_option("--n", bounds_opts.n, "samples per client");
  bounds->add_option("--clients", bounds_opts.clients, "number of clients K");
  bounds->add_option("--theta", bounds_opts.theta, "margin");
  bounds->add_option("--feature-norm-bound", bounds_opts.feature_norm_bound,
                     "norm bound B");
  bounds->add_option("--delta", bounds_opts.delta, "tail confidence");
  bounds->add_option("--sigma", bounds_opts.sigma, "subgaussian parameter");
  bounds->add_flag("--optimize", bounds_opts.optimize,
                   "search (m, c1, c2, nu) for a smaller bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sweep->parsed()) return cmd_dsvm_sweep(sweep_opts);
    if (pop->parsed()) return cmd_population_study(pop_opts);
    if (fsgld->parsed()) return cmd_fsgld(fsgld_opts);
    if (rd->parsed()) return cmd_rd_solve(rd_opts, rd_instance);
    if (jl->parsed()) return cmd_jl_validate(jl_opts);
    if (bounds->parsed()) return cmd_bounds(bounds_common, bounds_opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 4;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> argv_storage = args;
  argv_storage.insert(argv_storage.begin(), "distgen");
  std::vector<char*> argv;
  argv.reserve(argv_storage.size());
  for (auto& s : argv_storage) argv.push_back(s.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace distgen
