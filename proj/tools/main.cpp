// sptopics: topic discovery over bag-of-words matrices via sparse PCA.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"
#include "sptopics/corpus.hpp"
#include "sptopics/error.hpp"
#include "sptopics/matrix.hpp"
#include "sptopics/predict.hpp"
#include "sptopics/serialize.hpp"
#include "sptopics/spca.hpp"
#include "sptopics/synth.hpp"
#include "sptopics/topics.hpp"

namespace {

using nlohmann::json;
using namespace sptopics;

struct SolverOpts {
  std::size_t restarts = 16;
  std::size_t max_iters = 200;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = library default (all cores)
};

void add_solver_flags(CLI::App* cmd, SolverOpts& opts) {
  cmd->add_option("--restarts", opts.restarts, "Solver restarts per component");
  cmd->add_option("--max-iters", opts.max_iters, "Iteration cap per restart");
  cmd->add_option("--tol", opts.tol, "Relative objective tolerance");
  cmd->add_option("--seed", opts.seed, "Seed for all randomness");
  cmd->add_option("--threads", opts.threads, "Worker threads (0 = all cores)");
}

SolverConfig make_config(const SolverOpts& opts, std::size_t s, std::size_t k) {
  SolverConfig config;
  config.sparsity = s;
  config.n_components = k;
  config.max_iters = opts.max_iters;
  config.rel_tol = opts.tol;
  config.n_restarts = opts.restarts;
  config.seed = opts.seed;
  return config;
}

void apply_threads(int threads) {
  if (threads < 0) fail(ErrorKind::Config, "--threads must be >= 0");
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif
}

MatrixFormat parse_format(const std::string& format) {
  if (format == "mm") return MatrixFormat::MatrixMarket;
  if (format == "csv") return MatrixFormat::DenseCsv;
  fail(ErrorKind::Config, "unknown format '" + format + "' (use mm or csv)");
}

WeightVector make_weights(const std::string& mode, const HistogramMatrix& h) {
  if (mode == "tfidf") return compute_tfidf(h);
  if (mode == "ones") return unit_weights(h.n_terms());
  fail(ErrorKind::Config, "unknown weighting '" + mode + "' (use tfidf or ones)");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::string token;
  for (char c : text) {
    if (c == ',') {
      parts.push_back(token);
      token.clear();
    } else if (c != '[' && c != ']' && c != ' ') {
      token += c;
    }
  }
  parts.push_back(token);
  return parts;
}

ThresholdPolicy parse_thresholds(const std::string& text) {
  ThresholdPolicy policy;
  if (text == "auto") return policy;
  if (text.rfind("top:", 0) == 0) {
    policy.mode = ThresholdPolicy::Mode::TopM;
    try {
      policy.top_m = std::stoull(text.substr(4));
    } catch (const std::exception&) {
      fail(ErrorKind::Config, "bad top-m threshold spec '" + text + "'");
    }
    return policy;
  }
  if (text.rfind("fixed:", 0) == 0) {
    policy.mode = ThresholdPolicy::Mode::Fixed;
    for (const std::string& part : split_list(text.substr(6))) {
      try {
        policy.fixed.push_back(std::stod(part));
      } catch (const std::exception&) {
        fail(ErrorKind::Config, "bad fixed threshold '" + part + "'");
      }
    }
    return policy;
  }
  fail(ErrorKind::Config, "unknown thresholds mode '" + text +
                              "' (use auto, top:M, or fixed:...)");
}

std::filesystem::path ensure_out_dir(const std::string& out_dir) {
  std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create '" + out_dir + "': " + ec.message());
  return dir;
}

json solver_json(const SolverOpts& opts) {
  return json{{"restarts", opts.restarts},
              {"max_iters", opts.max_iters},
              {"tol", opts.tol},
              {"seed", opts.seed},
              {"threads", opts.threads}};
}

// --- gen -------------------------------------------------------------------

struct GenOpts {
  std::size_t blocks = 0;
  std::size_t docs_per_block = 0;
  std::string terms;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

int run_gen(const GenOpts& opts) {
  std::vector<std::size_t> terms_per_block;
  for (const std::string& part : split_list(opts.terms)) {
    try {
      terms_per_block.push_back(std::stoull(part));
    } catch (const std::exception&) {
      fail(ErrorKind::Config, "bad block term count '" + part + "'");
    }
  }

  TermFrequencyMatrix tf = gen_block_diagonal(
      opts.blocks, opts.docs_per_block, terms_per_block, opts.noise, opts.seed);

  const std::filesystem::path dir = ensure_out_dir(opts.out_dir);
  write_matrix_market((dir / "matrix.mm").string(), tf);
  write_labels((dir / "labels.txt").string(), *tf.doc_labels());

  json config{{"command", "gen"},
              {"blocks", opts.blocks},
              {"docs_per_block", opts.docs_per_block},
              {"terms_per_block", terms_per_block},
              {"noise", opts.noise},
              {"seed", opts.seed},
              {"n_docs", tf.n_docs()},
              {"n_terms", tf.n_terms()}};
  write_json((dir / "run_config.json").string(), config);
  std::cout << "wrote " << tf.n_docs() << "x" << tf.n_terms() << " matrix to "
            << (dir / "matrix.mm").string() << "\n";
  return 0;
}

// --- discover ----------------------------------------------------------------

struct DiscoverOpts {
  std::string input;
  std::string format = "mm";
  std::string weights = "tfidf";
  std::size_t k = 0;
  std::size_t s = 0;
  std::string thresholds = "auto";
  std::string out_dir = ".";
  SolverOpts solver;
};

int run_discover(const DiscoverOpts& opts) {
  apply_threads(opts.solver.threads);
  const TermFrequencyMatrix tf = load_matrix(opts.input, parse_format(opts.format));
  const HistogramMatrix h = normalize_rows(tf);
  const WeightVector w = make_weights(opts.weights, h);
  const WeightedMatrix a = apply_weights(h, w);

  const SolverConfig config = make_config(opts.solver, opts.s, opts.k);
  const TopkResult result = solve_topk(a, config);
  const InterferenceTable table = interference_table(a, result.components);
  const ThresholdPolicy policy = parse_thresholds(opts.thresholds);
  const TopicAssignment assignment = assign_topics(table, policy);

  json config_echo{{"command", "discover"},
                   {"input", opts.input},
                   {"format", opts.format},
                   {"weights", opts.weights},
                   {"k", opts.k},
                   {"s", opts.s},
                   {"thresholds", opts.thresholds},
                   {"solver", solver_json(opts.solver)},
                   {"truncated", result.truncated}};
  if (result.truncated) config_echo["truncation_reason"] = result.truncation_reason;

  const std::filesystem::path dir = ensure_out_dir(opts.out_dir);
  write_components_jsonl((dir / "components.jsonl").string(), result.components);
  write_interference_csv((dir / "interference.csv").string(), table);
  write_topics_json((dir / "topics.json").string(), assignment, table, config_echo);
  write_json((dir / "run_config.json").string(), config_echo);

  std::cout << "extracted " << result.components.size() << " components; wrote "
            << (dir / "topics.json").string() << "\n";
  return 0;
}

// --- spca --------------------------------------------------------------------

struct SpcaOpts {
  std::string input;
  std::string format = "mm";
  std::string weights = "tfidf";
  std::size_t k = 1;
  std::size_t s = 0;
  bool oracle = false;
  std::string out_dir = ".";
  SolverOpts solver;
};

int run_spca(const SpcaOpts& opts) {
  apply_threads(opts.solver.threads);
  const TermFrequencyMatrix tf = load_matrix(opts.input, parse_format(opts.format));
  const HistogramMatrix h = normalize_rows(tf);
  const WeightVector w = make_weights(opts.weights, h);
  const WeightedMatrix a0 = apply_weights(h, w);

  const SolverConfig config = make_config(opts.solver, opts.s, opts.k);
  const TopkResult result = solve_topk(a0, config);

  json config_echo{{"command", "spca"},
                   {"input", opts.input},
                   {"format", opts.format},
                   {"weights", opts.weights},
                   {"k", opts.k},
                   {"s", opts.s},
                   {"oracle", opts.oracle},
                   {"solver", solver_json(opts.solver)}};

  // Variance ratios are judged against the matrix each component was
  // extracted from, so deflation is replayed alongside the report.
  json components = json::array();
  WeightedMatrix a = a0;
  for (std::size_t l = 0; l < result.components.size(); ++l) {
    const SparseComponent& c = result.components[l];
    const VarianceReport vr = variance_ratio(a, c);
    json entry{{"component", l},
               {"support", c.support},
               {"explained_variance", c.explained_variance},
               {"f_sparse", vr.f_sparse},
               {"f_star", vr.f_star},
               {"ratio", vr.ratio}};
    if (opts.oracle) {
      const OracleResult oracle = brute_force_oracle(a, opts.s);
      entry["oracle_objective"] = oracle.objective;
      entry["oracle_support"] = oracle.support;
      entry["oracle_gap"] = oracle.objective - c.explained_variance;
    }
    components.push_back(std::move(entry));
    if (l + 1 < result.components.size()) a = deflate(a, c);
  }

  json report{{"config", config_echo},
              {"components", components},
              {"truncated", result.truncated}};
  if (result.truncated) report["truncation_reason"] = result.truncation_reason;

  const std::filesystem::path dir = ensure_out_dir(opts.out_dir);
  write_components_jsonl((dir / "components.jsonl").string(), result.components);
  write_json((dir / "report.json").string(), report);
  write_json((dir / "run_config.json").string(), config_echo);

  std::cout << "extracted " << result.components.size() << " components; wrote "
            << (dir / "report.json").string() << "\n";
  return 0;
}

// --- predict -------------------------------------------------------------------

struct PredictOpts {
  std::string input;
  std::string format = "mm";
  std::string weights = "tfidf";
  std::string split_path;
  std::string labels_path;
  std::string methods = "baseline,nys,method1,method2";
  std::size_t k = 0;
  std::size_t s = 0;
  std::size_t nys_components = 4;
  std::size_t nys_sparsity = 50;
  std::string restrict_path;
  std::string out_dir = ".";
  SolverOpts solver;
};

std::vector<Index> load_index_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, "'" + path + "': " + e.what());
  }
  if (!doc.is_array())
    fail(ErrorKind::Format, "'" + path + "' must hold a JSON list of indices");
  std::vector<Index> out;
  for (const auto& v : doc) {
    if (!v.is_number_unsigned())
      fail(ErrorKind::Format, "'" + path + "' holds a non-index value");
    out.push_back(v.get<Index>());
  }
  return out;
}

int run_predict(const PredictOpts& opts) {
  apply_threads(opts.solver.threads);
  const TermFrequencyMatrix tf = load_matrix(opts.input, parse_format(opts.format));
  const HistogramMatrix h = normalize_rows(tf);
  const WeightVector w = make_weights(opts.weights, h);
  const LabeledSplit split =
      load_split(opts.split_path, opts.labels_path, tf.n_docs());

  const std::vector<std::string> methods = split_list(opts.methods);
  for (const std::string& m : methods)
    if (m != "baseline" && m != "nys" && m != "method1" && m != "method2")
      fail(ErrorKind::Config, "unknown method '" + m + "'");

  SupportSet restrict_set;
  const bool restricted = !opts.restrict_path.empty();
  if (restricted) restrict_set.indices = load_index_list(opts.restrict_path);

  const SolverConfig base = make_config(opts.solver, 1, 1);
  std::map<std::string, PredictionReport> reports;
  for (const std::string& m : methods) {
    if (m == "baseline") {
      reports[m] = l1_nearest(h, split, restricted ? &restrict_set : nullptr);
    } else if (m == "nys") {
      const SupportSet support = per_category_support_union(
          h, w, split, opts.nys_sparsity, opts.nys_components, base);
      reports[m] = l1_nearest(h, split, &support);
    } else if (m == "method1") {
      const SupportSet support =
          global_support_union(h, w, split, opts.s, opts.k, base);
      reports[m] = l1_nearest(h, split, &support);
    } else {
      reports[m] = interference_match(h, w, split, opts.s, opts.k, base);
    }
  }

  json config_echo{{"command", "predict"},
                   {"input", opts.input},
                   {"format", opts.format},
                   {"weights", opts.weights},
                   {"split", opts.split_path},
                   {"labels", opts.labels_path},
                   {"methods", methods},
                   {"k", opts.k},
                   {"s", opts.s},
                   {"nys_components", opts.nys_components},
                   {"nys_sparsity", opts.nys_sparsity},
                   {"solver", solver_json(opts.solver)}};
  if (restricted) config_echo["restrict"] = opts.restrict_path;

  const std::filesystem::path dir = ensure_out_dir(opts.out_dir);
  write_report_json((dir / "report.json").string(), reports, config_echo);
  write_report_csv((dir / "report.csv").string(), methods, reports);
  write_json((dir / "run_config.json").string(), config_echo);

  std::cout << "evaluated " << methods.size() << " method(s); wrote "
            << (dir / "report.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topic discovery over bag-of-words matrices via sparse PCA"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read option defaults from a TOML/INI file");

  GenOpts gen_opts;
  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic block corpus");
  gen->add_option("blocks", gen_opts.blocks, "Number of blocks")->required();
  gen->add_option("docs-per-block", gen_opts.docs_per_block,
                  "Documents per block")->required();
  gen->add_option("terms-per-block", gen_opts.terms,
                  "Per-block term counts, e.g. [3,2,3]")->required();
  gen->add_option("noise", gen_opts.noise, "Out-of-block mass fraction in [0,1)");
  gen->add_option("--seed", gen_opts.seed, "Seed for the noise scatter");
  gen->add_option("--out-dir", gen_opts.out_dir, "Output directory");

  DiscoverOpts discover_opts;
  CLI::App* discover =
      app.add_subcommand("discover", "Extract components and topic sets");
  discover->add_option("--input", discover_opts.input, "Term-frequency matrix")
      ->required();
  discover->add_option("--format", discover_opts.format, "Input format: mm|csv");
  discover->add_option("--weights", discover_opts.weights,
                       "Term weighting: tfidf|ones");
  discover->add_option("-k", discover_opts.k, "Number of components")->required();
  discover->add_option("-s", discover_opts.s, "Nonzeros per component")->required();
  discover->add_option("--thresholds", discover_opts.thresholds,
                       "Topic thresholds: auto|top:M|fixed:v1,v2,...");
  discover->add_option("--out-dir", discover_opts.out_dir, "Output directory");
  add_solver_flags(discover, discover_opts.solver);

  SpcaOpts spca_opts;
  CLI::App* spca =
      app.add_subcommand("spca", "Extract sparse components with variance reports");
  spca->add_option("--input", spca_opts.input, "Term-frequency matrix")->required();
  spca->add_option("--format", spca_opts.format, "Input format: mm|csv");
  spca->add_option("--weights", spca_opts.weights, "Term weighting: tfidf|ones");
  spca->add_option("-k", spca_opts.k, "Number of components");
  spca->add_option("-s", spca_opts.s, "Nonzeros per component")->required();
  spca->add_flag("--oracle", spca_opts.oracle,
                 "Cross-check each component against exhaustive search");
  spca->add_option("--out-dir", spca_opts.out_dir, "Output directory");
  add_solver_flags(spca, spca_opts.solver);

  PredictOpts predict_opts;
  CLI::App* predict =
      app.add_subcommand("predict", "Run category-prediction classifiers");
  predict->add_option("--input", predict_opts.input, "Term-frequency matrix")
      ->required();
  predict->add_option("--format", predict_opts.format, "Input format: mm|csv");
  predict->add_option("--weights", predict_opts.weights,
                      "Term weighting: tfidf|ones");
  predict->add_option("--split", predict_opts.split_path,
                      "JSON split file with learn/match/test lists")->required();
  predict->add_option("--labels", predict_opts.labels_path,
                      "Per-document category file")->required();
  predict->add_option("--methods", predict_opts.methods,
                      "Comma list of baseline,nys,method1,method2");
  predict->add_option("-k", predict_opts.k, "Components for method1/method2");
  predict->add_option("-s", predict_opts.s, "Sparsity for method1/method2");
  predict->add_option("--nys-components", predict_opts.nys_components,
                      "Components per category for nys");
  predict->add_option("--nys-sparsity", predict_opts.nys_sparsity,
                      "Sparsity per category for nys");
  predict->add_option("--restrict", predict_opts.restrict_path,
                      "JSON list of columns restricting the baseline");
  predict->add_option("--out-dir", predict_opts.out_dir, "Output directory");
  add_solver_flags(predict, predict_opts.solver);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (gen->parsed()) return run_gen(gen_opts);
    if (discover->parsed()) return run_discover(discover_opts);
    if (spca->parsed()) return run_spca(spca_opts);
    if (predict->parsed()) return run_predict(predict_opts);
  } catch (const sptopics::Error& e) {
    json report{{"error", {{"kind", to_string(e.kind())}, {"message", e.what()}}}};
    std::cerr << report.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    json report{{"error", {{"kind", "internal"}, {"message", e.what()}}}};
    std::cerr << report.dump() << "\n";
    return 3;
  }
  return 0;
}
