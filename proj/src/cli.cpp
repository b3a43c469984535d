#include "mcl/cli.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "mcl/bench.hpp"
#include "mcl/classifier.hpp"
#include "mcl/episode_io.hpp"
#include "mcl/error.hpp"
#include "mcl/pooling.hpp"
#include "mcl/synthetic.hpp"
#include "mcl/walker.hpp"

namespace mcl {
namespace {

using Json = nlohmann::ordered_json;

enum class Output { Json, Table };

struct EpisodeArgs {
  std::string path;
  double gamma = kOneShotScales.gamma;
  double beta = kOneShotScales.beta;

  void add(CLI::App& cmd, bool required) {
    auto* opt = cmd.add_option("--episode", path, "Episode file (text or binary)");
    if (required) opt->required();
    cmd.add_option("--gamma", gamma, "Query-to-support softmax scale")->capture_default_str();
    cmd.add_option("--beta", beta, "Support-to-query softmax scale")->capture_default_str();
  }

  Scales scales() const { return {gamma, beta}; }
};

struct SolverArgs {
  std::string method = "katz-block";
  std::optional<double> alpha;
  double tol = 1e-10;
  int max_iter = 10000;

  void add(CLI::App& cmd) {
    cmd.add_option("--method", method, "power | linear | katz-dense | katz-block | eigen")
        ->capture_default_str();
    cmd.add_option("--alpha", alpha, "Attenuation factor in (0, 1); 0.999, or 0.5 with --katz");
    cmd.add_option("--tol", tol, "Power iteration tolerance")->capture_default_str();
    cmd.add_option("--max-iter", max_iter, "Power iteration sweep limit")->capture_default_str();
  }

  SolverConfig config(double default_alpha) const {
    const auto m = parse_solver_method(method);
    if (!m) throw ParameterError("unknown --method '" + method + "'");
    SolverConfig c;
    c.method = *m;
    c.alpha = alpha.value_or(default_alpha);
    c.tol = tol;
    c.max_iter = max_iter;
    c.validate();
    return c;
  }
};

void add_output(CLI::App& cmd, Output& output) {
  cmd.add_option("--output", output, "Output format")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, Output>{{"json", Output::Json}, {"table", Output::Table}}))
      ->option_text("json|table");
}

std::string format_vector(std::span<const double> v) { return fmt::format("{:.6f}", fmt::join(v, " ")); }

// ---- commands ---------------------------------------------------------------

void run_classify(const EpisodeArgs& ep, const SolverArgs& sv, bool katz, Output output,
                  std::ostream& out) {
  const SolverConfig config = sv.config(katz ? kKatzAlpha : kEigenApproxAlpha);
  const Episode episode = load_episode(ep.path);
  ClassDistribution dist;
  if (katz) {
    if (config.method != SolverMethod::KatzBlockInverse && config.method != SolverMethod::KatzClosedForm)
      throw ParameterError("--katz needs --method katz-block or katz-dense");
    dist = classify_katz(episode, ep.scales(), config.alpha, config.method);
  } else {
    dist = classify_mcl(episode, ep.scales(), config);
  }
  const std::size_t predicted = predict(dist);
  if (output == Output::Json) {
    Json j;
    j["head"] = katz ? "katz" : "mcl";
    j["method"] = to_string(config.method);
    j["alpha"] = config.alpha;
    j["gamma"] = ep.gamma;
    j["beta"] = ep.beta;
    j["probs"] = dist.probs;
    j["predicted"] = predicted;
    out << j.dump() << '\n';
    return;
  }
  out << fmt::format("head {}  method {}  alpha {}\n", katz ? "katz" : "mcl", to_string(config.method),
                     config.alpha);
  for (std::size_t c = 0; c < dist.size(); ++c)
    out << fmt::format("class {:>3}  {:.6f}{}\n", c, dist[c], c == predicted ? "  <" : "");
}

void run_centrality(const EpisodeArgs& ep, const SolverArgs& sv, Output output, std::ostream& out) {
  const SolverConfig config = sv.config(kEigenApproxAlpha);
  const Episode episode = load_episode(ep.path);
  const CentralityPair pi = solve_centrality(episode_transitions(episode, ep.scales()), config);
  if (output == Output::Json) {
    Json j;
    j["method"] = to_string(config.method);
    j["pi_s"] = pi.pi_s;
    j["pi_q"] = pi.pi_q;
    out << j.dump() << '\n';
    return;
  }
  out << "pi_s " << format_vector(pi.pi_s) << '\n' << "pi_q " << format_vector(pi.pi_q) << '\n';
}

struct SimulateArgs {
  std::uint64_t steps = 1000000;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

void run_simulate(const EpisodeArgs& ep, const SimulateArgs& sim, Output output, std::ostream& out) {
  // Without --episode the walk runs on the synthetic episode for the same seed.
  const Episode episode = ep.path.empty()
                              ? generate_episode(SyntheticSpec{.seed = sim.seed}).file.to_episode()
                              : load_episode(ep.path);
  const WalkStats stats =
      simulate(episode_transitions(episode, ep.scales()), sim.steps, sim.trials, sim.seed, sim.threads);
  const ClassDistribution dist = estimate_class_distribution(stats, episode.n_classes());
  if (output == Output::Json) {
    Json j;
    j["steps"] = stats.steps;
    j["trials"] = stats.trials;
    j["seed"] = stats.rng_seed;
    j["visits_support"] = stats.visits_support;
    j["visits_query"] = stats.visits_query;
    j["probs"] = dist.probs;
    j["predicted"] = predict(dist);
    out << j.dump() << '\n';
    return;
  }
  out << fmt::format("steps {}  trials {}  seed {}\n", stats.steps, stats.trials, stats.rng_seed);
  for (std::size_t c = 0; c < dist.size(); ++c) out << fmt::format("class {:>3}  {:.6f}\n", c, dist[c]);
}

PoolMode parse_pool_mode(const std::string& s) {
  if (s == "centrality") return PoolMode::Centrality;
  if (s == "gap") return PoolMode::Average;
  throw ParameterError("pool mode must be 'centrality' or 'gap', got '" + s + "'");
}

void run_pool(const EpisodeArgs& ep, const SolverArgs& sv, const std::string& query_mode,
              const std::string& support_mode, Output output, std::ostream& out) {
  const SolverConfig config = sv.config(kEigenApproxAlpha);
  const PoolingOptions options{parse_pool_mode(query_mode), parse_pool_mode(support_mode)};
  const PooledFeatures pooled = centrality_pool_episode(load_episode(ep.path), ep.scales(), config, options);
  if (output == Output::Json) {
    Json j;
    j["query"] = pooled.query_vec;
    j["classes"] = pooled.class_vecs;
    out << j.dump() << '\n';
    return;
  }
  out << "query     " << format_vector(pooled.query_vec) << '\n';
  for (std::size_t c = 0; c < pooled.class_vecs.size(); ++c)
    out << fmt::format("class {:>3} ", c) << format_vector(pooled.class_vecs[c]) << '\n';
}

struct GenArgs {
  SyntheticSpec spec;
  std::string out_path;
  std::string format = "text";
};

void run_gen(const GenArgs& g, Output output, std::ostream& out) {
  FileVariant variant;
  if (g.format == "text") variant = FileVariant::Text;
  else if (g.format == "binary") variant = FileVariant::Binary;
  else throw ParameterError("--format must be 'text' or 'binary'");
  const SyntheticEpisode gen = generate_episode(g.spec);
  save_episode_file(gen.file, g.out_path, variant);
  if (output == Output::Json) {
    Json j;
    j["path"] = g.out_path;
    j["format"] = g.format;
    j["n"] = g.spec.n_classes;
    j["k"] = g.spec.k_shots;
    j["d"] = g.spec.d;
    j["r"] = g.spec.r;
    j["seed"] = g.spec.seed;
    j["query_class"] = gen.query_class;
    out << j.dump() << '\n';
    return;
  }
  out << fmt::format("wrote {} ({}), query class {}\n", g.out_path, g.format, gen.query_class);
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

int report(std::ostream& err, const char* kind, const std::exception& e, int code) {
  err << "error: " << kind << ": " << one_line(e.what()) << '\n';
  return code;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bipartite random-walk centrality for few-shot episodes", "mcl"};
  app.require_subcommand(1);
  Output output = Output::Json;
  std::function<void()> action;

  EpisodeArgs ep;
  SolverArgs sv;
  bool katz = false;
  auto* classify = app.add_subcommand("classify", "Class distribution and prediction for an episode");
  ep.add(*classify, true);
  sv.add(*classify);
  classify->add_flag("--katz", katz, "Katz head (default alpha 0.5)");
  add_output(*classify, output);
  classify->callback([&] { action = [&] { run_classify(ep, sv, katz, output, out); }; });

  auto* centrality = app.add_subcommand("centrality", "Single-mode centralities pi(S) and pi(q)");
  ep.add(*centrality, true);
  sv.add(*centrality);
  add_output(*centrality, output);
  centrality->callback([&] { action = [&] { run_centrality(ep, sv, output, out); }; });

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo walk on an episode");
  ep.add(*simulate_cmd, false);
  simulate_cmd->add_option("--steps", sim.steps, "Transitions per trial")->capture_default_str();
  simulate_cmd->add_option("--trials", sim.trials, "Independent walks")->capture_default_str();
  simulate_cmd->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  simulate_cmd->add_option("--threads", sim.threads, "Worker threads (0 = all cores)")->capture_default_str();
  add_output(*simulate_cmd, output);
  simulate_cmd->callback([&] { action = [&] { run_simulate(ep, sim, output, out); }; });

  std::string query_pool = "centrality";
  std::string support_pool = "centrality";
  auto* pool = app.add_subcommand("pool", "Centrality-weighted pooled features");
  ep.add(*pool, true);
  sv.add(*pool);
  pool->add_option("--query-pool", query_pool, "centrality | gap")->capture_default_str();
  pool->add_option("--support-pool", support_pool, "centrality | gap")->capture_default_str();
  add_output(*pool, output);
  pool->callback([&] { action = [&] { run_pool(ep, sv, query_pool, support_pool, output, out); }; });

  BenchOptions bench_opts;
  auto* bench = app.add_subcommand("bench", "Solver timing across resolutions");
  bench->add_option("--resolutions", bench_opts.resolutions, "Feature counts r")->delimiter(',')
      ->capture_default_str();
  bench->add_option("--n", bench_opts.n_classes, "Classes per episode")->capture_default_str();
  bench->add_option("--n-query", bench_opts.n_query, "Query images per class")->capture_default_str();
  bench->add_option("--d", bench_opts.d, "Feature dimension")->capture_default_str();
  bench->add_option("--episodes", bench_opts.episodes, "Timed episodes (>= 30)")->capture_default_str();
  bench->add_option("--warmup", bench_opts.warmup, "Warm-up episodes (>= 5)")->capture_default_str();
  bench->add_option("--seed", bench_opts.seed, "Workload seed")->capture_default_str();
  add_output(*bench, output);
  bench->callback([&] {
    action = [&] {
      out << emit_report(run_bench(bench_opts), output == Output::Json ? ReportFormat::Json : ReportFormat::Table);
    };
  });

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic episode");
  gen_cmd->add_option("--n", gen.spec.n_classes, "Classes")->capture_default_str();
  gen_cmd->add_option("--k", gen.spec.k_shots, "Shots per class")->capture_default_str();
  gen_cmd->add_option("--d", gen.spec.d, "Feature dimension")->capture_default_str();
  gen_cmd->add_option("--r", gen.spec.r, "Features per image")->capture_default_str();
  gen_cmd->add_option("--noise", gen.spec.noise, "Expected norm of each feature perturbation")->capture_default_str();
  gen_cmd->add_option("--seed", gen.spec.seed, "Seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out_path, "Output path")->required();
  gen_cmd->add_option("--format", gen.format, "text | binary")->capture_default_str();
  add_output(*gen_cmd, output);
  gen_cmd->callback([&] { action = [&] { run_gen(gen, output, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return report(err, "usage", e, kExitUsage);
  }

  try {
    action();
    return kExitOk;
  } catch (const ParameterError& e) {
    return report(err, "usage", e, kExitUsage);
  } catch (const FormatError& e) {
    return report(err, "format", e, kExitData);
  } catch (const IoError& e) {
    return report(err, "io", e, kExitData);
  } catch (const DimensionError& e) {
    return report(err, "dimension", e, kExitData);
  } catch (const ValidationError& e) {
    return report(err, "validation", e, kExitData);
  } catch (const DegenerateError& e) {
    return report(err, "degenerate", e, kExitData);
  } catch (const ConvergenceError& e) {
    return report(err, "convergence", e, kExitNumerical);
  } catch (const NumericalError& e) {
    return report(err, "numerical", e, kExitNumerical);
  }
}

}  // namespace mcl
