#include "subgcn/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "subgcn/artifacts.hpp"
#include "subgcn/errors.hpp"
#include "subgcn/metrics.hpp"
#include "subgcn/producer.hpp"
#include "subgcn/synthetic.hpp"
#include "subgcn/trainer.hpp"
#include "subgcn/variance.hpp"

namespace subgcn::cli {

namespace {

namespace fs = std::filesystem;

std::string num(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

struct SamplerArgs {
  std::string kind = "edge";
  std::uint32_t n = 0;
  std::uint32_t m = 0;
  std::uint32_t r = 0;
  std::uint32_t h = 0;
  bool no_induce = false;

  void add(CLI::App* app) {
    app->add_option("--sampler", kind, "node | edge | edge-indep | rw | mrw | full")->capture_default_str();
    app->add_option("--n", n, "node budget (node, mrw)");
    app->add_option("--m", m, "edge budget (edge, edge-indep)");
    app->add_option("--r", r, "root count (rw, mrw)");
    app->add_option("--h", h, "walk length (rw)");
    app->add_flag("--no-induce", no_induce, "edge samplers keep only the drawn edges");
  }

  SamplerConfig config(std::uint64_t seed) const {
    SamplerConfig c;
    c.kind = parse_sampler_kind(kind);
    c.node_budget = n;
    c.edge_budget = m;
    c.roots = r;
    c.walk_length = h;
    c.seed = seed;
    c.induce = !no_induce;
    c.validate();
    return c;
  }
};

struct DataArgs {
  std::string dir;
  bool self_loops = false;

  void add(CLI::App* app) {
    app->add_option("--data", dir, "dataset directory")->required();
    app->add_flag("--self-loops", self_loops, "add a self-loop to every node");
  }

  Dataset load() const { return load_dataset(dir, self_loops); }
};

struct ParallelArgs {
  std::size_t threads = 0;
  std::size_t queue_capacity = 16;
  bool deterministic = false;

  void add(CLI::App* app) {
    app->add_option("--threads", threads, "sampler worker threads (0: sample inline)");
    app->add_option("--queue-capacity", queue_capacity, "subgraphs buffered ahead of the trainer");
    app->add_flag("--deterministic", deterministic, "single-threaded sampling and reductions");
  }

  std::size_t effective_threads() const { return deterministic ? 0 : threads; }
};

fs::path prepare_out(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw DataError("cannot create " + out + ": " + ec.message());
  return fs::path(out);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write " + path.string());
  f << text;
  if (!f) throw DataError("write failed for " + path.string());
}

// gen

struct GenArgs {
  std::string kind = "sbm";
  SbmSpec sbm;
  std::uint32_t nodes = 100;
  std::uint32_t degree = 2;
  double p = 0.1;
  std::uint32_t features = 8;
  std::uint32_t classes = 2;
  std::uint64_t seed = 0;
  std::string out;
};

void add_gen(CLI::App& app, GenArgs& a) {
  auto* c = app.add_subcommand("gen", "generate a synthetic dataset");
  c->add_option("--kind", a.kind, "sbm | regular | er")->capture_default_str();
  c->add_option("--blocks", a.sbm.blocks)->capture_default_str();
  c->add_option("--block-size", a.sbm.block_size)->capture_default_str();
  c->add_option("--p-in", a.sbm.p_in)->capture_default_str();
  c->add_option("--p-out", a.sbm.p_out)->capture_default_str();
  c->add_option("--noise", a.sbm.noise)->capture_default_str();
  c->add_option("--nodes", a.nodes, "regular, er")->capture_default_str();
  c->add_option("--degree", a.degree, "regular")->capture_default_str();
  c->add_option("--p", a.p, "er edge probability")->capture_default_str();
  c->add_option("--features", a.features, "regular, er: feature dim")->capture_default_str();
  c->add_option("--classes", a.classes, "regular, er: class count")->capture_default_str();
  c->add_option("--seed", a.seed)->capture_default_str();
  c->add_option("--out", a.out, "output dataset directory")->required();
}

int run_gen(const GenArgs& a, std::ostream& out) {
  Dataset ds;
  if (a.kind == "sbm") {
    SbmSpec spec = a.sbm;
    spec.seed = a.seed;
    ds = generate_sbm(spec);
  } else if (a.kind == "regular") {
    ds = random_dataset(generate_regular(a.degree, a.nodes, a.seed), a.features, a.classes, a.seed);
  } else if (a.kind == "er") {
    ds = random_dataset(generate_er(a.nodes, a.p, a.seed), a.features, a.classes, a.seed);
  } else {
    throw std::invalid_argument("unknown dataset kind '" + a.kind + "'");
  }
  save_dataset(ds, prepare_out(a.out));
  out << "nodes " << ds.graph.num_nodes() << " edges " << ds.graph.num_edges() << " features "
      << ds.features.cols() << " classes " << ds.num_classes << '\n';
  return kOk;
}

// sample

struct SampleArgs {
  DataArgs data;
  SamplerArgs sampler;
  ParallelArgs par;
  std::uint64_t count = 100;
  std::uint64_t first = 0;
  std::uint64_t seed = 0;
  std::string out = ".";
};

void add_sample(CLI::App& app, SampleArgs& a) {
  auto* c = app.add_subcommand("sample", "draw subgraphs into a cache file");
  a.data.add(c);
  a.sampler.add(c);
  a.par.add(c);
  c->add_option("--count", a.count, "number of subgraphs")->capture_default_str();
  c->add_option("--first", a.first, "first instance index")->capture_default_str();
  c->add_option("--seed", a.seed)->capture_default_str();
  c->add_option("--out", a.out, "output directory")->capture_default_str();
}

int run_sample(const SampleArgs& a, std::ostream& out) {
  const Dataset ds = a.data.load();
  const Sampler sampler(ds.graph, a.sampler.config(a.seed));
  SubgraphCache cache;
  cache.graph_hash = ds.graph.hash();
  cache.sampler = sampler.config();
  cache.first_index = a.first;
  cache.subgraphs = sample_many(sampler, a.first, a.count, a.par.effective_threads());
  const fs::path path = prepare_out(a.out) / "subgraphs.bin";
  save_subgraph_cache(path, cache);
  double nodes = 0.0;
  for (const Subgraph& s : cache.subgraphs) nodes += static_cast<double>(s.num_nodes());
  out << "subgraphs " << a.count << " mean_nodes " << num(a.count ? nodes / static_cast<double>(a.count) : 0.0)
      << " -> " << path.string() << '\n';
  return kOk;
}

// estimate

struct EstimateArgs {
  DataArgs data;
  SamplerArgs sampler;
  ParallelArgs par;
  std::uint64_t count = 0;
  double coverage = 50.0;
  bool analytic = false;
  bool keep_cache = false;
  std::uint64_t seed = 0;
  std::string out = ".";
};

void add_estimate(CLI::App& app, EstimateArgs& a) {
  auto* c = app.add_subcommand("estimate", "estimate normalization coefficients");
  a.data.add(c);
  a.sampler.add(c);
  a.par.add(c);
  c->add_option("--count", a.count, "number of presampled subgraphs N (0: use --coverage)");
  c->add_option("--coverage", a.coverage, "sample until sum |V_s| >= coverage * |V|")->capture_default_str();
  c->add_flag("--analytic", a.analytic, "closed-form coefficients (edge-indep sampler)");
  c->add_flag("--cache", a.keep_cache, "also write the presampled subgraphs");
  c->add_option("--seed", a.seed)->capture_default_str();
  c->add_option("--out", a.out, "output directory")->capture_default_str();
}

int run_estimate(const EstimateArgs& a, std::ostream& out) {
  const Dataset ds = a.data.load();
  const SamplerConfig cfg = a.sampler.config(a.seed);
  const fs::path dir = prepare_out(a.out);
  CoeffFile file;
  file.graph_hash = ds.graph.hash();
  file.sampler = cfg;
  if (a.analytic) {
    if (cfg.kind != SamplerKind::EdgeIndependent) throw std::invalid_argument("--analytic needs --sampler edge-indep");
    file.coeffs = analytic_coeffs_edge(ds.graph, cfg.edge_budget);
  } else {
    const std::size_t threads = a.par.effective_threads();
    CoeffEstimate est = a.count > 0 ? estimate_coeffs(ds.graph, cfg, a.count, threads)
                                    : estimate_coeffs_by_coverage(ds.graph, cfg, a.coverage, threads);
    file.coeffs = std::move(est.coeffs);
    if (a.keep_cache) {
      SubgraphCache cache{file.graph_hash, cfg, 0, std::move(est.cache)};
      save_subgraph_cache(dir / "subgraphs.bin", cache);
    }
  }
  save_coeffs(dir / "coeffs.bin", file);
  double lambda_sum = 0.0;
  for (double l : file.coeffs.lambda) lambda_sum += l;
  out << "subgraphs " << file.coeffs.num_subgraphs << " mean_lambda "
      << num(lambda_sum / static_cast<double>(file.coeffs.lambda.size())) << " -> " << (dir / "coeffs.bin").string()
      << '\n';
  return kOk;
}

// train

struct TrainArgs {
  DataArgs data;
  SamplerArgs sampler;
  ParallelArgs par;
  ModelSpec model;
  TrainConfig train;
  std::uint64_t seed = 0;
  std::string resume;
  std::uint32_t stop_after = 0;
  std::string out = ".";
};

void add_train(CLI::App& app, TrainArgs& a) {
  auto* c = app.add_subcommand("train", "train a GCN on sampled subgraphs");
  a.data.add(c);
  a.sampler.add(c);
  a.par.add(c);
  c->add_option("--layers", a.model.layers)->capture_default_str();
  c->add_option("--hidden", a.model.hidden)->capture_default_str();
  c->add_option("--epochs", a.train.epochs)->capture_default_str();
  c->add_option("--lr", a.train.learning_rate)->capture_default_str();
  c->add_option("--dropout", a.train.dropout)->capture_default_str();
  c->add_option("--batches", a.train.batches_per_epoch, "minibatches per epoch (0: |V| / mean |V_s|)");
  c->add_option("--beta1", a.train.adam.beta1)->capture_default_str();
  c->add_option("--beta2", a.train.adam.beta2)->capture_default_str();
  c->add_option("--eps", a.train.adam.epsilon)->capture_default_str();
  c->add_option("--eval-every", a.train.eval_every, "epochs between validation passes")->capture_default_str();
  c->add_flag("--mean-loss", a.train.mean_loss, "divide the batch loss by its node count");
  c->add_option("--presample", a.train.presample_count, "presampled subgraphs N (0: use --coverage)");
  c->add_option("--coverage", a.train.presample_coverage)->capture_default_str();
  c->add_option("--seed", a.seed)->capture_default_str();
  c->add_option("--resume", a.resume, "checkpoint to continue from");
  c->add_option("--stop-after", a.stop_after, "run at most this many epochs, then checkpoint");
  c->add_option("--out", a.out, "output directory")->capture_default_str();
}

int run_train(TrainArgs a, std::ostream& out) {
  const Dataset ds = a.data.load();
  std::optional<Checkpoint> ckpt;
  ModelSpec model = a.model;
  SamplerConfig sampler;
  TrainConfig train = a.train;
  if (!a.resume.empty()) {
    ckpt = load_checkpoint(a.resume, &ds.graph);
    model = ckpt->model;
    sampler = ckpt->sampler;
    train = ckpt->train;
  } else {
    sampler = a.sampler.config(a.seed);
    train.seed = a.seed;
  }
  train.threads = a.par.effective_threads();
  train.queue_capacity = a.par.queue_capacity;

  Trainer trainer(ds, model, sampler, train);
  if (ckpt) trainer.restore(std::move(ckpt->state));
  trainer.run_epochs(a.stop_after > 0 ? a.stop_after : train.epochs);

  const fs::path dir = prepare_out(a.out);
  Checkpoint saved = make_checkpoint(trainer, ds.graph);
  save_checkpoint(dir / "checkpoint.bin", saved);
  std::optional<double> test;
  if (trainer.finished()) test = trainer.test_f1();
  std::ostringstream log;
  write_metric_log(log, trainer.state().log, test);
  write_text(dir / "metrics.log", log.str());
  out << log.str();
  return kOk;
}

// eval

struct EvalArgs {
  DataArgs data;
  std::string checkpoint;
  std::string split = "test";
  bool latest = false;
};

void add_eval(CLI::App& app, EvalArgs& a) {
  auto* c = app.add_subcommand("eval", "score a checkpoint with full-graph inference");
  a.data.add(c);
  c->add_option("--checkpoint", a.checkpoint)->required();
  c->add_option("--split", a.split, "train | val | test")->capture_default_str();
  c->add_flag("--latest", a.latest, "use the latest weights instead of the best-validation ones");
}

int run_eval(const EvalArgs& a, std::ostream& out) {
  const Dataset ds = a.data.load();
  const Checkpoint ckpt = load_checkpoint(a.checkpoint, &ds.graph);
  Split which;
  if (a.split == "train") {
    which = Split::Train;
  } else if (a.split == "val") {
    which = Split::Val;
  } else if (a.split == "test") {
    which = Split::Test;
  } else {
    throw std::invalid_argument("unknown split '" + a.split + "'");
  }
  const Model& model = a.latest ? ckpt.state.model : ckpt.state.best_model;
  if (static_cast<Eigen::Index>(model.dims().front()) != ds.features.cols()) {
    throw DataError("checkpoint input dim does not match the dataset features");
  }
  const std::vector<NodeId> rows = ds.nodes_in(which);
  if (rows.empty()) throw DataError("split '" + a.split + "' has no nodes");
  const Matrix scores = forward_full(model, ds.graph, ds.features);
  out << a.split << "_f1 " << num(f1_micro(scores, ds.targets, model.head, rows)) << '\n';
  return kOk;
}

// variance-check

struct VarianceArgs {
  DataArgs data;
  double m = 5.0;
  std::uint64_t trials = 100000;
  std::uint32_t layers = 1;
  std::uint32_t dim = 0;
  std::uint64_t seed = 0;
  ParallelArgs par;
  std::string out;
};

void add_variance(CLI::App& app, VarianceArgs& a) {
  auto* c = app.add_subcommand("variance-check", "compare optimal and topology edge probabilities");
  a.data.add(c);
  a.par.add(c);
  c->add_option("--m", a.m, "expected edge count")->capture_default_str();
  c->add_option("--trials", a.trials, "Monte-Carlo trials")->capture_default_str();
  c->add_option("--layers", a.layers, "layers of the random model")->capture_default_str();
  c->add_option("--dim", a.dim, "layer output dim (0: class count)");
  c->add_option("--seed", a.seed)->capture_default_str();
  c->add_option("--out", a.out, "also write the table to <out>/variance.tsv");
}

int run_variance(const VarianceArgs& a, std::ostream& out) {
  const Dataset ds = a.data.load();
  const std::uint32_t dim = a.dim > 0 ? a.dim : ds.num_classes;
  ModelSpec spec{a.layers, dim};
  Rng init = Rng::stream(a.seed, 0);
  const Model model = Model::glorot(spec.dims(static_cast<std::size_t>(ds.features.cols()), dim), ds.head(), init);
  const EdgeAggregates agg = edge_aggregates(ds.graph, ds.features, model);
  const std::vector<double> p_opt = optimal_edge_probs(agg, a.m);
  const std::vector<double> p_topo = topology_edge_probs(ds.graph, agg, a.m);
  const std::size_t threads = a.par.effective_threads();
  const MonteCarloVariance mc_opt = variance_monte_carlo(agg, p_opt, a.trials, a.seed, threads);
  const MonteCarloVariance mc_topo = variance_monte_carlo(agg, p_topo, a.trials, a.seed, threads);

  std::ostringstream t;
  t << "edge\tu\tv\tnorm\tp_optimal\tp_topology\n";
  const auto edges = ds.graph.edges();
  for (std::size_t i = 0; i < agg.num_edges(); ++i) {
    const Edge& e = edges[agg.edge_ids[i]];
    t << agg.edge_ids[i] << '\t' << e.u << '\t' << e.v << '\t' << num(agg.norms[i]) << '\t' << num(p_opt[i]) << '\t'
      << num(p_topo[i]) << '\n';
  }
  t << "# closed_form\toptimal\t" << num(variance_closed_form(agg, p_opt)) << "\ttopology\t"
    << num(variance_closed_form(agg, p_topo)) << '\n';
  t << "# monte_carlo\toptimal\t" << num(mc_opt.variance) << "\tse\t" << num(mc_opt.std_error) << "\ttopology\t"
    << num(mc_topo.variance) << "\tse\t" << num(mc_topo.std_error) << '\n';
  if (!a.out.empty()) write_text(prepare_out(a.out) / "variance.tsv", t.str());
  out << t.str();
  return kOk;
}

// bench

struct BenchArgs {
  DataArgs data;
  SamplerArgs sampler;
  ParallelArgs par;
  std::uint64_t count = 200;
  std::uint64_t seed = 0;
};

void add_bench(CLI::App& app, BenchArgs& a) {
  auto* c = app.add_subcommand("bench", "time subgraph sampling");
  a.data.add(c);
  a.sampler.add(c);
  a.par.add(c);
  c->add_option("--count", a.count, "subgraphs to draw")->capture_default_str();
  c->add_option("--seed", a.seed)->capture_default_str();
}

int run_bench(const BenchArgs& a, std::ostream& out) {
  const Dataset ds = a.data.load();
  const Sampler sampler(ds.graph, a.sampler.config(a.seed));
  const auto start = std::chrono::steady_clock::now();
  SubgraphProducer producer(sampler, a.par.effective_threads(), a.par.queue_capacity);
  double nodes = 0.0;
  double arcs = 0.0;
  for (std::uint64_t i = 0; i < a.count; ++i) {
    const Subgraph s = producer.next();
    nodes += static_cast<double>(s.num_nodes());
    arcs += static_cast<double>(s.num_arcs());
  }
  producer.stop();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto n = static_cast<double>(a.count);
  out << "sampler " << to_string(sampler.config().kind) << " threads " << a.par.effective_threads() << " subgraphs "
      << a.count << " seconds " << num(secs) << " per_second " << num(secs > 0 ? n / secs : 0.0) << " mean_nodes "
      << num(n > 0 ? nodes / n : 0.0) << " mean_arcs " << num(n > 0 ? arcs / n : 0.0) << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Subgraph-sampling GCN training toolkit", "subgcn"};
  app.require_subcommand(1, 1);
  // --h is the walk length, so help is long-form only.
  app.set_help_flag("--help", "print this help and exit");
  GenArgs gen;
  SampleArgs sample;
  EstimateArgs estimate;
  TrainArgs train;
  EvalArgs eval;
  VarianceArgs variance;
  BenchArgs bench;
  add_gen(app, gen);
  add_sample(app, sample);
  add_estimate(app, estimate);
  add_train(app, train);
  add_eval(app, eval);
  add_variance(app, variance);
  add_bench(app, bench);

  std::vector<const char*> argv{"subgcn"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (name == "gen") return run_gen(gen, out);
    if (name == "sample") return run_sample(sample, out);
    if (name == "estimate") return run_estimate(estimate, out);
    if (name == "train") return run_train(train, out);
    if (name == "eval") return run_eval(eval, out);
    if (name == "variance-check") return run_variance(variance, out);
    if (name == "bench") return run_bench(bench, out);
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kData;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace subgcn::cli
