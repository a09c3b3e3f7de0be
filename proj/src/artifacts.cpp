#include "subgcn/artifacts.hpp"

#include "subgcn/binary_io.hpp"
#include "subgcn/errors.hpp"

namespace subgcn {

namespace {

constexpr std::string_view kSubgraphTag = "SGCNSUBG";
constexpr std::string_view kCoeffTag = "SGCNCOEF";
constexpr std::string_view kCheckpointTag = "SGCNCKPT";
constexpr std::uint32_t kVersion = 1;

void write_sampler(BinaryWriter& w, const SamplerConfig& c) {
  w.u8(static_cast<std::uint8_t>(c.kind));
  w.u32(c.node_budget);
  w.u32(c.edge_budget);
  w.u32(c.roots);
  w.u32(c.walk_length);
  w.u64(c.seed);
  w.u8(c.induce ? 1 : 0);
}

SamplerConfig read_sampler(BinaryReader& r) {
  SamplerConfig c;
  const std::uint8_t kind = r.u8();
  if (kind > static_cast<std::uint8_t>(SamplerKind::Full)) r.fail("unknown sampler kind");
  c.kind = static_cast<SamplerKind>(kind);
  c.node_budget = r.u32();
  c.edge_budget = r.u32();
  c.roots = r.u32();
  c.walk_length = r.u32();
  c.seed = r.u64();
  c.induce = r.u8() != 0;
  return c;
}

void write_model(BinaryWriter& w, const Model& m) {
  w.u8(static_cast<std::uint8_t>(m.head));
  w.u64(m.weights.size());
  for (const Matrix& x : m.weights) w.matrix(x);
}

std::vector<Matrix> read_matrices(BinaryReader& r) {
  const std::uint64_t n = r.u64();
  if (n > 1024) r.fail("implausible layer count");
  std::vector<Matrix> out;
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(r.matrix());
  return out;
}

Model read_model(BinaryReader& r) {
  Model m;
  const std::uint8_t head = r.u8();
  if (head > 1) r.fail("unknown head type");
  m.head = static_cast<Head>(head);
  m.weights = read_matrices(r);
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    r.fail(e.what());
  }
  return m;
}

void check_hash(const BinaryReader& r, std::uint64_t stored, const Graph* g) {
  if (g != nullptr && stored != g->hash()) r.fail("artifact was built for a different graph (hash mismatch)");
}

}  // namespace

void save_subgraph_cache(const std::filesystem::path& path, const SubgraphCache& cache) {
  BinaryWriter w;
  w.magic(kSubgraphTag, kVersion);
  w.u64(cache.graph_hash);
  write_sampler(w, cache.sampler);
  w.u64(cache.first_index);
  w.u64(cache.subgraphs.size());
  for (const Subgraph& s : cache.subgraphs) {
    w.u32s(s.nodes);
    w.u64s(s.row_offsets);
    w.u32s(s.col_indices);
    w.u64s(s.arc_origin);
    w.u32s(s.multiplicity);
    w.u8(s.truncated ? 1 : 0);
  }
  w.save(path);
}

SubgraphCache load_subgraph_cache(const std::filesystem::path& path, const Graph* g) {
  BinaryReader r = BinaryReader::open(path);
  r.magic(kSubgraphTag, kVersion);
  SubgraphCache cache;
  cache.graph_hash = r.u64();
  check_hash(r, cache.graph_hash, g);
  cache.sampler = read_sampler(r);
  cache.first_index = r.u64();
  const std::uint64_t n = r.u64();
  for (std::uint64_t i = 0; i < n; ++i) {
    Subgraph s;
    s.nodes = r.u32s();
    s.row_offsets = r.u64s();
    s.col_indices = r.u32s();
    s.arc_origin = r.u64s();
    s.multiplicity = r.u32s();
    s.truncated = r.u8() != 0;
    if (s.row_offsets.size() != s.nodes.size() + 1 || s.arc_origin.size() != s.col_indices.size() ||
        s.row_offsets.back() != s.col_indices.size()) {
      r.fail("inconsistent subgraph " + std::to_string(i));
    }
    cache.subgraphs.push_back(std::move(s));
  }
  r.expect_end();
  return cache;
}

void save_coeffs(const std::filesystem::path& path, const CoeffFile& file) {
  BinaryWriter w;
  w.magic(kCoeffTag, kVersion);
  w.u64(file.graph_hash);
  write_sampler(w, file.sampler);
  const NormCoeffs& c = file.coeffs;
  w.u8(static_cast<std::uint8_t>(c.source));
  w.u64(c.num_subgraphs);
  w.f64s(c.lambda);
  w.f64s(c.alpha);
  w.u64s(c.node_counts);
  w.u64s(c.edge_counts);
  w.save(path);
}

CoeffFile load_coeffs(const std::filesystem::path& path, const Graph& g) {
  BinaryReader r = BinaryReader::open(path);
  r.magic(kCoeffTag, kVersion);
  CoeffFile file;
  file.graph_hash = r.u64();
  check_hash(r, file.graph_hash, &g);
  file.sampler = read_sampler(r);
  NormCoeffs& c = file.coeffs;
  const std::uint8_t source = r.u8();
  if (source > 1) r.fail("unknown coefficient source");
  c.source = static_cast<CoeffSource>(source);
  c.num_subgraphs = r.u64();
  c.lambda = r.f64s();
  c.alpha = r.f64s();
  c.node_counts = r.u64s();
  c.edge_counts = r.u64s();
  if (c.lambda.size() != g.num_nodes() || c.alpha.size() != g.num_arcs()) r.fail("coefficient sizes do not match graph");
  r.expect_end();
  return file;
}

Checkpoint make_checkpoint(const Trainer& trainer, const Graph& g) {
  Checkpoint c;
  c.graph_hash = g.hash();
  c.model = trainer.model_spec();
  c.sampler = trainer.sampler_config();
  c.train = trainer.config();
  c.state = trainer.state();
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  BinaryWriter w;
  w.magic(kCheckpointTag, kVersion);
  w.u64(ckpt.graph_hash);
  w.u32(ckpt.model.layers);
  w.u32(ckpt.model.hidden);
  write_sampler(w, ckpt.sampler);

  const TrainConfig& t = ckpt.train;
  w.f64(t.learning_rate);
  w.f64(t.dropout);
  w.u32(t.epochs);
  w.u32(t.batches_per_epoch);
  w.f64(t.adam.beta1);
  w.f64(t.adam.beta2);
  w.f64(t.adam.epsilon);
  w.u32(t.eval_every);
  w.u64(t.seed);
  w.u8(t.mean_loss ? 1 : 0);
  w.u64(t.presample_count);
  w.f64(t.presample_coverage);
  w.u64(t.threads);
  w.u64(t.queue_capacity);

  const TrainState& s = ckpt.state;
  write_model(w, s.model);
  w.u64(s.adam.step);
  w.u64(s.adam.first_moment.size());
  for (const Matrix& m : s.adam.first_moment) w.matrix(m);
  w.u64(s.adam.second_moment.size());
  for (const Matrix& m : s.adam.second_moment) w.matrix(m);
  w.str(s.dropout_rng);
  w.u32(s.epoch);
  w.u64(s.iteration);
  w.u64(s.next_subgraph);
  write_model(w, s.best_model);
  w.f64(s.best_val_f1);
  w.f64(s.pending_loss);
  w.u64(s.pending_batches);
  w.u64(s.log.size());
  for (const MetricRecord& m : s.log) {
    w.u64(m.iteration);
    w.f64(m.loss);
    w.f64(m.val_f1);
  }
  w.save(path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const Graph* g) {
  BinaryReader r = BinaryReader::open(path);
  r.magic(kCheckpointTag, kVersion);
  Checkpoint c;
  c.graph_hash = r.u64();
  check_hash(r, c.graph_hash, g);
  c.model.layers = r.u32();
  c.model.hidden = r.u32();
  c.sampler = read_sampler(r);

  TrainConfig& t = c.train;
  t.learning_rate = r.f64();
  t.dropout = r.f64();
  t.epochs = r.u32();
  t.batches_per_epoch = r.u32();
  t.adam.beta1 = r.f64();
  t.adam.beta2 = r.f64();
  t.adam.epsilon = r.f64();
  t.eval_every = r.u32();
  t.seed = r.u64();
  t.mean_loss = r.u8() != 0;
  t.presample_count = r.u64();
  t.presample_coverage = r.f64();
  t.threads = r.u64();
  t.queue_capacity = r.u64();

  TrainState& s = c.state;
  s.model = read_model(r);
  s.adam.step = r.u64();
  s.adam.first_moment = read_matrices(r);
  s.adam.second_moment = read_matrices(r);
  s.dropout_rng = r.str();
  s.epoch = r.u32();
  s.iteration = r.u64();
  s.next_subgraph = r.u64();
  s.best_model = read_model(r);
  s.best_val_f1 = r.f64();
  s.pending_loss = r.f64();
  s.pending_batches = r.u64();
  const std::uint64_t records = r.u64();
  for (std::uint64_t i = 0; i < records; ++i) {
    MetricRecord m;
    m.iteration = r.u64();
    m.loss = r.f64();
    m.val_f1 = r.f64();
    s.log.push_back(m);
  }
  r.expect_end();
  return c;
}

}  // namespace subgcn
