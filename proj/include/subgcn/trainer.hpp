#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "subgcn/dataset.hpp"
#include "subgcn/gcn.hpp"
#include "subgcn/normalization.hpp"
#include "subgcn/optimizer.hpp"
#include "subgcn/samplers.hpp"

namespace subgcn {

struct ModelSpec {
  std::uint32_t layers = 2;
  std::uint32_t hidden = 128;

  std::vector<std::size_t> dims(std::size_t input_dim, std::size_t classes) const;
  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct TrainConfig {
  double learning_rate = 0.01;
  double dropout = 0.0;
  std::uint32_t epochs = 10;
  // 0: ceil(|V| / mean subgraph size), measured on the presampled cache.
  std::uint32_t batches_per_epoch = 0;
  AdamConfig adam;
  std::uint32_t eval_every = 1;  // epochs between validation passes
  std::uint64_t seed = 0;
  // Divide the minibatch loss by its contributing node count.
  bool mean_loss = false;
  // Presampling: fixed N when nonzero, otherwise sample until the cache
  // covers presample_coverage * |V| nodes.
  std::uint64_t presample_count = 0;
  double presample_coverage = 50.0;
  std::size_t threads = 0;  // sampler workers; 0 samples inline
  std::size_t queue_capacity = 16;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct MetricRecord {
  std::uint64_t iteration = 0;
  double loss = 0.0;
  double val_f1 = 0.0;
  friend bool operator==(const MetricRecord&, const MetricRecord&) = default;
};

/// Everything that changes while training; enough to resume bit-exactly.
struct TrainState {
  Model model;
  AdamState adam;
  std::string dropout_rng;
  std::uint32_t epoch = 0;
  std::uint64_t iteration = 0;
  std::uint64_t next_subgraph = 0;
  Model best_model;
  double best_val_f1 = -1.0;
  double pending_loss = 0.0;
  std::uint64_t pending_batches = 0;
  std::vector<MetricRecord> log;

  friend bool operator==(const TrainState&, const TrainState&) = default;
};

/*
  Minibatch training loop. Construction presamples the coefficient cache;
  those subgraphs are the first minibatches, after which fresh ones come
  from a SubgraphProducer continuing the same instance numbering. After
  every eval_every epochs (and the last) the current model is scored on
  the validation nodes with full-graph inference; the best-scoring model
  is retained.
*/
class Trainer {
 public:
  Trainer(const Dataset& data, const ModelSpec& model, const SamplerConfig& sampler, const TrainConfig& config);
  ~Trainer();

  /// Runs up to `count` further epochs (stopping at config.epochs).
  void run_epochs(std::uint32_t count);
  void run() { run_epochs(config_.epochs); }
  bool finished() const { return state_.epoch >= config_.epochs; }

  const TrainState& state() const { return state_; }
  void restore(TrainState state);

  const NormCoeffs& coeffs() const { return coeffs_; }
  std::size_t cached_subgraphs() const { return cache_.size(); }
  std::uint32_t batches_per_epoch() const { return batches_per_epoch_; }
  const ModelSpec& model_spec() const { return model_spec_; }
  const SamplerConfig& sampler_config() const { return sampler_config_; }
  const TrainConfig& config() const { return config_; }

  /// F1-micro of `model` on one split via full-graph inference.
  double evaluate(const Model& model, Split which) const;
  double test_f1() const { return evaluate(state_.best_model, Split::Test); }

 private:
  Subgraph next_subgraph();
  void train_step(const Subgraph& s);

  const Dataset& data_;
  ModelSpec model_spec_;
  SamplerConfig sampler_config_;
  TrainConfig config_;
  Sampler sampler_;
  NormCoeffs coeffs_;
  std::vector<Subgraph> cache_;
  std::vector<std::uint8_t> train_mask_;
  std::uint32_t batches_per_epoch_ = 1;
  std::unique_ptr<class SubgraphProducer> producer_;
  Rng dropout_rng_;
  TrainState state_;
};

struct TrainResult {
  Model best_model;
  std::vector<MetricRecord> log;
  double test_f1 = 0.0;
};

TrainResult train(const Dataset& data, const ModelSpec& model, const SamplerConfig& sampler,
                  const TrainConfig& config);

/// `iter <k> loss <float> val_f1 <float>` per record, then `test_f1 <float>`.
void write_metric_log(std::ostream& out, const std::vector<MetricRecord>& log, std::optional<double> test_f1);
std::string format_metric(const MetricRecord& record);

}  // namespace subgcn
