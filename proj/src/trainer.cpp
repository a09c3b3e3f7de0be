#include "subgcn/trainer.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "subgcn/errors.hpp"
#include "subgcn/metrics.hpp"
#include "subgcn/producer.hpp"

namespace subgcn {

namespace {

constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kDropoutStream = 1;

std::string shortest(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace

std::vector<std::size_t> ModelSpec::dims(std::size_t input_dim, std::size_t classes) const {
  if (layers == 0) throw std::invalid_argument("model needs at least one layer");
  if (layers > 1 && hidden == 0) throw std::invalid_argument("hidden dim must be positive");
  std::vector<std::size_t> d{input_dim};
  for (std::uint32_t l = 1; l < layers; ++l) d.push_back(hidden);
  d.push_back(classes);
  return d;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw std::invalid_argument("learning rate must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("dropout must be in [0, 1)");
  if (epochs == 0) throw std::invalid_argument("epochs must be at least 1");
  if (eval_every == 0) throw std::invalid_argument("eval_every must be at least 1");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    throw std::invalid_argument("Adam betas must be in [0, 1)");
  }
  if (!(adam.epsilon > 0.0)) throw std::invalid_argument("Adam epsilon must be positive");
  if (presample_count == 0 && !(presample_coverage > 0.0)) throw std::invalid_argument("presample coverage must be positive");
  if (queue_capacity == 0) throw std::invalid_argument("queue capacity must be at least 1");
}

Trainer::Trainer(const Dataset& data, const ModelSpec& model, const SamplerConfig& sampler, const TrainConfig& config)
    : data_(data),
      model_spec_(model),
      sampler_config_(sampler),
      config_(config),
      sampler_(data.graph, sampler),
      dropout_rng_(Rng::stream(config.seed, kDropoutStream)) {
  data_.validate();
  config_.validate();

  CoeffEstimate est = config_.presample_count > 0
                          ? estimate_coeffs(data_.graph, sampler_config_, config_.presample_count, config_.threads)
                          : estimate_coeffs_by_coverage(data_.graph, sampler_config_, config_.presample_coverage,
                                                        config_.threads);
  coeffs_ = std::move(est.coeffs);
  cache_ = std::move(est.cache);

  if (config_.batches_per_epoch > 0) {
    batches_per_epoch_ = config_.batches_per_epoch;
  } else {
    double total = 0.0;
    for (const Subgraph& s : cache_) total += static_cast<double>(s.num_nodes());
    const double mean = total / static_cast<double>(cache_.size());
    batches_per_epoch_ =
        mean > 0.0 ? static_cast<std::uint32_t>(std::ceil(data_.graph.num_nodes() / mean)) : 1;
    if (batches_per_epoch_ == 0) batches_per_epoch_ = 1;
  }

  train_mask_ = data_.mask(Split::Train);
  Rng init = Rng::stream(config_.seed, kInitStream);
  const auto dims = model_spec_.dims(static_cast<std::size_t>(data_.features.cols()), data_.num_classes);
  state_.model = Model::glorot(dims, data_.head(), init);
  state_.adam = AdamState::zeros_like(state_.model);
  state_.best_model = state_.model;
  state_.dropout_rng = dropout_rng_.save_state();
}

Trainer::~Trainer() = default;

void Trainer::restore(TrainState state) {
  state.model.validate();
  if (state.model.dims() != state_.model.dims() || state.model.head != state_.model.head) {
    throw DataError("checkpoint model shape does not match the configured model");
  }
  if (state.adam.first_moment.size() != state.model.num_layers() ||
      state.adam.second_moment.size() != state.model.num_layers()) {
    throw DataError("checkpoint optimizer state does not match the model");
  }
  dropout_rng_.load_state(state.dropout_rng);
  state_ = std::move(state);
  producer_.reset();
}

Subgraph Trainer::next_subgraph() {
  const std::uint64_t index = state_.next_subgraph++;
  if (index < cache_.size()) return cache_[index];
  if (!producer_ || producer_->next_index() != index) {
    producer_.reset();
    producer_ = std::make_unique<SubgraphProducer>(sampler_, config_.threads, config_.queue_capacity, index);
  }
  return producer_->next();
}

void Trainer::train_step(const Subgraph& s) {
  if (s.num_nodes() == 0) return;
  const Batch batch = make_batch(data_.graph, s, &coeffs_, data_.features, data_.targets, train_mask_);
  const ForwardCache cache = forward_subgraph(state_.model, batch, {config_.dropout, &dropout_rng_});
  LossResult res = loss_and_grad(state_.model, batch, cache, config_.mean_loss);
  if (res.contributing == 0) return;
  if (!std::isfinite(res.loss)) {
    throw NumericError("non-finite loss at iteration " + std::to_string(state_.iteration) + " (subgraph " +
                       std::to_string(state_.next_subgraph - 1) + ", " + std::to_string(s.num_nodes()) + " nodes)");
  }
  adam_step(state_.model, res.grads, state_.adam, config_.learning_rate, config_.adam);
  state_.pending_loss += res.loss;
  ++state_.pending_batches;
  ++state_.iteration;
}

void Trainer::run_epochs(std::uint32_t count) {
  for (std::uint32_t e = 0; e < count && !finished(); ++e) {
    for (std::uint32_t b = 0; b < batches_per_epoch_; ++b) train_step(next_subgraph());
    ++state_.epoch;
    state_.dropout_rng = dropout_rng_.save_state();
    if (state_.epoch % config_.eval_every != 0 && state_.epoch != config_.epochs) continue;

    MetricRecord rec;
    rec.iteration = state_.iteration;
    rec.loss = state_.pending_batches > 0 ? state_.pending_loss / static_cast<double>(state_.pending_batches) : 0.0;
    rec.val_f1 = evaluate(state_.model, Split::Val);
    state_.log.push_back(rec);
    state_.pending_loss = 0.0;
    state_.pending_batches = 0;
    if (rec.val_f1 > state_.best_val_f1) {
      state_.best_val_f1 = rec.val_f1;
      state_.best_model = state_.model;
    }
  }
}

double Trainer::evaluate(const Model& model, Split which) const {
  std::vector<NodeId> rows = data_.nodes_in(which);
  // Datasets without a validation split select on training nodes instead.
  if (rows.empty() && which == Split::Val) rows = data_.nodes_in(Split::Train);
  if (rows.empty()) throw DataError("split has no nodes to evaluate");
  const Matrix scores = forward_full(model, data_.graph, data_.features);
  return f1_micro(scores, data_.targets, model.head, rows);
}

TrainResult train(const Dataset& data, const ModelSpec& model, const SamplerConfig& sampler,
                  const TrainConfig& config) {
  Trainer trainer(data, model, sampler, config);
  trainer.run();
  TrainResult out;
  out.best_model = trainer.state().best_model;
  out.log = trainer.state().log;
  out.test_f1 = trainer.test_f1();
  return out;
}

std::string format_metric(const MetricRecord& record) {
  return "iter " + std::to_string(record.iteration) + " loss " + shortest(record.loss) + " val_f1 " +
         shortest(record.val_f1);
}

void write_metric_log(std::ostream& out, const std::vector<MetricRecord>& log, std::optional<double> test_f1) {
  for (const MetricRecord& r : log) out << format_metric(r) << '\n';
  if (test_f1) out << "test_f1 " << shortest(*test_f1) << '\n';
}

}  // namespace subgcn
