#include "subgcn/producer.hpp"

#include <stdexcept>

namespace subgcn {

SubgraphProducer::SubgraphProducer(const Sampler& sampler, std::size_t threads,
                                   std::size_t capacity, std::uint64_t first_index)
    : sampler_(sampler),
      capacity_(capacity == 0 ? 1 : capacity),
      next_claim_(first_index),
      next_out_(first_index) {
  workers_.reserve(threads);
  for (std::size_t i = 0; i < threads; ++i) workers_.emplace_back([this] { work(); });
}

SubgraphProducer::~SubgraphProducer() { stop(); }

void SubgraphProducer::stop() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  space_.notify_all();
  ready_.notify_all();
  for (auto& t : workers_) {
    if (t.joinable()) t.join();
  }
  workers_.clear();
  std::lock_guard lock(mutex_);
  done_.clear();
}

void SubgraphProducer::work() {
  for (;;) {
    std::uint64_t index;
    {
      std::unique_lock lock(mutex_);
      space_.wait(lock, [&] { return stopping_ || next_claim_ < next_out_ + capacity_; });
      if (stopping_) return;
      index = next_claim_++;
    }
    try {
      Subgraph s = sampler_.sample(index);
      std::lock_guard lock(mutex_);
      done_.emplace(index, std::move(s));
    } catch (...) {
      std::lock_guard lock(mutex_);
      if (!failure_) failure_ = std::current_exception();
    }
    ready_.notify_all();
  }
}

Subgraph SubgraphProducer::next() {
  if (workers_.empty()) {
    std::lock_guard lock(mutex_);
    if (stopping_) throw std::logic_error("producer stopped");
    return sampler_.sample(next_out_++);
  }
  std::unique_lock lock(mutex_);
  ready_.wait(lock, [&] { return stopping_ || failure_ || done_.count(next_out_) > 0; });
  if (failure_) std::rethrow_exception(failure_);
  if (stopping_) throw std::logic_error("producer stopped");
  auto node = done_.extract(next_out_);
  ++next_out_;
  lock.unlock();
  space_.notify_all();
  return std::move(node.mapped());
}

std::uint64_t SubgraphProducer::next_index() const {
  std::lock_guard lock(mutex_);
  return next_out_;
}

std::vector<Subgraph> sample_many(const Sampler& sampler, std::uint64_t first, std::uint64_t count,
                                  std::size_t threads) {
  std::vector<Subgraph> out;
  out.reserve(count);
  SubgraphProducer producer(sampler, threads, threads == 0 ? 1 : 4 * threads, first);
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(producer.next());
  return out;
}

}  // namespace subgcn
