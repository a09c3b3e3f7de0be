#pragma once

#include <condition_variable>
#include <cstdint>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include "subgcn/samplers.hpp"

namespace subgcn {

/*
  Worker pool feeding subgraphs to a consumer through a bounded queue.

  Workers claim consecutive instance indices and sample them with
  Sampler::sample(index). next() hands them out strictly in index order, so
  the sequence is identical for any thread count. At most `capacity`
  finished or in-flight subgraphs run ahead of the consumer.

  With zero threads, next() samples inline on the calling thread.
*/
class SubgraphProducer {
 public:
  SubgraphProducer(const Sampler& sampler, std::size_t threads, std::size_t capacity,
                   std::uint64_t first_index = 0);
  ~SubgraphProducer();

  SubgraphProducer(const SubgraphProducer&) = delete;
  SubgraphProducer& operator=(const SubgraphProducer&) = delete;

  Subgraph next();
  std::uint64_t next_index() const;

  /// Stops the workers and discards queued results.
  void stop();

 private:
  void work();

  const Sampler& sampler_;
  const std::size_t capacity_;
  mutable std::mutex mutex_;
  std::condition_variable ready_;
  std::condition_variable space_;
  std::map<std::uint64_t, Subgraph> done_;
  std::uint64_t next_claim_;
  std::uint64_t next_out_;
  bool stopping_ = false;
  std::exception_ptr failure_;
  std::vector<std::thread> workers_;
};

/// Samples instances [first, first + count) using up to `threads` workers.
std::vector<Subgraph> sample_many(const Sampler& sampler, std::uint64_t first, std::uint64_t count,
                                  std::size_t threads);

}  // namespace subgcn
