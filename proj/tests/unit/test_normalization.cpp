#include <doctest.h>

#include "subgcn/gcn.hpp"
#include "subgcn/normalization.hpp"
#include "test_support.hpp"

using namespace subgcn;
using namespace testing;

namespace {

SamplerConfig edge_indep(std::uint32_t m, bool induce, std::uint64_t seed = 1) {
  SamplerConfig c;
  c.kind = SamplerKind::EdgeIndependent;
  c.edge_budget = m;
  c.induce = induce;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("full-graph sampler gives unit coefficients") {
  const Graph g = random_graph(20, 0.2, 1);
  SamplerConfig c;
  c.kind = SamplerKind::Full;
  const CoeffEstimate est = estimate_coeffs(g, c, 10);
  CHECK(est.cache.size() == 10);
  for (double a : est.coeffs.alpha) CHECK(a == 1.0);
  for (double l : est.coeffs.lambda) CHECK(l == 1.0);
  CHECK(estimate_coeffs_by_coverage(g, c).coeffs.num_subgraphs == 1);
}

TEST_CASE("saturated K_3 gives unit coefficients") {
  const CoeffEstimate est = estimate_coeffs(triangle(), edge_indep(3, true), 5);
  for (double a : est.coeffs.alpha) CHECK(a == 1.0);
  for (double l : est.coeffs.lambda) CHECK(l == 1.0);
}

TEST_CASE("never-sampled node has lambda 0") {
  const Graph g = make_graph({{0, 1}, {1, 2}}, 4);
  SamplerConfig c;
  c.kind = SamplerKind::Edge;
  c.edge_budget = 1;
  const CoeffEstimate est = estimate_coeffs(g, c, 50);
  CHECK(est.coeffs.lambda[3] == 0.0);
  CHECK(est.coeffs.node_counts[3] == 0);
}

TEST_CASE("empirical coefficients are exact count ratios") {
  const Graph g = random_graph(30, 0.15, 2);
  SamplerConfig c;
  c.kind = SamplerKind::RandomWalk;
  c.roots = 3;
  c.walk_length = 2;
  c.seed = 9;
  const CoeffEstimate est = estimate_coeffs(g, c, 400);
  const NormCoeffs& k = est.coeffs;
  CHECK(k.num_subgraphs == 400);
  CHECK(k.source == CoeffSource::Empirical);

  // Independent recount from the cache.
  std::vector<std::uint64_t> cv(g.num_nodes(), 0), ce(g.num_edges(), 0);
  for (const Subgraph& s : est.cache) {
    for (NodeId v : s.nodes) ++cv[v];
    for (ArcId a : s.arc_origin) {
      const Edge& e = g.edges()[g.arc_edge()[a]];
      if (g.arc_source(a) == e.u) ++ce[g.arc_edge()[a]];
    }
  }
  CHECK(k.node_counts == cv);
  CHECK(k.edge_counts == ce);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    CHECK(k.lambda[v] == double(cv[v]) / 400.0);
    for (ArcId a = g.arc_begin(v); a < g.arc_end(v); ++a) {
      const auto e = g.arc_edge()[a];
      CHECK(ce[e] <= cv[v]);
      const double expected = ce[e] > 0 ? double(ce[e]) / cv[v] : double(ce[e] + 1) / (cv[v] + 1);
      CHECK(k.alpha[a] == expected);
      // Shared counter: both arcs of an edge read the same C_uv.
      const NodeId u = g.col_indices()[a];
      CHECK(k.edge_counts[g.arc_edge()[*g.arc(u, v)]] == ce[e]);
    }
  }
}

TEST_CASE("counter merge equals one pass") {
  const Graph g = random_graph(25, 0.2, 3);
  const Sampler sampler(g, edge_indep(6, true, 4));
  CoeffCounter all(g), left(g), right(g);
  for (std::uint64_t i = 0; i < 100; ++i) {
    const Subgraph s = sampler.sample(i);
    all.add(s);
    (i < 40 ? left : right).add(s);
  }
  left.merge(right);
  CHECK(left.finalize() == all.finalize());
}

TEST_CASE("estimation is thread-count independent") {
  const Graph g = random_graph(60, 0.08, 4);
  SamplerConfig c;
  c.kind = SamplerKind::MultiRandomWalk;
  c.node_budget = 20;
  c.roots = 4;
  c.seed = 3;
  const auto a = estimate_coeffs_by_coverage(g, c, 10.0, 0);
  const auto b = estimate_coeffs_by_coverage(g, c, 10.0, 3);
  CHECK(a.coeffs == b.coeffs);
  CHECK(a.cache == b.cache);
  double nodes = 0;
  for (const auto& s : a.cache) nodes += s.num_nodes();
  CHECK(nodes >= 10.0 * 60);
}

TEST_CASE("analytic coefficients") {
  SUBCASE("single edge") {
    const NormCoeffs k = analytic_coeffs_edge(make_graph({{0, 1}}, 2), 1);
    CHECK(k.source == CoeffSource::Analytic);
    CHECK(k.alpha == std::vector<double>{1.0, 1.0});
    CHECK(k.lambda == std::vector<double>{2.0, 2.0});
  }
  SUBCASE("square with chord, m = 1") {
    const Graph g = square_with_chord();
    const NormCoeffs k = analytic_coeffs_edge(g, 1);
    CHECK(k.lambda[0] == doctest::Approx(4.0 / 3));  // |V| * p_0, p_0 = 1/3
    CHECK(k.alpha[*g.arc(0, 1)] == doctest::Approx(1.0));
    // p_1 = 1 - (2/3)(19/24)(19/24)
    const double p1 = 1.0 - (2.0 / 3) * (19.0 / 24) * (19.0 / 24);
    CHECK(k.lambda[1] == doctest::Approx(4 * p1));
    CHECK(k.alpha[*g.arc(1, 0)] == doctest::Approx((1.0 / 3) / p1));
  }
  SUBCASE("saturated regular graph reduces to the full graph") {
    const Graph g = make_graph({{0, 1}, {1, 2}, {2, 3}, {0, 3}}, 4);
    const NormCoeffs k = analytic_coeffs_edge(g, 4);
    for (double a : k.alpha) CHECK(a == 1.0);
    for (double l : k.lambda) CHECK(l == 4.0);
  }
}

TEST_CASE("normalized arc value") {
  const Graph g = triangle();
  NormCoeffs k;
  k.alpha.assign(g.num_arcs(), 1.0);
  for (ArcId a = 0; a < g.num_arcs(); ++a) CHECK(normalized_arc_value(g, k, a) == g.norm_values()[a]);
  k.alpha[0] = 0.25;
  CHECK(normalized_arc_value(g, k, 0) == 2.0);
  CHECK_THROWS(normalized_arc_value(g, k, 99));
}

TEST_CASE("empirical node rates approach analytic p_v") {
  const Graph g = square_with_chord();
  const NormCoeffs analytic = analytic_coeffs_edge(g, 1);
  const NormCoeffs emp = estimate_coeffs(g, edge_indep(1, false, 8), 20000).coeffs;
  for (NodeId v = 0; v < 4; ++v) CHECK(emp.lambda[v] == doctest::Approx(analytic.lambda[v] / 4).epsilon(0.05));
  for (ArcId a = 0; a < g.num_arcs(); ++a) CHECK(emp.alpha[a] == doctest::Approx(analytic.alpha[a]).epsilon(0.05));
}

TEST_CASE("normalized aggregation is unbiased given v") {
  // Conditional mean over sampled subgraphs containing v of
  // sum_u (A~[v][u] / alpha) x_u 1_{u|v} equals the full aggregation.
  const Graph g = random_graph(12, 0.35, 6);
  const double m = 4;
  const NormCoeffs k = analytic_coeffs_edge(g, m);
  Rng rng(3);
  const Matrix x = random_matrix(g.num_nodes(), 3, rng);
  const Matrix full = full_propagation(g).apply(x);

  const Sampler sampler(g, edge_indep(4, false, 21));
  Matrix sum = Matrix::Zero(g.num_nodes(), 3);
  Matrix sq = Matrix::Zero(g.num_nodes(), 3);
  std::vector<double> hits(g.num_nodes(), 0.0);
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) {
    const Subgraph s = sampler.sample(std::uint64_t(t));
    if (s.num_nodes() == 0) continue;
    const Propagation p = subgraph_propagation(g, s, &k);
    Matrix xs(s.num_nodes(), 3);
    for (std::size_t i = 0; i < s.num_nodes(); ++i) xs.row(i) = x.row(s.nodes[i]);
    const Matrix z = p.apply(xs);
    for (std::size_t i = 0; i < s.num_nodes(); ++i) {
      sum.row(s.nodes[i]) += z.row(i);
      sq.row(s.nodes[i]) += z.row(i).cwiseProduct(z.row(i));
      hits[s.nodes[i]] += 1;
    }
  }
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (g.degree(v) == 0) continue;
    for (int d = 0; d < 3; ++d) {
      const double mean = sum(v, d) / hits[v];
      const double var = sq(v, d) / hits[v] - mean * mean;
      const double se = std::sqrt(std::max(var, 0.0) / hits[v]);
      const double err = std::abs(mean - full(v, d));
      CHECK((err <= 0.02 * std::abs(full(v, d)) || err <= 4 * se));
    }
  }
}
