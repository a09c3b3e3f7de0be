#include <doctest.h>

#include <numeric>

#include "subgcn/synthetic.hpp"
#include "subgcn/variance.hpp"
#include "test_support.hpp"

using namespace subgcn;
using namespace testing;

namespace {

EdgeAggregates scalar_edges(std::vector<double> values) {
  Matrix b(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) b(static_cast<Eigen::Index>(i), 0) = values[i];
  return aggregates_from_layers({b});
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("edge aggregates") {
  SUBCASE("single edge hand value") {
    const Graph g = make_graph({{0, 1}}, 2);
    Model m;
    m.weights = {Matrix::Constant(1, 1, 1.0)};
    Matrix x(2, 1);
    x << 1.0, 2.0;
    const EdgeAggregates a = edge_aggregates(g, x, m);
    REQUIRE(a.num_edges() == 1);
    CHECK(a.layer_sum(0, 0) == 3.0);
    CHECK(a.norms[0] == 3.0);
  }
  SUBCASE("zero features give zero terms") {
    Rng rng(1);
    const Graph g = random_graph(15, 0.3, 2);
    std::vector<std::size_t> dims{3, 2, 2};
    const Model m = Model::glorot(dims, Head::Softmax, rng);
    const EdgeAggregates a = edge_aggregates(g, Matrix::Zero(15, 3), m);
    CHECK(a.layer_sum.isZero(0.0));
    CHECK(a.per_layer.size() == 2);
  }
  SUBCASE("layer dims must agree") {
    Rng rng(1);
    std::vector<std::size_t> dims{3, 4, 2};
    const Model m = Model::glorot(dims, Head::Softmax, rng);
    CHECK_THROWS(edge_aggregates(triangle(), Matrix::Zero(3, 3), m));
  }
  SUBCASE("relabeling permutes the terms") {
    Rng rng(3);
    const NodeId n = 12;
    const Graph g = random_graph(n, 0.3, 4);
    std::vector<NodeId> perm(n);
    std::iota(perm.begin(), perm.end(), NodeId{0});
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    std::vector<Edge> edges;
    for (const Edge& e : g.edges()) edges.push_back({perm[e.u], perm[e.v]});
    const Graph h = Graph::build(edges, n);
    std::vector<std::size_t> dims{3, 2};
    const Model m = Model::glorot(dims, Head::Softmax, rng);
    const Matrix x = random_matrix(n, 3, rng);
    Matrix px(n, 3);
    for (NodeId v = 0; v < n; ++v) px.row(perm[v]) = x.row(v);
    const EdgeAggregates a = edge_aggregates(g, x, m);
    const EdgeAggregates b = edge_aggregates(h, px, m);
    for (std::size_t i = 0; i < a.num_edges(); ++i) {
      const Edge& e = g.edges()[a.edge_ids[i]];
      const EdgeId mapped = h.arc_edge()[*h.arc(perm[e.u], perm[e.v])];
      const auto j = static_cast<Eigen::Index>(std::find(b.edge_ids.begin(), b.edge_ids.end(), mapped) - b.edge_ids.begin());
      CHECK((a.layer_sum.row(static_cast<Eigen::Index>(i)) - b.layer_sum.row(j)).norm() < 1e-12);
    }
  }
}

TEST_CASE("optimal probabilities") {
  SUBCASE("equal norms, m = 1") {
    const auto p = optimal_edge_probs(scalar_edges({2, 2, 2, 2}), 1);
    for (double x : p) CHECK(x == doctest::Approx(0.25));
  }
  SUBCASE("norms (3, 1), m = 1") {
    const auto p = optimal_edge_probs(scalar_edges({3, 1}), 1);
    CHECK(p[0] == doctest::Approx(0.75));
    CHECK(p[1] == doctest::Approx(0.25));
  }
  SUBCASE("m = |E| saturates") {
    for (double x : optimal_edge_probs(scalar_edges({5, 1, 0.5}), 3)) CHECK(x == 1.0);
  }
  SUBCASE("water filling keeps the budget") {
    const auto p = optimal_edge_probs(scalar_edges({10, 1, 1, 1, 1}), 2);
    CHECK(p[0] == 1.0);
    for (int i = 1; i < 5; ++i) CHECK(p[i] == doctest::Approx(0.25));
    CHECK(sum(p) == doctest::Approx(2.0));
  }
  SUBCASE("all zero is an error") { CHECK_THROWS(optimal_edge_probs(scalar_edges({0, 0}), 1)); }
}

TEST_CASE("closed-form variance") {
  const EdgeAggregates a = scalar_edges({3, 1});
  CHECK(variance_closed_form(a, {1.0, 1.0}) == 0.0);
  CHECK(variance_closed_form(a, {0.75, 0.25}) == doctest::Approx(6.0));
  CHECK(variance_closed_form(a, {0.5, 0.5}) == doctest::Approx(10.0));
  CHECK(std::isinf(variance_closed_form(a, {1.0, 0.0})));
  CHECK(variance_closed_form(scalar_edges({3, 0}), {1.0, 0.0}) == 0.0);
}

TEST_CASE("closed form gradient in p matches finite differences") {
  Rng rng(5);
  Matrix b = random_matrix(6, 3, rng);
  const EdgeAggregates a = aggregates_from_layers({b});
  std::vector<double> p{0.3, 0.5, 0.7, 0.2, 0.9, 0.4};
  for (std::size_t i = 0; i < p.size(); ++i) {
    // d/dp_i = -||s_i||^2 / p_i^2
    const double analytic = -a.layer_sum.row(static_cast<Eigen::Index>(i)).squaredNorm() / (p[i] * p[i]);
    auto up = p, down = p;
    up[i] += 1e-6;
    down[i] -= 1e-6;
    const double numeric = (variance_closed_form(a, up) - variance_closed_form(a, down)) / 2e-6;
    CHECK(rel_err(analytic, numeric) < 1e-5);
  }
}

TEST_CASE("Monte Carlo variance") {
  SUBCASE("deterministic inclusion has zero variance") {
    const auto mc = variance_monte_carlo(scalar_edges({3, 1}), {1.0, 1.0}, 1000, 1);
    CHECK(mc.variance == 0.0);
    CHECK(mc.mean(0) == 4.0);
  }
  SUBCASE("agrees with closed form and optimal beats uniform") {
    const EdgeAggregates a = scalar_edges({3, 1});
    const auto opt = variance_monte_carlo(a, {0.75, 0.25}, 100000, 2);
    const auto uni = variance_monte_carlo(a, {0.5, 0.5}, 100000, 3);
    CHECK(std::abs(opt.variance - 6.0) <= 3 * opt.std_error);
    CHECK(std::abs(uni.variance - 10.0) <= 3 * uni.std_error);
    CHECK(opt.variance <= uni.variance - 3 * std::hypot(opt.std_error, uni.std_error));
    // Unbiased: mean of zeta is the plain sum.
    CHECK(opt.mean(0) == doctest::Approx(4.0).epsilon(0.01));
  }
  SUBCASE("thread count does not change the result") {
    Rng rng(6);
    const EdgeAggregates a = aggregates_from_layers({random_matrix(10, 2, rng), random_matrix(10, 2, rng)});
    const auto p = optimal_edge_probs(a, 3);
    const auto one = variance_monte_carlo(a, p, 5000, 9, 0);
    const auto many = variance_monte_carlo(a, p, 5000, 9, 3);
    CHECK(one.variance == many.variance);
    CHECK(identical(Matrix(one.mean), Matrix(many.mean)));
  }
  SUBCASE("graph overload on a small graph") {
    Rng rng(7);
    const Graph g = random_graph(10, 0.4, 8);
    std::vector<std::size_t> dims{3, 2};
    const Model m = Model::glorot(dims, Head::Softmax, rng);
    const Matrix x = random_matrix(10, 3, rng);
    const EdgeAggregates a = edge_aggregates(g, x, m);
    const auto p = topology_edge_probs(g, a, 4);
    const auto mc = variance_monte_carlo(g, x, m, p, 100000, 10);
    CHECK(std::abs(mc.variance - variance_closed_form(a, p)) <= 3 * mc.std_error);
    CHECK(variance_closed_form(a, optimal_edge_probs(a, 4)) <= variance_closed_form(a, p) + 1e-12);
  }
}

TEST_CASE("survival probability") {
  CHECK(survival_probability(1.0, 3, 4) == 1.0);
  CHECK(survival_probability(0.5, 1, 2) == 0.5);
  CHECK(survival_probability(0.5, 2, 3) == 0.5625);
  CHECK(survival_probability(0.3, 5, 1) == 1.0);
  CHECK_THROWS(survival_probability(1.5, 1, 1));
  CHECK_THROWS(survival_probability(0.5, 0, 1));

  const Graph ring = generate_regular(2, 40, 1);
  const auto sim = simulate_layer_survival(ring, 0.5, 3, 10000, 2);
  const double expected = survival_probability(0.5, 2, 3);
  const double se = std::sqrt(expected * (1 - expected) / 10000);
  CHECK(std::abs(sim.rate - expected) <= 3 * se);
}
