// Copyright 2026 The topocl Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "topocl/augment.hpp"

#include "support/fixtures.hpp"

using namespace topocl;

namespace {

Graph k4() {
  return make_graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
}

Graph random_graph(RngStream& rng, int n, double p) {
  std::vector<Edge> edges;
  std::vector<int> labels(n);
  for (int& l : labels) l = static_cast<int>(rng.uniform_index(4));
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (rng.uniform_real() < p) edges.emplace_back(u, v);
    }
  }
  return make_graph(n, edges, labels);
}

}  // namespace

TEST_CASE("node_drop basics") {
  RngStream rng(1);
  SECTION("ratio 0 keeps the graph") {
    const Graph tri = fixtures::triangle();
    const Graph out = node_drop(tri, 0.0, rng);
    CHECK(out == tri);
  }
  SECTION("triangle at ratio 0.34 leaves two nodes and one edge") {
    const Graph out = node_drop(fixtures::triangle(), 0.34, rng);
    CHECK(out.num_nodes == 2);
    CHECK(out.num_edges() == 1);
  }
  SECTION("floor arithmetic on a 10-node graph") {
    RngStream r2(5);
    const Graph g = random_graph(r2, 10, 0.3);
    const Graph out = node_drop(g, 0.2, rng);
    CHECK(out.num_nodes == 8);
  }
  SECTION("never drops every node") {
    const Graph lone = make_graph(1, {});
    const Graph out = node_drop(lone, 0.99, rng);
    CHECK(out.num_nodes == 1);
  }
  SECTION("empty graph and bad ratios are rejected") {
    Graph empty;
    CHECK_THROWS_AS(node_drop(empty, 0.2, rng), ContractError);
    CHECK_THROWS_AS(node_drop(fixtures::triangle(), 1.0, rng),
                    ContractError);
  }
}

TEST_CASE("node_drop output is an induced subgraph of the input") {
  RngStream rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    Graph g = random_graph(rng, 8, 0.4);
    // Tag every node with a unique feature so the mapping is recoverable.
    g.node_features.clear();
    for (int v = 0; v < g.num_nodes; ++v) {
      g.node_features.push_back({static_cast<double>(v)});
    }
    const Graph out = node_drop(g, 0.3, rng);
    CHECK(validate(out).empty());
    for (const auto& [u, v] : out.edges) {
      const int gu = static_cast<int>(out.node_features[u][0]);
      const int gv = static_cast<int>(out.node_features[v][0]);
      CHECK(std::binary_search(g.adj[gu].begin(), g.adj[gu].end(), gv));
    }
  }
}

TEST_CASE("edge_perturb basics") {
  RngStream rng(2);
  SECTION("ratio 0 keeps the graph") {
    const Graph g = fixtures::path3();
    CHECK(edge_perturb(g, 0.0, rng) == g);
  }
  SECTION("complete graph can only lose edges") {
    const Graph out = edge_perturb(k4(), 0.2, rng);
    CHECK(out.num_nodes == 4);
    CHECK(out.num_edges() == 5);  // one deleted, nothing to insert
  }
  SECTION("path at ratio 0.5 keeps its edge count") {
    const Graph out = edge_perturb(fixtures::path3(), 0.5, rng);
    CHECK(out.num_nodes == 3);
    CHECK(out.num_edges() == 2);
  }
  SECTION("node count is always preserved") {
    RngStream r2(23);
    for (int trial = 0; trial < 20; ++trial) {
      const Graph g = random_graph(r2, 7, 0.4);
      const Graph out = edge_perturb(g, 0.4, r2);
      CHECK(out.num_nodes == g.num_nodes);
      CHECK(validate(out).empty());
    }
  }
}

TEST_CASE("attr_mask basics") {
  RngStream rng(3);
  const std::vector<double> mean{0.5, 0.5};
  SECTION("requires features") {
    CHECK_THROWS_AS(attr_mask(fixtures::triangle(), 0.5, mean, rng),
                    ContractError);
  }
  SECTION("constant features are a fixed point of masking") {
    Graph g = fixtures::triangle();
    g.node_features.assign(3, {1.0, 1.0});
    const Graph out = attr_mask(g, 0.67, {1.0, 1.0}, rng);
    CHECK(out == g);
  }
  SECTION("masks exactly floor(ratio*n) rows with the mean") {
    Graph g = make_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
    g.node_features.clear();
    for (int v = 0; v < 5; ++v) {
      g.node_features.push_back({static_cast<double>(v + 1), 0.0});
    }
    const Graph out = attr_mask(g, 0.4, mean, rng);
    int masked = 0;
    for (int v = 0; v < 5; ++v) {
      if (out.node_features[v] == mean) ++masked;
    }
    CHECK(masked == 2);
    CHECK(out.edges == g.edges);
  }
  SECTION("mean dimension must match") {
    Graph g = fixtures::triangle();
    g.node_features.assign(3, {1.0, 2.0});
    CHECK_THROWS_AS(attr_mask(g, 0.5, {1.0}, rng), DimensionError);
  }
}

TEST_CASE("subgraph_sample basics") {
  RngStream rng(4);
  SECTION("tiny ratio keeps a connected graph whole") {
    const Graph c5 = fixtures::cycle(5);
    const Graph out = subgraph_sample(c5, 0.01, rng);
    CHECK(out.num_nodes == 5);
    CHECK(out.num_edges() == 5);
  }
  SECTION("triangle at ratio 0.34 gives an edge") {
    const Graph out = subgraph_sample(fixtures::triangle(), 0.34, rng);
    CHECK(out.num_nodes == 2);
    CHECK(out.num_edges() == 1);
  }
  SECTION("walks into a star always pass the center") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      RngStream r(seed);
      const Graph out = subgraph_sample(fixtures::star(4), 0.4, r);
      REQUIRE(out.num_nodes == 3);
      // center has degree > 1 in any 3-node induced star subgraph
      bool has_center = false;
      for (int v = 0; v < out.num_nodes; ++v) {
        if (out.adj[v].size() == 2) has_center = true;
      }
      CHECK(has_center);
    }
  }
  SECTION("disconnected input caps at the reachable component") {
    const Graph two = fixtures::two_triangles();
    const Graph out = subgraph_sample(two, 0.2, rng);
    // target is ceil(0.8 * 6) = 5, but a component has only 3 nodes
    CHECK((out.num_nodes == 3 || out.num_nodes == 5));
    CHECK(validate(out).empty());
  }
  SECTION("ratio bounds") {
    CHECK_THROWS_AS(subgraph_sample(fixtures::triangle(), 0.0, rng),
                    ContractError);
    Graph empty;
    CHECK_THROWS_AS(subgraph_sample(empty, 0.5, rng), ContractError);
  }
}

TEST_CASE("augmentations are deterministic under a fixed seed") {
  RngStream base(55);
  const Graph g = random_graph(base, 9, 0.4);
  const AugmentContext ctx{std::vector<double>(4, 0.25)};
  for (AugmentKind kind :
       {AugmentKind::kNodeDrop, AugmentKind::kEdgePerturb,
        AugmentKind::kSubgraph, AugmentKind::kIdentity}) {
    const AugmentSpec spec{kind, 0.3};
    RngStream r1(123), r2(123), r3(321);
    const Graph a = apply_augment(g, spec, ctx, r1);
    const Graph b = apply_augment(g, spec, ctx, r2);
    CHECK(a == b);
    if (kind == AugmentKind::kNodeDrop) {
      // different streams usually pick different nodes
      const Graph c = apply_augment(g, spec, ctx, r3);
      CHECK(validate(c).empty());
    }
  }
}

TEST_CASE("every augmentation output passes validation") {
  RngStream rng(77);
  const AugmentContext ctx{std::vector<double>(4, 0.25)};
  for (int trial = 0; trial < 25; ++trial) {
    Graph g = random_graph(rng, 2 + static_cast<int>(rng.uniform_index(10)),
                           0.35);
    g.node_features.assign(g.num_nodes, std::vector<double>(4, 1.0));
    for (AugmentKind kind :
         {AugmentKind::kNodeDrop, AugmentKind::kEdgePerturb,
          AugmentKind::kAttrMask, AugmentKind::kSubgraph}) {
      const Graph out = apply_augment(g, {kind, 0.25}, ctx, rng);
      CHECK(validate(out).empty());
      CHECK(out.num_nodes >= 1);
    }
  }
}
