// Copyright 2026 The dsp-slp Authors
//
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

#include "dspslp/ddg.h"

#include <algorithm>
#include <functional>
#include <numeric>

#include "dspslp/analysis.h"

namespace dspslp {
namespace {

void checkNoZeroDistanceCycle(const DepGraph &g) {
  // Kahn's algorithm over the intra-iteration edges.
  std::vector<unsigned> indeg(g.size(), 0);
  std::vector<std::vector<size_t>> succ(g.size());
  for (const DdgEdge &e : g.edges)
    if (e.distance == 0) {
      succ[e.src].push_back(e.dst);
      ++indeg[e.dst];
    }
  std::vector<size_t> ready;
  for (size_t v = 0; v < g.size(); ++v)
    if (indeg[v] == 0)
      ready.push_back(v);
  size_t seen = 0;
  while (!ready.empty()) {
    size_t v = ready.back();
    ready.pop_back();
    ++seen;
    for (size_t w : succ[v])
      if (--indeg[w] == 0)
        ready.push_back(w);
  }
  if (seen != g.size())
    throw DdgError(DdgError::Kind::ZeroDistanceCycle,
                   "dependence cycle with total distance 0");
}

/// Looks for a cycle with sum(lat) > ii * sum(dist). Returns its nodes in
/// traversal order, or nothing.
std::vector<size_t> positiveCycle(const DepGraph &g, int64_t ii) {
  const size_t n = g.size();
  std::vector<int64_t> dist(n, 0); // virtual source to every node
  std::vector<long> pred(n, -1);
  long updated = -1;
  if (n == 0)
    return {};
  for (size_t round = 0; round < n; ++round) {
    updated = -1;
    for (size_t k = 0; k < g.edges.size(); ++k) {
      const DdgEdge &e = g.edges[k];
      int64_t w = ii * e.distance - static_cast<int64_t>(g.latency[e.src]);
      if (dist[e.src] + w < dist[e.dst]) {
        dist[e.dst] = dist[e.src] + w;
        pred[e.dst] = static_cast<long>(k);
        updated = static_cast<long>(e.dst);
      }
    }
    if (updated < 0)
      return {};
  }
  // Still relaxing after n rounds: walking back n steps lands on the cycle.
  size_t v = static_cast<size_t>(updated);
  for (size_t i = 0; i < n; ++i)
    v = g.edges[static_cast<size_t>(pred[v])].src;
  std::vector<size_t> cycle;
  size_t u = v;
  do {
    cycle.push_back(u);
    u = g.edges[static_cast<size_t>(pred[u])].src;
  } while (u != v);
  std::reverse(cycle.begin(), cycle.end());
  return cycle;
}

unsigned ceilDiv(uint64_t a, uint64_t b) {
  return static_cast<unsigned>((a + b - 1) / b);
}

} // namespace

size_t DepGraph::addNode(unsigned lat, std::string label) {
  latency.push_back(lat);
  if (label.empty())
    label = "n" + std::to_string(latency.size() - 1);
  labels.push_back(std::move(label));
  return latency.size() - 1;
}

void DepGraph::addEdge(size_t src, size_t dst, unsigned distance) {
  edges.push_back({src, dst, distance});
}

LatencyTable defaultLatencies() {
  return {{Opcode::Add, 1},  {Opcode::Sub, 1},   {Opcode::Mul, 1},
          {Opcode::Load, 1}, {Opcode::Call, 1},  {Opcode::Store, 0},
          {Opcode::SExt, 0}, {Opcode::ZExt, 0},  {Opcode::Trunc, 0},
          {Opcode::Extract, 0}, {Opcode::Ret, 0}};
}

DepGraph buildDepGraph(const Function &f, const LatencyTable &lat) {
  DepGraph g;
  std::vector<long> node(f.body.size(), -1);
  for (size_t i = 0; i < f.body.size(); ++i) {
    const Instruction &inst = f.body[i];
    if (inst.op == Opcode::Ret)
      continue;
    auto it = lat.find(inst.op);
    std::string label = inst.hasResult()
                            ? "%" + inst.result
                            : std::string(opcodeName(inst.op)) + "#" +
                                  std::to_string(i);
    node[i] = static_cast<long>(
        g.addNode(it == lat.end() ? 1 : it->second, std::move(label)));
    g.ids.push_back(inst.id);
  }

  for (const OrderConstraint &c : orderConstraints(f)) {
    long s = node[static_cast<size_t>(c.before)];
    long d = node[static_cast<size_t>(c.after)];
    if (s >= 0 && d >= 0)
      g.addEdge(static_cast<size_t>(s), static_cast<size_t>(d), 0);
  }

  for (const CarriedEdge &e : f.carried) {
    size_t s = f.defIndex(e.from);
    size_t d = f.defIndex(e.to);
    if (s == Function::npos || d == Function::npos)
      throw DdgError(DdgError::Kind::InvalidAnnotation,
                     "carried edge %" + e.from + " -> %" + e.to +
                         " names a value with no defining instruction");
    g.addEdge(static_cast<size_t>(node[s]), static_cast<size_t>(node[d]),
              e.distance);
  }
  return g;
}

MinIIResult minII(const DepGraph &g) {
  checkNoZeroDistanceCycle(g);
  uint64_t total = std::accumulate(g.latency.begin(), g.latency.end(),
                                   uint64_t{0});
  // Any cycle has distance >= 1, so II = total latency is always feasible.
  int64_t lo = 1, hi = std::max<int64_t>(1, static_cast<int64_t>(total));
  while (lo < hi) {
    int64_t mid = lo + (hi - lo) / 2;
    if (positiveCycle(g, mid).empty())
      hi = mid;
    else
      lo = mid + 1;
  }
  MinIIResult r;
  r.minII = static_cast<unsigned>(lo);
  // A cycle infeasible at minII - 1 attains minII.
  r.criticalCycle = positiveCycle(g, lo - 1);
  return r;
}

MinIIResult minIIByEnumeration(const DepGraph &g) {
  checkNoZeroDistanceCycle(g);
  const size_t n = g.size();
  std::vector<std::vector<size_t>> out(n);
  for (size_t k = 0; k < g.edges.size(); ++k)
    out[g.edges[k].src].push_back(k);

  MinIIResult best;
  bool found = false;
  std::vector<size_t> path;
  std::vector<bool> onPath(n, false);

  // Each elementary cycle is visited once, from its smallest node.
  std::function<void(size_t, size_t, uint64_t, uint64_t)> walk =
      [&](size_t start, size_t v, uint64_t lat, uint64_t dist) {
        path.push_back(v);
        onPath[v] = true;
        lat += g.latency[v];
        for (size_t k : out[v]) {
          const DdgEdge &e = g.edges[k];
          if (e.dst == start) {
            unsigned ratio = ceilDiv(lat, dist + e.distance);
            if (!found || ratio > best.minII) {
              best.minII = std::max(1u, ratio);
              best.criticalCycle = path;
              found = true;
            }
          } else if (e.dst > start && !onPath[e.dst]) {
            walk(start, e.dst, lat, dist + e.distance);
          }
        }
        onPath[v] = false;
        path.pop_back();
      };
  for (size_t s = 0; s < n; ++s)
    walk(s, s, 0, 0);
  return best;
}

DepGraph contract(const DepGraph &g, const std::set<size_t> &tuple) {
  DepGraph c;
  std::vector<size_t> map(g.size());
  long super = -1;
  for (size_t v = 0; v < g.size(); ++v) {
    if (!tuple.count(v)) {
      map[v] = c.addNode(g.latency[v], g.labels[v]);
      if (!g.ids.empty())
        c.ids.push_back(g.ids[v]);
      continue;
    }
    if (super < 0) {
      unsigned lat = 0;
      std::string label = "{";
      for (size_t m : tuple) {
        lat = std::max(lat, g.latency[m]);
        label += (label.size() > 1 ? "," : "") + g.labels[m];
      }
      super = static_cast<long>(c.addNode(lat, label + "}"));
      if (!g.ids.empty())
        c.ids.push_back(g.ids[v]);
    }
    map[v] = static_cast<size_t>(super);
  }
  for (const DdgEdge &e : g.edges) {
    bool internal = tuple.count(e.src) && tuple.count(e.dst);
    if (internal && e.distance == 0)
      continue;
    c.addEdge(map[e.src], map[e.dst], e.distance);
  }
  return c;
}

CycleReport packedMinII(const DepGraph &g, const std::set<size_t> &tuple) {
  CycleReport r;
  MinIIResult before = minII(g);
  MinIIResult after = minII(contract(g, tuple));
  r.minII = before.minII;
  r.criticalCycle = std::move(before.criticalCycle);
  r.packedMinII = after.minII;
  r.packedCriticalCycle = std::move(after.criticalCycle);
  r.introducedCritical = r.packedMinII > r.minII;
  return r;
}

std::set<size_t> nodesOf(const DepGraph &g, const std::vector<InstId> &ids) {
  std::set<size_t> out;
  for (InstId id : ids)
    if (auto it = std::find(g.ids.begin(), g.ids.end(), id); it != g.ids.end())
      out.insert(static_cast<size_t>(it - g.ids.begin()));
  return out;
}

} // namespace dspslp
