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

//===----------------------------------------------------------------------===//
//
// Data-dependence graph of a loop body and its recurrence-constrained
// minimum initiation interval:
//
//   minII = max over elementary cycles C of ceil(sum lat(C) / sum dist(C))
//
// The latency of a cycle is the sum of the latencies of its nodes.
//
//===----------------------------------------------------------------------===//

#ifndef DSPSLP_DDG_H_
#define DSPSLP_DDG_H_

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dspslp/ir.h"

namespace dspslp {

class DdgError : public std::runtime_error {
public:
  enum class Kind { InvalidAnnotation, ZeroDistanceCycle };
  DdgError(Kind k, const std::string &msg) : std::runtime_error(msg), kind_(k) {}
  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

struct DdgEdge {
  size_t src = 0;
  size_t dst = 0;
  unsigned distance = 0;
};

struct DepGraph {
  std::vector<unsigned> latency;
  /// Display name of each node.
  std::vector<std::string> labels;
  /// Instruction id of each node; empty for hand-built graphs.
  std::vector<InstId> ids;
  std::vector<DdgEdge> edges;

  size_t addNode(unsigned lat, std::string label = {});
  void addEdge(size_t src, size_t dst, unsigned distance);
  size_t size() const { return latency.size(); }
};

using LatencyTable = std::map<Opcode, unsigned>;

/// One cycle per arithmetic op, load and call; zero for stores and for
/// casts and extracts, which are wiring.
LatencyTable defaultLatencies();

/// Nodes are the non-terminator instructions. Zero-distance edges come from
/// use-def chains and ordering constraints; carried edges from the
/// function's annotations, pointing from the producer to the consumer.
DepGraph buildDepGraph(const Function &f,
                       const LatencyTable &lat = defaultLatencies());

struct MinIIResult {
  unsigned minII = 1;
  /// Nodes of one maximizing cycle in traversal order; empty if acyclic.
  std::vector<size_t> criticalCycle;
};

/// Binary search on II with Bellman-Ford negative-cycle detection on the
/// weights II * dist - lat(src). Throws ZeroDistanceCycle.
MinIIResult minII(const DepGraph &g);

/// Same quantity by enumerating elementary cycles. Exponential; meant for
/// small graphs and as a cross-check.
MinIIResult minIIByEnumeration(const DepGraph &g);

/// Graph with the nodes in `tuple` merged into one node whose latency is
/// the largest member latency. Zero-distance edges between members
/// disappear; carried ones become self-loops.
DepGraph contract(const DepGraph &g, const std::set<size_t> &tuple);

struct CycleReport {
  unsigned minII = 1;
  std::vector<size_t> criticalCycle;
  unsigned packedMinII = 1;
  /// Critical cycle of the contracted graph, in its node numbering.
  std::vector<size_t> packedCriticalCycle;
  bool introducedCritical = false;
};

CycleReport packedMinII(const DepGraph &g, const std::set<size_t> &tuple);

/// Node indices of the instructions with the given ids.
std::set<size_t> nodesOf(const DepGraph &g, const std::vector<InstId> &ids);

} // namespace dspslp

#endif // DSPSLP_DDG_H_
