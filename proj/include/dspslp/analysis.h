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
// Use-def chains, ordering constraints and last-definition/first-use
// intervals. Everything here is a pure function of the IR.
//
//===----------------------------------------------------------------------===//

#ifndef DSPSLP_ANALYSIS_H_
#define DSPSLP_ANALYSIS_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "dspslp/ir.h"

namespace dspslp {

struct UseDef {
  /// Defining instruction index; -1 for function arguments.
  long def = -1;
  /// Sorted, deduplicated indices of instructions reading the value.
  std::vector<long> uses;
};

std::map<std::string, UseDef> useDefChains(const Function &f);

enum class OrderReason { DataDep, MemAlias, CallBarrier };

struct OrderConstraint {
  long before;
  long after;
  OrderReason reason;
  bool operator==(const OrderConstraint &) const = default;
};

/// Callees with the `silvia.` prefix are packed-arithmetic intrinsics: pure,
/// so they are neither memory operations nor barriers.
bool isPureCallee(std::string_view callee);

/// Reason why body[first] must stay ahead of body[second] (first < second),
/// if any. DataDep wins over memory reasons when several apply.
std::optional<OrderReason> mustPrecede(const Function &f, size_t first,
                                       size_t second);

/// All pairwise constraints, in (before, after) lexicographic order.
std::vector<OrderConstraint> orderConstraints(const Function &f);

/// Last-definition / first-use interval. `lastDef >= firstUse` means there
/// is no room to insert anything.
struct Interval {
  long lastDef = -1;
  long firstUse = 0;

  bool empty() const { return lastDef >= firstUse; }
  bool operator==(const Interval &) const = default;
};

/// Interval of the entity formed by the instructions `members`: operands
/// produced inside the entity and uses inside it are ignored. An entity
/// whose results are never used gets firstUse = body size.
Interval entityInterval(const Function &f, std::span<const InstId> members);

bool intervalsIntersect(const Interval &a, const Interval &b);

/// Narrowest payload carried by a value through ext chains. `source` names
/// an existing value holding exactly that payload with exactly `type`, or is
/// empty when the payload only exists as the low bits of the value itself.
struct EffectiveWidth {
  Type type;
  std::string source;
};

EffectiveWidth effectiveWidth(const Function &f, std::string_view value);

} // namespace dspslp

#endif // DSPSLP_ANALYSIS_H_
