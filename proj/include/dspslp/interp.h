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
// Reference interpreter. Arithmetic wraps at the result width; `silvia.*`
// calls run on the DSP emulator, so a packed function and its scalar
// original can be compared on concrete inputs.
//
//===----------------------------------------------------------------------===//

#ifndef DSPSLP_INTERP_H_
#define DSPSLP_INTERP_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dspslp/ir.h"

namespace dspslp {

class InterpError : public std::runtime_error {
public:
  enum class Kind {
    UnknownCallee,
    UninitializedRead,
    WidthViolation,
    SignatureMismatch
  };
  InterpError(Kind k, const std::string &msg)
      : std::runtime_error(msg), kind_(k) {}
  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

using ArrayImage = std::map<std::string, std::map<uint64_t, int64_t>>;

/// Inputs: argument values and initial array cells, as logical integers.
struct Env {
  std::map<std::string, int64_t> scalars;
  ArrayImage arrays;
  bool operator==(const Env &) const = default;
};

struct Observation {
  ArrayImage arrays;
  std::optional<int64_t> returnValue;
  bool operator==(const Observation &) const = default;
};

/// A function lowered to slot-indexed form, reusable across runs.
class Interpreter {
public:
  explicit Interpreter(const Function &f);
  ~Interpreter();
  Interpreter(Interpreter &&) noexcept;

  Observation run(const Env &env) const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Observation run(const Function &f, const Env &env);

/// Array cells a function reads, with the type it reads them as.
std::map<std::pair<std::string, uint64_t>, Type> loadedCells(const Function &f);

struct Equivalence {
  bool equal = true;
  /// Environments tried, corner cases included.
  unsigned trials = 0;
  std::optional<Env> counterexample;
  /// Observations (or error text) of both sides on the counterexample.
  std::string lhsReport, rhsReport;
};

/// Runs both functions on the corner environments (all zero, all max, all
/// min, alternating max/min) and then `trials` random ones drawn uniformly
/// over each declared type. Throws SignatureMismatch when the arguments or
/// the types of shared loaded cells differ.
Equivalence equivalent(const Function &f1, const Function &f2, unsigned trials,
                       uint64_t seed);

/// `name = v` and `array = [v, v, ...]` lines; `#` starts a comment.
Env parseEnv(std::string_view text);
std::string printEnv(const Env &env);
std::string printObservation(const Observation &obs);

} // namespace dspslp

#endif // DSPSLP_INTERP_H_
