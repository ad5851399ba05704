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

#ifndef DSPSLP_PASS_ADD_H_
#define DSPSLP_PASS_ADD_H_

#include "dspslp/dsp_model.h"
#include "dspslp/pass.h"

namespace dspslp {

struct AddPassConfig {
  dsp::SimdAddMode mode = dsp::SimdAddMode::Four12;
  /// Add or Sub; one kind per invocation.
  Opcode inst = Opcode::Add;
};

/// Packs four <=12-bit or two <=24-bit additions (or subtractions) into one
/// SIMD DSP call: `silvia.add4x12`, `silvia.sub4x12`, `silvia.add2x24`,
/// `silvia.sub2x24`. The call returns the 48-bit accumulator word; lane k
/// lives at bits [k*w, (k+1)*w).
class AddPass : public PackingPass {
public:
  explicit AddPass(AddPassConfig cfg) : cfg_(cfg) {}

  std::string name() const override;
  std::vector<Candidate> getCandidates(const Function &f) const override;
  bool canPack(const Function &f, const Tuple &t,
               const Candidate &c) const override;
  bool isTupleFull(const Tuple &t) const override;
  PackResult packTuple(Function &f, const Tuple &t,
                       size_t insertAt) const override;

  const AddPassConfig &config() const { return cfg_; }

private:
  AddPassConfig cfg_;
};

/// `silvia.<add|sub><lanes>x<width>`.
std::string simdAddCallee(dsp::SimdAddMode mode, bool subtract);

} // namespace dspslp

#endif // DSPSLP_PASS_ADD_H_
