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

#ifndef DSPSLP_TESTS_TEST_UTIL_H_
#define DSPSLP_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace testutil {

inline std::string readText(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::filesystem::path corpus(const std::string &rel) {
  return std::filesystem::path(CORPUS_DIR) / rel;
}

/// Every `.sir` under corpus/kernels and corpus/edge, sorted.
inline std::vector<std::filesystem::path> corpusFiles() {
  std::vector<std::filesystem::path> out;
  for (const char *dir : {"kernels", "edge"})
    for (const auto &e : std::filesystem::directory_iterator(corpus(dir)))
      if (e.path().extension() == ".sir")
        out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace testutil

#endif // DSPSLP_TESTS_TEST_UTIL_H_
