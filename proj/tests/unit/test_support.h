// Copyright 2026 The Calum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Shared helpers: fixture paths, error matchers and hand-rolled generators.

#ifndef CALUM_TESTS_UNIT_TEST_SUPPORT_H_
#define CALUM_TESTS_UNIT_TEST_SUPPORT_H_

#include <gtest/gtest.h>

#include <functional>
#include <string>
#include <vector>

#include "calum/corpus.h"
#include "calum/error.h"
#include "generators.h"

namespace calum::testing {

inline std::string DataPath(const std::string& relative) {
  return std::string(CALUM_TEST_DATA_DIR) + "/" + relative;
}

inline const TaskRegistry& Registry() {
  static const TaskRegistry registry = TaskRegistry::Builtin();
  return registry;
}

inline const TaskSpec& Task(std::string_view id) {
  return Registry().Get(id);
}

// Code of the calum::Error thrown by fn, or a failure.
inline ::testing::AssertionResult ThrowsCode(const std::function<void()>& fn,
                                             ErrorCode want) {
  try {
    fn();
  } catch (const Error& e) {
    if (e.code() == want) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << "threw " << e.what();
  }
  return ::testing::AssertionFailure() << "did not throw";
}

}  // namespace calum::testing

#endif  // CALUM_TESTS_UNIT_TEST_SUPPORT_H_
