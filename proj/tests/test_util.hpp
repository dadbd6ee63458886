/*
 * Copyright 2026 The edysec Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Shared fixtures for the unit suites.

#ifndef EDYSEC_TESTS_TEST_UTIL_HPP_
#define EDYSEC_TESTS_TEST_UTIL_HPP_

#include <filesystem>
#include <string>

#include "edysec/common.hpp"
#include "gtest/gtest.h"

#define EXPECT_EDYSEC_ERROR(stmt, expected_code)                      \
  do {                                                                \
    try {                                                             \
      stmt;                                                           \
      ADD_FAILURE() << "no edysec::Error from " #stmt;                \
    } catch (const ::edysec::Error& e) {                              \
      EXPECT_EQ(e.code(), expected_code) << e.what();                 \
    }                                                                 \
  } while (0)

namespace edysec::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    std::string name = "edysec-" + tag;
    if (info) name += std::string("-") + info->test_suite_name() + "-" + info->name();
    path_ = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string File(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace edysec::testing

#endif  // EDYSEC_TESTS_TEST_UTIL_HPP_
