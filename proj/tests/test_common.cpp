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

#include <cmath>
#include <limits>
#include <set>

#include "edysec/common.hpp"
#include "edysec/csv.hpp"
#include "test_util.hpp"

namespace edysec {
namespace {

TEST(Rng, SameSeedSameStream) {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.Next(), b.Next());
  Rng c(7), d(8);
  EXPECT_NE(c.Next(), d.Next());
}

TEST(Rng, UniformAndIndexStayInRange) {
  Rng rng(3);
  std::set<std::size_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const double u = rng.Uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    const std::size_t k = rng.Index(7);
    EXPECT_LT(k, 7u);
    seen.insert(k);
  }
  EXPECT_EQ(seen.size(), 7u);
  EXPECT_EQ(rng.Index(0), 0u);
  EXPECT_EQ(rng.Index(1), 0u);
}

TEST(Rng, NormalMoments) {
  Rng rng(11);
  const int n = 200000;
  double s = 0, ss = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.Normal();
    s += z;
    ss += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(ss / n, 1.0, 0.02);
}

TEST(Rng, ShuffleIsAPermutation) {
  Rng rng(5);
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  rng.Shuffle(v);
  std::set<int> s(v.begin(), v.end());
  EXPECT_EQ(s.size(), 50u);
  EXPECT_EQ(*s.begin(), 0);
  EXPECT_EQ(*s.rbegin(), 49);
}

TEST(DeriveSeed, StreamsAndIndicesDiffer) {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t stream = 0; stream < 10; ++stream) {
    for (std::uint64_t index = 0; index < 10; ++index) seeds.insert(DeriveSeed(42, stream, index));
  }
  EXPECT_EQ(seeds.size(), 100u);
  EXPECT_EQ(DeriveSeed(42, 3, 1), DeriveSeed(42, 3, 1));
}

TEST(Fnv1a64, ReferenceValues) {
  EXPECT_EQ(Fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(Fnv1a64("foobar"), 0x85944171f73967e8ULL);
  // Chaining equals hashing the concatenation.
  EXPECT_EQ(Fnv1a64("bar", Fnv1a64("foo")), Fnv1a64("foobar"));
}

TEST(Hex64, FixedWidthLowercase) {
  EXPECT_EQ(Hex64(0), "0000000000000000");
  EXPECT_EQ(Hex64(0xABCDEFULL), "0000000000abcdef");
}

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.0}) {
    EXPECT_EQ(std::stod(FormatDouble(v)), v);
  }
}

TEST(FormatFixed, RoundsTheExactBinaryValueAndDropsNegativeZero) {
  EXPECT_EQ(FormatFixed(0.985, 2), "0.98");  // binary value sits below .985
  EXPECT_EQ(FormatFixed(2.4276, 2), "2.43");
  EXPECT_EQ(FormatFixed(-0.0001, 2), "0.00");
  EXPECT_EQ(FormatFixed(-1.5, 1), "-1.5");
}

TEST(Error, CarriesCodeRowAndSubject) {
  const Error e(ErrorCode::kBadLabel, "row 5 label '2'", 5, "label");
  EXPECT_EQ(e.code(), ErrorCode::kBadLabel);
  EXPECT_EQ(e.row(), 5u);
  EXPECT_EQ(e.subject(), "label");
  EXPECT_EQ(std::string(e.what()).rfind("BadLabel: ", 0), 0u);
}

TEST(Require, ThrowsWithGivenCode) {
  EXPECT_NO_THROW(Require(true, "fine"));
  EXPECT_EDYSEC_ERROR(Require(false, "nope", ErrorCode::kBadK), ErrorCode::kBadK);
}

TEST(Matrix, RowViewsAliasStorage) {
  Matrix m(2, 3, 1.0);
  m.Row(1)[2] = 9.0;
  EXPECT_EQ(m(1, 2), 9.0);
  EXPECT_EQ(m.data.size(), 6u);
}

TEST(Csv, QuotesCrlfAndEmbeddedNewlines) {
  const auto rows = csv::Parse("a,b,c\r\n\"x,1\",\"say \"\"hi\"\"\",\"two\nlines\"\r\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (csv::Record{"a", "b", "c"}));
  EXPECT_EQ(rows[1], (csv::Record{"x,1", "say \"hi\"", "two\nlines"}));
}

TEST(Csv, AppendRecordRoundTrips) {
  const csv::Record rec = {"plain", "with,comma", "with \"quote\"", "", "line\nbreak"};
  std::string out;
  csv::AppendRecord(out, rec);
  const auto back = csv::Parse(out);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0], rec);
}

}  // namespace
}  // namespace edysec
