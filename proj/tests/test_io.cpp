#include <gtest/gtest.h>

#include "support.hpp"

using namespace quotematch;

TEST(Csv, QuotedFieldsAndLineNumbers) {
  const auto t = io::parse_csv("a,b\n\"x,1\",\"say \"\"hi\"\"\"\n\nplain,\"multi\nline\"\n");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0].fields[0], "x,1");
  EXPECT_EQ(t.rows[0].fields[1], "say \"hi\"");
  EXPECT_EQ(t.rows[1].fields[1], "multi\nline");
  EXPECT_EQ(t.rows[1].line, 4u);
  EXPECT_EQ(t.column("b"), 1u);
  EXPECT_THROW(t.column("c"), ParseError);
}

TEST(Csv, FieldCountChecked) { EXPECT_THROW(io::parse_csv("a,b\n1,2,3\n"), ParseError); }

TEST(Csv, WriterRoundTrips) {
  const std::vector<std::string> fields = {"plain", "with,comma", "with \"quote\"", ""};
  const auto t = io::parse_csv("h1,h2,h3,h4\n" + io::csv_line(fields));
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0].fields, fields);
  EXPECT_EQ(io::fixed(0.5, 3), "0.500");
}

TEST(Lines, StripBomAndCarriageReturns) {
  EXPECT_EQ(io::split_lines("\xEF\xBB\xBF" "a\r\nb\n"), (std::vector<std::string>{"a", "b"}));
}

TEST(Files, MissingFileIsMissingInput) { EXPECT_THROW(io::read_file("/no/such/file"), MissingInput); }

TEST(Files, WriteCreatesDirectories) {
  qmtest::TempDir d("io");
  io::write_file(d / "x" / "y" / "z.txt", "hello");
  EXPECT_EQ(io::read_file(d / "x" / "y" / "z.txt"), "hello");
}

TEST(Utf8, DecodeEncodeRoundTrip) {
  const std::string s = "a\xD8\xA7\xE2\x82\xAC\xF0\x9F\x98\x80";  // a, alef, euro, emoji
  const auto cps = utf8::decode(s);
  EXPECT_EQ(cps, (std::vector<char32_t>{U'a', 0x0627, 0x20AC, 0x1F600}));
  EXPECT_EQ(utf8::encode(cps), s);
  EXPECT_EQ(utf8::length(s), 4u);
}

TEST(Utf8, InvalidBytesFlagged) {
  EXPECT_EQ(utf8::decode("\xFF"), (std::vector<char32_t>{utf8::kInvalid}));
  EXPECT_EQ(utf8::decode("\xC0\xAF"), (std::vector<char32_t>{utf8::kInvalid, utf8::kInvalid}));  // overlong
  EXPECT_EQ(utf8::decode("\xED\xA0\x80").front(), utf8::kInvalid);                               // surrogate
  EXPECT_EQ(utf8::decode("\xE2\x82").size(), 2u);                                                 // truncated
}

TEST(Hash, FnvReferenceValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(Rng, DeterministicAndBounded) {
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
  Rng r(9);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_LT(r.below(7), 7u);
    const auto x = r.between(-2, 2);
    EXPECT_GE(x, -2);
    EXPECT_LE(x, 2);
    const double u = r.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  std::vector<int> v = {1, 2, 3, 4, 5, 6};
  r.shuffle(v);
  std::sort(v.begin(), v.end());
  EXPECT_EQ(v, (std::vector<int>{1, 2, 3, 4, 5, 6}));
}

TEST(Errors, LineNumbersInMessages) {
  const ParseError e("bad", 7);
  EXPECT_EQ(e.line(), 7u);
  EXPECT_STREQ(e.what(), "bad (line 7)");
  EXPECT_STREQ(ParseError("bad").what(), "bad");
}
