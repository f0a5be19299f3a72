#include <gtest/gtest.h>

#include <limits>

#include "support/expect.hpp"
#include "vouch/amount.hpp"

using namespace vouch;

TEST(Amount, CoinsAndUnits) {
  EXPECT_EQ(Amount::coins(1).units(), 100'000'000u);
  EXPECT_EQ(parse_coins("0.1").units(), 10'000'000u);
  EXPECT_EQ(parse_coins("0.00000001").units(), 1u);
  EXPECT_EQ(parse_coins("50").units(), 5'000'000'000u);
  EXPECT_EQ(parse_coins(".5").units(), 50'000'000u);
}

TEST(Amount, ParseRejects) {
  EXPECT_ERRC(parse_coins(""), Errc::parse_error);
  EXPECT_ERRC(parse_coins("0.000000001"), Errc::parse_error);
  EXPECT_ERRC(parse_coins("-1"), Errc::parse_error);
  EXPECT_ERRC(parse_coins("1."), Errc::parse_error);
  EXPECT_ERRC(parse_coins("1e3"), Errc::parse_error);
  EXPECT_ERRC(parse_coins("999999999999"), Errc::parse_error);
}

TEST(Amount, Format) {
  EXPECT_EQ(format_coins(Amount(300'000)), "0.00300000");
  EXPECT_EQ(format_coins(Amount::coins(50)), "50.00000000");
  EXPECT_EQ(format_coins(Amount{}), "0.00000000");
}

TEST(Amount, CheckedArithmetic) {
  Amount a(5);
  EXPECT_ERRC(a -= Amount(6), Errc::value_overflow);
  Amount big(std::numeric_limits<std::uint64_t>::max());
  EXPECT_ERRC(big += Amount(1), Errc::value_overflow);
  EXPECT_EQ((Amount(7) - Amount(2)).units(), 5u);
}

TEST(Rate, ApplyFloors) {
  EXPECT_EQ(Rate::percent(3).apply(Amount(10'000'000)).units(), 300'000u);
  EXPECT_EQ(Rate::percent(3).apply(Amount(99)).units(), 2u);
  EXPECT_EQ(Rate::percent(3).apply(Amount(33)).units(), 0u);
  const Amount max(std::numeric_limits<std::uint64_t>::max());
  EXPECT_EQ(Rate::percent(100).apply(max), max);
}

TEST(Rate, Parse) {
  EXPECT_EQ(Rate::parse("0.03"), (Rate{3, 100}));
  EXPECT_EQ(Rate::parse("1"), (Rate{1, 1}));
  EXPECT_EQ(Rate::parse("0.125").apply(Amount(800)).units(), 100u);
  EXPECT_EQ(Rate::parse("3/100"), (Rate{3, 100}));
  EXPECT_EQ(Rate::parse(Rate{7, 9}.text()), (Rate{7, 9}));
  EXPECT_ERRC(Rate::parse("three"), Errc::parse_error);
  EXPECT_ERRC(Rate::parse("3/"), Errc::parse_error);
}

TEST(Rate, UnitInterval) {
  EXPECT_TRUE(Rate::percent(3).in_unit_interval());
  EXPECT_TRUE(Rate::percent(100).in_unit_interval());
  EXPECT_FALSE(Rate::percent(0).in_unit_interval());
  EXPECT_FALSE(Rate::percent(101).in_unit_interval());
  EXPECT_FALSE((Rate{1, 0}).in_unit_interval());
}
