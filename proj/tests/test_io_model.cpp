#include <doctest.h>

#include <random>

#include "mema/error.hpp"
#include "mema/io_model.hpp"

using namespace mema;

namespace {
const TileShape kTile5{5, 5, 5};
}

TEST_CASE("loop order metadata") {
  CHECK(inner_class(LoopOrder::MNK) == InnerClass::KFirst);
  CHECK(inner_class(LoopOrder::NMK) == InnerClass::KFirst);
  CHECK(inner_class(LoopOrder::MKN) == InnerClass::NFirst);
  CHECK(inner_class(LoopOrder::KMN) == InnerClass::NFirst);
  CHECK(inner_class(LoopOrder::NKM) == InnerClass::MFirst);
  CHECK(inner_class(LoopOrder::KNM) == InnerClass::MFirst);
  CHECK(stationary_operand(InnerClass::NFirst) == Operand::A);
  CHECK(stationary_operand(InnerClass::MFirst) == Operand::B);
  CHECK(stationary_operand(InnerClass::KFirst) == Operand::C);
  CHECK(canonical_order(InnerClass::KFirst) == LoopOrder::MNK);
  CHECK(canonical_order(InnerClass::MFirst) == LoopOrder::NKM);
  CHECK(canonical_order(InnerClass::NFirst) == LoopOrder::MKN);
  for (LoopOrder o : kAllLoopOrders) CHECK(parse_loop_order(to_string(o)) == o);
  CHECK(parse_loop_order("kmn") == LoopOrder::KMN);
  CHECK_THROWS_AS(parse_loop_order("M->M->K"), Error);
  CHECK_THROWS_AS(parse_loop_order("MXK"), Error);
}

TEST_CASE("single block") {
  const MMProblem p{5, 5, 5};
  const IOReport n = io_n_first(p, kTile5);
  CHECK(n.streaming_elems == 2 * 25 + 25);
  CHECK(n.stationary_elems == 25);
  CHECK(io_m_first(p, kTile5).total_elems == 100);
  CHECK(io_k_first(p, kTile5).total_elems == 100);
  CHECK(n.total_elems == 100);
  CHECK(n.total_bytes == 400);
}

TEST_CASE("class totals on the reference problems") {
  const MMProblem flat{40, 5, 40};
  CHECK(io_n_first(flat, kTile5).total_elems == 5000);
  CHECK(io_m_first(flat, kTile5).total_elems == 5000);
  CHECK(io_k_first(flat, kTile5).total_elems == 6400);

  const MMProblem cube{40, 40, 40};
  CHECK(io_m_first(cube, kTile5).total_elems == 40000);
  CHECK(io_n_first(cube, kTile5).total_elems == 40000);
  CHECK(io_k_first(cube, kTile5).total_elems == 28800);
}

TEST_CASE("closed forms without divisibility") {
  const MMProblem skewed{64, 5, 32};
  CHECK_FALSE(divisible(skewed, kTile5));
  CHECK_THROWS_WITH_AS(io_n_first(skewed, kTile5), "requires divisible tiling", NonDivisibleError);
  CHECK_THROWS_AS(io_m_first(skewed, kTile5), NonDivisibleError);
  CHECK_THROWS_AS(select_schedule(skewed, kTile5), NonDivisibleError);
  CHECK(io_closed_form(skewed, kTile5, InnerClass::NFirst) == doctest::Approx(6464));
  CHECK(io_closed_form(skewed, kTile5, InnerClass::MFirst) == doctest::Approx(6304));
  CHECK(io_closed_form(skewed, kTile5, InnerClass::KFirst) == doctest::Approx(8192));

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::int64_t> mult(1, 9), tdim(1, 7);
  for (int trial = 0; trial < 200; ++trial) {
    const TileShape t{tdim(rng), tdim(rng), tdim(rng)};
    const MMProblem p{t.m * mult(rng), t.k * mult(rng), t.n * mult(rng)};
    for (InnerClass cls : kClassPriority)
      for (bool zero : {false, true})
        CHECK(io_closed_form(p, t, cls, {zero}) ==
              doctest::Approx(static_cast<double>(io_for_class(p, t, cls, {zero}).total_elems)));
  }
}

TEST_CASE("schedule selection") {
  CHECK(select_schedule({40, 40, 40}, kTile5).order == LoopOrder::MNK);
  // M-first and N-first tie at 5000; M-first wins the tie-break.
  const Schedule flat = select_schedule({40, 5, 40}, kTile5);
  CHECK(flat.inner() == InnerClass::MFirst);
  CHECK(flat.order == LoopOrder::NKM);
  CHECK(flat.stationary() == Operand::B);
  CHECK(select_schedule({5, 5, 5}, kTile5).inner() == InnerClass::KFirst);
  CHECK(select_schedule({65, 5, 35}, kTile5).inner() == InnerClass::MFirst);
  CHECK(select_schedule({35, 5, 65}, kTile5).inner() == InnerClass::NFirst);
}

TEST_CASE("c_zero drops the initial C reads") {
  const MMProblem p{40, 40, 40};
  CHECK(io_k_first(p, kTile5, {true}).stationary_elems == 1600);
  CHECK(io_k_first(p, kTile5, {true}).total_elems == 28800 - 1600);
  CHECK(io_m_first(p, kTile5, {true}).total_elems == 40000 - 1600);
  CHECK(io_n_first(p, kTile5, {true}).total_elems == 40000 - 1600);
}

TEST_CASE("M-first condition examples") {
  CHECK(m_first_condition({40, 5, 40}, kTile5));
  CHECK_FALSE(m_first_condition({40, 20, 40}, kTile5));
  CHECK_FALSE(m_first_condition({40, 5, 80}, kTile5));
  // K bound at M = 40 is 80/9: 8 passes, 9 fails.
  CHECK(m_first_condition({40, 8, 40}, {5, 1, 5}) == false);  // k = 1 changes the bound
  CHECK(m_first_condition({40, 8, 40}, kTile5));
  CHECK_FALSE(m_first_condition({40, 9, 40}, kTile5));
  // 2m - k strongly negative makes the first denominator non-positive.
  CHECK_THROWS_WITH_AS(m_first_condition({40, 40, 40}, {1, 5, 5}),
                       "condition degenerate; fall back to direct comparison",
                       DegenerateConditionError);
}

TEST_CASE("M-first condition matches direct comparison") {
  std::mt19937_64 rng(19);
  std::uniform_int_distribution<std::int64_t> mult(1, 30), tdim(1, 8);
  int checked = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const TileShape t{tdim(rng), tdim(rng), tdim(rng)};
    const MMProblem p{t.m * mult(rng), t.k * mult(rng), t.n * mult(rng)};
    const ClassTotals c = io_all_classes(p, t);
    const bool direct = c.m_first.total_elems <= c.k_first.total_elems &&
                        c.m_first.total_elems <= c.n_first.total_elems;
    bool cond = false;
    try {
      cond = m_first_condition(p, t);
    } catch (const DegenerateConditionError&) {
      continue;
    }
    CHECK(cond == direct);
    ++checked;
  }
  CHECK(checked > 1000);
}

TEST_CASE("M/N exchange symmetry") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<std::int64_t> mult(1, 12), tdim(1, 6);
  for (int trial = 0; trial < 300; ++trial) {
    const TileShape t{tdim(rng), tdim(rng), tdim(rng)};
    const MMProblem p{t.m * mult(rng), t.k * mult(rng), t.n * mult(rng)};
    const MMProblem q{p.N, p.K, p.M};
    const TileShape u{t.n, t.k, t.m};
    CHECK(io_m_first(p, t) == io_n_first(q, u));
    CHECK(io_n_first(p, t) == io_m_first(q, u));
    CHECK(io_k_first(p, t) == io_k_first(q, u));
  }
}

TEST_CASE("padding") {
  CHECK(pad_to_tile({64, 5, 32}, kTile5) == MMProblem{65, 5, 35});
  CHECK(pad_to_tile({40, 40, 40}, kTile5) == MMProblem{40, 40, 40});
  CHECK_THROWS_AS(validate(MMProblem{0, 1, 1}), Error);
}
