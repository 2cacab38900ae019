#include <doctest.h>

#include "relmonad/gen.hpp"
#include "relmonad/relmonad.hpp"

using namespace relmonad;

namespace {

CatPtr arrow() { return walking_arrow(); }

FunctorPtr pairing2(const CatPtr& x) { return pairing_multifunctor({x, x}); }

}  // namespace

TEST_CASE("defect names round-trip") {
  for (Defect d : all_defects()) CHECK(parse_defect(to_string(d)) == d);
  CHECK(parse_defect("bogus") == std::nullopt);
}

TEST_CASE("bubble swaps reach the target order") {
  CHECK(bubble_swaps({0, 1, 2}, {2, 1, 0}) == std::vector<int>{0, 1, 0});
  CHECK(bubble_swaps({0, 1}, {0, 1}).empty());
  CHECK_THROWS_AS(bubble_swaps({0, 1}, {0, 2}), TypeMismatch);
}

TEST_CASE("unit square and structure cells are invertible") {
  PresheafMonad t;
  auto x = arrow();
  auto f = pairing2(x);
  CHECK(cell_bijective(t.unit_square(f), Policy::kTranspose).equal);
  CHECK(cell_bijective(t.apply_unit(x), Policy::kSample).equal);
  CHECK(cell_bijective(t.apply_mult(f, 1, identity_multifunctor(x)), Policy::kTranspose).equal);
}

TEST_CASE("gamma composed with its mirror is the identity") {
  PresheafMonad t;
  auto x = arrow();
  auto g = t.lift(pairing2(x));
  auto round = vcomp(t.gamma_inverse(g, 0, 1), t.gamma(g, 0, 1));
  CHECK(two_cell_equal(round, identity_cell(round->src()), Policy::kTranspose).equal);
  auto perm = t.gamma_perm(g, {0, 1}, {0, 1});
  CHECK(two_cell_equal(perm, identity_cell(strengthen_in_order(g, {0, 1})), Policy::kTranspose).equal);
}

TEST_CASE("gamma restricted along the unit is the strengthened unit") {
  PresheafMonad t;
  auto x = arrow();
  auto f = t.lift(pairing2(x));
  const int s = 0, u = 1;
  auto gs = whisker(t.gamma(f, s, u), s, unit_map(x));
  auto lhs = chain({t.eta(strengthen(f, u), s), canonical_iso(t.eta(strengthen(f, u), s)->dst(), gs->src()), gs});
  auto rhs = strengthen_cell(t.eta(f, s), u);
  auto lhs2 = chain({lhs, canonical_iso(lhs->dst(), rhs->dst())});
  CHECK(two_cell_equal(lhs2, rhs, Policy::kTranspose).equal);
}

TEST_CASE("gamma-identity defect is still invertible but not the real gamma") {
  auto x = arrow();
  PresheafMonad good, bad(Defect::kGammaIdentity);
  auto f = good.lift(pairing2(x));
  CHECK(cell_bijective(bad.gamma(f, 0, 1), Policy::kTranspose).equal);
  CHECK_THROWS_AS(bad.gamma(f, 1, 0), TypeMismatch);
}

TEST_CASE("corrupt cell permutes a component") {
  auto x = arrow();
  auto c = corrupt_cell(theta_cell(x));
  CHECK_FALSE(two_cell_equal(c, theta_cell(x), Policy::kSample).equal);
}

TEST_CASE("Tf at representables is the representable of the image") {
  GenConfig cfg;
  PresheafMonad t;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    auto a = gen_category(cfg, rng), b = gen_category(cfg, rng), y = gen_category(cfg, rng);
    auto f = gen_multifunctor(rng, {a, b}, y);
    auto tf = t.apply(f);
    for (ObjId p = 0; p < a->num_objects(); ++p)
      for (ObjId q = 0; q < b->num_objects(); ++q) {
        auto image = f->object(f->tuples().encode(std::vector<int>{p, q}));
        CHECK(tf->evaluate({representable(a, p), representable(b, q)})->sizes() == representable(y, image)->sizes());
      }
    CHECK(tf->evaluate({empty_presheaf(a), representable(b, 0)})->total_size() == 0);
  }
}

TEST_CASE("gamma_perm rejects orders that are not permutations of each other") {
  GenConfig cfg;
  Rng rng(4);
  auto a = gen_category(cfg, rng);
  auto f = table_map(gen_profunctor(cfg, rng, {a, a, a}, a), "f");
  PresheafMonad t;
  CHECK_THROWS_AS(t.gamma_perm(f, {0, 1, 2}, {0, 1, 1}), TypeMismatch);
  CHECK_THROWS_AS(t.gamma_perm(f, {0, 1, 2}, {1, 0, 2}, std::vector<int>{1}), TypeMismatch);
  CHECK_THROWS_AS(t.gamma(f, 1, 0), Error);
}
