#include <doctest.h>

#include "oracle.hpp"
#include "relmonad/gen.hpp"
#include "relmonad/kan.hpp"
#include "relmonad/relmonad.hpp"

using namespace relmonad;

namespace {

struct Fixture {
  CatPtr a, b, y;
  ProfPtr table;
  MultiMap f;  // a, b -> Psh y
};

Fixture binary(std::uint64_t seed) {
  GenConfig cfg;
  Rng rng(seed);
  Fixture fx;
  fx.a = gen_category(cfg, rng);
  fx.b = gen_category(cfg, rng);
  fx.y = gen_category(cfg, rng);
  fx.table = gen_profunctor(cfg, rng, {fx.a, fx.b}, fx.y);
  fx.f = table_map(fx.table, "f");
  return fx;
}

/// Every morphism of `c` as a pair of composable factors g∘f.
template <typename Fn>
void each_composable(const FinCategory& c, Fn fn) {
  for (MorId f = 0; f < c.num_morphisms(); ++f)
    for (MorId g = 0; g < c.num_morphisms(); ++g)
      if (c.composable(g, f)) fn(g, f);
}

}  // namespace

TEST_CASE("table maps evaluate by lookup and are functorial") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto fx = binary(seed);
    for (const auto& args : object_tuples(fx.f->slots())) {
      int t = fx.table->tuples().encode(std::vector<int>{std::get<ObjId>(args[0]), std::get<ObjId>(args[1])});
      CHECK(*fx.f->evaluate(args) == *fx.table->value(t));
      for (int v = 0; v < 2; ++v) {
        auto x = std::get<ObjId>(args[v]);
        const auto& c = *fx.f->slots()[v].cat;
        CHECK(*fx.f->evaluate_mor(args, v, c.identity(x)) == *identity_morphism(fx.f->evaluate(args)));
        each_composable(c, [&](MorId g, MorId m) {
          if (c.src(m) != x) return;
          auto mid = args;
          mid[v] = c.tgt(m);
          auto lhs = fx.f->evaluate_mor(args, v, c.compose(g, m));
          auto rhs = compose(*fx.f->evaluate_mor(mid, v, g), *fx.f->evaluate_mor(args, v, m));
          CHECK(*lhs == *rhs);
        });
      }
    }
  }
}

TEST_CASE("composing with the identity map changes nothing") {
  auto fx = binary(3);
  auto ft = strengthen(fx.f, 0);
  auto same = compose_at(ft, 0, identity_map(fx.a));
  for (const auto& args : sample_args(ft->slots())) CHECK(*same->evaluate(args) == *ft->evaluate(args));
}

TEST_CASE("double splices associate") {
  auto fx = binary(5);
  GenConfig cfg;
  Rng rng(9);
  auto c = gen_category(cfg, rng), d = gen_category(cfg, rng);
  auto g = table_map(gen_profunctor(cfg, rng, {c}, fx.a), "g");
  auto h = table_map(gen_profunctor(cfg, rng, {d}, c), "h");
  auto ft = strengthen(fx.f, 0), gt = strengthen(g, 0);
  auto left = compose_at(compose_at(ft, 0, gt), 0, h);
  auto right = compose_at(ft, 0, compose_at(gt, 0, h));
  for (const auto& args : object_tuples(left->slots())) CHECK(*left->evaluate(args) == *right->evaluate(args));
}

TEST_CASE("plugging an object removes the slot") {
  auto fx = binary(2);
  auto plugged = plug_at(fx.f, 1, ObjId{0});
  CHECK(plugged->arity() == 1);
  for (ObjId x = 0; x < fx.a->num_objects(); ++x)
    CHECK(*plugged->evaluate({x}) == *fx.f->evaluate({x, ObjId{0}}));
}

TEST_CASE("type errors") {
  auto fx = binary(1);
  CHECK_THROWS_AS(fx.f->evaluate({ObjId{0}}), TypeMismatch);
  CHECK_THROWS_AS(fx.f->evaluate({representable(fx.a, 0), ObjId{0}}), TypeMismatch);
  CHECK_THROWS_AS(compose_at(fx.f, 0, identity_map(fx.a)), TypeMismatch);
  CHECK_THROWS_AS(compose_at(fx.f, 5, identity_map(fx.a)), TypeMismatch);
  CHECK_THROWS_AS(plug_at(fx.f, 0, representable(fx.a, 0)), TypeMismatch);
  CHECK_THROWS_AS(chain({}), TypeMismatch);
}

namespace {

/// P |-> P + P, with declared cocontinuity.
MultiMap doubling(const CatPtr& x, bool cocontinuous) {
  return custom_map({{SlotType::psh(x)}, x, "double",
                     [](const Args& a) {
                       auto p = std::get<PshPtr>(a[0]);
                       return coproduct(p, p);
                     },
                     [](const Args& a, int, const ArgMor&) {
                       auto p = std::get<PshPtr>(a[0]);
                       return identity_morphism(coproduct(p, p));
                     },
                     {cocontinuous}});
}

}  // namespace

TEST_CASE("identifying maps with different values throws CellMismatch") {
  auto x = walking_arrow();
  auto bad = canonical_iso(identity_map(x), doubling(x, true));
  CHECK_THROWS_AS(bad->at({representable(x, 1)}), CellMismatch);
  auto ok = canonical_iso(strengthen(unit_map(x), 0), identity_map(x));
  CHECK(cell_bijective(ok, Policy::kSample).equal);
}

TEST_CASE("cell equality under both policies") {
  auto x = walking_arrow();
  auto theta = theta_cell(x);
  CHECK(two_cell_equal(theta, theta, Policy::kTranspose).equal);
  CHECK(two_cell_equal(theta, theta, Policy::kSample).equal);

  auto fx = binary(4);
  auto eta = unit_cell(fx.f, 0);
  auto broken = corrupt_cell(eta);
  bool differs = false;
  for (const auto& args : object_tuples(fx.f->slots()))
    if (!(*eta->at(args) == *broken->at(args))) differs = true;
  REQUIRE(differs);
  auto v = two_cell_equal(eta, broken, Policy::kTranspose);
  CHECK_FALSE(v.equal);
  CHECK_FALSE(v.witness.empty());
}

TEST_CASE("transposed unit axiom holds exactly") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto fx = binary(seed);
    auto ft = strengthen(fx.f, 0);
    // (1_{f^t} ∘_0 y) · t̃_f = t̃_f
    auto eta = unit_cell(fx.f, 0);
    auto lhs = vcomp(whisker(identity_cell(ft), 0, unit_map(fx.a)), eta);
    CHECK(two_cell_equal(lhs, eta, Policy::kTranspose).equal);
    CHECK(two_cell_equal(transpose(untranspose(eta, ft, 0), 0), eta, Policy::kTranspose).equal);
  }
}

TEST_CASE("sample family") {
  auto w = walking_arrow();
  auto fam = sample_family(w);
  // y(a), y(b), y(a)+y(a), y(a)+y(b), y(b)+y(b), one quotient.
  CHECK(fam.size() == 6);
  for (const auto& p : fam) CHECK(validate_presheaf(*p).empty());
  CHECK(*fam[0] == *representable(w, 0));
  CHECK(*fam[3] == *coproduct(representable(w, 0), representable(w, 1)));
  CHECK(*fam.back() == *terminal_presheaf(w));
}

TEST_CASE("restriction to representables removes presheaf slots") {
  auto fx = binary(6);
  auto ft = strengthen(strengthen(fx.f, 1), 0);
  auto cell = restrict_to_representables(identity_cell(ft));
  for (const auto& s : cell->src()->slots()) CHECK(s.is_fin());
  auto opaque = identity_cell(doubling(fx.a, false));
  CHECK_THROWS_AS(restrict_to_representables(opaque), Error);
  CHECK_THROWS_AS(two_cell_equal(opaque, opaque, Policy::kTranspose), Error);
  CHECK(two_cell_equal(opaque, opaque, Policy::kSample).equal);
}

TEST_CASE("profunctor and functor text formats") {
  auto fx = binary(8);
  auto text = format_profunctor(*fx.table);
  auto back = parse_profunctor({fx.a, fx.b}, fx.y, text);
  CHECK(format_profunctor(*back) == text);
  CHECK(validate_profunctor(*back).empty());
  CHECK_THROWS_AS(parse_profunctor({fx.a, fx.b}, fx.y, "at (nosuch; a,a) = {x}\n"), ParseError);

  auto pair = pairing_multifunctor({fx.a, fx.b});
  auto ftext = format_multifunctor(*pair);
  auto fback = parse_multifunctor({fx.a, fx.b}, pair->codomain(), ftext);
  CHECK(fback->obj_map() == pair->obj_map());
  CHECK(fback->mor_map() == pair->mor_map());
  CHECK(validate_multifunctor(*fback).empty());
}

TEST_CASE("multifunctor composites") {
  auto fx = binary(7);
  auto pair = pairing_multifunctor({fx.a, fx.b});
  for (int i = 0; i < 2; ++i) {
    auto proj = projection_multifunctor({fx.a, fx.b}, i);
    CHECK(validate_multifunctor(*proj).empty());
    auto unit = compose_multifunctor(identity_multifunctor(proj->codomain()), 0, proj);
    CHECK(unit->obj_map() == proj->obj_map());
    CHECK(unit->mor_map() == proj->mor_map());
  }
  CHECK(validate_multifunctor(*pair).empty());
  CHECK_THROWS_AS(compose_multifunctor(pair, 0, identity_multifunctor(walking_arrow())), TypeMismatch);
  CHECK_THROWS_AS(compose_multifunctor(pair, 2, identity_multifunctor(fx.a)), TypeMismatch);
}
