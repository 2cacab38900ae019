#include <doctest.h>

#include "relmonad/fincat.hpp"
#include "relmonad/error.hpp"
#include "relmonad/gen.hpp"

using namespace relmonad;

namespace {

CatPtr chain3() { return free_category({"a", "b", "c"}, {{0, 1}, {1, 2}}, {"ab", "bc"}); }

/// Rebuilds `c` with one composite entry removed.
FinCategory without_composite(const FinCategory& c, MorId g, MorId f) {
  auto comp = c.comp_table();
  comp[g * c.num_morphisms() + f] = -1;
  return FinCategory(c.objects(), c.morphisms(), c.identities(), comp);
}

}  // namespace

TEST_CASE("terminal category validates") {
  auto t = terminal_category();
  CHECK(t->num_objects() == 1);
  CHECK(t->num_morphisms() == 1);
  CHECK(validate_category(*t).ok());
}

TEST_CASE("free category on a chain has the composite path") {
  auto c = chain3();
  CHECK(validate_category(*c).ok());
  CHECK(c->num_morphisms() == 6);
  auto ab = *c->find_morphism("ab"), bc = *c->find_morphism("bc");
  auto ac = c->compose(bc, ab);
  CHECK(c->morphism_name(ac) == "bc.ab");
  CHECK(c->src(ac) == 0);
  CHECK(c->tgt(ac) == 2);
  CHECK(c->hom(0, 2).size() == 1);
  CHECK(c->hom(2, 0).empty());
}

TEST_CASE("a deleted composite is reported with its factors") {
  auto c = chain3();
  auto ab = *c->find_morphism("ab"), bc = *c->find_morphism("bc");
  auto r = validate_category(without_composite(*c, bc, ab));
  CHECK(r.defect == CategoryDefect::kMissingComposite);
  CHECK(r.witnesses == std::vector<MorId>{bc, ab});
}

TEST_CASE("broken identity and associativity are detected") {
  auto m = idempotent_monoid();
  auto comp = m->comp_table();
  comp[m->identity(0) * m->num_morphisms() + 1] = m->identity(0);
  auto r = validate_category(FinCategory(m->objects(), m->morphisms(), m->identities(), comp));
  CHECK(r.defect == CategoryDefect::kBrokenIdentity);

  // {1, a, b} with a∘a = b, a∘b = a, b∘x = b: a∘(b∘a) = a but (a∘b)∘a = b.
  std::vector<FinCategory::Morphism> mors = {{"1", 0, 0}, {"a", 0, 0}, {"b", 0, 0}};
  std::vector<MorId> table = {0, 1, 2, 1, 2, 1, 2, 2, 2};
  auto bad = validate_category(FinCategory({"*"}, mors, {0}, table));
  CHECK(bad.defect == CategoryDefect::kBrokenAssociativity);
  CHECK(bad.witnesses.size() == 3);
}

TEST_CASE("ill-typed composites are detected") {
  auto c = chain3();
  auto ab = *c->find_morphism("ab"), bc = *c->find_morphism("bc");
  auto comp = c->comp_table();
  comp[bc * c->num_morphisms() + ab] = ab;
  auto r = validate_category(FinCategory(c->objects(), c->morphisms(), c->identities(), comp));
  CHECK(r.defect == CategoryDefect::kIllTypedComposite);
}

TEST_CASE("free category rejects cycles") {
  CHECK_THROWS_AS(free_category({"a", "b"}, {{0, 1}, {1, 0}}), ParseError);
}

TEST_CASE("products") {
  SUBCASE("empty product is terminal") {
    auto p = product_category({});
    CHECK(p->num_objects() == 1);
    CHECK(p->num_morphisms() == 1);
  }
  SUBCASE("terminal is a unit") {
    auto c = chain3();
    auto p = product_category({terminal_category(), c});
    CHECK(p->num_objects() == c->num_objects());
    CHECK(p->num_morphisms() == c->num_morphisms());
    CHECK(validate_category(*p).ok());
  }
  SUBCASE("walking arrow squared has 4 objects and 9 morphisms") {
    auto w = walking_arrow();
    auto p = product_category({w, w});
    CHECK(p->num_objects() == 4);
    CHECK(p->num_morphisms() == 9);
    CHECK(validate_category(*p).ok());
  }
  SUBCASE("nested products flatten to the same table") {
    auto a = walking_arrow(), b = chain3(), c = group_z2();
    auto flat = product_category({a, b, c});
    auto left = product_category({product_category({a, b}), c});
    auto right = product_category({a, product_category({b, c})});
    CHECK(left->comp_table() == flat->comp_table());
    CHECK(right->comp_table() == flat->comp_table());
    CHECK(left->identities() == flat->identities());
  }
}

TEST_CASE("opposite") {
  auto w = walking_arrow();
  auto op = opposite_category(*w);
  CHECK(validate_category(*op).ok());
  MorId edge = w->hom(0, 1).front();
  CHECK(op->src(edge) == 1);
  CHECK(op->tgt(edge) == 0);
  CHECK(*opposite_category(*terminal_category()) == *terminal_category());

  GenConfig cfg;
  cfg.max_objects = 4;
  cfg.max_edges = 5;
  Rng rng(42);
  for (int i = 0; i < 10; ++i) {
    auto c = gen_category(cfg, rng);
    CHECK(*opposite_category(*opposite_category(*c)) == *c);
  }
}

TEST_CASE("functors and natural transformations") {
  auto c = chain3();
  auto id = identity_functor(c);
  CHECK(validate_functor(id).empty());
  NatTransTable t{id, id, c->identities()};
  CHECK(validate_nat_trans(t).empty());

  auto bad = id;
  bad.mor_map[*c->find_morphism("ab")] = c->identity(0);
  CHECK_FALSE(validate_functor(bad).empty());

  // Constant functor at c, with the component at a being the only arrow a -> c.
  FunctorTable konst{c, c, {2, 2, 2}, std::vector<MorId>(c->num_morphisms(), c->identity(2))};
  CHECK(validate_functor(konst).empty());
  NatTransTable to_const{id, konst, {c->hom(0, 2)[0], c->hom(1, 2)[0], c->identity(2)}};
  CHECK(validate_nat_trans(to_const).empty());
  to_const.components[2] = c->identity(0);
  CHECK_FALSE(validate_nat_trans(to_const).empty());
}

TEST_CASE("category text format round-trips and rejects bad input") {
  auto c = chain3();
  auto text = format_category(*c);
  CHECK(*parse_category(text) == *c);
  CHECK_THROWS_AS(parse_category("obj a\nobj a\n"), ParseError);
  CHECK_THROWS_AS(parse_category("obj a\nmor f : a -> b\n"), ParseError);
  CHECK_THROWS_AS(parse_category("obj a\nmor 1 : a -> a\nid a = g\n"), ParseError);
  CHECK_THROWS_AS(parse_category("obj a\nbogus line\n"), ParseError);
}
