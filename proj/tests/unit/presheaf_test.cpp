#include <doctest.h>

#include <algorithm>

#include "oracle.hpp"
#include "relmonad/error.hpp"
#include "relmonad/gen.hpp"
#include "relmonad/presheaf.hpp"

using namespace relmonad;

namespace {

CatPtr seeded_category() {
  GenConfig cfg;
  cfg.max_objects = 4;
  cfg.max_edges = 5;
  Rng rng(42);
  return gen_free_category(cfg, rng);
}

}  // namespace

TEST_CASE("representables") {
  auto t = terminal_category();
  CHECK(representable(t, 0)->sizes() == std::vector<int>{1});

  auto w = walking_arrow();
  CHECK(representable(w, 1)->sizes() == std::vector<int>{1, 1});
  CHECK(representable(w, 0)->sizes() == std::vector<int>{1, 0});

  auto c = seeded_category();
  for (ObjId a = 0; a < c->num_objects(); ++a) {
    auto y = representable(c, a);
    CHECK(validate_presheaf(*y).empty());
    for (ObjId x = 0; x < c->num_objects(); ++x) CHECK(y->size(x) == oracle::hom_count(*c, x, a));
  }
}

TEST_CASE("yoneda action is functorial") {
  auto c = seeded_category();
  for (ObjId a = 0; a < c->num_objects(); ++a)
    CHECK(*yoneda_action(c, c->identity(a)) == *identity_morphism(representable(c, a)));
  for (MorId f = 0; f < c->num_morphisms(); ++f)
    for (MorId g = 0; g < c->num_morphisms(); ++g) {
      if (!c->composable(g, f)) continue;
      CHECK(*yoneda_action(c, c->compose(g, f)) == *compose(*yoneda_action(c, g), *yoneda_action(c, f)));
    }
  auto w = walking_arrow();
  auto only = enumerate_nat_trans(representable(w, 0), representable(w, 1));
  REQUIRE(only.size() == 1);
  CHECK(*only[0] == *yoneda_action(w, w->hom(0, 1)[0]));
}

TEST_CASE("colimits of finite sets") {
  SUBCASE("single node") {
    auto col = colimit_finset(SetDiagram{{3}, {}});
    CHECK(col.size == 3);
    CHECK(col.coprojection(0, 2) == 2);
  }
  SUBCASE("two elements mapped to one point") {
    auto col = colimit_finset(SetDiagram{{2, 1}, {{0, 1, {0, 0}}}});
    CHECK(col.size == 1);
    CHECK(col.representative[0] == std::pair<int, int>{0, 0});
  }
  SUBCASE("discrete diagram is a coproduct") {
    auto col = colimit_finset(SetDiagram{{2, 3}, {}});
    CHECK(col.size == 5);
  }
  SUBCASE("connected diagram of bijections has the fibre size") {
    auto col = colimit_finset(SetDiagram{{3, 3, 3}, {{0, 1, {2, 0, 1}}, {2, 1, {1, 2, 0}}}});
    CHECK(col.size == 3);
  }
  SUBCASE("representatives are the least pairs") {
    auto col = colimit_finset(SetDiagram{{1, 2}, {{1, 0, {0, 0}}}});
    CHECK(col.size == 1);
    CHECK(col.representative[0] == std::pair<int, int>{0, 0});
  }
  SUBCASE("non-functorial diagrams are rejected") {
    auto w = walking_arrow();
    std::vector<std::vector<int>> maps(w->num_morphisms());
    maps[w->identity(0)] = {1, 0};
    maps[w->identity(1)] = {0};
    maps[w->hom(0, 1)[0]] = {0, 0};
    CHECK_THROWS_AS(colimit_finset(*w, {2, 1}, maps), TypeMismatch);
  }
}

TEST_CASE("merge counter advances on merging colimits") {
  auto before = colimit_merge_count();
  colimit_finset(SetDiagram{{2, 1}, {{0, 1, {0, 0}}}});
  CHECK(colimit_merge_count() - before == 2);
}

TEST_CASE("category of elements") {
  auto t = terminal_category();
  auto el = category_of_elements(terminal_presheaf(t));
  CHECK(el.category->num_objects() == 1);
  CHECK(el.category->num_morphisms() == 1);

  auto c = seeded_category();
  for (ObjId a = 0; a < c->num_objects(); ++a) {
    auto y = representable(c, a);
    auto e = category_of_elements(y);
    CHECK(validate_category(*e.category).ok());
    CHECK(validate_functor(e.projection).empty());
    CHECK(e.category->num_objects() == y->total_size());
    // (a, id_a) is terminal: one arrow from every element.
    int top = -1;
    for (int n = 0; n < e.category->num_objects(); ++n)
      if (e.index.nodes[n].first == a && c->hom(a, a)[e.index.nodes[n].second] == c->identity(a)) top = n;
    REQUIRE(top >= 0);
    for (int n = 0; n < e.category->num_objects(); ++n) CHECK(e.category->hom(n, top).size() == 1);
  }
}

TEST_CASE("co-Yoneda: colimit of representables over elements recovers the presheaf") {
  auto c = seeded_category();
  auto p = coproduct(representable(c, 0), representable(c, c->num_objects() - 1));
  auto el = category_of_elements(p);
  for (ObjId z = 0; z < c->num_objects(); ++z) {
    SetDiagram d;
    for (const auto& [x, e] : el.index.nodes) d.sizes.push_back(oracle::hom_count(*c, z, x));
    for (const auto& arrow : el.index.arrows) {
      auto x = el.index.nodes[arrow.src].first;
      std::vector<int> map;
      for (MorId u : c->hom(z, x)) {
        auto image = c->compose(arrow.base, u);
        const auto& targets = c->hom(z, c->tgt(arrow.base));
        map.push_back(static_cast<int>(std::find(targets.begin(), targets.end(), image) - targets.begin()));
      }
      d.arrows.push_back({arrow.src, arrow.dst, map});
    }
    CHECK(colimit_finset(d).size == p->size(z));
  }
}

TEST_CASE("natural transformation enumeration") {
  auto t = terminal_category();
  CHECK(enumerate_nat_trans(terminal_presheaf(t), terminal_presheaf(t)).size() == 1);
  auto c = seeded_category();
  CHECK(enumerate_nat_trans(empty_presheaf(c), representable(c, 0)).size() == 1);
  for (ObjId a = 0; a < c->num_objects(); ++a)
    for (ObjId b = 0; b < c->num_objects(); ++b)
      CHECK(static_cast<int>(enumerate_nat_trans(representable(c, a), representable(c, b)).size()) ==
            oracle::hom_count(*c, a, b));
  auto big = coproduct(coproduct(terminal_presheaf(c), terminal_presheaf(c)), terminal_presheaf(c));
  CHECK_THROWS_AS(enumerate_nat_trans(big, big, 2), BudgetExceeded);
}

TEST_CASE("presheaf validation, quotients and morphism errors") {
  auto w = walking_arrow();
  MorId edge = w->hom(0, 1)[0];
  std::vector<std::vector<int>> act(w->num_morphisms());
  act[w->identity(0)] = {1, 0};
  act[w->identity(1)] = {0};
  act[edge] = {0};
  CHECK_FALSE(validate_presheaf(Presheaf(w, {2, 1}, act)).empty());

  auto p = coproduct(representable(w, 1), representable(w, 1));
  auto q = quotient_presheaf(p, {{1, 0, 1}});
  CHECK(q->sizes() == std::vector<int>{1, 1});
  CHECK(validate_presheaf(*q).empty());

  CHECK_THROWS_AS(compose(*identity_morphism(p), *identity_morphism(q)), TypeMismatch);
  auto collapse = PresheafMorphism(p, q, {{0, 0}, {0, 0}});
  CHECK(validate_presheaf_morphism(collapse).empty());
  CHECK_FALSE(is_bijective(collapse));
  CHECK_THROWS_AS(inverse(collapse), Error);
}

TEST_CASE("presheaf text format") {
  auto w = walking_arrow();
  auto p = coproduct(representable(w, 0), representable(w, 1));
  CHECK(*parse_presheaf(w, format_presheaf(*p)) == *p);
  CHECK_THROWS_AS(parse_presheaf(w, "at nosuch = {x}\n"), ParseError);
}
