#include <doctest.h>

#include "relmonad/gen.hpp"

using namespace relmonad;

TEST_CASE("bounds (1,0) give the terminal category") {
  GenConfig cfg;
  cfg.max_objects = 1;
  cfg.max_edges = 0;
  Rng rng(7);
  auto c = gen_free_category(cfg, rng);
  CHECK(c->num_objects() == 1);
  CHECK(c->num_morphisms() == 1);
}

TEST_CASE("generated categories validate and are deterministic") {
  GenConfig cfg;
  cfg.max_objects = 4;
  cfg.max_edges = 6;
  for (std::uint64_t s = 0; s < 30; ++s) {
    Rng a(s), b(s);
    auto c = gen_category(cfg, a);
    CHECK(validate_category(*c).ok());
    CHECK(c->num_objects() <= 4);
    CHECK(*c == *gen_category(cfg, b));
  }
}

TEST_CASE("hand-written categories are lawful and not free") {
  for (const auto& c : {group_z2(), idempotent_monoid(), commuting_square()}) CHECK(validate_category(*c).ok());
  CHECK(group_z2()->hom(0, 0).size() == 2);
  CHECK(commuting_square()->hom(0, 3).size() == 1);
}

TEST_CASE("generated profunctors respect the value bound") {
  GenConfig cfg;
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    std::vector<CatPtr> slots = {gen_category(cfg, rng), gen_category(cfg, rng)};
    auto y = gen_category(cfg, rng);
    auto p = gen_profunctor(cfg, rng, slots, y);
    CHECK(validate_profunctor(*p).empty());
    for (const auto& v : p->values())
      for (int s : v->sizes()) CHECK(s <= cfg.max_values);
  }
}

TEST_CASE("value bound 0 gives the empty profunctor") {
  GenConfig cfg;
  cfg.max_values = 0;
  Rng rng(1);
  auto p = gen_profunctor(cfg, rng, {walking_arrow()}, walking_arrow());
  for (const auto& v : p->values()) CHECK(v->total_size() == 0);
}

TEST_CASE("all-terminal slots give a single presheaf") {
  GenConfig cfg;
  Rng rng(5);
  auto p = gen_profunctor(cfg, rng, {terminal_category(), terminal_category()}, walking_arrow());
  CHECK(p->values().size() == 1);
}

TEST_CASE("generated functors are functors") {
  GenConfig cfg;
  cfg.max_objects = 4;
  cfg.max_edges = 5;
  Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    auto a = gen_category(cfg, rng), b = gen_category(cfg, rng);
    CHECK(validate_functor(gen_functor(rng, a, b)).empty());
    CHECK(validate_multifunctor(*gen_multifunctor(rng, {a, b}, b)).empty());
  }
}

TEST_CASE("instances round-trip through text and are deterministic") {
  GenConfig cfg;
  for (LawGroup law : all_law_groups()) {
    auto inst = gen_instance(cfg, law, 3);
    auto text = format_instance(inst);
    CHECK(format_instance(gen_instance(cfg, law, 3)) == text);
    auto back = parse_instance(text);
    CHECK(format_instance(back) == text);
    CHECK(back.law == law);
  }
}

TEST_CASE("instance parsing rejects bad input") {
  auto text = format_instance(gen_instance(GenConfig{}, LawGroup::kRelPseudomonad, 0));
  CHECK_THROWS_AS(parse_instance(""), ParseError);
  CHECK_THROWS_AS(parse_instance("relmonad-instance 2\nlaw relpsm\nend-instance\n"), ParseError);
  CHECK_THROWS_AS(parse_instance(text.substr(0, text.size() / 2)), ParseError);
  CHECK_THROWS_AS(parse_instance("relmonad-instance 1\nlaw nosuch\nend-instance\n"), ParseError);
}

TEST_CASE("contravariance corruption is visible to the validator") {
  int corrupted = 0;
  for (int i = 0; i < 10; ++i) {
    auto inst = gen_instance(GenConfig{}, LawGroup::kPresheaf, i);
    if (!corrupt_contravariance(inst)) continue;
    ++corrupted;
    CHECK_FALSE(validate_profunctor(*inst.maps[0].table).empty());
  }
  CHECK(corrupted > 0);
}

TEST_CASE("configuration bounds are checked") {
  GenConfig cfg;
  cfg.max_objects = 0;
  CHECK_THROWS_AS(validate_config(cfg), Error);
  CHECK_THROWS_AS(parse_law_group("nosuch"), Error);
}
