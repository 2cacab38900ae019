#include <doctest.h>

#include <map>
#include <set>

#include "oracle.hpp"
#include "relmonad/gen.hpp"
#include "relmonad/relmonad.hpp"

using namespace relmonad;

namespace {

CatPtr chain3() { return free_category({"a", "b", "c"}, {{0, 1}, {1, 2}}, {"f", "g"}); }

}  // namespace

TEST_CASE("strengthened unit at a representable is that representable") {
  auto x = chain3();
  auto yt = strengthen(unit_map(x), 0);
  for (ObjId a = 0; a < x->num_objects(); ++a) CHECK(yt->evaluate({representable(x, a)})->sizes() == representable(x, a)->sizes());
  CHECK(yt->evaluate({empty_presheaf(x)})->sizes() == std::vector<int>{0, 0, 0});
}

TEST_CASE("unit, theta and counit cells are bijective") {
  auto x = chain3();
  auto y = unit_map(x);
  CHECK(cell_bijective(unit_cell(y, 0), Policy::kSample).equal);
  CHECK(cell_bijective(theta_cell(x), Policy::kSample).equal);
  CHECK(cell_bijective(counit_cell(identity_map(x), 0), Policy::kSample).equal);
  CHECK(cell_natural(theta_cell(x)).equal);
}

TEST_CASE("theta transposes to the identity") {
  auto x = chain3();
  auto y = unit_map(x);
  auto lhs = vcomp(whisker(theta_cell(x), 0, y), unit_cell(y, 0));
  auto rhs = canonical_iso(y, lhs->dst());
  CHECK(two_cell_equal(lhs, rhs, Policy::kTranspose).equal);
  CHECK(two_cell_equal(lhs, rhs, Policy::kSample).equal);
}

TEST_CASE("strengthening agrees with the flat coend oracle") {
  GenConfig cfg;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    Rng rng(seed);
    auto a = gen_category(cfg, rng), b = gen_category(cfg, rng), y = gen_category(cfg, rng);
    auto f = table_map(gen_profunctor(cfg, rng, {a, b}, y), "f");
    for (int j = 0; j < 2; ++j) {
      auto ft = strengthen(f, j);
      for (const auto& p : sample_family(f->slots()[j].cat))
        for (ObjId other = 0; other < f->slots()[1 - j].cat->num_objects(); ++other) {
          Args args(2);
          args[j] = p;
          args[1 - j] = other;
          auto value = ft->evaluate(args);
          for (ObjId z = 0; z < y->num_objects(); ++z) {
            auto flat = oracle::flat_coend(f, j, args, p, z);
            REQUIRE(flat.partition.classes == value->size(z));
            // Same partition: oracle classes and library classes correspond one to one.
            std::map<int, int> to_lib;
            for (size_t i = 0; i < flat.elements.size(); ++i) {
              const auto& el = flat.elements[i];
              int lib = coend_class(ft, args, z, {el[0], el[1], el[2]});
              auto it = to_lib.emplace(flat.partition.class_of[i], lib).first;
              CHECK(it->second == lib);
            }
            std::set<int> images;
            for (const auto& [k, v] : to_lib) images.insert(v);
            CHECK(images.size() == to_lib.size());
          }
        }
    }
  }
}

TEST_CASE("gamma is the Fubini bijection") {
  GenConfig cfg;
  PresheafMonad t;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    Rng rng(seed);
    auto a = gen_category(cfg, rng), b = gen_category(cfg, rng), y = gen_category(cfg, rng);
    auto f = table_map(gen_profunctor(cfg, rng, {a, b}, y), "f");
    auto gamma = t.gamma(f, 0, 1);
    for (const auto& p : sample_family(a))
      for (const auto& q : sample_family(b)) {
        Args args = {p, q};
        for (ObjId z = 0; z < y->num_objects(); ++z)
          CHECK(gamma->at(args)->at(z) == oracle::fubini_component(f, 0, 1, args, z));
      }
  }
}

TEST_CASE("identity-for-gamma disagrees with the Fubini bijection somewhere") {
  GenConfig cfg;
  PresheafMonad broken(Defect::kGammaIdentity);
  bool differs = false;
  for (std::uint64_t seed = 0; seed < 20 && !differs; ++seed) {
    Rng rng(seed);
    auto a = gen_category(cfg, rng), b = gen_category(cfg, rng), y = gen_category(cfg, rng);
    auto f = table_map(gen_profunctor(cfg, rng, {a, b}, y), "f");
    auto gamma = broken.gamma(f, 0, 1);
    for (const auto& p : sample_family(a))
      for (const auto& q : sample_family(b))
        for (ObjId z = 0; z < y->num_objects(); ++z)
          if (gamma->at({p, q})->at(z) != oracle::fubini_component(f, 0, 1, {p, q}, z)) differs = true;
  }
  CHECK(differs);
}

TEST_CASE("strengthening needs a finite slot") {
  auto x = chain3();
  CHECK_THROWS_AS(strengthen(identity_map(x), 0), TypeMismatch);
  CHECK_THROWS_AS(strengthened_base(unit_map(x), 0), Error);
  CHECK(is_strengthening(strengthen(unit_map(x), 0), 0));
}
