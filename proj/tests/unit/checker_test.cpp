#include <doctest.h>

#include <set>

#include "relmonad/checker.hpp"

using namespace relmonad;

namespace {

SuiteConfig small_suite() {
  SuiteConfig cfg;
  cfg.instances = 1;
  return cfg;
}

}  // namespace

TEST_CASE("law table lists every checked law once") {
  std::set<std::string> ids;
  for (const auto& l : law_table()) {
    CHECK(ids.insert(l.id).second);
    CHECK_FALSE(l.lhs.empty());
    CHECK_FALSE(l.rhs.empty());
    CHECK(l.id.rfind(std::string(to_string(l.group)) + ".", 0) == 0);
  }
  auto r = run_suite(small_suite());
  std::set<std::string> seen;
  for (const auto& rep : r.reports) seen.insert(rep.law);
  CHECK(seen == ids);
  for (LawGroup g : all_law_groups()) CHECK_FALSE(laws_of(g).empty());
}

TEST_CASE("a default-sized run passes and merges colimit classes") {
  auto r = run_suite(small_suite());
  CHECK(r.failures() == 0);
  CHECK(r.failing.empty());
  CHECK(r.merges > 0);
  for (const auto& rep : r.reports) CHECK(rep.witness.empty());
}

TEST_CASE("reports are ordered by group then instance") {
  SuiteConfig cfg;
  cfg.instances = 2;
  cfg.laws = {LawGroup::kPresheaf, LawGroup::kRelPseudomonad};
  auto r = run_suite(cfg);
  REQUIRE(r.reports.size() == 2 * (laws_of(LawGroup::kPresheaf).size() + laws_of(LawGroup::kRelPseudomonad).size()));
  CHECK(r.reports.front().law.rfind("presheaf.", 0) == 0);
  CHECK(r.reports.back().law.rfind("relpsm.", 0) == 0);
  CHECK(r.reports.front().instance.rfind("presheaf#0", 0) == 0);
}

TEST_CASE("machine format is deterministic and carries no timing") {
  auto cfg = small_suite();
  auto a = format_machine(cfg, run_suite(cfg));
  auto b = format_machine(cfg, run_suite(cfg));
  CHECK(a == b);
  CHECK(a.rfind("relmonad-report 1\nconfig\t", 0) == 0);
  CHECK(a.find("\nsummary\ttotal=") != std::string::npos);
  CHECK(a.find("merges") == std::string::npos);
  auto text = format_text(cfg, run_suite(cfg));
  CHECK(text.find("colimit merges") != std::string::npos);
}

TEST_CASE("an injected defect yields failures with witnesses") {
  auto cfg = small_suite();
  cfg.laws = {LawGroup::kRelPseudomonad};
  cfg.instances = 2;
  cfg.defect = Defect::kThetaCorrupt;
  auto r = run_suite(cfg);
  CHECK(r.failures() > 0);
  REQUIRE(r.failing.size() == 1);
  CHECK(r.failing[0].defect == "theta-corrupt");
  for (const auto& rep : r.reports) {
    if (rep.pass) continue;
    CHECK_FALSE(rep.witness.empty());
    CHECK(rep.witness.find('\t') == std::string::npos);
    CHECK(rep.witness.find('\n') == std::string::npos);
  }
  auto machine = format_machine(cfg, r);
  CHECK(machine.find("inject=theta-corrupt") != std::string::npos);
}

TEST_CASE("replaying a failing instance reproduces the failure") {
  SuiteConfig cfg;
  cfg.laws = {LawGroup::kRelPseudomonad};
  cfg.instances = 2;
  cfg.defect = Defect::kNaturalityBroken;
  auto r = run_suite(cfg);
  REQUIRE_FALSE(r.failing.empty());
  auto inst = parse_instance(format_instance(r.failing[0]));
  auto again = check_instance(inst, Policy::kTranspose, *parse_defect(inst.defect));
  bool failed = false;
  for (const auto& rep : again) failed = failed || !rep.pass;
  CHECK(failed);
  for (const auto& rep : check_instance(inst, Policy::kTranspose)) CHECK(rep.pass);
}

TEST_CASE("both policies pass on correct instances") {
  for (Policy p : {Policy::kTranspose, Policy::kSample}) {
    auto cfg = small_suite();
    cfg.policy = p;
    CHECK(run_suite(cfg).failures() == 0);
  }
}

TEST_CASE("suite configuration errors") {
  auto cfg = small_suite();
  cfg.instances = -1;
  CHECK_THROWS_AS(run_suite(cfg), Error);
  cfg.instances = 0;
  CHECK(run_suite(cfg).reports.empty());
  cfg.gen.max_objects = 0;
  CHECK_THROWS_AS(run_suite(cfg), Error);
  CHECK_FALSE(parse_defect("nosuch").has_value());
}
