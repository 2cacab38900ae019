#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "oracle.hpp"
#include "relmonad/checker.hpp"

using namespace relmonad;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string first_failure(const SuiteReport& r) {
  for (const auto& rep : r.reports)
    if (!rep.pass) return rep.law + " on " + rep.instance + ": " + rep.witness;
  return "";
}

/// Every law of the groups passes on `instances` instances.
Outcome suite_passes(SuiteConfig cfg, std::vector<LawGroup> groups, int instances, double limit = 0) {
  cfg.laws = std::move(groups);
  cfg.instances = instances;
  auto start = Clock::now();
  auto r = run_suite(cfg);
  double secs = seconds_since(start);
  std::ostringstream os;
  os << r.reports.size() << " checks on " << instances << " instances, " << r.failures() << " failures, "
     << static_cast<int>(secs) << "s";
  if (r.failures() > 0) os << "; first: " << first_failure(r);
  bool in_time = limit <= 0 || secs <= limit;
  if (!in_time) os << "; over the " << limit << "s limit";
  return {r.failures() == 0 && !r.reports.empty() && in_time, os.str()};
}

GenConfig desk_scale() {
  GenConfig g;
  g.seed = 42;
  g.max_objects = 4;
  g.max_edges = 4;
  g.max_values = 3;
  return g;
}

Outcome fubini(const GenConfig& gen, int instances) {
  SuiteConfig cfg;
  cfg.gen = gen;
  auto base = suite_passes(cfg, {LawGroup::kPseudocommutativity}, instances);
  if (!base.pass) return base;
  PresheafMonad t;
  long tuples = 0;
  for (int i = 0; i < instances; ++i) {
    auto inst = gen_instance(gen, LawGroup::kPseudocommutativity, i);
    const auto f = inst.map("f").map;
    auto ps = sample_family(f->slots()[0].cat), qs = sample_family(f->slots()[1].cat);
    auto gamma = t.gamma(f, 0, 1);
    for (const auto& p : ps)
      for (const auto& q : qs) {
        Args args = {p, q};
        auto cell = gamma->at(args);
        for (ObjId z = 0; z < f->codomain()->num_objects(); ++z) {
          auto expected = oracle::fubini_component(f, 0, 1, args, z);
          if (cell->at(z) != expected)
            return {false, base.detail + "; γ differs from the Fubini bijection on " + inst.describe() +
                               " at object " + f->codomain()->object_name(z)};
        }
        ++tuples;
      }
  }
  return {true, base.detail + "; γ equals the Fubini bijection on " + std::to_string(tuples) + " sampled tuples"};
}

Outcome yoneda(const std::vector<std::pair<GenConfig, int>>& regimes) {
  std::set<std::string> seen;
  long pairs = 0;
  for (const auto& [gen, instances] : regimes)
    for (LawGroup law : all_law_groups())
      for (int i = 0; i < instances; ++i)
        for (const auto& c : gen_instance(gen, law, i).cats) {
          if (!seen.insert(format_category(*c)).second) continue;
          for (ObjId a = 0; a < c->num_objects(); ++a)
            for (ObjId b = 0; b < c->num_objects(); ++b) {
              auto nats = enumerate_nat_trans(representable(c, a), representable(c, b));
              int homs = oracle::hom_count(*c, a, b);
              std::set<std::string> keys;
              for (const auto& n : nats) keys.insert(n->key());
              bool bijection = static_cast<int>(nats.size()) == homs;
              for (MorId m : c->hom(a, b)) bijection = bijection && keys.count(yoneda_action(c, m)->key()) == 1;
              std::set<std::string> images;
              for (MorId m : c->hom(a, b)) images.insert(yoneda_action(c, m)->key());
              bijection = bijection && static_cast<int>(images.size()) == homs;
              if (!bijection)
                return {false, "category " + format_category(*c) + " objects " + c->object_name(a) + "," +
                                   c->object_name(b) + ": " + std::to_string(nats.size()) + " natural maps, " +
                                   std::to_string(homs) + " morphisms"};
              ++pairs;
            }
        }
  return {true, std::to_string(seen.size()) + " distinct categories, " + std::to_string(pairs) + " object pairs"};
}

Outcome mutations(const GenConfig& gen, int instances) {
  const std::vector<Defect> required = {Defect::kThetaCorrupt,     Defect::kMultCorrupt,
                                        Defect::kGammaIdentity,    Defect::kTOrderScrambled,
                                        Defect::kNaturalityBroken, Defect::kContravarianceBroken};
  std::ostringstream os;
  int caught = 0;
  bool required_caught = true;
  for (Defect d : all_defects()) {
    if (d == Defect::kNone) continue;
    std::string catcher;
    for (LawGroup law : all_law_groups()) {
      SuiteConfig cfg;
      cfg.gen = gen;
      cfg.laws = {law};
      cfg.instances = instances;
      cfg.defect = d;
      auto r = run_suite(cfg);
      for (const auto& rep : r.reports)
        if (!rep.pass && !rep.witness.empty()) {
          catcher = rep.law + " on " + rep.instance;
          break;
        }
      if (!catcher.empty()) break;
    }
    bool ok = !catcher.empty();
    caught += ok ? 1 : 0;
    if (!ok && std::find(required.begin(), required.end(), d) != required.end()) required_caught = false;
    os << (os.tellp() > 0 ? "; " : "") << to_string(d) << " -> " << (ok ? catcher : "not caught");
  }
  return {required_caught && caught >= 6, std::to_string(caught) + " injectors caught: " + os.str()};
}

std::string run_cli(const std::string& cli, const std::string& args, const std::string& out_path, int& status) {
  std::remove(out_path.c_str());
  std::string cmd = "\"" + cli + "\" " + args + " --out \"" + out_path + "\"";
  int raw = std::system(cmd.c_str());
  status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(out_path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism(const std::string& cli) {
  SuiteConfig defaults;
  auto merges = run_suite(defaults).merges;
  if (cli.empty()) return {false, "no CLI path given"};
  int s1 = -1, s2 = -1;
  const auto dir = std::filesystem::temp_directory_path();
  auto a = run_cli(cli, "verify --seed 42 --format machine", (dir / "relmonad_verify_1.txt").string(), s1);
  auto b = run_cli(cli, "verify --seed 42 --format machine", (dir / "relmonad_verify_2.txt").string(), s2);
  bool ok = s1 == 0 && s2 == 0 && !a.empty() && a == b && merges > 0;
  std::ostringstream os;
  os << "exit codes " << s1 << "," << s2 << ", " << a.size() << " bytes, "
     << (a == b ? "identical" : "different") << "; colimit merges on a default run " << merges;
  return {ok, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const GenConfig desk = desk_scale();
  GenConfig small = desk;
  small.max_objects = 3;
  SuiteConfig transpose;
  transpose.gen = desk;
  SuiteConfig small_cfg;
  small_cfg.gen = small;

  const std::vector<std::pair<int, std::pair<std::string, std::function<Outcome()>>>> criteria = {
      {1, {"relative pseudomonad axioms and extension laws, 100 instances, 5 minute limit",
           [&] { return suite_passes(transpose, {LawGroup::kRelPseudomonad}, 100, 300); }}},
      {2, {"strong relative pseudomonad on binary and ternary maps, 100 instances",
           [&] { return suite_passes(transpose, {LawGroup::kStrong}, 100); }}},
      {3, {"pseudo-multifunctor laws with invertible structure cells, 50 instances",
           [&] { return suite_passes(transpose, {LawGroup::kMultifunctor}, 50); }}},
      {4, {"pseudocommutativity diagrams and Fubini oracle, 50 instances", [&] { return fubini(desk, 50); }}},
      {5, {"two factorizations of every permutation of a ternary map agree, 50 instances",
           [&] { return suite_passes(transpose, {LawGroup::kPermutation}, 50); }}},
      {6, {"lax idempotency with enumerated cocones, at most 3 objects, 50 instances",
           [&] { return suite_passes(small_cfg, {LawGroup::kLaxIdempotent}, 50); }}},
      {7, {"multicategorical eta, mu and theta conditions on binary squares, 25 instances",
           [&] { return suite_passes(transpose, {LawGroup::kMulticategorical}, 25); }}},
      {8, {"Yoneda oracle on every generated category",
           [&] { return yoneda({{desk, 100}, {small, 50}}); }}},
      {9, {"every defect injector is caught with a witness", [&] { return mutations(small, 30); }}},
      {10, {"verify --seed 42 twice gives identical machine reports", [&] { return determinism(cli); }}},
  };

  int failed = 0;
  for (const auto& [n, c] : criteria) {
    Outcome o;
    try {
      o = c.second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << c.first << " (" << o.detail
              << ")" << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria fail") << std::endl;
  return failed == 0 ? 0 : 1;
}
