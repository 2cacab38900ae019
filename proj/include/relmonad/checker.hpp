#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relmonad/gen.hpp"
#include "relmonad/relmonad.hpp"

namespace relmonad {

/// Outcome of one law on one instance. Failures always carry a witness.
struct LawReport {
  std::string law;
  std::string instance;
  std::uint64_t seed = 0;
  Policy policy = Policy::kTranspose;
  bool pass = true;
  std::string witness;
  std::string note;  // coverage detail of a passing check
  double seconds = 0;
};

/// One row of the law table: the two composites being compared.
struct LawDoc {
  std::string id;
  LawGroup group;
  std::string lhs;
  std::string rhs;
};

const std::vector<LawDoc>& law_table();

/// Law ids of a group, in table order.
std::vector<std::string> laws_of(LawGroup group);

/// Runs every law of the instance's group. Throws BudgetExceeded when a
/// coend exceeds the budget; every other error becomes a failed report.
std::vector<LawReport> check_instance(const Instance& inst, Policy policy, Defect defect = Defect::kNone);

std::vector<LawReport> check_relpseudomonad(const Instance& inst, const PresheafMonad& t, Policy policy);
std::vector<LawReport> check_strong(const Instance& inst, const PresheafMonad& t, Policy policy);
std::vector<LawReport> check_multifunctor(const Instance& inst, const PresheafMonad& t, Policy policy);
std::vector<LawReport> check_pseudocommutativity(const Instance& inst, const PresheafMonad& t, Policy policy);
std::vector<LawReport> check_permutations(const Instance& inst, const PresheafMonad& t, Policy policy);
std::vector<LawReport> check_multicategorical(const Instance& inst, const PresheafMonad& t, Policy policy);
std::vector<LawReport> check_lax_idempotent(const Instance& inst, const PresheafMonad& t, Policy policy);
std::vector<LawReport> check_presheaf(const Instance& inst, const PresheafMonad& t, Policy policy);

struct SuiteConfig {
  GenConfig gen;
  int instances = 8;
  std::vector<LawGroup> laws = all_law_groups();
  Policy policy = Policy::kTranspose;
  Defect defect = Defect::kNone;
};

struct SuiteReport {
  std::vector<LawReport> reports;
  std::vector<Instance> failing;  // first failing instance of each group
  int failures() const;
  std::int64_t merges = 0;  // union-find merges performed during the run
};

/// Reports are ordered by law group, instance index, then law table order.
SuiteReport run_suite(const SuiteConfig& cfg);

/// `relmonad-report 1` header, a config line, then one tab-separated record
/// per report: law, instance, seed, policy, verdict, witness.
std::string format_machine(const SuiteConfig& cfg, const SuiteReport& report);
std::string format_text(const SuiteConfig& cfg, const SuiteReport& report);

}  // namespace relmonad
