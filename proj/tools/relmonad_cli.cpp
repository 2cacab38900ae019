#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "relmonad/checker.hpp"

using namespace relmonad;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw Error("cannot write " + out_path);
  out << content;
}

Policy parse_policy(const std::string& s) {
  if (s == "transpose" || s == "TRANSPOSE") return Policy::kTranspose;
  if (s == "sample" || s == "SAMPLE") return Policy::kSample;
  throw Error("unknown policy '" + s + "' (transpose or sample)");
}

std::vector<LawGroup> parse_laws(const std::string& s) {
  if (s == "all") return all_law_groups();
  std::vector<LawGroup> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(parse_law_group(item));
  if (out.empty()) throw Error("--laws names no law group");
  return out;
}

/// `y(a)`, `y(a)+y(b)`, `empty` or `terminal`.
PshPtr parse_presheaf_arg(const CatPtr& c, const std::string& s) {
  if (s == "empty") return empty_presheaf(c);
  if (s == "terminal") return terminal_presheaf(c);
  PshPtr out;
  std::stringstream ss(s);
  for (std::string term; std::getline(ss, term, '+');) {
    if (term.size() < 4 || term.rfind("y(", 0) != 0 || term.back() != ')')
      throw ParseError("presheaf argument '" + s + "' is not y(<obj>), a sum of those, empty or terminal");
    auto name = term.substr(2, term.size() - 3);
    auto a = c->find_object(name);
    if (!a) throw ParseError("unknown object '" + name + "'");
    auto r = representable(c, *a);
    out = out ? coproduct(out, r) : r;
  }
  if (!out) throw ParseError("empty presheaf argument");
  return out;
}

Args parse_args(const std::vector<SlotType>& slots, const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  if (s.empty()) parts.clear();
  if (parts.size() != slots.size())
    throw ParseError("expected " + std::to_string(slots.size()) + " arguments, got " + std::to_string(parts.size()));
  Args out;
  for (size_t i = 0; i < parts.size(); ++i) {
    const auto& c = slots[i].cat;
    if (slots[i].is_psh()) {
      out.emplace_back(parse_presheaf_arg(c, parts[i]));
    } else {
      auto a = c->find_object(parts[i]);
      if (!a) throw ParseError("unknown object '" + parts[i] + "' in slot " + std::to_string(i));
      out.emplace_back(*a);
    }
  }
  return out;
}

std::string report(const SuiteConfig& cfg, const SuiteReport& r, const std::string& format) {
  return format == "machine" ? format_machine(cfg, r) : format_text(cfg, r);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Presheaf relative pseudomonad: constructions and law checker"};
  app.require_subcommand(1);

  SuiteConfig cfg;
  std::string laws = "all", policy = "transpose", inject = "none", format = "text", out_path, save_dir;

  auto* verify = app.add_subcommand("verify", "Generate instances and check every law group");
  verify->add_option("--seed", cfg.gen.seed, "Base seed")->capture_default_str();
  verify->add_option("--instances", cfg.instances, "Instances per law group")->capture_default_str()->check(CLI::NonNegativeNumber);
  verify->add_option("--max-objects", cfg.gen.max_objects, "Objects per category")->capture_default_str()->check(CLI::PositiveNumber);
  verify->add_option("--max-edges", cfg.gen.max_edges, "Generating edges per category")->capture_default_str()->check(CLI::NonNegativeNumber);
  verify->add_option("--max-values", cfg.gen.max_values, "Elements per profunctor value set")->capture_default_str()->check(CLI::NonNegativeNumber);
  verify->add_option("--laws", laws, "Comma-separated law groups, or all")->capture_default_str();
  verify->add_option("--policy", policy, "transpose or sample")->capture_default_str();
  verify->add_option("--inject", inject, "Defect to inject")->capture_default_str();
  verify->add_option("--format", format, "text or machine")->capture_default_str()->check(CLI::IsMember({"text", "machine"}));
  verify->add_option("--out", out_path, "Write the report to this file");
  verify->add_option("--save", save_dir, "Directory for the first failing instance of each group");

  std::string input, map_name, functor_name, at;
  int slot = -1;
  auto* compute = app.add_subcommand("compute", "Evaluate a strengthening or Tf from an instance file");
  compute->add_option("input", input, "Instance file")->required();
  compute->add_option("--map", map_name, "Map to strengthen");
  compute->add_option("--slot", slot, "Slot of --map to strengthen");
  compute->add_option("--functor", functor_name, "Functor f for Tf");
  compute->add_option("--at", at, "Comma-separated arguments: objects, y(a), y(a)+y(b), empty, terminal")->required();
  compute->add_option("--out", out_path, "Write the result to this file");

  auto* replay = app.add_subcommand("replay", "Re-run the law group of a saved instance");
  replay->add_option("input", input, "Instance file")->required();
  replay->add_option("--policy", policy, "transpose or sample")->capture_default_str();
  replay->add_option("--format", format, "text or machine")->capture_default_str()->check(CLI::IsMember({"text", "machine"}));
  replay->add_option("--out", out_path, "Write the report to this file");

  std::string law_id;
  auto* explain = app.add_subcommand("explain", "Print the composites compared by each law");
  explain->add_option("law", law_id, "Law id or group; all laws when omitted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitPass : kExitUsage;
  }

  try {
    coend_budget();  // rejects a malformed RELMONAD_BUDGET before any work
    if (*verify) {
      cfg.laws = parse_laws(laws);
      cfg.policy = parse_policy(policy);
      auto d = parse_defect(inject);
      if (!d) throw Error("unknown defect '" + inject + "'");
      cfg.defect = *d;
      auto r = run_suite(cfg);
      emit(out_path, report(cfg, r, format));
      if (!save_dir.empty()) {
        std::filesystem::create_directories(save_dir);
        for (const auto& inst : r.failing) {
          auto path = std::filesystem::path(save_dir) /
                      (std::string(to_string(inst.law)) + "-" + std::to_string(inst.index) + ".instance");
          std::ofstream(path) << format_instance(inst);
        }
      }
      return r.failures() == 0 ? kExitPass : kExitFail;
    }
    if (*compute) {
      auto inst = parse_instance(read_file(input));
      MultiMap m;
      if (!functor_name.empty()) {
        m = PresheafMonad().apply(inst.functor(functor_name).table);
      } else if (!map_name.empty()) {
        m = inst.map(map_name).map;
        if (slot >= 0) m = strengthen(m, slot);
      } else {
        throw Error("compute needs --map or --functor");
      }
      auto value = m->evaluate(parse_args(m->slots(), at));
      std::ostringstream os;
      os << "sizes";
      for (int s : value->sizes()) os << " " << s;
      os << "\n" << format_presheaf(*value);
      emit(out_path, os.str());
      return kExitPass;
    }
    if (*replay) {
      auto inst = parse_instance(read_file(input));
      auto d = parse_defect(inst.defect);
      if (!d) throw ParseError("unknown defect '" + inst.defect + "' in instance");
      SuiteConfig rc;
      rc.instances = 1;
      rc.laws = {inst.law};
      rc.policy = parse_policy(policy);
      rc.defect = *d;
      rc.gen.seed = inst.seed;
      SuiteReport r;
      r.reports = check_instance(inst, rc.policy, *d);
      emit(out_path, report(rc, r, format));
      return r.failures() == 0 ? kExitPass : kExitFail;
    }
    if (*explain) {
      std::ostringstream os;
      bool any = false;
      for (const auto& l : law_table()) {
        if (!law_id.empty() && law_id != l.id && law_id != to_string(l.group)) continue;
        any = true;
        os << l.id << "\n  lhs: " << l.lhs << "\n  rhs: " << l.rhs << "\n";
      }
      if (!any) throw Error("unknown law '" + law_id + "'");
      std::cout << os.str();
      return kExitPass;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
