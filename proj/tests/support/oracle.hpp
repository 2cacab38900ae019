#pragma once

#include <string>
#include <vector>

#include "relmonad/multimap.hpp"

/// Brute-force reference computations that share no code with the coend
/// and colimit machinery of the library.
namespace relmonad::oracle {

/// |hom(a, b)| by scanning the morphism list.
int hom_count(const FinCategory& c, ObjId a, ObjId b);

/// Partition of an explicitly listed element set.
struct Partition {
  std::vector<int> class_of;  // element -> class, classes numbered by least element
  int classes = 0;
};

/// Single coend at codomain object z for slot j of a map whose slot j is a
/// finite category: elements are (x, e, a) with e in P(x) and a in
/// f(args[j := x])(z), listed with x outermost, then e, then a.
struct FlatCoend {
  std::vector<std::vector<int>> elements;  // (x, e, a)
  Partition partition;
};
FlatCoend flat_coend(const MultiMap& f, int j, const Args& args, const PshPtr& p, ObjId z);

/// Double coend at z over two finite slots s < t of f, with presheaves P in
/// slot s and Q in slot t: elements (a, e, b, e', v) with v in f(a, b)(z).
struct FlatDoubleCoend {
  std::vector<std::vector<int>> elements;
  Partition partition;
  int class_of(const std::vector<int>& element) const;
};
FlatDoubleCoend flat_double_coend(const MultiMap& f, int s, int t, const Args& args, const PshPtr& p,
                                  const PshPtr& q, ObjId z);

/// The Fubini bijection f^{t_t t_s}(args) -> f^{t_s t_t}(args) at z, with
/// args holding P at s and Q at t: both sides are identified with classes of
/// the flat double coend through their canonical representatives. Throws
/// Error when either side fails to biject onto the flat classes.
std::vector<int> fubini_component(const MultiMap& f, int s, int t, const Args& args, ObjId z);

}  // namespace relmonad::oracle
