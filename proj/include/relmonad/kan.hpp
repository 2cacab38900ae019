#pragma once

#include "relmonad/multimap.hpp"

namespace relmonad {

/// f^{t_j}: slot j of f changes from Fin X to Psh X. The value at a presheaf
/// P is the coend of P(x) × f(…,x,…) over x, computed per codomain object as
/// a colimit over the elements of P. Repeated calls with the same f and j
/// return the same node while it is alive.
MultiMap strengthen(const MultiMap& f, int j);

/// The map f when `m` is f^{t_j}; throws Error otherwise.
MultiMap strengthened_base(const MultiMap& m, int j);
bool is_strengthening(const MultiMap& m, int j);

/// An element of a coend value: the element e of P(x) and a of f(…,x,…)(z).
struct CoendElement {
  ObjId x = 0;
  int e = 0;
  int a = 0;
};

/// Canonical (least) representative of class `cls` of m(args) at z, where m
/// is a strengthening.
CoendElement coend_representative(const MultiMap& m, const Args& args, ObjId z, int cls);
/// Class of (x, e, a) in m(args) at z.
int coend_class(const MultiMap& m, const Args& args, ObjId z, const CoendElement& el);

/// t̃_f : f => f^{t_j} ∘_j y, the coprojection at (x, id_x).
CellPtr unit_cell(const MultiMap& f, int j);

/// The 2-cell g^{t_j} => h determined by beta : g => h ∘_j y, where slot j of
/// h is Psh X. Its component sends [(x, e, a)] to h(ē)(beta(a)) for the
/// Yoneda map ē : y x -> P picking e.
CellPtr untranspose(const CellPtr& beta, const MultiMap& h, int j);

/// (alpha ∘_j y) · t̃_f for alpha out of f^{t_j}.
CellPtr transpose(const CellPtr& alpha, int j);

/// θ_X : y^t => 1.
CellPtr theta_cell(const CatPtr& x);

/// σ_g : (g ∘_j y)^{t_j} => g for slot j of g a presheaf slot.
CellPtr counit_cell(const MultiMap& g, int j);

/// t̂ : (f^{t_j} ∘_j g)^{t_{j+k}} => f^{t_j} ∘_j g^{t_k}, the untransposition
/// of f^{t_j} ∘_j t̃_g.
CellPtr mult_cell(const MultiMap& f, int j, const MultiMap& g, int k);

/// alpha^{t_j} : f^{t_j} => g^{t_j} acting on the second coend factor.
CellPtr strengthen_cell(const CellPtr& alpha, int j);

}  // namespace relmonad
