#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relmonad/kan.hpp"

namespace relmonad {

/// Deliberate faults used to check that the law checker notices them.
enum class Defect {
  kNone,
  kThetaCorrupt,         // θ components permuted
  kMultCorrupt,          // t̂ components permuted
  kGammaIdentity,        // γ replaced by index identities
  kTOrderScrambled,      // Tf strengthens right to left
  kNaturalityBroken,     // t̃ permuted at a single argument
  kContravarianceBroken, // generated tables corrupted after validation
  kSigmaCorrupt,         // σ components permuted
  kUnitSquareDropped,    // ī replaced by a bare identification
};

const char* to_string(Defect d);
std::optional<Defect> parse_defect(std::string_view name);
const std::vector<Defect>& all_defects();

/// Swaps the images of elements 0 and 1 at the first codomain object where
/// they differ, at every argument accepted by `where`.
CellPtr corrupt_cell(const CellPtr& cell, std::function<bool(const Args&)> where = {});

/// f^{t_{o1} t_{o2} …}: strengthen the listed slots in order.
MultiMap strengthen_in_order(MultiMap f, const std::vector<int>& order);

/// Adjacent-swap positions that turn `from` into `to` (bubble sort).
std::vector<int> bubble_swaps(const std::vector<int>& from, const std::vector<int>& to);

/// The presheaf strong relative pseudomonad along the inclusion of finite
/// categories, with all structure cells built from kan.
class PresheafMonad {
 public:
  explicit PresheafMonad(Defect defect = Defect::kNone) : defect_(defect) {}
  Defect defect() const { return defect_; }

  MultiMap unit(const CatPtr& x) const { return unit_map(x); }
  CellPtr eta(const MultiMap& f, int j) const;                              // t̃
  CellPtr mu(const MultiMap& f, int j, const MultiMap& g, int k) const;     // t̂
  CellPtr theta(const CatPtr& x) const;                                     // θ
  CellPtr sigma(const MultiMap& g, int j) const;                            // σ

  /// y ∘ Jf.
  MultiMap lift(const FunctorPtr& f) const;
  /// Tf = (y ∘ Jf)^{t_0 … t_{n-1}}.
  MultiMap apply(const FunctorPtr& f) const;
  /// T̃_X : T(1_X) => 1.
  CellPtr apply_unit(const CatPtr& x) const;
  /// T̂_{f,g} : T(f ∘_i g) => Tf ∘_i Tg.
  CellPtr apply_mult(const FunctorPtr& f, int i, const FunctorPtr& g) const;

  /// ī_f : y ∘ Jf => Tf ∘ (y, …, y).
  CellPtr unit_square(const FunctorPtr& f) const;

  /// γ_g : g^{t_t t_s} => g^{t_s t_t} for Fin slots s < t.
  CellPtr gamma(const MultiMap& g, int s, int t) const;
  /// The mirrored composite g^{t_s t_t} => g^{t_t t_s}.
  CellPtr gamma_inverse(const MultiMap& g, int s, int t) const;
  /// f^{from} => f^{to} as the composite of γ / γ⁻¹ along the given adjacent
  /// swaps (bubble sort when empty).
  CellPtr gamma_perm(const MultiMap& f, const std::vector<int>& from, const std::vector<int>& to,
                     std::optional<std::vector<int>> swaps = std::nullopt) const;

  /// α* : h^t ∘ Tf => Tf' ∘ (g_1^t, …, g_n^t) for α : h ∘ Jf => Tf' ∘ (g_1, …, g_n).
  CellPtr extend_square(const CellPtr& alpha, const MultiMap& h, const FunctorPtr& f, const FunctorPtr& f_prime,
                        const std::vector<MultiMap>& gs) const;

  /// Tf' ∘ (g_1, …, g_n) with each g_i unary.
  MultiMap after(const MultiMap& outer, const std::vector<MultiMap>& gs) const;
  /// F ∘ (α_1, …, α_n) for unary cells α_i.
  CellPtr after(const MultiMap& outer, const std::vector<CellPtr>& cells) const;

 private:
  Defect defect_;
};

}  // namespace relmonad
