#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fellgpd/cocycle.hpp"
#include "fellgpd/fell_bundle.hpp"
#include "fellgpd/groupoid.hpp"
#include "fellgpd/morphism.hpp"

namespace fellgpd {

/// Action of H on a finite set X with anchor ρ: X → H⁰. h·x is defined
/// exactly when s(h) = ρ(x).
struct GroupoidAction {
  GroupoidPtr h;
  std::vector<std::string> points;
  std::vector<Arrow> anchor;
  /// act[idx(h) * |X| + x] = h·x, or npos when undefined.
  std::vector<std::size_t> act;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t size() const noexcept { return points.size(); }
  std::optional<std::size_t> apply(Arrow a, std::size_t x) const;
};

/// Builds an action from names. Throws Parse for unknown names.
GroupoidAction make_action(GroupoidPtr h, std::vector<std::string> points,
                           const std::map<std::string, std::string>& anchor,
                           const std::vector<std::array<std::string, 3>>& act);

/// Exhaustive check of definedness, ρ(h·x) = r(h), h₂·(h₁·x) = (h₂h₁)·x and
/// ρ(x)·x = x, plus surjectivity of ρ. Throws ActionAxiomViolation.
void check_action(const GroupoidAction& a);

struct ActionGroupoid {
  GroupoidPtr groupoid;  // H⋉X; units named by the points, arrows "(h,x)"
  GroupoidMorphism projection;  // (h, x) ↦ h
  /// (h, x) for every arrow of H⋉X.
  std::vector<std::pair<Arrow, std::size_t>> arrows;
  MorphismClassification classification;
};

/// H⋉X with (h₂, h₁·x)(h₁, x) = (h₂h₁, x) and (h, x)⁻¹ = (h⁻¹, h·x).
ActionGroupoid build_action_groupoid(const GroupoidAction& a);

struct CoveringAction {
  GroupoidAction action;  // X = G⁰, ρ = π on units
  ActionGroupoid rebuilt;  // H⋉X
  std::vector<Arrow> to_action;  // g ↦ (π(g), s(g))
  std::vector<Arrow> from_action;
};

/// h·x = r(g) for the unique lift g of h with s(g) = x. The map
/// g ↦ (π(g), s(g)) and its inverse are verified exactly; a failure there
/// throws NotACovering as well. Throws NotACovering if π is not a covering.
CoveringAction covering_to_action(const GroupoidMorphism& pi);

/// Random transitive-per-component action: H = Pair(m) × Γ with Γ one of
/// Z1, Z2, Z3, Z4, Z2², S3, and X = H⁰ × Y for a random Γ-set Y (a union of
/// coset spaces), points shuffled. |X| ≤ max_points, |H| ≤ max_arrows.
GroupoidAction random_action(std::mt19937_64& rng, std::size_t max_points = 8, std::size_t max_arrows = 24);

/// ω∘(π × π) on the composable pairs of the domain.
Cocycle pullback_cocycle(const Cocycle& omega, const GroupoidMorphism& pi);

/// ω((a,b),(a',b')) = ζ^{ab'} on Z_n², ζ = e^{2πi/n}.
Cocycle bicharacter_cocycle(const GroupoidPtr& zn2, std::size_t n);

/// Fell line bundle of (G, ω): E(id_G, ω).
FellBundle line_bundle(const Cocycle& omega);

struct AbelianExtraction {
  GroupoidAction action;  // H acting on the minimal projections of E⁰
  ActionGroupoid groupoid;
  Cocycle omega;
  /// p_x in coordinates of E_{ρ(x)}.
  std::vector<Vec> projections;
  /// Unit vector of L_{(h,x)} = q_{h·x} E_h p_x, per arrow of H⋉X.
  std::vector<Vec> line_vectors;
  IsoReport report;
};

/// Structure theorem for abelian saturated bundles. Throws NotAbelian,
/// NotSaturated, LineDimensionFailure, ActionAxiomViolation and
/// BundleNotVerified (missing unit representation).
///   - minimal projections of each E_u are the eigenvectors of left
///     multiplication by a random self-adjoint element, ordered by the
///     conjugate phases of their coordinates;
///   - units get L_{(u,x)} spanned by p_x itself; other lines use the first
///     nonzero q·b_i·p in fiber-basis order, normalized;
///   - ω is read off at the largest coordinate of the target line vector.
/// Checks: "cocycle_identity", "unit_modulus", "normalization",
/// "products_on_lines", "basis_map_star", "basis_map_bijective",
/// "basis_map_isometric", "wedderburn_equal".
AbelianExtraction abelian_extract(const FellBundle& e, std::mt19937_64& rng, std::size_t samples = 20,
                                  double tol = 1e-9);

/// A finite group with a distinguished subgroup A (the kernel).
struct GroupExtension {
  GroupoidPtr g;
  std::vector<Arrow> kernel;
};

/// Characters of a finite abelian group as integer exponents: χ(a) = ζ_m^{k(a)}
/// with m the exponent of the group.
struct CharacterTable {
  std::size_t exponent = 1;
  std::vector<std::vector<std::int64_t>> values;  // values[j][a]
};

struct ExtensionAnalysis {
  GroupoidPtr quotient;  // H = G/A, cosets named by their first element
  GroupoidMorphism projection;  // G → H
  std::vector<Arrow> section;  // c: H → G, first element of each coset
  std::vector<Arrow> kernel;  // A in G order
  CharacterTable characters;  // indexed by position in `kernel`
  /// f(h, h') = c(h)c(h')c(hh')⁻¹, as a position in `kernel`, per pair of H.
  std::vector<std::size_t> factor_set;
  GroupoidAction dual_action;  // (h·χ)(a) = χ(c(h)⁻¹ a c(h))
  ActionGroupoid groupoid;  // H⋉Â
  /// ω = ζ_m^{k}; k per pair of H⋉Â, ω((h, h'·χ), (h', χ)) = (hh'·χ)(f(h, h')).
  std::vector<std::int64_t> omega_exponent;
  Cocycle omega;
  /// The cocycle_check entries, then the Fourier map δ_{(h,χ)} ↦ δ_{c(h)} p_χ:
  /// "basis_map_multiplicative", "basis_map_star", "basis_map_bijective",
  /// "basis_map_isometric", "wedderburn_equal".
  IsoReport report;
};

/// Throws NotNormal (A not a normal subgroup) or NotAbelianKernel.
ExtensionAnalysis group_extension_bundle(const GroupExtension& ext, std::mt19937_64& rng, std::size_t samples = 20,
                                         double tol = 1e-9);

/// Characters of the group formed by `elements` inside g, by enumerating
/// homomorphisms into Z_m. Throws NotAbelianKernel if they do not commute.
CharacterTable character_table(const FiniteGroupoid& g, const std::vector<Arrow>& elements);

}  // namespace fellgpd
