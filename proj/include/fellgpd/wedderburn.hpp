#pragma once

#include <random>
#include <span>
#include <string>
#include <vector>

#include "fellgpd/linalg.hpp"
#include "fellgpd/star_algebra.hpp"

namespace fellgpd {

/// Block sizes of a finite-dimensional C*-algebra ≅ ⊕ M_{n_j}.
struct WedderburnInvariants {
  std::vector<std::size_t> blocks;  // sorted descending
  std::size_t dimension = 0;
  std::size_t center_dimension = 0;

  friend bool operator==(const WedderburnInvariants&, const WedderburnInvariants&) = default;
  std::string to_string() const;
};

struct WedderburnOptions {
  int max_retries = 5;
  /// Relative threshold for new directions when closing the span.
  double span_tol = 1e-8;
  /// Relative singular-value threshold for the center's null space.
  double center_tol = 1e-7;
  /// Relative gap separating eigenvalue clusters of the random central element.
  double cluster_tol = 1e-6;
};

/// Matrix route: closes span(generators) under products, solves for the center,
/// and splits a random Hermitian central element into minimal central
/// projections; each block size is recovered from the trace of left
/// multiplication by its projection (= n_j²). The generators must span a
/// *-closed set (e.g. images of a *-closed basis under a *-representation).
/// Throws NumericalDegeneracy if the split stays ambiguous after retries.
WedderburnInvariants wedderburn(std::span<const BlockMatrix> generators, std::mt19937_64& rng,
                                const WedderburnOptions& opts = {});

/// Groupoid route: C*_r(G, ω) ≅ ⊕_orbits M_{|O|} ⊗ C*(Γ_O, ω|Γ_O), with the
/// isotropy algebra decomposed by the matrix route.
WedderburnInvariants wedderburn(const ConvolutionAlgebra& a, std::mt19937_64& rng,
                                const WedderburnOptions& opts = {});

/// Matrix route applied directly to λ(δ_g), g ∈ G.
WedderburnInvariants wedderburn_regular(const ConvolutionAlgebra& a, std::mt19937_64& rng,
                                        const WedderburnOptions& opts = {});

}  // namespace fellgpd
