#pragma once

#include <vector>

#include "lpflow/confspace.hpp"
#include "lpflow/geometry.hpp"

namespace lpflow {

// Pairwise winding numbers of a closed configuration path, in turns.
// Antisymmetric by convention; the upper triangle is the data.
struct WindingMatrix {
  int n = 0;
  std::vector<double> raw;  // row-major n*n, raw[i*n+j] = w_ij

  double at(int i, int j) const { return raw[static_cast<std::size_t>(i) * n + j]; }
  long long rounded(int i, int j) const;
  double max_abs() const;
  double max_integrality_defect() const;  // max |w_ij - round(w_ij)| over i<j
  bool is_integral(double tol = 1e-3) const { return max_integrality_defect() <= tol; }

  static WindingMatrix zeros(int n);
};

// Word in the Artin generators sigma_i^{+-1}; letters are +-i, 1 <= i <= n-1.
struct BraidWord {
  int n_strands = 0;
  std::vector<int> letters;
};

struct CenterReducedBound {
  double value = 0.0;        // lower bound for L_h, in length units
  long long center_shift = 0;  // minimizing full-twist power c*
};

// Accumulated relative-vector angles of every pair. Requires a closed path
// (endpoints within 1e-6); on the torus the relative positions are lifted
// step by step, and a relative step at or beyond a quarter period raises
// LiftAmbiguous.
WindingMatrix winding_matrix(const Surface& s, const ConfigPath& path);

// Sweep-line extraction of the Artin word from x-coordinate transpositions
// (disc only). Sign convention: sigma_i is positive when the left strand
// passes in front (smaller y) at the crossing. Simultaneous or ambiguous
// events raise DegenerateCrossing.
BraidWord artin_word(const Surface& s, const ConfigPath& path);

// Iterated cancellation of adjacent inverse letters.
BraidWord free_reduce(const BraidWord& w);

// Permutation induced on strand positions (identity for closed config paths).
std::vector<int> induced_permutation(const BraidWord& w);

// Abelianization: each sigma_i^{+-1} contributes +-1/2 to the winding of the
// pair of strands it crosses. For pure (closed) words the totals are integers
// and match winding_matrix of the underlying path. initial_order[p] names the
// strand occupying position p at the start of the sweep (identity if empty).
WindingMatrix winding_from_word(const BraidWord& w,
                                const std::vector<int>& initial_order = {});

// x-sorted strand order of the path's first configuration, the labeling under
// which artin_word positions refer to configuration indices.
std::vector<int> initial_strand_order(const ConfigPath& path);

// Center-quotient lower bound on L_h from the winding matrix:
// disc:  2 pi min over integers c of max |w_ij + c| (the full twist shifts
//        every pairwise winding by one);
// torus: 2 pi max |w_ij| (the translational center acts trivially on relative
//        windings).
CenterReducedBound lh_lower(const WindingMatrix& w, SurfaceKind kind);

// Synthetic closed configuration path: the first point traverses gamma by
// arc length while the others stay put. Used to read off the braid class of
// a polyline directly.
ConfigPath polyline_loop_path(const Surface& s, const Polyline& gamma,
                              const std::vector<SurfacePoint>& stationary,
                              int samples = 4096);

}  // namespace lpflow
