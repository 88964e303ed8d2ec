#pragma once

#include <vector>

#include "wigner/types.hpp"

namespace wigner {

// Uniform periodic grid in x (right endpoint excluded) and a closed uniform
// grid in v (both endpoints included), plus the velocity-frequency grid used
// by the Fourier stage. Indices are 0-based throughout; index 0 in the
// frequency tables is the DC bin (unshifted DFT order).
struct PhaseSpaceGrid {
  Index nx = 0;
  Index nv = 0;
  double lx = 0.0;
  double lv = 0.0;
  double dx = 0.0;
  double dv = 0.0;
  VectorXd x;
  VectorXd v;
  // k_v per DFT bin, unshifted order (DC first, Nyquist at nv/2).
  VectorXd kv;

  Index nyquist_bin() const { return nv / 2; }
};

PhaseSpaceGrid build_grid(double lx, double lv, Index nx, Index nv);

// Zero-centered frequencies (pi/lv) * {-nv/2, ..., nv/2 - 1}.
VectorXd frequency_grid(Index nv, double lv);

// Permutation from zero-centered position to DFT bin: bin = centered_to_bin[c].
std::vector<Index> centered_to_bin(Index nv);
std::vector<Index> bin_to_centered(Index nv);

// Frequency of DFT bin b (unshifted order). The Nyquist bin carries -nv/2.
double bin_frequency(Index bin, Index nv, double lv);

// Conjugate-symmetric partner of DFT bin j, 0-based: (nv - j) mod nv.
inline Index opposite_index(Index j, Index nv) { return (nv - j) % nv; }

}  // namespace wigner
