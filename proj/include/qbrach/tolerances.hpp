#pragma once

namespace qbrach {

/// Numerical thresholds shared by all modules. Property tests and the CLI
/// override individual fields; everything else reads the defaults.
struct Tolerances {
  double hermitian = 1e-12;      // entrywise |A - A^dagger|
  double trace = 1e-12;          // |tr A| for su(N) representatives
  double unitary = 1e-10;        // max entry of U^dagger U - I, |det U - 1|
  double basis_gram = 1e-12;     // tr[tau_i tau_j] = 2 delta_ij
  double subspace_gram = 1e-10;  // orthonormality of user-supplied subspaces
  double membership = 1e-10;     // subspace membership (classification, brackets)
  double branch_cut = 1e-10;     // distance of an eigenvalue from -1 in log_op
  double singular = 1e-9;        // |inner(F, c_j)| below this is singular
  double conservation = 1e-8;    // drift of tr[HF] along a trajectory
  double semidefinite = 1e-9;    // eigenvalue threshold in the GLC sign test
  double symmetry = 1e-9;        // (anti)symmetry of Q^(m)
};

inline constexpr Tolerances kTolerances{};

}  // namespace qbrach
