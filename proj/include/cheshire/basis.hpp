#pragma once

// Elementary single-factor states and operators.
//
// Storage conventions:
//   path          {L, R}
//   orbital       {v_a, v_b}, the L_x-invariant plane of the l = 1 triplet
//   polarization  {+, -} with |+> = (|H> + i|V>)/sqrt2, |-> = (|H> - i|V>)/sqrt2
//   meter         q_k = k for k in {-N..N}, stored at offset N

#include <Eigen/Dense>

#include "cheshire/hilbert.hpp"

namespace cheshire::basis {

enum class Arm { left, right };

SpaceSignature path();
SpaceSignature orbital();
SpaceSignature polarization();
SpaceSignature meter(std::size_t half_width);

Ket arm(Arm a);
Ket horizontal();
Ket vertical();
Ket plus();
Ket minus();
/// cos(angle)|H> + sin(angle)|V>
Ket linear_polarization(double angle);
Ket v_a();
Ket v_b();

/// Columns are |H>, |V> written in the stored (+, -) basis.
Eigen::Matrix2cd hv_to_storage();
/// Converts a polarization matrix given in the {H, V} basis into the stored basis.
Operator polarization_from_hv(const Eigen::Matrix2cd &hv_matrix);
/// Polarization amplitudes re-expressed in the {H, V} basis.
Eigen::Vector2cd storage_to_hv(const Eigen::Vector2cd &storage);

Operator projector(Arm a);
Operator sigma_z();
Operator sigma_x();
Operator swap_hv();

/// L_x = -i(|v_a><v_b| - |v_b><v_a|).
Operator l_x();
/// L_z compressed onto span{v_a, v_b}; it vanishes there because L_z maps v_a
/// onto the excluded direction (1, 0, -1)/sqrt2 and annihilates v_b.
Operator l_z_restricted();

/// Three-dimensional forms in the L_z eigenbasis (m = +1, 0, -1), kept for
/// deriving the restricted operators.
Eigen::Vector3cd v_a_triplet();
Eigen::Vector3cd v_b_triplet();
Eigen::Matrix3cd l_x_triplet();
Eigen::Matrix3cd l_z_triplet();

/// Diagonal position operator q on the 2N+1 meter grid.
Operator position(std::size_t half_width);

}  // namespace cheshire::basis
