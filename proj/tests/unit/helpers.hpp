#pragma once

#include <cmath>
#include <random>

#include "qbrach/sun_algebra.hpp"

namespace qbtest {

using qbrach::HermitianOp;
using qbrach::Matrix;

inline double diff(const Matrix& a, const Matrix& b) { return qbrach::max_abs(a - b); }
inline double diff(const HermitianOp& a, const HermitianOp& b) { return diff(a.matrix(), b.matrix()); }

inline HermitianOp pauli(int k) { return qbrach::pauli_basis()[static_cast<std::size_t>(k)]; }
inline HermitianOp sx() { return pauli(0); }
inline HermitianOp sy() { return pauli(1); }
inline HermitianOp sz() { return pauli(2); }
inline HermitianOp lambda(int k) { return qbrach::gellmann_basis()[static_cast<std::size_t>(k - 1)]; }

inline const double kPi = std::acos(-1.0);

}  // namespace qbtest
