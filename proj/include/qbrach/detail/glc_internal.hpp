#pragma once

#include <vector>

#include "qbrach/detail/jet.hpp"
#include "qbrach/singular_glc.hpp"

namespace qbrach::detail {

struct ChartJets {
  MatrixJet hamiltonian;
  std::vector<MatrixJet> partials;  // one per free parameter
  std::vector<MatrixJet> generators;  // constant jets of all original generators
};

/// Throws missing_derivative when the chart moves without supplied
/// derivatives and `order` requires them.
ChartJets chart_jets(const ControlChart& chart, int order, int needs_derivative_from);

/// Copy of the chart with the free parameters set to u (eliminated
/// coordinate recomputed).
ControlChart chart_at(const ControlChart& chart, const Eigen::VectorXd& u);

Eigen::VectorXd free_values(const ControlChart& chart);

/// Op^(m)_ij = -i[R^(m-1)_i, h_j] so that Q^(m)_ij = tr[F Op^(m)_ij].
std::vector<std::vector<Eigen::MatrixXcd>> glc_operators(const ControlChart& chart, int m);

}  // namespace qbrach::detail
