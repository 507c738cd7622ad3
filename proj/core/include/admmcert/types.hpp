#pragma once

#include <Eigen/Dense>

namespace admmcert {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

}  // namespace admmcert
