#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace smm {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

}  // namespace smm
