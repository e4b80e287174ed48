#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace stagger {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// One candidate configuration in the unit box [0,1]^d.
using Point = Eigen::VectorXd;

// Point sets are row-major: one point per row, d columns.
using PointSet = Eigen::MatrixXd;

struct GpError : std::runtime_error {
    explicit GpError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace stagger
