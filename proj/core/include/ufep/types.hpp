#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace ufep {

using Vec2 = Eigen::Vector2d;

/// Symmetric tensor in Voigt layout (xx, yy, zz, xy). Strains carry the
/// engineering shear in the last slot; stresses and plastic strains carry
/// the tensor component.
using Voigt4 = Eigen::Matrix<double, 4, 1>;
using Tangent4 = Eigen::Matrix<double, 4, 4>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MeshError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class SpaceError : public Error {
 public:
  using Error::Error;
};

class MaterialError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ufep
