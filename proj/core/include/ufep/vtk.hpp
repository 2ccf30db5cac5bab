#pragma once

#include "ufep/discretization.hpp"
#include "ufep/history_space.hpp"

#include <Eigen/Core>

#include <map>
#include <string>
#include <vector>

namespace ufep {

/// Optional fields for a snapshot. Null pointers are skipped.
struct VtkFields {
  const Eigen::VectorXd* displacement = nullptr;  ///< full DOF vector
  const HistoryField* history = nullptr;
  const std::vector<double>* eta = nullptr;       ///< per leaf
};

/// Unstructured grid (ASCII XML): interior cells as quads, cut cells as
/// their sub-triangles. Cell data: cell_class, aggregate_root, leaf, and
/// alpha / eta when given; point data: displacement when given.
void write_vtk(const std::string& path, const Discretization& disc, const VtkFields& fields = {});

struct VtuData {
  std::size_t points = 0;
  std::size_t cells = 0;
  std::vector<double> coordinates;
  std::map<std::string, std::vector<double>> point_data;
  std::map<std::string, std::vector<double>> cell_data;
};

/// Parse a file written by write_vtk.
VtuData read_vtu(const std::string& path);

}  // namespace ufep
