#include "ufep/vtk.hpp"

#include <array>
#include <fstream>
#include <regex>
#include <sstream>

namespace ufep {

namespace {

struct Piece {
  std::vector<Vec2> points;
  std::vector<std::size_t> leaf_of_point;
  std::vector<std::vector<std::size_t>> cells;
  std::vector<std::size_t> leaf_of_cell;
  std::vector<Vec2> centroid;
};

Piece build_piece(const Discretization& disc) {
  Piece p;
  const auto& mesh = disc.mesh();
  for (std::size_t leaf : disc.active_leaves()) {
    const Square sq = mesh.cell_square(mesh.leaves()[leaf]);
    if (disc.geometry().cell_class(leaf) == CellClass::interior) {
      std::vector<std::size_t> ids;
      for (unsigned k : {0U, 1U, 3U, 2U}) {
        ids.push_back(p.points.size());
        p.points.push_back(sq.corner(k));
        p.leaf_of_point.push_back(leaf);
      }
      p.cells.push_back(std::move(ids));
      p.leaf_of_cell.push_back(leaf);
      p.centroid.push_back(sq.center());
      continue;
    }
    for (const auto& t : disc.geometry().cut_cell(leaf).triangles) {
      std::vector<std::size_t> ids;
      for (const auto& v : t) {
        ids.push_back(p.points.size());
        p.points.push_back(v);
        p.leaf_of_point.push_back(leaf);
      }
      p.cells.push_back(std::move(ids));
      p.leaf_of_cell.push_back(leaf);
      p.centroid.push_back((t[0] + t[1] + t[2]) / 3.0);
    }
  }
  return p;
}

template <class T>
void data_array(std::ostream& os, const std::string& type, const std::string& name, int components,
                const std::vector<T>& values) {
  os << "        <DataArray type=\"" << type << "\"";
  if (!name.empty()) os << " Name=\"" << name << "\"";
  if (components > 1) os << " NumberOfComponents=\"" << components << "\"";
  os << " format=\"ascii\">\n         ";
  for (const auto& v : values) os << ' ' << v;
  os << "\n        </DataArray>\n";
}

}  // namespace

void write_vtk(const std::string& path, const Discretization& disc, const VtkFields& fields) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open VTK file for writing: " + path);
  os.precision(17);
  const Piece p = build_piece(disc);

  os << "<?xml version=\"1.0\"?>\n";
  os << "<VTKFile type=\"UnstructuredGrid\" version=\"0.1\" byte_order=\"LittleEndian\">\n";
  os << "  <UnstructuredGrid>\n";
  os << "    <Piece NumberOfPoints=\"" << p.points.size() << "\" NumberOfCells=\"" << p.cells.size() << "\">\n";

  os << "      <Points>\n";
  std::vector<double> xyz;
  for (const auto& x : p.points) xyz.insert(xyz.end(), {x.x(), x.y(), 0.0});
  data_array(os, "Float64", "", 3, xyz);
  os << "      </Points>\n";

  os << "      <Cells>\n";
  std::vector<std::size_t> conn;
  std::vector<std::size_t> offsets;
  std::vector<int> types;
  for (const auto& c : p.cells) {
    conn.insert(conn.end(), c.begin(), c.end());
    offsets.push_back(conn.size());
    types.push_back(c.size() == 4 ? 9 : 5);
  }
  data_array(os, "Int64", "connectivity", 1, conn);
  data_array(os, "Int64", "offsets", 1, offsets);
  data_array(os, "UInt8", "types", 1, types);
  os << "      </Cells>\n";

  if (fields.displacement != nullptr) {
    os << "      <PointData Vectors=\"displacement\">\n";
    std::vector<double> u;
    for (std::size_t i = 0; i < p.points.size(); ++i) {
      const Vec2 v = disc.space().evaluate(*fields.displacement, p.leaf_of_point[i], p.points[i]).value;
      u.insert(u.end(), {v.x(), v.y(), 0.0});
    }
    data_array(os, "Float64", "displacement", 3, u);
    os << "      </PointData>\n";
  }

  os << "      <CellData>\n";
  std::vector<int> cls;
  std::vector<long> root;
  std::vector<std::size_t> leaf;
  for (std::size_t leaf_index : p.leaf_of_cell) {
    cls.push_back(static_cast<int>(disc.geometry().cell_class(leaf_index)));
    const std::size_t r = disc.aggregates().root_of(leaf_index);
    root.push_back(r == AggregateMap::npos ? -1 : static_cast<long>(r));
    leaf.push_back(leaf_index);
  }
  data_array(os, "Int32", "cell_class", 1, cls);
  data_array(os, "Int64", "aggregate_root", 1, root);
  data_array(os, "Int64", "leaf", 1, leaf);
  if (fields.history != nullptr) {
    std::vector<double> alpha;
    for (std::size_t c = 0; c < p.cells.size(); ++c)
      alpha.push_back(fields.history->interpolate(p.leaf_of_cell[c], p.centroid[c]).alpha);
    data_array(os, "Float64", "alpha", 1, alpha);
  }
  if (fields.eta != nullptr) {
    std::vector<double> eta;
    for (std::size_t leaf_index : p.leaf_of_cell) eta.push_back((*fields.eta)[leaf_index]);
    data_array(os, "Float64", "eta", 1, eta);
  }
  os << "      </CellData>\n";
  os << "    </Piece>\n  </UnstructuredGrid>\n</VTKFile>\n";
  if (!os) throw Error("failed writing VTK file: " + path);
}

VtuData read_vtu(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open VTK file: " + path);
  std::stringstream buf;
  buf << is.rdbuf();
  const std::string text = buf.str();

  VtuData out;
  std::smatch m;
  if (std::regex_search(text, m, std::regex("NumberOfPoints=\"(\\d+)\" NumberOfCells=\"(\\d+)\""))) {
    out.points = std::stoul(m[1]);
    out.cells = std::stoul(m[2]);
  } else {
    throw Error("not an unstructured grid file: " + path);
  }

  auto section = [&](const std::string& tag) -> std::string {
    const auto b = text.find("<" + tag);
    if (b == std::string::npos) return {};
    const auto e = text.find("</" + tag + ">", b);
    return text.substr(b, e - b);
  };
  auto parse_arrays = [](const std::string& s, std::map<std::string, std::vector<double>>& into) {
    const std::regex re("<DataArray[^>]*Name=\"([^\"]+)\"[^>]*>([^<]*)</DataArray>");
    for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator(); ++it) {
      std::istringstream vs((*it)[2].str());
      std::vector<double> v;
      for (double x; vs >> x;) v.push_back(x);
      into[(*it)[1].str()] = std::move(v);
    }
  };
  parse_arrays(section("PointData"), out.point_data);
  parse_arrays(section("CellData"), out.cell_data);

  const std::string pts = section("Points");
  const auto b = pts.find('>', pts.find("<DataArray"));
  const auto e = pts.find("</DataArray>");
  std::istringstream ps(pts.substr(b + 1, e - b - 1));
  for (double x; ps >> x;) out.coordinates.push_back(x);
  return out;
}

}  // namespace ufep
