#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vinedist/complex.hpp"
#include "vinedist/errors.hpp"
#include "vinedist/persistence.hpp"
#include "vinedist/vineyard.hpp"
#include "vinedist/wasserstein.hpp"

namespace vinedist::io {

using json = nlohmann::json;

namespace detail {

inline std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, sep)) out.push_back(trim(field));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

inline double to_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, where + ": not a number: '" + s + "'");
  }
}

inline bool looks_numeric(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

// Data lines with comments (#) and blank lines removed. A first line whose
// leading field is not numeric is treated as a header and skipped.
inline std::vector<std::vector<std::string>> csv_rows(std::istream& in, const std::string& where) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(line);
    if (first && !looks_numeric(fields.front())) {
      first = false;
      continue;
    }
    first = false;
    rows.push_back(std::move(fields));
  }
  if (in.bad()) throw Error(ErrorKind::ParseError, where + ": read failed");
  return rows;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
  return in;
}

inline std::string lowercase_extension(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return {};
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

}  // namespace detail

// Complex JSON: {"cells":[{"id":0,"dim":0,"boundary":[]}, ...]}

inline CellComplex complex_from_json(const json& j) {
  if (!j.is_object() || !j.contains("cells") || !j["cells"].is_array())
    throw Error(ErrorKind::ParseError, "complex JSON needs a \"cells\" array");
  std::vector<RawCell> cells;
  for (const auto& c : j["cells"]) {
    try {
      RawCell rc;
      rc.id = c.at("id").get<std::size_t>();
      rc.dim = c.at("dim").get<int>();
      rc.boundary = c.value("boundary", std::vector<std::size_t>{});
      cells.push_back(std::move(rc));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::ParseError, std::string("bad cell entry: ") + e.what());
    }
  }
  return CellComplex::build(std::move(cells));
}

inline json complex_to_json(const CellComplex& k) {
  json cells = json::array();
  for (std::size_t id = 0; id < k.size(); ++id) {
    auto bd = k.boundary(id);
    cells.push_back({{"id", id}, {"dim", k.dim(id)}, {"boundary", std::vector<std::size_t>(bd.begin(), bd.end())}});
  }
  return {{"cells", cells}};
}

inline json parse_json(std::istream& in, const std::string& where) {
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, where + ": " + e.what());
  }
}

inline CellComplex read_complex(const std::string& path) {
  auto in = detail::open_in(path);
  return complex_from_json(parse_json(in, path));
}

// Vertex values CSV: vertex_id,value. vertex_id is the cell id of the vertex.

inline std::vector<double> read_vertex_values(std::istream& in, const CellComplex& k, const std::string& where = "csv") {
  std::vector<double> values(k.vertex_count(), std::numeric_limits<double>::quiet_NaN());
  std::vector<bool> seen(k.vertex_count(), false);
  for (const auto& row : detail::csv_rows(in, where)) {
    if (row.size() < 2) throw Error(ErrorKind::ParseError, where + ": expected vertex_id,value");
    const double id_d = detail::to_double(row[0], where);
    if (id_d < 0 || id_d != static_cast<double>(static_cast<std::size_t>(id_d)))
      throw Error(ErrorKind::ParseError, where + ": bad vertex id '" + row[0] + "'");
    const auto id = static_cast<std::size_t>(id_d);
    if (id >= k.size() || k.dim(id) != 0)
      throw Error(ErrorKind::MissingVertexValue, where + ": cell " + row[0] + " is not a vertex");
    const std::size_t v = k.vertex_index(id);
    values[v] = detail::to_double(row[1], where);
    seen[v] = true;
  }
  for (std::size_t v = 0; v < seen.size(); ++v)
    if (!seen[v])
      throw Error(ErrorKind::MissingVertexValue,
                  where + ": no value for vertex cell " + std::to_string(k.vertex_cell(v)));
  return values;
}

inline FilterFunction read_vertex_function(const std::string& path, const CellComplex& k) {
  auto in = detail::open_in(path);
  return lower_star(k, read_vertex_values(in, k, path));
}

inline void write_vertex_values(std::ostream& out, const CellComplex& k, std::span<const double> values) {
  out << "vertex_id,value\n" << std::setprecision(17);
  for (std::size_t v = 0; v < values.size(); ++v) out << k.vertex_cell(v) << ',' << values[v] << '\n';
}

// Images: CSV grid of reals, or plain PGM (P2).

inline ImageGrid read_image_csv(std::istream& in, const std::string& where = "csv") {
  ImageGrid g;
  std::string line;
  while (std::getline(in, line)) {
    line = detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = detail::split(line);
    if (g.cols == 0) g.cols = fields.size();
    if (fields.size() != g.cols) throw Error(ErrorKind::EmptyGrid, where + ": ragged image rows");
    for (const auto& f : fields) g.pixels.push_back(detail::to_double(f, where));
    ++g.rows;
  }
  if (g.rows == 0) throw Error(ErrorKind::EmptyGrid, where + ": no pixels");
  return g;
}

inline ImageGrid read_pgm(std::istream& in, const std::string& where = "pgm") {
  // Tokenize, dropping comments.
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  if (tokens.size() < 4 || tokens[0] != "P2") throw Error(ErrorKind::ParseError, where + ": not a P2 PGM file");
  ImageGrid g;
  g.cols = static_cast<std::size_t>(detail::to_double(tokens[1], where));
  g.rows = static_cast<std::size_t>(detail::to_double(tokens[2], where));
  if (g.rows == 0 || g.cols == 0) throw Error(ErrorKind::EmptyGrid, where + ": zero-sized image");
  if (tokens.size() != 4 + g.rows * g.cols)
    throw Error(ErrorKind::ParseError, where + ": expected " + std::to_string(g.rows * g.cols) + " pixels");
  for (std::size_t i = 4; i < tokens.size(); ++i) g.pixels.push_back(detail::to_double(tokens[i], where));
  return g;
}

inline ImageGrid read_image(const std::string& path) {
  auto in = detail::open_in(path);
  return detail::lowercase_extension(path) == "pgm" ? read_pgm(in, path) : read_image_csv(in, path);
}

inline void write_image_csv(std::ostream& out, const ImageGrid& g) {
  out << std::setprecision(17);
  for (std::size_t r = 0; r < g.rows; ++r)
    for (std::size_t c = 0; c < g.cols; ++c) out << g.at(r, c) << (c + 1 == g.cols ? '\n' : ',');
}

// Diagram CSV: dim,birth,death,essential; rows ordered by (birth, death).

inline void write_diagram_csv(std::ostream& out, const PersistenceDiagram& d, bool header = true) {
  PersistenceDiagram sorted = d;
  sorted.sort();
  if (header) out << "dim,birth,death,essential\n";
  out << std::setprecision(17);
  for (const auto& p : sorted.points)
    out << sorted.dim << ',' << p.birth << ',' << p.death << ',' << (p.essential ? 1 : 0) << '\n';
}

/// Reads the rows of one homology dimension; when dim is negative, the file must
/// hold a single dimension (or be empty, giving dim 0). The ceiling is the
/// largest death seen.
inline PersistenceDiagram read_diagram_csv(std::istream& in, int dim = -1, const std::string& where = "csv") {
  PersistenceDiagram d;
  d.dim = dim < 0 ? 0 : dim;
  bool dim_fixed = dim >= 0;
  for (const auto& row : detail::csv_rows(in, where)) {
    if (row.size() < 3) throw Error(ErrorKind::ParseError, where + ": expected dim,birth,death[,essential]");
    const int rd = static_cast<int>(detail::to_double(row[0], where));
    if (!dim_fixed) {
      d.dim = rd;
      dim_fixed = true;
    } else if (rd != d.dim) {
      if (dim >= 0) continue;
      throw Error(ErrorKind::DimensionMismatch, where + ": mixed homology dimensions; pass an explicit dim");
    }
    DiagramPoint p;
    p.birth = detail::to_double(row[1], where);
    p.death = detail::to_double(row[2], where);
    p.essential = row.size() > 3 && detail::to_double(row[3], where) != 0.0;
    if (p.death < p.birth) throw Error(ErrorKind::ParseError, where + ": point below the diagonal");
    d.ceiling = d.points.empty() ? p.death : std::max(d.ceiling, p.death);
    d.points.push_back(p);
  }
  d.sort();
  return d;
}

inline PersistenceDiagram read_diagram(const std::string& path, int dim = -1) {
  auto in = detail::open_in(path);
  return read_diagram_csv(in, dim, path);
}

// Matching and vineyard JSON.

inline json matching_to_json(const Matching& m) {
  json pairs = json::array();
  for (auto [a, b] : m.pairs) pairs.push_back({a, b});
  return {{"pairs", pairs},
          {"p_to_diagonal", m.p_to_diagonal},
          {"q_to_diagonal", m.q_to_diagonal},
          {"cost", m.cost},
          {"ambiguous", m.ambiguous}};
}

inline json distance_to_json(const DistanceResult& r) {
  return {{"distance", r.distance}, {"matching", matching_to_json(r.matching)}};
}

inline json vineyard_to_json(const Vineyard& vy) {
  json vines = json::array();
  for (const auto& v : vy.vines) {
    json pts = json::array();
    for (const auto& p : v.points) pts.push_back({p.t, p.x, p.y});
    vines.push_back({{"class", std::string(to_string(v.cls))}, {"essential", v.essential}, {"points", pts}});
  }
  json out = {{"dim", vy.dim}, {"times", vy.times}, {"vines", vines}, {"ambiguity_times", vy.ambiguity_times}};
  if (vy.refinement_limit_reached) out["warnings"] = vy.warnings;
  return out;
}

/// Inverse of vineyard_to_json. Diagrams are not stored in the JSON, so they
/// are rebuilt from the off-diagonal vine positions at each grid time.
inline Vineyard vineyard_from_json(const json& j) {
  Vineyard vy;
  try {
    vy.dim = j.at("dim").get<int>();
    vy.times = j.at("times").get<std::vector<double>>();
    vy.ambiguity_times = j.value("ambiguity_times", std::vector<double>{});
    for (const auto& jv : j.at("vines")) {
      Vine v;
      v.cls = vine_class_from_string(jv.at("class").get<std::string>());
      v.essential = jv.value("essential", false);
      for (const auto& p : jv.at("points")) {
        const auto arr = p.get<std::vector<double>>();
        if (arr.size() != 3) throw Error(ErrorKind::ParseError, "vine points are [t, x, y] triples");
        v.points.push_back({arr[0], arr[1], arr[2]});
      }
      if (v.points.empty()) throw Error(ErrorKind::ParseError, "vine without points");
      vy.vines.push_back(std::move(v));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("bad vineyard JSON: ") + e.what());
  }
  for (std::size_t k = 0; k < vy.times.size(); ++k) {
    PersistenceDiagram d;
    d.dim = vy.dim;
    for (const auto& p : vy.points_at(k)) d.points.push_back({p.x, p.y, false});
    d.sort();
    vy.diagrams.push_back(std::move(d));
  }
  return vy;
}

// Dual-graph dataset JSON:
//   {"vertices": N, "edges": [[a, b], ...], "columns": {"name": [v0, ..., vN-1], ...}}
// Vertices are units 0..N-1, edges are adjacencies.

struct DualGraphDataset {
  CellComplex graph;
  std::map<std::string, std::vector<double>> columns;

  const std::vector<double>& column(const std::string& name) const {
    auto it = columns.find(name);
    if (it == columns.end()) throw Error(ErrorKind::UnknownColumn, "no column named '" + name + "'");
    return it->second;
  }
};

inline CellComplex graph_complex(std::size_t vertices, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<RawCell> cells;
  for (std::size_t v = 0; v < vertices; ++v) cells.push_back({v, 0, {}});
  for (auto [a, b] : edges) cells.push_back({cells.size(), 1, {a, b}});
  return CellComplex::build(std::move(cells));
}

inline DualGraphDataset dataset_from_json(const json& j) {
  DualGraphDataset ds;
  std::size_t n = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  try {
    n = j.at("vertices").get<std::size_t>();
    for (const auto& e : j.at("edges")) {
      const auto ab = e.get<std::vector<std::size_t>>();
      if (ab.size() != 2 || ab[0] == ab[1]) throw Error(ErrorKind::ParseError, "edges are pairs of distinct vertices");
      edges.emplace_back(ab[0], ab[1]);
    }
    for (const auto& [name, col] : j.at("columns").items()) ds.columns[name] = col.get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("bad dataset JSON: ") + e.what());
  }
  ds.graph = graph_complex(n, edges);
  for (const auto& [name, col] : ds.columns) {
    if (col.size() != n)
      throw Error(ErrorKind::DomainMismatch, "column '" + name + "' has " + std::to_string(col.size()) +
                                                 " values for " + std::to_string(n) + " vertices");
    for (double v : col)
      if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "column '" + name + "' has a non-finite value");
  }
  return ds;
}

inline json dataset_to_json(const DualGraphDataset& ds) {
  json edges = json::array();
  for (std::size_t id = 0; id < ds.graph.size(); ++id)
    if (ds.graph.dim(id) == 1) {
      auto vs = ds.graph.vertices(id);
      edges.push_back({vs.front(), vs.back()});
    }
  json cols = json::object();
  for (const auto& [name, col] : ds.columns) cols[name] = col;
  return {{"vertices", ds.graph.vertex_count()}, {"edges", edges}, {"columns", cols}};
}

inline DualGraphDataset read_dataset(const std::string& path) {
  auto in = detail::open_in(path);
  return dataset_from_json(parse_json(in, path));
}

inline void write_matrix_csv(std::ostream& out, const std::vector<std::vector<double>>& m,
                             const std::vector<std::string>& labels = {}) {
  out << std::setprecision(12);
  if (!labels.empty()) {
    out << "name";
    for (const auto& l : labels) out << ',' << l;
    out << '\n';
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!labels.empty()) out << labels[i] << ',';
    for (std::size_t j = 0; j < m[i].size(); ++j) out << m[i][j] << (j + 1 == m[i].size() ? '\n' : ',');
  }
}

}  // namespace vinedist::io
