#include "yamabe/mesh_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace yamabe {

namespace {

[[noreturn]] void malformed(std::size_t line_no, const std::string& msg) {
  throw MeshError(MeshErrorCode::kMalformed, "line " + std::to_string(line_no) + ": " + msg);
}

long long parse_id(const std::string& tok, std::size_t line_no) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size() || value < 0) {
    malformed(line_no, "bad vertex id '" + tok + "'");
  }
  return value;
}

double parse_length(const std::string& tok, std::size_t line_no) {
  std::size_t used = 0;
  double value = 0;
  try {
    value = std::stod(tok, &used);
  } catch (const std::exception&) {
    malformed(line_no, "bad length '" + tok + "'");
  }
  if (used != tok.size() || !std::isfinite(value)) malformed(line_no, "bad length '" + tok + "'");
  return value;
}

}  // namespace

MeshFile read_mesh(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  std::vector<long long> vertex_ids;
  std::vector<std::array<long long, 3>> raw_faces;
  std::vector<std::tuple<long long, long long, double, std::size_t>> raw_lengths;

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string w; ls >> w;) tok.push_back(w);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (!header) {
      if (tok.size() != 2 || tok[0] != "plmesh" || tok[1] != "1") {
        malformed(line_no, "expected header 'plmesh 1'");
      }
      header = true;
      continue;
    }
    if (tok[0] == "v") {
      if (tok.size() != 2) malformed(line_no, "expected 'v <id>'");
      vertex_ids.push_back(parse_id(tok[1], line_no));
    } else if (tok[0] == "f") {
      if (tok.size() != 4) malformed(line_no, "expected 'f <id> <id> <id>'");
      raw_faces.push_back(
          {parse_id(tok[1], line_no), parse_id(tok[2], line_no), parse_id(tok[3], line_no)});
    } else if (tok[0] == "len") {
      if (tok.size() != 4) malformed(line_no, "expected 'len <id> <id> <float>'");
      raw_lengths.emplace_back(parse_id(tok[1], line_no), parse_id(tok[2], line_no),
                               parse_length(tok[3], line_no), line_no);
    } else {
      malformed(line_no, "unknown record '" + tok[0] + "'");
    }
  }
  if (!header) throw MeshError(MeshErrorCode::kMalformed, "missing 'plmesh 1' header");
  if (vertex_ids.empty()) throw MeshError(MeshErrorCode::kEmptyMesh, "mesh has no vertices");

  std::vector<long long> sorted = vertex_ids;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw MeshError(MeshErrorCode::kMalformed, "duplicate vertex id");
  }
  std::map<long long, VertexId> dense;
  for (VertexId i = 0; i < sorted.size(); ++i) dense[sorted[i]] = i;
  auto to_dense = [&](long long id, const char* what) {
    auto it = dense.find(id);
    if (it == dense.end()) {
      throw MeshError(MeshErrorCode::kDanglingVertex,
                      std::string(what) + " references undeclared vertex " + std::to_string(id));
    }
    return it->second;
  };

  std::vector<Face> faces;
  faces.reserve(raw_faces.size());
  for (const auto& rf : raw_faces) {
    faces.push_back({to_dense(rf[0], "face"), to_dense(rf[1], "face"), to_dense(rf[2], "face")});
  }
  MeshFile out;
  out.mesh = Triangulation::from_faces(sorted.size(), faces);

  if (!raw_lengths.empty()) {
    std::vector<double> lengths(out.mesh.edge_count(), std::nan(""));
    for (const auto& [a, b, value, at] : raw_lengths) {
      const std::int64_t e = out.mesh.find_edge(to_dense(a, "len"), to_dense(b, "len"));
      if (e < 0) malformed(at, "length given for a pair that is not an edge");
      if (!std::isnan(lengths[e])) malformed(at, "edge length given twice");
      lengths[e] = value;
    }
    for (EdgeId e = 0; e < lengths.size(); ++e) {
      if (std::isnan(lengths[e])) {
        const Edge& ed = out.mesh.edge(e);
        throw MeshError(MeshErrorCode::kMissingLength,
                        "no length for edge (" + std::to_string(sorted[ed.a]) + ", " +
                            std::to_string(sorted[ed.b]) + ")");
      }
    }
    out.lengths = std::move(lengths);
  }
  return out;
}

void write_mesh(std::ostream& out, const Triangulation& t,
                const std::optional<std::vector<double>>& lengths) {
  if (lengths && lengths->size() != t.edge_count()) {
    throw std::invalid_argument("length vector does not match edge count");
  }
  out << "plmesh 1\n";
  for (VertexId v = 0; v < t.vertex_count(); ++v) out << "v " << v << '\n';
  for (const Face& f : t.faces()) out << "f " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  if (lengths) {
    char buf[64];
    for (EdgeId e = 0; e < t.edge_count(); ++e) {
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, (*lengths)[e]);
      out << "len " << t.edge(e).a << ' ' << t.edge(e).b << ' ' << std::string_view(buf, ptr - buf)
          << '\n';
    }
  }
}

MeshFile load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MeshError(MeshErrorCode::kIo, "cannot open " + path.string());
  return read_mesh(in);
}

void save_mesh(const std::filesystem::path& path, const Triangulation& t,
               const std::optional<std::vector<double>>& lengths) {
  std::ofstream out(path);
  if (!out) throw MeshError(MeshErrorCode::kIo, "cannot write " + path.string());
  write_mesh(out, t, lengths);
  if (!out) throw MeshError(MeshErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace yamabe
