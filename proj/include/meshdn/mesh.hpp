#ifndef MESHDN_MESH_HPP
#define MESHDN_MESH_HPP

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "meshdn/signal.hpp"

namespace meshdn {

using VertexIndex = std::uint32_t;
using Face = std::array<VertexIndex, 3>;

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parse failure; line() is 1-based, pointing at the offending line (or one
// past the last line for truncated input).
class ParseError : public MeshError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : MeshError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Triangle mesh. Immutable once built; the constructor enforces that the
// vertex set is nonempty, every face index is in range, and no face repeats
// a vertex.
class Mesh {
 public:
  Mesh(SignalMatrix vertices, std::vector<Face> faces)
      : vertices_(std::move(vertices)), faces_(std::move(faces)) {
    if (vertices_.empty()) throw MeshError("mesh has no vertices");
    const auto n = vertices_.size();
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      const Face& t = faces_[f];
      for (auto v : t) {
        if (v >= n) {
          throw MeshError("face " + std::to_string(f) + " references vertex " + std::to_string(v) +
                          " but the mesh has " + std::to_string(n) + " vertices");
        }
      }
      if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
        throw MeshError("face " + std::to_string(f) + " repeats a vertex");
      }
    }
  }

  const SignalMatrix& vertices() const noexcept { return vertices_; }
  const std::vector<Face>& faces() const noexcept { return faces_; }
  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t face_count() const noexcept { return faces_.size(); }

  // Same connectivity, new positions.
  Mesh with_vertices(SignalMatrix vertices) const {
    if (vertices.size() != vertices_.size()) throw MeshError("with_vertices: vertex count mismatch");
    return Mesh(std::move(vertices), faces_);
  }

  friend bool operator==(const Mesh&, const Mesh&) = default;

 private:
  SignalMatrix vertices_;
  std::vector<Face> faces_;
};

// Undirected edges (i < j), sorted and unique.
struct EdgeSet {
  std::size_t vertex_count = 0;
  std::vector<std::pair<VertexIndex, VertexIndex>> edges;

  std::size_t size() const noexcept { return edges.size(); }
};

struct NormalField {
  SignalMatrix normals;
  // 1 where the accumulated face normal vanished; such rows are (0,0,0).
  std::vector<std::uint8_t> degenerate;

  std::size_t degenerate_count() const {
    return static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), std::uint8_t{1}));
  }
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

inline std::string_view strip_comment(std::string_view s) {
  const auto hash = s.find('#');
  return hash == std::string_view::npos ? s : s.substr(0, hash);
}

inline double parse_real(std::string_view tok, std::size_t line) {
  double value = 0.0;
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "expected a real number, got '" + std::string(tok) + "'");
  }
  return value;
}

inline long long parse_integer(std::string_view tok, std::size_t line) {
  long long value = 0;
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "expected an integer, got '" + std::string(tok) + "'");
  }
  return value;
}

// 17 significant digits: enough for an exact binary64 round trip.
inline void put_real(std::ostream& os, double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  os.write(buf, res.ptr - buf);
}

// Line reader that tracks 1-based line numbers and skips blank/comment lines.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::vector<std::string_view>& tokens) {
    while (std::getline(in_, buffer_)) {
      ++line_;
      tokens = split_ws(strip_comment(buffer_));
      if (!tokens.empty()) return true;
    }
    ++line_;
    return false;
  }

  std::size_t line() const noexcept { return line_; }

 private:
  std::istream& in_;
  std::string buffer_;
  std::size_t line_ = 0;
};

inline Face make_face(long long a, long long b, long long c, std::size_t n, std::size_t line) {
  for (long long v : {a, b, c}) {
    if (v < 0 || static_cast<unsigned long long>(v) >= n) {
      throw ParseError(line, "face index " + std::to_string(v) + " out of range [0, " + std::to_string(n) + ")");
    }
  }
  if (a == b || b == c || a == c) throw ParseError(line, "face repeats a vertex");
  return {static_cast<VertexIndex>(a), static_cast<VertexIndex>(b), static_cast<VertexIndex>(c)};
}

}  // namespace detail

inline Mesh parse_off(std::istream& in) {
  detail::LineReader reader(in);
  std::vector<std::string_view> tok;
  if (!reader.next(tok)) throw ParseError(reader.line(), "empty file, expected 'OFF' header");
  if (tok.front() != "OFF") throw ParseError(reader.line(), "malformed header, expected 'OFF'");

  // Counts may share the header line ("OFF 3 1 0").
  std::vector<std::string_view> counts(tok.begin() + 1, tok.end());
  if (counts.empty()) {
    if (!reader.next(tok)) throw ParseError(reader.line(), "truncated file, expected counts line");
    counts = tok;
  }
  if (counts.size() < 2) throw ParseError(reader.line(), "malformed counts line, expected 'n f e'");
  const long long nv = detail::parse_integer(counts[0], reader.line());
  const long long nf = detail::parse_integer(counts[1], reader.line());
  if (counts.size() >= 3) detail::parse_integer(counts[2], reader.line());
  if (nv < 1 || nf < 0) throw ParseError(reader.line(), "malformed counts line, need n >= 1 and f >= 0");

  SignalMatrix vertices;
  vertices.reserve(static_cast<std::size_t>(nv));
  for (long long i = 0; i < nv; ++i) {
    if (!reader.next(tok)) {
      throw ParseError(reader.line(), "truncated file, expected " + std::to_string(nv) + " vertices, found " +
                                          std::to_string(i));
    }
    if (tok.size() < 3) throw ParseError(reader.line(), "vertex line needs 3 coordinates");
    vertices.push_back({detail::parse_real(tok[0], reader.line()), detail::parse_real(tok[1], reader.line()),
                        detail::parse_real(tok[2], reader.line())});
  }

  std::vector<Face> faces;
  faces.reserve(static_cast<std::size_t>(nf));
  for (long long f = 0; f < nf; ++f) {
    if (!reader.next(tok)) {
      throw ParseError(reader.line(), "truncated file, expected " + std::to_string(nf) + " faces, found " +
                                          std::to_string(f));
    }
    const long long count = detail::parse_integer(tok[0], reader.line());
    if (count != 3) throw ParseError(reader.line(), "non-triangular face (" + std::to_string(count) + " vertices)");
    if (tok.size() < 4) throw ParseError(reader.line(), "face line lists fewer than 3 indices");
    // Trailing tokens (per-face colors) are ignored.
    faces.push_back(detail::make_face(detail::parse_integer(tok[1], reader.line()),
                                      detail::parse_integer(tok[2], reader.line()),
                                      detail::parse_integer(tok[3], reader.line()), vertices.size(), reader.line()));
  }
  return Mesh(std::move(vertices), std::move(faces));
}

inline Mesh parse_obj(std::istream& in) {
  detail::LineReader reader(in);
  std::vector<std::string_view> tok;
  SignalMatrix vertices;
  struct PendingFace {
    std::array<long long, 3> idx;
    std::size_t line;
  };
  std::vector<PendingFace> pending;

  while (reader.next(tok)) {
    const auto kind = tok.front();
    if (kind == "v") {
      if (tok.size() < 4) throw ParseError(reader.line(), "vertex record needs 3 coordinates");
      vertices.push_back({detail::parse_real(tok[1], reader.line()), detail::parse_real(tok[2], reader.line()),
                          detail::parse_real(tok[3], reader.line())});
    } else if (kind == "f") {
      if (tok.size() != 4) {
        throw ParseError(reader.line(), "non-triangular face (" + std::to_string(tok.size() - 1) + " vertices)");
      }
      PendingFace pf{{}, reader.line()};
      for (int k = 0; k < 3; ++k) {
        auto field = tok[k + 1];
        field = field.substr(0, field.find('/'));
        const long long one_based = detail::parse_integer(field, reader.line());
        if (one_based < 0) throw ParseError(reader.line(), "negative (relative) face indices are not supported");
        if (one_based == 0) throw ParseError(reader.line(), "face index 0 is invalid in OBJ (indices are 1-based)");
        pf.idx[k] = one_based - 1;
      }
      pending.push_back(pf);
    }
    // vn, vt, o, g, s, usemtl, mtllib and the rest carry nothing we keep.
  }
  if (vertices.empty()) throw ParseError(reader.line(), "no vertex records");

  std::vector<Face> faces;
  faces.reserve(pending.size());
  for (const auto& pf : pending) {
    faces.push_back(detail::make_face(pf.idx[0], pf.idx[1], pf.idx[2], vertices.size(), pf.line));
  }
  return Mesh(std::move(vertices), std::move(faces));
}

inline Mesh parse_off(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_off(in);
}

inline Mesh parse_obj(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_obj(in);
}

inline void write_off(std::ostream& os, const Mesh& mesh) {
  os << "OFF\n" << mesh.vertex_count() << ' ' << mesh.face_count() << " 0\n";
  for (const auto& p : mesh.vertices()) {
    detail::put_real(os, p[0]);
    os << ' ';
    detail::put_real(os, p[1]);
    os << ' ';
    detail::put_real(os, p[2]);
    os << '\n';
  }
  for (const auto& f : mesh.faces()) os << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

inline void write_obj(std::ostream& os, const Mesh& mesh) {
  for (const auto& p : mesh.vertices()) {
    os << "v ";
    detail::put_real(os, p[0]);
    os << ' ';
    detail::put_real(os, p[1]);
    os << ' ';
    detail::put_real(os, p[2]);
    os << '\n';
  }
  for (const auto& f : mesh.faces()) os << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

inline std::string write_off(const Mesh& mesh) {
  std::ostringstream os;
  write_off(os, mesh);
  return os.str();
}

inline std::string write_obj(const Mesh& mesh) {
  std::ostringstream os;
  write_obj(os, mesh);
  return os.str();
}

enum class MeshFormat { Off, Obj };

inline MeshFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".off") return MeshFormat::Off;
  if (ext == ".obj") return MeshFormat::Obj;
  throw MeshError("unrecognized mesh extension '" + ext + "' (expected .off or .obj): " + path.string());
}

inline Mesh load_mesh(const std::filesystem::path& path) {
  const auto format = format_from_path(path);
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open " + path.string());
  try {
    return format == MeshFormat::Off ? parse_off(in) : parse_obj(in);
  } catch (const MeshError& e) {
    throw MeshError(path.string() + ": " + e.what());
  }
}

inline void save_mesh(const std::filesystem::path& path, const Mesh& mesh) {
  const auto format = format_from_path(path);
  std::ofstream out(path);
  if (!out) throw MeshError("cannot open " + path.string() + " for writing");
  if (format == MeshFormat::Off)
    write_off(out, mesh);
  else
    write_obj(out, mesh);
  if (!out) throw MeshError("write failed: " + path.string());
}

inline EdgeSet extract_edges(const Mesh& mesh) {
  EdgeSet out;
  out.vertex_count = mesh.vertex_count();
  out.edges.reserve(mesh.face_count() * 3);
  for (const auto& f : mesh.faces()) {
    for (int k = 0; k < 3; ++k) {
      const VertexIndex a = f[k], b = f[(k + 1) % 3];
      out.edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(out.edges.begin(), out.edges.end());
  out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());
  return out;
}

// Area-weighted vertex normals: each incident face contributes ½(b−a)×(c−a).
inline NormalField vertex_normals(const Mesh& mesh) {
  const auto& x = mesh.vertices();
  SignalMatrix acc(x.size(), Vec3{0.0, 0.0, 0.0});
  for (const auto& f : mesh.faces()) {
    const Vec3 area_normal = 0.5 * cross(x[f[1]] - x[f[0]], x[f[2]] - x[f[0]]);
    for (auto v : f) acc[v] = acc[v] + area_normal;
  }
  NormalField out;
  out.normals.resize(x.size());
  out.degenerate.assign(x.size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double len = norm(acc[i]);
    if (!(len > std::numeric_limits<double>::min()) || !std::isfinite(len)) {
      out.normals[i] = {0.0, 0.0, 0.0};
      out.degenerate[i] = 1;
    } else {
      out.normals[i] = (1.0 / len) * acc[i];
    }
  }
  return out;
}

}  // namespace meshdn

#endif  // MESHDN_MESH_HPP
