#include "magnograph/snapshot.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "magnograph/error.hpp"
#include "magnograph/hash.hpp"

namespace magnograph {

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct LineReader {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line_no = 0;

  // Next non-empty, non-comment line split on whitespace; empty at EOF.
  std::vector<std::string> next() {
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
      std::vector<std::string> tok;
      std::istringstream is{std::string(line)};
      for (std::string t; is >> t;) tok.push_back(t);
      if (!tok.empty()) return tok;
    }
    return {};
  }

  bool eof() const { return pos >= text.size(); }

  double number(const std::string& s) const {
    double v = 0.0;
    const char* first = s.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
    }
    return v;
  }

  long count(const std::string& s) const {
    double v = number(s);
    if (v < 0 || v != std::floor(v)) throw ParseError("line " + std::to_string(line_no) + ": bad count '" + s + "'");
    return static_cast<long>(v);
  }
};

}  // namespace

std::string write_field_snapshot(const GraphFunction& u, const GraphGrid& grid, const SnapshotHeader& header) {
  std::ostringstream os;
  os << "grid_hash " << header.grid_hash << '\n';
  os << "mu " << num(header.mu) << '\n';
  os << "p " << num(header.p) << '\n';
  os << "lambda " << num(header.lambda) << '\n';
  for (const EdgeGrid& e : grid.edges) {
    os << "edge " << e.id << " n " << e.nodes() << '\n';
    for (int j = 0; j < e.nodes(); ++j) {
      auto v = node_value(u, e, j);
      os << num(e.x(j)) << ' ' << num(v.real()) << ' ' << num(v.imag()) << '\n';
    }
  }
  return os.str();
}

FieldSnapshot read_field_snapshot(std::string_view text, const GraphGrid& grid) {
  LineReader r{text};
  FieldSnapshot snap;
  snap.u = GraphFunction::Zero(grid.dof_count);
  std::vector<bool> seen(static_cast<std::size_t>(grid.dof_count), false);
  std::vector<bool> edge_seen(grid.edges.size(), false);

  auto tok = r.next();
  while (!tok.empty() && tok[0] != "edge") {
    if (tok.size() != 2) throw ParseError("line " + std::to_string(r.line_no) + ": expected '<key> <value>'");
    if (tok[0] == "grid_hash") snap.header.grid_hash = tok[1];
    else if (tok[0] == "mu") snap.header.mu = r.number(tok[1]);
    else if (tok[0] == "p") snap.header.p = r.number(tok[1]);
    else if (tok[0] == "lambda") snap.header.lambda = r.number(tok[1]);
    else throw ParseError("line " + std::to_string(r.line_no) + ": unknown header key '" + tok[0] + "'");
    tok = r.next();
  }
  if (!snap.header.grid_hash.empty() && snap.header.grid_hash != hex_hash(grid_hash(grid))) {
    throw ValidationError("snapshot grid hash does not match the grid");
  }
  while (!tok.empty()) {
    if (tok.size() != 4 || tok[0] != "edge" || tok[2] != "n") {
      throw ParseError("line " + std::to_string(r.line_no) + ": expected 'edge <id> n <count>'");
    }
    std::size_t k = 0;
    while (k < grid.edges.size() && grid.edges[k].id != tok[1]) ++k;
    if (k == grid.edges.size()) throw ValidationError("snapshot edge '" + tok[1] + "' not in grid");
    const EdgeGrid& e = grid.edges[k];
    if (r.count(tok[3]) != e.nodes()) throw ValidationError("snapshot node count mismatch on edge '" + e.id + "'");
    edge_seen[k] = true;
    for (int j = 0; j < e.nodes(); ++j) {
      auto row = r.next();
      if (row.size() != 3) throw ParseError("line " + std::to_string(r.line_no) + ": expected '<x> <re> <im>'");
      std::complex<double> v(r.number(row[1]), r.number(row[2]));
      int d = e.dof[static_cast<std::size_t>(j)];
      if (d == kPinned) continue;
      if (!seen[static_cast<std::size_t>(d)]) {
        snap.u[d] = v;
        seen[static_cast<std::size_t>(d)] = true;
      } else if (std::abs(snap.u[d] - v) > 1e-12 * (1.0 + std::abs(v))) {
        throw ValidationError("snapshot is discontinuous at a vertex on edge '" + e.id + "'");
      }
    }
    tok = r.next();
  }
  for (std::size_t k = 0; k < edge_seen.size(); ++k) {
    if (!edge_seen[k]) throw ValidationError("snapshot lacks edge '" + grid.edges[k].id + "'");
  }
  return snap;
}

std::map<std::string, SampledProfile> read_potential_file(std::string_view text) {
  LineReader r{text};
  std::map<std::string, SampledProfile> out;
  for (auto tok = r.next(); !tok.empty(); tok = r.next()) {
    if (tok.size() != 4 || tok[0] != "edge" || tok[2] != "n") {
      throw ParseError("line " + std::to_string(r.line_no) + ": expected 'edge <id> n <count>'");
    }
    SampledProfile s;
    long n = r.count(tok[3]);
    if (n < 1) throw ParseError("line " + std::to_string(r.line_no) + ": empty potential block");
    for (long j = 0; j < n; ++j) {
      auto row = r.next();
      if (row.size() != 2 && row.size() != 3) throw ParseError("line " + std::to_string(r.line_no) + ": expected '<x> <value>'");
      double x = r.number(row[0]);
      if (!s.x.empty() && !(x > s.x.back())) throw ParseError("line " + std::to_string(r.line_no) + ": x must increase");
      s.x.push_back(x);
      s.value.push_back(r.number(row[1]));
    }
    out[tok[1]] = std::move(s);
  }
  return out;
}

std::string write_potential_file(const std::map<std::string, SampledProfile>& profiles) {
  std::ostringstream os;
  for (const auto& [id, s] : profiles) {
    os << "edge " << id << " n " << s.x.size() << '\n';
    for (std::size_t j = 0; j < s.x.size(); ++j) os << num(s.x[j]) << ' ' << num(s.value[j]) << " 0\n";
  }
  return os.str();
}

}  // namespace magnograph
