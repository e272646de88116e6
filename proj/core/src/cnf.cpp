#include "dnnflab/cnf.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "dnnflab/error.hpp"

namespace dnnflab {

bool satisfies(const Cnf& cnf, const Assignment& g) {
  for (const auto& c : cnf.clauses) {
    bool sat = false;
    for (const auto& l : c) {
      auto v = g.value(l.var);
      if (!v) throw ContractError("assignment does not cover variable " + std::to_string(l.var));
      if (*v == l.positive) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

bool falsifies_some_clause(const Cnf& cnf, const Assignment& g) {
  for (const auto& c : cnf.clauses) {
    bool all_false = true;
    for (const auto& l : c) {
      auto v = g.value(l.var);
      if (!v || *v == l.positive) {
        all_false = false;
        break;
      }
    }
    if (all_false) return true;
  }
  return false;
}

Cnf read_dimacs(std::istream& in) {
  Cnf cnf;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::size_t declared_clauses = 0;
  Clause current;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == 'c') continue;
    if (line[first] == '%') break;  // SATLIB trailer
    std::istringstream ls(line);
    if (line[first] == 'p') {
      std::string p, fmt;
      long long nv = -1, nc = -1;
      if (header) throw ParseError("duplicate problem line", lineno);
      if (!(ls >> p >> fmt >> nv >> nc) || fmt != "cnf" || nv < 0 || nc < 0)
        throw ParseError("malformed problem line", lineno);
      cnf.num_vars = static_cast<std::uint32_t>(nv);
      declared_clauses = static_cast<std::size_t>(nc);
      header = true;
      continue;
    }
    if (!header) throw ParseError("clause before problem line", lineno);
    long long x;
    while (ls >> x) {
      if (x == 0) {
        cnf.clauses.push_back(std::move(current));
        current.clear();
        continue;
      }
      long long v = x < 0 ? -x : x;
      if (v > cnf.num_vars) throw ParseError("literal " + std::to_string(x) + " exceeds variable count", lineno);
      current.push_back(Literal{static_cast<Var>(v - 1), x > 0});
    }
    if (!ls.eof()) throw ParseError("non-integer token", lineno);
  }
  if (!header) throw ParseError("missing problem line", lineno);
  if (!current.empty()) cnf.clauses.push_back(std::move(current));
  if (cnf.clauses.size() != declared_clauses)
    throw ParseError("declared " + std::to_string(declared_clauses) + " clauses, found " +
                         std::to_string(cnf.clauses.size()),
                     lineno);
  return cnf;
}

void write_dimacs(std::ostream& out, const Cnf& cnf) {
  out << "p cnf " << cnf.num_vars << ' ' << cnf.clauses.size() << '\n';
  for (const auto& c : cnf.clauses) {
    for (const auto& l : c) out << (l.positive ? "" : "-") << (l.var + 1) << ' ';
    out << "0\n";
  }
}

}  // namespace dnnflab
