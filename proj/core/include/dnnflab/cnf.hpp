#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "dnnflab/assignments.hpp"

namespace dnnflab {

struct Literal {
  Var var = 0;
  bool positive = true;

  friend bool operator==(const Literal&, const Literal&) = default;
  friend auto operator<=>(const Literal&, const Literal&) = default;
};

using Clause = std::vector<Literal>;

/// Clause set over variables 0..num_vars-1. DIMACS I/O shifts indices by one.
struct Cnf {
  std::uint32_t num_vars = 0;
  std::vector<Clause> clauses;
};

/// Whether a total assignment (over at least the clause variables) satisfies
/// every clause.
bool satisfies(const Cnf& cnf, const Assignment& g);

/// Whether g falsifies some clause, i.e. assigns every literal false.
bool falsifies_some_clause(const Cnf& cnf, const Assignment& g);

/// Reads "p cnf V C" DIMACS. Comment lines start with 'c'. Throws ParseError.
Cnf read_dimacs(std::istream& in);
void write_dimacs(std::ostream& out, const Cnf& cnf);

}  // namespace dnnflab
