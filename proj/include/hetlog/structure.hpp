#pragma once

// Finite many-sorted structures: carriers, relation tables, function tables.
// Elements are indices into the per-sort carrier list; assignments map
// variable names to element indices.

#include <map>
#include <set>

#include "hetlog/ast.hpp"

namespace hetlog {

struct Structure {
  Signature signature;
  std::map<string, vector<string>> carriers;            // sort -> element names
  std::map<string, std::set<vector<int>>> relations;    // rel -> tuples
  std::map<string, std::map<vector<int>, int>> functions;

  int carrier_size(const string& sort) const {
    auto it = carriers.find(sort);
    return it == carriers.end() ? 0 : static_cast<int>(it->second.size());
  }
  const string& element_name(const string& sort, int e) const {
    return carriers.at(sort).at(static_cast<size_t>(e));
  }
  int element_index(const string& sort, const string& name) const {
    auto& c = carriers.at(sort);
    for (size_t i = 0; i < c.size(); ++i)
      if (c[i] == name) return static_cast<int>(i);
    return -1;
  }
  bool holds(const string& rel, const vector<int>& tuple) const {
    auto it = relations.find(rel);
    return it != relations.end() && it->second.count(tuple) > 0;
  }
  int apply(const string& fn, const vector<int>& tuple) const {
    return functions.at(fn).at(tuple);
  }
};

using Assignment = std::map<string, int>;  // variable name -> element index

struct StructureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Carriers must be nonempty and tables total over the declared sorts.
inline vector<string> validate_structure(const Structure& m) {
  vector<string> errors;
  for (auto& s : m.signature.sorts) {
    auto it = m.carriers.find(s);
    if (it == m.carriers.end() || it->second.empty()) {
      errors.push_back("carrier for sort " + s + " is missing or empty");
      continue;
    }
    std::set<string> seen(it->second.begin(), it->second.end());
    if (seen.size() != it->second.size())
      errors.push_back("carrier for sort " + s + " has duplicate elements");
  }
  for (auto& [sort, elems] : m.carriers)
    if (!m.signature.has_sort(sort))
      errors.push_back("carrier declared for unknown sort " + sort);
  for (auto& r : m.signature.relations) {
    auto it = m.relations.find(r.name);
    if (it == m.relations.end()) {
      errors.push_back("missing table for relation " + r.name);
      continue;
    }
    for (auto& tuple : it->second) {
      if (tuple.size() != r.arg_sorts.size()) {
        errors.push_back("tuple arity mismatch in table " + r.name);
        continue;
      }
      for (size_t i = 0; i < tuple.size(); ++i)
        if (tuple[i] < 0 || tuple[i] >= m.carrier_size(r.arg_sorts[i]))
          errors.push_back("tuple element out of range in table " + r.name);
    }
  }
  for (auto& f : m.signature.functions) {
    auto it = m.functions.find(f.name);
    if (it == m.functions.end()) {
      errors.push_back("missing table for function " + f.name);
      continue;
    }
    // Totality: every argument tuple must be mapped.
    size_t expected = 1;
    for (auto& s : f.arg_sorts) expected *= static_cast<size_t>(m.carrier_size(s));
    if (it->second.size() != expected) {
      errors.push_back("function " + f.name + " is not total");
      continue;
    }
    for (auto& [tuple, value] : it->second) {
      if (tuple.size() != f.arg_sorts.size()) {
        errors.push_back("argument arity mismatch in function " + f.name);
        continue;
      }
      for (size_t i = 0; i < tuple.size(); ++i)
        if (tuple[i] < 0 || tuple[i] >= m.carrier_size(f.arg_sorts[i]))
          errors.push_back("argument out of range in function " + f.name);
      if (value < 0 || value >= m.carrier_size(f.result_sort))
        errors.push_back("value out of range in function " + f.name);
    }
  }
  return errors;
}

// Enumerate all assignments for a list of sorted variables, in carrier order
// (the first variable varies slowest). Calls fn for each assignment.
template <class F>
void for_each_assignment(const Structure& m, const vector<Var>& vars, F&& fn,
                         Assignment base = {}) {
  std::function<void(size_t)> go = [&](size_t i) {
    if (i == vars.size()) {
      fn(base);
      return;
    }
    int n = m.carrier_size(vars[i].sort);
    for (int e = 0; e < n; ++e) {
      base[vars[i].name] = e;
      go(i + 1);
    }
    base.erase(vars[i].name);
  };
  go(0);
}

}  // namespace hetlog
