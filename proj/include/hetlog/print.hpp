#pragma once

// Canonical text form for every syntactic object. The parser accepts exactly
// this grammar, so parse(print(x)) == x structurally.

#include <sstream>

#include "hetlog/ast.hpp"
#include "hetlog/structure.hpp"
#include "hetlog/syntax.hpp"

namespace hetlog {

inline void print_term(std::ostream& os, const TermPtr& t) {
  if (t->is_var()) {
    os << t->var().name;
    return;
  }
  os << t->app().fn;
  if (!t->app().args.empty()) {
    os << "(";
    for (size_t i = 0; i < t->app().args.size(); ++i) {
      if (i) os << ", ";
      print_term(os, t->app().args[i]);
    }
    os << ")";
  }
}

inline string print_term(const TermPtr& t) {
  std::ostringstream os;
  print_term(os, t);
  return os.str();
}

inline void print_vars(std::ostream& os, const vector<Var>& vars) {
  os << "[";
  for (size_t i = 0; i < vars.size(); ++i) {
    if (i) os << ", ";
    os << vars[i].name << ":" << vars[i].sort;
  }
  os << "]";
}

inline void print_formula(std::ostream& os, const Formula& f);

inline void print_payoff(std::ostream& os, const Payoff& p) {
  if (auto* body = std::get_if<BodyPayoff>(&p)) {
    os << "body ";
    print_formula(os, body->body);
    return;
  }
  const auto& op = std::get<OmegaPayoff>(p);
  os << (op.safety ? "safety" : "reach") << "(" << op.window << ")[";
  for (size_t i = 0; i < op.templates.size(); ++i) {
    if (i) os << ", ";
    print_formula(os, op.templates[i]);
  }
  os << "]";
}

inline void print_formula(std::ostream& os, const Formula& f) {
  if (as<FormulaNode::Top>(f)) {
    os << "true";
  } else if (as<FormulaNode::Bottom>(f)) {
    os << "false";
  } else if (auto* x = as<Atomic>(f)) {
    os << x->rel << "(";
    for (size_t i = 0; i < x->args.size(); ++i) {
      if (i) os << ", ";
      print_term(os, x->args[i]);
    }
    os << ")";
  } else if (auto* x = as<Equal>(f)) {
    os << "(";
    print_term(os, x->lhs);
    os << " = ";
    print_term(os, x->rhs);
    os << ")";
  } else if (auto* x = as<AndF>(f)) {
    os << "and(";
    for (size_t i = 0; i < x->items.size(); ++i) {
      if (i) os << ", ";
      print_formula(os, x->items[i]);
    }
    os << ")";
  } else if (auto* x = as<OrF>(f)) {
    os << "or(";
    for (size_t i = 0; i < x->items.size(); ++i) {
      if (i) os << ", ";
      print_formula(os, x->items[i]);
    }
    os << ")";
  } else if (auto* x = as<ImpliesF>(f)) {
    if (as<FormulaNode::Bottom>(x->rhs)) {
      os << "not(";
      print_formula(os, x->lhs);
      os << ")";
    } else {
      os << "implies(";
      print_formula(os, x->lhs);
      os << ", ";
      print_formula(os, x->rhs);
      os << ")";
    }
  } else if (auto* x = as<Quant>(f)) {
    os << (x->exists ? "exists " : "forall ");
    print_vars(os, x->vars);
    os << " ";
    print_formula(os, x->body);
  } else {
    auto* h = as<HetF>(f);
    const HetBlock& blk = h->block;
    os << (blk.polarity == Polarity::AE ? "hetAE" : "hetEA") << " { len: ";
    if (blk.is_omega())
      os << "omega";
    else
      os << *blk.length;
    os << "; sched: [";
    for (size_t i = 0; i < blk.schedule.size(); ++i) {
      if (i) os << ", ";
      print_vars(os, blk.schedule[i]);
    }
    os << "]";
    if (!blk.bounds.empty()) {
      os << "; bounds: [";
      for (size_t i = 0; i < blk.bounds.size(); ++i) {
        if (i) os << ", ";
        print_formula(os, blk.bounds[i]);
      }
      os << "]";
    }
    if (!blk.window_prefix.empty()) {
      os << "; prefix: [";
      for (size_t i = 0; i < blk.window_prefix.size(); ++i) {
        if (i) os << ", ";
        print_term(os, blk.window_prefix[i]);
      }
      os << "]";
    }
    if (!blk.past.empty()) {
      os << "; past: [";
      for (size_t i = 0; i < blk.past.size(); ++i) {
        if (i) os << ", ";
        print_formula(os, blk.past[i]);
      }
      os << "]";
    }
    os << "; payoff: ";
    print_payoff(os, h->payoff);
    os << " }";
  }
}

inline string print_formula(const Formula& f) {
  std::ostringstream os;
  print_formula(os, f);
  return os.str();
}

inline string print_payoff(const Payoff& p) {
  std::ostringstream os;
  print_payoff(os, p);
  return os.str();
}

inline void print_sequent(std::ostream& os, const Sequent& s) {
  print_formula(os, s.antecedent);
  os << " |- ";
  print_formula(os, s.succedent);
  os << " [ctx";
  for (size_t i = 0; i < s.context.size(); ++i)
    os << (i ? ", " : " ") << s.context[i].name << ":" << s.context[i].sort;
  os << "]";
}

inline string print_sequent(const Sequent& s) {
  std::ostringstream os;
  print_sequent(os, s);
  return os.str();
}

inline void print_signature(std::ostream& os, const Signature& sig) {
  for (auto& s : sig.sorts) os << "sort " << s << ";\n";
  for (auto& r : sig.relations) {
    os << "rel " << r.name << "(";
    for (size_t i = 0; i < r.arg_sorts.size(); ++i)
      os << (i ? ", " : "") << r.arg_sorts[i];
    os << ");\n";
  }
  for (auto& f : sig.functions) {
    if (f.arg_sorts.empty()) {
      os << "const " << f.name << ": " << f.result_sort << ";\n";
    } else {
      os << "fun " << f.name << "(";
      for (size_t i = 0; i < f.arg_sorts.size(); ++i)
        os << (i ? ", " : "") << f.arg_sorts[i];
      os << ") -> " << f.result_sort << ";\n";
    }
  }
}

inline void print_theory(std::ostream& os, const Theory& t) {
  print_signature(os, t.signature);
  for (auto& ax : t.axioms) {
    os << "axiom " << ax.name << ": ";
    print_sequent(os, ax.sequent);
    os << ";\n";
  }
  switch (t.classc.kind) {
    case ClassC::SafetyOnly:
      os << "classC safety;\n";
      break;
    case ClassC::Clopen:
      os << "classC clopen;\n";
      break;
    case ClassC::Explicit:
      os << "classC {";
      for (size_t i = 0; i < t.classc.entries.size(); ++i) {
        if (i) os << ",";
        os << " ";
        print_payoff(os, Payoff{t.classc.entries[i]});
      }
      os << " };\n";
      break;
  }
  os << "mode " << (t.mode == Mode::Classical ? "classical" : "intuitionistic")
     << ";\n";
}

inline string print_theory(const Theory& t) {
  std::ostringstream os;
  print_theory(os, t);
  return os.str();
}

inline void print_structure(std::ostream& os, const Structure& m) {
  for (auto& s : m.signature.sorts) {
    os << "carrier " << s << " = {";
    auto it = m.carriers.find(s);
    if (it != m.carriers.end())
      for (size_t i = 0; i < it->second.size(); ++i)
        os << (i ? ", " : "") << it->second[i];
    os << "};\n";
  }
  for (auto& r : m.signature.relations) {
    os << "table " << r.name << " = {";
    auto it = m.relations.find(r.name);
    bool first = true;
    if (it != m.relations.end())
      for (auto& tuple : it->second) {
        os << (first ? "" : ", ") << "(";
        for (size_t i = 0; i < tuple.size(); ++i)
          os << (i ? ", " : "") << m.element_name(r.arg_sorts[i], tuple[i]);
        os << ")";
        first = false;
      }
    os << "};\n";
  }
  for (auto& f : m.signature.functions) {
    os << "fun " << f.name << " = {";
    auto it = m.functions.find(f.name);
    bool first = true;
    if (it != m.functions.end())
      for (auto& [tuple, value] : it->second) {
        os << (first ? "" : ", ") << "(";
        for (size_t i = 0; i < tuple.size(); ++i)
          os << (i ? ", " : "") << m.element_name(f.arg_sorts[i], tuple[i]);
        os << ") -> " << m.element_name(f.result_sort, value);
        first = false;
      }
    os << "};\n";
  }
}

inline string print_structure(const Structure& m) {
  std::ostringstream os;
  print_structure(os, m);
  return os.str();
}

// Stable 64-bit key of a formula modulo alpha-equivalence.
inline uint64_t formula_hash(const Formula& f) {
  return fnv1a(print_formula(alpha_normalize(f)));
}

inline string formula_hash_hex(const Formula& f) {
  uint64_t h = formula_hash(f);
  static const char* digits = "0123456789abcdef";
  string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace hetlog
