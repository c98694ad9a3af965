#pragma once

// Finite Kripke models for intuitionistic heterogeneous theories: a finite
// poset of nodes with a structure per node and transition homomorphisms,
// and the forcing relation extended with the heterogeneous clauses. The
// heterogeneous game is played inside the node's own structure; only the
// payoff templates (and bounds) are evaluated by forcing at that node.

#include "hetlog/game.hpp"
#include "hetlog/parse.hpp"

namespace hetlog {

struct KripkeModel {
  vector<string> nodes;
  std::set<std::pair<int, int>> order;  // strict pairs p < q, transitively closed
  vector<Structure> structures;
  // per ordered pair, per sort: element map carrier_p -> carrier_q
  std::map<std::pair<int, int>, std::map<string, vector<int>>> maps;

  int node_index(const string& name) const {
    for (size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i] == name) return static_cast<int>(i);
    return -1;
  }
  bool leq(int p, int q) const { return p == q || order.count({p, q}) > 0; }
  vector<int> above(int p) const {
    vector<int> out{p};
    for (size_t q = 0; q < nodes.size(); ++q)
      if (order.count({p, static_cast<int>(q)})) out.push_back(static_cast<int>(q));
    return out;
  }
  int map_element(int p, int q, const string& sort, int e) const {
    if (p == q) return e;
    return maps.at({p, q}).at(sort).at(static_cast<size_t>(e));
  }
};

// ---------------------------------------------------------------------------
// Validation

struct KripkeReport {
  vector<string> errors;
  bool ok() const { return errors.empty(); }
};

inline KripkeReport check_kripke_model(const KripkeModel& k, const Theory& t,
                                       int max_positions = kDefaultMaxPositions) {
  KripkeReport rep;
  int n = static_cast<int>(k.nodes.size());
  if (k.structures.size() != k.nodes.size()) {
    rep.errors.push_back("every node needs a structure");
    return rep;
  }
  for (auto& [p, q] : k.order) {
    if (p == q || k.order.count({q, p}))
      rep.errors.push_back("order is not a strict poset at " + k.nodes[static_cast<size_t>(p)] +
                           "/" + k.nodes[static_cast<size_t>(q)]);
  }
  for (auto& [p, q] : k.order)
    for (int r = 0; r < n; ++r)
      if (k.order.count({q, r}) && !k.order.count({p, r}))
        rep.errors.push_back("order is not transitive through " +
                             k.nodes[static_cast<size_t>(q)]);
  for (int i = 0; i < n; ++i) {
    auto errs = validate_structure(k.structures[static_cast<size_t>(i)]);
    for (auto& e : errs)
      rep.errors.push_back("node " + k.nodes[static_cast<size_t>(i)] + ": " + e);
  }
  if (!rep.ok()) return rep;

  // Transition maps: totality, homomorphism, functoriality.
  for (auto& [p, q] : k.order) {
    auto it = k.maps.find({p, q});
    if (it == k.maps.end()) {
      rep.errors.push_back("missing map " + k.nodes[static_cast<size_t>(p)] + "->" +
                           k.nodes[static_cast<size_t>(q)]);
      continue;
    }
    const Structure& mp = k.structures[static_cast<size_t>(p)];
    const Structure& mq = k.structures[static_cast<size_t>(q)];
    string pair_name = k.nodes[static_cast<size_t>(p)] + "->" + k.nodes[static_cast<size_t>(q)];
    for (auto& sort : mp.signature.sorts) {
      auto jt = it->second.find(sort);
      if (jt == it->second.end() ||
          jt->second.size() != static_cast<size_t>(mp.carrier_size(sort))) {
        rep.errors.push_back("map " + pair_name + " is not total on sort " + sort);
        continue;
      }
      for (int e : jt->second)
        if (e < 0 || e >= mq.carrier_size(sort))
          rep.errors.push_back("map " + pair_name + " leaves the carrier of " + sort);
    }
    if (!rep.ok()) continue;
    auto apply = [&](const string& sort, int e) { return k.map_element(p, q, sort, e); };
    for (auto& rel : mp.signature.relations) {
      for (auto& tuple : mp.relations.at(rel.name)) {
        vector<int> image;
        for (size_t i = 0; i < tuple.size(); ++i)
          image.push_back(apply(rel.arg_sorts[i], tuple[i]));
        if (!mq.holds(rel.name, image))
          rep.errors.push_back("map " + pair_name + " does not preserve " + rel.name);
      }
    }
    for (auto& fn : mp.signature.functions) {
      for (auto& [args, value] : mp.functions.at(fn.name)) {
        vector<int> image;
        for (size_t i = 0; i < args.size(); ++i)
          image.push_back(apply(fn.arg_sorts[i], args[i]));
        if (mq.apply(fn.name, image) != apply(fn.result_sort, value))
          rep.errors.push_back("map " + pair_name + " does not commute with " + fn.name);
      }
    }
  }
  // Functoriality along composable pairs.
  for (auto& [p, q] : k.order)
    for (int r = 0; r < n; ++r) {
      if (!k.order.count({q, r})) continue;
      const Structure& mp = k.structures[static_cast<size_t>(p)];
      for (auto& sort : mp.signature.sorts)
        for (int e = 0; e < mp.carrier_size(sort); ++e) {
          int direct = k.map_element(p, r, sort, e);
          int composed = k.map_element(q, r, sort, k.map_element(p, q, sort, e));
          if (direct != composed)
            rep.errors.push_back("maps do not commute: " +
                                 k.nodes[static_cast<size_t>(p)] + "->" +
                                 k.nodes[static_cast<size_t>(q)] + "->" +
                                 k.nodes[static_cast<size_t>(r)]);
        }
    }
  if (!rep.ok()) return rep;

  // Every node structure must be well-determined for the theory's class.
  for (int i = 0; i < n; ++i) {
    auto wd = check_well_determined(k.structures[static_cast<size_t>(i)], t, max_positions);
    if (!wd.well_determined)
      rep.errors.push_back("node " + k.nodes[static_cast<size_t>(i)] +
                           " is not well-determined for class C");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Forcing

class Forcing {
 public:
  Forcing(const KripkeModel& k, int max_positions = kDefaultMaxPositions)
      : k_(k), max_positions_(max_positions) {}

  bool force(int p, const Formula& f, const Assignment& a) {
    Assignment restricted;
    for (auto& v : free_vars(f)) {
      auto it = a.find(v.name);
      if (it == a.end()) throw EvalError("missing assignment for " + v.name);
      restricted[v.name] = it->second;
    }
    string key = std::to_string(p) + "|" + print_formula(f) + "|";
    for (auto& [name, e] : restricted) key += name + "=" + std::to_string(e) + ",";
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    bool value = eval(p, f, restricted);
    memo_[key] = value;
    return value;
  }

  // Transport an assignment along p <= q, restricted to the given variables.
  Assignment transport(int p, int q, const vector<Var>& vars, const Assignment& a) const {
    Assignment out;
    for (auto& v : vars) out[v.name] = k_.map_element(p, q, v.sort, a.at(v.name));
    return out;
  }

 private:
  bool eval(int p, const Formula& f, const Assignment& a) {
    const Structure& m = k_.structures[static_cast<size_t>(p)];
    if (as<FormulaNode::Top>(f)) return true;
    if (as<FormulaNode::Bottom>(f)) return false;
    if (as<Atomic>(f) || as<Equal>(f)) return eval_tarski(m, f, a);
    if (auto* x = as<AndF>(f)) {
      for (auto& g : x->items)
        if (!force(p, g, a)) return false;
      return true;
    }
    if (auto* x = as<OrF>(f)) {
      for (auto& g : x->items)
        if (force(p, g, a)) return true;
      return false;
    }
    if (auto* x = as<ImpliesF>(f)) {
      auto fv_set = free_vars(f);
      vector<Var> fv(fv_set.begin(), fv_set.end());
      for (int q : k_.above(p)) {
        Assignment b = transport(p, q, fv, a);
        if (force(q, x->lhs, b) && !force(q, x->rhs, b)) return false;
      }
      return true;
    }
    if (auto* x = as<Quant>(f)) {
      if (x->exists) {
        bool found = false;
        for_each_assignment(m, x->vars,
                            [&](const Assignment& b) { found = found || force(p, x->body, b); },
                            a);
        return found;
      }
      auto fv_set = free_vars(f);
      vector<Var> fv(fv_set.begin(), fv_set.end());
      for (int q : k_.above(p)) {
        Assignment b = transport(p, q, fv, a);
        bool counter = false;
        for_each_assignment(k_.structures[static_cast<size_t>(q)], x->vars,
                            [&](const Assignment& c) { counter = counter || !force(q, x->body, c); },
                            b);
        if (counter) return false;
      }
      return true;
    }
    // Heterogeneous: the game is played in M_p; the payoff predicate at a
    // completed stage is "p forces the template at those elements", and
    // bounds are likewise forced at p.
    auto* h = as<HetF>(f);
    FormulaEval leaf = [this, p](const Formula& g, const Assignment& b) {
      return force(p, g, b);
    };
    if (!h->block.is_omega()) return eval_finite_het_game(m, *h, a, leaf);
    Arena ar = build_arena(m, *h, a, leaf, max_positions_);
    GameResult res = solve_game(ar);
    return res.win_exists[static_cast<size_t>(ar.initial)];
  }

  const KripkeModel& k_;
  int max_positions_;
  std::map<string, bool> memo_;
};

inline bool force(const KripkeModel& k, int p, const Formula& f, const Assignment& a,
                  int max_positions = kDefaultMaxPositions) {
  Forcing ctx(k, max_positions);
  return ctx.force(p, f, a);
}

// ---------------------------------------------------------------------------
// Text format:
//   node p; node q;
//   order p <= q;
//   structure p { carrier s = {..}; table R = {..}; fun c = {..}; }
//   map p -> q { s: {a -> b, ...}; }

inline KripkeModel parse_kripke(const string& src, const Signature& sig) {
  Parser ps = Parser::from_text(src, &sig);
  KripkeModel k;
  std::map<string, string> structure_texts;
  vector<std::pair<int, int>> declared_order;
  while (!ps.at_end()) {
    if (ps.accept_ident("node")) {
      k.nodes.push_back(ps.ident());
      ps.expect(";");
      continue;
    }
    if (ps.accept_ident("order")) {
      string a = ps.ident();
      ps.expect("<=");
      string b = ps.ident();
      ps.expect(";");
      int pa = k.node_index(a), pb = k.node_index(b);
      if (pa < 0 || pb < 0) ps.fail("unknown node in order declaration");
      declared_order.emplace_back(pa, pb);
      continue;
    }
    if (ps.accept_ident("structure")) {
      string name = ps.ident();
      int idx = k.node_index(name);
      if (idx < 0) ps.fail("unknown node " + name);
      ps.expect("{");
      // Collect the block and reparse it with the structure grammar.
      string text;
      int depth = 1;
      while (depth > 0) {
        if (ps.at_end()) ps.fail("unterminated structure block");
        const Token& tok = ps.peek();
        if (tok.kind == Token::Punct && tok.text == "{") ++depth;
        if (tok.kind == Token::Punct && tok.text == "}") {
          --depth;
          if (depth == 0) {
            ps.next();
            break;
          }
        }
        text += tok.text;
        text += " ";
        ps.next();
      }
      if (k.structures.size() < k.nodes.size()) k.structures.resize(k.nodes.size());
      k.structures[static_cast<size_t>(idx)] = parse_structure(text, sig);
      continue;
    }
    if (ps.accept_ident("map")) {
      string a = ps.ident();
      ps.expect("->");
      string b = ps.ident();
      int pa = k.node_index(a), pb = k.node_index(b);
      if (pa < 0 || pb < 0) ps.fail("unknown node in map declaration");
      if (k.structures.size() < k.nodes.size() ||
          k.structures[static_cast<size_t>(pa)].signature.sorts.empty() ||
          k.structures[static_cast<size_t>(pb)].signature.sorts.empty())
        ps.fail("maps must follow the structures they connect");
      const Structure& mp = k.structures[static_cast<size_t>(pa)];
      const Structure& mq = k.structures[static_cast<size_t>(pb)];
      std::map<string, vector<int>> table;
      ps.expect("{");
      while (!ps.accept("}")) {
        string sort = ps.ident();
        ps.expect(":");
        ps.expect("{");
        vector<int> row(static_cast<size_t>(mp.carrier_size(sort)), -1);
        if (!ps.accept("}")) {
          do {
            string from = ps.name_token();
            ps.expect("->");
            string to = ps.name_token();
            int fi = mp.element_index(sort, from);
            int ti = mq.element_index(sort, to);
            if (fi < 0 || ti < 0) ps.fail("unknown element in map");
            row[static_cast<size_t>(fi)] = ti;
          } while (ps.accept(","));
          ps.expect("}");
        }
        table[sort] = std::move(row);
        ps.accept(";");
      }
      k.maps[{pa, pb}] = std::move(table);
      continue;
    }
    ps.fail("unexpected statement '" + ps.peek().text + "'");
  }
  for (auto& [a, b] : declared_order) k.order.insert({a, b});
  // Transitive closure of the declared order.
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& [a, b] : vector<std::pair<int, int>>(k.order.begin(), k.order.end()))
      for (auto& [c, d] : vector<std::pair<int, int>>(k.order.begin(), k.order.end()))
        if (b == c && !k.order.count({a, d})) {
          k.order.insert({a, d});
          changed = true;
        }
  }
  // Compose missing maps along the closure when unambiguous.
  for (auto& [a, b] : k.order) {
    if (k.maps.count({a, b})) continue;
    for (int mid = 0; mid < static_cast<int>(k.nodes.size()); ++mid) {
      if (!k.order.count({a, mid}) || !k.order.count({mid, b})) continue;
      if (!k.maps.count({a, mid}) || !k.maps.count({mid, b})) continue;
      std::map<string, vector<int>> table;
      const Structure& mp = k.structures[static_cast<size_t>(a)];
      for (auto& sort : mp.signature.sorts) {
        vector<int> row;
        for (int e = 0; e < mp.carrier_size(sort); ++e)
          row.push_back(k.maps.at({mid, b}).at(sort).at(
              static_cast<size_t>(k.maps.at({a, mid}).at(sort).at(static_cast<size_t>(e)))));
        table[sort] = std::move(row);
      }
      k.maps[{a, b}] = std::move(table);
      break;
    }
  }
  return k;
}

inline void print_kripke(std::ostream& os, const KripkeModel& k) {
  for (auto& n : k.nodes) os << "node " << n << ";\n";
  for (auto& [p, q] : k.order)
    os << "order " << k.nodes[static_cast<size_t>(p)] << " <= "
       << k.nodes[static_cast<size_t>(q)] << ";\n";
  for (size_t i = 0; i < k.structures.size(); ++i) {
    os << "structure " << k.nodes[i] << " {\n";
    std::istringstream body(print_structure(k.structures[i]));
    string line;
    while (std::getline(body, line)) os << "  " << line << "\n";
    os << "}\n";
  }
  for (auto& [pq, table] : k.maps) {
    const Structure& mp = k.structures[static_cast<size_t>(pq.first)];
    const Structure& mq = k.structures[static_cast<size_t>(pq.second)];
    os << "map " << k.nodes[static_cast<size_t>(pq.first)] << " -> "
       << k.nodes[static_cast<size_t>(pq.second)] << " {";
    for (auto& sort : mp.signature.sorts) {
      os << " " << sort << ": {";
      auto it = table.find(sort);
      if (it != table.end())
        for (size_t e = 0; e < it->second.size(); ++e) {
          if (e) os << ", ";
          os << mp.element_name(sort, static_cast<int>(e)) << " -> "
             << mq.element_name(sort, it->second[e]);
        }
      os << "};";
    }
    os << " }\n";
  }
}

inline string print_kripke(const KripkeModel& k) {
  std::ostringstream os;
  print_kripke(os, k);
  return os.str();
}

}  // namespace hetlog
