#include "kmsgraph/paction.hpp"

#include <algorithm>
#include <map>

namespace kmsgraph {
namespace {

constexpr std::size_t kMaxReportedViolations = 20;

void check_edge_index(const WeightedGraph& g, std::size_t e) {
  if (e >= g.edges().size()) throw Error("letter references unknown edge index");
}

bool composable_path(const WeightedGraph& g, std::span<const std::size_t> p) {
  for (std::size_t j = 0; j + 1 < p.size(); ++j) {
    if (g.edges()[p[j]].dst != g.edges()[p[j + 1]].src) return false;
  }
  return true;
}

bool is_primitive(std::span<const std::size_t> cycle) {
  std::size_t n = cycle.size();
  for (std::size_t d = 1; d <= n / 2; ++d) {
    if (n % d != 0) continue;
    bool periodic = true;
    for (std::size_t i = d; i < n && periodic; ++i) periodic = cycle[i] == cycle[i - d];
    if (periodic) return false;
  }
  return true;
}

void canonicalize(const WeightedGraph& g, BoundaryPath& x) {
  if (!x.cycle.empty()) {
    std::size_t n = x.cycle.size();
    for (std::size_t d = 1; d <= n / 2; ++d) {
      if (n % d != 0) continue;
      bool periodic = true;
      for (std::size_t i = d; i < n && periodic; ++i) periodic = x.cycle[i] == x.cycle[i - d];
      if (periodic) {
        x.cycle.resize(d);
        break;
      }
    }
    // absorbing a shared last edge rotates the cycle one step to the right
    while (!x.prefix.empty() && x.prefix.back() == x.cycle.back()) {
      x.prefix.pop_back();
      x.cycle.insert(x.cycle.begin(), x.cycle.back());
      x.cycle.pop_back();
    }
  }
  if (!x.prefix.empty()) {
    x.base = g.edges()[x.prefix.front()].src;
  } else if (!x.cycle.empty()) {
    x.base = g.edges()[x.cycle.front()].src;
  }
}

std::string word_str(const WeightedGraph& g, const FreeWord& w) {
  if (w.empty()) return "1";
  std::string s;
  for (const Letter& l : w.letters) {
    if (!s.empty()) s += ' ';
    s += g.edges()[l.edge].id;
    if (l.inv) s += "^-1";
  }
  return s;
}

std::string path_str(const WeightedGraph& g, const BoundaryPath& x) {
  std::string s = g.vertex_id(x.base) + ":[";
  for (std::size_t i = 0; i < x.prefix.size(); ++i) {
    if (i) s += ' ';
    s += g.edges()[x.prefix[i]].id;
  }
  s += "]";
  if (!x.cycle.empty()) {
    s += "(";
    for (std::size_t i = 0; i < x.cycle.size(); ++i) {
      if (i) s += ' ';
      s += g.edges()[x.cycle[i]].id;
    }
    s += ")^inf";
  }
  return s;
}

bool starts_with(const BoundaryPath& x, std::span<const std::size_t> u) {
  if (x.finite() && u.size() > x.prefix.size()) return false;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (boundary_edge_at(x, i) != u[i]) return false;
  }
  return true;
}

bool domain_member(const WeightedGraph& g, const WordShape& s, const BoundaryPath& x) {
  switch (s.kind) {
    case WordShape::Kind::Identity:
      return true;
    case WordShape::Kind::Null:
      return false;
    case WordShape::Kind::PathWord:
      return x.base == g.edges()[s.out.back()].dst;
    case WordShape::Kind::InversePathWord:
    case WordShape::Kind::Transposition:
      return starts_with(x, s.in);
  }
  return false;
}

// u' extended by any boundary continuation lies in the word's domain
BoundaryPath domain_witness(const WeightedGraph& g, const WordShape& s) {
  switch (s.kind) {
    case WordShape::Kind::Identity:
      return boundary_witness_from(g, 0);
    case WordShape::Kind::PathWord:
      return boundary_witness_from(g, g.edges()[s.out.back()].dst);
    default: {
      BoundaryPath tail = boundary_witness_from(g, g.edges()[s.in.back()].dst);
      std::vector<std::size_t> prefix(s.in.begin(), s.in.end());
      prefix.insert(prefix.end(), tail.prefix.begin(), tail.prefix.end());
      return make_boundary_path(g, g.edges()[s.in.front()].src, std::move(prefix),
                                tail.cycle);
    }
  }
}

}  // namespace

FreeWord reduce(std::span<const Letter> letters) {
  FreeWord w;
  for (const Letter& l : letters) {
    if (!w.letters.empty() && w.letters.back().edge == l.edge &&
        w.letters.back().inv != l.inv) {
      w.letters.pop_back();
    } else {
      w.letters.push_back(l);
    }
  }
  return w;
}

FreeWord inverse(const FreeWord& w) {
  FreeWord r;
  r.letters.reserve(w.letters.size());
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) {
    r.letters.push_back(Letter{it->edge, !it->inv});
  }
  return r;
}

FreeWord concat(const FreeWord& w1, const FreeWord& w2) {
  std::vector<Letter> all = w1.letters;
  all.insert(all.end(), w2.letters.begin(), w2.letters.end());
  return reduce(all);
}

WordShape shape(const WeightedGraph& g, const FreeWord& w) {
  WordShape s;
  std::size_t i = 0;
  while (i < w.letters.size() && !w.letters[i].inv) {
    check_edge_index(g, w.letters[i].edge);
    s.out.push_back(w.letters[i++].edge);
  }
  std::vector<std::size_t> stripped;
  while (i < w.letters.size() && w.letters[i].inv) {
    check_edge_index(g, w.letters[i].edge);
    stripped.push_back(w.letters[i++].edge);
  }
  auto null_shape = [&] {
    s.kind = WordShape::Kind::Null;
    s.out.clear();
    s.in.clear();
    return s;
  };
  if (i != w.letters.size()) return null_shape();  // a positive after an inverse
  s.in.assign(stripped.rbegin(), stripped.rend());
  if (!composable_path(g, s.out) || !composable_path(g, s.in)) return null_shape();
  if (s.out.empty() && s.in.empty()) {
    s.kind = WordShape::Kind::Identity;
  } else if (s.in.empty()) {
    s.kind = WordShape::Kind::PathWord;
  } else if (s.out.empty()) {
    s.kind = WordShape::Kind::InversePathWord;
  } else if (g.edges()[s.out.back()].dst == g.edges()[s.in.back()].dst) {
    s.kind = WordShape::Kind::Transposition;
  } else {
    return null_shape();  // prepended and stripped paths end at different vertices
  }
  return s;
}

BoundaryPath make_boundary_path(const WeightedGraph& g, std::size_t base,
                                std::vector<std::size_t> prefix,
                                std::vector<std::size_t> cycle) {
  if (base >= g.vertex_count()) throw Error("boundary path: base vertex out of range");
  for (std::size_t e : prefix) check_edge_index(g, e);
  for (std::size_t e : cycle) check_edge_index(g, e);
  if (!composable_path(g, prefix)) throw Error("boundary path: prefix does not compose");
  if (!prefix.empty() && g.edges()[prefix.front()].src != base) {
    throw Error("boundary path: base does not match the prefix source");
  }
  std::size_t junction = prefix.empty() ? base : g.edges()[prefix.back()].dst;
  if (cycle.empty()) {
    if (g.is_relative(junction)) {
      throw Error("boundary path: finite path ends at relative vertex " +
                  g.vertex_id(junction));
    }
  } else {
    if (!composable_path(g, cycle)) throw Error("boundary path: cycle does not compose");
    if (g.edges()[cycle.back()].dst != g.edges()[cycle.front()].src) {
      throw Error("boundary path: cycle does not close");
    }
    if (g.edges()[cycle.front()].src != junction) {
      throw Error("boundary path: cycle does not attach to the prefix");
    }
  }
  BoundaryPath x{base, std::move(prefix), std::move(cycle)};
  canonicalize(g, x);
  return x;
}

std::size_t boundary_edge_at(const BoundaryPath& x, std::size_t i) {
  if (i < x.prefix.size()) return x.prefix[i];
  if (x.cycle.empty()) throw Error("boundary path: edge index past the end of a finite path");
  return x.cycle[(i - x.prefix.size()) % x.cycle.size()];
}

namespace {

// One letter of apply(): prepend a positive edge or strip a leading inverse.
// Leaves the representation as the step produces it; callers canonicalize.
bool letter_step(const WeightedGraph& g, Letter l, BoundaryPath& cur) {
  check_edge_index(g, l.edge);
  const Edge& e = g.edges()[l.edge];
  if (!l.inv) {
    if (e.dst != cur.base) return false;
    cur.prefix.insert(cur.prefix.begin(), l.edge);
    cur.base = e.src;
  } else {
    std::size_t first;
    if (!cur.prefix.empty()) {
      first = cur.prefix.front();
    } else if (!cur.cycle.empty()) {
      first = cur.cycle.front();
    } else {
      return false;  // a bare vertex has no edge to strip
    }
    if (first != l.edge) return false;
    if (!cur.prefix.empty()) {
      cur.prefix.erase(cur.prefix.begin());
    } else {
      cur.cycle.push_back(cur.cycle.front());
      cur.cycle.erase(cur.cycle.begin());
    }
    cur.base = e.dst;
  }
  return true;
}

}  // namespace

std::optional<BoundaryPath> apply(const WeightedGraph& g, const FreeWord& w,
                                  const BoundaryPath& x) {
  BoundaryPath cur = x;
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) {
    if (!letter_step(g, *it, cur)) return std::nullopt;
  }
  canonicalize(g, cur);
  return cur;
}

std::vector<BoundaryPath> enumerate_boundary_paths(const WeightedGraph& g,
                                                   std::size_t max_prefix,
                                                   std::size_t max_cycle) {
  std::vector<BoundaryPath> out;

  // finite paths, grown forward from every source vertex
  std::vector<std::size_t> path;
  auto grow_finite = [&](auto&& self, std::size_t base, std::size_t at) -> void {
    if (!g.is_relative(at)) out.push_back(BoundaryPath{base, path, {}});
    if (path.size() == max_prefix) return;
    for (std::size_t e : g.out_edges(at)) {
      path.push_back(e);
      self(self, base, g.edges()[e].dst);
      path.pop_back();
    }
  };
  for (std::size_t v = 0; v < g.vertex_count(); ++v) grow_finite(grow_finite, v, v);

  // eventually periodic paths: primitive closed runs plus unabsorbed prefixes
  std::vector<std::vector<std::size_t>> cycles;
  auto grow_cycle = [&](auto&& self, std::size_t base, std::size_t at) -> void {
    if (path.size() == max_cycle) return;
    for (std::size_t e : g.out_edges(at)) {
      path.push_back(e);
      if (g.edges()[e].dst == base && is_primitive(path)) cycles.push_back(path);
      self(self, base, g.edges()[e].dst);
      path.pop_back();
    }
  };
  for (std::size_t v = 0; v < g.vertex_count(); ++v) grow_cycle(grow_cycle, v, v);

  for (const auto& cyc : cycles) {
    std::size_t head = g.edges()[cyc.front()].src;
    std::vector<std::size_t> pre;
    auto grow_prefix = [&](auto&& self, std::size_t at) -> void {
      if (pre.empty() || pre.front() != cyc.back()) {
        std::vector<std::size_t> prefix(pre.rbegin(), pre.rend());
        std::size_t base = prefix.empty() ? head : g.edges()[prefix.front()].src;
        out.push_back(make_boundary_path(g, base, std::move(prefix), cyc));
      }
      if (pre.size() == max_prefix) return;
      for (std::size_t e : g.in_edges(at)) {
        pre.push_back(e);
        self(self, g.edges()[e].src);
        pre.pop_back();
      }
    };
    grow_prefix(grow_prefix, head);
  }
  return out;
}

BoundaryPath boundary_witness_from(const WeightedGraph& g, std::size_t v) {
  if (v >= g.vertex_count()) throw Error("boundary witness: vertex out of range");
  std::vector<std::size_t> walk;
  std::vector<std::size_t> seen(g.vertex_count(), SIZE_MAX);
  std::size_t cur = v;
  while (true) {
    if (g.out_edges(cur).empty()) {
      return make_boundary_path(g, v, std::move(walk), {});  // sinks are never relative
    }
    if (seen[cur] != SIZE_MAX) {
      std::vector<std::size_t> cycle(walk.begin() + seen[cur], walk.end());
      walk.resize(seen[cur]);
      return make_boundary_path(g, v, std::move(walk), std::move(cycle));
    }
    seen[cur] = walk.size();
    std::size_t e = g.out_edges(cur).front();
    walk.push_back(e);
    cur = g.edges()[e].dst;
  }
}

ActionAxiomReport run_action_axioms(const WeightedGraph& g, std::size_t max_word,
                                    std::size_t max_prefix, std::size_t max_cycle) {
  ActionAxiomReport rep;
  auto note = [&](std::string msg) {
    if (rep.violations.size() < kMaxReportedViolations) rep.violations.push_back(std::move(msg));
  };

  std::vector<BoundaryPath> paths = enumerate_boundary_paths(g, max_prefix, max_cycle);
  rep.paths = paths.size();

  // Reduced words grown by prepending letters. Words act right to left, so
  // all words sharing a suffix share their first evaluation steps; kids turns
  // the list into that suffix trie and parent inverts it.
  std::vector<FreeWord> words{FreeWord{}};
  std::vector<std::vector<std::pair<Letter, std::size_t>>> kids(1);
  std::vector<std::size_t> parent{0};
  std::vector<std::size_t> upto(max_word + 1, 1);  // one past the last word of each length
  std::size_t frontier_begin = 0;
  for (std::size_t len = 1; len <= max_word; ++len) {
    std::size_t frontier_end = words.size();
    for (std::size_t i = frontier_begin; i < frontier_end; ++i) {
      for (std::size_t e = 0; e < g.edges().size(); ++e) {
        for (bool inv : {false, true}) {
          const FreeWord& w = words[i];
          if (!w.letters.empty() && w.letters.front().edge == e &&
              w.letters.front().inv != inv) {
            continue;  // prepending would cancel
          }
          FreeWord w2;
          w2.letters.reserve(w.length() + 1);
          w2.letters.push_back(Letter{e, inv});
          w2.letters.insert(w2.letters.end(), w.letters.begin(), w.letters.end());
          kids[i].emplace_back(Letter{e, inv}, words.size());
          parent.push_back(i);
          words.push_back(std::move(w2));
          kids.emplace_back();
        }
      }
    }
    frontier_begin = frontier_end;
    upto[len] = words.size();
  }
  rep.words = words.size();

  // phi_w(x) for every word at once: one trie walk per path, a subtree
  // abandoned the moment its next letter fails, intermediates kept exactly as
  // apply() would hold them and only the recorded snapshots canonicalized.
  std::vector<std::vector<std::pair<std::size_t, BoundaryPath>>> defined(words.size());
  auto sweep = [&](auto&& self, std::size_t node, const BoundaryPath& cur,
                   std::size_t j) -> void {
    BoundaryPath snap = cur;
    canonicalize(g, snap);
    defined[node].emplace_back(j, std::move(snap));
    for (const auto& [l, child] : kids[node]) {
      BoundaryPath next = cur;
      if (letter_step(g, l, next)) self(self, child, next, j);
    }
  };
  for (std::size_t j = 0; j < paths.size(); ++j) sweep(sweep, 0, paths[j], j);

  // Paths indexed by base vertex and by leading edge runs: the domains that
  // shapes can describe, for comparison against the walk's defined sets.
  std::vector<std::vector<std::size_t>> by_base(g.vertex_count());
  std::map<std::vector<std::size_t>, std::vector<std::size_t>> by_lead;
  std::vector<std::size_t> all_paths(paths.size());
  for (std::size_t j = 0; j < paths.size(); ++j) {
    all_paths[j] = j;
    by_base[paths[j].base].push_back(j);
    std::vector<std::size_t> lead;
    for (std::size_t d = 0; d < max_word; ++d) {
      if (paths[j].finite() && d >= paths[j].prefix.size()) break;
      lead.push_back(boundary_edge_at(paths[j], d));
      by_lead[lead].push_back(j);
    }
  }
  static const std::vector<std::size_t> kNoPaths;
  auto domain_list = [&](const WordShape& s) -> const std::vector<std::size_t>& {
    switch (s.kind) {
      case WordShape::Kind::Identity: return all_paths;
      case WordShape::Kind::Null: return kNoPaths;
      case WordShape::Kind::PathWord: return by_base[g.edges()[s.out.back()].dst];
      default: {
        auto it = by_lead.find(s.in);
        return it == by_lead.end() ? kNoPaths : it->second;
      }
    }
  };

  // apply/shape agreement: the walk's defined set must equal the shape's domain
  std::vector<WordShape> shapes(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    shapes[i] = shape(g, words[i]);
    switch (shapes[i].kind) {
      case WordShape::Kind::Identity: ++rep.shape_identity; break;
      case WordShape::Kind::PathWord: ++rep.shape_path; break;
      case WordShape::Kind::InversePathWord: ++rep.shape_inverse; break;
      case WordShape::Kind::Transposition: ++rep.shape_transposition; break;
      case WordShape::Kind::Null: ++rep.shape_null; break;
    }
    const std::vector<std::size_t>& dom = domain_list(shapes[i]);
    std::size_t a = 0, b = 0;
    while (a < defined[i].size() || b < dom.size()) {
      std::size_t ja = a < defined[i].size() ? defined[i][a].first : SIZE_MAX;
      std::size_t jb = b < dom.size() ? dom[b] : SIZE_MAX;
      if (ja == jb) {
        ++a;
        ++b;
        continue;
      }
      note("shape/apply disagree: word " + word_str(g, words[i]) + " at " +
           path_str(g, paths[std::min(ja, jb)]));
      ja < jb ? ++a : ++b;
    }
    if (shapes[i].kind != WordShape::Kind::Null && g.vertex_count() > 0) {
      if (!apply(g, words[i], domain_witness(g, shapes[i]))) {
        note("non-Null word undefined on its domain witness: " + word_str(g, words[i]));
      }
    }
  }

  // involution
  for (std::size_t i = 0; i < words.size(); ++i) {
    FreeWord winv = inverse(words[i]);
    for (const auto& [j, y] : defined[i]) {
      ++rep.involution_checked;
      std::optional<BoundaryPath> back = apply(g, winv, y);
      if (!back || !(*back == paths[j])) {
        note("involution fails: word " + word_str(g, words[i]) + " at " +
             path_str(g, paths[j]));
      }
    }
  }

  auto image_of = [&](std::size_t i, std::size_t j) -> const BoundaryPath* {
    const auto& d = defined[i];
    auto it = std::lower_bound(d.begin(), d.end(), j,
                               [](const auto& p, std::size_t jj) { return p.first < jj; });
    return (it != d.end() && it->first == j) ? &it->second : nullptr;
  };
  // index of reduce(l w) for an already reduced w of non-maximal length
  auto prepend_index = [&](std::size_t ip, Letter l) -> std::size_t {
    const FreeWord& w = words[ip];
    if (!w.letters.empty() && w.letters.front().edge == l.edge &&
        w.letters.front().inv != l.inv) {
      return parent[ip];
    }
    for (const auto& [kl, child] : kids[ip]) {
      if (kl == l) return child;
    }
    throw Error("word index missing in composition sweep");
  };

  // semi-saturation over no-cancellation pairs without length overflow
  for (std::size_t i1 = 0; i1 < words.size(); ++i1) {
    std::size_t budget = max_word - words[i1].length();
    for (std::size_t i2 = 0; i2 < upto[budget]; ++i2) {
      std::size_t total = words[i1].length() + words[i2].length();
      if (total == 0) continue;
      const auto& l1 = words[i1].letters;
      const auto& l2 = words[i2].letters;
      if (!l1.empty() && !l2.empty() && l1.back().edge == l2.front().edge &&
          l1.back().inv != l2.front().inv) {
        continue;  // the product reduces; only its composites are constrained
      }
      std::size_t ip = i2;
      for (auto it = l1.rbegin(); it != l1.rend(); ++it) ip = prepend_index(ip, *it);
      ++rep.semisaturation_checked;
      for (const auto& pr : defined[ip]) {
        if (!image_of(i2, pr.first)) {
          note("semi-saturation fails: domain of " + word_str(g, words[ip]) +
               " leaves domain of " + word_str(g, words[i2]) + " at " +
               path_str(g, paths[pr.first]));
        }
      }
    }
  }

  // composition: walk phi_{w1} over the trie from each image of each w2, the
  // product index maintained by prepending w1's letters one at a time
  for (std::size_t i2 = 0; i2 < words.size(); ++i2) {
    if (defined[i2].empty()) continue;
    std::size_t budget = max_word - words[i2].length();
    for (const auto& [j, y] : defined[i2]) {
      auto walk = [&](auto&& self, std::size_t node, std::size_t ip,
                      const BoundaryPath& cur) -> void {
        if (node != 0 || i2 != 0) {
          ++rep.composition_checked;
          BoundaryPath z = cur;
          canonicalize(g, z);
          const BoundaryPath* via = image_of(ip, j);
          if (!via || !(*via == z)) {
            note("composition fails: " + word_str(g, words[node]) + " after " +
                 word_str(g, words[i2]) + " at " + path_str(g, paths[j]));
          }
        }
        if (words[node].length() == budget) return;
        for (const auto& [l, child] : kids[node]) {
          BoundaryPath next = cur;
          if (letter_step(g, l, next)) self(self, child, prepend_index(ip, l), next);
        }
      };
      walk(walk, 0, i2, y);
    }
  }

  // orthogonality: at most one edge-inverse is defined anywhere
  for (const BoundaryPath& x : paths) {
    ++rep.orthogonality_checked;
    std::size_t hits = 0;
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
      FreeWord w{{Letter{e, true}}};
      if (apply(g, w, x)) ++hits;
    }
    if (hits > 1) note("orthogonality fails at " + path_str(g, x));
  }

  return rep;
}

}  // namespace kmsgraph
