#include "coalcheck/formula.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_set>

#include "coalcheck/hash.hpp"

namespace coalcheck {

namespace {

struct Key {
  FormulaKind kind;
  std::uint32_t var;
  std::optional<Predicate> predicate;
  std::uint32_t left;
  std::uint32_t right;

  bool operator==(const Key& o) const {
    return kind == o.kind && var == o.var && left == o.left && right == o.right && predicate == o.predicate;
  }
};

struct KeyHash {
  std::size_t operator()(const Key& k) const {
    std::size_t h = hash_mix(static_cast<std::size_t>(k.kind), k.var);
    h = hash_mix(h, k.predicate ? k.predicate->hash() : 0);
    h = hash_mix(h, k.left);
    return hash_mix(h, k.right);
  }
};

class Store {
 public:
  static Store& instance() {
    static Store store;
    return store;
  }

  FormulaId intern(FormulaNode n) {
    Key key{n.kind, n.var, n.predicate, n.left.value, n.right.value};
    {
      std::shared_lock lock(mu_);
      auto it = index_.find(key);
      if (it != index_.end()) return FormulaId{it->second};
    }
    std::unique_lock lock(mu_);
    auto it = index_.find(key);
    if (it != index_.end()) return FormulaId{it->second};
    auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(std::move(n));
    index_.emplace(std::move(key), id);
    return FormulaId{id};
  }

  const FormulaNode& get(FormulaId f) const {
    std::shared_lock lock(mu_);
    if (f.value >= nodes_.size()) throw std::out_of_range("unknown formula id");
    return nodes_[f.value];
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return nodes_.size();
  }

  template <class Map, class K>
  auto lookup(const Map& map, const K& k) const -> std::optional<typename Map::mapped_type> {
    std::shared_lock lock(mu_);
    auto it = map.find(k);
    if (it == map.end()) return std::nullopt;
    return it->second;
  }

  template <class Map, class K, class V>
  void remember(Map& map, const K& k, V v) {
    std::unique_lock lock(mu_);
    map.emplace(k, std::move(v));
  }

  std::unordered_map<std::uint32_t, Predicate> obs_cache;
  std::unordered_map<std::uint64_t, std::uint32_t> next_cache;
  std::unordered_map<std::uint32_t, std::uint32_t> unfold_cache;

 private:
  Store() = default;

  mutable std::shared_mutex mu_;
  std::deque<FormulaNode> nodes_;
  std::unordered_map<Key, std::uint32_t, KeyHash> index_;
};

Store& store() { return Store::instance(); }

std::vector<std::uint32_t> merge_unique(std::vector<std::uint32_t> a, const std::vector<std::uint32_t>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

FormulaId substitute(FormulaId f, std::uint32_t depth, FormulaId replacement,
                     std::unordered_map<std::uint64_t, FormulaId>& memo) {
  const FormulaNode& n = node(f);
  if (n.free_bound <= depth) return f;
  std::uint64_t key = (std::uint64_t{f.value} << 32) | depth;
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  FormulaId out;
  switch (n.kind) {
    case FormulaKind::Var:
      out = n.var == depth ? replacement : var(n.var > depth ? n.var - 1 : n.var);
      break;
    case FormulaKind::Box:
      out = box(*n.predicate, substitute(n.left, depth, replacement, memo));
      break;
    case FormulaKind::And:
      out = conj(substitute(n.left, depth, replacement, memo), substitute(n.right, depth, replacement, memo));
      break;
    case FormulaKind::Nu:
      out = nu(substitute(n.left, depth + 1, replacement, memo));
      break;
    default:
      out = f;
  }
  memo.emplace(key, out);
  return out;
}

void require_closed(FormulaId f, const char* what) {
  if (!is_closed(f)) throw std::invalid_argument(std::string(what) + " of a formula with free variables");
}

}  // namespace

FormulaId tt() {
  FormulaNode n;
  n.kind = FormulaKind::True;
  n.structural = hash_mix(0x71, 0);
  return store().intern(std::move(n));
}

FormulaId var(std::uint32_t index) {
  FormulaNode n;
  n.kind = FormulaKind::Var;
  n.var = index;
  n.free_bound = index + 1;
  n.unguarded = {index};
  n.structural = hash_mix(0x72, index);
  return store().intern(std::move(n));
}

FormulaId box(const Predicate& inputs, FormulaId body) {
  const FormulaNode& b = node(body);
  FormulaNode n;
  n.kind = FormulaKind::Box;
  n.predicate = inputs.is_universe() ? Predicate::universe() : inputs;
  n.left = body;
  n.free_bound = b.free_bound;
  n.structural = hash_mix(hash_mix(0x73, n.predicate->hash()), b.structural);
  return store().intern(std::move(n));
}

FormulaId atom(const Predicate& observations) {
  if (observations.is_universe()) return tt();
  FormulaNode n;
  n.kind = FormulaKind::Obs;
  n.predicate = observations;
  n.structural = hash_mix(0x74, observations.hash());
  return store().intern(std::move(n));
}

std::vector<FormulaId> conjuncts(FormulaId f) {
  std::vector<FormulaId> out;
  std::vector<FormulaId> stack{f};
  while (!stack.empty()) {
    FormulaId g = stack.back();
    stack.pop_back();
    const FormulaNode& n = node(g);
    if (n.kind == FormulaKind::And) {
      stack.push_back(n.right);
      stack.push_back(n.left);
    } else if (n.kind != FormulaKind::True) {
      out.push_back(g);
    }
  }
  return out;
}

bool structurally_less(FormulaId a, FormulaId b) {
  if (a == b) return false;
  auto sa = node(a).structural;
  auto sb = node(b).structural;
  return sa != sb ? sa < sb : a < b;
}

FormulaId conj(std::span<const FormulaId> parts) {
  std::vector<FormulaId> all;
  for (FormulaId p : parts) {
    auto cs = conjuncts(p);
    all.insert(all.end(), cs.begin(), cs.end());
  }
  std::sort(all.begin(), all.end(), structurally_less);
  all.erase(std::unique(all.begin(), all.end()), all.end());
  if (all.empty()) return tt();
  FormulaId acc = all[0];
  for (std::size_t i = 1; i < all.size(); ++i) {
    const FormulaNode& l = node(acc);
    const FormulaNode& r = node(all[i]);
    FormulaNode n;
    n.kind = FormulaKind::And;
    n.left = acc;
    n.right = all[i];
    n.free_bound = std::max(l.free_bound, r.free_bound);
    n.unguarded = merge_unique(l.unguarded, r.unguarded);
    n.structural = hash_mix(hash_mix(0x75, l.structural), r.structural);
    acc = store().intern(std::move(n));
  }
  return acc;
}

FormulaId conj(FormulaId a, FormulaId b) {
  FormulaId parts[] = {a, b};
  return conj(std::span<const FormulaId>(parts));
}

FormulaId nu(FormulaId body) {
  const FormulaNode& b = node(body);
  if (!b.unguarded.empty() && b.unguarded.front() == 0)
    throw std::invalid_argument("fixpoint variable occurs unguarded");
  FormulaNode n;
  n.kind = FormulaKind::Nu;
  n.left = body;
  n.free_bound = b.free_bound == 0 ? 0 : b.free_bound - 1;
  for (auto k : b.unguarded) n.unguarded.push_back(k - 1);
  n.structural = hash_mix(0x76, b.structural);
  return store().intern(std::move(n));
}

FormulaId always(FormulaId body) {
  require_closed(body, "always");
  return nu(conj(body, box(Predicate::universe(), var(0))));
}

const FormulaNode& node(FormulaId f) { return store().get(f); }

bool is_closed(FormulaId f) { return node(f).free_bound == 0; }

std::size_t store_size() { return store().size(); }

FormulaId unfold(FormulaId f) {
  const FormulaNode& n = node(f);
  if (n.kind != FormulaKind::Nu) return f;
  require_closed(f, "unfold");
  if (auto hit = store().lookup(store().unfold_cache, f.value)) return FormulaId{*hit};
  std::unordered_map<std::uint64_t, FormulaId> memo;
  FormulaId out = substitute(n.left, 0, f, memo);
  store().remember(store().unfold_cache, f.value, out.value);
  return out;
}

Predicate obs(FormulaId f) {
  if (auto hit = store().lookup(store().obs_cache, f.value)) return *hit;
  const FormulaNode& n = node(f);
  Predicate out = Predicate::universe();
  switch (n.kind) {
    case FormulaKind::True:
    case FormulaKind::Box:
      break;
    case FormulaKind::Obs:
      out = *n.predicate;
      break;
    case FormulaKind::And:
      out = intersect(obs(n.left), obs(n.right));
      break;
    case FormulaKind::Nu:
      out = obs(unfold(f));
      break;
    case FormulaKind::Var:
      throw std::invalid_argument("obs of a free variable");
  }
  store().remember(store().obs_cache, f.value, out);
  return out;
}

FormulaId next(FormulaId f, Input i) {
  std::uint64_t key = (std::uint64_t{f.value} << 32) | i;
  if (auto hit = store().lookup(store().next_cache, key)) return FormulaId{*hit};
  const FormulaNode& n = node(f);
  FormulaId out = tt();
  switch (n.kind) {
    case FormulaKind::True:
    case FormulaKind::Obs:
      break;
    case FormulaKind::Box:
      if (member(*n.predicate, Observation{static_cast<Value>(i)})) out = n.left;
      break;
    case FormulaKind::And:
      out = conj(next(n.left, i), next(n.right, i));
      break;
    case FormulaKind::Nu:
      out = next(unfold(f), i);
      break;
    case FormulaKind::Var:
      throw std::invalid_argument("next of a free variable");
  }
  store().remember(store().next_cache, key, out.value);
  return out;
}

std::vector<FormulaId> reachable(FormulaId f, std::size_t input_count) {
  require_closed(f, "reachable");
  std::vector<FormulaId> order{f};
  std::unordered_set<FormulaId> seen{f};
  for (std::size_t k = 0; k < order.size(); ++k) {
    for (Input i = 0; i < input_count; ++i) {
      FormulaId g = next(order[k], i);
      if (seen.insert(g).second) order.push_back(g);
    }
  }
  return order;
}

std::size_t size(FormulaId f, std::size_t input_count) { return reachable(f, input_count).size(); }

FormulaId map_formula(FormulaId f, const std::function<Predicate(const Predicate&)>& obs_map,
                      const std::function<Predicate(const Predicate&)>& input_map) {
  const FormulaNode& n = node(f);
  switch (n.kind) {
    case FormulaKind::True:
    case FormulaKind::Var:
      return f;
    case FormulaKind::Obs:
      return atom(obs_map(*n.predicate));
    case FormulaKind::Box:
      return box(input_map(*n.predicate), map_formula(n.left, obs_map, input_map));
    case FormulaKind::And:
      return conj(map_formula(n.left, obs_map, input_map), map_formula(n.right, obs_map, input_map));
    case FormulaKind::Nu:
      return nu(map_formula(n.left, obs_map, input_map));
  }
  return f;
}

// ---------------------------------------------------------------- implication

void Implication::add(FormulaId a, FormulaId b) {
  if (a == b || implies(a, b)) return;
  forward_[a].push_back(b);
  backward_[b].push_back(a);
  ++count_;
}

bool Implication::implies(FormulaId a, FormulaId b) const {
  if (a == b) return true;
  auto it = forward_.find(a);
  return it != forward_.end() && std::find(it->second.begin(), it->second.end(), b) != it->second.end();
}

const std::vector<FormulaId>& Implication::implied(FormulaId a) const {
  static const std::vector<FormulaId> none;
  if (forward_.empty()) return none;
  auto it = forward_.find(a);
  return it == forward_.end() ? none : it->second;
}

const std::vector<FormulaId>& Implication::implicants(FormulaId b) const {
  static const std::vector<FormulaId> none;
  if (backward_.empty()) return none;
  auto it = backward_.find(b);
  return it == backward_.end() ? none : it->second;
}

std::vector<std::pair<FormulaId, FormulaId>> Implication::pairs() const {
  std::vector<std::pair<FormulaId, FormulaId>> out;
  for (const auto& [a, bs] : forward_)
    for (FormulaId b : bs) out.emplace_back(a, b);
  std::sort(out.begin(), out.end());
  return out;
}

Implication formula_similarity(std::span<const FormulaId> roots, std::size_t input_count) {
  std::vector<FormulaId> nodes{tt()};
  std::unordered_set<FormulaId> seen{tt()};
  for (FormulaId r : roots) {
    for (FormulaId g : reachable(r, input_count)) {
      if (seen.insert(g).second) nodes.push_back(g);
    }
  }
  std::sort(nodes.begin(), nodes.end());
  std::set<std::pair<FormulaId, FormulaId>> rel;
  for (FormulaId a : nodes) {
    for (FormulaId b : nodes) {
      if (a != b && subset(obs(a), obs(b))) rel.emplace(a, b);
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = rel.begin(); it != rel.end();) {
      bool keep = true;
      for (Input i = 0; i < input_count && keep; ++i) {
        FormulaId na = next(it->first, i);
        FormulaId nb = next(it->second, i);
        keep = na == nb || rel.count({na, nb}) > 0;
      }
      if (keep) {
        ++it;
      } else {
        it = rel.erase(it);
        changed = true;
      }
    }
  }
  Implication out;
  for (const auto& [a, b] : rel) out.add(a, b);
  return out;
}

}  // namespace coalcheck
