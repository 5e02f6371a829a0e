#include "coalcheck/predicate.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <span>

#include "coalcheck/hash.hpp"

namespace coalcheck {

namespace {

constexpr std::size_t kMaxTerms = 4096;
constexpr std::uint64_t kMaxEnumeration = std::uint64_t{1} << 20;

std::string describe(const SpacePtr& s) { return s ? s->name() : std::string("<any>"); }

Value parse_integer(std::string_view text) {
  Value v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
  return v;
}

Value pow10(int n) {
  Value r = 1;
  for (int i = 0; i < n; ++i) r *= 10;
  return r;
}

Value floor_div(Value a, Value b) {
  Value q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

Value ceil_div(Value a, Value b) { return -floor_div(-a, b); }

}  // namespace

void normalize(ObservationSet& set) {
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
}

// ---------------------------------------------------------------- spaces

SpacePtr ObservationSpace::enumerated(std::string name, Value lo, Value hi, int pad_width) {
  if (lo > hi) throw std::invalid_argument("empty enumerated space " + name);
  auto s = std::shared_ptr<ObservationSpace>(new ObservationSpace());
  s->kind_ = Kind::Enumerated;
  s->name_ = std::move(name);
  s->lo_ = lo;
  s->hi_ = hi;
  s->pad_width_ = pad_width;
  return s;
}

SpacePtr ObservationSpace::labelled(std::string name, std::vector<std::string> labels) {
  if (labels.empty()) throw std::invalid_argument("empty labelled space " + name);
  auto s = std::shared_ptr<ObservationSpace>(new ObservationSpace());
  s->kind_ = Kind::Enumerated;
  s->name_ = std::move(name);
  s->lo_ = 0;
  s->hi_ = static_cast<Value>(labels.size()) - 1;
  s->labels_ = std::move(labels);
  return s;
}

SpacePtr ObservationSpace::scaled(std::string name, Value lo, Value hi, int decimals) {
  if (lo > hi) throw std::invalid_argument("empty scaled space " + name);
  if (decimals < 0 || decimals > 9) throw std::invalid_argument("unsupported quantum for " + name);
  auto s = std::shared_ptr<ObservationSpace>(new ObservationSpace());
  s->kind_ = Kind::Scaled;
  s->name_ = std::move(name);
  s->lo_ = lo;
  s->hi_ = hi;
  s->decimals_ = decimals;
  return s;
}

SpacePtr ObservationSpace::boolean(std::string name) {
  auto s = std::shared_ptr<ObservationSpace>(new ObservationSpace());
  s->kind_ = Kind::Boolean;
  s->name_ = std::move(name);
  s->lo_ = 0;
  s->hi_ = 1;
  return s;
}

SpacePtr ObservationSpace::product(std::string name, std::vector<SpacePtr> components) {
  if (components.size() < 2) throw std::invalid_argument("product space needs two components");
  for (const auto& c : components) {
    if (!c || !c->is_scalar()) throw std::invalid_argument("product components must be scalar spaces");
  }
  auto s = std::shared_ptr<ObservationSpace>(new ObservationSpace());
  s->kind_ = Kind::Product;
  s->name_ = std::move(name);
  s->components_ = std::move(components);
  return s;
}

std::optional<std::size_t> ObservationSpace::component_index(std::string_view name) const {
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (components_[i]->name() == name) return i;
  }
  return std::nullopt;
}

std::uint64_t ObservationSpace::cardinality() const {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  if (is_scalar()) {
    auto n = static_cast<std::uint64_t>(hi_ - lo_);
    return n == kMax ? kMax : n + 1;
  }
  std::uint64_t total = 1;
  for (const auto& c : components_) {
    std::uint64_t n = c->cardinality();
    if (n != 0 && total > kMax / n) return kMax;
    total *= n;
  }
  return total;
}

bool ObservationSpace::contains(const Observation& o) const {
  if (is_scalar()) return o.size() == 1 && o[0] >= lo_ && o[0] <= hi_;
  if (o.size() != components_.size()) return false;
  for (std::size_t i = 0; i < o.size(); ++i) {
    if (o[i] < components_[i]->lo() || o[i] > components_[i]->hi()) return false;
  }
  return true;
}

std::string ObservationSpace::format(Value v) const {
  switch (kind_) {
    case Kind::Boolean:
      return v ? "true" : "false";
    case Kind::Scaled: {
      Value unit = pow10(decimals_);
      bool negative = v < 0;
      Value mag = negative ? -v : v;
      std::string out = (negative ? "-" : "") + std::to_string(mag / unit);
      Value frac = mag % unit;
      if (frac != 0) {
        std::string digits = std::to_string(frac);
        digits.insert(0, static_cast<std::size_t>(decimals_) - digits.size(), '0');
        while (!digits.empty() && digits.back() == '0') digits.pop_back();
        out += "." + digits;
      }
      return out;
    }
    case Kind::Enumerated: {
      if (!labels_.empty() && v >= lo_ && v <= hi_) return labels_[static_cast<std::size_t>(v - lo_)];
      std::string digits = std::to_string(v < 0 ? -v : v);
      if (static_cast<int>(digits.size()) < pad_width_)
        digits.insert(0, static_cast<std::size_t>(pad_width_) - digits.size(), '0');
      return (v < 0 ? "-" : "") + digits;
    }
    case Kind::Product:
      break;
  }
  throw std::invalid_argument("format of a scalar value on product space " + name_);
}

Value ObservationSpace::parse_value(std::string_view text) const {
  Value v = parse_bound(text);
  if (v < lo_ || v > hi_)
    throw std::invalid_argument("value '" + std::string(text) + "' outside space " + name_);
  return v;
}

Value ObservationSpace::parse_bound(std::string_view text) const {
  Value v = 0;
  switch (kind_) {
    case Kind::Boolean:
      if (text == "true" || text == "1") v = 1;
      else if (text == "false" || text == "0") v = 0;
      else throw std::invalid_argument("not a boolean: '" + std::string(text) + "'");
      break;
    case Kind::Scaled: {
      bool negative = !text.empty() && text.front() == '-';
      std::string_view body = negative ? text.substr(1) : text;
      auto dot = body.find('.');
      std::string_view whole = body.substr(0, dot);
      std::string_view frac = dot == std::string_view::npos ? std::string_view() : body.substr(dot + 1);
      if (whole.empty() || (dot != std::string_view::npos && frac.empty()))
        throw std::invalid_argument("not a decimal: '" + std::string(text) + "'");
      if (static_cast<int>(frac.size()) > decimals_) {
        auto extra = frac.substr(static_cast<std::size_t>(decimals_));
        if (extra.find_first_not_of('0') != std::string_view::npos)
          throw std::invalid_argument("'" + std::string(text) + "' is not a multiple of the quantum of " + name_);
        frac = frac.substr(0, static_cast<std::size_t>(decimals_));
      }
      Value f = frac.empty() ? 0 : parse_integer(frac) * pow10(decimals_ - static_cast<int>(frac.size()));
      v = parse_integer(whole) * pow10(decimals_) + f;
      if (negative) v = -v;
      break;
    }
    case Kind::Enumerated: {
      auto it = std::find(labels_.begin(), labels_.end(), text);
      v = it != labels_.end() ? lo_ + (it - labels_.begin()) : parse_integer(text);
      break;
    }
    case Kind::Product:
      throw std::invalid_argument("scalar value for product space " + name_);
  }
  return v;
}

std::string ObservationSpace::format(const Observation& o) const {
  if (is_scalar()) return format(o.at(0));
  std::string out = "(";
  for (std::size_t i = 0; i < o.size(); ++i) {
    if (i) out += ", ";
    out += components_.at(i)->format(o[i]);
  }
  return out + ")";
}

bool same_space(const SpacePtr& a, const SpacePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind() != b->kind() || a->name() != b->name() || a->lo() != b->lo() || a->hi() != b->hi() ||
      a->decimals() != b->decimals() || a->components().size() != b->components().size())
    return false;
  for (std::size_t i = 0; i < a->components().size(); ++i) {
    if (!same_space(a->component(i), b->component(i))) return false;
  }
  return true;
}

// ---------------------------------------------------------------- nodes

struct Predicate::Node {
  Kind kind = Kind::Empty;
  SpacePtr space;
  ObservationSet values;
  Value lo = 0;
  Value hi = 0;
  std::vector<Predicate> parts;
  std::size_t target = 0;
  std::size_t source = 0;
  Value factor = 0;
  std::size_t hash = 0;
};

Predicate make_predicate(Predicate::Node node) {
  std::size_t h = hash_mix(static_cast<std::size_t>(node.kind), node.space ? std::hash<std::string>{}(node.space->name()) : 0);
  for (const auto& v : node.values) h = hash_mix(h, StateHash<Observation>{}(v));
  h = hash_mix(h, static_cast<std::size_t>(node.lo));
  h = hash_mix(h, static_cast<std::size_t>(node.hi));
  for (const auto& p : node.parts) h = hash_mix(h, p.hash());
  h = hash_mix(h, node.target);
  h = hash_mix(h, node.source);
  h = hash_mix(h, static_cast<std::size_t>(node.factor));
  node.hash = h;
  return Predicate(std::make_shared<const Predicate::Node>(std::move(node)));
}

namespace {

Predicate::Node bare(Predicate::Kind kind, SpacePtr space) {
  Predicate::Node n;
  n.kind = kind;
  n.space = std::move(space);
  return n;
}

SpacePtr common_space(const Predicate& p, const Predicate& q) {
  if (!p.space()) return q.space();
  if (!q.space()) return p.space();
  if (!same_space(p.space(), q.space()))
    throw SpaceMismatch("predicates over different spaces: " + describe(p.space()) + " and " + describe(q.space()));
  return p.space();
}

Predicate with_space(const Predicate& p, const SpacePtr& space) {
  if (p.space() || !space) return p;
  return p.is_universe() ? Predicate::universe(space) : Predicate::empty(space);
}

}  // namespace

Predicate Predicate::empty(SpacePtr space) { return make_predicate(bare(Kind::Empty, std::move(space))); }

Predicate Predicate::universe(SpacePtr space) { return make_predicate(bare(Kind::Universe, std::move(space))); }

Predicate Predicate::finite_set(SpacePtr space, ObservationSet values) {
  if (!space) throw std::invalid_argument("finite set needs a space");
  for (const auto& v : values) {
    if (!space->contains(v)) throw std::invalid_argument("value outside space " + space->name());
  }
  normalize(values);
  if (values.empty()) return empty(space);
  if (values.size() == space->cardinality()) return universe(space);
  auto n = bare(Kind::FiniteSet, std::move(space));
  n.values = std::move(values);
  return make_predicate(std::move(n));
}

Predicate Predicate::singleton(SpacePtr space, Observation value) {
  return finite_set(std::move(space), ObservationSet{std::move(value)});
}

Predicate Predicate::interval(SpacePtr space, Value lo, Value hi) {
  if (!space || !space->is_scalar()) throw std::invalid_argument("interval needs a scalar space");
  if (lo > hi) throw std::invalid_argument("interval with lo > hi");
  if (lo < space->lo() || hi > space->hi())
    throw std::invalid_argument("interval outside space " + space->name());
  if (lo == space->lo() && hi == space->hi()) return universe(space);
  auto n = bare(Kind::Interval, std::move(space));
  n.lo = lo;
  n.hi = hi;
  return make_predicate(std::move(n));
}

Predicate Predicate::product(SpacePtr space, std::vector<Predicate> parts) {
  if (!space || space->is_scalar()) throw std::invalid_argument("product needs a product space");
  if (parts.size() != space->arity())
    throw std::invalid_argument("product arity does not match space " + space->name());
  bool all_universe = true;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& comp = space->component(i);
    if (parts[i].space() && !same_space(parts[i].space(), comp))
      throw SpaceMismatch("product part " + std::to_string(i) + " not over component " + comp->name());
    parts[i] = with_space(parts[i], comp);
    if (is_empty(parts[i])) return empty(space);
    all_universe = all_universe && parts[i].is_universe();
  }
  if (all_universe) return universe(space);
  auto n = bare(Kind::Product, std::move(space));
  n.parts = std::move(parts);
  return make_predicate(std::move(n));
}

Predicate Predicate::linear(SpacePtr space, std::size_t target, Value factor, std::size_t source) {
  if (!space || space->is_scalar()) throw std::invalid_argument("linear relation needs a product space");
  if (target >= space->arity() || source >= space->arity() || target == source)
    throw std::invalid_argument("bad linear relation components");
  auto n = bare(Kind::Linear, std::move(space));
  n.target = target;
  n.source = source;
  n.factor = factor;
  return make_predicate(std::move(n));
}

Predicate::Kind Predicate::kind() const { return node_->kind; }
const SpacePtr& Predicate::space() const { return node_->space; }
const ObservationSet& Predicate::values() const { return node_->values; }
Value Predicate::lo() const { return node_->lo; }
Value Predicate::hi() const { return node_->hi; }
const std::vector<Predicate>& Predicate::parts() const { return node_->parts; }
const Predicate& Predicate::inner() const { return node_->parts.at(0); }
std::size_t Predicate::target() const { return node_->target; }
std::size_t Predicate::source() const { return node_->source; }
Value Predicate::factor() const { return node_->factor; }
std::size_t Predicate::hash() const { return node_->hash; }

bool operator==(const Predicate& a, const Predicate& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  return x.hash == y.hash && x.kind == y.kind && same_space(x.space, y.space) && x.lo == y.lo && x.hi == y.hi &&
         x.target == y.target && x.source == y.source && x.factor == y.factor && x.values == y.values &&
         x.parts == y.parts;
}

// ---------------------------------------------------------------- membership

namespace {

bool member_at(const Predicate& p, std::span<const Value> o) {
  switch (p.kind()) {
    case Predicate::Kind::Empty:
      return false;
    case Predicate::Kind::Universe:
      return true;
    case Predicate::Kind::FiniteSet: {
      const auto& vs = p.values();
      auto less = [](const Observation& a, std::span<const Value> b) {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
      };
      auto it = std::lower_bound(vs.begin(), vs.end(), o, less);
      return it != vs.end() && std::equal(it->begin(), it->end(), o.begin(), o.end());
    }
    case Predicate::Kind::Interval:
      return o[0] >= p.lo() && o[0] <= p.hi();
    case Predicate::Kind::Complement:
      return !member_at(p.inner(), o);
    case Predicate::Kind::Product:
      for (std::size_t i = 0; i < p.parts().size(); ++i) {
        if (!member_at(p.parts()[i], o.subspan(i, 1))) return false;
      }
      return true;
    case Predicate::Kind::Intersection:
      for (const auto& q : p.parts()) {
        if (!member_at(q, o)) return false;
      }
      return true;
    case Predicate::Kind::Linear:
      return o[p.target()] == p.factor() * o[p.source()];
  }
  return false;
}

// ---------------------------------------------------------------- interval sets

IntervalSet iv_intersect(const IntervalSet& a, const IntervalSet& b) {
  IntervalSet out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    Value lo = std::max(a[i].first, b[j].first);
    Value hi = std::min(a[i].second, b[j].second);
    if (lo <= hi) out.emplace_back(lo, hi);
    if (a[i].second < b[j].second) ++i;
    else ++j;
  }
  return out;
}

IntervalSet iv_complement(const IntervalSet& a, Value lo, Value hi) {
  IntervalSet out;
  Value next = lo;
  for (const auto& [l, h] : a) {
    if (l > next) out.emplace_back(next, l - 1);
    next = h + 1;
  }
  if (next <= hi && (a.empty() || a.back().second < hi)) out.emplace_back(next, hi);
  return out;
}

bool iv_subset(const IntervalSet& a, const IntervalSet& b) { return iv_intersect(a, b) == a; }

std::uint64_t iv_count(const IntervalSet& a) {
  std::uint64_t n = 0;
  for (const auto& [l, h] : a) n += static_cast<std::uint64_t>(h - l) + 1;
  return n;
}

IntervalSet full_range(const ObservationSpace& s) { return {{s.lo(), s.hi()}}; }

// ---------------------------------------------------------------- product DNF

struct Rel {
  std::size_t target;
  std::size_t source;
  Value factor;
  bool operator==(const Rel&) const = default;
};

struct Term {
  std::vector<IntervalSet> box;
  std::vector<Rel> pos;
  std::vector<Rel> neg;
};

using Dnf = std::vector<Term>;

Term full_term(const ObservationSpace& s) {
  Term t;
  for (const auto& c : s.components()) t.box.push_back(full_range(*c));
  return t;
}

bool box_empty(const Term& t) {
  return std::any_of(t.box.begin(), t.box.end(), [](const IntervalSet& s) { return s.empty(); });
}

void add_unique(std::vector<Rel>& rels, const Rel& r) {
  if (std::find(rels.begin(), rels.end(), r) == rels.end()) rels.push_back(r);
}

Dnf conj(const Dnf& a, const Dnf& b) {
  Dnf out;
  for (const auto& ta : a) {
    for (const auto& tb : b) {
      Term t;
      t.box.reserve(ta.box.size());
      for (std::size_t i = 0; i < ta.box.size(); ++i) t.box.push_back(iv_intersect(ta.box[i], tb.box[i]));
      if (box_empty(t)) continue;
      t.pos = ta.pos;
      for (const auto& r : tb.pos) add_unique(t.pos, r);
      t.neg = ta.neg;
      for (const auto& r : tb.neg) add_unique(t.neg, r);
      out.push_back(std::move(t));
      if (out.size() > kMaxTerms) throw Undecidable("predicate normal form exceeds term limit");
    }
  }
  return out;
}

Dnf negate(const Dnf& terms, const ObservationSpace& s) {
  Dnf result{full_term(s)};
  for (const auto& t : terms) {
    Dnf lits;
    for (std::size_t i = 0; i < t.box.size(); ++i) {
      const auto& comp = *s.component(i);
      auto rest = iv_complement(t.box[i], comp.lo(), comp.hi());
      if (rest.empty()) continue;
      Term lit = full_term(s);
      lit.box[i] = std::move(rest);
      lits.push_back(std::move(lit));
    }
    for (const auto& r : t.pos) {
      Term lit = full_term(s);
      lit.neg.push_back(r);
      lits.push_back(std::move(lit));
    }
    for (const auto& r : t.neg) {
      Term lit = full_term(s);
      lit.pos.push_back(r);
      lits.push_back(std::move(lit));
    }
    result = conj(result, lits);
    if (result.empty()) break;
  }
  return result;
}

Dnf dnf(const Predicate& p, const ObservationSpace& s) {
  switch (p.kind()) {
    case Predicate::Kind::Empty:
      return {};
    case Predicate::Kind::Universe:
      return {full_term(s)};
    case Predicate::Kind::FiniteSet: {
      if (p.values().size() > kMaxTerms) throw Undecidable("finite set too large for product normal form");
      Dnf out;
      for (const auto& v : p.values()) {
        Term t = full_term(s);
        for (std::size_t i = 0; i < v.size(); ++i) t.box[i] = {{v[i], v[i]}};
        out.push_back(std::move(t));
      }
      return out;
    }
    case Predicate::Kind::Product: {
      Term t = full_term(s);
      for (std::size_t i = 0; i < p.parts().size(); ++i) t.box[i] = to_intervals(p.parts()[i]);
      if (box_empty(t)) return {};
      return {std::move(t)};
    }
    case Predicate::Kind::Intersection: {
      Dnf acc{full_term(s)};
      for (const auto& q : p.parts()) {
        acc = conj(acc, dnf(q, s));
        if (acc.empty()) break;
      }
      return acc;
    }
    case Predicate::Kind::Complement:
      return negate(dnf(p.inner(), s), s);
    case Predicate::Kind::Linear: {
      Term t = full_term(s);
      t.pos.push_back({p.target(), p.source(), p.factor()});
      return {std::move(t)};
    }
    case Predicate::Kind::Interval:
      break;
  }
  throw std::invalid_argument("interval predicate on product space " + s.name());
}

bool relation_solvable(const Term& t, const Rel& r) {
  const auto& src = t.box[r.source];
  const auto& dst = t.box[r.target];
  for (const auto& [a, b] : src) {
    for (const auto& [c, d] : dst) {
      if (r.factor == 0) {
        if (c <= 0 && 0 <= d) return true;
        continue;
      }
      Value lo = r.factor > 0 ? ceil_div(c, r.factor) : ceil_div(d, r.factor);
      Value hi = r.factor > 0 ? floor_div(d, r.factor) : floor_div(c, r.factor);
      if (std::max(lo, a) <= std::min(hi, b)) return true;
    }
  }
  return false;
}

bool term_empty_by_enumeration(const Term& t) {
  std::uint64_t total = 1;
  for (const auto& s : t.box) {
    std::uint64_t n = iv_count(s);
    if (total > kMaxEnumeration / std::max<std::uint64_t>(n, 1)) throw Undecidable("relation constraint too large to decide");
    total *= n;
  }
  std::vector<std::vector<Value>> axes;
  for (const auto& s : t.box) {
    std::vector<Value> vals;
    for (const auto& [l, h] : s)
      for (Value v = l; v <= h; ++v) vals.push_back(v);
    axes.push_back(std::move(vals));
  }
  std::vector<std::size_t> idx(axes.size(), 0);
  Observation o(axes.size());
  while (true) {
    for (std::size_t i = 0; i < axes.size(); ++i) o[i] = axes[i][idx[i]];
    bool ok = true;
    for (const auto& r : t.pos) ok = ok && o[r.target] == r.factor * o[r.source];
    for (const auto& r : t.neg) ok = ok && o[r.target] != r.factor * o[r.source];
    if (ok) return false;
    std::size_t k = 0;
    while (k < axes.size() && ++idx[k] == axes[k].size()) idx[k++] = 0;
    if (k == axes.size()) return true;
  }
}

bool term_empty(const Term& t) {
  if (box_empty(t)) return true;
  for (const auto& r : t.pos) {
    if (std::find(t.neg.begin(), t.neg.end(), r) != t.neg.end()) return true;
  }
  if (t.pos.empty() && t.neg.empty()) return false;
  if (t.pos.size() == 1 && t.neg.empty()) return !relation_solvable(t, t.pos[0]);
  if (t.pos.empty() && t.neg.size() == 1) {
    const auto& r = t.neg[0];
    const auto& src = t.box[r.source];
    const auto& dst = t.box[r.target];
    bool point = iv_count(src) == 1 && iv_count(dst) == 1;
    return point && dst[0].first == r.factor * src[0].first;
  }
  return term_empty_by_enumeration(t);
}

bool dnf_empty(const Dnf& d) {
  return std::all_of(d.begin(), d.end(), [](const Term& t) { return term_empty(t); });
}

template <class Fn>
void for_each_point(const ObservationSpace& s, Fn&& fn) {
  if (s.cardinality() > kMaxEnumeration) throw Undecidable("space " + s.name() + " too large to enumerate");
  if (s.is_scalar()) {
    for (Value v = s.lo(); v <= s.hi(); ++v) fn(Observation{v});
    return;
  }
  Observation o;
  for (const auto& c : s.components()) o.push_back(c->lo());
  while (true) {
    fn(o);
    std::size_t k = 0;
    while (k < o.size() && o[k] == s.component(k)->hi()) {
      o[k] = s.component(k)->lo();
      ++k;
    }
    if (k == o.size()) return;
    ++o[k];
  }
}

}  // namespace

bool member(const Predicate& p, const Observation& o) { return member_at(p, std::span<const Value>(o)); }

IntervalSet to_intervals(const Predicate& p) {
  const auto& s = p.space();
  switch (p.kind()) {
    case Predicate::Kind::Empty:
      return {};
    case Predicate::Kind::Universe:
      if (!s) throw std::invalid_argument("interval form of an unplaced universe");
      return full_range(*s);
    case Predicate::Kind::FiniteSet: {
      IntervalSet out;
      for (const auto& v : p.values()) {
        if (!out.empty() && out.back().second + 1 == v[0]) out.back().second = v[0];
        else out.emplace_back(v[0], v[0]);
      }
      return out;
    }
    case Predicate::Kind::Interval:
      return {{p.lo(), p.hi()}};
    case Predicate::Kind::Complement:
      return iv_complement(to_intervals(p.inner()), s->lo(), s->hi());
    case Predicate::Kind::Intersection: {
      IntervalSet acc = full_range(*s);
      for (const auto& q : p.parts()) acc = iv_intersect(acc, to_intervals(q));
      return acc;
    }
    case Predicate::Kind::Product:
    case Predicate::Kind::Linear:
      break;
  }
  throw std::invalid_argument("interval form requires a scalar predicate");
}

bool is_empty(const Predicate& p) {
  switch (p.kind()) {
    case Predicate::Kind::Empty:
      return true;
    case Predicate::Kind::Universe:
    case Predicate::Kind::FiniteSet:
    case Predicate::Kind::Interval:
      return false;
    default:
      break;
  }
  if (p.space()->is_scalar()) return to_intervals(p).empty();
  return dnf_empty(dnf(p, *p.space()));
}

bool subset(const Predicate& p, const Predicate& q) {
  SpacePtr s = common_space(p, q);
  if (p.is_empty_literal() || q.is_universe()) return true;
  if (p.kind() == Predicate::Kind::FiniteSet) {
    return std::all_of(p.values().begin(), p.values().end(), [&](const Observation& o) { return member(q, o); });
  }
  if (!s) return q.is_universe() || p.is_empty_literal();
  Predicate pp = with_space(p, s);
  Predicate qq = with_space(q, s);
  if (s->is_scalar()) return iv_subset(to_intervals(pp), to_intervals(qq));
  return dnf_empty(conj(dnf(pp, *s), negate(dnf(qq, *s), *s)));
}

Predicate complement(const Predicate& p) {
  switch (p.kind()) {
    case Predicate::Kind::Universe:
      return Predicate::empty(p.space());
    case Predicate::Kind::Empty:
      return Predicate::universe(p.space());
    case Predicate::Kind::Complement:
      return p.inner();
    default: {
      auto n = bare(Predicate::Kind::Complement, p.space());
      n.parts = {p};
      return make_predicate(std::move(n));
    }
  }
}

Predicate intersect(const Predicate& p, const Predicate& q) {
  SpacePtr s = common_space(p, q);
  if (p.is_universe()) return with_space(q, s);
  if (q.is_universe()) return with_space(p, s);
  if (p.is_empty_literal() || q.is_empty_literal()) return Predicate::empty(s);
  if (p == q) return p;
  if (p.kind() == Predicate::Kind::FiniteSet || q.kind() == Predicate::Kind::FiniteSet) {
    const Predicate& f = p.kind() == Predicate::Kind::FiniteSet ? p : q;
    const Predicate& g = p.kind() == Predicate::Kind::FiniteSet ? q : p;
    ObservationSet kept;
    for (const auto& o : f.values()) {
      if (member(g, o)) kept.push_back(o);
    }
    return Predicate::finite_set(s, std::move(kept));
  }
  if (p.kind() == Predicate::Kind::Interval && q.kind() == Predicate::Kind::Interval) {
    Value lo = std::max(p.lo(), q.lo());
    Value hi = std::min(p.hi(), q.hi());
    return lo <= hi ? Predicate::interval(s, lo, hi) : Predicate::empty(s);
  }
  if (p.kind() == Predicate::Kind::Product && q.kind() == Predicate::Kind::Product) {
    std::vector<Predicate> parts;
    for (std::size_t i = 0; i < p.parts().size(); ++i) parts.push_back(intersect(p.parts()[i], q.parts()[i]));
    return Predicate::product(s, std::move(parts));
  }
  // Canonical form: at most one interval and one product conjunct, the
  // remaining conjuncts ordered by hash. Makes folds order-independent.
  std::vector<Predicate> flat;
  for (const Predicate* x : {&p, &q}) {
    if (x->kind() == Predicate::Kind::Intersection) flat.insert(flat.end(), x->parts().begin(), x->parts().end());
    else flat.push_back(*x);
  }
  std::optional<Predicate> range;
  std::optional<Predicate> box;
  std::vector<Predicate> parts;
  for (const auto& x : flat) {
    if (x.kind() == Predicate::Kind::Interval) range = range ? intersect(*range, x) : x;
    else if (x.kind() == Predicate::Kind::Product) box = box ? intersect(*box, x) : x;
    else parts.push_back(x);
  }
  for (const auto* merged : {&range, &box}) {
    if (!*merged) continue;
    if ((*merged)->is_empty_literal()) return Predicate::empty(s);
    if (!(*merged)->is_universe()) parts.push_back(**merged);
  }
  std::stable_sort(parts.begin(), parts.end(), [](const Predicate& a, const Predicate& b) { return a.hash() < b.hash(); });
  parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
  if (parts.empty()) return Predicate::universe(s);
  if (parts.size() == 1) return parts[0];
  auto n = bare(Predicate::Kind::Intersection, s);
  n.parts = std::move(parts);
  return make_predicate(std::move(n));
}

Predicate image(const Predicate& p, const std::function<Observation(const Observation&)>& bijection) {
  switch (p.kind()) {
    case Predicate::Kind::Empty:
    case Predicate::Kind::Universe:
      return p;
    case Predicate::Kind::FiniteSet: {
      ObservationSet mapped;
      mapped.reserve(p.values().size());
      for (const auto& o : p.values()) mapped.push_back(bijection(o));
      return Predicate::finite_set(p.space(), std::move(mapped));
    }
    case Predicate::Kind::Complement:
      return complement(image(p.inner(), bijection));
    case Predicate::Kind::Intersection: {
      Predicate acc = Predicate::universe(p.space());
      for (const auto& q : p.parts()) acc = intersect(acc, image(q, bijection));
      return acc;
    }
    default: {
      ObservationSet mapped;
      for_each_point(*p.space(), [&](const Observation& o) {
        if (member(p, o)) mapped.push_back(bijection(o));
      });
      return Predicate::finite_set(p.space(), std::move(mapped));
    }
  }
}

}  // namespace coalcheck
