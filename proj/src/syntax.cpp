#include "coalcheck/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <vector>

namespace coalcheck {

namespace {

constexpr std::string_view kValueStops = " \t\r\n,{}[]()<>&!=*";

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Parser {
 public:
  Parser(std::string_view text, Vocabulary vocabulary) : s_(text), vocab_(std::move(vocabulary)) {}

  void ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek(std::string_view tok) {
    ws();
    return s_.substr(pos_, tok.size()) == tok;
  }

  bool eat(std::string_view tok) {
    if (!peek(tok)) return false;
    pos_ += tok.size();
    return true;
  }

  bool eat_word(std::string_view word) {
    if (!peek(word)) return false;
    std::size_t end = pos_ + word.size();
    if (end < s_.size() && ident_char(s_[end])) return false;
    pos_ = end;
    return true;
  }

  void expect(std::string_view tok) {
    if (!eat(tok)) fail("expected '" + std::string(tok) + "'");
  }

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, pos_); }

  void finish() {
    ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
  }

  std::string_view ident() {
    ws();
    std::size_t start = pos_;
    if (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
    }
    return s_.substr(start, pos_ - start);
  }

  std::string_view value_token() {
    ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && kValueStops.find(s_[pos_]) == std::string_view::npos) ++pos_;
    if (start == pos_) fail("expected a value");
    return s_.substr(start, pos_ - start);
  }

  Value value(const SpacePtr& space) {
    std::size_t at = pos_;
    auto tok = value_token();
    try {
      return space->parse_value(tok);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), at);
    }
  }

  Value bound(const SpacePtr& space) {
    std::size_t at = pos_;
    auto tok = value_token();
    try {
      return space->parse_bound(tok);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), at);
    }
  }

  Observation point(const SpacePtr& space) {
    if (space->is_scalar()) return {value(space)};
    expect("(");
    Observation o;
    for (std::size_t i = 0; i < space->arity(); ++i) {
      if (i) expect(",");
      o.push_back(value(space->component(i)));
    }
    expect(")");
    return o;
  }

  // ------------------------------------------------------------ predicates

  Predicate pred(const SpacePtr& space) {
    Predicate p = patom(space);
    while (eat("&")) p = intersect(p, patom(space));
    return p;
  }

  Predicate patom(const SpacePtr& space) {
    if (eat_word("tt")) return Predicate::universe(space);
    if (eat_word("ff")) return Predicate::empty(space);
    if (eat("!")) return complement(patom(space));
    if (peek("(")) {
      std::size_t save = pos_;
      if (!space->is_scalar()) {
        try {
          return tuple(space);
        } catch (const ParseError&) {
          pos_ = save;
        }
      }
      expect("(");
      Predicate p = pred(space);
      expect(")");
      return p;
    }
    if (eat(".")) return compare(space);
    std::size_t at = pos_;
    auto name = ident();
    if (name.empty()) fail("expected a predicate");
    if (space->is_scalar()) throw ParseError("named component on scalar space " + space->name(), at);
    auto index = space->component_index(name);
    if (!index) throw ParseError("unknown component '" + std::string(name) + "'", at);
    if (auto rel = linear(space, *index)) return *rel;
    std::vector<Predicate> parts;
    for (const auto& c : space->components()) parts.push_back(Predicate::universe(c));
    parts[*index] = compare(space->component(*index));
    return Predicate::product(space, std::move(parts));
  }

  std::optional<Predicate> linear(const SpacePtr& space, std::size_t target) {
    std::size_t save = pos_;
    if (!eat("=") || peek("=")) {
      pos_ = save;
      return std::nullopt;
    }
    ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '-')) ++pos_;
    std::string_view digits = s_.substr(start, pos_ - start);
    if (digits.empty() || !eat("*")) {
      pos_ = save;
      return std::nullopt;
    }
    Value factor = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), factor);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) throw ParseError("bad factor", start);
    std::size_t at = pos_;
    auto source = space->component_index(ident());
    if (!source) throw ParseError("unknown component", at);
    return Predicate::linear(space, target, factor, *source);
  }

  Predicate tuple(const SpacePtr& space) {
    expect("(");
    std::vector<Predicate> parts;
    for (std::size_t i = 0; i < space->arity(); ++i) {
      if (i) expect(",");
      const auto& comp = space->component(i);
      parts.push_back(eat_word("_") ? Predicate::universe(comp) : pred(comp));
    }
    expect(")");
    return Predicate::product(space, std::move(parts));
  }

  Predicate compare(const SpacePtr& space) {
    if (eat("!=")) return complement(Predicate::singleton(space, point(space)));
    if (eat_word("in")) {
      if (eat("{")) {
        ObservationSet values;
        if (!peek("}")) {
          do values.push_back(point(space));
          while (eat(","));
        }
        expect("}");
        return Predicate::finite_set(space, std::move(values));
      }
      if (!space->is_scalar()) fail("interval on a product space");
      expect("[");
      Value lo = value(space);
      expect(",");
      Value hi = value(space);
      expect("]");
      if (lo > hi) fail("empty interval");
      return Predicate::interval(space, lo, hi);
    }
    if (eat("=")) return Predicate::singleton(space, point(space));
    if (!space->is_scalar()) fail("ordering comparison on a product space");
    auto bounded = [&](Value lo, Value hi) {
      lo = std::max(lo, space->lo());
      hi = std::min(hi, space->hi());
      return lo <= hi ? Predicate::interval(space, lo, hi) : Predicate::empty(space);
    };
    if (eat("<=")) return bounded(space->lo(), bound(space));
    if (eat(">=")) return bounded(bound(space), space->hi());
    if (eat("<")) return bounded(space->lo(), bound(space) - 1);
    if (eat(">")) return bounded(bound(space) + 1, space->hi());
    fail("expected a comparison");
  }

  // ------------------------------------------------------------ formulae

  FormulaId formula() {
    FormulaId f = unary();
    while (eat("&")) f = conj(f, unary());
    return f;
  }

  FormulaId unary() {
    if (eat("<")) {
      Predicate p = pred(observations());
      expect(">");
      return atom(p);
    }
    if (eat("[")) {
      Predicate p = inputs();
      expect("]");
      return box(p, unary());
    }
    if (eat("(")) {
      FormulaId f = formula();
      expect(")");
      return f;
    }
    std::size_t at = pos_;
    auto word = ident();
    if (word.empty()) fail("expected a formula");
    if (word == "tt") return tt();
    if (word == "ff") return atom(Predicate::empty(observations()));
    if (word == "G") {
      FormulaId body = unary();
      if (!is_closed(body)) throw ParseError("G of an open formula", at);
      return always(body);
    }
    if (word == "nu") {
      auto name = ident();
      if (name.empty()) fail("expected a variable name");
      expect(".");
      binders_.emplace_back(name);
      FormulaId body = formula();
      binders_.pop_back();
      try {
        return nu(body);
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), at);
      }
    }
    for (std::size_t k = 0; k < binders_.size(); ++k) {
      if (binders_[binders_.size() - 1 - k] == word) return var(static_cast<std::uint32_t>(k));
    }
    throw ParseError("unbound variable '" + std::string(word) + "'", at);
  }

  Predicate inputs() {
    const SpacePtr& space = vocab_.inputs;
    if (eat("*")) return Predicate::universe();
    if (!space) fail("input predicate without an input space");
    if (peek(".") || peek("(") || peek("tt") || peek("ff")) return pred(space);
    bool negated = eat("!");
    ObservationSet labels;
    do labels.push_back({value(space)});
    while (eat(","));
    Predicate p = Predicate::finite_set(space, std::move(labels));
    return negated ? complement(p) : p;
  }

  const SpacePtr& observations() const {
    if (!vocab_.observations) fail("observation predicate without an observation space");
    return vocab_.observations;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  Vocabulary vocab_;
  std::vector<std::string> binders_;
};

// ------------------------------------------------------------ printing

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string format_point(const SpacePtr& space, const Observation& o) { return space->format(o); }

std::string format_scalar_or_whole(const Predicate& p) {
  const auto& space = p.space();
  switch (p.kind()) {
    case Predicate::Kind::Universe:
      return "tt";
    case Predicate::Kind::Empty:
      return "ff";
    case Predicate::Kind::FiniteSet: {
      if (p.values().size() == 1) return ". = " + format_point(space, p.values()[0]);
      std::vector<std::string> items;
      for (const auto& v : p.values()) items.push_back(format_point(space, v));
      return ". in {" + join(items, ", ") + "}";
    }
    case Predicate::Kind::Interval:
      return ". in [" + space->format(p.lo()) + ", " + space->format(p.hi()) + "]";
    case Predicate::Kind::Complement: {
      const Predicate& in = p.inner();
      if (in.kind() == Predicate::Kind::FiniteSet && in.values().size() == 1)
        return ". != " + format_point(space, in.values()[0]);
      std::string body = format_scalar_or_whole(in);
      return body.front() == '(' ? "!" + body : "!(" + body + ")";
    }
    case Predicate::Kind::Product: {
      std::vector<std::string> items;
      for (const auto& part : p.parts()) items.push_back(part.is_universe() ? "_" : format_scalar_or_whole(part));
      return "(" + join(items, ", ") + ")";
    }
    case Predicate::Kind::Intersection: {
      std::vector<std::string> items;
      for (const auto& part : p.parts()) items.push_back(format_scalar_or_whole(part));
      return "(" + join(items, " & ") + ")";
    }
    case Predicate::Kind::Linear:
      return space->component(p.target())->name() + " = " + std::to_string(p.factor()) + "*" +
             space->component(p.source())->name();
  }
  return "?";
}

std::string format_inputs(const Predicate& p) {
  if (p.is_universe()) return "*";
  const auto& space = p.space();
  auto labels = [&](const Predicate& q) {
    std::vector<std::string> items;
    for (const auto& v : q.values()) items.push_back(space->format(v[0]));
    return join(items, ", ");
  };
  if (p.kind() == Predicate::Kind::FiniteSet) return labels(p);
  if (p.kind() == Predicate::Kind::Complement && p.inner().kind() == Predicate::Kind::FiniteSet)
    return "!" + labels(p.inner());
  return format_scalar_or_whole(p);
}

class Printer {
 public:
  explicit Printer(const Vocabulary& vocabulary) : vocab_(vocabulary) {}

  // level 0: anything; 1: conjunct; 2: operand of a prefix operator.
  std::string print(FormulaId f, int level) {
    const FormulaNode& n = node(f);
    switch (n.kind) {
      case FormulaKind::True:
        return "tt";
      case FormulaKind::Var:
        return names_.at(names_.size() - 1 - n.var);
      case FormulaKind::Obs:
        return "<" + format_predicate(*n.predicate) + ">";
      case FormulaKind::Box:
        return "[" + format_inputs(*n.predicate) + "] " + print(n.left, 2);
      case FormulaKind::And: {
        std::vector<std::string> items;
        for (FormulaId c : conjuncts(f)) items.push_back(print(c, 1));
        std::string out = join(items, " & ");
        return level >= 2 ? "(" + out + ")" : out;
      }
      case FormulaKind::Nu: {
        if (auto rest = always_body(f)) return "G " + print(*rest, 2);
        std::string name = "v" + std::to_string(names_.size());
        names_.push_back(name);
        std::string out = "nu " + name + ". " + print(n.left, 0);
        names_.pop_back();
        return level >= 1 ? "(" + out + ")" : out;
      }
    }
    return "?";
  }

  static std::optional<FormulaId> always_body(FormulaId f) {
    const FormulaNode& n = node(f);
    if (n.kind != FormulaKind::Nu) return std::nullopt;
    FormulaId loop = box(Predicate::universe(), var(0));
    auto parts = conjuncts(n.left);
    auto it = std::find(parts.begin(), parts.end(), loop);
    if (it == parts.end()) return std::nullopt;
    parts.erase(it);
    FormulaId rest = conj(std::span<const FormulaId>(parts));
    if (!is_closed(rest) || always(rest) != f) return std::nullopt;
    return rest;
  }

 private:
  const Vocabulary& vocab_;
  std::vector<std::string> names_;
};

}  // namespace

Predicate parse_predicate(std::string_view text, const SpacePtr& space) {
  if (!space) throw std::invalid_argument("predicate parsing needs a space");
  Parser parser(text, Vocabulary{space, nullptr});
  Predicate p = parser.pred(space);
  parser.finish();
  return p;
}

std::string format_predicate(const Predicate& p) { return format_scalar_or_whole(p); }

FormulaId parse_formula(std::string_view text, const Vocabulary& vocabulary) {
  Parser parser(text, vocabulary);
  FormulaId f = parser.formula();
  parser.finish();
  return f;
}

std::string format_formula(FormulaId f, const Vocabulary& vocabulary) { return Printer(vocabulary).print(f, 0); }

Property parse_property(std::string_view text, const Vocabulary& vocabulary, std::string name) {
  Parser parser(text, vocabulary);
  Property p;
  p.name = name.empty() ? std::string(text) : std::move(name);
  if (parser.eat_word("F")) {
    FormulaId target = parser.formula();
    for (FormulaId c : conjuncts(target)) {
      if (node(c).kind != FormulaKind::Obs) parser.fail("F applies to observation formulae only");
    }
    p.polarity = Polarity::Refute;
    Predicate goal = complement(obs(target));
    if (!goal.space() && vocabulary.observations)
      goal = goal.is_universe() ? Predicate::universe(vocabulary.observations) : Predicate::empty(vocabulary.observations);
    p.body = always(atom(goal));
  } else if (parser.eat("!")) {
    p.polarity = Polarity::Refute;
    p.body = parser.formula();
  } else {
    p.body = parser.formula();
  }
  parser.finish();
  if (!is_closed(p.body)) throw ParseError("property with free variables", 0);
  return p;
}

std::string format_property(const Property& p, const Vocabulary& vocabulary) {
  if (p.polarity == Polarity::Assert) return format_formula(p.body, vocabulary);
  if (auto rest = Printer::always_body(p.body)) {
    const FormulaNode& n = node(*rest);
    if (n.kind == FormulaKind::Obs) return "F <" + format_predicate(complement(*n.predicate)) + ">";
  }
  return "! " + format_formula(p.body, vocabulary);
}

}  // namespace coalcheck
