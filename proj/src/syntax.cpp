#include "effet/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "effet/typing.hpp"

namespace effet {

bool is_valid_ident(const Ident& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''))
      return false;
  return true;
}

// ---- Effect ----------------------------------------------------------------

Effect Effect::top() {
  Effect e;
  e.top_ = true;
  return e;
}

Effect Effect::of(std::vector<Ident> ops) {
  std::sort(ops.begin(), ops.end());
  ops.erase(std::unique(ops.begin(), ops.end()), ops.end());
  Effect e;
  e.ops_ = std::move(ops);
  return e;
}

const std::vector<Ident>& Effect::ops() const {
  if (top_) throw InternalError("ops() on the erased effect sentinel");
  return ops_;
}

bool Effect::contains(const Ident& op) const {
  return top_ ||
         std::binary_search(ops_.begin(), ops_.end(), op);
}

bool Effect::subset_of(const Effect& o) const {
  if (o.top_) return true;
  if (top_) return false;
  return std::includes(o.ops_.begin(), o.ops_.end(), ops_.begin(), ops_.end());
}

Effect Effect::union_with(const Effect& o) const {
  if (top_ || o.top_) return top();
  std::vector<Ident> u;
  std::set_union(ops_.begin(), ops_.end(), o.ops_.begin(), o.ops_.end(),
                 std::back_inserter(u));
  Effect e;
  e.ops_ = std::move(u);
  return e;
}

Effect Effect::with(const Ident& op) const {
  return union_with(of({op}));
}

std::size_t Effect::size() const { return top_ ? 0 : ops_.size(); }

bool Effect::operator<(const Effect& o) const {
  if (top_ != o.top_) return !top_;
  if (ops_.size() != o.ops_.size()) return ops_.size() < o.ops_.size();
  return ops_ < o.ops_;
}

std::string Effect::str() const {
  if (top_) return "<erased>";
  std::string s = "{";
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    if (i) s += ",";
    s += ops_[i];
  }
  return s + "}";
}

// ---- TypeExpr ----------------------------------------------------------------

struct TypeExpr::Node {
  Kind kind;
  Ident base;
  TypeExpr a, b;
  Effect eff;
  bool ground;
};

static std::shared_ptr<const TypeExpr::Node> mk_type_node(
    TypeExpr::Kind k, Ident base, TypeExpr a, TypeExpr b, Effect eff,
    bool ground) {
  auto n = std::make_shared<TypeExpr::Node>();
  n->kind = k;
  n->base = std::move(base);
  n->a = std::move(a);
  n->b = std::move(b);
  n->eff = std::move(eff);
  n->ground = ground;
  return n;
}

TypeExpr TypeExpr::base(Ident name) {
  TypeExpr t;
  t.n_ = mk_type_node(Kind::Base, std::move(name), {}, {}, {}, true);
  return t;
}
TypeExpr TypeExpr::unit() {
  TypeExpr t;
  t.n_ = mk_type_node(Kind::Unit, {}, {}, {}, {}, true);
  return t;
}
TypeExpr TypeExpr::empty() {
  TypeExpr t;
  t.n_ = mk_type_node(Kind::Empty, {}, {}, {}, {}, true);
  return t;
}
TypeExpr TypeExpr::prod(TypeExpr a, TypeExpr b) {
  bool g = a.is_ground() && b.is_ground();
  TypeExpr t;
  t.n_ = mk_type_node(Kind::Prod, {}, std::move(a), std::move(b), {}, g);
  return t;
}
TypeExpr TypeExpr::sum(TypeExpr a, TypeExpr b) {
  bool g = a.is_ground() && b.is_ground();
  TypeExpr t;
  t.n_ = mk_type_node(Kind::Sum, {}, std::move(a), std::move(b), {}, g);
  return t;
}
TypeExpr TypeExpr::arrow(TypeExpr a, Effect eff, TypeExpr b) {
  TypeExpr t;
  t.n_ = mk_type_node(Kind::Arrow, {}, std::move(a), std::move(b),
                      std::move(eff), false);
  return t;
}

TypeExpr::Kind TypeExpr::kind() const { return n_->kind; }
const Ident& TypeExpr::base_name() const { return n_->base; }
TypeExpr TypeExpr::left() const { return n_->a; }
TypeExpr TypeExpr::right() const { return n_->b; }
const Effect& TypeExpr::arrow_eff() const { return n_->eff; }
bool TypeExpr::is_ground() const { return n_->ground; }

bool TypeExpr::operator==(const TypeExpr& o) const {
  if (n_ == o.n_) return true;
  if (!n_ || !o.n_) return false;
  if (n_->kind != o.n_->kind) return false;
  switch (n_->kind) {
    case Kind::Base: return n_->base == o.n_->base;
    case Kind::Unit:
    case Kind::Empty: return true;
    case Kind::Prod:
    case Kind::Sum: return n_->a == o.n_->a && n_->b == o.n_->b;
    case Kind::Arrow:
      return n_->eff == o.n_->eff && n_->a == o.n_->a && n_->b == o.n_->b;
  }
  return false;
}

// ---- Term ----------------------------------------------------------------

struct Term::Node {
  Kind kind;
  Ident name;     // Const/OpApp/Var, Lam binder, Case first binder
  Ident name2;    // Case second binder
  TypeExpr ann;   // Lam/Ascribe
  Effect eff;     // Ascribe
  std::vector<Term> kids;
};

Term mk_term_node(Term::Node n) {
  Term t;
  t.n_ = std::make_shared<const Term::Node>(std::move(n));
  return t;
}

Term Term::cnst(Ident c) {
  Node n;
  n.kind = Kind::Const;
  n.name = std::move(c);
  return mk_term_node(std::move(n));
}
Term Term::op_app(Ident op, Term m) {
  Node n;
  n.kind = Kind::OpApp;
  n.name = std::move(op);
  n.kids = {std::move(m)};
  return mk_term_node(std::move(n));
}
Term Term::var(Ident x) {
  Node n;
  n.kind = Kind::Var;
  n.name = std::move(x);
  return mk_term_node(std::move(n));
}
Term Term::unit_val() {
  Node n;
  n.kind = Kind::Unit;
  return mk_term_node(std::move(n));
}
Term Term::pair(Term m, Term t) {
  Node n;
  n.kind = Kind::Pair;
  n.kids = {std::move(m), std::move(t)};
  return mk_term_node(std::move(n));
}
Term Term::fst(Term m) {
  Node n;
  n.kind = Kind::Fst;
  n.kids = {std::move(m)};
  return mk_term_node(std::move(n));
}
Term Term::snd(Term m) {
  Node n;
  n.kind = Kind::Snd;
  n.kids = {std::move(m)};
  return mk_term_node(std::move(n));
}
Term Term::absurd(Term m) {
  Node n;
  n.kind = Kind::Absurd;
  n.kids = {std::move(m)};
  return mk_term_node(std::move(n));
}
Term Term::inl(Term m) {
  Node n;
  n.kind = Kind::Inl;
  n.kids = {std::move(m)};
  return mk_term_node(std::move(n));
}
Term Term::inr(Term m) {
  Node n;
  n.kind = Kind::Inr;
  n.kids = {std::move(m)};
  return mk_term_node(std::move(n));
}
Term Term::case_of(Term m, Ident x, Term n1, Ident y, Term n2) {
  Node n;
  n.kind = Kind::Case;
  n.name = std::move(x);
  n.name2 = std::move(y);
  n.kids = {std::move(m), std::move(n1), std::move(n2)};
  return mk_term_node(std::move(n));
}
Term Term::lam(Ident x, TypeExpr a, Term m) {
  Node n;
  n.kind = Kind::Lam;
  n.name = std::move(x);
  n.ann = std::move(a);
  n.kids = {std::move(m)};
  return mk_term_node(std::move(n));
}
Term Term::app(Term m, Term t) {
  Node n;
  n.kind = Kind::App;
  n.kids = {std::move(m), std::move(t)};
  return mk_term_node(std::move(n));
}
Term Term::ascribe(Term m, TypeExpr a, Effect eff) {
  Node n;
  n.kind = Kind::Ascribe;
  n.ann = std::move(a);
  n.eff = std::move(eff);
  n.kids = {std::move(m)};
  return mk_term_node(std::move(n));
}

Term::Kind Term::kind() const { return n_->kind; }
const Ident& Term::name() const { return n_->name; }
const Ident& Term::binder2() const { return n_->name2; }
Term Term::child(std::size_t i) const { return n_->kids.at(i); }
std::size_t Term::child_count() const { return n_->kids.size(); }
const TypeExpr& Term::type_ann() const { return n_->ann; }
const Effect& Term::eff_ann() const { return n_->eff; }

bool Term::operator==(const Term& o) const {
  if (n_ == o.n_) return true;
  if (!n_ || !o.n_) return false;
  if (n_->kind != o.n_->kind || n_->name != o.n_->name ||
      n_->name2 != o.n_->name2)
    return false;
  if (n_->kind == Kind::Lam || n_->kind == Kind::Ascribe) {
    if (!(n_->ann == o.n_->ann)) return false;
  }
  if (n_->kind == Kind::Ascribe && n_->eff != o.n_->eff) return false;
  if (n_->kids.size() != o.n_->kids.size()) return false;
  for (std::size_t i = 0; i < n_->kids.size(); ++i)
    if (!(n_->kids[i] == o.n_->kids[i])) return false;
  return true;
}

// ---- Signature ----------------------------------------------------------------

bool Signature::has_base(const Ident& b) const {
  return std::find(base_types.begin(), base_types.end(), b) !=
         base_types.end();
}
bool Signature::has_op(const Ident& op) const {
  return operations.count(op) != 0;
}
bool Signature::has_const(const Ident& c) const {
  return constants.count(c) != 0;
}

static void check_type_names(const Signature& sig, const TypeExpr& a,
                             const std::string& where) {
  switch (a.kind()) {
    case TypeExpr::Kind::Base:
      if (!sig.has_base(a.base_name()))
        throw UnknownName("undeclared base type '" + a.base_name() + "' in " +
                          where);
      break;
    case TypeExpr::Kind::Unit:
    case TypeExpr::Kind::Empty:
      break;
    case TypeExpr::Kind::Prod:
    case TypeExpr::Kind::Sum:
      check_type_names(sig, a.left(), where);
      check_type_names(sig, a.right(), where);
      break;
    case TypeExpr::Kind::Arrow:
      if (!a.arrow_eff().is_top())
        for (const Ident& op : a.arrow_eff().ops())
          if (!sig.has_op(op))
            throw UnknownName("undeclared operation '" + op +
                              "' in effect annotation in " + where);
      check_type_names(sig, a.left(), where);
      check_type_names(sig, a.right(), where);
      break;
  }
}

void Signature::validate() const {
  for (const auto& [op, gg] : operations) {
    if (!is_valid_ident(op)) throw ConfigError("bad operation name: " + op);
    if (!gg.first.is_ground() || !gg.second.is_ground())
      throw ConfigError("operation '" + op + "' must have ground types");
    check_type_names(*this, gg.first, "operation " + op);
    check_type_names(*this, gg.second, "operation " + op);
  }
  for (const auto& [c, a] : constants) {
    if (!is_valid_ident(c)) throw ConfigError("bad constant name: " + c);
    check_type_names(*this, a, "constant " + c);
  }
}

Effect Signature::full_effect() const {
  std::vector<Ident> ops;
  for (const auto& [op, gg] : operations) ops.push_back(op);
  return Effect::of(std::move(ops));
}

// ---- printing ----------------------------------------------------------------

static void print_type_prec(std::ostringstream& os, const TypeExpr& a,
                            int prec);

std::string print_type(const TypeExpr& a) {
  std::ostringstream os;
  print_type_prec(os, a, 0);
  return os.str();
}

// precedence: 0 arrow (right assoc), 1 sum, 2 prod, 3 atom
static void print_type_prec(std::ostringstream& os, const TypeExpr& a,
                            int prec) {
  switch (a.kind()) {
    case TypeExpr::Kind::Base:
      os << a.base_name();
      break;
    case TypeExpr::Kind::Unit:
      os << "unit";
      break;
    case TypeExpr::Kind::Empty:
      os << "0";
      break;
    case TypeExpr::Kind::Prod:
      if (prec > 2) os << "(";
      print_type_prec(os, a.left(), 3);
      os << " * ";
      print_type_prec(os, a.right(), 2);
      if (prec > 2) os << ")";
      break;
    case TypeExpr::Kind::Sum:
      if (prec > 1) os << "(";
      print_type_prec(os, a.left(), 2);
      os << " + ";
      print_type_prec(os, a.right(), 1);
      if (prec > 1) os << ")";
      break;
    case TypeExpr::Kind::Arrow: {
      if (prec > 0) os << "(";
      print_type_prec(os, a.left(), 1);
      if (a.arrow_eff().is_top()) {
        os << " -> ";
      } else {
        os << " -{";
        const auto& ops = a.arrow_eff().ops();
        for (std::size_t i = 0; i < ops.size(); ++i) {
          if (i) os << ",";
          os << ops[i];
        }
        os << "}-> ";
      }
      print_type_prec(os, a.right(), 0);
      if (prec > 0) os << ")";
      break;
    }
  }
}

std::string TypeExpr::str() const { return print_type(*this); }

namespace {

bool is_atom_term(const Term& m) {
  switch (m.kind()) {
    case Term::Kind::Const:
    case Term::Kind::Var:
    case Term::Kind::Unit:
    case Term::Kind::Pair:
    case Term::Kind::Ascribe:
      return true;
    default:
      return false;
  }
}

void print_term_rec(std::ostringstream& os, const Term& m);

void print_arg(std::ostringstream& os, const Term& m) {
  // arguments of prefixes and applications print at atom level
  if (is_atom_term(m)) {
    print_term_rec(os, m);
  } else {
    os << "(";
    print_term_rec(os, m);
    os << ")";
  }
}

void print_effect_set(std::ostringstream& os, const Effect& e) {
  os << "{";
  const auto& ops = e.ops();
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (i) os << ",";
    os << ops[i];
  }
  os << "}";
}

void print_term_rec(std::ostringstream& os, const Term& m) {
  switch (m.kind()) {
    case Term::Kind::Const:
    case Term::Kind::Var:
      os << m.name();
      break;
    case Term::Kind::Unit:
      os << "()";
      break;
    case Term::Kind::OpApp:
      os << m.name() << " ";
      print_arg(os, m.child(0));
      break;
    case Term::Kind::Fst:
      os << "fst ";
      print_arg(os, m.child(0));
      break;
    case Term::Kind::Snd:
      os << "snd ";
      print_arg(os, m.child(0));
      break;
    case Term::Kind::Absurd:
      os << "absurd ";
      print_arg(os, m.child(0));
      break;
    case Term::Kind::Inl:
      os << "inl ";
      print_arg(os, m.child(0));
      break;
    case Term::Kind::Inr:
      os << "inr ";
      print_arg(os, m.child(0));
      break;
    case Term::Kind::Pair:
      os << "(";
      print_term_rec(os, m.child(0));
      os << ", ";
      print_term_rec(os, m.child(1));
      os << ")";
      break;
    case Term::Kind::Case:
      os << "case ";
      print_term_rec(os, m.child(0));
      os << " of {inl " << m.name() << " -> ";
      print_term_rec(os, m.child(1));
      os << " | inr " << m.binder2() << " -> ";
      print_term_rec(os, m.child(2));
      os << "}";
      break;
    case Term::Kind::Lam:
      os << "\\(" << m.name() << ":" << print_type(m.type_ann()) << "). ";
      print_term_rec(os, m.child(0));
      break;
    case Term::Kind::App: {
      const Term& f = m.child(0);
      // applications associate left; lambdas and cases need parens in
      // function position
      if (f.kind() == Term::Kind::App || is_atom_term(f)) {
        print_term_rec(os, f);
      } else {
        os << "(";
        print_term_rec(os, f);
        os << ")";
      }
      os << " ";
      print_arg(os, m.child(1));
      break;
    }
    case Term::Kind::Ascribe:
      os << "(";
      print_term_rec(os, m.child(0));
      os << " : " << print_type(m.type_ann()) << " ! ";
      print_effect_set(os, m.eff_ann());
      os << ")";
      break;
  }
}

}  // namespace

std::string print_term(const Term& m) {
  std::ostringstream os;
  print_term_rec(os, m);
  return os.str();
}

std::string Term::str() const { return print_term(*this); }

// ---- free variables and substitution ---------------------------------------

static void free_vars_rec(const Term& m, std::set<Ident>& bound,
                          std::set<Ident>& out) {
  switch (m.kind()) {
    case Term::Kind::Var:
      if (!bound.count(m.name())) out.insert(m.name());
      break;
    case Term::Kind::Lam: {
      bool had = bound.count(m.name());
      bound.insert(m.name());
      free_vars_rec(m.child(0), bound, out);
      if (!had) bound.erase(m.name());
      break;
    }
    case Term::Kind::Case: {
      free_vars_rec(m.child(0), bound, out);
      bool had1 = bound.count(m.name());
      bound.insert(m.name());
      free_vars_rec(m.child(1), bound, out);
      if (!had1) bound.erase(m.name());
      bool had2 = bound.count(m.binder2());
      bound.insert(m.binder2());
      free_vars_rec(m.child(2), bound, out);
      if (!had2) bound.erase(m.binder2());
      break;
    }
    default:
      for (std::size_t i = 0; i < m.child_count(); ++i)
        free_vars_rec(m.child(i), bound, out);
      break;
  }
}

std::set<Ident> free_vars(const Term& m) {
  std::set<Ident> bound, out;
  free_vars_rec(m, bound, out);
  return out;
}

Ident fresh_name(const Ident& base, const std::set<Ident>& avoid) {
  if (!avoid.count(base)) return base;
  for (int i = 0;; ++i) {
    Ident cand = base + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

Term subst(const Term& m, const Ident& x, const Term& n) {
  switch (m.kind()) {
    case Term::Kind::Var:
      return m.name() == x ? n : m;
    case Term::Kind::Const:
    case Term::Kind::Unit:
      return m;
    case Term::Kind::Lam: {
      if (m.name() == x) return m;
      std::set<Ident> fvn = free_vars(n);
      if (fvn.count(m.name())) {
        std::set<Ident> avoid = fvn;
        for (const Ident& v : free_vars(m.child(0))) avoid.insert(v);
        avoid.insert(x);
        Ident y = fresh_name(m.name(), avoid);
        Term renamed = subst(m.child(0), m.name(), Term::var(y));
        return Term::lam(y, m.type_ann(), subst(renamed, x, n));
      }
      return Term::lam(m.name(), m.type_ann(), subst(m.child(0), x, n));
    }
    case Term::Kind::Case: {
      Term scrut = subst(m.child(0), x, n);
      std::set<Ident> fvn = free_vars(n);
      Ident b1 = m.name();
      Term k1 = m.child(1);
      if (b1 != x && fvn.count(b1)) {
        std::set<Ident> avoid = fvn;
        for (const Ident& v : free_vars(k1)) avoid.insert(v);
        avoid.insert(x);
        Ident y = fresh_name(b1, avoid);
        k1 = subst(k1, b1, Term::var(y));
        b1 = y;
      }
      if (b1 != x) k1 = subst(k1, x, n);
      Ident b2 = m.binder2();
      Term k2 = m.child(2);
      if (b2 != x && fvn.count(b2)) {
        std::set<Ident> avoid = fvn;
        for (const Ident& v : free_vars(k2)) avoid.insert(v);
        avoid.insert(x);
        Ident y = fresh_name(b2, avoid);
        k2 = subst(k2, b2, Term::var(y));
        b2 = y;
      }
      if (b2 != x) k2 = subst(k2, x, n);
      return Term::case_of(scrut, b1, k1, b2, k2);
    }
    case Term::Kind::OpApp:
      return Term::op_app(m.name(), subst(m.child(0), x, n));
    case Term::Kind::Pair:
      return Term::pair(subst(m.child(0), x, n), subst(m.child(1), x, n));
    case Term::Kind::Fst:
      return Term::fst(subst(m.child(0), x, n));
    case Term::Kind::Snd:
      return Term::snd(subst(m.child(0), x, n));
    case Term::Kind::Absurd:
      return Term::absurd(subst(m.child(0), x, n));
    case Term::Kind::Inl:
      return Term::inl(subst(m.child(0), x, n));
    case Term::Kind::Inr:
      return Term::inr(subst(m.child(0), x, n));
    case Term::Kind::App:
      return Term::app(subst(m.child(0), x, n), subst(m.child(1), x, n));
    case Term::Kind::Ascribe:
      return Term::ascribe(subst(m.child(0), x, n), m.type_ann(), m.eff_ann());
  }
  throw InternalError("subst: unreachable");
}

// ---- lexer ----------------------------------------------------------------

namespace {

enum class Tok {
  Ident,
  LParen,
  RParen,
  Comma,
  LBrace,
  RBrace,
  Bar,
  Backslash,
  Dot,
  Colon,
  Bang,
  Equals,
  Arrow,       // ->
  EffArrowL,   // -{
  EffArrowR,   // }->
  Star,
  Plus,
  End
};

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

struct Lexer {
  const std::string& src;
  std::size_t pos = 0;
  int line = 1, col = 1;
  std::vector<Token> toks;

  explicit Lexer(const std::string& s) : src(s) { run(); }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      if (src[pos] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++pos;
    }
  }

  bool starts(const char* s) const {
    return src.compare(pos, std::char_traits<char>::length(s), s) == 0;
  }

  void run() {
    while (pos < src.size()) {
      char c = src[pos];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance(1);
        continue;
      }
      if (starts("--")) {
        while (pos < src.size() && src[pos] != '\n') advance(1);
        continue;
      }
      int l = line, k = col;
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
          c == '\'') {
        std::size_t start = pos;
        while (pos < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[pos])) ||
                src[pos] == '_' || src[pos] == '\''))
          advance(1);
        toks.push_back({Tok::Ident, src.substr(start, pos - start), l, k});
        continue;
      }
      if (starts("-{")) {
        toks.push_back({Tok::EffArrowL, "-{", l, k});
        advance(2);
        continue;
      }
      if (starts("}->")) {
        toks.push_back({Tok::EffArrowR, "}->", l, k});
        advance(3);
        continue;
      }
      if (starts("->")) {
        toks.push_back({Tok::Arrow, "->", l, k});
        advance(2);
        continue;
      }
      Tok t;
      switch (c) {
        case '(': t = Tok::LParen; break;
        case ')': t = Tok::RParen; break;
        case ',': t = Tok::Comma; break;
        case '{': t = Tok::LBrace; break;
        case '}': t = Tok::RBrace; break;
        case '|': t = Tok::Bar; break;
        case '\\': t = Tok::Backslash; break;
        case '.': t = Tok::Dot; break;
        case ':': t = Tok::Colon; break;
        case '!': t = Tok::Bang; break;
        case '=': t = Tok::Equals; break;
        case '*': t = Tok::Star; break;
        case '+': t = Tok::Plus; break;
        default:
          throw SyntaxError(std::string("unexpected character '") + c + "'",
                            l, k);
      }
      toks.push_back({t, std::string(1, c), l, k});
      advance(1);
    }
    toks.push_back({Tok::End, "", line, col});
  }
};

bool is_keyword(const std::string& s) {
  return s == "fst" || s == "snd" || s == "absurd" || s == "inl" ||
         s == "inr" || s == "case" || s == "of" || s == "let" || s == "in" ||
         s == "unit";
}

// Recursive-descent parser over the token stream. `let` desugars on the
// fly, which needs the inferred type of the bound term; the parser keeps a
// typing context for the binders in scope. Case binders get their types
// from the scrutinee when it is inferable; a let under a case whose
// scrutinee cannot be inferred is rejected.
struct Parser {
  const Signature& sig;
  std::vector<Token> toks;
  std::size_t i = 0;
  std::vector<std::pair<Ident, std::optional<TypeExpr>>> scope;

  Parser(const std::string& text, const Signature& s)
      : sig(s), toks(Lexer(text).toks) {}

  const Token& peek() const { return toks[i]; }
  const Token& peek2() const { return toks[std::min(i + 1, toks.size() - 1)]; }
  Token eat() { return toks[i++]; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg + " near '" +
                          (peek().kind == Tok::End ? "<end>" : peek().text) +
                          "'",
                      peek().line, peek().col);
  }
  Token expect(Tok k, const char* what) {
    if (peek().kind != k) fail(std::string("expected ") + what);
    return eat();
  }

  Context known_context() const {
    Context c;
    for (const auto& [x, a] : scope)
      if (a) c = c.extended(x, *a);
    return c;
  }

  std::optional<TypeExpr> lookup_scope(const Ident& x) const {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == x) return it->second ? *it->second
                                            : std::optional<TypeExpr>();
    return std::nullopt;
  }

  bool in_scope(const Ident& x) const {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == x) return true;
    return false;
  }

  // ---- types ----

  TypeExpr parse_type() { return parse_arrow(); }

  TypeExpr parse_arrow() {
    TypeExpr lhs = parse_sum();
    if (peek().kind == Tok::Arrow) {
      eat();
      return TypeExpr::arrow(lhs, Effect::top(), parse_arrow());
    }
    if (peek().kind == Tok::EffArrowL) {
      eat();
      std::vector<Ident> ops;
      if (peek().kind == Tok::Ident) {
        ops.push_back(parse_op_name());
        while (peek().kind == Tok::Comma) {
          eat();
          ops.push_back(parse_op_name());
        }
      }
      expect(Tok::EffArrowR, "'}->'");
      return TypeExpr::arrow(lhs, Effect::of(std::move(ops)), parse_arrow());
    }
    return lhs;
  }

  Ident parse_op_name() {
    Token t = expect(Tok::Ident, "operation name");
    if (!sig.has_op(t.text))
      throw UnknownName("undeclared operation '" + t.text + "' at line " +
                        std::to_string(t.line));
    return t.text;
  }

  TypeExpr parse_sum() {
    TypeExpr lhs = parse_prod();
    while (peek().kind == Tok::Plus) {
      eat();
      lhs = TypeExpr::sum(lhs, parse_prod());
    }
    return lhs;
  }

  TypeExpr parse_prod() {
    TypeExpr lhs = parse_type_atom();
    while (peek().kind == Tok::Star) {
      eat();
      lhs = TypeExpr::prod(lhs, parse_type_atom());
    }
    return lhs;
  }

  TypeExpr parse_type_atom() {
    if (peek().kind == Tok::LParen) {
      eat();
      TypeExpr t = parse_type();
      expect(Tok::RParen, "')'");
      return t;
    }
    Token t = expect(Tok::Ident, "type");
    if (t.text == "unit") return TypeExpr::unit();
    if (t.text == "0") return TypeExpr::empty();
    if (!sig.has_base(t.text))
      throw UnknownName("undeclared base type '" + t.text + "' at line " +
                        std::to_string(t.line));
    return TypeExpr::base(t.text);
  }

  // ---- terms ----

  Term parse_term() {
    if (peek().kind == Tok::Backslash) return parse_lam();
    if (peek().kind == Tok::Ident && peek().text == "let") return parse_let();
    if (peek().kind == Tok::Ident && peek().text == "case")
      return parse_case();
    return parse_app();
  }

  Term parse_lam() {
    expect(Tok::Backslash, "'\\'");
    expect(Tok::LParen, "'('");
    Token x = expect(Tok::Ident, "binder");
    if (is_keyword(x.text)) fail("keyword used as binder");
    expect(Tok::Colon, "':'");
    TypeExpr a = parse_type();
    expect(Tok::RParen, "')'");
    expect(Tok::Dot, "'.'");
    scope.emplace_back(x.text, a);
    Term body = parse_term();
    scope.pop_back();
    return Term::lam(x.text, a, body);
  }

  Term parse_let() {
    eat();  // let
    Token x = expect(Tok::Ident, "binder");
    if (is_keyword(x.text)) fail("keyword used as binder");
    expect(Tok::Equals, "'='");
    Term bound = parse_term();
    Token inTok = expect(Tok::Ident, "'in'");
    if (inTok.text != "in") fail("expected 'in'");
    TypeExpr a;
    try {
      a = infer(sig, known_context(), bound).first;
    } catch (const TypeError& e) {
      throw SyntaxError(
          std::string("cannot infer the type of a let-bound term: ") +
              e.what(),
          x.line, x.col);
    }
    scope.emplace_back(x.text, a);
    Term body = parse_term();
    scope.pop_back();
    return Term::app(Term::lam(x.text, a, body), bound);
  }

  Term parse_case() {
    eat();  // case
    Term scrut = parse_term();
    Token ofTok = expect(Tok::Ident, "'of'");
    if (ofTok.text != "of") fail("expected 'of'");
    expect(Tok::LBrace, "'{'");
    Token inlTok = expect(Tok::Ident, "'inl'");
    if (inlTok.text != "inl") fail("expected 'inl'");
    Token x = expect(Tok::Ident, "binder");
    expect(Tok::Arrow, "'->'");
    // Binder types come from the scrutinee when inferable; otherwise the
    // branches parse with unknown binder types (enough unless they contain
    // a let that needs them).
    std::optional<TypeExpr> ta, tb;
    try {
      TypeExpr s = infer(sig, known_context(), scrut).first;
      if (s.kind() == TypeExpr::Kind::Sum) {
        ta = s.left();
        tb = s.right();
      }
    } catch (const TypeError&) {
    }
    scope.emplace_back(x.text, ta);
    Term n1 = parse_term();
    scope.pop_back();
    expect(Tok::Bar, "'|'");
    Token inrTok = expect(Tok::Ident, "'inr'");
    if (inrTok.text != "inr") fail("expected 'inr'");
    Token y = expect(Tok::Ident, "binder");
    expect(Tok::Arrow, "'->'");
    scope.emplace_back(y.text, tb);
    Term n2 = parse_term();
    scope.pop_back();
    expect(Tok::RBrace, "'}'");
    return Term::case_of(scrut, x.text, n1, y.text, n2);
  }

  bool starts_unary() const {
    switch (peek().kind) {
      case Tok::LParen:
        return true;
      case Tok::Ident: {
        const std::string& s = peek().text;
        // `of`/`in` end an enclosing construct; `let`/`case` need parens
        // in argument position.
        return !(s == "of" || s == "in" || s == "let" || s == "case");
      }
      default:
        return false;
    }
  }

  Term parse_app() {
    Term head = parse_unary();
    while (starts_unary()) head = Term::app(head, parse_unary());
    return head;
  }

  Term parse_unary() {
    if (peek().kind == Tok::Ident && !in_scope(peek().text)) {
      const std::string& s = peek().text;
      if (s == "fst") {
        eat();
        return Term::fst(parse_unary());
      }
      if (s == "snd") {
        eat();
        return Term::snd(parse_unary());
      }
      if (s == "absurd") {
        eat();
        return Term::absurd(parse_unary());
      }
      if (s == "inl") {
        eat();
        return Term::inl(parse_unary());
      }
      if (s == "inr") {
        eat();
        return Term::inr(parse_unary());
      }
      if (sig.has_op(s)) {
        eat();
        return Term::op_app(s, parse_unary());
      }
    }
    return parse_atom();
  }

  Term parse_atom() {
    if (peek().kind == Tok::LParen) {
      eat();
      if (peek().kind == Tok::RParen) {
        eat();
        return Term::unit_val();
      }
      Term m = parse_term();
      if (peek().kind == Tok::Comma) {
        eat();
        Term n = parse_term();
        expect(Tok::RParen, "')'");
        return Term::pair(m, n);
      }
      if (peek().kind == Tok::Colon) {
        eat();
        TypeExpr a = parse_type();
        expect(Tok::Bang, "'!'");
        expect(Tok::LBrace, "'{'");
        std::vector<Ident> ops;
        if (peek().kind == Tok::Ident) {
          ops.push_back(parse_op_name());
          while (peek().kind == Tok::Comma) {
            eat();
            ops.push_back(parse_op_name());
          }
        }
        expect(Tok::RBrace, "'}'");
        expect(Tok::RParen, "')'");
        return Term::ascribe(m, a, Effect::of(std::move(ops)));
      }
      expect(Tok::RParen, "')'");
      return m;
    }
    Token t = expect(Tok::Ident, "term");
    if (is_keyword(t.text) && !in_scope(t.text))
      fail("keyword '" + t.text + "' cannot appear here");
    if (in_scope(t.text)) return Term::var(t.text);
    if (sig.has_const(t.text)) return Term::cnst(t.text);
    if (sig.has_op(t.text))
      throw SyntaxError("operation '" + t.text + "' needs an argument",
                        t.line, t.col);
    // Free identifiers parse as variables; typing reports unbound ones.
    return Term::var(t.text);
  }
};

}  // namespace

Term parse_term(const std::string& text, const Signature& sig) {
  Parser p(text, sig);
  Term m = p.parse_term();
  if (p.peek().kind != Tok::End) p.fail("trailing input");
  return m;
}

TypeExpr parse_type(const std::string& text, const Signature& sig) {
  Parser p(text, sig);
  TypeExpr a = p.parse_type();
  if (p.peek().kind != Tok::End) p.fail("trailing input");
  return a;
}

// ---- erasure ----------------------------------------------------------------

TypeExpr erase_type(const TypeExpr& a) {
  switch (a.kind()) {
    case TypeExpr::Kind::Base:
    case TypeExpr::Kind::Unit:
    case TypeExpr::Kind::Empty:
      return a;
    case TypeExpr::Kind::Prod:
      return TypeExpr::prod(erase_type(a.left()), erase_type(a.right()));
    case TypeExpr::Kind::Sum:
      return TypeExpr::sum(erase_type(a.left()), erase_type(a.right()));
    case TypeExpr::Kind::Arrow:
      return TypeExpr::arrow(erase_type(a.left()), Effect::top(),
                             erase_type(a.right()));
  }
  throw InternalError("erase_type: unreachable");
}

}  // namespace effet
