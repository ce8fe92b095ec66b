#include "qsb/fieldtower.hpp"

#include <cctype>
#include <sstream>

namespace qsb {

// ---------------------------------------------------------------------------
// FieldTower
// ---------------------------------------------------------------------------

static bool is_prime_long(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

FieldPtr FieldTower::rationals() {
  static FieldPtr Q = [] {
    auto f = std::make_shared<FieldTower>();
    f->kind = FieldKind::Rationals;
    return FieldPtr(f);
  }();
  return Q;
}

FieldPtr FieldTower::prime_field(long p) {
  if (!is_prime_long(p)) throw Error("UnsupportedDomain", "modulus " + std::to_string(p) + " is not prime");
  if (p == 2) throw Error("UnsupportedDomain", "characteristic 2 is out of scope");
  auto f = std::make_shared<FieldTower>();
  f->kind = FieldKind::PrimeField;
  f->p = p;
  return f;
}

FieldPtr FieldTower::function_field(const FieldPtr& base, const std::string& var) {
  if (!base) throw Error("UnsupportedDomain", "null base");
  if (base->kind == FieldKind::DualNumbers)
    throw Error("UnsupportedDomain", "function field over dual numbers");
  if (var.empty() || !std::isalpha(static_cast<unsigned char>(var[0])))
    throw Error("UnsupportedDomain", "bad variable name '" + var + "'");
  // Reject a variable name already used below; element parsing would be ambiguous.
  for (const FieldTower* t = base.get(); t; t = t->base.get())
    if (t->kind == FieldKind::RationalFunctionField && t->var == var)
      throw Error("UnsupportedDomain", "variable '" + var + "' already used in tower");
  auto f = std::make_shared<FieldTower>();
  f->kind = FieldKind::RationalFunctionField;
  f->base = base;
  f->var = var;
  if (f->depth() > 4) throw Error("UnsupportedDomain", "tower too deep");
  return f;
}

FieldPtr FieldTower::quadratic_etale(const FieldPtr& base, const Value& d) {
  if (!base) throw Error("UnsupportedDomain", "null base");
  if (!base->same(*d.F)) throw Error("UnsupportedDomain", "d must lie in the base field");
  if (base->kind == FieldKind::QuadraticEtale || base->kind == FieldKind::DualNumbers)
    throw Error("UnsupportedDomain", "iterated quadratic/dual extensions are out of scope");
  if (v_is_zero(d)) throw Error("ZeroElement", "etale extension requires d != 0");
  auto f = std::make_shared<FieldTower>();
  f->kind = FieldKind::QuadraticEtale;
  f->base = base;
  f->ext_d = std::make_shared<Value>(d);
  return f;
}

FieldPtr FieldTower::dual_numbers(const FieldPtr& base) {
  if (!base) throw Error("UnsupportedDomain", "null base");
  // One nested dual level is allowed (used for k[x]/(x^2) tensor k[eps]/(eps^2)).
  if (base->kind == FieldKind::DualNumbers && base->base->kind == FieldKind::DualNumbers)
    throw Error("UnsupportedDomain", "dual numbers nested deeper than twice");
  auto f = std::make_shared<FieldTower>();
  f->kind = FieldKind::DualNumbers;
  f->base = base;
  return f;
}

bool FieldTower::same(const FieldTower& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case FieldKind::Rationals: return true;
    case FieldKind::PrimeField: return p == o.p;
    case FieldKind::RationalFunctionField: return var == o.var && base->same(*o.base);
    case FieldKind::QuadraticEtale:
      return base->same(*o.base) && v_eq(*ext_d, *o.ext_d);
    case FieldKind::DualNumbers: return base->same(*o.base);
  }
  return false;
}

bool FieldTower::is_field() const {
  switch (kind) {
    case FieldKind::Rationals:
    case FieldKind::PrimeField: return true;
    case FieldKind::RationalFunctionField: return base->is_field();
    case FieldKind::QuadraticEtale: return base->is_field(); // treated as a field when d is a nonsquare
    case FieldKind::DualNumbers: return false;
  }
  return false;
}

long FieldTower::characteristic() const {
  const FieldTower* t = this;
  while (t->base) t = t->base.get();
  return t->kind == FieldKind::PrimeField ? t->p : 0;
}

int FieldTower::depth() const {
  int d = 1;
  for (const FieldTower* t = base.get(); t; t = t->base.get()) ++d;
  return d;
}

std::string FieldTower::descriptor() const {
  switch (kind) {
    case FieldKind::Rationals: return "Q";
    case FieldKind::PrimeField: return "Fp:" + std::to_string(p);
    case FieldKind::RationalFunctionField: return "Fun:" + base->descriptor() + ":" + var;
    case FieldKind::QuadraticEtale: return "Ext:" + base->descriptor() + ":" + ext_d->str();
    case FieldKind::DualNumbers: return "Dual:" + base->descriptor();
  }
  return "?";
}

FieldPtr FieldTower::parse_descriptor(const std::string& s) {
  // Recursive-descent over the ':'-separated descriptor syntax.  The final
  // component of Fun is the variable; for Ext it is an element expression of
  // the base (which may itself contain ':'? no - element expressions never do).
  if (s == "Q") return rationals();
  if (s.rfind("Fp:", 0) == 0) {
    long p = 0;
    try {
      p = std::stol(s.substr(3));
    } catch (...) {
      throw Error("UnsupportedDomain", "bad prime in descriptor '" + s + "'");
    }
    return prime_field(p);
  }
  auto tail_split = [&](size_t prefix) {
    // Split "<base>:<last>" at the final ':' of the remainder.
    std::string rest = s.substr(prefix);
    size_t pos = rest.rfind(':');
    if (pos == std::string::npos)
      throw Error("UnsupportedDomain", "malformed descriptor '" + s + "'");
    return std::pair<std::string, std::string>(rest.substr(0, pos), rest.substr(pos + 1));
  };
  if (s.rfind("Fun:", 0) == 0) {
    auto [b, v] = tail_split(4);
    return function_field(parse_descriptor(b), v);
  }
  if (s.rfind("Ext:", 0) == 0) {
    auto [b, dtxt] = tail_split(4);
    FieldPtr base = parse_descriptor(b);
    return quadratic_etale(base, parse_value(base, dtxt));
  }
  if (s.rfind("Dual:", 0) == 0) return dual_numbers(parse_descriptor(s.substr(5)));
  throw Error("UnsupportedDomain", "unknown field descriptor '" + s + "'");
}

// ---------------------------------------------------------------------------
// Value construction
// ---------------------------------------------------------------------------

static void require_same(const Value& a, const Value& b) {
  if (!a.F || !b.F) throw Error("UnsupportedDomain", "uninitialized value");
  if (!a.F->same(*b.F))
    throw Error("UnsupportedDomain",
                "mixed domains " + a.F->descriptor() + " vs " + b.F->descriptor());
}

Value v_zero(const FieldPtr& F) { return v_int(F, 0); }
Value v_one(const FieldPtr& F) { return v_int(F, 1); }

Value v_rat(const FieldPtr& F, const Rat& x) {
  Value v;
  v.F = F;
  switch (F->kind) {
    case FieldKind::Rationals:
      v.q = x;
      return v;
    case FieldKind::PrimeField: {
      BigInt n = boost::multiprecision::numerator(x) % F->p;
      BigInt d = boost::multiprecision::denominator(x) % F->p;
      if (d == 0) throw Error("ZeroElement", "denominator divisible by p");
      long nn = static_cast<long>((n + F->p) % F->p);
      long dd = static_cast<long>((d + F->p) % F->p);
      Value t;
      t.F = F;
      t.r = nn;
      if (dd != 1) {
        Value dv;
        dv.F = F;
        dv.r = dd;
        t = v_div(t, dv);
      }
      return t;
    }
    default: {
      Value b = v_rat(F->base, x);
      return v_embed(F, b);
    }
  }
}

Value v_int(const FieldPtr& F, long n) { return v_rat(F, Rat(n)); }

Value v_gen(const FieldPtr& F) {
  Value v;
  v.F = F;
  switch (F->kind) {
    case FieldKind::RationalFunctionField:
      v.num = {v_zero(F->base), v_one(F->base)};
      v.den = {v_one(F->base)};
      return v;
    case FieldKind::QuadraticEtale:
    case FieldKind::DualNumbers:
      v.pr = {v_zero(F->base), v_one(F->base)};
      return v;
    default: throw Error("UnsupportedDomain", "field " + F->descriptor() + " has no generator");
  }
}

Value v_embed(const FieldPtr& F, const Value& x) {
  if (F->same(*x.F)) return x;
  if (!F->base) throw Error("UnsupportedDomain", "cannot embed " + x.F->descriptor() + " into " + F->descriptor());
  Value b = v_embed(F->base, x);
  Value v;
  v.F = F;
  if (F->kind == FieldKind::RationalFunctionField) {
    v.num = {b};
    v.den = {v_one(F->base)};
    if (v_is_zero(b)) v.num.clear();
  } else {
    v.pr = {b, v_zero(F->base)};
  }
  return v;
}

bool v_descends(const Value& x, const FieldPtr& anc, Value* out) {
  if (x.F->same(*anc)) {
    if (out) *out = x;
    return true;
  }
  if (!x.F->base) return false;
  Value b;
  switch (x.F->kind) {
    case FieldKind::RationalFunctionField:
      if (p_deg(x.num) > 0 || p_deg(x.den) > 0) return false;
      b = x.num.empty() ? v_zero(x.F->base) : v_div(x.num[0], x.den[0]);
      break;
    case FieldKind::QuadraticEtale:
    case FieldKind::DualNumbers:
      if (!v_is_zero(x.pr[1])) return false;
      b = x.pr[0];
      break;
    default: return false;
  }
  return v_descends(b, anc, out);
}

// ---------------------------------------------------------------------------
// Value arithmetic
// ---------------------------------------------------------------------------

bool v_is_zero(const Value& a) {
  if (!a.F) throw Error("UnsupportedDomain", "uninitialized value");
  switch (a.F->kind) {
    case FieldKind::Rationals: return a.q == 0;
    case FieldKind::PrimeField: return a.r == 0;
    case FieldKind::RationalFunctionField: return a.num.empty();
    default: return v_is_zero(a.pr[0]) && v_is_zero(a.pr[1]);
  }
}

bool v_eq(const Value& a, const Value& b) {
  require_same(a, b);
  switch (a.F->kind) {
    case FieldKind::Rationals: return a.q == b.q;
    case FieldKind::PrimeField: return a.r == b.r;
    case FieldKind::RationalFunctionField: return p_eq(a.num, b.num) && p_eq(a.den, b.den);
    default: return v_eq(a.pr[0], b.pr[0]) && v_eq(a.pr[1], b.pr[1]);
  }
}

static Value fun_make(const FieldPtr& F, VPoly num, VPoly den) {
  // Normalize a fraction of polynomials over F->base.
  const FieldPtr& K = F->base;
  num = p_trim(std::move(num));
  den = p_trim(std::move(den));
  if (den.empty()) throw Error("ZeroElement", "zero denominator");
  Value v;
  v.F = F;
  if (num.empty()) {
    v.num = {};
    v.den = {v_one(K)};
    return v;
  }
  VPoly g = p_gcd(K, num, den);
  if (p_deg(g) > 0) {
    VPoly q, rm;
    p_divmod(K, num, g, q, rm);
    num = q;
    p_divmod(K, den, g, q, rm);
    den = q;
  }
  Value lc = den.back();
  if (!v_eq(lc, v_one(K))) {
    Value il = v_inv(lc);
    num = p_scal(il, num);
    den = p_scal(il, den);
  }
  v.num = std::move(num);
  v.den = std::move(den);
  return v;
}

Value v_add(const Value& a, const Value& b) {
  require_same(a, b);
  Value v;
  v.F = a.F;
  switch (a.F->kind) {
    case FieldKind::Rationals: v.q = a.q + b.q; return v;
    case FieldKind::PrimeField: v.r = (a.r + b.r) % a.F->p; return v;
    case FieldKind::RationalFunctionField: {
      const FieldPtr& K = a.F->base;
      VPoly n = p_add(K, p_mul(K, a.num, b.den), p_mul(K, b.num, a.den));
      return fun_make(a.F, n, p_mul(K, a.den, b.den));
    }
    default:
      v.pr = {v_add(a.pr[0], b.pr[0]), v_add(a.pr[1], b.pr[1])};
      return v;
  }
}

Value v_neg(const Value& a) {
  Value v;
  v.F = a.F;
  switch (a.F->kind) {
    case FieldKind::Rationals: v.q = -a.q; return v;
    case FieldKind::PrimeField: v.r = (a.F->p - a.r) % a.F->p; return v;
    case FieldKind::RationalFunctionField:
      v.num = p_neg(a.num);
      v.den = a.den;
      // keep the denominator monic: negating the numerator only is fine
      return v;
    default: v.pr = {v_neg(a.pr[0]), v_neg(a.pr[1])}; return v;
  }
}

Value v_sub(const Value& a, const Value& b) { return v_add(a, v_neg(b)); }

Value v_mul(const Value& a, const Value& b) {
  require_same(a, b);
  Value v;
  v.F = a.F;
  switch (a.F->kind) {
    case FieldKind::Rationals: v.q = a.q * b.q; return v;
    case FieldKind::PrimeField: v.r = (a.r * b.r) % a.F->p; return v;
    case FieldKind::RationalFunctionField: {
      const FieldPtr& K = a.F->base;
      return fun_make(a.F, p_mul(K, a.num, b.num), p_mul(K, a.den, b.den));
    }
    case FieldKind::QuadraticEtale: {
      const Value& d = *a.F->ext_d;
      Value x = v_add(v_mul(a.pr[0], b.pr[0]), v_mul(d, v_mul(a.pr[1], b.pr[1])));
      Value y = v_add(v_mul(a.pr[0], b.pr[1]), v_mul(a.pr[1], b.pr[0]));
      v.pr = {x, y};
      return v;
    }
    case FieldKind::DualNumbers: {
      Value x = v_mul(a.pr[0], b.pr[0]);
      Value y = v_add(v_mul(a.pr[0], b.pr[1]), v_mul(a.pr[1], b.pr[0]));
      v.pr = {x, y};
      return v;
    }
  }
  throw Error("UnsupportedDomain", "unreachable");
}

Value v_conj(const Value& a) {
  if (a.F->kind != FieldKind::QuadraticEtale && a.F->kind != FieldKind::DualNumbers)
    throw Error("UnsupportedDomain", "conjugation needs a quadratic or dual top level");
  Value v;
  v.F = a.F;
  v.pr = {a.pr[0], v_neg(a.pr[1])};
  return v;
}

Value v_norm_down(const Value& a) {
  if (a.F->kind == FieldKind::QuadraticEtale) {
    const Value& d = *a.F->ext_d;
    return v_sub(v_mul(a.pr[0], a.pr[0]), v_mul(d, v_mul(a.pr[1], a.pr[1])));
  }
  if (a.F->kind == FieldKind::DualNumbers) return v_mul(a.pr[0], a.pr[0]);
  throw Error("UnsupportedDomain", "norm needs a quadratic or dual top level");
}

Value v_inv(const Value& a) {
  if (v_is_zero(a)) throw Error("ZeroElement", "division by zero");
  Value v;
  v.F = a.F;
  switch (a.F->kind) {
    case FieldKind::Rationals: v.q = Rat(1) / a.q; return v;
    case FieldKind::PrimeField: {
      // extended Euclid
      long t = 0, nt = 1, rr = a.F->p, nr = a.r;
      while (nr != 0) {
        long qq = rr / nr;
        long tmp = t - qq * nt;
        t = nt;
        nt = tmp;
        tmp = rr - qq * nr;
        rr = nr;
        nr = tmp;
      }
      v.r = ((t % a.F->p) + a.F->p) % a.F->p;
      return v;
    }
    case FieldKind::RationalFunctionField:
      return fun_make(a.F, a.den, a.num);
    case FieldKind::QuadraticEtale: {
      Value n = v_norm_down(a);
      if (v_is_zero(n)) throw Error("ZeroDivisor", "non-invertible element of split etale algebra");
      Value ni = v_embed(a.F, v_inv(n));
      return v_mul(v_conj(a), ni);
    }
    case FieldKind::DualNumbers: {
      if (v_is_zero(a.pr[0])) throw Error("ZeroDivisor", "nilpotent element is not invertible");
      Value xi = v_inv(a.pr[0]);
      Value y = v_neg(v_mul(a.pr[1], v_mul(xi, xi)));
      v.pr = {xi, y};
      return v;
    }
  }
  throw Error("UnsupportedDomain", "unreachable");
}

Value v_div(const Value& a, const Value& b) { return v_mul(a, v_inv(b)); }

Value v_pow(const Value& a, long e) {
  if (e < 0) return v_pow(v_inv(a), -e);
  Value acc = v_one(a.F), base = a;
  while (e) {
    if (e & 1) acc = v_mul(acc, base);
    base = v_mul(base, base);
    e >>= 1;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Polynomial helpers
// ---------------------------------------------------------------------------

int p_deg(const VPoly& f) { return static_cast<int>(f.size()) - 1; }

VPoly p_trim(VPoly f) {
  while (!f.empty() && v_is_zero(f.back())) f.pop_back();
  return f;
}

VPoly p_add(const FieldPtr& K, const VPoly& a, const VPoly& b) {
  VPoly c(std::max(a.size(), b.size()), v_zero(K));
  for (size_t i = 0; i < a.size(); ++i) c[i] = a[i];
  for (size_t i = 0; i < b.size(); ++i) c[i] = v_add(c[i], b[i]);
  return p_trim(std::move(c));
}

VPoly p_neg(const VPoly& a) {
  VPoly c = a;
  for (auto& x : c) x = v_neg(x);
  return c;
}

VPoly p_sub(const FieldPtr& K, const VPoly& a, const VPoly& b) { return p_add(K, a, p_neg(b)); }

VPoly p_mul(const FieldPtr& K, const VPoly& a, const VPoly& b) {
  if (a.empty() || b.empty()) return {};
  VPoly c(a.size() + b.size() - 1, v_zero(K));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) c[i + j] = v_add(c[i + j], v_mul(a[i], b[j]));
  return p_trim(std::move(c));
}

VPoly p_scal(const Value& c, const VPoly& a) {
  VPoly r = a;
  for (auto& x : r) x = v_mul(c, x);
  return p_trim(std::move(r));
}

void p_divmod(const FieldPtr& K, const VPoly& a, const VPoly& b, VPoly& quo, VPoly& rem) {
  if (b.empty()) throw Error("ZeroElement", "polynomial division by zero");
  rem = a;
  quo.assign(a.size() > b.size() - 1 ? a.size() - b.size() + 1 : 0, v_zero(K));
  Value lcinv = v_inv(b.back());
  while (p_deg(rem) >= p_deg(b)) {
    int k = p_deg(rem) - p_deg(b);
    Value c = v_mul(rem.back(), lcinv);
    quo[k] = v_add(quo[k], c);
    for (size_t i = 0; i < b.size(); ++i)
      rem[k + i] = v_sub(rem[k + i], v_mul(c, b[i]));
    rem = p_trim(std::move(rem));
  }
  quo = p_trim(std::move(quo));
}

VPoly p_monic(const FieldPtr& K, const VPoly& a) {
  (void)K;
  if (a.empty()) return a;
  return p_scal(v_inv(a.back()), a);
}

VPoly p_gcd(const FieldPtr& K, VPoly a, VPoly b) {
  a = p_trim(std::move(a));
  b = p_trim(std::move(b));
  while (!b.empty()) {
    VPoly q, r;
    p_divmod(K, a, b, q, r);
    a = std::move(b);
    b = std::move(r);
  }
  return p_monic(K, a);
}

VPoly p_deriv(const FieldPtr& K, const VPoly& a) {
  VPoly c;
  for (size_t i = 1; i < a.size(); ++i) c.push_back(v_mul(v_int(K, static_cast<long>(i)), a[i]));
  return p_trim(std::move(c));
}

Value p_eval(const FieldPtr& K, const VPoly& a, const Value& x) {
  Value acc = v_zero(K);
  for (size_t i = a.size(); i-- > 0;) acc = v_add(v_mul(acc, x), a[i]);
  return acc;
}

bool p_eq(const VPoly& a, const VPoly& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!v_eq(a[i], b[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

static bool atom_like(const std::string& s) {
  // no top-level + or - (a leading '-' counts as non-atomic for products)
  int depth = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth == 0 && (c == '+' || (c == '-' && i > 0))) return false;
  }
  return !s.empty() && s[0] != '-';
}

std::string p_str(const VPoly& f, const std::string& var) {
  if (f.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (size_t i = f.size(); i-- > 0;) {
    if (v_is_zero(f[i])) continue;
    std::string c = f[i].str();
    if (!first) os << " + ";
    first = false;
    if (i == 0) {
      os << c;
      continue;
    }
    if (c == "1") {
    } else if (c == "-1") {
      os << "-";
    } else if (atom_like(c)) {
      os << c << "*";
    } else {
      os << "(" << c << ")*";
    }
    os << var;
    if (i > 1) os << "^" << i;
  }
  return os.str();
}

std::string Value::str() const {
  if (!F) return "<uninit>";
  switch (F->kind) {
    case FieldKind::Rationals: {
      std::ostringstream os;
      os << q;
      return os.str();
    }
    case FieldKind::PrimeField: return std::to_string(r);
    case FieldKind::RationalFunctionField: {
      std::string n = p_str(num, F->var);
      if (p_deg(den) == 0 && v_eq(den[0], v_one(F->base))) return n;
      std::string d = p_str(den, F->var);
      std::string ns = atom_like(n) ? n : "(" + n + ")";
      std::string ds = atom_like(d) ? d : "(" + d + ")";
      return ns + "/" + ds;
    }
    case FieldKind::QuadraticEtale:
    case FieldKind::DualNumbers: {
      std::string g = F->kind == FieldKind::DualNumbers ? "eps" : ("sqrt(" + F->ext_d->str() + ")");
      if (v_is_zero(pr[1])) return pr[0].str();
      std::string ys = pr[1].str();
      std::string ypart = ys == "1" ? g : (atom_like(ys) ? ys + "*" + g : "(" + ys + ")*" + g);
      if (v_is_zero(pr[0])) return ypart;
      return pr[0].str() + " + " + ypart;
    }
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Expression parser
// ---------------------------------------------------------------------------

namespace {

struct Parser {
  const FieldPtr& F;
  const std::string& s;
  size_t i = 0;

  void skip() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eat(char c) {
    skip();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) {
    throw Error("ParseError", msg + " at position " + std::to_string(i) + " in '" + s + "'");
  }

  Value expr() {
    Value v = term();
    for (;;) {
      skip();
      if (eat('+'))
        v = v_add(v, term());
      else if (eat('-'))
        v = v_sub(v, term());
      else
        return v;
    }
  }
  Value term() {
    Value v = factor();
    for (;;) {
      skip();
      if (eat('*'))
        v = v_mul(v, factor());
      else if (eat('/'))
        v = v_div(v, factor());
      else
        return v;
    }
  }
  Value factor() {
    skip();
    if (eat('-')) return v_neg(factor());
    Value v = primary();
    skip();
    if (eat('^')) {
      skip();
      bool neg = eat('-');
      size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j == i) fail("expected integer exponent");
      long e = std::stol(s.substr(i, j - i));
      i = j;
      v = v_pow(v, neg ? -e : e);
    }
    return v;
  }
  Value primary() {
    skip();
    if (i >= s.size()) fail("unexpected end of input");
    if (eat('(')) {
      Value v = expr();
      if (!eat(')')) fail("expected ')'");
      return v;
    }
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      BigInt n(s.substr(i, j - i));
      i = j;
      return v_rat(F, Rat(n));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
        ++j;
      std::string id = s.substr(i, j - i);
      i = j;
      if (id == "sqrt") {
        if (!eat('(')) fail("expected '(' after sqrt");
        Value arg = expr();
        if (!eat(')')) fail("expected ')'");
        // locate the etale level
        FieldPtr lvl = F;
        while (lvl && lvl->kind != FieldKind::QuadraticEtale) lvl = lvl->base;
        if (!lvl) fail("sqrt() used but the tower has no quadratic level");
        Value d_here = v_embed(F, v_embed(lvl, *lvl->ext_d));
        if (!v_eq(arg, d_here)) fail("sqrt argument is not the defining element of the quadratic level");
        return v_embed(F, v_gen(lvl));
      }
      if (id == "eps") {
        FieldPtr lvl = F;
        while (lvl && lvl->kind != FieldKind::DualNumbers) lvl = lvl->base;
        if (!lvl) fail("eps used but the tower has no dual-number level");
        return v_embed(F, v_gen(lvl));
      }
      // tower variable
      FieldPtr lvl = F;
      while (lvl && !(lvl->kind == FieldKind::RationalFunctionField && lvl->var == id))
        lvl = lvl->base;
      if (!lvl) fail("unknown identifier '" + id + "'");
      return v_embed(F, v_gen(lvl));
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

} // namespace

Value parse_value(const FieldPtr& F, const std::string& text) {
  Parser p{F, text};
  Value v = p.expr();
  p.skip();
  if (p.i != text.size()) p.fail("trailing input");
  return v;
}

} // namespace qsb
