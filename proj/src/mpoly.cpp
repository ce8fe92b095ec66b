#include "qsb/mpoly.hpp"

#include <cctype>
#include <sstream>

namespace qsb {

const std::array<const char*, MP_NVARS> mp_var_names = {"x0", "x1", "x2",
                                                        "y0", "y1", "y2", "z"};

static void mp_insert(MPoly& f, const MExp& e, const Value& c) {
  if (v_is_zero(c)) return;
  auto it = f.terms.find(e);
  if (it == f.terms.end()) {
    f.terms.emplace(e, c);
    return;
  }
  it->second = v_add(it->second, c);
  if (v_is_zero(it->second)) f.terms.erase(it);
}

MPoly mp_zero(const FieldPtr& F) { return MPoly{F, {}}; }

MPoly mp_const(const Value& c) {
  MPoly f{c.F, {}};
  mp_insert(f, MExp{}, c);
  return f;
}

MPoly mp_var(const FieldPtr& F, int i) {
  MExp e{};
  e[static_cast<size_t>(i)] = 1;
  MPoly f{F, {}};
  mp_insert(f, e, v_one(F));
  return f;
}

MPoly mp_monomial(const Value& c, const MExp& e) {
  MPoly f{c.F, {}};
  mp_insert(f, e, c);
  return f;
}

MPoly mp_add(const MPoly& a, const MPoly& b) {
  MPoly out = a;
  for (const auto& [e, c] : b.terms) mp_insert(out, e, c);
  return out;
}

MPoly mp_neg(const MPoly& a) {
  MPoly out = a;
  for (auto& [e, c] : out.terms) c = v_neg(c);
  return out;
}

MPoly mp_sub(const MPoly& a, const MPoly& b) { return mp_add(a, mp_neg(b)); }

MPoly mp_mul(const MPoly& a, const MPoly& b) {
  MPoly out{a.F, {}};
  for (const auto& [ea, ca] : a.terms)
    for (const auto& [eb, cb] : b.terms) {
      MExp e;
      for (int i = 0; i < MP_NVARS; ++i) {
        int s = ea[static_cast<size_t>(i)] + eb[static_cast<size_t>(i)];
        if (s > 255) throw Error("DegreeOverflow", "monomial exponent exceeds 255");
        e[static_cast<size_t>(i)] = static_cast<uint8_t>(s);
      }
      mp_insert(out, e, v_mul(ca, cb));
    }
  return out;
}

MPoly mp_scal(const Value& c, const MPoly& a) {
  if (v_is_zero(c)) return mp_zero(a.F);
  MPoly out = a;
  for (auto& [e, v] : out.terms) v = v_mul(c, v);
  return out;
}

MPoly mp_pow(const MPoly& a, int e) {
  MPoly out = mp_const(v_one(a.F));
  for (int i = 0; i < e; ++i) out = mp_mul(out, a);
  return out;
}

bool mp_is_zero(const MPoly& a) { return a.terms.empty(); }

bool mp_eq(const MPoly& a, const MPoly& b) { return mp_is_zero(mp_sub(a, b)); }

static int exp_total(const MExp& e) {
  int d = 0;
  for (int i = 0; i < MP_NVARS; ++i) d += e[static_cast<size_t>(i)];
  return d;
}

int mp_total_deg(const MPoly& a) {
  int d = -1;
  for (const auto& [e, c] : a.terms) d = std::max(d, exp_total(e));
  return d;
}

int mp_deg_in(const MPoly& a, int i) {
  int d = -1;
  for (const auto& [e, c] : a.terms) d = std::max(d, static_cast<int>(e[static_cast<size_t>(i)]));
  return d;
}

bool mp_is_homogeneous(const MPoly& a) {
  int d = -2;
  for (const auto& [e, c] : a.terms) {
    if (d == -2) d = exp_total(e);
    else if (exp_total(e) != d) return false;
  }
  return true;
}

MPoly mp_deriv(const MPoly& a, int i) {
  MPoly out{a.F, {}};
  for (const auto& [e, c] : a.terms) {
    int k = e[static_cast<size_t>(i)];
    if (k == 0) continue;
    MExp e2 = e;
    e2[static_cast<size_t>(i)] = static_cast<uint8_t>(k - 1);
    mp_insert(out, e2, v_mul(v_int(a.F, k), c));
  }
  return out;
}

MPoly mp_compose(const MPoly& a, const std::array<MPoly, MP_NVARS>& images) {
  // powers[i][k] = images[i]^k, filled on demand
  std::array<std::vector<MPoly>, MP_NVARS> powers;
  for (int i = 0; i < MP_NVARS; ++i)
    powers[static_cast<size_t>(i)].push_back(mp_const(v_one(a.F)));
  MPoly out = mp_zero(a.F);
  for (const auto& [e, c] : a.terms) {
    MPoly term = mp_const(c);
    for (int i = 0; i < MP_NVARS; ++i) {
      auto& pw = powers[static_cast<size_t>(i)];
      int k = e[static_cast<size_t>(i)];
      while (static_cast<int>(pw.size()) <= k)
        pw.push_back(mp_mul(pw.back(), images[static_cast<size_t>(i)]));
      if (k) term = mp_mul(term, pw[static_cast<size_t>(k)]);
    }
    out = mp_add(out, term);
  }
  return out;
}

Value mp_eval(const MPoly& a, const std::array<Value, MP_NVARS>& pt) {
  Value out = v_zero(a.F);
  for (const auto& [e, c] : a.terms) {
    Value t = c;
    for (int i = 0; i < MP_NVARS; ++i)
      if (e[static_cast<size_t>(i)])
        t = v_mul(t, v_pow(pt[static_cast<size_t>(i)], e[static_cast<size_t>(i)]));
    out = v_add(out, t);
  }
  return out;
}

int mp_var_multiplicity(const MPoly& a, int i) {
  int m = 255;
  for (const auto& [e, c] : a.terms) m = std::min(m, static_cast<int>(e[static_cast<size_t>(i)]));
  return a.terms.empty() ? 0 : m;
}

MPoly mp_var_divide(const MPoly& a, int i, int e) {
  MPoly out{a.F, {}};
  for (const auto& [ex, c] : a.terms) {
    if (ex[static_cast<size_t>(i)] < e)
      throw Error("InexactDivision", "variable power does not divide every term");
    MExp e2 = ex;
    e2[static_cast<size_t>(i)] = static_cast<uint8_t>(ex[static_cast<size_t>(i)] - e);
    out.terms.emplace(e2, c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// gcd of homogeneous polynomials in x0, x1, x2
// ---------------------------------------------------------------------------

// Scale so the lexicographically largest monomial has coefficient 1.
static MPoly mp_normalize(const MPoly& a) {
  if (a.terms.empty()) return a;
  return mp_scal(v_inv(a.terms.rbegin()->second), a);
}

// f(1, x1, x2) as a polynomial in x2 with coefficients in F1 = F(x1).
static VPoly dehom_bivar(const FieldPtr& F1, const MPoly& f) {
  VPoly out;
  Value t = v_gen(F1);
  for (const auto& [e, c] : f.terms) {
    int b = e[2];
    if (static_cast<int>(out.size()) <= b) out.resize(static_cast<size_t>(b) + 1, v_zero(F1));
    out[static_cast<size_t>(b)] =
        v_add(out[static_cast<size_t>(b)], v_mul(v_embed(F1, c), v_pow(t, e[1])));
  }
  return p_trim(out);
}

// A univariate polynomial over F as a Value of F1 = F(x1).
static Value upoly_as_value(const FieldPtr& F1, const VPoly& f) {
  Value out = v_zero(F1);
  Value t = v_gen(F1);
  for (size_t i = f.size(); i-- > 0;) out = v_add(v_mul(out, t), v_embed(F1, f[i]));
  return out;
}

// Monic gcd over F of the numerators of the (polynomial) coefficients.
static VPoly content_x1(const FieldPtr& F, const VPoly& f) {
  VPoly c;
  for (const auto& v : f) {
    if (v_is_zero(v)) continue;
    if (p_deg(v.den) != 0) throw Error("InternalError", "content of a non-polynomial coefficient");
    c = c.empty() ? p_monic(F, v.num) : p_gcd(F, c, v.num);
  }
  return c;
}

static VPoly clear_and_primitive(const FieldPtr& F, const FieldPtr& F1, VPoly f) {
  Value m = v_one(F1);
  for (const auto& v : f)
    if (!v_is_zero(v) && p_deg(v.den) > 0) m = v_mul(m, upoly_as_value(F1, v.den));
  f = p_scal(m, f);
  VPoly c = content_x1(F, f);
  return p_scal(v_inv(upoly_as_value(F1, c)), f);
}

// Rebuild an MPoly in x1, x2 from a polynomial in x2 with polynomial
// coefficients in x1.
static MPoly bivar_to_mpoly(const FieldPtr& F, const FieldPtr& F1, const VPoly& f) {
  MPoly out = mp_zero(F);
  for (size_t b = 0; b < f.size(); ++b) {
    const Value& cv = f[b];
    if (v_is_zero(cv)) continue;
    if (p_deg(cv.den) != 0) throw Error("InternalError", "non-polynomial bivariate coefficient");
    Value dinv = v_inv(cv.den[0]);
    for (size_t a = 0; a < cv.num.size(); ++a) {
      MExp e{};
      e[1] = static_cast<uint8_t>(a);
      e[2] = static_cast<uint8_t>(b);
      mp_insert(out, e, v_mul(dinv, cv.num[a]));
    }
  }
  (void)F1;
  return out;
}

static void require_homog3(const MPoly& a, const char* who) {
  for (const auto& [e, c] : a.terms)
    for (int i = 3; i < MP_NVARS; ++i)
      if (e[static_cast<size_t>(i)])
        throw Error("PreconditionViolation", std::string(who) + " needs a polynomial in x0, x1, x2");
  if (!mp_is_homogeneous(a))
    throw Error("PreconditionViolation", std::string(who) + " needs a homogeneous polynomial");
}

MPoly mp_gcd_homog3(const MPoly& a, const MPoly& b) {
  require_homog3(a, "mp_gcd_homog3");
  require_homog3(b, "mp_gcd_homog3");
  if (mp_is_zero(a)) return mp_normalize(b);
  if (mp_is_zero(b)) return mp_normalize(a);
  const FieldPtr& F = a.F;
  // split off the pure variable powers of each argument
  MPoly f0 = a, g0 = b;
  MExp common{};
  for (int i = 0; i < 3; ++i) {
    int ea = mp_var_multiplicity(f0, i), eb = mp_var_multiplicity(g0, i);
    common[static_cast<size_t>(i)] = static_cast<uint8_t>(std::min(ea, eb));
    f0 = mp_var_divide(f0, i, ea);
    g0 = mp_var_divide(g0, i, eb);
  }
  MPoly mono = mp_monomial(v_one(F), common);
  if (mp_total_deg(f0) == 0 || mp_total_deg(g0) == 0) return mp_normalize(mono);
  // x0 divides neither f0 nor g0, so their gcd is recovered exactly from the
  // dehomogenizations at x0 = 1 (Gauss: content in k[x1] times primitive part)
  FieldPtr F1 = FieldTower::function_field(F, "x1");
  VPoly f1 = dehom_bivar(F1, f0), g1 = dehom_bivar(F1, g0);
  VPoly cf = content_x1(F, f1), cg = content_x1(F, g1);
  VPoly cgcd = p_gcd(F, cf, cg);
  VPoly ppf = p_scal(v_inv(upoly_as_value(F1, cf)), f1);
  VPoly ppg = p_scal(v_inv(upoly_as_value(F1, cg)), g1);
  VPoly g2 = p_gcd(F1, ppf, ppg);
  g2 = clear_and_primitive(F, F1, g2);
  MPoly h = bivar_to_mpoly(F, F1, g2);
  // fold the content gcd (a polynomial in x1 alone) back in
  MPoly cpoly = mp_zero(F);
  for (size_t i = 0; i < cgcd.size(); ++i) {
    MExp e{};
    e[1] = static_cast<uint8_t>(i);
    mp_insert(cpoly, e, cgcd[i]);
  }
  if (!mp_is_zero(cpoly)) h = mp_mul(h, cpoly);
  // rehomogenize with x0 to the total degree of the dehomogenized gcd
  int D = mp_total_deg(h);
  MPoly out = mp_zero(F);
  for (const auto& [e, c] : h.terms) {
    MExp e2 = e;
    e2[0] = static_cast<uint8_t>(D - e[1] - e[2]);
    mp_insert(out, e2, c);
  }
  return mp_normalize(mp_mul(out, mono));
}

// ---------------------------------------------------------------------------
// parsing and printing
// ---------------------------------------------------------------------------

namespace {

struct MParser {
  const FieldPtr& F;
  const std::string& s;
  size_t i{0};

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

  MPoly expr() {
    MPoly out = term();
    for (;;) {
      skip();
      if (eat('+')) out = mp_add(out, term());
      else if (eat('-')) out = mp_sub(out, term());
      else return out;
    }
  }

  MPoly term() {
    MPoly out = factor();
    for (;;) {
      skip();
      if (eat('*')) out = mp_mul(out, factor());
      else if (eat('/')) {
        MPoly d = factor();
        if (d.terms.size() != 1 || exp_total(d.terms.begin()->first) != 0)
          throw Error("ParseError", "division only by a nonzero constant");
        out = mp_scal(v_inv(d.terms.begin()->second), out);
      } else return out;
    }
  }

  MPoly factor() {
    skip();
    if (eat('-')) return mp_neg(factor());
    MPoly out = atom();
    skip();
    if (eat('^')) {
      skip();
      size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j == i) throw Error("ParseError", "exponent expected after ^");
      int e = std::stoi(s.substr(i, j - i));
      i = j;
      out = mp_pow(out, e);
    }
    return out;
  }

  MPoly atom() {
    skip();
    if (eat('(')) {
      MPoly out = expr();
      if (!eat(')')) throw Error("ParseError", "expected )");
      return out;
    }
    if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      long n = std::stol(s.substr(i, j - i));
      i = j;
      return mp_const(v_int(F, n));
    }
    if (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) {
      size_t j = i;
      while (j < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
        ++j;
      std::string name = s.substr(i, j - i);
      i = j;
      for (int v = 0; v < MP_NVARS; ++v)
        if (name == mp_var_names[static_cast<size_t>(v)]) return mp_var(F, v);
      throw Error("ParseError", "unknown variable " + name);
    }
    throw Error("ParseError", "unexpected input at position " + std::to_string(i));
  }
};

bool atom_like(const std::string& s) {
  return s.find_first_of("+*/^ ") == std::string::npos &&
         s.find('-', 1) == std::string::npos && s[0] != '-';
}

} // namespace

MPoly mp_parse(const FieldPtr& F, const std::string& text) {
  MParser p{F, text};
  MPoly out = p.expr();
  p.skip();
  if (p.i != text.size())
    throw Error("ParseError", "trailing input at position " + std::to_string(p.i));
  return out;
}

std::string MPoly::str() const {
  if (terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
    if (!first) os << " + ";
    first = false;
    const MExp& e = it->first;
    std::string c = it->second.str();
    if (exp_total(e) == 0) {
      os << (atom_like(c) || c[0] == '-' ? c : "(" + c + ")");
      continue;
    }
    if (c == "1") {
    } else if (c == "-1") {
      os << "-";
    } else {
      os << (atom_like(c) ? c : "(" + c + ")") << "*";
    }
    bool firstv = true;
    for (int i = 0; i < MP_NVARS; ++i) {
      int k = e[static_cast<size_t>(i)];
      if (!k) continue;
      if (!firstv) os << "*";
      firstv = false;
      os << mp_var_names[static_cast<size_t>(i)];
      if (k > 1) os << "^" << k;
    }
  }
  return os.str();
}

} // namespace qsb
