#include "qsb/quaternion.hpp"

#include <algorithm>

namespace qsb {

std::string QuaternionAlgebra::str() const {
  return "(" + a.str() + ", " + b.str() + ") over " + base->descriptor();
}

Quat qu_zero(const QuaternionAlgebra& Q) { return Quat(4, v_zero(Q.base)); }

Quat qu_basis(const QuaternionAlgebra& Q, int idx) {
  Quat x = qu_zero(Q);
  x[idx] = v_one(Q.base);
  return x;
}

Quat qu_add(const Quat& x, const Quat& y) { return vec_add(x, y); }
Quat qu_scal(const Value& c, const Quat& x) { return vec_scal(c, x); }

Quat qu_mul(const QuaternionAlgebra& Q, const Quat& x, const Quat& y) {
  const Value &a = Q.a, &b = Q.b;
  Quat z = qu_zero(Q);
  auto acc = [&](int i, const Value& t) { z[i] = v_add(z[i], t); };
  // 1, i, j, k components of (x0 + x1 i + x2 j + x3 k)(y0 + y1 i + y2 j + y3 k)
  acc(0, v_mul(x[0], y[0]));
  acc(0, v_mul(a, v_mul(x[1], y[1])));
  acc(0, v_mul(b, v_mul(x[2], y[2])));
  acc(0, v_neg(v_mul(a, v_mul(b, v_mul(x[3], y[3])))));
  acc(1, v_add(v_mul(x[0], y[1]), v_mul(x[1], y[0])));
  acc(1, v_mul(b, v_sub(v_mul(x[3], y[2]), v_mul(x[2], y[3]))));
  acc(2, v_add(v_mul(x[0], y[2]), v_mul(x[2], y[0])));
  acc(2, v_mul(a, v_sub(v_mul(x[1], y[3]), v_mul(x[3], y[1]))));
  acc(3, v_add(v_mul(x[0], y[3]), v_mul(x[3], y[0])));
  acc(3, v_sub(v_mul(x[1], y[2]), v_mul(x[2], y[1])));
  return z;
}

Quat qu_conj(const Quat& x) {
  return Quat{x[0], v_neg(x[1]), v_neg(x[2]), v_neg(x[3])};
}

Value qu_norm(const QuaternionAlgebra& Q, const Quat& x) {
  return qu_mul(Q, x, qu_conj(x))[0];
}

QuaternionAlgebra quat_make(const FieldPtr& base, const Value& a, const Value& b) {
  if (v_is_zero(a) || v_is_zero(b)) throw Error("ZeroElement", "quaternion symbol slot is zero");
  QuaternionAlgebra Q{base, a, b};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) {
        Quat lhs = qu_mul(Q, qu_mul(Q, qu_basis(Q, i), qu_basis(Q, j)), qu_basis(Q, k));
        Quat rhs = qu_mul(Q, qu_basis(Q, i), qu_mul(Q, qu_basis(Q, j), qu_basis(Q, k)));
        if (!vec_eq(lhs, rhs))
          throw Error("InternalError", "quaternion multiplication table not associative");
      }
  return Q;
}

QuadForm norm_form(const QuaternionAlgebra& Q) {
  return qf_diag(Q.base, {v_one(Q.base), v_neg(Q.a), v_neg(Q.b), v_mul(Q.a, Q.b)});
}

static Value vpow_z(const Value& x, long e) {
  return e >= 0 ? v_pow(x, e) : v_inv(v_pow(x, -e));
}

SquareClassResult residue_symbol(const QuaternionAlgebra& Q, const Valuation& v) {
  if (v.kind == ValKind::Padic && v.p == 2)
    throw Error("DyadicPlace", "tame residue symbol needs odd residue characteristic");
  long va = *valuation_of(Q.a, v);
  long vb = *valuation_of(Q.b, v);
  Value r = v_mul(vpow_z(Q.a, vb), vpow_z(Q.b, -va));
  if ((va * vb) % 2 != 0) r = v_neg(r);
  SquareClassResult out{r, false, std::nullopt};
  if (FieldPtr k = v.residue_field()) {
    Value res = residue_of(r, v);
    out.residue = res;
    out.trivial = is_square(res);
  } else {
    out.trivial = residue_is_square_mod(Q.base->base, v.f, residue_mod_place(r, v));
  }
  return out;
}

std::string SplitCertificate::str() const {
  std::string s;
  switch (verdict) {
    case SplitVerdict::Split: s = "split"; break;
    case SplitVerdict::Nonsplit: s = "nonsplit"; break;
    case SplitVerdict::Unknown: s = "unknown"; break;
  }
  if (zero_divisor) s += "; zero divisor " + vec_str(*zero_divisor);
  if (place) s += "; ramified at " + place->str();
  if (residue_class) s += " with residue class " + residue_class->str();
  for (long p : q_places) s += "; local obstruction at " + (p == -1 ? std::string("the real place") : "p=" + std::to_string(p));
  if (!note.empty()) s += "; " + note;
  return s;
}

// an isotropic vector of the norm form is a zero divisor of the algebra
static void attach_zero_divisor(const QuaternionAlgebra& Q, SplitCertificate& cert, long budget) {
  IsotropyResult iso;
  try {
    iso = field_isotropic_diag(Q.base, qf_diagonal_entries(norm_form(Q)), budget);
  } catch (const Error&) {
    cert.note = "witness search unsupported over this base";
    return;
  }
  if (iso.witness) {
    if (!v_is_zero(qu_norm(Q, *iso.witness)))
      throw Error("InternalError", "zero-divisor witness failed verification");
    cert.zero_divisor = *iso.witness;
  } else {
    cert.note = "zero-divisor search budget exhausted";
  }
}

static bool try_is_square(const Value& x, Value* root) {
  try {
    if (auto r = v_sqrt(x)) {
      if (root) *root = *r;
      return true;
    }
  } catch (const Error&) {
  }
  return false;
}

bool place_splits_in_etale(const Valuation& v, const Value& d) {
  long vd = *valuation_of(d, v);
  if (vd % 2 != 0) return false; // ramified
  Value unit = v_div(d, v_pow(v.uniformizer(), vd));
  if (v.kind == ValKind::Padic) {
    BigInt prod = boost::multiprecision::numerator(unit.q) *
                  boost::multiprecision::denominator(unit.q);
    return legendre(prod, v.p) == 1;
  }
  if (FieldPtr k = v.residue_field()) return is_square(residue_of(unit, v));
  return residue_is_square_mod(v.K->base, v.f, residue_mod_place(unit, v));
}

bool rational_place_splits_in_etale(long p, const Value& d) {
  if (p == -1) return d.q > 0;
  BigInt num = boost::multiprecision::numerator(d.q);
  BigInt den = boost::multiprecision::denominator(d.q);
  auto val_in = [&](BigInt x) {
    long v = 0;
    while (x % p == 0) {
      x /= p;
      ++v;
    }
    return std::pair<long, BigInt>(v, x);
  };
  auto [vn, un] = val_in(num < 0 ? -num : num);
  auto [vd2, ud] = val_in(den);
  if ((vn - vd2) % 2 != 0) return false; // ramified
  BigInt u = (num < 0 ? -un : un) * ud;  // unit part up to squares
  if (p == 2) {
    // split over Q_2 iff the unit part is 1 mod 8
    BigInt m = ((u % 8) + 8) % 8;
    return m == 1;
  }
  return legendre(u, p) == 1;
}

static std::vector<Valuation> fun_slot_places(const FieldPtr& F, const std::vector<Value>& slots) {
  const FieldPtr& base = F->base;
  std::vector<Valuation> places;
  std::vector<std::string> seen;
  auto add = [&](const Valuation& v) {
    std::string s = v.str();
    if (std::find(seen.begin(), seen.end(), s) == seen.end()) {
      seen.push_back(s);
      places.push_back(v);
    }
  };
  for (const auto& a : slots)
    for (const VPoly* part : {&a.num, &a.den}) {
      if (p_deg(*part) < 1) continue;
      for (auto& [f, e] : factor_poly_fp(base, *part)) add(Valuation::poly_place(F, f));
    }
  add(Valuation::degree_place(F));
  return places;
}

static bool is_finite_base(const FieldPtr& F) {
  if (F->kind == FieldKind::PrimeField) return true;
  return F->kind == FieldKind::QuadraticEtale && F->base->kind == FieldKind::PrimeField;
}

SplitCertificate is_split(const QuaternionAlgebra& Q, long budget) {
  SplitCertificate cert;
  const FieldPtr& F = Q.base;
  // fast paths valid over any base: a square slot or the Steinberg relation
  Value root;
  if (try_is_square(Q.a, &root)) {
    cert.verdict = SplitVerdict::Split;
    cert.zero_divisor = Quat{root, v_neg(v_one(F)), v_zero(F), v_zero(F)}; // norm a - a = 0
    if (v_is_zero(qu_norm(Q, *cert.zero_divisor))) return cert;
    cert.zero_divisor.reset();
  }
  if (try_is_square(Q.b, &root)) {
    cert.verdict = SplitVerdict::Split;
    cert.zero_divisor = Quat{root, v_zero(F), v_neg(v_one(F)), v_zero(F)};
    if (v_is_zero(qu_norm(Q, *cert.zero_divisor))) return cert;
    cert.zero_divisor.reset();
  }
  if (v_eq(v_add(Q.a, Q.b), v_one(F))) { // Steinberg: (a, 1-a) is split
    cert.verdict = SplitVerdict::Split;
    cert.zero_divisor = Quat{v_one(F), v_one(F), v_one(F), v_zero(F)}; // norm 1 - a - b
    return cert;
  }

  if (is_finite_base(F)) { // finite fields have trivial Brauer group
    cert.verdict = SplitVerdict::Split;
    attach_zero_divisor(Q, cert, budget);
    return cert;
  }

  if (F->kind == FieldKind::Rationals) {
    for (long p : hilbert_candidate_places(Q.a.q, Q.b.q))
      if (hilbert_qp(Q.a.q, Q.b.q, p) == -1) cert.q_places.push_back(p);
    if (!cert.q_places.empty()) {
      cert.verdict = SplitVerdict::Nonsplit;
      return cert;
    }
    cert.verdict = SplitVerdict::Split;
    attach_zero_divisor(Q, cert, budget);
    return cert;
  }

  if (F->kind == FieldKind::RationalFunctionField &&
      F->base->kind == FieldKind::PrimeField) {
    // Br(F_p) = 0, so the class is determined by its tame residues
    for (const Valuation& v : fun_slot_places(F, {Q.a, Q.b})) {
      SquareClassResult r = residue_symbol(Q, v);
      if (!r.trivial) {
        cert.verdict = SplitVerdict::Nonsplit;
        cert.place = v;
        cert.residue_class = r.residue ? *r.residue : r.rep;
        return cert;
      }
    }
    cert.verdict = SplitVerdict::Split;
    attach_zero_divisor(Q, cert, budget);
    return cert;
  }

  if (F->kind == FieldKind::QuadraticEtale) {
    const FieldPtr& K = F->base;
    const Value& d = *F->ext_d;
    if (Value s0; try_is_square(d, &s0)) {
      // split etale K x K: decide componentwise via s -> +-sqrt(d)
      SplitCertificate parts[2];
      for (int sgn = 0; sgn < 2; ++sgn) {
        Value s = sgn ? v_neg(s0) : s0;
        auto comp = [&](const Value& x) { return v_add(x.pr[0], v_mul(s, x.pr[1])); };
        parts[sgn] = is_split(quat_make(K, comp(Q.a), comp(Q.b)), budget);
      }
      if (parts[0].verdict == SplitVerdict::Nonsplit || parts[1].verdict == SplitVerdict::Nonsplit) {
        int bad = parts[0].verdict == SplitVerdict::Nonsplit ? 0 : 1;
        cert = parts[bad];
        cert.zero_divisor.reset();
        cert.note = "component " + std::to_string(bad + 1) + " of the split etale base: " + cert.note;
        return cert;
      }
      if (parts[0].verdict == SplitVerdict::Split && parts[1].verdict == SplitVerdict::Split) {
        cert.verdict = SplitVerdict::Split;
        cert.note = "both components of the split etale base are split";
        return cert;
      }
      cert.note = "component verdict unknown over the split etale base";
      return cert;
    }
    // field extension L = K(sqrt(d)): a local obstruction of the K-descended
    // symbol survives exactly at the places that split in L
    Value a0, b0;
    if (!v_descends(Q.a, K, &a0) || !v_descends(Q.b, K, &b0)) {
      cert.note = "slots do not descend to the base of the etale extension";
      return cert;
    }
    if (K->kind == FieldKind::Rationals) {
      for (long p : hilbert_candidate_places(a0.q, b0.q)) {
        if (hilbert_qp(a0.q, b0.q, p) != -1) continue;
        if (rational_place_splits_in_etale(p, *F->ext_d)) cert.q_places.push_back(p);
      }
      cert.verdict = cert.q_places.empty() ? SplitVerdict::Split : SplitVerdict::Nonsplit;
      if (cert.verdict == SplitVerdict::Split)
        cert.note = "every local obstruction of the descended symbol dies in the quadratic extension";
      return cert;
    }
    if (K->kind == FieldKind::RationalFunctionField && K->base->kind == FieldKind::PrimeField) {
      QuaternionAlgebra Q0 = quat_make(K, a0, b0);
      for (const Valuation& v : fun_slot_places(K, {a0, b0})) {
        SquareClassResult r = residue_symbol(Q0, v);
        if (!r.trivial && place_splits_in_etale(v, *F->ext_d)) {
          cert.verdict = SplitVerdict::Nonsplit;
          cert.place = v;
          cert.residue_class = r.residue ? *r.residue : r.rep;
          return cert;
        }
      }
      cert.verdict = SplitVerdict::Split;
      cert.note = "every local obstruction of the descended symbol dies in the quadratic extension";
      return cert;
    }
    cert.note = "unsupported base under the etale extension";
    return cert;
  }

  throw Error("UnsupportedDomain", "is_split over " + F->descriptor());
}

QuaternionAlgebra corestriction(const QuaternionAlgebra& Q) {
  const FieldPtr& F = Q.base;
  if (F->kind != FieldKind::QuadraticEtale)
    throw Error("UnsupportedDomain", "corestriction needs a quadratic etale base");
  const FieldPtr& K = F->base;
  Value a0, other;
  if (v_descends(Q.a, K, &a0))
    other = Q.b;
  else if (v_descends(Q.b, K, &a0))
    other = Q.a;
  else
    throw Error("SlotNotDescended", "neither symbol slot lies in the base field");
  Value nb = etale_norm(other);
  if (v_is_zero(nb))
    throw Error("ZeroDivisor", "slot norm vanishes over the split etale base");
  return quat_make(K, a0, nb);
}

} // namespace qsb
