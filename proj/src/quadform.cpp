#include "qsb/quadform.hpp"

#include <algorithm>
#include <sstream>

namespace qsb {

// ---------------------------------------------------------------------------
// construction / evaluation
// ---------------------------------------------------------------------------

std::string QuadForm::str() const {
  if (qf_is_diagonal(*this)) {
    std::ostringstream os;
    os << "diag(";
    for (int i = 0; i < n; ++i) os << (i ? ", " : "") << gram.at(i, i).str();
    os << ")";
    return os.str();
  }
  return gram.str();
}

QuadForm qf_make(const FieldPtr& F, const Mat& gram) {
  if (gram.rows != gram.cols) throw Error("ContractViolation", "Gram matrix must be square");
  for (int i = 0; i < gram.rows; ++i)
    for (int j = i + 1; j < gram.cols; ++j)
      if (!v_eq(gram.at(i, j), gram.at(j, i)))
        throw Error("ContractViolation", "Gram matrix must be symmetric");
  return QuadForm{F, gram, gram.rows};
}

QuadForm qf_diag(const FieldPtr& F, const std::vector<Value>& entries) {
  Mat g = m_zero(F, static_cast<int>(entries.size()), static_cast<int>(entries.size()));
  for (size_t i = 0; i < entries.size(); ++i) g.at(static_cast<int>(i), static_cast<int>(i)) = entries[i];
  return QuadForm{F, g, static_cast<int>(entries.size())};
}

QuadForm hyperbolic_plane(const FieldPtr& F) {
  Mat g = m_zero(F, 2, 2);
  g.at(0, 1) = v_one(F);
  g.at(1, 0) = v_one(F);
  return QuadForm{F, g, 2};
}

QuadForm qf_orth_sum(const QuadForm& a, const QuadForm& b) {
  return QuadForm{a.F, m_block_diag(a.gram, b.gram), a.n + b.n};
}

bool qf_is_diagonal(const QuadForm& q) {
  for (int i = 0; i < q.n; ++i)
    for (int j = 0; j < q.n; ++j)
      if (i != j && !v_is_zero(q.gram.at(i, j))) return false;
  return true;
}

std::vector<Value> qf_diagonal_entries(const QuadForm& q) {
  std::vector<Value> e;
  for (int i = 0; i < q.n; ++i) e.push_back(q.gram.at(i, i));
  return e;
}

Value qf_gram_b(const QuadForm& q, const Vec& v, const Vec& w) {
  Value s = v_zero(q.F);
  for (int i = 0; i < q.n; ++i)
    for (int j = 0; j < q.n; ++j) s = v_add(s, v_mul(v[i], v_mul(q.gram.at(i, j), w[j])));
  return s;
}

Value qf_value(const QuadForm& q, const Vec& v) { return qf_gram_b(q, v, v); }

Value qf_polar(const QuadForm& q, const Vec& v, const Vec& w) {
  return v_mul(v_int(q.F, 2), qf_gram_b(q, v, w));
}

// ---------------------------------------------------------------------------
// similarities
// ---------------------------------------------------------------------------

Similarity sim_identity(const QuadForm& q) { return Similarity{m_identity(q.F, q.n), v_one(q.F)}; }

Similarity sim_compose(const Similarity& second, const Similarity& first) {
  return Similarity{m_mul(second.matrix, first.matrix), v_mul(second.factor, first.factor)};
}

Similarity sim_inverse(const Similarity& s) {
  return Similarity{m_inverse(s.matrix), v_inv(s.factor)};
}

bool sim_check(const QuadForm& from, const QuadForm& to, const Similarity& s) {
  if (s.matrix.rows != to.n || s.matrix.cols != from.n || from.n != to.n) return false;
  Mat lhs = m_mul(m_transpose(s.matrix), m_mul(to.gram, s.matrix));
  Mat rhs = m_scal(s.factor, from.gram);
  return m_eq(lhs, rhs);
}

QuadForm qf_pullback(const QuadForm& q, const Mat& P) {
  return qf_make(q.F, m_mul(m_transpose(P), m_mul(q.gram, P)));
}

// ---------------------------------------------------------------------------
// radical / discriminant / diagonalization
// ---------------------------------------------------------------------------

std::vector<Vec> radical(const QuadForm& q) { return m_kernel(q.gram); }

bool qf_regular(const QuadForm& q) { return !v_is_zero(m_det(q.gram)); }

Value discriminant(const QuadForm& q) {
  Value d = m_det(q.gram);
  if (v_is_zero(d)) throw Error("DegenerateForm", "discriminant of a degenerate form");
  return squareclass_reduce(d);
}

Diagonalization diagonalize(const QuadForm& q) {
  const FieldPtr& F = q.F;
  if (F->characteristic() == 2) throw Error("UnsupportedDomain", "characteristic 2");
  int n = q.n;
  Mat G = q.gram;
  Mat P = m_identity(F, n);
  auto col_axpy = [&](Mat& M, int dst, int src, const Value& c) {
    for (int r = 0; r < M.rows; ++r) M.at(r, dst) = v_add(M.at(r, dst), v_mul(c, M.at(r, src)));
  };
  auto row_axpy = [&](Mat& M, int dst, int src, const Value& c) {
    for (int cidx = 0; cidx < M.cols; ++cidx)
      M.at(dst, cidx) = v_add(M.at(dst, cidx), v_mul(c, M.at(src, cidx)));
  };
  auto col_swap = [&](Mat& M, int i, int j) {
    for (int r = 0; r < M.rows; ++r) std::swap(M.at(r, i), M.at(r, j));
  };
  auto row_swap = [&](Mat& M, int i, int j) {
    for (int c = 0; c < M.cols; ++c) std::swap(M.at(i, c), M.at(j, c));
  };
  for (int k = 0; k < n; ++k) {
    // pivot rule: first nonzero diagonal entry; otherwise first pair (i<j,
    // lowest lexicographic) with b(v_i, v_j) != 0, resolved by v_i += v_j.
    int piv = -1;
    for (int i = k; i < n; ++i)
      if (!v_is_zero(G.at(i, i))) {
        piv = i;
        break;
      }
    if (piv < 0) {
      bool fixed = false;
      for (int i = k; i < n && !fixed; ++i)
        for (int j = i + 1; j < n && !fixed; ++j)
          if (!v_is_zero(G.at(i, j))) {
            Value one = v_one(F);
            col_axpy(G, i, j, one);
            row_axpy(G, i, j, one);
            col_axpy(P, i, j, one);
            piv = i;
            fixed = true;
          }
      if (!fixed) break; // remaining block is the radical (all zeros)
    }
    if (piv != k) {
      col_swap(G, piv, k);
      row_swap(G, piv, k);
      col_swap(P, piv, k);
    }
    Value d = G.at(k, k);
    for (int j = k + 1; j < n; ++j) {
      if (v_is_zero(G.at(k, j))) continue;
      Value c = v_neg(v_div(G.at(k, j), d));
      col_axpy(G, j, k, c);
      row_axpy(G, j, k, c);
      col_axpy(P, j, k, c);
    }
  }
  Diagonalization out;
  for (int i = 0; i < n; ++i) out.entries.push_back(G.at(i, i));
  out.basis = P;
  out.iso = Similarity{m_inverse(P), v_one(F)};
  return out;
}

LocalDiagonalization diagonalize_local(const QuadForm& q, const Valuation& val) {
  const FieldPtr& F = q.F;
  int n = q.n;
  for (const auto& x : q.gram.a) {
    auto v = valuation_of(x, val);
    if (v && *v < 0) throw Error("NonIntegralEntries", "Gram entry " + x.str() + " is not integral at " + val.str());
  }
  auto is_unit = [&](const Value& x) {
    auto v = valuation_of(x, val);
    return v && *v == 0;
  };
  Mat G = q.gram;
  Mat P = m_identity(F, n);
  auto col_axpy = [&](Mat& M, int dst, int src, const Value& c) {
    for (int r = 0; r < M.rows; ++r) M.at(r, dst) = v_add(M.at(r, dst), v_mul(c, M.at(r, src)));
  };
  auto row_axpy = [&](Mat& M, int dst, int src, const Value& c) {
    for (int cidx = 0; cidx < M.cols; ++cidx)
      M.at(dst, cidx) = v_add(M.at(dst, cidx), v_mul(c, M.at(src, cidx)));
  };
  auto col_swap = [&](Mat& M, int i, int j) {
    for (int r = 0; r < M.rows; ++r) std::swap(M.at(r, i), M.at(r, j));
  };
  auto row_swap = [&](Mat& M, int i, int j) {
    for (int c = 0; c < M.cols; ++c) std::swap(M.at(i, c), M.at(j, c));
  };
  for (int k = 0; k + 1 < n; ++k) {
    int piv = -1;
    for (int i = k; i < n; ++i)
      if (is_unit(G.at(i, i))) {
        piv = i;
        break;
      }
    if (piv < 0) {
      // create a unit diagonal entry from a unit off-diagonal pairing
      bool fixed = false;
      for (int i = k; i < n && !fixed; ++i)
        for (int j = i + 1; j < n && !fixed; ++j)
          if (is_unit(G.at(i, j))) {
            Value one = v_one(F);
            col_axpy(G, i, j, one);
            row_axpy(G, i, j, one);
            col_axpy(P, i, j, one);
            if (!is_unit(G.at(i, i)))
              throw Error("NotSimpleDegeneration", "could not produce a unit pivot at " + val.str());
            piv = i;
            fixed = true;
          }
      if (!fixed)
        throw Error("NotSimpleDegeneration",
                    "residue radical rank exceeds 1 at " + val.str());
    }
    if (piv != k) {
      col_swap(G, piv, k);
      row_swap(G, piv, k);
      col_swap(P, piv, k);
    }
    Value d = G.at(k, k);
    for (int j = k + 1; j < n; ++j) {
      if (v_is_zero(G.at(k, j))) continue;
      Value c = v_neg(v_div(G.at(k, j), d)); // integral: d is a unit
      col_axpy(G, j, k, c);
      row_axpy(G, j, k, c);
      col_axpy(P, j, k, c);
    }
  }
  LocalDiagonalization out;
  for (int i = 0; i + 1 < n; ++i) out.units.push_back(G.at(i, i));
  out.top = G.at(n - 1, n - 1);
  auto e = valuation_of(out.top, val);
  if (!e) throw Error("DegenerateForm", "degenerate form at " + val.str());
  out.e = *e;
  out.top_unit = v_div(out.top, v_pow(val.uniformizer(), out.e));
  out.iso = Similarity{P, v_one(F)};
  return out;
}

std::string DegenerationReport::str() const {
  std::ostringstream os;
  os << "valuation: " << val.str() << "\n";
  os << "residue radical rank: " << residue_radical_rank << "\n";
  os << "multiplicity: " << multiplicity << "\n";
  os << "verdict: ";
  switch (verdict) {
    case DegenVerdict::Regular: os << "regular"; break;
    case DegenVerdict::Simple: os << "simple(" << multiplicity << ")"; break;
    case DegenVerdict::NotSimple: os << "not-simple"; break;
  }
  os << "\n";
  return os.str();
}

DegenerationReport degeneration_report(const QuadForm& q, const Valuation& val) {
  for (const auto& x : q.gram.a) {
    auto v = valuation_of(x, val);
    if (v && *v < 0) throw Error("NonIntegralEntries", "Gram entry " + x.str() + " is not integral at " + val.str());
  }
  FieldPtr k = val.residue_field();
  if (!k) throw Error("UnsupportedResidue", "residue field of " + val.str() + " is not representable");
  Mat res = m_zero(k, q.n, q.n);
  for (int i = 0; i < q.n; ++i)
    for (int j = 0; j < q.n; ++j) res.at(i, j) = residue_of(q.gram.at(i, j), val);
  DegenerationReport rep;
  rep.val = val;
  rep.residue_radical_rank = q.n - m_rank(res);
  Value det = m_det(q.gram);
  if (v_is_zero(det)) throw Error("DegenerateForm", "identically degenerate form");
  rep.multiplicity = *valuation_of(det, val);
  if (rep.multiplicity == 0)
    rep.verdict = DegenVerdict::Regular;
  else if (rep.residue_radical_rank == 1)
    rep.verdict = DegenVerdict::Simple;
  else
    rep.verdict = DegenVerdict::NotSimple;
  return rep;
}

// ---------------------------------------------------------------------------
// reflections / transport / cancellation
// ---------------------------------------------------------------------------

Similarity reflection(const QuadForm& q, const Vec& v, const Valuation* local) {
  Value qv = qf_value(q, v);
  bool unit = local ? (valuation_of(qv, *local) && *valuation_of(qv, *local) == 0)
                    : !v_is_zero(qv);
  if (!unit) throw Error("NonUnitValue", "q(v) = " + qv.str() + " is not invertible");
  // r_v(w) = w - q(v)^{-1} b_q(v,w) v,  b_q(v,w) = 2 v^T G w
  Mat R = m_identity(q.F, q.n);
  Value c = v_div(v_int(q.F, 2), qv);
  for (int j = 0; j < q.n; ++j) {
    // column j: e_j - c (v^T G e_j) v
    Value vg = v_zero(q.F);
    for (int i = 0; i < q.n; ++i) vg = v_add(vg, v_mul(v[i], q.gram.at(i, j)));
    Value coef = v_mul(c, vg);
    for (int i = 0; i < q.n; ++i) R.at(i, j) = v_sub(R.at(i, j), v_mul(coef, v[i]));
  }
  return Similarity{R, v_one(q.F)};
}

Similarity transport(const QuadForm& q, const Vec& v, const Vec& w, const Valuation* local) {
  if (!v_eq(qf_value(q, v), qf_value(q, w)))
    throw Error("PreconditionViolation", "transport requires q(v) = q(w)");
  Value u = qf_value(q, v);
  bool unit = local ? (valuation_of(u, *local) && *valuation_of(u, *local) == 0) : !v_is_zero(u);
  if (!unit) throw Error("NonUnitValue", "transport requires invertible common value");
  if (vec_eq(v, w)) return sim_identity(q);
  Vec diff = vec_sub(v, w);
  Value qd = qf_value(q, diff);
  bool diff_unit = local ? (valuation_of(qd, *local) && *valuation_of(qd, *local) == 0)
                         : !v_is_zero(qd);
  if (diff_unit) return reflection(q, diff, local);
  // q(v+w) = 4u - q(v-w) is then invertible; r_w(r_{v+w}(v)) = r_w(-w) = w
  Similarity r1 = reflection(q, vec_add(v, w), local);
  Similarity r2 = reflection(q, w, local);
  return sim_compose(r2, r1);
}

Similarity cancel(const QuadForm& q1, const QuadForm& q2, const QuadForm& pad,
                  const Similarity& witness) {
  if (q1.n != q2.n) throw Error("InvalidWitness", "rank mismatch");
  if (!qf_is_diagonal(pad)) throw Error("InvalidWitness", "pad must be diagonal");
  for (const auto& e : qf_diagonal_entries(pad))
    if (v_is_zero(e)) throw Error("InvalidWitness", "pad must be regular");
  QuadForm from = qf_orth_sum(q1, pad);
  QuadForm to = qf_orth_sum(q2, pad);
  if (!v_eq(witness.factor, v_one(q1.F)) || !sim_check(from, to, witness))
    throw Error("InvalidWitness", "witness does not satisfy the isometry contract");
  Mat M = witness.matrix;
  int n = q1.n;
  std::vector<Value> padentries = qf_diagonal_entries(pad);
  for (int k = pad.n; k >= 1; --k) {
    QuadForm cur = qf_orth_sum(q2, qf_diag(q2.F, std::vector<Value>(padentries.begin(), padentries.begin() + k)));
    int idx = n + k - 1;
    Vec target(idx + 1, v_zero(q1.F));
    target[idx] = v_one(q1.F);
    Vec image(idx + 1, v_zero(q1.F));
    for (int i = 0; i <= idx; ++i) image[i] = M.at(i, idx);
    Similarity sig = transport(cur, image, target);
    M = m_mul(sig.matrix, M);
    // exact block structure [[M', 0],[0, 1]] is forced; verify and shrink
    for (int i = 0; i < idx; ++i)
      if (!v_is_zero(M.at(i, idx)) || !v_is_zero(M.at(idx, i)))
        throw Error("InvalidWitness", "cancellation step failed to split off the pad slot");
    if (!v_eq(M.at(idx, idx), v_one(q1.F)))
      throw Error("InvalidWitness", "cancellation step failed to fix the pad slot");
    Mat shrunk = m_zero(q1.F, idx, idx);
    for (int i = 0; i < idx; ++i)
      for (int j = 0; j < idx; ++j) shrunk.at(i, j) = M.at(i, j);
    M = shrunk;
  }
  Similarity out{M, v_one(q1.F)};
  if (!sim_check(q1, q2, out))
    throw Error("InvalidWitness", "cancelled isometry fails the contract");
  return out;
}

// ---------------------------------------------------------------------------
// isotropy / representation over fields
// ---------------------------------------------------------------------------

static std::optional<Value> finite_sqrt(const FieldPtr& F, const Value& x) {
  if (auto r = v_sqrt(x)) return r;
  std::optional<Value> found;
  long card = F->p;
  if (F->kind == FieldKind::QuadraticEtale) card = F->base->p * F->base->p;
  enumerate_elements(F, card + 4, [&](const Value& c) {
    if (v_eq(v_mul(c, c), x)) {
      found = c;
      return true;
    }
    return false;
  });
  return found;
}

static bool finite_base(const FieldPtr& F) {
  if (F->kind == FieldKind::PrimeField) return true;
  if (F->kind == FieldKind::QuadraticEtale && F->base->kind == FieldKind::PrimeField &&
      !is_square(*F->ext_d))
    return true;
  return false;
}

// Deterministic bounded search for a nonzero vector with q(v) = target over the
// diagonal form <entries>; target = 0 searches for isotropy.
static std::optional<Vec> bounded_diag_search(const FieldPtr& F, const std::vector<Value>& entries,
                                              const Value& target, long budget) {
  std::vector<Value> pool;
  enumerate_elements(F, std::min<long>(budget, 500), [&](const Value& c) {
    pool.push_back(c);
    return false;
  });
  size_t n = entries.size();
  long visited = 0;
  // odometer over pool indices, in increasing max-index order for determinism
  for (size_t maxi = 1; maxi < pool.size(); ++maxi) {
    std::vector<size_t> idx(n, 0);
    bool done = false;
    while (!done) {
      if (++visited > budget) return std::nullopt;
      bool uses_max = false;
      for (auto t : idx)
        if (t == maxi) uses_max = true;
      if (uses_max) {
        Vec v(n);
        bool nz = false;
        for (size_t i = 0; i < n; ++i) {
          v[i] = pool[idx[i]];
          if (!v_is_zero(v[i])) nz = true;
        }
        if (nz) {
          Value s = v_zero(F);
          for (size_t i = 0; i < n; ++i) s = v_add(s, v_mul(entries[i], v_mul(v[i], v[i])));
          if (v_eq(s, target)) return v;
        }
      }
      size_t pos = 0;
      while (pos < n) {
        if (++idx[pos] <= maxi) break;
        idx[pos] = 0;
        ++pos;
      }
      if (pos == n) done = true;
    }
  }
  return std::nullopt;
}

static bool rat_is_padic_square(const Rat& a, long p) {
  if (a == 0) return true;
  if (p == -1) return a > 0;
  BigInt num = boost::multiprecision::numerator(a);
  BigInt den = boost::multiprecision::denominator(a);
  long v = 0;
  BigInt pp = p;
  auto strip = [&](BigInt x, int sgn) {
    while (x % pp == 0) {
      x /= pp;
      v += sgn;
    }
    return x;
  };
  BigInt nu = strip(num < 0 ? -num : num, +1);
  BigInt du = strip(den, -1);
  if (num < 0) nu = -nu;
  if (v % 2 != 0) return false;
  if (p == 2) {
    // unit is a 2-adic square iff nu/du = 1 mod 8; odd du is self-inverse mod 8
    BigInt m = 8;
    return ((nu % m + m) % m) * (du % m) % m == 1;
  }
  // Legendre of nu * du mod p (du^{-1} has the same residue symbol as du)
  BigInt prod = ((nu % pp) * (du % pp) % pp + pp) % pp;
  return legendre(prod, p) == 1;
}

static std::vector<long> rat_prime_support(const Rat& a) {
  std::vector<long> out;
  BigInt num = boost::multiprecision::numerator(a);
  BigInt den = boost::multiprecision::denominator(a);
  for (BigInt x : {num, den}) {
    if (x == 0) continue;
    for (auto& [f, e] : factor_integer(x))
      if (f > 2) out.push_back(static_cast<long>(f));
  }
  return out;
}

// local isotropy of a diagonal form over k(t) (k = F_p) at a place, via the
// first/second residue forms
static bool fun_local_isotropic(const FieldPtr& F, const std::vector<Value>& entries,
                                const Valuation& place) {
  std::vector<VPoly> res_even, res_odd;
  std::vector<Value> resv_even, resv_odd;
  FieldPtr k = place.residue_field();
  Value pi = place.uniformizer();
  for (const auto& a : entries) {
    long v = *valuation_of(a, place);
    Value unit = v_div(a, v_pow(pi, v));
    if (k) {
      Value r = residue_of(unit, place);
      (v % 2 == 0 ? resv_even : resv_odd).push_back(r);
    } else {
      VPoly r = residue_mod_place(unit, place);
      (v % 2 == 0 ? res_even : res_odd).push_back(r);
    }
  }
  auto part_isotropic = [&](size_t rank, auto minus_ratio_square) {
    if (rank >= 3) return true;
    if (rank <= 1) return false;
    return minus_ratio_square();
  };
  if (k) {
    auto test = [&](std::vector<Value>& part) {
      return part_isotropic(part.size(), [&] {
        return is_square(v_neg(v_mul(part[0], part[1])));
      });
    };
    return test(resv_even) || test(resv_odd);
  }
  const FieldPtr& base = F->base; // prime field under k(t)
  auto test = [&](std::vector<VPoly>& part) {
    return part_isotropic(part.size(), [&] {
      VPoly prod = p_neg(p_mul(base, part[0], part[1]));
      VPoly rem, quo;
      p_divmod(base, prod, place.f, quo, rem);
      if (p_deg(rem) < 0) return false; // zero residue cannot occur for units
      return residue_is_square_mod(base, place.f, rem);
    });
  };
  return test(res_even) || test(res_odd);
}

static std::vector<Valuation> fun_candidate_places(const FieldPtr& F,
                                                   const std::vector<Value>& entries) {
  const FieldPtr& base = F->base;
  std::vector<Valuation> places;
  std::vector<std::string> seen;
  auto add = [&](const VPoly& f) {
    Valuation v = Valuation::poly_place(F, f);
    std::string s = v.str();
    if (std::find(seen.begin(), seen.end(), s) == seen.end()) {
      seen.push_back(s);
      places.push_back(v);
    }
  };
  for (const auto& a : entries) {
    for (const VPoly* part : {&a.num, &a.den}) {
      if (p_deg(*part) < 1) continue;
      for (auto& [f, e] : factor_poly_fp(base, *part)) add(f);
    }
  }
  places.push_back(Valuation::degree_place(F));
  return places;
}

IsotropyResult field_isotropic_diag(const FieldPtr& F, const std::vector<Value>& entries,
                                    long budget) {
  IsotropyResult out;
  size_t n = entries.size();
  for (size_t i = 0; i < n; ++i)
    if (v_is_zero(entries[i])) {
      Vec w(n, v_zero(F));
      w[i] = v_one(F);
      out.verdict = Ternary::Yes;
      out.witness = w;
      out.note = "zero diagonal entry";
      return out;
    }
  if (n <= 1) {
    out.verdict = Ternary::No;
    return out;
  }
  // binary-subform square test (decisive for n = 2, witness-producing always)
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      Value ratio = v_neg(v_div(entries[j], entries[i]));
      bool sq = false;
      try {
        sq = is_square(ratio);
      } catch (const Error&) {
        continue;
      }
      if (sq) {
        out.verdict = Ternary::Yes;
        auto s = F->kind == FieldKind::QuadraticEtale ? finite_sqrt(F, ratio) : v_sqrt(ratio);
        if (s) {
          Vec w(n, v_zero(F));
          w[i] = *s;
          w[j] = v_one(F);
          out.witness = w;
        }
        return out;
      }
    }
  if (n == 2) {
    out.verdict = Ternary::No;
    return out;
  }
  if (finite_base(F)) {
    // rank >= 3 over a finite field is always isotropic; solve
    // a x^2 + b y^2 + c = 0 by scanning x
    const Value &a = entries[0], &b = entries[1], &c = entries[2];
    std::optional<Vec> w;
    enumerate_elements(F, budget, [&](const Value& x) {
      Value rhs = v_div(v_neg(v_add(c, v_mul(a, v_mul(x, x)))), b);
      if (auto y = finite_sqrt(F, rhs)) {
        Vec v(n, v_zero(F));
        v[0] = x;
        v[1] = *y;
        v[2] = v_one(F);
        w = v;
        return true;
      }
      return false;
    });
    out.verdict = Ternary::Yes;
    out.witness = w;
    if (!w) out.note = "witness search budget exhausted";
    return out;
  }
  if (F->kind == FieldKind::Rationals) {
    std::vector<Rat> e;
    for (const auto& x : entries) e.push_back(squareclass_reduce(x).q);
    bool decided_yes = false;
    if (n == 3) {
      // <a,b,c> isotropic over Q iff (-ac, -bc) splits everywhere
      Rat A = -e[0] * e[2], B = -e[1] * e[2];
      decided_yes = true;
      for (long p : hilbert_candidate_places(A, B))
        if (hilbert_qp(A, B, p) != 1) {
          decided_yes = false;
          break;
        }
      if (!decided_yes) {
        out.verdict = Ternary::No;
        return out;
      }
    } else if (n == 4) {
      bool pos = true, neg = true;
      for (auto& x : e) {
        if (x > 0) neg = false;
        if (x < 0) pos = false;
      }
      if (pos || neg) {
        out.verdict = Ternary::No;
        out.note = "definite over the reals";
        return out;
      }
      std::vector<long> primes{2};
      for (auto& x : e)
        for (long p : rat_prime_support(x))
          if (std::find(primes.begin(), primes.end(), p) == primes.end()) primes.push_back(p);
      decided_yes = true;
      for (long p : primes) {
        Rat disc = e[0] * e[1] * e[2] * e[3];
        int eps = 1;
        for (size_t i = 0; i < 4; ++i)
          for (size_t j = i + 1; j < 4; ++j) eps *= hilbert_qp(e[i], e[j], p);
        // rank-4 anisotropic over Q_p iff disc is a square and eps = -(-1,-1)_p
        if (rat_is_padic_square(disc, p) && eps == -hilbert_qp(Rat(-1), Rat(-1), p)) {
          out.verdict = Ternary::No;
          out.note = "anisotropic over Q_" + std::to_string(p);
          return out;
        }
      }
    } else {
      // n >= 5: isotropic iff indefinite (Meyer)
      bool pos = true, neg = true;
      for (auto& x : e) {
        if (x > 0) neg = false;
        if (x < 0) pos = false;
      }
      if (pos || neg) {
        out.verdict = Ternary::No;
        out.note = "definite over the reals";
        return out;
      }
      decided_yes = true;
    }
    if (decided_yes) {
      out.verdict = Ternary::Yes;
      out.witness = bounded_diag_search(F, entries, v_zero(F), budget);
      if (!out.witness) out.note = "witness search budget exhausted";
      return out;
    }
  }
  if (F->kind == FieldKind::RationalFunctionField && F->base->kind == FieldKind::PrimeField) {
    std::vector<Value> e;
    for (const auto& x : entries) e.push_back(squareclass_reduce(x));
    for (const auto& place : fun_candidate_places(F, e))
      if (!fun_local_isotropic(F, e, place)) {
        out.verdict = Ternary::No;
        out.note = "anisotropic at " + place.str();
        return out;
      }
    out.verdict = Ternary::Yes;
    out.witness = bounded_diag_search(F, entries, v_zero(F), budget);
    if (!out.witness) out.note = "witness search budget exhausted";
    return out;
  }
  throw Error("UnsupportedDomain", "isotropy over " + F->descriptor() + " is not decidable here");
}

RepresentResult field_represents_diag(const FieldPtr& F, const std::vector<Value>& entries,
                                      const Value& u, long budget) {
  RepresentResult out;
  if (v_is_zero(u)) throw Error("ZeroElement", "representation target must be nonzero");
  size_t n = entries.size();
  // direct slot match
  for (size_t i = 0; i < n; ++i) {
    if (v_is_zero(entries[i])) continue;
    Value ratio = v_div(u, entries[i]);
    bool sq = false;
    try {
      sq = is_square(ratio);
    } catch (const Error&) {
      continue;
    }
    if (sq) {
      auto s = F->kind == FieldKind::QuadraticEtale ? finite_sqrt(F, ratio) : v_sqrt(ratio);
      out.verdict = Ternary::Yes;
      if (s) {
        Vec w(n, v_zero(F));
        w[i] = *s;
        out.witness = w;
      }
      return out;
    }
  }
  // <entries> represents u iff <entries> perp <-u> is isotropic
  std::vector<Value> ext = entries;
  ext.push_back(v_neg(u));
  IsotropyResult iso = field_isotropic_diag(F, ext, budget);
  if (iso.verdict == Ternary::No) {
    out.verdict = Ternary::No;
    return out;
  }
  out.verdict = iso.verdict;
  if (iso.witness) {
    Vec w = *iso.witness;
    Value last = w[n];
    if (!v_is_zero(last)) {
      Vec v(n);
      for (size_t i = 0; i < n; ++i) v[i] = v_div(w[i], last);
      out.witness = v;
    } else {
      // the form itself is isotropic, hence universal: for isotropic v find w0
      // with b(v, w0) != 0 and solve q(alpha v + w0) = u
      QuadForm q = qf_diag(F, entries);
      Vec v(w.begin(), w.begin() + n);
      for (size_t i = 0; i < n; ++i) {
        Vec w0(n, v_zero(F));
        w0[i] = v_one(F);
        Value bp = qf_polar(q, v, w0);
        if (v_is_zero(bp)) continue;
        Value alpha = v_div(v_sub(u, qf_value(q, w0)), bp);
        Vec x = vec_add(vec_scal(alpha, v), w0);
        out.witness = x;
        break;
      }
    }
  } else {
    out.note = iso.note;
  }
  return out;
}

LocalRepresentResult represents_local(const QuadForm& q, const Valuation& val, const Value& u) {
  auto uv = valuation_of(u, val);
  if (!uv || *uv != 0) throw Error("NonUnitValue", "representation target must be a unit");
  LocalDiagonalization L = diagonalize_local(q, val);
  FieldPtr k = val.residue_field();
  if (!k) throw Error("UnsupportedResidue", "residue field of " + val.str() + " is not representable");
  std::vector<Value> resunits;
  for (const auto& w : L.units) resunits.push_back(residue_of(w, val));
  if (L.e == 0) resunits.push_back(residue_of(L.top, val));
  Value resu = residue_of(u, val);
  LocalRepresentResult out;
  RepresentResult rep = resunits.empty()
                            ? RepresentResult{Ternary::No, std::nullopt, ""}
                            : field_represents_diag(k, resunits, resu);
  IsotropyResult iso = resunits.size() >= 2 ? field_isotropic_diag(k, resunits)
                                            : IsotropyResult{Ternary::No, std::nullopt, ""};
  if (rep.verdict != Ternary::Yes && iso.verdict != Ternary::Yes) {
    out.represented = false;
    out.note = "residue form neither represents the target nor is isotropic";
    return out;
  }
  out.represented = true;
  std::vector<Value> diag = L.units;
  diag.push_back(L.top);
  // layer 1: exact square-ratio slot over the global field
  for (size_t i = 0; i < L.units.size() + (L.e == 0 ? 1 : 0); ++i) {
    Value ratio = v_div(u, diag[i]);
    bool sq = false;
    try {
      sq = is_square(ratio);
    } catch (const Error&) {
    }
    if (sq) {
      if (auto s = v_sqrt(ratio)) {
        Vec w(diag.size(), v_zero(q.F));
        w[i] = *s;
        out.witness = m_apply(L.iso.matrix, w);
        return out;
      }
    }
  }
  // layer 2: bounded exact search in the diagonal coordinates
  if (auto w = bounded_diag_search(q.F, diag, u, 4000)) {
    bool integral = true;
    for (const auto& c : *w) {
      auto cv = valuation_of(c, val);
      if (cv && *cv < 0) integral = false;
    }
    if (integral) {
      out.witness = m_apply(L.iso.matrix, *w);
      return out;
    }
  }
  // layer 3: residue-level witness (completion semantics)
  if (rep.verdict == Ternary::Yes && rep.witness) {
    out.residue_witness = *rep.witness;
    out.note = "witness at residue level only (lifts over the completion)";
  } else {
    out.note = "represented via residue isotropy (completion semantics); no exact witness found";
  }
  return out;
}

bool isotropic_complete(const QuadForm& q, const Valuation& val) {
  FieldPtr k = val.residue_field();
  long rc = 0;
  if (val.kind == ValKind::Padic)
    rc = val.p;
  else
    rc = q.F->characteristic();
  if (rc == 2) throw Error("DyadicPlace", "residue characteristic 2");
  Diagonalization D = diagonalize(q);
  std::vector<Value> even, odd;
  Value pi = val.uniformizer();
  for (const auto& a0 : D.entries) {
    if (v_is_zero(a0)) return true; // radical vector is isotropic
    Value a = squareclass_reduce(a0);
    long v = *valuation_of(a, val);
    Value unit = v_div(a, v_pow(pi, v));
    if (!k) throw Error("UnsupportedResidue", "residue field of " + val.str() + " is not representable");
    (v % 2 == 0 ? even : odd).push_back(residue_of(unit, val));
  }
  auto part = [&](std::vector<Value>& es) {
    if (es.size() < 2) return false;
    return field_isotropic_diag(k, es).verdict == Ternary::Yes;
  };
  return part(even) || part(odd);
}

// ---------------------------------------------------------------------------
// Eichler isometries on q perp h
// ---------------------------------------------------------------------------

std::pair<Similarity, Similarity> eichler_maps(const QuadForm& q, const Vec& v) {
  const FieldPtr& F = q.F;
  int n = q.n;
  int N = n + 2; // basis: m_0..m_{n-1}, e, f
  Value qv = qf_value(q, v);
  Value half = v_inv(v_int(F, 2));
  Mat E = m_identity(F, N), Es = m_identity(F, N);
  for (int j = 0; j < n; ++j) {
    Value c = v_zero(F);
    for (int i = 0; i < n; ++i) c = v_add(c, v_mul(v[i], q.gram.at(i, j)));
    E.at(n, j) = c;      // w_j -> w_j + (v^T G w_j) e
    Es.at(n + 1, j) = c; // w_j -> w_j + (v^T G w_j) f
  }
  for (int i = 0; i < n; ++i) {
    E.at(i, n + 1) = v_neg(v[i]);  // f -> -v - (q(v)/2) e + f
    Es.at(i, n) = v_neg(v[i]);     // e -> -v - (q(v)/2) f + e
  }
  E.at(n, n + 1) = v_neg(v_mul(half, qv));
  Es.at(n + 1, n) = v_neg(v_mul(half, qv));
  return {Similarity{E, v_one(F)}, Similarity{Es, v_one(F)}};
}

Similarity alpha_map(const QuadForm& q, const Value& u) {
  const FieldPtr& F = q.F;
  int n = q.n;
  Mat M = m_identity(F, n + 2);
  M.at(n, n) = u;
  M.at(n + 1, n + 1) = v_inv(u);
  return Similarity{M, v_one(F)};
}

Similarity beta_map(const QuadForm& q, const Value& u) {
  const FieldPtr& F = q.F;
  int n = q.n;
  Mat M = m_identity(F, n + 2);
  M.at(n, n) = v_zero(F);
  M.at(n + 1, n + 1) = v_zero(F);
  M.at(n + 1, n) = v_inv(u); // e -> u^{-1} f
  M.at(n, n + 1) = u;        // f -> u e
  return Similarity{M, v_one(F)};
}

bool hyperbolic_conjugation_check(const QuadForm& q, const Vec& v, const Value& u) {
  Value ui = v_inv(u);
  auto [Ev, Esv] = eichler_maps(q, v);
  auto conj = [&](const Similarity& tinv, const Similarity& x, const Similarity& t) {
    return m_mul(tinv.matrix, m_mul(x.matrix, t.matrix));
  };
  Similarity au = alpha_map(q, u), aui = alpha_map(q, ui), bu = beta_map(q, u);
  // alpha_u^{-1} E_v alpha_u = E_{u^{-1} v}
  auto [E1, E1s] = eichler_maps(q, vec_scal(ui, v));
  if (!m_eq(conj(aui, Ev, au), E1.matrix)) return false;
  // alpha_u^{-1} E_v^* alpha_u = E*_{u v}
  auto [E2, E2s] = eichler_maps(q, vec_scal(u, v));
  if (!m_eq(conj(aui, Esv, au), E2s.matrix)) return false;
  // beta_u^{-1} E_v beta_u = E*_{u^{-1} v}   (beta_u is an involution)
  if (!m_eq(conj(bu, Ev, bu), E1s.matrix)) return false;
  // beta_u^{-1} E_v^* beta_u = E_{u v}
  if (!m_eq(conj(bu, Esv, bu), E2.matrix)) return false;
  return true;
}

Similarity eichler_compose(const QuadForm& q, const EichlerWord& w) {
  const FieldPtr& F = q.F;
  Mat M = m_identity(F, q.n + 2);
  for (const auto& g : w.gens) {
    auto [E, Es] = eichler_maps(q, g.v);
    M = m_mul(M, g.star ? Es.matrix : E.matrix);
  }
  Similarity tail = w.tail_beta ? beta_map(q, w.tail_u) : alpha_map(q, w.tail_u);
  M = m_mul(M, tail.matrix);
  return Similarity{M, v_one(F)};
}

EichlerWord eichler_decompose(const QuadForm& q, const Similarity& phi) {
  const FieldPtr& F = q.F;
  int n = q.n;
  QuadForm qh = qf_orth_sum(q, hyperbolic_plane(F));
  if (!qf_regular(q))
    throw Error("DecompositionFailure", "base form must be regular");
  if (!v_eq(phi.factor, v_one(F)) || !sim_check(qh, qh, phi))
    throw Error("DecompositionFailure", "input is not an isometry of q perp h");

  // symbolic word item
  struct Item {
    int kind; // 0 = E_v, 1 = E*_v, 2 = alpha_u, 3 = beta_u
    Vec v;
    Value u;
  };
  std::vector<Item> leftgens; // applied left of phi, in application order
  Mat M = phi.matrix;
  auto left_apply = [&](const Item& it) {
    leftgens.push_back(it);
    Mat G;
    if (it.kind == 0)
      G = eichler_maps(q, it.v).first.matrix;
    else if (it.kind == 1)
      G = eichler_maps(q, it.v).second.matrix;
    else if (it.kind == 3)
      G = beta_map(q, it.u).matrix;
    else
      G = alpha_map(q, it.u).matrix;
    M = m_mul(G, M);
  };
  auto col = [&](int j) {
    Vec c(n + 2);
    for (int i = 0; i < n + 2; ++i) c[i] = M.at(i, j);
    return c;
  };
  auto mpart = [&](const Vec& c) { return Vec(c.begin(), c.begin() + n); };

  // step 1: arrange phi(e) = a e with a != 0
  {
    Vec xi = col(n);
    Vec z = mpart(xi);
    Value a = xi[n], b = xi[n + 1];
    if (v_is_zero(a)) {
      if (vec_is_zero(z) && !v_is_zero(b)) {
        left_apply({3, Vec{}, v_one(F)}); // beta_1 turns b f into b e
      } else {
        // find v with (v^T G z) - b q(v)/2 != 0 among small candidates
        Value half = v_inv(v_int(F, 2));
        bool found = false;
        std::vector<Vec> cands;
        for (int i = 0; i < n; ++i) {
          Vec e(n, v_zero(F));
          e[i] = v_one(F);
          cands.push_back(e);
        }
        cands.push_back(z);
        for (const Vec& w0 : cands) {
          for (long t = 1; t <= 2 && !found; ++t) {
            Vec v = vec_scal(v_int(F, t), w0);
            if (vec_is_zero(v)) continue;
            Value coef = v_sub(qf_gram_b(q, v, z), v_mul(b, v_mul(half, qf_value(q, v))));
            if (!v_is_zero(coef)) {
              left_apply({0, v, Value{}});
              found = true;
            }
          }
          if (found) break;
        }
        if (!found) throw Error("DecompositionFailure", "could not normalize the e-column");
      }
      xi = col(n);
      z = mpart(xi);
      a = xi[n];
      b = xi[n + 1];
    }
    if (!vec_is_zero(z)) {
      Vec w = vec_scal(v_inv(a), z);
      left_apply({1, w, Value{}}); // E*_{z/a} clears the module part and f-part
    }
  }
  // step 2: clear the module part of phi(f)
  {
    Vec xi = col(n);
    Value a = xi[n];
    Vec zeta = col(n + 1);
    Vec z = mpart(zeta);
    if (!vec_is_zero(z)) left_apply({0, vec_scal(a, z), Value{}});
  }
  // now M = tau tensor alpha_a exactly
  Value a = M.at(n, n);
  if (v_is_zero(a) || !v_eq(M.at(n + 1, n + 1), v_inv(a)))
    throw Error("DecompositionFailure", "hyperbolic block failed to split");
  for (int i = 0; i < n + 2; ++i)
    for (int j = 0; j < n + 2; ++j) {
      bool hblock = i >= n && j >= n;
      bool mblock = i < n && j < n;
      if (hblock || mblock) continue;
      if (!v_is_zero(M.at(i, j)))
        throw Error("DecompositionFailure", "hyperbolic block failed to split");
    }
  if (!v_is_zero(M.at(n, n + 1)) || !v_is_zero(M.at(n + 1, n)))
    throw Error("DecompositionFailure", "hyperbolic block failed to split");
  Mat tau = m_zero(F, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) tau.at(i, j) = M.at(i, j);

  // Cartan-Dieudonne: express tau as a product of reflections over an
  // orthogonal basis; previously fixed vectors stay fixed.
  Diagonalization D = diagonalize(q);
  std::vector<Vec> refl; // application order of the correction sigma
  Mat cur = tau;
  for (int i = 0; i < n; ++i) {
    Vec b(n);
    for (int r = 0; r < n; ++r) b[r] = D.basis.at(r, i);
    Vec x = m_apply(cur, b);
    if (vec_eq(x, b)) continue;
    Vec diff = vec_sub(x, b);
    if (!v_is_zero(qf_value(q, diff))) {
      Similarity r = reflection(q, diff);
      refl.push_back(diff);
      cur = m_mul(r.matrix, cur);
    } else {
      Vec sum = vec_add(x, b);
      Similarity r1 = reflection(q, sum);
      Similarity r2 = reflection(q, b);
      refl.push_back(sum);
      refl.push_back(b);
      cur = m_mul(r2.matrix, m_mul(r1.matrix, cur));
    }
  }
  if (!m_eq(cur, m_identity(F, n)))
    throw Error("DecompositionFailure", "reflection factorization failed");

  // assemble the symbolic word for phi:
  //   phi = leftgens_1^{-1} ... leftgens_m^{-1} (tau tensor id) alpha_a
  // with tau = r_{w_1} ... r_{w_m} in application order refl[0], refl[1], ...
  // (sigma = r_{w_m} o ... o r_{w_1} and tau = sigma^{-1} = r_{w_1} o ... )
  std::vector<Item> word;
  for (const auto& it : leftgens) {
    Item inv = it;
    if (it.kind == 0 || it.kind == 1)
      inv.v = vec_scal(v_neg(v_one(F)), it.v);
    // beta is an involution; alpha_u^{-1} = alpha_{u^{-1}} (not used here)
    word.push_back(inv);
  }
  Value half = v_inv(v_int(F, 2));
  for (const Vec& w : refl) {
    Value u = qf_value(q, w);
    // r_w tensor id = E_w E*_{2w/q(w)} E_w beta_{-q(w)/2}
    word.push_back({0, w, Value{}});
    word.push_back({1, vec_scal(v_div(v_int(F, 2), u), w), Value{}});
    word.push_back({0, w, Value{}});
    word.push_back({3, Vec{}, v_neg(v_mul(half, u))});
  }
  word.push_back({2, Vec{}, a});

  // push alpha/beta tails right through the E generators
  EichlerWord out;
  bool tbeta = false;
  Value tu = v_one(F);
  for (const auto& it : word) {
    if (it.kind == 0 || it.kind == 1) {
      bool star = it.kind == 1;
      Vec v = it.v;
      if (!tbeta) {
        // alpha_u E_w = E_{u w} alpha_u ; alpha_u E*_w = E*_{w/u} alpha_u
        v = star ? vec_scal(v_inv(tu), v) : vec_scal(tu, v);
      } else {
        // beta_u E_w = E*_{w/u} beta_u ; beta_u E*_w = E_{u w} beta_u
        v = star ? vec_scal(tu, v) : vec_scal(v_inv(tu), v);
        star = !star;
      }
      out.gens.push_back({star, v});
    } else if (it.kind == 2) {
      // tail . alpha_w
      if (!tbeta)
        tu = v_mul(tu, it.u); // alpha_u alpha_w = alpha_{uw}
      else
        tu = v_div(tu, it.u); // beta_u alpha_w = beta_{u/w}
    } else {
      // tail . beta_w
      if (!tbeta) {
        tu = v_mul(tu, it.u); // alpha_u beta_w = beta_{uw}
        tbeta = true;
      } else {
        tu = v_div(tu, it.u); // beta_u beta_w = alpha_{u/w}
        tbeta = false;
      }
    }
  }
  out.tail_beta = tbeta;
  out.tail_u = tu;
  if (!m_eq(eichler_compose(q, out).matrix, phi.matrix))
    throw Error("DecompositionFailure", "recomposition check failed");
  return out;
}

} // namespace qsb
