#include "qsb/clifford.hpp"

#include <sstream>

namespace qsb {

namespace {

int popcount(int m) {
  int c = 0;
  while (m) {
    c += m & 1;
    m >>= 1;
  }
  return c;
}

Value half(const FieldPtr& F) { return v_inv(v_int(F, 2)); }

} // namespace

int EvenCliffordAlgebra::index_of(int mask) const {
  for (size_t i = 0; i < basis.size(); ++i)
    if (basis[i] == mask) return static_cast<int>(i);
  throw Error("InternalError", "basis mask not found");
}

std::string EvenCliffordAlgebra::basis_label(int idx) const {
  int mask = basis[idx];
  if (mask == 0) return "1";
  std::string s = "e";
  for (int i = 0; i < n; ++i)
    if (mask & (1 << i)) s += std::to_string(i + 1);
  return s;
}

std::string EvenCliffordAlgebra::str() const {
  std::ostringstream os;
  os << "basis:";
  for (int i = 0; i < dim; ++i) os << " " << basis_label(i);
  os << "\n";
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const Value& c = table_coef[static_cast<size_t>(i) * dim + j];
      if (v_is_zero(c)) continue;
      os << basis_label(i) << "*" << basis_label(j) << " = " << c.str() << "*"
         << basis_label(table_idx[static_cast<size_t>(i) * dim + j]) << "\n";
    }
  return os.str();
}

CElt c_zero(const EvenCliffordAlgebra& C) { return CElt(C.dim, v_zero(C.F)); }

CElt c_one(const EvenCliffordAlgebra& C) { return c_basis(C, 0); }

CElt c_basis(const EvenCliffordAlgebra& C, int idx) {
  CElt x = c_zero(C);
  x[idx] = v_one(C.F);
  return x;
}

CElt c_mul(const EvenCliffordAlgebra& C, const CElt& x, const CElt& y) {
  CElt z = c_zero(C);
  for (int i = 0; i < C.dim; ++i) {
    if (v_is_zero(x[i])) continue;
    for (int j = 0; j < C.dim; ++j) {
      if (v_is_zero(y[j])) continue;
      size_t p = static_cast<size_t>(i) * C.dim + j;
      z[C.table_idx[p]] = v_add(z[C.table_idx[p]], v_mul(v_mul(x[i], y[j]), C.table_coef[p]));
    }
  }
  return z;
}

EvenCliffordAlgebra even_clifford(const QuadForm& q) {
  if (q.n < 2 || q.n > 4) throw Error("RankOutOfRange", "even Clifford supports rank 2..4");
  if (!qf_is_diagonal(q)) throw Error("PreconditionViolation", "even_clifford needs a diagonal form");
  EvenCliffordAlgebra C;
  C.F = q.F;
  C.coeffs = qf_diagonal_entries(q);
  C.n = q.n;
  for (int m = 0; m < (1 << q.n); ++m)
    if (popcount(m) % 2 == 0) C.basis.push_back(m);
  C.dim = static_cast<int>(C.basis.size());
  C.table_coef.assign(static_cast<size_t>(C.dim) * C.dim, v_zero(C.F));
  C.table_idx.assign(static_cast<size_t>(C.dim) * C.dim, 0);
  for (int i = 0; i < C.dim; ++i)
    for (int j = 0; j < C.dim; ++j) {
      int S = C.basis[i], T = C.basis[j];
      // move each generator of T past the tail of S: one sign per transposition
      int swaps = 0;
      Value coef = v_one(C.F);
      for (int g = 0; g < C.n; ++g) {
        if (!(T & (1 << g))) continue;
        for (int h = g + 1; h < C.n; ++h)
          if (S & (1 << h)) ++swaps;
        if (S & (1 << g)) coef = v_mul(coef, C.coeffs[g]); // e_g^2 = a_g
      }
      if (swaps % 2) coef = v_neg(coef);
      size_t p = static_cast<size_t>(i) * C.dim + j;
      C.table_coef[p] = coef;
      C.table_idx[p] = C.index_of(S ^ T);
    }
  // exhaustive associativity check of the structure constants
  for (int i = 0; i < C.dim; ++i)
    for (int j = 0; j < C.dim; ++j)
      for (int k = 0; k < C.dim; ++k) {
        CElt lhs = c_mul(C, c_mul(C, c_basis(C, i), c_basis(C, j)), c_basis(C, k));
        CElt rhs = c_mul(C, c_basis(C, i), c_mul(C, c_basis(C, j), c_basis(C, k)));
        if (!vec_eq(lhs, rhs))
          throw Error("InternalError", "even Clifford table not associative");
      }
  return C;
}

CenterDescription center(const EvenCliffordAlgebra& C) {
  // x central iff x b_k - b_k x = 0 for all basis b_k; stack the linear maps
  Mat cond = m_zero(C.F, C.dim * C.dim, C.dim);
  for (int k = 0; k < C.dim; ++k)
    for (int i = 0; i < C.dim; ++i) {
      size_t ik = static_cast<size_t>(i) * C.dim + k;
      size_t ki = static_cast<size_t>(k) * C.dim + i;
      Value d = v_sub(C.table_coef[ik], C.table_coef[ki]);
      if (!v_is_zero(d)) cond.at(k * C.dim + C.table_idx[ik], i) = v_add(cond.at(k * C.dim + C.table_idx[ik], i), d);
    }
  CenterDescription out;
  out.center_basis = m_kernel(cond);
  out.rank = static_cast<int>(out.center_basis.size());
  // normalized nonscalar generator: kill the coordinate of 1, scale the lead
  for (const CElt& v : out.center_basis) {
    int lead = -1;
    for (int i = 1; i < C.dim; ++i)
      if (!v_is_zero(v[i])) {
        lead = i;
        break;
      }
    if (lead < 0) continue;
    CElt z = v;
    z[0] = v_zero(C.F);
    z = vec_scal(v_inv(z[lead]), z);
    out.generator = z;
    CElt z2 = c_mul(C, z, z);
    bool scalar = true;
    for (int i = 1; i < C.dim; ++i)
      if (!v_is_zero(z2[i])) scalar = false;
    if (scalar) out.z_squared = z2[0];
    break;
  }
  if (out.generator.empty()) throw Error("InternalError", "center has no nonscalar element");
  // verify: the generator commutes with every basis element
  for (int k = 0; k < C.dim; ++k) {
    CElt bk = c_basis(C, k);
    if (!vec_eq(c_mul(C, out.generator, bk), c_mul(C, bk, out.generator)))
      throw Error("InternalError", "center generator fails to commute");
  }
  return out;
}

Quat quaternionize_apply(const Quaternionization& Z, const CElt& x) {
  Quat out(4, v_zero(Z.L));
  for (size_t i = 0; i < x.size(); ++i)
    out = qu_add(out, qu_scal(v_embed(Z.L, x[i]), Z.images[i]));
  return out;
}

Quaternionization quaternionize(const EvenCliffordAlgebra& C) {
  if (C.n != 4) throw Error("RankOutOfRange", "quaternionize needs rank 4");
  for (const Value& a : C.coeffs)
    if (v_is_zero(a)) throw Error("DegenerateForm", "quaternionize needs a nondegenerate form");
  const Value &a1 = C.coeffs[0], &a2 = C.coeffs[1], &a3 = C.coeffs[2], &a4 = C.coeffs[3];
  Value delta = v_mul(v_mul(a1, a2), v_mul(a3, a4));
  Quaternionization Z;
  Z.L = FieldTower::quadratic_etale(C.F, delta);
  Z.alg = quat_make(Z.L, v_neg(v_embed(Z.L, v_mul(a1, a2))), v_neg(v_embed(Z.L, v_mul(a1, a3))));
  Value s = v_gen(Z.L); // image of e1e2e3e4 (s^2 = delta)
  auto emb = [&](const Value& x) { return v_embed(Z.L, x); };
  auto scaled = [&](int idx, const Value& c) {
    Quat x = qu_basis(Z.alg, idx);
    return qu_scal(c, x);
  };
  // basis order: 1, e12, e13, e23, e14, e24, e34, e1234 (masks 0,3,5,6,9,10,12,15)
  Z.images.resize(8, qu_zero(Z.alg));
  Z.images[0] = qu_basis(Z.alg, 0);
  Z.images[1] = qu_basis(Z.alg, 1);                                       // e12 -> i
  Z.images[2] = qu_basis(Z.alg, 2);                                       // e13 -> j
  Z.images[3] = scaled(3, v_neg(v_inv(emb(a1))));                         // e23 = -k/a1
  Z.images[4] = scaled(3, v_div(s, emb(v_mul(a1, v_mul(a2, a3)))));       // e14 = k z/(a1a2a3)
  Z.images[5] = scaled(2, v_div(s, emb(v_mul(a1, a3))));                  // e24 = j z/(a1a3)
  Z.images[6] = scaled(1, v_neg(v_div(s, emb(v_mul(a1, a2)))));           // e34 = -i z/(a1a2)
  Z.images[7] = scaled(0, s);                                             // e1234 -> s
  // fix the basis/mask alignment of the ambient algebra
  static const int masks[8] = {0, 3, 5, 6, 9, 10, 12, 15};
  for (int i = 0; i < 8; ++i)
    if (C.basis[i] != masks[i]) throw Error("InternalError", "unexpected basis order");
  // verify multiplicativity on every basis pair and bijectivity over the base
  for (int i = 0; i < C.dim; ++i)
    for (int j = 0; j < C.dim; ++j) {
      Quat lhs = quaternionize_apply(Z, c_mul(C, c_basis(C, i), c_basis(C, j)));
      Quat rhs = qu_mul(Z.alg, Z.images[i], Z.images[j]);
      if (!vec_eq(lhs, rhs)) throw Error("InternalError", "quaternionization not multiplicative");
    }
  Mat flat = m_zero(C.F, 8, 8);
  for (int j = 0; j < 8; ++j)
    for (int c = 0; c < 4; ++c) {
      flat.at(2 * c, j) = Z.images[j][c].pr[0];
      flat.at(2 * c + 1, j) = Z.images[j][c].pr[1];
    }
  if (m_rank(flat) != 8) throw Error("InternalError", "quaternionization not bijective");
  return Z;
}

// product of two odd vectors (coordinates in the generators of the diagonal
// form `q`) inside C0(q): v.w = sum v_k w_k a_k + sum_{k<l} (v_k w_l - v_l w_k) e_k e_l
static CElt odd_pair_product(const EvenCliffordAlgebra& C, const Vec& v, const Vec& w) {
  CElt r = c_zero(C);
  for (int k = 0; k < C.n; ++k)
    r[0] = v_add(r[0], v_mul(v_mul(v[k], w[k]), C.coeffs[k]));
  for (int k = 0; k < C.n; ++k)
    for (int l = k + 1; l < C.n; ++l) {
      Value c = v_sub(v_mul(v[k], w[l]), v_mul(v[l], w[k]));
      int idx = C.index_of((1 << k) | (1 << l));
      r[idx] = v_add(r[idx], c);
    }
  return r;
}

C0Map c0_functor(const QuadForm& q_from, const QuadForm& q_to, const Similarity& psi) {
  if (!sim_check(q_from, q_to, psi))
    throw Error("ContractViolation", "similarity contract fails");
  C0Map out;
  out.dom = even_clifford(q_from);
  out.cod = even_clifford(q_to);
  Value linv = v_inv(psi.factor);
  std::vector<Vec> cols(q_from.n); // psi(e_i)
  for (int i = 0; i < q_from.n; ++i) {
    cols[i] = Vec(q_to.n, v_zero(q_to.F));
    for (int r = 0; r < q_to.n; ++r) cols[i][r] = psi.matrix.at(r, i);
  }
  out.matrix = m_zero(q_from.F, out.dom.dim, out.dom.dim);
  for (int j = 0; j < out.dom.dim; ++j) {
    int mask = out.dom.basis[j];
    std::vector<int> gens;
    for (int g = 0; g < q_from.n; ++g)
      if (mask & (1 << g)) gens.push_back(g);
    CElt img = c_one(out.cod);
    for (size_t p = 0; p + 1 < gens.size(); p += 2) {
      CElt pairimg = odd_pair_product(out.cod, cols[gens[p]], cols[gens[p + 1]]);
      img = c_mul(out.cod, img, vec_scal(linv, pairimg));
    }
    for (int r = 0; r < out.dom.dim; ++r) out.matrix.at(r, j) = img[r];
  }
  // verified algebra homomorphism and bijection
  for (int i = 0; i < out.dom.dim; ++i)
    for (int j = 0; j < out.dom.dim; ++j) {
      CElt lhs = m_apply(out.matrix, c_mul(out.dom, c_basis(out.dom, i), c_basis(out.dom, j)));
      CElt rhs = c_mul(out.cod, m_apply(out.matrix, c_basis(out.dom, i)),
                       m_apply(out.matrix, c_basis(out.dom, j)));
      if (!vec_eq(lhs, rhs)) throw Error("ContractViolation", "induced map is not multiplicative");
    }
  try {
    m_inverse(out.matrix);
  } catch (const Error&) {
    throw Error("ContractViolation", "induced map is not bijective");
  }
  return out;
}

Mat degenerate_iso_apply(const DegenerateC0Iso& I, const CElt& x) {
  Mat out = m_zero(I.D, 2, 2);
  for (size_t i = 0; i < x.size(); ++i)
    out = m_add(out, m_scal(v_embed(I.D, x[i]), I.images[i]));
  return out;
}

DegenerateC0Iso degenerate_c0_iso(const FieldPtr& k) {
  if (k->characteristic() == 2) throw Error("UnsupportedDomain", "characteristic 2");
  DegenerateC0Iso I;
  I.C = even_clifford(qf_diag(k, {v_one(k), v_int(k, -1), v_one(k), v_zero(k)}));
  I.D = FieldTower::dual_numbers(k);
  Value eps = v_gen(I.D);
  auto mat = [&](long m00, long m01, long m10, long m11, bool by_eps) {
    Mat M = m_zero(I.D, 2, 2);
    M.at(0, 0) = v_int(I.D, m00);
    M.at(0, 1) = v_int(I.D, m01);
    M.at(1, 0) = v_int(I.D, m10);
    M.at(1, 1) = v_int(I.D, m11);
    return by_eps ? m_scal(eps, M) : M;
  };
  // basis order 1, e12, e13, e23, e14, e24, e34, e1234; e_ie_4 = eps * complement
  I.images = {mat(1, 0, 0, 1, false),  mat(0, 1, 1, 0, false), mat(0, 1, -1, 0, false),
              mat(1, 0, 0, -1, false), mat(1, 0, 0, -1, true), mat(0, 1, -1, 0, true),
              mat(0, 1, 1, 0, true),   mat(1, 0, 0, 1, true)};
  for (int i = 0; i < I.C.dim; ++i)
    for (int j = 0; j < I.C.dim; ++j) {
      Mat lhs = degenerate_iso_apply(I, c_mul(I.C, c_basis(I.C, i), c_basis(I.C, j)));
      Mat rhs = m_mul(I.images[i], I.images[j]);
      if (!m_eq(lhs, rhs)) throw Error("InternalError", "degenerate iso not multiplicative");
    }
  Mat flat = m_zero(k, 8, 8);
  for (int j = 0; j < 8; ++j)
    for (int c = 0; c < 4; ++c) {
      flat.at(2 * c, j) = I.images[j].a[c].pr[0];
      flat.at(2 * c + 1, j) = I.images[j].a[c].pr[1];
    }
  if (m_rank(flat) != 8) throw Error("InternalError", "degenerate iso not bijective");
  return I;
}

UnipotentAction unipotent_action(const FieldPtr& k, const Value& a, const Value& b,
                                 const Value& c) {
  DegenerateC0Iso I = degenerate_c0_iso(k);
  const EvenCliffordAlgebra& C = I.C;
  Value h2 = half(k);
  // g = 1 - (1/2) eps (c e12 + a e23 - b e13), eps = e1e2e3e4
  CElt m = c_zero(C);
  m[1] = c;         // e12
  m[3] = a;         // e23
  m[2] = v_neg(b);  // e13
  CElt epsm = c_mul(C, c_basis(C, 7), m);
  CElt g = c_one(C), ginv = c_one(C);
  for (int i = 0; i < C.dim; ++i) {
    g[i] = v_sub(g[i], v_mul(h2, epsm[i]));
    ginv[i] = v_add(ginv[i], v_mul(h2, epsm[i]));
  }
  if (!vec_eq(c_mul(C, g, ginv), c_one(C)))
    throw Error("InternalError", "unipotent element not invertible");
  auto sigma = [&](const CElt& x) { return c_mul(C, c_mul(C, g, x), ginv); };
  // the three displayed action equations and sigma(eps) = eps
  auto eps_times = [&](int idx) { return c_mul(C, c_basis(C, 7), c_basis(C, idx)); };
  auto expect = [&](int idx, const Value& c1, int i1, const Value& c2, int i2) {
    CElt e = c_basis(C, idx);
    CElt t1 = vec_scal(c1, eps_times(i1)), t2 = vec_scal(c2, eps_times(i2));
    return vec_add(e, vec_add(t1, t2));
  };
  bool ok = vec_eq(sigma(c_basis(C, 1)), expect(1, b, 3, v_neg(a), 2)) &&
            vec_eq(sigma(c_basis(C, 3)), expect(3, c, 2, v_neg(b), 1)) &&
            vec_eq(sigma(c_basis(C, 2)), expect(2, c, 3, v_neg(a), 1)) &&
            vec_eq(sigma(c_basis(C, 7)), c_basis(C, 7));
  if (!ok) throw Error("InternalError", "unipotent action equations fail");

  UnipotentAction out;
  out.phi = m_identity(k, 4);
  out.phi.at(3, 0) = a;
  out.phi.at(3, 1) = b;
  out.phi.at(3, 2) = c;
  // sigma agrees with the functor image of phi
  QuadForm q = qf_diag(k, {v_one(k), v_int(k, -1), v_one(k), v_zero(k)});
  C0Map f = c0_functor(q, q, Similarity{out.phi, v_one(k)});
  for (int i = 0; i < C.dim; ++i)
    if (!vec_eq(m_apply(f.matrix, c_basis(C, i)), sigma(c_basis(C, i))))
      throw Error("InternalError", "unipotent action disagrees with the C0 functor");

  out.model = degenerate_iso_apply(I, g);
  // explicit shape I - (1/2) eps [[a, -b+c],[b+c, -a]]
  Value eps = v_gen(I.D);
  Mat shape = m_identity(I.D, 2);
  auto emb = [&](const Value& x) { return v_embed(I.D, x); };
  Value he = v_mul(v_embed(I.D, h2), eps);
  shape.at(0, 0) = v_sub(shape.at(0, 0), v_mul(he, emb(a)));
  shape.at(0, 1) = v_sub(shape.at(0, 1), v_mul(he, emb(v_sub(c, b))));
  shape.at(1, 0) = v_sub(shape.at(1, 0), v_mul(he, emb(v_add(b, c))));
  shape.at(1, 1) = v_add(shape.at(1, 1), v_mul(he, emb(a)));
  if (!m_eq(out.model, shape)) throw Error("InternalError", "matrix model shape mismatch");
  // adjoint identity in the matrix model
  Mat minv = m_inverse(out.model);
  for (int i = 0; i < C.dim; ++i) {
    Mat lhs = degenerate_iso_apply(I, sigma(c_basis(C, i)));
    Mat rhs = m_mul(out.model, m_mul(degenerate_iso_apply(I, c_basis(C, i)), minv));
    if (!m_eq(lhs, rhs)) throw Error("InternalError", "matrix-model adjoint identity fails");
  }
  return out;
}

static void check_so3(const FieldPtr& k, const Mat& A) {
  if (A.rows != 3 || A.cols != 3) throw Error("NotInLieAlgebra", "A must be 3x3");
  Mat Q1 = m_identity(k, 3);
  Q1.at(1, 1) = v_int(k, -1);
  Mat AQ = m_mul(A, Q1);
  if (!m_eq(m_transpose(AQ), m_scal(v_int(k, -1), AQ)))
    throw Error("NotInLieAlgebra", "A Q1 is not skew-symmetric");
}

Mat lie_alpha(const FieldPtr& k, const Mat& A) {
  check_so3(k, A);
  Value a = A.at(0, 1), b = v_neg(A.at(0, 2)), c = A.at(1, 2);
  Mat M = m_zero(k, 2, 2);
  M.at(0, 0) = v_neg(c);
  M.at(0, 1) = v_add(a, b);
  M.at(1, 0) = v_sub(a, b);
  M.at(1, 1) = c;
  return m_scal(half(k), M);
}

Mat lie_beta(const FieldPtr& k, const Vec& w) {
  Mat M = m_zero(k, 2, 2);
  M.at(0, 0) = w[0];
  M.at(0, 1) = v_sub(w[2], w[1]);
  M.at(1, 0) = v_add(w[1], w[2]);
  M.at(1, 1) = v_neg(w[0]);
  return m_scal(half(k), M);
}

bool lie_map_check(const FieldPtr& k, const Mat& A, const Vec& w) {
  Mat alpha = lie_alpha(k, A);
  Mat beta = lie_beta(k, w);
  // alpha and beta are injective onto trace-zero matrices: rank 3 over (a,b,c)
  auto rank_of = [&](bool use_alpha) {
    Mat flat = m_zero(k, 3, 3);
    for (int p = 0; p < 3; ++p) {
      Vec e(3, v_zero(k));
      e[p] = v_one(k);
      Mat img;
      if (use_alpha) {
        Mat B = m_zero(k, 3, 3);
        B.at(0, 1) = e[0];
        B.at(1, 0) = e[0];
        B.at(0, 2) = v_neg(e[1]);
        B.at(2, 0) = e[1];
        B.at(1, 2) = e[2];
        B.at(2, 1) = e[2];
        img = lie_alpha(k, B);
      } else {
        img = lie_beta(k, e);
      }
      flat.at(0, p) = img.at(0, 0);
      flat.at(1, p) = img.at(0, 1);
      flat.at(2, p) = img.at(1, 0);
    }
    return m_rank(flat);
  };
  if (rank_of(true) != 3 || rank_of(false) != 3) return false;

  // product decomposition over k[x, eps]/(x^2, eps^2)
  FieldPtr K1 = FieldTower::dual_numbers(k); // generator x
  Value x = v_gen(K1);
  QuadForm q = qf_diag(K1, {v_one(K1), v_int(K1, -1), v_one(K1), v_zero(K1)});
  Mat g4 = m_identity(K1, 4);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j)
      g4.at(i, j) = v_add(g4.at(i, j), v_mul(x, v_embed(K1, A.at(i, j))));
    g4.at(3, i) = v_mul(x, v_embed(K1, w[i]));
  }
  Similarity s{g4, v_one(K1)};
  if (!sim_check(q, q, s)) return false;
  C0Map f = c0_functor(q, q, s);
  DegenerateC0Iso I = degenerate_c0_iso(K1);
  Value x2 = v_embed(I.D, x), eps2 = v_gen(I.D);
  Mat h = m_identity(I.D, 2);
  for (int r = 0; r < 2; ++r)
    for (int c2 = 0; c2 < 2; ++c2) {
      Value t = v_add(v_embed(I.D, v_embed(K1, alpha.at(r, c2))),
                      v_mul(eps2, v_embed(I.D, v_embed(K1, beta.at(r, c2)))));
      h.at(r, c2) = v_sub(h.at(r, c2), v_mul(x2, t));
    }
  Mat hinv = m_inverse(h);
  for (int i = 0; i < I.C.dim; ++i) {
    Mat lhs = degenerate_iso_apply(I, m_apply(f.matrix, c_basis(I.C, i)));
    Mat rhs = m_mul(h, m_mul(degenerate_iso_apply(I, c_basis(I.C, i)), hinv));
    if (!m_eq(lhs, rhs)) return false;
  }
  return true;
}

bool orthogonal_relations_check(const Mat& A, const Vec& v, const Vec& w, const Value& u,
                                const Mat& Q1, const Value& pi) {
  const FieldPtr& F = A.F;
  int m = A.rows;
  Mat wt = m_zero(F, m, m); // w^t w (outer product)
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) wt.at(i, j) = v_mul(w[i], w[j]);
  Mat rel1 = m_add(m_mul(m_transpose(A), m_mul(Q1, A)), m_scal(pi, wt));
  if (!m_eq(rel1, Q1)) return false;
  Vec lhs2 = m_apply(m_mul(m_transpose(A), Q1), v);
  for (int i = 0; i < m; ++i)
    lhs2[i] = v_add(lhs2[i], v_mul(v_mul(u, pi), w[i]));
  if (!vec_is_zero(lhs2)) return false;
  Value vv = v_zero(F);
  Vec Qv = m_apply(Q1, v);
  for (int i = 0; i < m; ++i) vv = v_add(vv, v_mul(v[i], Qv[i]));
  Value rhs3 = v_mul(v_sub(v_one(F), v_mul(u, u)), pi);
  return v_eq(vv, rhs3);
}

} // namespace qsb
