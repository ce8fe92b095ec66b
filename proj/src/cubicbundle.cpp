#include "qsb/cubicbundle.hpp"

#include <sstream>

namespace qsb {

// variable indices: x0 x1 x2 y0 y1 y2 z
static int ydeg(const MExp& e) { return e[3] + e[4] + e[5]; }
static int xdeg(const MExp& e) { return e[0] + e[1] + e[2]; }

CubicContainingPlane cubic_make(const MPoly& f) {
  if (mp_is_zero(f) || !mp_is_homogeneous(f) || mp_total_deg(f) != 3 || mp_deg_in(f, 6) > 0)
    throw Error("PreconditionViolation",
                "expected a nonzero homogeneous cubic in x0, x1, x2, y0, y1, y2");
  for (const auto& [e, c] : f.terms)
    if (xdeg(e) == 0)
      throw Error("PlaneNotContained",
                  "the cubic has a term outside the ideal (x0, x1, x2)");
  return CubicContainingPlane{f.F, f};
}

BundleForm extract_bundle(const CubicContainingPlane& f) {
  const FieldPtr& F = f.F;
  Value half = v_inv(v_int(F, 2));
  BundleForm out{F,
                 {{{mp_zero(F), mp_zero(F), mp_zero(F)},
                   {mp_zero(F), mp_zero(F), mp_zero(F)},
                   {mp_zero(F), mp_zero(F), mp_zero(F)}}},
                 {mp_zero(F), mp_zero(F), mp_zero(F)},
                 mp_zero(F)};
  for (const auto& [e, c] : f.cubic.terms) {
    MExp xm = e;
    xm[3] = xm[4] = xm[5] = 0;
    int yd = ydeg(e);
    if (yd == 2) {
      int m = -1, n = -1;
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < e[static_cast<size_t>(i + 3)]; ++k) (m < 0 ? m : n) = i;
      if (m == n) {
        out.a[static_cast<size_t>(m)][static_cast<size_t>(m)] = mp_add(
            out.a[static_cast<size_t>(m)][static_cast<size_t>(m)], mp_monomial(c, xm));
      } else {
        MPoly hmon = mp_monomial(v_mul(half, c), xm);
        out.a[static_cast<size_t>(m)][static_cast<size_t>(n)] =
            mp_add(out.a[static_cast<size_t>(m)][static_cast<size_t>(n)], hmon);
        out.a[static_cast<size_t>(n)][static_cast<size_t>(m)] =
            mp_add(out.a[static_cast<size_t>(n)][static_cast<size_t>(m)], hmon);
      }
    } else if (yd == 1) {
      int p = e[3] ? 0 : e[4] ? 1 : 2;
      out.b[static_cast<size_t>(p)] = mp_add(out.b[static_cast<size_t>(p)], mp_monomial(c, xm));
    } else {
      out.c = mp_add(out.c, mp_monomial(c, xm));
    }
  }
  if (!mp_eq(out.reassemble(), f.cubic))
    throw Error("InternalError", "reassembly identity failed after extraction");
  return out;
}

BundleForm bundle_from_quadric(const MPoly& q) {
  const FieldPtr& F = q.F;
  for (const auto& [e, c] : q.terms)
    if (ydeg(e) + e[6] != 2 || xdeg(e) != 1 + e[6])
      throw Error("PreconditionViolation",
                  "quadric must be a section of O(2) twisted by O(1): every term "
                  "y-z degree 2 with x-degree 1 + z-degree");
  // substituting z = 1 turns the section back into a cubic in (x, y)
  std::array<MPoly, MP_NVARS> images;
  for (int i = 0; i < MP_NVARS; ++i) images[static_cast<size_t>(i)] = mp_var(F, i);
  images[6] = mp_const(v_one(F));
  return extract_bundle(cubic_make(mp_compose(q, images)));
}

std::array<std::array<MPoly, 4>, 4> BundleForm::gram() const {
  Value half = v_inv(v_int(F, 2));
  std::array<std::array<MPoly, 4>, 4> g{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g[static_cast<size_t>(i)][static_cast<size_t>(j)] = mp_zero(F);
  for (int m = 0; m < 3; ++m)
    for (int n = 0; n < 3; ++n)
      g[static_cast<size_t>(m)][static_cast<size_t>(n)] = a[static_cast<size_t>(m)][static_cast<size_t>(n)];
  for (int m = 0; m < 3; ++m) {
    MPoly hb = mp_scal(half, b[static_cast<size_t>(m)]);
    g[static_cast<size_t>(m)][3] = hb;
    g[3][static_cast<size_t>(m)] = hb;
  }
  g[3][3] = c;
  return g;
}

MPoly BundleForm::quadric() const {
  MPoly q = mp_zero(F);
  MPoly zv = mp_var(F, 6);
  for (int m = 0; m < 3; ++m)
    for (int n = 0; n < 3; ++n)
      q = mp_add(q, mp_mul(a[static_cast<size_t>(m)][static_cast<size_t>(n)],
                           mp_mul(mp_var(F, 3 + m), mp_var(F, 3 + n))));
  for (int p = 0; p < 3; ++p)
    q = mp_add(q, mp_mul(b[static_cast<size_t>(p)], mp_mul(mp_var(F, 3 + p), zv)));
  return mp_add(q, mp_mul(c, mp_mul(zv, zv)));
}

MPoly BundleForm::reassemble() const {
  std::array<MPoly, MP_NVARS> images;
  for (int i = 0; i < MP_NVARS; ++i) images[static_cast<size_t>(i)] = mp_var(F, i);
  images[6] = mp_const(v_one(F));
  return mp_compose(quadric(), images);
}

std::string BundleForm::str() const {
  std::ostringstream os;
  os << "a =";
  for (int m = 0; m < 3; ++m) {
    os << (m ? "; " : " [");
    for (int n = 0; n < 3; ++n)
      os << (n ? ", " : "") << a[static_cast<size_t>(m)][static_cast<size_t>(n)].str();
  }
  os << "]\nb = (";
  for (int p = 0; p < 3; ++p) os << (p ? ", " : "") << b[static_cast<size_t>(p)].str();
  os << ")\nc = " << c.str();
  return os.str();
}

static MPoly mdet(const FieldPtr& F, const std::vector<std::vector<MPoly>>& M) {
  size_t n = M.size();
  if (n == 1) return M[0][0];
  MPoly out = mp_zero(F);
  for (size_t j = 0; j < n; ++j) {
    if (mp_is_zero(M[0][j])) continue;
    std::vector<std::vector<MPoly>> sub;
    for (size_t i = 1; i < n; ++i) {
      std::vector<MPoly> row;
      for (size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(M[i][k]);
      sub.push_back(row);
    }
    MPoly t = mp_mul(M[0][j], mdet(F, sub));
    out = (j % 2 == 0) ? mp_add(out, t) : mp_sub(out, t);
  }
  return out;
}

MPoly discriminant_sextic(const BundleForm& bf) {
  auto g = bf.gram();
  std::vector<std::vector<MPoly>> M(4, std::vector<MPoly>());
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) M[static_cast<size_t>(i)].push_back(g[static_cast<size_t>(i)][static_cast<size_t>(j)]);
  MPoly det = mdet(bf.F, M);
  if (mp_is_zero(det))
    throw Error("GenericallyDegenerate", "the Gram determinant vanishes identically");
  if (!mp_is_homogeneous(det) || mp_total_deg(det) != 6)
    throw Error("InternalError", "Gram determinant is not a sextic");
  return det;
}

SquarefreeReport multiplicity_one_check(const BundleForm& bf) {
  MPoly det = discriminant_sextic(bf);
  const FieldPtr& F = bf.F;
  for (int i = 0; i < 3; ++i)
    if (mp_var_multiplicity(det, i) >= 2)
      return {false, mp_var(F, i),
              std::string(mp_var_names[static_cast<size_t>(i)]) +
                  "^2 divides the discriminant"};
  MPoly r = det;
  bool have_partial = false;
  for (int i = 0; i < 3 && mp_total_deg(r) > 0; ++i) {
    MPoly d = mp_deriv(det, i);
    if (mp_is_zero(d)) continue;
    have_partial = true;
    r = mp_gcd_homog3(r, d);
  }
  if (!have_partial) {
    // all partials vanish: det lies in k[x0^p, x1^p, x2^p], a p-th power
    long p = F->characteristic();
    MPoly root = mp_zero(F);
    for (const auto& [e, c] : det.terms) {
      MExp e2{};
      for (int i = 0; i < 3; ++i) e2[static_cast<size_t>(i)] = static_cast<uint8_t>(e[static_cast<size_t>(i)] / p);
      root = mp_add(root, mp_monomial(c, e2));
    }
    return {false, root, "the discriminant is a p-th power in characteristic " + std::to_string(p)};
  }
  if (mp_total_deg(r) > 0)
    return {false, r, "common factor of the discriminant and its partial derivatives"};
  return {true, mp_const(v_one(F)), "discriminant is squarefree"};
}

SimpleLocusReport simple_degeneration_locus_check(const BundleForm& bf) {
  MPoly det = discriminant_sextic(bf);
  auto g = bf.gram();
  MPoly r = det;
  for (int i = 0; i < 4 && mp_total_deg(r) > 0; ++i)
    for (int j = i; j < 4 && mp_total_deg(r) > 0; ++j) {
      std::vector<std::vector<MPoly>> sub;
      for (int s = 0; s < 4; ++s) {
        if (s == i) continue;
        std::vector<MPoly> row;
        for (int t = 0; t < 4; ++t)
          if (t != j) row.push_back(g[static_cast<size_t>(s)][static_cast<size_t>(t)]);
        sub.push_back(row);
      }
      MPoly minor = mdet(bf.F, sub);
      if (mp_is_zero(minor)) continue; // divisible by everything
      r = mp_gcd_homog3(r, minor);
    }
  if (mp_total_deg(r) > 0)
    return {false, r, "factor of the discriminant dividing every 3x3 minor of the Gram"};
  return {true, mp_const(v_one(bf.F)), "radical rank <= 1 along every component of the discriminant"};
}

Mat j_lift(const Mat& H, const Mat& G, const Value& u) {
  const FieldPtr& F = H.F;
  if (H.rows != 3 || H.cols != 3 || G.rows != 3 || G.cols != 3)
    throw Error("PreconditionViolation", "j_lift needs 3x3 blocks");
  if (v_is_zero(m_det(H))) throw Error("SingularH", "the y-block H is singular");
  if (v_is_zero(u)) throw Error("SingularH", "the scaling u must be a unit");
  Mat J = m_zero(F, 6, 6);
  for (int i = 0; i < 3; ++i) {
    J.at(i, i) = u;
    for (int j = 0; j < 3; ++j) {
      J.at(3 + i, j) = G.at(i, j);
      J.at(3 + i, 3 + j) = H.at(i, j);
    }
  }
  return J;
}

JLiftReport j_lift_verify(const BundleForm& q1, const BundleForm& q2, const Mat& H,
                          const Mat& G, const Value& u, const Value& lambda) {
  const FieldPtr& F = q1.F;
  Mat J = j_lift(H, G, u);
  // bundle-level similarity psi: y_i -> sum_j (h_ij y_j + g_ij x_j z), z -> u z
  std::array<MPoly, MP_NVARS> psi;
  for (int i = 0; i < MP_NVARS; ++i) psi[static_cast<size_t>(i)] = mp_var(F, i);
  MPoly zv = mp_var(F, 6);
  for (int i = 0; i < 3; ++i) {
    MPoly im = mp_zero(F);
    for (int j = 0; j < 3; ++j) {
      im = mp_add(im, mp_scal(H.at(i, j), mp_var(F, 3 + j)));
      im = mp_add(im, mp_scal(G.at(i, j), mp_mul(mp_var(F, j), zv)));
    }
    psi[static_cast<size_t>(3 + i)] = im;
  }
  psi[6] = mp_scal(u, zv);
  bool bundle_ok = mp_eq(mp_compose(q2.quadric(), psi), mp_scal(lambda, q1.quadric()));
  // cubic-level action of J: x -> u x, y -> G x + H y
  std::array<MPoly, MP_NVARS> jact;
  for (int i = 0; i < MP_NVARS; ++i) jact[static_cast<size_t>(i)] = mp_var(F, i);
  for (int i = 0; i < 3; ++i) {
    jact[static_cast<size_t>(i)] = mp_scal(u, mp_var(F, i));
    MPoly im = mp_zero(F);
    for (int j = 0; j < 3; ++j) {
      im = mp_add(im, mp_scal(G.at(i, j), mp_var(F, j)));
      im = mp_add(im, mp_scal(H.at(i, j), mp_var(F, 3 + j)));
    }
    jact[static_cast<size_t>(3 + i)] = im;
  }
  bool cubic_ok = mp_eq(mp_compose(q2.reassemble(), jact),
                        mp_scal(v_mul(u, lambda), q1.reassemble()));
  JLiftReport rep{J, bundle_ok && cubic_ok, ""};
  if (rep.verified)
    rep.note = "q2 . psi = lambda q1 and F2 . J = u lambda F1 verified";
  else
    rep.note = std::string("identity failed at the ") +
               (bundle_ok ? "cubic" : "bundle") + " level";
  return rep;
}

} // namespace qsb
