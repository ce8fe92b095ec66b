#pragma once
// Sparse multivariate polynomials in the fixed variable set
//   (x0, x1, x2, y0, y1, y2, z)
// over an exact coefficient field: arithmetic, substitution, homogeneity
// bookkeeping, and gcds of homogeneous polynomials in x0, x1, x2 alone.
// Just enough structure for cubic-fourfold bundle extraction; not a general
// computer-algebra layer.

#include "qsb/fieldtower.hpp"

#include <array>
#include <cstdint>
#include <map>

namespace qsb {

inline constexpr int MP_NVARS = 7;
using MExp = std::array<uint8_t, MP_NVARS>;
// Variable order: x0 x1 x2 y0 y1 y2 z.
extern const std::array<const char*, MP_NVARS> mp_var_names;

struct MPoly {
  FieldPtr F;
  std::map<MExp, Value> terms; // nonzero coefficients only
  std::string str() const;
};

MPoly mp_zero(const FieldPtr& F);
MPoly mp_const(const Value& c);
MPoly mp_var(const FieldPtr& F, int i);
MPoly mp_monomial(const Value& c, const MExp& e);

MPoly mp_add(const MPoly& a, const MPoly& b);
MPoly mp_sub(const MPoly& a, const MPoly& b);
MPoly mp_neg(const MPoly& a);
MPoly mp_mul(const MPoly& a, const MPoly& b);
MPoly mp_scal(const Value& c, const MPoly& a);
MPoly mp_pow(const MPoly& a, int e);

bool mp_is_zero(const MPoly& a);
bool mp_eq(const MPoly& a, const MPoly& b);
int mp_total_deg(const MPoly& a);    // -1 for zero
int mp_deg_in(const MPoly& a, int i);
bool mp_is_homogeneous(const MPoly& a); // zero counts as homogeneous

MPoly mp_deriv(const MPoly& a, int i);
// Substitute images[i] for variable i, for every variable simultaneously.
MPoly mp_compose(const MPoly& a, const std::array<MPoly, MP_NVARS>& images);
Value mp_eval(const MPoly& a, const std::array<Value, MP_NVARS>& pt);

// Largest e with x_i^e dividing a (0 for a = 0), and the exact quotient.
int mp_var_multiplicity(const MPoly& a, int i);
MPoly mp_var_divide(const MPoly& a, int i, int e);

// Monic-normalized gcd (leading coefficient 1 on the lexicographically
// largest monomial) of two homogeneous polynomials supported on x0, x1, x2.
// Computed by stripping variable powers, dehomogenizing at x0 = 1, and
// running a content/primitive-part gcd in k[x1][x2] with the Euclidean part
// over the rational function field k(x1).
MPoly mp_gcd_homog3(const MPoly& a, const MPoly& b); // Error PreconditionViolation

// Expression grammar of parse_value with the seven variable names above.
MPoly mp_parse(const FieldPtr& F, const std::string& text);

} // namespace qsb
