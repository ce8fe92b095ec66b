#pragma once
// Exact arithmetic over a small tower of coefficient domains:
//   Q, F_p (p odd), K(t), K[s]/(s^2 - d), K[eps]/(eps^2).
// Values are immutable; every Value carries a pointer to its domain
// descriptor so mixed-domain operations can be rejected early.

#include <boost/multiprecision/cpp_int.hpp>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsb {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Structured error: `code` is a stable machine-readable name, `what()` adds detail.
class Error : public std::runtime_error {
 public:
  std::string code;
  Error(std::string c, const std::string& detail)
      : std::runtime_error(c + ": " + detail), code(std::move(c)) {}
};

enum class FieldKind { Rationals, PrimeField, RationalFunctionField, QuadraticEtale, DualNumbers };

class FieldTower;
class Value;
using FieldPtr = std::shared_ptr<const FieldTower>;

class FieldTower {
 public:
  FieldKind kind{FieldKind::Rationals};
  long p{0};                          // PrimeField
  FieldPtr base;                      // the three composite kinds
  std::string var;                    // RationalFunctionField
  std::shared_ptr<const Value> ext_d; // QuadraticEtale: s^2 = d, d in base

  static FieldPtr rationals();
  static FieldPtr prime_field(long p);
  static FieldPtr function_field(const FieldPtr& base, const std::string& var);
  static FieldPtr quadratic_etale(const FieldPtr& base, const Value& d);
  static FieldPtr dual_numbers(const FieldPtr& base);

  bool same(const FieldTower& o) const;
  bool is_field() const;       // false for DualNumbers (and split etale has zero divisors)
  long characteristic() const; // 0 or p
  int depth() const;           // number of tower levels
  std::string descriptor() const;
  // Parse "Q", "Fp:5", "Fun:<base>:<var>", "Ext:<base>:<d>", "Dual:<base>".
  static FieldPtr parse_descriptor(const std::string& s);
};

// Tagged union; the active payload is determined by F->kind.
class Value {
 public:
  FieldPtr F;
  Rat q;                       // Rationals
  long r{0};                   // PrimeField, in [0, p)
  std::vector<Value> num, den; // RationalFunctionField; coefficients in base, low degree first;
                               // normalized: den monic, gcd(num,den)=1, no leading zeros
  std::vector<Value> pr;       // QuadraticEtale / DualNumbers: [x, y] meaning x + y*s (or x + y*eps)

  Value() = default;
  std::string str() const;
};

// -- construction ------------------------------------------------------------
Value v_zero(const FieldPtr& F);
Value v_one(const FieldPtr& F);
Value v_int(const FieldPtr& F, long n);
Value v_rat(const FieldPtr& F, const Rat& x);
// The generator of the top level: t for Fun, s for Ext, eps for Dual.
Value v_gen(const FieldPtr& F);
// Lift a value of F->base (or any ancestor) into F.
Value v_embed(const FieldPtr& F, const Value& x);
// True when x lies in the canonical image of `anc` inside x.F; if so, the
// descended value is stored in *out.
bool v_descends(const Value& x, const FieldPtr& anc, Value* out);

// -- arithmetic --------------------------------------------------------------
Value v_add(const Value& a, const Value& b);
Value v_sub(const Value& a, const Value& b);
Value v_mul(const Value& a, const Value& b);
Value v_neg(const Value& a);
Value v_inv(const Value& a); // Error ZeroElement / ZeroDivisor
Value v_div(const Value& a, const Value& b);
Value v_pow(const Value& a, long e);
bool v_is_zero(const Value& a);
bool v_eq(const Value& a, const Value& b);

// Conjugation x + y*s -> x - y*s on the top Etale/Dual level.
Value v_conj(const Value& a);
// Norm to the base: x^2 - d*y^2 (Etale) or x^2 (Dual); result lives in F->base.
Value v_norm_down(const Value& a);

// -- univariate polynomial helpers over an arbitrary coefficient field -------
// Polynomials are coefficient vectors (low degree first) of Values over `K`.
using VPoly = std::vector<Value>;
int p_deg(const VPoly& f); // -1 for zero
VPoly p_trim(VPoly f);
VPoly p_add(const FieldPtr& K, const VPoly& a, const VPoly& b);
VPoly p_sub(const FieldPtr& K, const VPoly& a, const VPoly& b);
VPoly p_mul(const FieldPtr& K, const VPoly& a, const VPoly& b);
VPoly p_neg(const VPoly& a);
// Division with remainder; requires invertible leading coefficient of b.
void p_divmod(const FieldPtr& K, const VPoly& a, const VPoly& b, VPoly& quo, VPoly& rem);
VPoly p_gcd(const FieldPtr& K, VPoly a, VPoly b); // monic gcd
VPoly p_deriv(const FieldPtr& K, const VPoly& a);
VPoly p_monic(const FieldPtr& K, const VPoly& a);
Value p_eval(const FieldPtr& K, const VPoly& a, const Value& x);
bool p_eq(const VPoly& a, const VPoly& b);
std::string p_str(const VPoly& f, const std::string& var);
VPoly p_scal(const Value& c, const VPoly& a);

// -- parsing / printing -------------------------------------------------------
// Expression grammar: integers, tower variable names, `sqrt(<expr>)` for the
// Etale generator, `eps` for the Dual generator, + - * / ^ and parentheses.
Value parse_value(const FieldPtr& F, const std::string& text);

} // namespace qsb
