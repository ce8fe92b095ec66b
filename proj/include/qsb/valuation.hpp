#pragma once
// Discrete valuations on the supported fields, residue maps, square-class
// reduction, and the small number-theoretic toolbox (integer factorization,
// Legendre/Hilbert symbols, polynomial factorization over prime fields).

#include "qsb/fieldtower.hpp"

#include <functional>
#include <optional>

namespace qsb {

enum class ValKind {
  Padic,     // p-adic valuation on Q (or on towers whose bottom is Q? no: on Q only)
  PolyPlace, // (f) for monic irreducible f over the base of a function field
  DegreePlace // the place at infinity of a function field: v(x) = deg den - deg num
};

struct Valuation {
  ValKind kind{ValKind::Padic};
  FieldPtr K;   // the field the valuation lives on
  long p{0};    // Padic
  VPoly f;      // PolyPlace: monic polynomial over K->base (irreducibility is the caller's contract
                // for higher degree; degree 1 is always fine)
  static Valuation padic(long p);
  static Valuation poly_place(const FieldPtr& K, const VPoly& f);
  static Valuation degree_place(const FieldPtr& K);
  std::string str() const;
  // A uniformizer as an element of K.
  Value uniformizer() const;
  // Residue field when representable as a FieldTower (nullptr otherwise,
  // e.g. a PolyPlace of degree >= 2 over a prime field).
  FieldPtr residue_field() const;
  int residue_degree() const; // PolyPlace: deg f; otherwise 1
};

// v(x); nullopt encodes +infinity (x == 0).
std::optional<long> valuation_of(const Value& x, const Valuation& v);
// Residue of a valuation-nonnegative element; Error NegativeValuation /
// UnsupportedResidue.
Value residue_of(const Value& x, const Valuation& v);

// Residue representative as a polynomial mod the place polynomial (works for
// places of any residue degree over a function field).
VPoly residue_mod_place(const Value& x, const Valuation& v);

// Square classes.  The result is a canonical representative:
//   Q: signed squarefree integer (as a Value);
//   F_p: 1 or the least nonresidue;
//   K(t): (reduced base square class) * (monic product of odd-multiplicity irreducible factors).
Value squareclass_reduce(const Value& x); // Error ZeroElement, UnsupportedDomain
bool is_square(const Value& x);           // true for 0
// Exact square root where representable; nullopt if x is not a square.
std::optional<Value> v_sqrt(const Value& x);

// Norm of the quadratic etale algebra K[s]/(s^2-d): x^2 - d y^2, landing in K.
Value etale_norm(const Value& x); // argument must live in a QuadraticEtale tower

// ---------------------------------------------------------------------------
// Integer helpers (on BigInt)
// ---------------------------------------------------------------------------
std::vector<std::pair<BigInt, int>> factor_integer(BigInt n); // n != 0, factors |n|
int legendre(const BigInt& a, long p);                         // p odd prime; a not divisible by p -> +-1; 0 if p|a
int hilbert_qp(Rat a, Rat b, long p);                          // Hilbert symbol over Q_p (p = -1 means the real place)
// All places where the symbol could be -1: 2, "infinity" (encoded -1) and odd primes dividing a or b.
std::vector<long> hilbert_candidate_places(const Rat& a, const Rat& b);

// ---------------------------------------------------------------------------
// Polynomials over F_p
// ---------------------------------------------------------------------------
// Squarefree decomposition f = prod f_i^i over any supported field of
// coefficients (handles char p via p-th roots over prime fields).
std::vector<std::pair<VPoly, int>> squarefree_decomposition(const FieldPtr& K, VPoly f);
// Full factorization into monic irreducibles; only over PrimeField coefficients.
std::vector<std::pair<VPoly, int>> factor_poly_fp(const FieldPtr& K, const VPoly& f);
bool poly_irreducible_fp(const FieldPtr& K, const VPoly& f);
// Squareness of a nonzero residue in F_p[t]/(f), f irreducible over F_p.
bool residue_is_square_mod(const FieldPtr& K, const VPoly& f, const VPoly& a);

// ---------------------------------------------------------------------------
// Deterministic element enumeration (for bounded witness searches)
// ---------------------------------------------------------------------------
// Calls fn on elements of F in a fixed order of increasing height until fn
// returns true (stop) or `budget` elements were visited.  Returns true if fn
// stopped the scan.
bool enumerate_elements(const FieldPtr& F, long budget, const std::function<bool(const Value&)>& fn);

} // namespace qsb
