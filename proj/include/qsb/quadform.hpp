#pragma once
// Quadratic forms as symmetric Gram matrices: q(v) = v^T G v, polar form
// b_q(v,w) = q(v+w) - q(v) - q(w) = 2 v^T G w.  Diagonal shorthand <a_1..a_n>
// means G = diag(a_1..a_n).  All algorithms assume 2 invertible.

#include "qsb/linalg.hpp"
#include "qsb/valuation.hpp"

#include <optional>

namespace qsb {

struct QuadForm {
  FieldPtr F;
  Mat gram; // symmetric n x n
  int n{0};
  std::string str() const;
};

QuadForm qf_make(const FieldPtr& F, const Mat& gram); // rejects non-symmetric
QuadForm qf_diag(const FieldPtr& F, const std::vector<Value>& entries);
QuadForm hyperbolic_plane(const FieldPtr& F); // Gram [[0,1],[1,0]]
QuadForm qf_orth_sum(const QuadForm& a, const QuadForm& b);
bool qf_is_diagonal(const QuadForm& q);
std::vector<Value> qf_diagonal_entries(const QuadForm& q);

Value qf_value(const QuadForm& q, const Vec& v);           // v^T G v
Value qf_gram_b(const QuadForm& q, const Vec& v, const Vec& w); // v^T G w
Value qf_polar(const QuadForm& q, const Vec& v, const Vec& w);  // 2 v^T G w

// matrix^T . gram_to . matrix = factor . gram_from
struct Similarity {
  Mat matrix;
  Value factor;
};
Similarity sim_identity(const QuadForm& q);
Similarity sim_compose(const Similarity& second, const Similarity& first);
Similarity sim_inverse(const Similarity& s);
bool sim_check(const QuadForm& from, const QuadForm& to, const Similarity& s);
// Image form of q under an invertible matrix P (gram -> P^T G P as the form in
// the new basis); helper for transported computations.
QuadForm qf_pullback(const QuadForm& q, const Mat& P);

// Basis of ker(gram); empty iff q regular.  Field domains only.
std::vector<Vec> radical(const QuadForm& q);
bool qf_regular(const QuadForm& q);

// squareclass_reduce(det gram); Error DegenerateForm when det = 0.
Value discriminant(const QuadForm& q);

struct Diagonalization {
  std::vector<Value> entries; // zero entries (radical) placed last
  Mat basis;                  // P with P^T G P = diag(entries)
  Similarity iso;             // q -> diag(entries), matrix P^{-1}, factor 1
};
Diagonalization diagonalize(const QuadForm& q); // field, char != 2

struct LocalDiagonalization {
  std::vector<Value> units; // n-1 v-units
  Value top;                // u_n pi^e
  Value top_unit;           // u_n
  long e{0};                // multiplicity = v(det)
  Similarity iso;           // v-integral with unit determinant, factor 1
};
// Error NotSimpleDegeneration / NonIntegralEntries.
LocalDiagonalization diagonalize_local(const QuadForm& q, const Valuation& v);

enum class DegenVerdict { Regular, Simple, NotSimple };
struct DegenerationReport {
  Valuation val;
  int residue_radical_rank{0};
  long multiplicity{0};
  DegenVerdict verdict{DegenVerdict::Regular};
  std::string str() const;
};
DegenerationReport degeneration_report(const QuadForm& q, const Valuation& v);

// r_v(w) = w - q(v)^{-1} b_q(v,w) v; Error NonUnitValue when q(v) is not
// invertible (valuation-positive in the local variant).
Similarity reflection(const QuadForm& q, const Vec& v,
                      const Valuation* local = nullptr);

// Isometry mapping v to w given q(v) = q(w) invertible; <= 2 reflections.
Similarity transport(const QuadForm& q, const Vec& v, const Vec& w,
                     const Valuation* local = nullptr);

// Witness: isometry q1 perp pad = q2 perp pad (pad regular diagonal); returns
// an isometry q1 = q2.  Error InvalidWitness if the contract fails.
Similarity cancel(const QuadForm& q1, const QuadForm& q2, const QuadForm& pad,
                  const Similarity& witness);

// ---------------------------------------------------------------------------
// Isotropy / representation over fields (with witnesses where computable)
// ---------------------------------------------------------------------------
enum class Ternary { Yes, No, Unknown };
struct IsotropyResult {
  Ternary verdict{Ternary::Unknown};
  std::optional<Vec> witness; // nonzero v with q(v) = 0
  std::string note;
};
// Diagonal entries over F; decides isotropy where the base supports it
// (finite fields and their quadratic extensions, Q, F_p(t)); throws
// UnsupportedDomain otherwise.
IsotropyResult field_isotropic_diag(const FieldPtr& F, const std::vector<Value>& entries,
                                    long budget = 20000);
struct RepresentResult {
  Ternary verdict{Ternary::Unknown};
  std::optional<Vec> witness; // q(witness) = u
  std::string note;
};
RepresentResult field_represents_diag(const FieldPtr& F, const std::vector<Value>& entries,
                                      const Value& u, long budget = 20000);

// Representation of a unit by a simply-degenerate form over a DVR model.
struct LocalRepresentResult {
  bool represented{false};
  std::optional<Vec> witness;       // integral, q(witness) = u exactly
  std::optional<Vec> residue_witness; // residue-level only (completion semantics)
  std::string note;
};
LocalRepresentResult represents_local(const QuadForm& q, const Valuation& v, const Value& u);

// Springer decomposition at v: true iff the even- or odd-valuation residue
// subform is isotropic over the residue field.  Error DyadicPlace.
bool isotropic_complete(const QuadForm& q, const Valuation& v);

// ---------------------------------------------------------------------------
// Eichler isometries of q perp h, h = Gram [[0,1],[1,0]] appended last
// ---------------------------------------------------------------------------
// E_v:  w -> w + (v^T G w) e,  e -> e,  f -> -v - (q(v)/2) e + f
// E_v*: w -> w + (v^T G w) f,  f -> f,  e -> -v - (q(v)/2) f + e
std::pair<Similarity, Similarity> eichler_maps(const QuadForm& q, const Vec& v);
Similarity alpha_map(const QuadForm& q, const Value& u); // e -> ue, f -> u^{-1}f
Similarity beta_map(const QuadForm& q, const Value& u);  // e -> u^{-1}f, f -> ue

// Verifies the four conjugation identities between alpha_u/beta_u and E_v/E_v*
// as exact matrix equalities.
bool hyperbolic_conjugation_check(const QuadForm& q, const Vec& v, const Value& u);

struct EichlerGen {
  bool star{false};
  Vec v;
};
struct EichlerWord {
  std::vector<EichlerGen> gens;
  bool tail_beta{false};
  Value tail_u; // alpha_u or beta_u
};
Similarity eichler_compose(const QuadForm& q, const EichlerWord& w);
// phi: factor-1 isometry of q perp h (q regular, field domain).  The product
// of the returned word equals phi exactly.  Error DecompositionFailure.
EichlerWord eichler_decompose(const QuadForm& q, const Similarity& phi);

} // namespace qsb
