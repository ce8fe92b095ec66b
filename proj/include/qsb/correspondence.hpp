#pragma once
// The rank-4 correspondence between quadratic forms and quaternion algebras
// over the discriminant extension: both directions with verified
// Brauer-equivalence transcripts, the isotropy criterion (q isotropic over K
// iff C0(q) splits over L), isometry/similarity decision procedures for
// simply degenerate forms over DVR models, and local-global counterexample
// certificates over function fields.

#include "qsb/clifford.hpp"

namespace qsb {

// Brauer-class comparison of two quaternion symbols over the same base.
// Complete over finite fields, Q, F_p(t), and quadratic etale extensions of
// Q / F_p(t) with descended slots (compared at every place of the base field
// that splits in the extension); Unknown otherwise.
struct BrauerComparison {
  Ternary equal{Ternary::Unknown};
  std::string transcript;
};
BrauerComparison brauer_equal(const QuaternionAlgebra& A, const QuaternionAlgebra& B,
                              long budget = 20000); // Error BaseMismatch

// Rebuild a symbol whose slots descend to the common base K over another
// quadratic etale extension L of K in the same discriminant square class.
QuaternionAlgebra rehome_symbol(const QuaternionAlgebra& A, const FieldPtr& L);

struct CorrespondenceRecord {
  QuadForm form; // rank 4 over K
  Value disc;    // square-class representative of discriminant(form)
  QuaternionAlgebra algebra; // the class of C0(form) over QuadraticEtale(K, d)
  bool from_form{true};
  BrauerComparison verification; // algebra vs an independent C0 computation
  std::string str() const;
};

// <1, a, b, abd> together with its even Clifford class (-a, -b) over K(sqrt d).
CorrespondenceRecord form_from_azumaya(const FieldPtr& K, const Value& a,
                                       const Value& b, const Value& d); // Error ZeroSlot
// Diagonalize then quaternionize; the transcript compares the structure
// constants of C0(q) with the symbol read off the unit-normalized diagonal.
CorrespondenceRecord azumaya_from_form(const QuadForm& q); // Error DegenerateForm

struct IsotropyDecision {
  Ternary verdict{Ternary::Unknown};
  std::optional<Vec> witness;  // nonzero v with q(v) = 0 when isotropic
  SplitCertificate certificate; // splitness of C0(q) over L
  std::string note;
};
// q nondegenerate of rank 4; isotropic over K iff C0(q) splits over the
// discriminant extension L.  The witness search is unbounded on the split
// path; `budget` caps the splitness decision only.
IsotropyDecision isotropy_rank4(const QuadForm& q, long budget = 20000);

struct DvrModel {
  QuadForm model;      // diagonal, v-integral, simple degeneration mult one
  Similarity to_model; // K-similarity q -> model, factor 1 or the uniformizer
  DegenerationReport report;
};
// Clear squares from the diagonal entries (rescaling by the uniformizer once
// when three entries stay odd); rank 4.  Error EvenDiscValuation when the
// discriminant has even valuation, DegenerateForm, PreconditionViolation.
DvrModel dvr_model(const QuadForm& q, const Valuation& v);

struct IsometryDecision {
  bool isometric{false};
  std::vector<Value> common_diagonal; // residue units of the common chain
  std::string transcript;
  std::string separating_invariant; // nonempty when not isometric
};
// Both forms simply degenerate with multiplicity one at v (completion
// semantics).  Decision: discriminant comparison, then an iterated chain of
// unit-representation tests (represents_local on the remaining form at each
// step) with rank induction over the residue field.  No isometry matrix over
// the DVR is synthesized.  Error PreconditionViolation.
IsometryDecision dvr_isometry_decide(const QuadForm& q, const QuadForm& qp,
                                     const Valuation& v);

struct SimilarityDecision {
  bool similar{false};
  std::optional<Value> factor; // unit square-class representative when similar
  std::string transcript;
};
// Rank 4 (n = 2m = 4), both simply degenerate with multiplicity one at v.
// Any K-similarity factor reduces, per the even/odd valuation case split, to
// a unit class u or (-1)^{m-1} u; each candidate class is settled by
// dvr_isometry_decide against the rescaled form.  Error PreconditionViolation.
SimilarityDecision dvr_similarity_decide(const QuadForm& q, const QuadForm& qp,
                                         const Valuation& v);

struct LocalIsotropyReport {
  Valuation val;
  DegenerationReport degen;           // verdict regular or simple(1)
  std::vector<Value> residue_entries; // diagonal of the regular residue part
  std::optional<Vec> witness;         // isotropy vector of the residue form
  bool verified{false};               // witness re-checked against the entries
  std::string note;
};

struct LocalGlobalCertificate {
  QuadForm form; // <1, a, b, abd> over the function field K
  std::vector<LocalIsotropyReport> local_reports;
  // Anisotropy half: a place of K where (-a, -b) has a nontrivial residue
  // surviving in L = K(sqrt d) (fiber split, or inert with the class staying
  // nonsquare in the residue extension).
  std::optional<Valuation> ramified_place;
  std::optional<Value> residue_class; // verified nontrivial
  bool fiber_split{true};             // split vs inert fiber at ramified_place
  bool complete{false}; // both halves verified; false = CertificateIncomplete
  std::string note;
  std::string str() const;
};
// K = k(x) or k(x,y) over a finite prime field k; q = <1, a, b, abd>.  Each
// listed valuation must report regular or simple(1) degeneration (after
// clearing even powers entrywise) or the input is rejected.  Residue isotropy
// witnesses come from exhaustive search; the anisotropy witness is searched at
// the listed places plus places read off the slots.  An incomplete
// certificate is returned (not thrown) with `complete = false`.
// Errors: ZeroSlot, NotSimpleDegeneration.
LocalGlobalCertificate local_global_certificate(const FieldPtr& K, const Value& a,
                                                const Value& b, const Value& d,
                                                const std::vector<Valuation>& places,
                                                long budget = 20000);

} // namespace qsb
