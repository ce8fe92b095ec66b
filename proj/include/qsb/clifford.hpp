#pragma once
// Even Clifford algebras C0(q) of diagonal forms of rank <= 4 as
// structure-constant algebras: center extraction, quaternionization over the
// discriminant extension, functoriality on similarities, and the explicit
// degenerate dual-number isomorphism with its unipotent/Lie-level formulas.

#include "qsb/quadform.hpp"
#include "qsb/quaternion.hpp"

namespace qsb {

struct EvenCliffordAlgebra {
  FieldPtr F;
  std::vector<Value> coeffs; // a_1..a_n (diagonal entries of q)
  int n{0};
  int dim{0};              // 2^{n-1}
  std::vector<int> basis;  // even-subset bitmasks (bit i-1 <-> generator e_i), ascending
  // basis[i] * basis[j] = table_coef[i*dim+j] * basis[table_idx[i*dim+j]]
  std::vector<Value> table_coef;
  std::vector<int> table_idx;
  int index_of(int mask) const;
  std::string basis_label(int idx) const; // "1", "e12", "e1234", ...
  std::string str() const;                // basis list + nonzero products, deterministic
};
// q diagonal of rank 2..4; relations e_i^2 = a_i, e_ie_j = -e_je_i; the
// multiplication table is verified associative on all basis triples.
EvenCliffordAlgebra even_clifford(const QuadForm& q); // Error RankOutOfRange

// Elements are coordinate vectors of length dim.
using CElt = Vec;
CElt c_zero(const EvenCliffordAlgebra& C);
CElt c_one(const EvenCliffordAlgebra& C);
CElt c_basis(const EvenCliffordAlgebra& C, int idx);
CElt c_mul(const EvenCliffordAlgebra& C, const CElt& x, const CElt& y);

struct CenterDescription {
  int rank{0};
  std::vector<CElt> center_basis;  // contains 1
  CElt generator;                  // nonscalar central element (normalized)
  std::optional<Value> z_squared;  // scalar value of generator^2 when it is scalar
};
CenterDescription center(const EvenCliffordAlgebra& C);

struct Quaternionization {
  FieldPtr L;               // QuadraticEtale(K, a1 a2 a3 a4)
  QuaternionAlgebra alg;    // (-a1 a2, -a1 a3) over L
  std::vector<Quat> images; // images of the 8 algebra basis elements (e12 -> i, e13 -> j)
};
// Verified on every basis product and checked bijective; Error DegenerateForm.
Quaternionization quaternionize(const EvenCliffordAlgebra& C);
Quat quaternionize_apply(const Quaternionization& Z, const CElt& x);

struct C0Map {
  EvenCliffordAlgebra dom, cod;
  Mat matrix; // dim x dim over the base; verified algebra isomorphism
};
// Functor C0 on a similarity psi: q_from -> q_to with factor lambda; degree-2
// basis elements map by e_ie_j -> lambda^{-1} psi(e_i)psi(e_j).
C0Map c0_functor(const QuadForm& q_from, const QuadForm& q_to, const Similarity& psi); // Error ContractViolation

struct DegenerateC0Iso {
  EvenCliffordAlgebra C;   // C0(<1,-1,1,0>)
  FieldPtr D;              // DualNumbers over the scalar field of C
  std::vector<Mat> images; // 8 verified 2x2 matrices over D
};
// 1, e12, e23, e13 -> I, [[0,1],[1,0]], [[1,0],[0,-1]], [[0,1],[-1,0]],
// extended eps-linearly via e1e2e3e4 = eps; verified exhaustively.
DegenerateC0Iso degenerate_c0_iso(const FieldPtr& k);
Mat degenerate_iso_apply(const DegenerateC0Iso& I, const CElt& x);

struct UnipotentAction {
  Mat phi;   // 4x4 unipotent block matrix over k (last row a, b, c, 1)
  Mat model; // 2x2 over DualNumbers(k): I - (1/2) eps [[a, -b+c],[b+c, -a]]
};
// Conjugation sigma = ad(1 - (1/2) eps (c e12 + a e23 - b e13)) in C0(<1,-1,1,0>);
// verifies the three action equations, sigma = C0(phi), and the matrix-model
// adjoint identity.
UnipotentAction unipotent_action(const FieldPtr& k, const Value& a, const Value& b,
                                 const Value& c);

// Lie-algebra maps so(q1) -> sl2 and A^3 -> sl2 for q1 = <1,-1,1>.
Mat lie_alpha(const FieldPtr& k, const Mat& A); // Error NotInLieAlgebra
Mat lie_beta(const FieldPtr& k, const Vec& w);
// Verifies C0 of [[I + xA, 0],[xw, 1]] equals conjugation by
// I - x(alpha(A) + eps beta(w)) over k[x,eps]/(x^2, eps^2), and that alpha and
// beta are linear isomorphisms onto trace-zero matrices.
bool lie_map_check(const FieldPtr& k, const Mat& A, const Vec& w); // Error NotInLieAlgebra

// The three orthogonal-group block relations for [[A, v],[w, u]] against the
// Gram matrix Q1 and the parameter pi:
//   A^t Q1 A + pi w^t w = Q1,  A^t Q1 v + u pi w^t = 0,  v^t Q1 v = (1 - u^2) pi.
bool orthogonal_relations_check(const Mat& A, const Vec& v, const Vec& w, const Value& u,
                                const Mat& Q1, const Value& pi);

} // namespace qsb
