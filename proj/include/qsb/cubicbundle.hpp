#pragma once
// From a cubic fourfold containing the plane {x0 = x1 = x2 = 0}, extract the
// rank-4 line-bundle-valued quadratic form of the associated quadric surface
// bundle over P^2, compute its discriminant sextic, run the degeneration
// diagnostics (squarefree discriminant, radical rank <= 1 along each
// component), and lift plane-fixing similarities to linear automorphisms of
// the ambient P^5.

#include "qsb/linalg.hpp"
#include "qsb/mpoly.hpp"

namespace qsb {

// Homogeneous cubic in (x0, x1, x2, y0, y1, y2) lying in the ideal
// (x0, x1, x2); membership is checked at construction.
struct CubicContainingPlane {
  FieldPtr F;
  MPoly cubic;
};
// Errors: PreconditionViolation (not a homogeneous cubic in the six
// variables), PlaneNotContained.
CubicContainingPlane cubic_make(const MPoly& f);

// q(y0, y1, y2, z) = sum a_mn y_m y_n + sum b_p y_p z + c z^2 with a
// symmetric 3x3 of linear forms, b quadratic forms, c a cubic form, all in
// k[x0, x1, x2].
struct BundleForm {
  FieldPtr F;
  std::array<std::array<MPoly, 3>, 3> a;
  std::array<MPoly, 3> b;
  MPoly c;
  // 4x4 Gram with q(v) = v^T G v: G = [[a, b/2], [b^T/2, c]].
  std::array<std::array<MPoly, 4>, 4> gram() const;
  MPoly quadric() const;    // q as a polynomial in y0, y1, y2, z
  MPoly reassemble() const; // the cubic q(y0, y1, y2, 1)
  std::string str() const;
};

// Coefficient-exact decomposition; the reassembly identity is re-checked
// internally. Error PlaneNotContained.
BundleForm extract_bundle(const CubicContainingPlane& f);
// Rebuild a BundleForm from a section of O(2) twisted by O(1): homogeneous
// with every monomial of degree 2 in (y0, y1, y2, z) and z-degree matching
// the x-degree grading. Error PreconditionViolation.
BundleForm bundle_from_quadric(const MPoly& q);

// det of the 4x4 Gram; homogeneous of degree 6.
// Error GenericallyDegenerate when det is identically zero.
MPoly discriminant_sextic(const BundleForm& bf);

struct SquarefreeReport {
  bool multiplicity_one{false};
  MPoly repeated_factor; // nonconstant divisor of det with square dividing det
  std::string note;
};
// Squarefree test of the discriminant: repeated variable factors first (in
// the order x0, x1, x2), then the gcd of det with its partial derivatives.
SquarefreeReport multiplicity_one_check(const BundleForm& bf); // Error GenericallyDegenerate

struct SimpleLocusReport {
  bool simple{false};
  MPoly common_factor; // factor of det dividing every 3x3 minor of the Gram
  std::string note;
};
// Radical rank <= 1 along each component of the discriminant curve: no
// irreducible factor of det may divide all 3x3 minors of the Gram.
SimpleLocusReport simple_degeneration_locus_check(const BundleForm& bf); // Error GenericallyDegenerate

// The block matrix [[uI, 0], [G, H]] acting on (x0, x1, x2, y0, y1, y2) as
// x -> u x, y -> G x + H y. Error SingularH.
Mat j_lift(const Mat& H, const Mat& G, const Value& u);

struct JLiftReport {
  Mat J;
  bool verified{false};
  std::string note;
};
// Given bundle forms with q2(psi(y, z)) = lambda q1(y, z) for the similarity
// psi: y -> H y + G x z, z -> u z, verify both that identity and the lifted
// cubic identity F2(u x, G x + H y) = u lambda F1(x, y).
JLiftReport j_lift_verify(const BundleForm& q1, const BundleForm& q2, const Mat& H,
                          const Mat& G, const Value& u, const Value& lambda);

} // namespace qsb
