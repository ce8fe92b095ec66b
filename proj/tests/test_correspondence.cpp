#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qsb/correspondence.hpp"

#include <random>

using namespace qsb;

namespace {

FieldPtr QQ() { return FieldTower::rationals(); }
FieldPtr Fp(long p) { return FieldTower::prime_field(p); }
FieldPtr Fpt(long p) { return FieldTower::function_field(Fp(p), "t"); }

Value rnd_small(const FieldPtr& F, std::mt19937& rng, long height) {
  if (F->kind == FieldKind::PrimeField) return v_int(F, static_cast<long>(rng() % F->p));
  return v_int(F, static_cast<long>(rng() % (2 * height + 1)) - height);
}

Value rnd_nonzero(const FieldPtr& F, std::mt19937& rng, long height = 7) {
  for (;;) {
    Value x = rnd_small(F, rng, height);
    if (!v_is_zero(x)) return x;
  }
}

// random nondegenerate rank-4 form: random diagonal conjugated by a random
// invertible change of basis
QuadForm rnd_form4(const FieldPtr& F, std::mt19937& rng) {
  std::vector<Value> d;
  for (int i = 0; i < 4; ++i) d.push_back(rnd_nonzero(F, rng, 5));
  for (;;) {
    Mat P = m_zero(F, 4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) P.at(i, j) = rnd_small(F, rng, 2);
    if (v_is_zero(m_det(P))) continue;
    return qf_pullback(qf_diag(F, d), P);
  }
}

QuadForm scale_form(const QuadForm& q, const Value& c) {
  return qf_make(q.F, m_scal(c, q.gram));
}

} // namespace

TEST_CASE("brauer_equal over Q, F_p(t) and quadratic etale bases") {
  FieldPtr Q = QQ();
  auto sym = [&](const FieldPtr& F, long a, long b) {
    return quat_make(F, v_int(F, a), v_int(F, b));
  };

  SUBCASE("rationals") {
    // (-1,-1) and (-1,-2) both ramify exactly at 2 and the real place
    BrauerComparison c = brauer_equal(sym(Q, -1, -1), sym(Q, -1, -2));
    CHECK(c.equal == Ternary::Yes);
    // (-1,-3) ramifies at 3 and the real place instead
    c = brauer_equal(sym(Q, -1, -1), sym(Q, -1, -3));
    CHECK(c.equal == Ternary::No);
    CHECK(c.transcript.find("local invariants differ") != std::string::npos);
    // two split symbols
    c = brauer_equal(sym(Q, 2, 7), sym(Q, 1, 5));
    CHECK(c.equal == Ternary::Yes);
    CHECK(c.transcript.find("both symbols split") != std::string::npos);
    // split vs nonsplit
    CHECK(brauer_equal(sym(Q, 2, 7), sym(Q, -1, -1)).equal == Ternary::No);
  }

  SUBCASE("function field") {
    FieldPtr F = Fpt(5);
    Value t = v_gen(F);
    // (t, 2) and (4 t^3, 2) differ by the square (2t)^2 in the first slot
    QuaternionAlgebra A = quat_make(F, t, v_int(F, 2));
    QuaternionAlgebra B = quat_make(F, v_mul(v_int(F, 4), v_pow(t, 3)), v_int(F, 2));
    BrauerComparison c = brauer_equal(A, B);
    CHECK(c.equal == Ternary::Yes);
    CHECK(c.transcript.find("tame residues agree") != std::string::npos);
    // (t, 1) is split, (t, 2) is not
    CHECK(brauer_equal(A, quat_make(F, t, v_one(F))).equal == Ternary::No);
  }

  SUBCASE("etale field extension of Q") {
    FieldPtr L = FieldTower::quadratic_etale(Q, v_int(Q, 17));
    auto up = [&](long a, long b) {
      return quat_make(L, v_int(L, a), v_int(L, b));
    };
    // both ramify at {2, real}; 2 and the real place split in Q(sqrt 17)
    BrauerComparison c = brauer_equal(up(-1, -1), up(-1, -2));
    CHECK(c.equal == Ternary::Yes);
    // (-1,-3) ramifies at {3, real}: differs at the surviving place 2
    c = brauer_equal(up(-1, -1), up(-1, -3));
    CHECK(c.equal == Ternary::No);
    CHECK(c.transcript.find("split place") != std::string::npos);
  }

  SUBCASE("split etale base compares componentwise") {
    FieldPtr L = FieldTower::quadratic_etale(Q, v_int(Q, 9));
    auto up = [&](long a, long b) {
      return quat_make(L, v_int(L, a), v_int(L, b));
    };
    CHECK(brauer_equal(up(-1, -1), up(-1, -2)).equal == Ternary::Yes);
    CHECK(brauer_equal(up(-1, -1), up(1, 1)).equal == Ternary::No);
  }

  SUBCASE("base mismatch is rejected") {
    CHECK_THROWS_WITH_AS(brauer_equal(sym(Q, 1, 1), sym(Fpt(5), 1, 1)),
                         doctest::Contains("BaseMismatch"), Error);
  }

  SUBCASE("rehome_symbol moves descended slots between square-class-equal centers") {
    FieldPtr L8 = FieldTower::quadratic_etale(Q, v_int(Q, 8));
    FieldPtr L2 = FieldTower::quadratic_etale(Q, v_int(Q, 2));
    QuaternionAlgebra A = quat_make(L8, v_int(L8, 3), v_int(L8, 5));
    QuaternionAlgebra R = rehome_symbol(A, L2);
    CHECK(R.base->same(*L2));
    CHECK(brauer_equal(R, quat_make(L2, v_int(L2, 3), v_int(L2, 5))).equal == Ternary::Yes);
    FieldPtr L3 = FieldTower::quadratic_etale(Q, v_int(Q, 3));
    CHECK_THROWS_WITH_AS(rehome_symbol(A, L3), doctest::Contains("BaseMismatch"), Error);
  }
}

TEST_CASE("form_from_azumaya builds <1,a,b,abd> with its verified C0 class") {
  FieldPtr Q = QQ();

  SUBCASE("(1,1,1) gives the sum of four squares with split etale center") {
    CorrespondenceRecord rec = form_from_azumaya(Q, v_one(Q), v_one(Q), v_one(Q));
    CHECK(vec_eq(qf_diagonal_entries(rec.form),
                 {v_one(Q), v_one(Q), v_one(Q), v_one(Q)}));
    CHECK(v_eq(rec.disc, v_one(Q)));
    CHECK(rec.verification.equal == Ternary::Yes);
    // C0 class is (-1,-1) over Q x Q: nonsplit, matching anisotropy of the form
    CHECK(is_split(rec.algebra).verdict == SplitVerdict::Nonsplit);
  }

  SUBCASE("(-1,-1,1) gives a split C0 class") {
    CorrespondenceRecord rec =
        form_from_azumaya(Q, v_int(Q, -1), v_int(Q, -1), v_one(Q));
    CHECK(vec_eq(qf_diagonal_entries(rec.form),
                 {v_one(Q), v_int(Q, -1), v_int(Q, -1), v_one(Q)}));
    CHECK(is_split(rec.algebra).verdict == SplitVerdict::Split);
    CHECK(rec.verification.transcript.find("input-signed symbol") != std::string::npos);
  }

  SUBCASE("(2,3,5) arithmetic") {
    CorrespondenceRecord rec = form_from_azumaya(Q, v_int(Q, 2), v_int(Q, 3), v_int(Q, 5));
    CHECK(vec_eq(qf_diagonal_entries(rec.form),
                 {v_one(Q), v_int(Q, 2), v_int(Q, 3), v_int(Q, 30)}));
    CHECK(v_eq(rec.disc, v_int(Q, 5)));
    CHECK(v_eq(rec.algebra.a, v_int(rec.algebra.base, -2)));
    CHECK(v_eq(rec.algebra.b, v_int(rec.algebra.base, -3)));
    CHECK(rec.verification.equal == Ternary::Yes);
    CHECK(!rec.from_form);
    CHECK(rec.str().find("from-algebra") != std::string::npos);
  }

  SUBCASE("zero slots are rejected") {
    CHECK_THROWS_WITH_AS(form_from_azumaya(Q, v_zero(Q), v_one(Q), v_one(Q)),
                         doctest::Contains("ZeroSlot"), Error);
    CHECK_THROWS_WITH_AS(form_from_azumaya(Q, v_one(Q), v_one(Q), v_zero(Q)),
                         doctest::Contains("ZeroSlot"), Error);
  }
}

TEST_CASE("azumaya_from_form diagonalizes and quaternionizes with a transcript") {
  FieldPtr Q = QQ();

  SUBCASE("<1,a,b,abd> recovers (-a,-b) over K(sqrt d)") {
    QuadForm q = qf_diag(Q, {v_one(Q), v_int(Q, 2), v_int(Q, 3), v_int(Q, 30)});
    CorrespondenceRecord rec = azumaya_from_form(q);
    CHECK(v_eq(rec.disc, v_int(Q, 5)));
    CHECK(v_eq(*rec.algebra.base->ext_d, v_int(Q, 5)));
    CHECK(v_eq(rec.algebra.a, v_int(rec.algebra.base, -2)));
    CHECK(v_eq(rec.algebra.b, v_int(rec.algebra.base, -3)));
    CHECK(rec.verification.equal == Ternary::Yes);
    CHECK(rec.from_form);
  }

  SUBCASE("hyperbolic perp hyperbolic gives a split algebra over a split center") {
    QuadForm q = qf_orth_sum(hyperbolic_plane(Q), hyperbolic_plane(Q));
    CorrespondenceRecord rec = azumaya_from_form(q);
    CHECK(v_eq(rec.disc, v_one(Q))); // disc (-1)(-1) = 1: split etale center
    CHECK(is_split(rec.algebra).verdict == SplitVerdict::Split);
    CHECK(rec.verification.equal == Ternary::Yes);
  }

  SUBCASE("random F_7 forms verify their transcripts") {
    std::mt19937 rng(23);
    FieldPtr F = Fp(7);
    for (int trial = 0; trial < 60; ++trial) {
      CorrespondenceRecord rec = azumaya_from_form(rnd_form4(F, rng));
      CHECK(rec.verification.equal == Ternary::Yes);
    }
  }

  SUBCASE("degenerate and wrong-rank inputs are rejected") {
    CHECK_THROWS_WITH_AS(
        azumaya_from_form(qf_diag(Q, {v_one(Q), v_one(Q), v_one(Q), v_zero(Q)})),
        doctest::Contains("DegenerateForm"), Error);
    CHECK_THROWS_WITH_AS(azumaya_from_form(qf_diag(Q, {v_one(Q), v_one(Q), v_one(Q)})),
                         doctest::Contains("PreconditionViolation"), Error);
  }
}

TEST_CASE("round trips between symbols and forms") {
  SUBCASE("from-algebra -> form -> algebra over Q, 200 random triples") {
    FieldPtr Q = QQ();
    std::mt19937 rng(31);
    for (int trial = 0; trial < 200; ++trial) {
      Value a = rnd_nonzero(Q, rng, 10), b = rnd_nonzero(Q, rng, 10),
            d = rnd_nonzero(Q, rng, 10);
      CorrespondenceRecord rec1 = form_from_azumaya(Q, a, b, d);
      CorrespondenceRecord rec2 = azumaya_from_form(rec1.form);
      BrauerComparison c =
          brauer_equal(rec1.algebra, rehome_symbol(rec2.algebra, rec1.algebra.base), 500);
      CHECK(c.equal == Ternary::Yes);
    }
  }

  SUBCASE("from-algebra round trip exhaustively over F_3 and F_5") {
    for (long p : {3L, 5L}) {
      FieldPtr F = Fp(p);
      for (long a = 1; a < p; ++a)
        for (long b = 1; b < p; ++b)
          for (long d = 1; d < p; ++d) {
            CorrespondenceRecord rec1 =
                form_from_azumaya(F, v_int(F, a), v_int(F, b), v_int(F, d));
            CorrespondenceRecord rec2 = azumaya_from_form(rec1.form);
            BrauerComparison c = brauer_equal(
                rec1.algebra, rehome_symbol(rec2.algebra, rec1.algebra.base), 500);
            CHECK(c.equal == Ternary::Yes);
          }
    }
  }

  SUBCASE("from-form -> algebra -> form returns a K-similar form") {
    std::mt19937 rng(37);
    for (FieldPtr F : {QQ(), Fp(7)}) {
      for (int trial = 0; trial < 40; ++trial) {
        QuadForm q = rnd_form4(F, rng);
        CorrespondenceRecord rec = azumaya_from_form(q);
        Value a0, b0;
        REQUIRE(v_descends(rec.algebra.a, F, &a0));
        REQUIRE(v_descends(rec.algebra.b, F, &b0));
        CorrespondenceRecord back = form_from_azumaya(F, v_neg(a0), v_neg(b0), rec.disc);
        // rank 4 + equal discriminant + Brauer-equivalent C0 over L => similar
        CHECK(v_eq(discriminant(back.form), rec.disc));
        BrauerComparison c =
            brauer_equal(rec.algebra, rehome_symbol(back.algebra, rec.algebra.base), 500);
        CHECK(c.equal == Ternary::Yes);
      }
    }
  }
}

TEST_CASE("isotropy_rank4 decides via splitness of C0 over L") {
  FieldPtr Q = QQ();

  SUBCASE("hyperbolic-type form is isotropic with a verified witness") {
    QuadForm q = qf_diag(Q, {v_one(Q), v_int(Q, -1), v_one(Q), v_int(Q, -1)});
    IsotropyDecision dec = isotropy_rank4(q);
    CHECK(dec.verdict == Ternary::Yes);
    REQUIRE(dec.witness.has_value());
    CHECK(!vec_is_zero(*dec.witness));
    CHECK(v_is_zero(qf_value(q, *dec.witness)));
  }

  SUBCASE("<1,1,1,1> over Q is anisotropic via nonsplit (-1,-1) over Q x Q") {
    QuadForm q = qf_diag(Q, {v_one(Q), v_one(Q), v_one(Q), v_one(Q)});
    IsotropyDecision dec = isotropy_rank4(q);
    CHECK(dec.verdict == Ternary::No);
    CHECK(dec.certificate.verdict == SplitVerdict::Nonsplit);
  }

  SUBCASE("<1,1,1,-7> over Q is anisotropic (7 is not a sum of three squares)") {
    QuadForm q = qf_diag(Q, {v_one(Q), v_one(Q), v_one(Q), v_int(Q, -7)});
    CHECK(isotropy_rank4(q).verdict == Ternary::No);
  }

  SUBCASE("every rank-4 form over F_5 is isotropic") {
    std::mt19937 rng(41);
    FieldPtr F = Fp(5);
    for (int trial = 0; trial < 25; ++trial) {
      QuadForm q = rnd_form4(F, rng);
      IsotropyDecision dec = isotropy_rank4(q);
      CHECK(dec.verdict == Ternary::Yes);
      REQUIRE(dec.witness.has_value());
      CHECK(v_is_zero(qf_value(q, *dec.witness)));
    }
  }

  SUBCASE("agreement with direct bounded search over Q") {
    std::mt19937 rng(43);
    for (int trial = 0; trial < 150; ++trial) {
      QuadForm q = rnd_form4(QQ(), rng);
      IsotropyDecision dec = isotropy_rank4(q, 500);
      IsotropyResult direct = field_isotropic_diag(QQ(), diagonalize(q).entries, 500);
      if (direct.verdict != Ternary::Unknown) {
        REQUIRE(dec.verdict != Ternary::Unknown);
        CHECK((dec.verdict == Ternary::Yes) == (direct.verdict == Ternary::Yes));
      }
    }
  }
}

TEST_CASE("dvr_model clears squares to a simple multiplicity-one model") {
  FieldPtr F = Fpt(5);
  Value t = v_gen(F);
  Valuation vt = Valuation::poly_place(F, {v_zero(Fp(5)), v_one(Fp(5))});
  auto ones = [&](const Value& last) {
    return qf_diag(F, {v_one(F), v_one(F), v_one(F), last});
  };

  SUBCASE("<1,1,1,t> is already a model") {
    DvrModel m = dvr_model(ones(t), vt);
    CHECK(vec_eq(qf_diagonal_entries(m.model), qf_diagonal_entries(ones(t))));
    CHECK(v_eq(m.to_model.factor, v_one(F)));
    CHECK(m.report.verdict == DegenVerdict::Simple);
    CHECK(m.report.multiplicity == 1);
  }

  SUBCASE("<1,1,1,t^3> strips the even square part") {
    DvrModel m = dvr_model(ones(v_pow(t, 3)), vt);
    CHECK(vec_eq(qf_diagonal_entries(m.model), qf_diagonal_entries(ones(t))));
    CHECK(sim_check(ones(v_pow(t, 3)), m.model, m.to_model));
  }

  SUBCASE("<t,t,t,2t^2> rescales by the uniformizer") {
    QuadForm q = qf_diag(F, {t, t, t, v_mul(v_int(F, 2), v_pow(t, 2))});
    DvrModel m = dvr_model(q, vt);
    CHECK(vec_eq(qf_diagonal_entries(m.model),
                 {v_one(F), v_one(F), v_one(F), v_mul(v_int(F, 2), t)}));
    CHECK(v_eq(m.to_model.factor, t));
    CHECK(sim_check(q, m.model, m.to_model));
  }

  SUBCASE("even discriminant valuation has no model") {
    CHECK_THROWS_WITH_AS(dvr_model(ones(v_one(F)), vt),
                         doctest::Contains("EvenDiscValuation"), Error);
    CHECK_THROWS_WITH_AS(dvr_model(qf_diag(F, {v_one(F), v_one(F), t, t}), vt),
                         doctest::Contains("EvenDiscValuation"), Error);
  }

  SUBCASE("random inputs always yield verified simple(1) models") {
    std::mt19937 rng(47);
    FieldPtr F7 = Fpt(7);
    Value t7 = v_gen(F7);
    Valuation vt7 = Valuation::poly_place(F7, {v_zero(Fp(7)), v_one(Fp(7))});
    for (int trial = 0; trial < 30; ++trial) {
      // diagonal t^{e_i} u_i with an odd number (1 or 3) of odd exponents
      int odd = (rng() % 2) ? 1 : 3;
      std::vector<Value> entries;
      for (int i = 0; i < 4; ++i) {
        long e = 2 * static_cast<long>(rng() % 3) + (i < odd ? 1 : 0);
        entries.push_back(v_mul(v_int(F7, 1 + static_cast<long>(rng() % 6)), v_pow(t7, e)));
      }
      // conjugate by a random invertible matrix to hide the diagonal
      QuadForm q = qf_diag(F7, entries);
      for (;;) {
        Mat P = m_zero(F7, 4, 4);
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) P.at(i, j) = v_int(F7, static_cast<long>(rng() % 4));
        if (v_is_zero(m_det(P))) continue;
        q = qf_pullback(q, P);
        break;
      }
      DvrModel m = dvr_model(q, vt7);
      CHECK(m.report.verdict == DegenVerdict::Simple);
      CHECK(m.report.multiplicity == 1);
      CHECK(sim_check(q, m.model, m.to_model));
    }
  }
}

TEST_CASE("dvr_isometry_decide runs the representation chain") {
  FieldPtr F = Fpt(5);
  Value t = v_gen(F);
  Valuation vt = Valuation::poly_place(F, {v_zero(Fp(5)), v_one(Fp(5))});
  QuadForm q1 = qf_diag(F, {v_one(F), v_one(F), v_one(F), t});

  SUBCASE("a form is isometric to itself with a common diagonalization") {
    IsometryDecision dec = dvr_isometry_decide(q1, q1, vt);
    CHECK(dec.isometric);
    CHECK(dec.common_diagonal.size() == 3);
    CHECK(dec.transcript.find("common diagonalization") != std::string::npos);
  }

  SUBCASE("<1,1,1,t> vs <1,1,2,2t>: chain fails on a residue representation") {
    QuadForm q2 = qf_diag(F, {v_one(F), v_one(F), v_int(F, 2), v_mul(v_int(F, 2), t)});
    IsometryDecision dec = dvr_isometry_decide(q1, q2, vt);
    CHECK(!dec.isometric);
    CHECK(!dec.separating_invariant.empty());
  }

  SUBCASE("different disc square classes separate immediately") {
    QuadForm q2 = qf_diag(F, {v_one(F), v_one(F), v_one(F), v_mul(v_int(F, 2), t)});
    IsometryDecision dec = dvr_isometry_decide(q1, q2, vt);
    CHECK(!dec.isometric);
    CHECK(dec.separating_invariant.find("discriminant") != std::string::npos);
  }

  SUBCASE("p-adic model over Q") {
    FieldPtr Q = QQ();
    Valuation v5 = Valuation::padic(5);
    QuadForm a = qf_diag(Q, {v_one(Q), v_one(Q), v_one(Q), v_int(Q, 5)});
    QuadForm b = qf_diag(Q, {v_one(Q), v_one(Q), v_int(Q, -1), v_int(Q, -5)});
    // residue forms <1,1,1> and <1,1,-1> share rank and discriminant over F_5,
    // and -1 = 2^2 is a square there
    CHECK(dvr_isometry_decide(a, b, v5).isometric);
    QuadForm c = qf_diag(Q, {v_one(Q), v_one(Q), v_int(Q, 2), v_int(Q, 10)});
    CHECK(!dvr_isometry_decide(a, c, v5).isometric);
  }

  SUBCASE("preconditions") {
    CHECK_THROWS_WITH_AS(
        dvr_isometry_decide(q1, qf_diag(F, {v_one(F), v_one(F), v_one(F), v_one(F)}), vt),
        doctest::Contains("PreconditionViolation"), Error);
    CHECK_THROWS_WITH_AS(
        dvr_isometry_decide(q1, qf_diag(F, {v_one(F), v_one(F), t, v_pow(t, 2)}), vt),
        doctest::Contains("PreconditionViolation"), Error);
  }

  SUBCASE("exhaustive small-p sweep: self-isometry and nonsquare disc flip") {
    for (long p : {3L, 5L}) {
      FieldPtr Fpp = Fpt(p);
      Value tp = v_gen(Fpp);
      Valuation vp = Valuation::poly_place(Fpp, {v_zero(Fp(p)), v_one(Fp(p))});
      // least nonresidue mod p: 2 for p in {3, 5}
      Value nonsq = v_int(Fpp, 2);
      for (long u1 = 1; u1 < p; ++u1)
        for (long u2 = 1; u2 < p; ++u2)
          for (long u3 = 1; u3 < p; ++u3)
            for (long u4 = 1; u4 < p; ++u4) {
              QuadForm q = qf_diag(
                  Fpp, {v_int(Fpp, u1), v_int(Fpp, u2), v_int(Fpp, u3),
                        v_mul(v_int(Fpp, u4), tp)});
              CHECK(dvr_isometry_decide(q, q, vp).isometric);
              QuadForm twisted =
                  qf_diag(Fpp, {v_int(Fpp, u1), v_int(Fpp, u2), v_int(Fpp, u3),
                                v_mul(v_mul(nonsq, v_int(Fpp, u4)), tp)});
              CHECK(!dvr_isometry_decide(q, twisted, vp).isometric);
            }
    }
  }
}

TEST_CASE("dvr_similarity_decide reduces to isometry on unit classes") {
  FieldPtr F = Fpt(5);
  Value t = v_gen(F);
  Valuation vt = Valuation::poly_place(F, {v_zero(Fp(5)), v_one(Fp(5))});
  QuadForm q1 = qf_diag(F, {v_one(F), v_one(F), v_one(F), t});

  SUBCASE("a unit multiple is similar") {
    SimilarityDecision dec = dvr_similarity_decide(q1, scale_form(q1, v_int(F, 2)), vt);
    CHECK(dec.similar);
    REQUIRE(dec.factor.has_value());
    CHECK(dvr_isometry_decide(q1, scale_form(scale_form(q1, v_int(F, 2)), *dec.factor), vt)
              .isometric);
  }

  SUBCASE("similar but not isometric: the nonsquare unit class is needed") {
    QuadForm q2 = qf_diag(F, {v_one(F), v_one(F), v_int(F, 2), v_mul(v_int(F, 2), t)});
    CHECK(!dvr_isometry_decide(q1, q2, vt).isometric);
    SimilarityDecision dec = dvr_similarity_decide(q1, q2, vt);
    CHECK(dec.similar);
    CHECK(dec.transcript.find("odd") != std::string::npos);
  }

  SUBCASE("disc classes differing by a nonsquare are never similar") {
    QuadForm q2 = qf_diag(F, {v_one(F), v_one(F), v_one(F), v_mul(v_int(F, 2), t)});
    SimilarityDecision dec = dvr_similarity_decide(q1, q2, vt);
    CHECK(!dec.similar);
  }

  SUBCASE("uniformizer twist round-trips through dvr_model (odd case)") {
    FieldPtr F7 = Fpt(7);
    Value t7 = v_gen(F7);
    Valuation vt7 = Valuation::poly_place(F7, {v_zero(Fp(7)), v_one(Fp(7))});
    QuadForm q = qf_diag(F7, {v_one(F7), v_int(F7, -1), v_one(F7), t7});
    // t*q has no simple(1) shape as written; its dvr_model is again a model
    DvrModel m = dvr_model(scale_form(q, t7), vt7);
    SimilarityDecision dec = dvr_similarity_decide(q, m.model, vt7);
    CHECK(dec.similar);
    // -1 is a nonsquare mod 7: exercise the second unit class
    SimilarityDecision neg = dvr_similarity_decide(q, scale_form(q, v_int(F7, -1)), vt7);
    CHECK(neg.similar);
  }
}

TEST_CASE("local_global_certificate over k(x)(y)") {
  FieldPtr Kx = FieldTower::function_field(Fp(5), "x");
  FieldPtr K = FieldTower::function_field(Kx, "y");
  Value y = v_gen(K);
  auto place = [&](long c) { // the place (y - c)
    return Valuation::poly_place(K, {v_int(Kx, -c), v_one(Kx)});
  };

  SUBCASE("locally isotropic anisotropic instance: a=2, b=y-1, d=y") {
    Value a = v_int(K, 2), b = v_sub(y, v_one(K)), d = y;
    LocalGlobalCertificate cert =
        local_global_certificate(K, a, b, d, {place(0), place(2)});
    CHECK(cert.complete);
    REQUIRE(cert.local_reports.size() == 2);
    CHECK(cert.local_reports[0].degen.verdict == DegenVerdict::Simple);
    CHECK(cert.local_reports[0].degen.multiplicity == 1);
    CHECK(cert.local_reports[1].degen.verdict == DegenVerdict::Regular);
    for (const auto& lr : cert.local_reports) {
      REQUIRE(lr.witness.has_value());
      CHECK(lr.verified);
    }
    // ramification witness of (-2, -(y-1)) at (y-1), which splits in K(sqrt y)
    REQUIRE(cert.ramified_place.has_value());
    CHECK(cert.ramified_place->str().find("y + 4") != std::string::npos);
    CHECK(cert.fiber_split);
    REQUIRE(cert.residue_class.has_value());
    CHECK(v_eq(*cert.residue_class, v_int(Kx, 3))); // -2 mod 5
    CHECK(!is_square(*cert.residue_class));
    CHECK(cert.str().find("certificate complete") != std::string::npos);
  }

  SUBCASE("one function variable: local half verified, anisotropy half open") {
    FieldPtr F = Fpt(5);
    Value t = v_gen(F);
    auto fplace = [&](long c) {
      return Valuation::poly_place(F, {v_int(Fp(5), -c), v_one(Fp(5))});
    };
    // a = 2 (nonresidue), b = d = t: over L = F_5(sqrt t) the class dies, and
    // indeed the form is isotropic over K, so the anisotropy half is refused
    LocalGlobalCertificate cert = local_global_certificate(
        F, v_int(F, 2), t, t, {fplace(0), fplace(1), fplace(2)});
    CHECK(!cert.complete);
    for (const auto& lr : cert.local_reports) CHECK(lr.verified);
  }

  SUBCASE("isotropic instances refuse the anisotropy half") {
    FieldPtr F = Fpt(5);
    auto fplace = [&](long c) {
      return Valuation::poly_place(F, {v_int(Fp(5), -c), v_one(Fp(5))});
    };
    LocalGlobalCertificate cert =
        local_global_certificate(F, v_one(F), v_one(F), v_one(F), {fplace(0)});
    CHECK(!cert.complete);
    CHECK(cert.note.find("refused") != std::string::npos);
  }

  SUBCASE("degeneration at two places is rejected") {
    FieldPtr F = Fpt(5);
    Value t = v_gen(F);
    auto fplace = [&](long c) {
      return Valuation::poly_place(F, {v_int(Fp(5), -c), v_one(Fp(5))});
    };
    CHECK_THROWS_WITH_AS(local_global_certificate(F, t, t, v_one(F), {fplace(0)}),
                         doctest::Contains("NotSimpleDegeneration"), Error);
  }

  SUBCASE("zero slots are rejected") {
    CHECK_THROWS_WITH_AS(local_global_certificate(K, v_zero(K), y, y, {place(0)}),
                         doctest::Contains("ZeroSlot"), Error);
  }
}
