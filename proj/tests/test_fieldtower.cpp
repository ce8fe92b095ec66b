#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qsb/fieldtower.hpp"
#include "qsb/valuation.hpp"

#include <set>

using namespace qsb;

static Value V(const FieldPtr& F, const std::string& s) { return parse_value(F, s); }

TEST_CASE("field descriptors parse and print") {
  for (std::string d : {"Q", "Fp:5", "Fun:Fp:5:t", "Fun:Fun:Fp:5:x:y", "Ext:Q:-1", "Dual:Fp:7",
                        "Ext:Fun:Fp:5:t:t"}) {
    FieldPtr F = FieldTower::parse_descriptor(d);
    CHECK(F->descriptor() == d);
    CHECK(FieldTower::parse_descriptor(F->descriptor())->same(*F));
  }
  CHECK_THROWS_AS(FieldTower::parse_descriptor("Fp:2"), Error);   // char 2
  CHECK_THROWS_AS(FieldTower::parse_descriptor("Fp:6"), Error);   // composite
  CHECK_THROWS_AS(FieldTower::parse_descriptor("Ext:Q:0"), Error);
  CHECK_THROWS_AS(FieldTower::parse_descriptor("Fun:Fun:Fp:5:t:t"), Error); // repeated variable
}

TEST_CASE("rational and prime field arithmetic") {
  auto Q = FieldTower::rationals();
  CHECK(v_eq(V(Q, "2/3 + 1/6"), V(Q, "5/6")));
  CHECK(v_eq(v_inv(V(Q, "-4/7")), V(Q, "-7/4")));
  auto F7 = FieldTower::prime_field(7);
  CHECK(v_eq(v_mul(V(F7, "3"), V(F7, "5")), V(F7, "1")));
  CHECK(v_eq(v_inv(V(F7, "3")), V(F7, "5")));
  CHECK(v_eq(v_pow(V(F7, "3"), 6), v_one(F7))); // Fermat
  CHECK_THROWS_AS(v_inv(v_zero(F7)), Error);
}

TEST_CASE("function field arithmetic normalizes fractions") {
  auto K = FieldTower::parse_descriptor("Fun:Fp:5:t");
  Value a = V(K, "(t^2-1)/(t-1)");
  CHECK(v_eq(a, V(K, "t+1"))); // cancelled
  Value b = V(K, "1/(t+2) + 1/(t+3)");
  CHECK(v_eq(v_mul(b, V(K, "(t+2)*(t+3)")), V(K, "2*t+5")));
  // denominator normalized monic
  Value c = V(K, "1/(2*t+1)");
  CHECK(c.den.back().str() == "1");
  CHECK(v_eq(v_mul(c, V(K, "2*t+1")), v_one(K)));
}

TEST_CASE("etale and dual number arithmetic") {
  auto L = FieldTower::parse_descriptor("Ext:Q:-1"); // Q(i)
  Value i = v_gen(L);
  CHECK(v_eq(v_mul(i, i), V(L, "-1")));
  Value z = V(L, "3 + 2*sqrt(-1)");
  CHECK(v_eq(etale_norm(z), V(FieldTower::rationals(), "13")));
  CHECK(v_eq(v_mul(z, v_inv(z)), v_one(L)));
  // split etale has zero divisors
  auto S = FieldTower::parse_descriptor("Ext:Q:4");
  Value w = V(S, "2 + sqrt(4)"); // (2+s)(2-s) = 4-4 = 0
  CHECK(v_is_zero(v_mul(w, v_conj(w))));
  CHECK_THROWS_AS(v_inv(w), Error);
  auto D = FieldTower::parse_descriptor("Dual:Fp:7");
  Value e = v_gen(D);
  CHECK(v_is_zero(v_mul(e, e)));
  Value u = V(D, "2 + 3*eps");
  CHECK(v_eq(v_mul(u, v_inv(u)), v_one(D)));
  CHECK_THROWS_AS(v_inv(e), Error);
}

TEST_CASE("embedding and descent") {
  auto K = FieldTower::parse_descriptor("Fun:Fun:Fp:5:x:y");
  Value x = V(K, "x");
  Value inner;
  CHECK(v_descends(x, K->base, &inner));
  CHECK(inner.str() == "x");
  CHECK(!v_descends(V(K, "x+y"), K->base, nullptr));
  CHECK(v_eq(v_embed(K, inner), x));
}

TEST_CASE("p-adic valuation and residue") {
  auto v5 = Valuation::padic(5);
  auto Q = FieldTower::rationals();
  CHECK(*valuation_of(V(Q, "50/35"), v5) == 1);
  CHECK(*valuation_of(V(Q, "7/25"), v5) == -2);
  CHECK(!valuation_of(v_zero(Q), v5).has_value());
  CHECK(residue_of(V(Q, "50/35"), v5).str() == "0");
  CHECK(residue_of(V(Q, "2/7"), v5).str() == "1"); // 2 * 7^{-1} = 2*3 = 6 = 1 mod 5
  CHECK_THROWS_AS(residue_of(V(Q, "1/5"), v5), Error);
  CHECK_THROWS_AS(Valuation::padic(2), Error);
}

TEST_CASE("polynomial place valuation and residue") {
  auto K = FieldTower::parse_descriptor("Fun:Fp:7:t");
  auto vt = Valuation::poly_place(K, {v_zero(K->base), v_one(K->base)}); // (t)
  Value a = V(K, "(t^2+t)/(t^3)");
  CHECK(*valuation_of(a, vt) == -2);
  Value b = V(K, "(t+3)/(t+1)");
  CHECK(*valuation_of(b, vt) == 0);
  CHECK(residue_of(b, vt).str() == "3");
  auto vinf = Valuation::degree_place(K);
  CHECK(*valuation_of(V(K, "(t+1)/(3*t^3)"), vinf) == 2);
  CHECK(residue_of(V(K, "(2*t^2+1)/(t^2+t)"), vinf).str() == "2");
  // non-linear place: residue representative mod f
  auto vf = Valuation::poly_place(K, V(K, "t^2+1").num);
  CHECK(vf.residue_field() == nullptr);
  VPoly r = residue_mod_place(V(K, "t^3"), vf); // t^3 = t*t^2 = -t mod t^2+1
  CHECK(p_str(r, "t") == "6*t");
}

TEST_CASE("square classes") {
  auto Q = FieldTower::rationals();
  CHECK(squareclass_reduce(V(Q, "18")).str() == "2");
  CHECK(squareclass_reduce(V(Q, "-12")).str() == "-3");
  CHECK(squareclass_reduce(V(Q, "49/8")).str() == "2");
  auto F7 = FieldTower::prime_field(7);
  CHECK(squareclass_reduce(V(F7, "2")).str() == "1");  // 2 = 4^2 mod 7
  CHECK(squareclass_reduce(V(F7, "5")).str() == "3");  // least nonresidue mod 7 is 3
  auto K = FieldTower::parse_descriptor("Fun:Fp:5:t");
  CHECK(squareclass_reduce(V(K, "t^3")).str() == "t");
  CHECK(squareclass_reduce(V(K, "2*(t^2-1)*(t-1)")).str() == "2*t + 2"); // 2(t-1)^2(t+1) -> 2(t+1)
  CHECK(squareclass_reduce(V(K, "t^2/(t+1)")).str() == "t + 1");
  CHECK_THROWS_AS(squareclass_reduce(v_zero(Q)), Error);
}

TEST_CASE("squares and square roots") {
  auto Q = FieldTower::rationals();
  CHECK(is_square(V(Q, "4/9")));
  CHECK(v_sqrt(V(Q, "4/9"))->str() == "2/3");
  CHECK(!is_square(V(Q, "-4")));
  auto K = FieldTower::parse_descriptor("Fun:Fp:5:t");
  Value s = V(K, "(t^2+2*t+1)/(4*t^2)");
  CHECK(is_square(s));
  CHECK(v_eq(v_mul(*v_sqrt(s), *v_sqrt(s)), s));
  CHECK(!is_square(V(K, "t")));
  // F_25 = F_5(sqrt(2)): every element of F_5 becomes... 2 is a nonsquare mod 5
  auto L = FieldTower::parse_descriptor("Ext:Fp:5:2");
  Value g = v_gen(L);
  CHECK(is_square(v_mul(g, g)));
  long nsq = 0;
  enumerate_elements(L, 30, [&](const Value& c) {
    if (!v_is_zero(c) && !is_square(c)) ++nsq;
    return false;
  });
  CHECK(nsq == 12); // half of the 24 nonzero elements of F_25
}

TEST_CASE("integer factorization and symbols") {
  auto fs = factor_integer(BigInt(-1400));
  REQUIRE(fs.size() == 3);
  CHECK(fs[0].first == 2);
  CHECK(fs[0].second == 3);
  CHECK(fs[1].first == 5);
  CHECK(fs[1].second == 2);
  CHECK(fs[2].first == 7);
  CHECK(legendre(2, 7) == 1);
  CHECK(legendre(3, 7) == -1);
  CHECK(hilbert_qp(Rat(-1), Rat(-1), 2) == -1);
  CHECK(hilbert_qp(Rat(-1), Rat(-1), -1) == -1);
  CHECK(hilbert_qp(Rat(-1), Rat(-1), 5) == 1);
  CHECK(hilbert_qp(Rat(2), Rat(3), 3) == -1);
  // product formula over all candidate places, randomized small inputs
  long vals[] = {-10, -7, -5, -3, -2, -1, 1, 2, 3, 5, 6, 7, 10, 15};
  for (long a : vals)
    for (long b : vals) {
      int prod = 1;
      for (long p : hilbert_candidate_places(Rat(a), Rat(b))) prod *= hilbert_qp(Rat(a), Rat(b), p);
      CHECK(prod == 1);
    }
}

TEST_CASE("polynomial factorization over prime fields") {
  auto F5 = FieldTower::prime_field(5);
  auto K5 = FieldTower::function_field(F5, "t");
  VPoly f = parse_value(K5, "t^2+1").num;
  auto fs = factor_poly_fp(F5, f);
  REQUIRE(fs.size() == 2); // (t+2)(t+3) over F_5
  CHECK(p_str(fs[0].first, "t") == "t + 2");
  CHECK(p_str(fs[1].first, "t") == "t + 3");
  auto F7 = FieldTower::prime_field(7);
  auto K7 = FieldTower::function_field(F7, "t");
  CHECK(poly_irreducible_fp(F7, parse_value(K7, "t^2+1").num));
  // multiplicities and reassembly, including a char-p perfect power
  VPoly g = parse_value(K5, "3*(t^2+1)^2*(t+1)^5*t").num;
  auto gs = factor_poly_fp(F5, g);
  VPoly re{v_int(F5, 3)};
  int total = 0;
  for (auto& [h, e] : gs) {
    CHECK(poly_irreducible_fp(F5, h));
    total += e * p_deg(h);
    for (int i = 0; i < e; ++i) re = p_mul(F5, re, h);
  }
  CHECK(total == p_deg(g));
  CHECK(p_eq(re, g));
}

TEST_CASE("residue squareness in extension residue fields") {
  auto F5 = FieldTower::prime_field(5);
  auto K = FieldTower::function_field(F5, "t");
  VPoly f = parse_value(K, "t^2+2").num; // irreducible: -2=3 is a nonsquare mod 5
  REQUIRE(poly_irreducible_fp(F5, f));
  // brute-force oracle: squares in F_25 = F_5[t]/(f)
  std::set<std::string> squares;
  for (long a = 0; a < 5; ++a)
    for (long b = 0; b < 5; ++b) {
      VPoly g{v_int(F5, a), v_int(F5, b)};
      VPoly q, r;
      p_divmod(F5, p_mul(F5, g, g), f, q, r);
      squares.insert(p_str(r, "t"));
    }
  for (long a = 0; a < 5; ++a)
    for (long b = 0; b < 5; ++b) {
      if (a == 0 && b == 0) continue;
      VPoly g = p_trim(VPoly{v_int(F5, a), v_int(F5, b)});
      CHECK(residue_is_square_mod(F5, f, g) == (squares.count(p_str(g, "t")) > 0));
    }
}

TEST_CASE("element enumeration is deterministic and duplicate-free") {
  for (std::string d : {"Q", "Fp:5", "Fun:Fp:5:t", "Ext:Fp:5:2"}) {
    auto F = FieldTower::parse_descriptor(d);
    std::vector<std::string> a, b;
    enumerate_elements(F, 40, [&](const Value& v) {
      a.push_back(v.str());
      return false;
    });
    enumerate_elements(F, 40, [&](const Value& v) {
      b.push_back(v.str());
      return false;
    });
    CHECK(a == b);
    std::set<std::string> s(a.begin(), a.end());
    CHECK(s.size() == a.size());
    CHECK(a.size() >= 5);
  }
}

TEST_CASE("mixed-domain operations are rejected") {
  auto Q = FieldTower::rationals();
  auto F5 = FieldTower::prime_field(5);
  CHECK_THROWS_AS(v_add(v_one(Q), v_one(F5)), Error);
}
