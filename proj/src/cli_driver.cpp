#include "qsb/cli.hpp"

#include "qsb/clifford.hpp"
#include "qsb/correspondence.hpp"
#include "qsb/cubicbundle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <ostream>
#include <sstream>

namespace qsb {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\n");
  return s.substr(a, b - a + 1);
}

// split on `sep` at bracket depth zero
std::vector<std::string> split_top(const std::string& s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char ch : s) {
    if (ch == '(' || ch == '[') ++depth;
    if (ch == ')' || ch == ']') --depth;
    if (ch == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

QuadForm parse_form(const FieldPtr& F, const std::string& text) {
  std::string s = trim(text);
  if (s.rfind("diag(", 0) == 0 && s.back() == ')') {
    std::vector<Value> entries;
    for (const std::string& part : split_top(s.substr(5, s.size() - 6), ','))
      entries.push_back(parse_value(F, part));
    return qf_diag(F, entries);
  }
  if (s.size() >= 4 && s.front() == '[' && s.back() == ']') {
    std::vector<Vec> rows;
    for (const std::string& rtext : split_top(s.substr(1, s.size() - 2), ',')) {
      std::string r = trim(rtext);
      if (r.size() < 2 || r.front() != '[' || r.back() != ']')
        throw Error("ParseError", "expected a bracketed Gram row, got " + r);
      Vec row;
      for (const std::string& part : split_top(r.substr(1, r.size() - 2), ','))
        row.push_back(parse_value(F, part));
      rows.push_back(row);
    }
    return qf_make(F, m_from_rows(F, rows));
  }
  throw Error("ParseError", "expected diag(...) or [[...],[...]] for a form");
}

Valuation parse_valuation(const FieldPtr& K, const std::string& text) {
  std::string s = trim(text);
  if (K->kind == FieldKind::Rationals) return Valuation::padic(std::stol(s));
  if (K->kind == FieldKind::RationalFunctionField) {
    if (s == "inf" || s == "deg") return Valuation::degree_place(K);
    Value f = parse_value(K, s);
    if (p_deg(f.den) != 0 || p_deg(f.num) < 1)
      throw Error("ParseError", "place polynomial must be a nonconstant polynomial in " + K->var);
    return Valuation::poly_place(K, p_monic(K->base, f.num));
  }
  throw Error("UnsupportedDomain", "no valuations on " + K->descriptor());
}

const char* kind_name(FieldKind k) {
  switch (k) {
    case FieldKind::Rationals: return "rationals";
    case FieldKind::PrimeField: return "prime field";
    case FieldKind::RationalFunctionField: return "rational function field";
    case FieldKind::QuadraticEtale: return "quadratic etale extension";
    default: return "dual numbers";
  }
}

struct Ctx {
  // raw option storage
  std::string field = "Q", form, form2, a, b, d, at, vec, to, expr, cubic;
  long budget = 20000;
  long seed = 0;
  bool json = false;
  bool similar = false;

  // report state
  std::string command;
  std::vector<std::string> lines;
  int code = 0;

  FieldPtr F() const { return FieldTower::parse_descriptor(field); }
  void emit(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) lines.push_back(line);
  }
};

void run_field(Ctx& c) {
  FieldPtr F = c.F();
  c.emit("descriptor: " + F->descriptor());
  c.emit(std::string("kind: ") + kind_name(F->kind));
  c.emit("characteristic: " + std::to_string(F->characteristic()));
  c.emit("depth: " + std::to_string(F->depth()));
  if (!c.expr.empty()) c.emit("value: " + parse_value(F, c.expr).str());
}

void run_form_diag(Ctx& c) {
  QuadForm q = parse_form(c.F(), c.form);
  Diagonalization D = diagonalize(q);
  c.emit("form: " + q.str());
  std::string entries;
  for (size_t i = 0; i < D.entries.size(); ++i)
    entries += (i ? ", " : "") + D.entries[i].str();
  c.emit("diagonal: <" + entries + ">");
  c.emit("basis:");
  c.emit(D.basis.str());
}

void run_form_report(Ctx& c) {
  QuadForm q = parse_form(c.F(), c.form);
  Valuation v = parse_valuation(q.F, c.at);
  c.emit("form: " + q.str());
  c.emit(degeneration_report(q, v).str());
}

void run_form_reflect(Ctx& c) {
  QuadForm q = parse_form(c.F(), c.form);
  Vec v = vec_parse(q.F, c.vec);
  Similarity r = reflection(q, v);
  c.emit("reflection in " + vec_str(v) + ":");
  c.emit(r.matrix.str());
  c.emit(std::string("verified: ") + (sim_check(q, q, r) ? "yes" : "no"));
}

void run_form_transport(Ctx& c) {
  QuadForm q = parse_form(c.F(), c.form);
  Vec v = vec_parse(q.F, c.vec), w = vec_parse(q.F, c.to);
  Similarity t = transport(q, v, w);
  c.emit("isometry taking " + vec_str(v) + " to " + vec_str(w) + ":");
  c.emit(t.matrix.str());
  bool ok = sim_check(q, q, t) && vec_eq(m_apply(t.matrix, v), w);
  c.emit(std::string("verified: ") + (ok ? "yes" : "no"));
}

void run_form_eichler(Ctx& c) {
  QuadForm q = parse_form(c.F(), c.form);
  Vec v = vec_parse(q.F, c.vec);
  auto [E, Estar] = eichler_maps(q, v);
  QuadForm qh = qf_orth_sum(q, hyperbolic_plane(q.F));
  c.emit("E_v on " + q.str() + " perp h:");
  c.emit(E.matrix.str());
  c.emit("E_v^*:");
  c.emit(Estar.matrix.str());
  bool ok = sim_check(qh, qh, E) && sim_check(qh, qh, Estar);
  c.emit(std::string("verified: ") + (ok ? "yes" : "no"));
}

EvenCliffordAlgebra clif_of(Ctx& c) {
  QuadForm q = parse_form(c.F(), c.form);
  Diagonalization D = diagonalize(q);
  return even_clifford(qf_diag(q.F, D.entries));
}

void run_clif_c0(Ctx& c) {
  c.emit(clif_of(c).str());
}

void run_clif_center(Ctx& c) {
  EvenCliffordAlgebra C = clif_of(c);
  CenterDescription Z = center(C);
  c.emit("center rank: " + std::to_string(Z.rank));
  c.emit("generator: " + vec_str(Z.generator));
  if (Z.z_squared) c.emit("generator^2 = " + Z.z_squared->str());
}

void run_clif_quaternionize(Ctx& c) {
  Quaternionization Z = quaternionize(clif_of(c));
  c.emit("center: " + Z.L->descriptor());
  c.emit("symbol: " + Z.alg.str());
  c.emit("verified: yes (basis products checked)");
}

void run_clif_dual_iso(Ctx& c) {
  DegenerateC0Iso I = degenerate_c0_iso(c.F());
  c.emit("C0(<1,-1,1,0>) -> M2(" + I.D->descriptor() + "), verified images:");
  for (int i = 0; i < I.C.dim; ++i) {
    c.emit(I.C.basis_label(i) + " ->");
    c.emit(I.images[static_cast<size_t>(i)].str());
  }
}

void run_quat_split(Ctx& c) {
  FieldPtr F = c.F();
  QuaternionAlgebra Q = quat_make(F, parse_value(F, c.a), parse_value(F, c.b));
  SplitCertificate cert = is_split(Q, c.budget);
  c.emit(Q.str());
  c.emit(cert.str());
  if (cert.verdict == SplitVerdict::Unknown) c.code = 2;
}

void run_quat_residue(Ctx& c) {
  FieldPtr F = c.F();
  QuaternionAlgebra Q = quat_make(F, parse_value(F, c.a), parse_value(F, c.b));
  Valuation v = parse_valuation(F, c.at);
  SquareClassResult r = residue_symbol(Q, v);
  c.emit("residue symbol of " + Q.str() + " at " + v.str() + ":");
  c.emit("class: " + r.rep.str());
  c.emit(std::string("trivial: ") + (r.trivial ? "yes" : "no"));
}

void run_quat_cores(Ctx& c) {
  FieldPtr F = c.F();
  QuaternionAlgebra Q = quat_make(F, parse_value(F, c.a), parse_value(F, c.b));
  QuaternionAlgebra R = corestriction(Q);
  c.emit("corestriction of " + Q.str() + ":");
  c.emit(R.str());
}

void run_corr_c0(Ctx& c) {
  CorrespondenceRecord rec = azumaya_from_form(parse_form(c.F(), c.form));
  c.emit(rec.str());
  if (rec.verification.equal == Ternary::Unknown) c.code = 2;
}

void run_corr_normform(Ctx& c) {
  FieldPtr F = c.F();
  CorrespondenceRecord rec =
      form_from_azumaya(F, parse_value(F, c.a), parse_value(F, c.b), parse_value(F, c.d));
  c.emit(rec.str());
  if (rec.verification.equal == Ternary::Unknown) c.code = 2;
}

void run_corr_isotropy(Ctx& c) {
  IsotropyDecision dec = isotropy_rank4(parse_form(c.F(), c.form), c.budget);
  c.emit(std::string("isotropic: ") + (dec.verdict == Ternary::Yes    ? "yes"
                                       : dec.verdict == Ternary::No ? "no"
                                                                    : "unknown"));
  if (dec.witness) c.emit("witness: " + vec_str(*dec.witness));
  c.emit(dec.certificate.str());
  c.emit(dec.note);
  if (dec.verdict == Ternary::Unknown) c.code = 2;
}

void run_corr_dvr_model(Ctx& c) {
  QuadForm q = parse_form(c.F(), c.form);
  Valuation v = parse_valuation(q.F, c.at);
  DvrModel m = dvr_model(q, v);
  c.emit("model: " + m.model.str());
  c.emit("similarity factor: " + m.to_model.factor.str());
  c.emit(m.report.str());
}

void run_corr_decide(Ctx& c) {
  FieldPtr F = c.F();
  QuadForm q = parse_form(F, c.form), qp = parse_form(F, c.form2);
  Valuation v = parse_valuation(F, c.at);
  if (c.similar) {
    SimilarityDecision dec = dvr_similarity_decide(q, qp, v);
    c.emit(std::string("similar: ") + (dec.similar ? "yes" : "no"));
    if (dec.factor) c.emit("factor class: " + dec.factor->str());
    c.emit(dec.transcript);
  } else {
    IsometryDecision dec = dvr_isometry_decide(q, qp, v);
    c.emit(std::string("isometric: ") + (dec.isometric ? "yes" : "no"));
    if (!dec.separating_invariant.empty())
      c.emit("separating invariant: " + dec.separating_invariant);
    c.emit(dec.transcript);
  }
}

void run_corr_certify(Ctx& c) {
  FieldPtr F = c.F();
  std::vector<Valuation> places;
  for (const std::string& part : split_top(c.at, ','))
    places.push_back(parse_valuation(F, part));
  LocalGlobalCertificate cert = local_global_certificate(
      F, parse_value(F, c.a), parse_value(F, c.b), parse_value(F, c.d), places, c.budget);
  c.emit(cert.str());
  if (!cert.complete) c.code = 2;
}

BundleForm bundle_of(Ctx& c) {
  return extract_bundle(cubic_make(mp_parse(c.F(), c.cubic)));
}

void run_cubic_extract(Ctx& c) {
  c.emit(bundle_of(c).str());
}

void run_cubic_disc(Ctx& c) {
  c.emit("discriminant sextic: " + discriminant_sextic(bundle_of(c)).str());
}

void run_cubic_check(Ctx& c) {
  BundleForm bf = bundle_of(c);
  SquarefreeReport sq = multiplicity_one_check(bf);
  c.emit(std::string("multiplicity one: ") + (sq.multiplicity_one ? "yes" : "no"));
  if (!sq.multiplicity_one) c.emit("repeated factor: " + sq.repeated_factor.str());
  c.emit("note: " + sq.note);
  SimpleLocusReport sl = simple_degeneration_locus_check(bf);
  c.emit(std::string("simple degeneration locus: ") + (sl.simple ? "yes" : "no"));
  if (!sl.simple) c.emit("common factor: " + sl.common_factor.str());
  c.emit("note: " + sl.note);
}

} // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Ctx ctx;
  CLI::App app{"quadric surface bundle / quaternion algebra toolkit", "qsbtool"};
  app.require_subcommand(1);
  app.add_option("--budget", ctx.budget, "search budget");
  app.add_option("--seed", ctx.seed, "seed (accepted for interface stability)");
  app.add_flag("--json", ctx.json, "mirror the report as JSON");

  struct Leaf {
    const char* group;
    const char* name;
    void (*fn)(Ctx&);
    const char* opts; // letters: F=field f=form g=form2 a b d t=at v=vec w=to e=expr c=cubic s=similar
  };
  const Leaf leaves[] = {
      {"field", "", run_field, "Fe"},
      {"form", "diag", run_form_diag, "Ff"},
      {"form", "report", run_form_report, "Fft"},
      {"form", "reflect", run_form_reflect, "Ffv"},
      {"form", "transport", run_form_transport, "Ffvw"},
      {"form", "eichler", run_form_eichler, "Ffv"},
      {"clif", "c0", run_clif_c0, "Ff"},
      {"clif", "center", run_clif_center, "Ff"},
      {"clif", "quaternionize", run_clif_quaternionize, "Ff"},
      {"clif", "dual-iso", run_clif_dual_iso, "F"},
      {"quat", "split", run_quat_split, "Fab"},
      {"quat", "residue", run_quat_residue, "Fabt"},
      {"quat", "cores", run_quat_cores, "Fab"},
      {"corr", "c0", run_corr_c0, "Ff"},
      {"corr", "normform", run_corr_normform, "Fabd"},
      {"corr", "isotropy", run_corr_isotropy, "Ff"},
      {"corr", "dvr-model", run_corr_dvr_model, "Fft"},
      {"corr", "decide", run_corr_decide, "Ffgts"},
      {"corr", "certify", run_corr_certify, "Fabdt"},
      {"cubic", "extract", run_cubic_extract, "Fc"},
      {"cubic", "disc", run_cubic_disc, "Fc"},
      {"cubic", "check", run_cubic_check, "Fc"},
  };

  std::map<std::string, CLI::App*> groups;
  for (const Leaf& leaf : leaves) {
    CLI::App* parent = &app;
    std::string path = leaf.group;
    if (*leaf.name) {
      if (!groups.count(leaf.group)) {
        groups[leaf.group] = app.add_subcommand(leaf.group);
        groups[leaf.group]->require_subcommand(1);
        groups[leaf.group]->fallthrough();
      }
      parent = groups[leaf.group];
      path += std::string(" ") + leaf.name;
    }
    CLI::App* cmd = parent->add_subcommand(*leaf.name ? leaf.name : leaf.group);
    cmd->fallthrough();
    for (const char* o = leaf.opts; *o; ++o) switch (*o) {
        case 'F': cmd->add_option("--field", ctx.field, "field descriptor"); break;
        case 'f': cmd->add_option("--form", ctx.form)->required(); break;
        case 'g': cmd->add_option("--form2", ctx.form2)->required(); break;
        case 'a': cmd->add_option("--a", ctx.a)->required(); break;
        case 'b': cmd->add_option("--b", ctx.b)->required(); break;
        case 'd': cmd->add_option("--d", ctx.d)->required(); break;
        case 't': cmd->add_option("--at", ctx.at)->required(); break;
        case 'v': cmd->add_option("--vec", ctx.vec)->required(); break;
        case 'w': cmd->add_option("--to", ctx.to)->required(); break;
        case 'e': cmd->add_option("--expr", ctx.expr); break;
        case 'c': cmd->add_option("--cubic", ctx.cubic)->required(); break;
        case 's': cmd->add_flag("--similar", ctx.similar); break;
      }
    auto* fn = leaf.fn;
    std::string cmdpath = path;
    cmd->callback([&ctx, fn, cmdpath]() {
      ctx.command = cmdpath;
      fn(ctx);
    });
  }

  // CLI11's vector overload consumes arguments from the back
  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    ctx.lines.clear();
    ctx.emit("UsageError");
    ctx.emit(e.what());
    ctx.code = 1;
    err << e.what() << "\n";
  } catch (const Error& e) {
    ctx.lines.clear();
    ctx.emit(e.code);
    ctx.emit(e.what());
    ctx.code = 1;
  } catch (const std::exception& e) {
    ctx.lines.clear();
    ctx.emit("InternalError");
    ctx.emit(e.what());
    ctx.code = 1;
  }

  if (ctx.json) {
    nlohmann::json j;
    j["command"] = ctx.command;
    j["exit"] = ctx.code;
    j["lines"] = ctx.lines;
    out << j.dump(2) << "\n";
  } else {
    for (const std::string& line : ctx.lines) out << line << "\n";
  }
  return ctx.code;
}

} // namespace qsb
