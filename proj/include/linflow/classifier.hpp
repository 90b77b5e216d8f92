#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "linflow/similarity.hpp"
#include "linflow/spec_io.hpp"

namespace linflow {

enum class Relation {
  LinEquiv, DiffEquiv, LipEquiv, HoelderEquiv, TopEquiv, PwLipEquiv,
  LinConj, DiffConj, LipConj, HoelderConj, PwLipConj
};

inline constexpr std::array<Relation, 11> kAllRelations = {
    Relation::LinEquiv, Relation::DiffEquiv,  Relation::LipEquiv,  Relation::HoelderEquiv,
    Relation::TopEquiv, Relation::PwLipEquiv, Relation::LinConj,   Relation::DiffConj,
    Relation::LipConj,  Relation::HoelderConj, Relation::PwLipConj};

inline std::string to_string(Relation r) {
  switch (r) {
    case Relation::LinEquiv: return "lin-equiv";
    case Relation::DiffEquiv: return "diff-equiv";
    case Relation::LipEquiv: return "lip-equiv";
    case Relation::HoelderEquiv: return "hoelder-equiv";
    case Relation::TopEquiv: return "top-equiv";
    case Relation::PwLipEquiv: return "pwlip-equiv";
    case Relation::LinConj: return "lin-conj";
    case Relation::DiffConj: return "diff-conj";
    case Relation::LipConj: return "lip-conj";
    case Relation::HoelderConj: return "hoelder-conj";
    case Relation::PwLipConj: return "pwlip-conj";
  }
  return "?";
}

inline std::optional<Relation> relation_from_string(const std::string& s) {
  for (auto r : kAllRelations)
    if (to_string(r) == s) return r;
  return std::nullopt;
}

// Relations whose criterion quantifies over a scaling factor.
inline bool is_scaling_quantified(Relation r) {
  return r == Relation::LinEquiv || r == Relation::DiffEquiv || r == Relation::LipEquiv ||
         r == Relation::HoelderEquiv;
}

inline bool is_conjugacy(Relation r) {
  return r == Relation::LinConj || r == Relation::DiffConj || r == Relation::LipConj ||
         r == Relation::HoelderConj || r == Relation::PwLipConj;
}

enum class Decision { Yes, No, Undecided };

inline std::string to_string(Decision d) {
  switch (d) {
    case Decision::Yes: return "Yes";
    case Decision::No: return "No";
    case Decision::Undecided: return "Undecided";
  }
  return "?";
}

inline std::ostream& operator<<(std::ostream& os, Decision d) { return os << to_string(d); }

inline Decision decision_from_string(const std::string& s) {
  if (s == "Yes") return Decision::Yes;
  if (s == "No") return Decision::No;
  if (s == "Undecided") return Decision::Undecided;
  throw ParseError("decision", "unknown decision '" + s + "'");
}

inline Decision yes_no(bool b) { return b ? Decision::Yes : Decision::No; }

struct TraceEntry {
  std::string check;
  std::string outcome;
  std::string detail;
};

struct Verdict {
  Relation relation = Relation::LinEquiv;
  Decision decision = Decision::No;
  std::optional<Rational> scaling;
  std::optional<ScalingCertificate> certificate;
  std::vector<TraceEntry> trace;
  bool approximate = false;

  void note(std::string check, bool ok, std::string detail = {}) {
    trace.push_back({std::move(check), ok ? "pass" : "fail", std::move(detail)});
  }
};

// ---- criteria -----------------------------------------------------------

namespace criteria {

inline bool central_similar(const GeneratorSpec& a, const GeneratorSpec& b) {
  return similar(subspec(a, Part::C), subspec(b, Part::C));
}

inline bool lin(const GeneratorSpec& a, const GeneratorSpec& b) { return similar(a, b); }

inline bool hoelder(const GeneratorSpec& a, const GeneratorSpec& b) {
  return lyapunov_similar(a, b) && central_similar(a, b);
}

// Lipschitz criterion (iii): Lyapunov similar, AD parts similar, C parts similar.
inline bool lip_iii(const GeneratorSpec& a, const GeneratorSpec& b) {
  return lyapunov_similar(a, b) && similar(subspec(a, Part::AD), subspec(b, Part::AD)) && central_similar(a, b);
}

// Lipschitz criterion (iv): Lipschitz similar, C parts similar.
inline bool lip_iv(const GeneratorSpec& a, const GeneratorSpec& b) {
  return lipschitz_similar(a, b) && central_similar(a, b);
}

inline bool pwlip(const GeneratorSpec& a, const GeneratorSpec& b) {
  return kinematic_similar(a, b) && central_similar(a, b);
}

}  // namespace criteria

inline std::optional<ScalingCertificate> lip_equiv_criterion_iii(const GeneratorSpec& a, const GeneratorSpec& b) {
  return find_scaling(a, b, criteria::lip_iii, "Lyapunov + AD-part + C-part similarity");
}

inline std::optional<ScalingCertificate> lip_equiv_criterion_iv(const GeneratorSpec& a, const GeneratorSpec& b) {
  return find_scaling(a, b, criteria::lip_iv, "Lipschitz + C-part similarity");
}

// ---- d = 2 catalog ------------------------------------------------------

enum class CatalogRow { SimilarUpToScale, Lipschitz, Lyapunov, Topological };

struct CatalogEntry {
  GeneratorSpec representative;
  std::optional<Rational> scaling;
  std::string name;
};

namespace detail {

inline CatalogEntry canon_similar2(const GeneratorSpec& s) {
  const auto& bl = s.blocks();
  if (bl.size() == 1 && bl[0].m == 1) {
    const auto& b = bl[0];
    if (b.re.is_zero()) return {GeneratorSpec{{1, 0, 1}}, Rational(1) / b.im, "J_1(i)"};
    Rational rate = abs(b.im / b.re);
    return {GeneratorSpec{{1, 1, rate}}, Rational(1) / b.re, "J_1(1+ib), b=" + rate.str()};
  }
  if (bl.size() == 1) {
    const auto& b = bl[0];
    if (b.re.is_zero()) return {GeneratorSpec{{2, 0, 0}}, Rational(1), "J_2"};
    return {GeneratorSpec{{2, 1, 0}}, Rational(1) / b.re, "J_2(1)"};
  }
  Rational x = bl[0].re, y = bl[1].re;  // sorted, x <= y
  if (x.is_zero() && y.is_zero()) return {GeneratorSpec{{1, 0, 0}, {1, 0, 0}}, Rational(1), "O_2"};
  // divide by the larger-modulus exponent; on a modulus tie take the positive one
  Rational big = abs(x) > abs(y) ? x : y;
  Rational other = (big == y) ? x : y;
  Rational a = other / big;
  return {GeneratorSpec{{1, a, 0}, {1, 1, 0}}, Rational(1) / big, "diag[a,1], a=" + a.str()};
}

inline GeneratorSpec spectrum_spec(const GeneratorSpec& s) {
  std::vector<JordanBlock> out;
  for (const auto& r : lyapunov_spectrum(s)) out.emplace_back(1, r, 0);
  return GeneratorSpec(std::move(out));
}

inline CatalogEntry topological_class2(const GeneratorSpec& s) {
  auto p = decomposition_dims(s);
  if (p.d_C == 0) {
    if (p.d_S == 1) return {GeneratorSpec{{1, -1, 0}, {1, 1, 0}}, std::nullopt, "diag[-1,1]"};
    return {GeneratorSpec{{1, 1, 0}, {1, 1, 0}}, std::nullopt, "I_2"};
  }
  if (p.d_C == 1) return {GeneratorSpec{{1, 0, 0}, {1, 1, 0}}, std::nullopt, "diag[0,1]"};
  const auto& bl = s.blocks();
  if (bl.size() == 1 && !bl[0].real()) return {GeneratorSpec{{1, 0, 1}}, std::nullopt, "J_1(i)"};
  if (bl.size() == 1) return {GeneratorSpec{{2, 0, 0}}, std::nullopt, "J_2"};
  return {GeneratorSpec{{1, 0, 0}, {1, 0, 0}}, std::nullopt, "O_2"};
}

}  // namespace detail

inline CatalogEntry catalog2d(const GeneratorSpec& s, CatalogRow row) {
  if (s.dim() != 2) throw PreconditionError("DimMismatch", "catalog2d needs a 2-dimensional spec");
  switch (row) {
    case CatalogRow::SimilarUpToScale: return detail::canon_similar2(s);
    case CatalogRow::Lipschitz: return detail::canon_similar2(lipschitz_transform(s));
    case CatalogRow::Lyapunov: return detail::canon_similar2(detail::spectrum_spec(s));
    case CatalogRow::Topological: return detail::topological_class2(s);
  }
  return {};
}

// ---- classify -----------------------------------------------------------

namespace detail {

inline std::string dims_pair(const GeneratorSpec& s) {
  auto p = decomposition_dims(s);
  return "{d_S=" + std::to_string(p.d_S) + ", d_U=" + std::to_string(p.d_U) + ", d_C=" + std::to_string(p.d_C) + "}";
}

inline bool hyperbolic_pairs_match(const GeneratorSpec& a, const GeneratorSpec& b) {
  auto p = decomposition_dims(a), q = decomposition_dims(b);
  return p.d_C == q.d_C && ((p.d_S == q.d_S && p.d_U == q.d_U) || (p.d_S == q.d_U && p.d_U == q.d_S));
}

inline void scaled(Verdict& v, const std::optional<ScalingCertificate>& c, const std::string& check) {
  v.note(check + " for some scaling", c.has_value(), c ? c->witness : "no candidate scaling satisfies it");
  v.decision = yes_no(c.has_value());
  if (c) {
    v.scaling = c->alpha;
    v.certificate = c;
  }
}

inline void top_equiv(Verdict& v, const GeneratorSpec& a, const GeneratorSpec& b) {
  bool pairs = hyperbolic_pairs_match(a, b);
  v.note("unordered {d_S, d_U} and d_C agree", pairs, dims_pair(a) + " vs " + dims_pair(b));
  if (!pairs) {
    v.decision = Decision::No;
    return;
  }
  if (is_hyperbolic(a)) {
    v.note("both hyperbolic: dimension pair decides", true);
    v.decision = Decision::Yes;
    return;
  }
  if (a.dim() <= 2) {
    if (a.dim() == 1) {
      v.note("one-dimensional central flows coincide", true);
      v.decision = Decision::Yes;
      return;
    }
    auto ca = topological_class2(a), cb = topological_class2(b);
    v.note("planar topological class", ca.name == cb.name, ca.name + " vs " + cb.name);
    v.decision = yes_no(ca.name == cb.name);
    return;
  }
  auto h = find_scaling(a, b, criteria::hoelder, "Lyapunov + C-part similarity");
  v.note("Hoelder equivalence (implies topological)", h.has_value(), h ? h->witness : "not available");
  v.decision = h ? Decision::Yes : Decision::Undecided;
  if (!h) v.note("central part in dimension >= 3", false, "outside the decidable range");
}

}  // namespace detail

inline Verdict classify(const GeneratorSpec& a, const GeneratorSpec& b, Relation r) {
  Verdict v;
  v.relation = r;
  if (a.dim() != b.dim()) {
    v.note("dimensions agree", false, std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
    v.decision = Decision::No;
    return v;
  }
  v.note("dimensions agree", true, std::to_string(a.dim()));
  auto conj = [&](bool ok, const std::string& what) {
    v.decision = yes_no(ok);
    if (ok) v.certificate = ScalingCertificate{Rational(1), what + " holds between A and B"};
  };
  switch (r) {
    case Relation::LinEquiv:
    case Relation::DiffEquiv:
      if (r == Relation::DiffEquiv) v.note("differentiable equivalence reduces to linear", true);
      detail::scaled(v, find_scaling(a, b, criteria::lin, "similarity"), "A ~ alpha*B similar");
      break;
    case Relation::LinConj:
    case Relation::DiffConj: {
      if (r == Relation::DiffConj) v.note("differentiable conjugacy reduces to linear", true);
      bool ok = criteria::lin(a, b);
      v.note("block multisets equal", ok, serialize_spec(a) + " vs " + serialize_spec(b));
      conj(ok, "similarity");
      break;
    }
    case Relation::HoelderEquiv: {
      auto c = find_scaling(a, b, criteria::hoelder, "Lyapunov + C-part similarity");
      detail::scaled(v, c, "Lyapunov similar and C parts similar");
      break;
    }
    case Relation::HoelderConj: {
      bool l = lyapunov_similar(a, b), c = criteria::central_similar(a, b);
      v.note("Lyapunov spectra equal", l);
      v.note("central parts similar", c);
      conj(l && c, "Lyapunov + C-part similarity");
      break;
    }
    case Relation::LipEquiv: {
      auto c3 = lip_equiv_criterion_iii(a, b);
      auto c4 = lip_equiv_criterion_iv(a, b);
      v.note("criterion (iii): Lyapunov, AD-part and C-part similar after scaling", c3.has_value(),
             c3 ? c3->witness : "");
      v.note("criterion (iv): Lipschitz and C-part similar after scaling", c4.has_value(), c4 ? c4->witness : "");
      if (c3.has_value() != c4.has_value())
        throw std::logic_error("Lipschitz criteria (iii) and (iv) disagree");
      v.decision = yes_no(c4.has_value());
      if (c4) {
        v.scaling = c4->alpha;
        v.certificate = c4;
      }
      break;
    }
    case Relation::LipConj: {
      bool l = lipschitz_similar(a, b), c = criteria::central_similar(a, b);
      v.note("Lipschitz similar", l, serialize_spec(lipschitz_transform(a)) + " vs " +
                                         serialize_spec(lipschitz_transform(b)));
      v.note("central parts similar", c);
      conj(l && c, "Lipschitz + C-part similarity");
      break;
    }
    case Relation::PwLipConj: {
      bool k = kinematic_similar(a, b), c = criteria::central_similar(a, b);
      v.note("kinematically similar", k, serialize_spec(kinematic_transform(a)) + " vs " +
                                             serialize_spec(kinematic_transform(b)));
      v.note("central parts similar", c);
      conj(k && c, "kinematic + C-part similarity");
      break;
    }
    case Relation::TopEquiv:
      detail::top_equiv(v, a, b);
      break;
    case Relation::PwLipEquiv: {
      if (is_hyperbolic(a) && is_hyperbolic(b)) {
        bool ok = detail::hyperbolic_pairs_match(a, b);
        v.note("both hyperbolic: unordered {d_S, d_U} agree", ok,
               detail::dims_pair(a) + " vs " + detail::dims_pair(b));
        v.decision = yes_no(ok);
        break;
      }
      Verdict top;
      detail::top_equiv(top, a, b);
      if (top.decision == Decision::No) {
        v.note("topologically equivalent", false, "a pointwise Lipschitz equivalence is a homeomorphism");
        v.decision = Decision::No;
        break;
      }
      auto c = find_scaling(a, b, criteria::pwlip, "kinematic + C-part similarity");
      v.note("pointwise Lipschitz conjugate after scaling", c.has_value(), c ? c->witness : "");
      if (c) {
        v.decision = Decision::Yes;
        v.scaling = c->alpha;
        v.certificate = c;
      } else {
        v.note("non-hyperbolic pair", false, "outside the decidable range");
        v.decision = Decision::Undecided;
      }
      break;
    }
  }
  return v;
}

// ---- genericity report --------------------------------------------------

struct CoincidenceReport {
  bool generic = false;
  bool real_spectrum = false;
  Decision diff_eq_lip = Decision::Undecided;
  Decision lip_eq_hoelder = Decision::Undecided;
};

inline CoincidenceReport class_coincidence(const GeneratorSpec& s) {
  CoincidenceReport r;
  r.generic = is_generic(s);
  r.real_spectrum = true;
  for (const auto& b : s.blocks()) r.real_spectrum = r.real_spectrum && b.real();
  if (r.generic) r.diff_eq_lip = r.lip_eq_hoelder = yes_no(r.real_spectrum);
  return r;
}

// ---- implication audit --------------------------------------------------

struct AuditReport {
  std::map<Relation, Verdict> verdicts;
  std::vector<std::string> violations;
};

inline const std::vector<std::pair<Relation, Relation>>& implication_edges() {
  using R = Relation;
  static const std::vector<std::pair<R, R>> edges = {
      {R::LinEquiv, R::LipEquiv},       {R::LipEquiv, R::HoelderEquiv},  {R::HoelderEquiv, R::TopEquiv},
      {R::LinEquiv, R::DiffEquiv},      {R::DiffEquiv, R::LinEquiv},     {R::DiffEquiv, R::PwLipEquiv},
      {R::PwLipEquiv, R::TopEquiv},     {R::LipEquiv, R::PwLipEquiv},    {R::LinConj, R::LipConj},
      {R::LipConj, R::HoelderConj},     {R::LinConj, R::DiffConj},       {R::DiffConj, R::LinConj},
      {R::DiffConj, R::PwLipConj},      {R::LipConj, R::PwLipConj},      {R::LinConj, R::LinEquiv},
      {R::DiffConj, R::DiffEquiv},      {R::LipConj, R::LipEquiv},       {R::HoelderConj, R::HoelderEquiv},
      {R::PwLipConj, R::PwLipEquiv},
  };
  return edges;
}

inline AuditReport implication_audit(const GeneratorSpec& a, const GeneratorSpec& b) {
  AuditReport rep;
  for (auto r : kAllRelations) rep.verdicts.emplace(r, classify(a, b, r));
  for (const auto& [p, q] : implication_edges()) {
    Decision dp = rep.verdicts.at(p).decision, dq = rep.verdicts.at(q).decision;
    if (dp == Decision::Yes && dq == Decision::No)
      rep.violations.push_back(to_string(p) + " holds but " + to_string(q) + " does not");
  }
  return rep;
}

// ---- JSON ---------------------------------------------------------------

inline json verdict_to_json(const Verdict& v) {
  json j;
  j["relation"] = to_string(v.relation);
  j["decision"] = to_string(v.decision);
  j["scaling"] = v.scaling ? json(v.scaling->str()) : json(nullptr);
  if (v.certificate)
    j["certificate"] = {{"alpha", v.certificate->alpha.str()}, {"witness", v.certificate->witness}};
  else
    j["certificate"] = nullptr;
  json tr = json::array();
  for (const auto& t : v.trace) tr.push_back({{"check", t.check}, {"outcome", t.outcome}, {"detail", t.detail}});
  j["trace"] = tr;
  j["approximate"] = v.approximate;
  return j;
}

inline Verdict verdict_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("", "verdict must be an object");
  Verdict v;
  auto rel = relation_from_string(j.at("relation").get<std::string>());
  if (!rel) throw ParseError("relation", "unknown relation");
  v.relation = *rel;
  v.decision = decision_from_string(j.at("decision").get<std::string>());
  if (j.contains("scaling") && !j["scaling"].is_null()) v.scaling = Rational::parse(j["scaling"].get<std::string>());
  if (j.contains("certificate") && !j["certificate"].is_null())
    v.certificate = ScalingCertificate{Rational::parse(j["certificate"].at("alpha").get<std::string>()),
                                       j["certificate"].at("witness").get<std::string>()};
  for (const auto& t : j.at("trace"))
    v.trace.push_back({t.at("check").get<std::string>(), t.at("outcome").get<std::string>(),
                       t.at("detail").get<std::string>()});
  v.approximate = j.value("approximate", false);
  return v;
}

inline json catalog_to_json(const CatalogEntry& c) {
  return json{{"representative", spec_to_json(c.representative)},
              {"scaling", c.scaling ? json(c.scaling->str()) : json(nullptr)},
              {"name", c.name}};
}

inline json audit_to_json(const AuditReport& r) {
  json v = json::object();
  for (const auto& [rel, verdict] : r.verdicts) v[to_string(rel)] = verdict_to_json(verdict);
  return json{{"verdicts", v}, {"violations", r.violations}};
}

}  // namespace linflow
