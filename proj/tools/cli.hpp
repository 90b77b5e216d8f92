#pragma once

// Command-line front end. Kept in a header so the test suite can drive
// run() in-process; tools/linflow_main.cpp is a thin wrapper.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "linflow/linflow.hpp"

namespace linflow::cli {

enum Exit { kOk = 0, kUsage = 1, kParse = 2, kPrecondition = 3, kUndecided = 4 };

struct Loaded {
  GeneratorSpec spec;
  bool approximate = false;
  std::optional<ApproxSpec> ingest;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Either a spec document or a matrix document (told apart by "rows").
inline Loaded load(const std::string& path, const IngestOptions& opt) {
  json j = detail::parse_strict(slurp(path));
  Loaded l;
  try {
    if (j.is_object() && j.contains("rows")) {
      l.ingest = spec_from_matrix(matrix_from_json(j), opt);
      l.spec = l.ingest->spec;
      l.approximate = true;
    } else {
      l.spec = spec_from_json(j);
    }
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.where(), e.what());
  }
  return l;
}

inline json ingest_json(const ApproxSpec& a) {
  return {{"eigenvalue_residual", a.eigenvalue_residual},
          {"cluster_tolerance", a.cluster_tolerance},
          {"source", a.source},
          {"exact", a.exact}};
}

inline std::vector<double> parse_vector(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParseError("--x", "malformed number '" + item + "'");
    }
  }
  return v;
}

inline json invariants_json(const GeneratorSpec& s) {
  json j;
  j["dim"] = s.dim();
  json spec = json::array();
  for (const auto& r : lyapunov_spectrum(s)) spec.push_back(r.str());
  j["spectrum"] = spec;
  auto p = decomposition_dims(s);
  j["partition"] = {{"d_S", p.d_S}, {"d_C", p.d_C}, {"d_U", p.d_U}, {"d_H", p.d_H}, {"d_D", p.d_D}, {"d_AD", p.d_AD}};
  auto rd = refined_dims(s);
  json bps = json::array(), mat = json::array();
  for (const auto& b : rd.breakpoints) bps.push_back(b.str());
  j["refined"] = {{"breakpoints", bps},
                  {"table", rd.table},
                  {"m_at", rd.m_at},
                  {"top_exponent", rd.top_exponent.str()},
                  {"top_m", rd.top_m}};
  if (is_stable(s)) {
    auto D = distortion_subspace(s);
    j["distortion"] = {{"dimension", D.dimension}, {"coordinates", D.coordinates}};
  } else {
    j["distortion"] = nullptr;
  }
  auto cc = class_coincidence(s);
  j["generic"] = cc.generic;
  j["coincidence"] = {{"real_spectrum", cc.real_spectrum},
                      {"diff_eq_lip", to_string(cc.diff_eq_lip)},
                      {"lip_eq_hoelder", to_string(cc.lip_eq_hoelder)}};
  j["lipschitz_transform"] = spec_to_json(lipschitz_transform(s));
  j["kinematic_transform"] = spec_to_json(kinematic_transform(s));
  return j;
}

inline json map_report(const HomeoMap& h, std::uint64_t seed, int samples, const LipschitzOptions& lo) {
  json j;
  j["construction"] = h.construction;
  j["params"] = h.params;
  j["source"] = spec_to_json(h.source);
  j["target"] = spec_to_json(h.target);
  j["conjugacy"] = verify_conjugacy(h, linear_grid(-5.0, 5.0, 21), samples, seed).to_json();
  j["inverse"] = verify_inverse(h, samples, seed + 1).to_json();
  j["lipschitz"] = lipschitz_probe(h, lo).to_json();
  return j;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Classify linear flows up to linear, Lipschitz, Hoelder, pointwise Lipschitz and topological "
               "equivalence or conjugacy."};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Print help for every subcommand");

  double tol = 1e-9;
  long long denom = 1024;
  auto ingest_opts = [&](CLI::App* sub) {
    sub->add_option("--tol", tol, "Eigenvalue clustering tolerance for matrix inputs")->capture_default_str();
    sub->add_option("--denominator-bound", denom, "Largest denominator when snapping eigenvalues")
        ->capture_default_str();
  };

  std::string fa, fb, relation, op, xs, construction, spec_file;
  bool strict = false;
  double t0 = 0.0, t1 = 10.0;
  int steps = 100, samples = 50, kmax = 40;
  std::uint64_t seed = 1;

  auto* classify_cmd = app.add_subcommand("classify", "Decide one relation between two flows");
  classify_cmd->add_option("A", fa, "First spec or matrix document")->required();
  classify_cmd->add_option("B", fb, "Second spec or matrix document")->required();
  classify_cmd->add_option("--relation", relation, "lin-equiv, diff-equiv, lip-equiv, hoelder-equiv, top-equiv, "
                                                   "pwlip-equiv, lin-conj, diff-conj, lip-conj, hoelder-conj, "
                                                   "pwlip-conj")
      ->required();
  classify_cmd->add_flag("--strict", strict, "Exit with status 4 when the decision is Undecided");
  ingest_opts(classify_cmd);

  auto* inv_cmd = app.add_subcommand("invariants", "Spectrum, partition, refined dimensions, distortion subspace");
  inv_cmd->add_option("A", fa, "Spec or matrix document")->required();
  ingest_opts(inv_cmd);

  auto* tr_cmd = app.add_subcommand("transform", "Apply L, K, scale:alpha, reverse or realify");
  tr_cmd->add_option("A", fa, "Spec document")->required();
  tr_cmd->add_option("--op", op, "L | K | scale:p/q | reverse | realify")->required();
  ingest_opts(tr_cmd);

  auto* cat_cmd = app.add_subcommand("catalog2d", "Canonical planar representative");
  cat_cmd->add_option("A", fa, "Two-dimensional spec or matrix document")->required();
  cat_cmd->add_option("--relation", relation, "similar | lipschitz | lyapunov | topological (or lin-equiv, lip-equiv, hoelder-equiv, top-equiv)")->required();
  ingest_opts(cat_cmd);

  auto* sim_cmd = app.add_subcommand("simulate", "Closed-form orbit as CSV");
  sim_cmd->add_option("A", fa, "Spec or matrix document")->required();
  sim_cmd->add_option("--x", xs, "Initial point, comma separated")->required();
  sim_cmd->add_option("--t0", t0, "Start time")->capture_default_str();
  sim_cmd->add_option("--t1", t1, "End time")->capture_default_str();
  sim_cmd->add_option("--steps", steps, "Number of intervals")->capture_default_str()->check(CLI::PositiveNumber);
  ingest_opts(sim_cmd);

  auto* ver_cmd = app.add_subcommand("verify", "Build a conjugacy and probe it numerically");
  ver_cmd->add_option("--construction", construction,
                      "h_a:<a> | h_f:<c> | single-exp | pw-hyp | lem66:<m>,<a>,<b>")
      ->required();
  ver_cmd->add_option("--spec", spec_file, "Spec document for single-exp and pw-hyp");
  ver_cmd->add_option("--seed", seed, "Probe seed")->capture_default_str();
  ver_cmd->add_option("--samples", samples, "Sample points for residual probes")->capture_default_str();
  ver_cmd->add_option("--kmax", kmax, "Radii 2^-k for k up to kmax")->capture_default_str()->check(
      CLI::Range(1, 40));
  ingest_opts(ver_cmd);

  auto* audit_cmd = app.add_subcommand("audit", "All relations plus the implication check");
  audit_cmd->add_option("A", fa, "First spec or matrix document")->required();
  audit_cmd->add_option("B", fb, "Second spec or matrix document")->required();
  ingest_opts(audit_cmd);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  const IngestOptions io{tol, denom};
  try {
    if (classify_cmd->parsed()) {
      auto r = relation_from_string(relation);
      if (!r) {
        err << "usage error: unknown relation '" << relation << "'\n";
        return kUsage;
      }
      auto a = load(fa, io), b = load(fb, io);
      Verdict v = classify(a.spec, b.spec, *r);
      v.approximate = a.approximate || b.approximate;
      out << verdict_to_json(v).dump(2) << "\n";
      if (strict && v.decision == Decision::Undecided) return kUndecided;
      return kOk;
    }
    if (inv_cmd->parsed()) {
      auto a = load(fa, io);
      json j = invariants_json(a.spec);
      j["approximate"] = a.approximate;
      if (a.ingest) j["ingestion"] = ingest_json(*a.ingest);
      out << j.dump(2) << "\n";
      return kOk;
    }
    if (tr_cmd->parsed()) {
      GeneratorSpec res;
      if (op == "realify") {
        res = realify(parse_complex_spec(slurp(fa)));
      } else {
        auto a = load(fa, io);
        if (op == "L") res = lipschitz_transform(a.spec);
        else if (op == "K") res = kinematic_transform(a.spec);
        else if (op == "reverse") res = time_reverse(a.spec);
        else if (op.rfind("scale:", 0) == 0) {
          Rational alpha;
          try {
            alpha = Rational::parse(op.substr(6));
          } catch (const std::exception& e) {
            err << "usage error: " << e.what() << "\n";
            return kUsage;
          }
          res = scale_spec(a.spec, alpha);
        } else {
          err << "usage error: unknown op '" << op << "'\n";
          return kUsage;
        }
      }
      out << spec_to_json(res).dump(2) << "\n";
      return kOk;
    }
    if (cat_cmd->parsed()) {
      CatalogRow row;
      // relation names from classify are accepted as aliases for the rows
      if (relation == "similar" || relation == "lin-equiv") row = CatalogRow::SimilarUpToScale;
      else if (relation == "lipschitz" || relation == "lip-equiv") row = CatalogRow::Lipschitz;
      else if (relation == "lyapunov" || relation == "hoelder-equiv") row = CatalogRow::Lyapunov;
      else if (relation == "topological" || relation == "top-equiv") row = CatalogRow::Topological;
      else {
        err << "usage error: unknown catalog relation '" << relation << "'\n";
        return kUsage;
      }
      auto a = load(fa, io);
      json j = catalog_to_json(catalog2d(a.spec, row));
      j["approximate"] = a.approximate;
      out << j.dump(2) << "\n";
      return kOk;
    }
    if (sim_cmd->parsed()) {
      auto a = load(fa, io);
      auto xv = parse_vector(xs);
      if (static_cast<int>(xv.size()) != a.spec.dim())
        throw PreconditionError("DimMismatch", "--x has " + std::to_string(xv.size()) + " entries, spec dim is " +
                                                   std::to_string(a.spec.dim()));
      Vec x = Eigen::Map<Vec>(xv.data(), static_cast<Eigen::Index>(xv.size()));
      FlowEvaluator F(a.spec);
      out << "t";
      for (int i = 1; i <= a.spec.dim(); ++i) out << ",x" << i;
      out << "\n";
      char buf[64];
      for (double t : linear_grid(t0, t1, steps + 1)) {
        Vec y = F(t, x);
        std::snprintf(buf, sizeof buf, "%.17g", t);
        out << buf;
        for (int i = 0; i < y.size(); ++i) {
          std::snprintf(buf, sizeof buf, ",%.17g", y(i));
          out << buf;
        }
        out << "\n";
      }
      return kOk;
    }
    if (ver_cmd->parsed()) {
      auto colon = construction.find(':');
      std::string kind = construction.substr(0, colon);
      std::string arg = colon == std::string::npos ? "" : construction.substr(colon + 1);
      auto number = [&](const std::string& s) {
        try {
          std::size_t used = 0;
          double v = std::stod(s, &used);
          if (used != s.size()) throw std::invalid_argument(s);
          return v;
        } catch (const std::exception&) {
          throw ParseError("--construction", "malformed parameter '" + s + "'");
        }
      };
      LipschitzOptions lo;
      lo.kmax = kmax;
      lo.seed = seed;
      HomeoMap h;
      if (kind == "h_a") h = build_h_a(number(arg));
      else if (kind == "h_f") h = build_h_f(number(arg));
      else if (kind == "single-exp" || kind == "pw-hyp") {
        if (spec_file.empty()) {
          err << "usage error: --spec is required for " << kind << "\n";
          return kUsage;
        }
        auto a = load(spec_file, io);
        if (kind == "single-exp") {
          h = build_single_exponent_conj(a.spec);
        } else {
          h = build_pw_conj_hyperbolic(a.spec);
          lo.mirror_pairs = false;
          lo.pairs = 8;
        }
      } else if (kind == "lem66") {
        auto v = parse_vector(arg);
        if (v.size() != 3 || v[0] != std::floor(v[0])) {
          err << "usage error: lem66 expects m,a,b\n";
          return kUsage;
        }
        h = build_lem66_map(static_cast<int>(v[0]), v[1], v[2]);
      } else {
        err << "usage error: unknown construction '" << kind << "'\n";
        return kUsage;
      }
      json j = map_report(h, seed, samples, lo);
      if (kind == "lem66" && h.params.at("m") >= 2)
        j["witness_slope"] = witness_slope_probe(h, h.params.at("a"), linear_grid(2.0, 40.0, 761)).to_json();
      out << j.dump(2) << "\n";
      return kOk;
    }
    if (audit_cmd->parsed()) {
      auto a = load(fa, io), b = load(fb, io);
      auto rep = implication_audit(a.spec, b.spec);
      if (a.approximate || b.approximate)
        for (auto& [r, v] : rep.verdicts) v.approximate = true;
      out << audit_to_json(rep).dump(2) << "\n";
      return kOk;
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const IngestError& e) {
    err << "ingestion error: " << e.what() << "\n";
    return kParse;
  } catch (const PreconditionError& e) {
    err << "precondition violated: " << e.what() << "\n";
    return kPrecondition;
  } catch (const NumericalError& e) {
    err << "construction failed: " << e.what() << "\n";
    return kPrecondition;
  }
  return kUsage;
}

}  // namespace linflow::cli
