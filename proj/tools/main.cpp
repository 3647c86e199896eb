#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "symgerm/decide.hpp"
#include "symgerm/format.hpp"
#include "symgerm/normal_forms.hpp"
#include "symgerm/selftest.hpp"

namespace {

using namespace symgerm;

std::string display_key(const GenericityReport& rep, const std::string& key) {
  if (rep.primed && key != "G8") return key + "'";
  return key;
}

nlohmann::json multiset_json(const ComplexMultiset& m) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : m) arr.push_back({fmt_double(v.real()), fmt_double(v.imag())});
  return arr;
}

std::string multiset_text(const ComplexMultiset& m) {
  std::string out = "{";
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) out += ", ";
    out += fmt_double(m[i].real());
    if (m[i].imag() != 0.0) out += (m[i].imag() > 0 ? "+" : "") + fmt_double(m[i].imag()) + "i";
  }
  return out + "}";
}

nlohmann::json genericity_json(const GenericityReport& rep) {
  nlohmann::json j;
  for (const auto& [key, c] : rep.conditions) {
    nlohmann::json item;
    item["applicable"] = c.applicable;
    item["holds"] = c.holds;
    item["measured"] = c.measured;
    item["required"] = c.required;
    if (!c.note.empty()) item["note"] = c.note;
    j[display_key(rep, key)] = item;
  }
  return j;
}

void genericity_text(std::ostream& out, const GenericityReport& rep) {
  out << "genericity:\n";
  for (const auto& [key, c] : rep.conditions) {
    out << "  " << display_key(rep, key) << "  ";
    if (!c.applicable)
      out << "n/a  ";
    else
      out << (c.holds ? "holds" : "FAILS");
    out << "  measured " << c.measured << " required " << c.required;
    if (!c.note.empty()) out << "  (" << c.note << ")";
    out << "\n";
  }
}

int run_report(const std::string& file, const ToleranceConfig& tol, const std::string& format) {
  GermPair gp = load_germ_pair_file(file, tol);
  Dims dims(gp.k1, gp.k2);
  const int s = invariant_count(dims, gp.n);
  GenericityReport rep = check_genericity(gp, gp.base_point, tol);

  std::optional<CharNumbers> cn;
  std::string invariant_note;
  try {
    cn = characteristic_numbers(reduce(linearize(gp, gp.base_point, tol), dims, tol), tol);
  } catch (const Error& e) {
    invariant_note = e.what();
  }

  std::vector<std::string> warnings;
  if (gp.closedness_warning)
    warnings.push_back("omega is not closed at the base point (residual " +
                       fmt_double(gp.closedness_residual) + ")");

  if (format == "json") {
    nlohmann::json j;
    j["input"] = file;
    j["n"] = gp.n;
    if (gp.equal_dims())
      j["k"] = gp.k1;
    else
      j["dims"] = {gp.k1, gp.k2};
    j["s"] = s;
    j["genericity"] = genericity_json(rep);
    if (cn) {
      j["characteristic_numbers"] = {{"raw", multiset_json(cn->raw)},
                                     {"collapsed", multiset_json(cn->collapsed)},
                                     {"distinct", cn->distinct}};
    } else {
      j["characteristic_numbers"] = nullptr;
      warnings.push_back("invariants unavailable: " + invariant_note);
    }
    if (gp.equal_dims()) {
      ModuliCount mc = moduli_count(gp.k1, gp.n);
      j["moduli"] = mc.infinite ? nlohmann::json("infinite") : nlohmann::json(mc.value);
    }
    j["warnings"] = warnings;
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  std::cout << "input: " << file << "\n";
  std::cout << "n = " << gp.n;
  if (gp.equal_dims())
    std::cout << ", k = " << gp.k1;
  else
    std::cout << ", k1 = " << gp.k1 << ", k2 = " << gp.k2;
  std::cout << ", s = " << s << "\n";
  genericity_text(std::cout, rep);
  if (cn) {
    std::cout << "characteristic numbers (raw): " << multiset_text(cn->raw) << "\n";
    std::cout << "characteristic numbers (collapsed): " << multiset_text(cn->collapsed) << "\n";
    std::cout << "distinct clusters: " << cn->distinct << "\n";
  } else {
    std::cout << "characteristic numbers: unavailable (" << invariant_note << ")\n";
  }
  if (gp.equal_dims()) {
    ModuliCount mc = moduli_count(gp.k1, gp.n);
    std::cout << "moduli count: " << (mc.infinite ? std::string("infinite")
                                                  : std::to_string(mc.value))
              << "\n";
  }
  for (const auto& w : warnings) std::cout << "warning: " << w << "\n";
  return 0;
}

int run_equiv(const std::string& f1, const std::string& f2, const ToleranceConfig& tol,
              const std::string& format) {
  GermPair g1 = load_germ_pair_file(f1, tol);
  GermPair g2 = load_germ_pair_file(f2, tol);
  Verdict v = decide_equivalence(g1, g2, tol);
  if (format == "json") {
    nlohmann::json j;
    j["status"] = to_string(v.status);
    j["rule"] = v.rule;
    j["reason"] = v.reason;
    j["details"] = v.details;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << to_string(v.status);
    if (!v.rule.empty()) std::cout << " (rule " << v.rule << ")";
    std::cout << "\n";
    if (!v.reason.empty()) std::cout << "reason: " << v.reason << "\n";
    for (const auto& [key, val] : v.details) std::cout << key << ": " << val << "\n";
  }
  switch (v.status) {
    case Verdict::Status::Equivalent:
      return 0;
    case Verdict::Status::NotEquivalent:
      return 1;
    case Verdict::Status::Undetermined:
      return 2;
  }
  return 2;
}

int run_normal_form(const std::string& spec_file, const std::string& out_file,
                    const ToleranceConfig& tol, const std::string& format) {
  std::ifstream in(spec_file);
  if (!in) throw ValidationError("cannot open file: " + spec_file);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("invalid JSON in " + spec_file + ": " + e.what());
  }
  NormalFormSpec spec = nf_spec_from_json(doc);
  RoundtripReport report = roundtrip_verify(spec, tol);
  std::ofstream out(out_file);
  if (!out) throw ValidationError("cannot write file: " + out_file);
  out << germ_pair_to_doc(report.germ).dump(2) << "\n";

  if (format == "json") {
    nlohmann::json j;
    j["case"] = to_string(spec.tag);
    j["output"] = out_file;
    j["recovered"] = multiset_json(report.recovered);
    nlohmann::json res;
    for (const auto& [what, r] : report.residuals) res[what] = fmt_double(r);
    j["residuals"] = res;
    j["max_residual"] = fmt_double(report.max_residual);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "case " << to_string(spec.tag) << ": written to " << out_file << "\n";
    std::cout << "recovered: " << multiset_text(report.recovered) << "\n";
    std::cout << "max residual: " << fmt_double(report.max_residual) << "\n";
  }
  return 0;
}

int run_hamiltonians(const std::string& file, int grid_points, double radius,
                     const std::string& out_file, const ToleranceConfig& tol,
                     const std::string& format) {
  GermPair gp = load_germ_pair_file(file, tol);
  QChart chart(gp, tol);
  GridSpec grid;
  if (grid_points > 0) grid.points_per_axis = grid_points;
  if (radius > 0) grid.radius = radius;
  HamiltonianField field = sample_hamiltonians(gp, chart, grid, tol);
  std::string payload =
      format == "json" ? field_to_json(field, tol).dump(2) + "\n" : field_to_csv(field);
  if (!out_file.empty()) {
    std::ofstream out(out_file);
    if (!out) throw ValidationError("cannot write file: " + out_file);
    out << payload;
  } else {
    std::cout << payload;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local symplectic invariants of double points of immersed submanifolds"};
  app.require_subcommand(1);

  ToleranceConfig tol;
  std::string format = "text";
  std::uint64_t seed = 0;
  app.add_option("--tolerance", tol.rank_tol, "relative rank tolerance");
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"json", "text"}));
  app.add_option("--seed", seed, "random seed");

  std::string file1, file2, out_file;
  int grid_points = 0;
  double radius = 0.0;

  auto* report = app.add_subcommand("report", "genericity and invariants of a germ pair");
  report->add_option("file", file1, "germ-pair document")->required();

  auto* equiv = app.add_subcommand("equiv", "decide equivalence of two germ pairs");
  equiv->add_option("file1", file1, "first germ-pair document")->required();
  equiv->add_option("file2", file2, "second germ-pair document")->required();

  auto* nf = app.add_subcommand("normal-form", "synthesize and round-trip a normal form");
  nf->add_option("spec", file1, "normal-form spec document")->required();
  nf->add_option("-o,--output", out_file, "output germ-pair document")->required();

  auto* ham = app.add_subcommand("hamiltonians", "sample the characteristic Hamiltonians");
  ham->add_option("file", file1, "germ-pair document")->required();
  ham->add_option("--grid", grid_points, "points per axis");
  ham->add_option("--radius", radius, "grid radius");
  ham->add_option("-o,--output", out_file, "output file (default stdout)");

  int mk = 0, mn = 0;
  auto* mod = app.add_subcommand("moduli", "moduli count for stratum dimension k in R^2n");
  mod->add_option("k", mk, "stratum dimension")->required();
  mod->add_option("n", mn, "half the ambient dimension")->required();

  auto* self = app.add_subcommand("selftest", "run the randomized property suite");
  self->add_option("--seed", seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 64;
  }

  try {
    if (report->parsed()) return run_report(file1, tol, format);
    if (equiv->parsed()) return run_equiv(file1, file2, tol, format);
    if (nf->parsed()) return run_normal_form(file1, out_file, tol, format);
    if (ham->parsed()) return run_hamiltonians(file1, grid_points, radius, out_file, tol, format);
    if (mod->parsed()) {
      symgerm::ModuliCount mc = symgerm::moduli_count(mk, mn);
      std::cout << (mc.infinite ? std::string("infinite") : std::to_string(mc.value)) << "\n";
      return 0;
    }
    if (self->parsed()) {
      symgerm::SelftestResult result = symgerm::selftest(seed);
      std::cout << result.report;
      return result.pass ? 0 : 70;
    }
  } catch (const symgerm::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 65;
  } catch (const symgerm::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 65;
  } catch (const symgerm::InvalidSpec& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 65;
  } catch (const symgerm::PointNotOnStratum& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 65;
  } catch (const symgerm::OutOfRange& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 65;
  } catch (const symgerm::Error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 70;
  }
  return 64;
}
