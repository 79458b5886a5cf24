// Batch front door for the library: model/tensor ingestion, identity suites,
// holonomy-system reduction, and the built-in example catalog.
//
// Exit codes: 0 = all gated checks pass; 1 = a check failed (report still
// written); 2 = input or validation error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <torsionlab/builtin_models.hpp>
#include <torsionlab/g1_calculus.hpp>
#include <torsionlab/io.hpp>
#include <torsionlab/nk_holonomy.hpp>

namespace {

using namespace torsionlab;

struct Options {
  std::string in, out, model, suite, json_out;
  int seed = 0;
  double tol = 1e-8;
};

double default_tol() {
  if (const char* env = std::getenv("TORSIONLAB_TOL")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end == env || v <= 0.0)
      throw std::invalid_argument("TORSIONLAB_TOL must be a positive number");
    return v;
  }
  return 1e-8;
}

HomogeneousModel resolve_model(const Options& opt) {
  if (!opt.model.empty()) {
    std::string name = opt.model;
    if (name.rfind("builtin:", 0) == 0) name = name.substr(8);
    return builtin(name);
  }
  if (!opt.in.empty()) return model_from_json(load_json_file(opt.in));
  throw std::invalid_argument("a model is required: pass --model or --in");
}

void emit_report(const Options& opt, const ResidualReport& rep) {
  json j = report_to_json(rep);
  std::cout << report_render(j);
  if (!opt.json_out.empty()) write_text_file(opt.json_out, dump_json(j));
}

int gated_exit(const ResidualReport& rep) {
  for (auto& it : rep.items)
    if (it.gated && !it.pass) return 1;
  return 0;
}

int run_validate(const Options& opt) {
  HolonomySystem sys =
      opt.in.empty() ? build_system(resolve_model(opt), opt.tol)
                     : system_from_json(load_json_file(opt.in), opt.tol);
  ResidualReport rep;
  rep.suite = "holonomy_system_validation";
  rep.tol = opt.tol;
  rep.add("pair_symmetry", "R(x,y,z,u) = R(z,u,x,y)", sys.residual_pair_symmetry);
  rep.add("first_pair_type", "R(Jx,Jy,.,.) = R(x,y,.,.)", sys.residual_first_pair);
  rep.add("second_pair_type", "R(.,.,Jz,Ju) = R(.,.,z,u)", sys.residual_second_pair);
  rep.add("torsion_form_type", "psi in lambda^3", sys.residual_type3);
  rep.add("structure_identity", "Omega(R) = 1/2 psi . psi", sys.residual_structure);
  rep.add("commutation", "[R(x,y), psi] = 0 in so(n)", sys.residual_commute);
  rep.add("strict_gap", "min_x |psi_x| > 0 (reported as a gap, not a defect)",
          sys.strict_gap, false);
  emit_report(opt, rep);
  return gated_exit(rep);
}

int run_classify(const Options& opt) {
  G1Context cx = make_g1(resolve_model(opt));
  ResidualReport rep;
  rep.suite = "gray_hervella_class";
  rep.tol = opt.tol;
  rep.add("w1_mass", "nearly-Kaehler component |(d omega)_{3,0}|", cx.gh.w1, false);
  rep.add("w2_mass", "Nijenhuis component outside lambda^3", cx.gh.w2, false);
  rep.add("w3_mass", "balanced skew component |(d omega)_{2,1} - theta ^ omega|",
          cx.gh.w3, false);
  rep.add("w4_mass", "Lee component |theta|", cx.gh.w4, false);
  rep.add("g1_obstruction", "anti-invariant Nijenhuis part (zero iff class G1)",
          cx.gh.g1 ? 0.0 : cx.gh.w2);
  emit_report(opt, rep);
  std::cout << "label: " << cx.gh.label << "\n";
  return gated_exit(rep);
}

int run_decompose(const Options& opt) {
  ResidualReport rep = curvature_suite(make_g1(resolve_model(opt)), opt.tol);
  emit_report(opt, rep);
  return gated_exit(rep);
}

int run_killing(const Options& opt) {
  G1Context cx = make_g1(resolve_model(opt));
  KillingCertificate cert = killing_check(cx.model, cx.pot, cx.psim, opt.tol);
  ResidualReport rep;
  rep.suite = "hermitian_killing_check";
  rep.tol = opt.tol;
  rep.add("killing_equation", "D_X phi = (X . A)_{lambda^p} least-squares defect",
          cert.fit_residual);
  rep.add("first_jet_formula", "A = del phi + 1/(p+1) delbar phi",
          cert.formula_residual);
  rep.add("fit_conditioning", "smallest singular value of the fit (reported)",
          cert.min_singular, false);
  emit_report(opt, rep);
  return gated_exit(rep);
}

int run_reduce(const Options& opt) {
  HolonomySystem sys =
      opt.in.empty() ? build_system(resolve_model(opt), opt.tol)
                     : system_from_json(load_json_file(opt.in), opt.tol);
  ReductionNode tree = reduce_system(sys, static_cast<std::uint64_t>(opt.seed), opt.tol);
  json j = tree_to_json(tree);
  std::cout << "leaves: " << tree.count_leaves() << "\n";
  if (!opt.out.empty()) write_text_file(opt.out, dump_json(j));
  return 0;
}

int run_report(const Options& opt) {
  G1Context cx = make_g1(resolve_model(opt));
  ResidualReport rep;
  if (opt.suite == "g1")
    rep = g1_identity_suite(cx, opt.tol);
  else if (opt.suite == "curvature")
    rep = curvature_suite(cx, opt.tol);
  else if (opt.suite == "w1w4")
    rep = w1w4_suite(cx, opt.tol);
  else if (opt.suite == "killing")
    return run_killing(opt);
  else
    throw std::invalid_argument("unknown suite (use g1|curvature|w1w4|killing): " +
                                opt.suite);
  emit_report(opt, rep);
  return gated_exit(rep);
}

int run_examples(const std::string& action, const std::string& name, const Options& opt) {
  if (action == "list") {
    for (auto& n : builtin_names()) std::cout << n << "\n";
    return 0;
  }
  if (action == "emit") {
    std::string text = dump_json(model_to_json(builtin(name)));
    if (opt.out.empty())
      std::cout << text;
    else
      write_text_file(opt.out, text);
    return 0;
  }
  throw std::invalid_argument("examples: expected 'list' or 'emit <name>'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"torsionlab: almost-Hermitian torsion calculus workbench"};
  app.require_subcommand(1);

  Options opt;
  try {
    opt.tol = default_tol();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--in", opt.in, "input JSON file");
    cmd->add_option("--out", opt.out, "output JSON file");
    cmd->add_option("--model", opt.model, "builtin model name (builtin: prefix optional)");
    cmd->add_option("--seed", opt.seed, "random seed (default 0)");
    cmd->add_option("--tol", opt.tol, "gating tolerance");
    cmd->add_option("--json", opt.json_out, "write the machine-readable report here");
  };

  CLI::App* validate = app.add_subcommand("validate", "check a holonomy system");
  CLI::App* classify = app.add_subcommand("classify", "Gray-Hervella class of a model");
  CLI::App* decompose = app.add_subcommand("decompose", "curvature decomposition report");
  CLI::App* killing = app.add_subcommand("killing", "Hermitian Killing certificate");
  CLI::App* reduce = app.add_subcommand("reduce", "factor a holonomy system");
  CLI::App* report = app.add_subcommand("report", "run an identity suite");
  report->add_option("--suite", opt.suite, "g1|curvature|w1w4|killing")->required();
  for (CLI::App* c : {validate, classify, decompose, killing, reduce, report})
    add_common(c);

  CLI::App* examples = app.add_subcommand("examples", "built-in example catalog");
  std::string ex_action, ex_name;
  examples->add_option("action", ex_action, "list | emit")->required();
  examples->add_option("name", ex_name, "builtin model name (for emit)");
  examples->add_option("--out", opt.out, "output JSON file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) return run_validate(opt);
    if (classify->parsed()) return run_classify(opt);
    if (decompose->parsed()) return run_decompose(opt);
    if (killing->parsed()) return run_killing(opt);
    if (reduce->parsed()) return run_reduce(opt);
    if (report->parsed()) return run_report(opt);
    if (examples->parsed()) return run_examples(ex_action, ex_name, opt);
  } catch (const CannotCertify& e) {
    std::cerr << "cannot certify: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "malformed JSON: " << e.what() << "\n";  // message has byte position
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
