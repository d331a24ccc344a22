#include "revmc/cli/commands.hpp"

#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "revmc/cli/chainfile.hpp"
#include "revmc/composition.hpp"
#include "revmc/dominance.hpp"
#include "revmc/error.hpp"
#include "revmc/variance.hpp"

namespace revmc::cli {

using ojson = nlohmann::ordered_json;

namespace {

// ---- Rendering -------------------------------------------------------------

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string scalar(const ojson& v) {
  if (v.is_number_float()) return number(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "none";
  return v.dump();
}

bool numeric_array(const ojson& v) {
  if (!v.is_array()) return false;
  for (const auto& x : v)
    if (!x.is_number()) return false;
  return true;
}

void render(const ojson& obj, std::ostream& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  for (const auto& [key, v] : obj.items()) {
    if (key == "summary") continue;
    if (v.is_object()) {
      out << pad << key << ":\n";
      render(v, out, indent + 2);
    } else if (numeric_array(v)) {
      out << pad << key << ":";
      for (const auto& x : v) out << ' ' << scalar(x);
      out << '\n';
    } else if (v.is_array()) {
      out << pad << key << ":\n";
      for (const auto& item : v) {
        if (item.is_object()) {
          out << pad << "  -\n";
          render(item, out, indent + 4);
        } else if (numeric_array(item)) {
          out << pad << "  ";
          for (const auto& x : item) out << ' ' << scalar(x);
          out << '\n';
        } else {
          out << pad << "  " << scalar(item) << '\n';
        }
      }
    } else {
      out << pad << key << ": " << scalar(v) << '\n';
    }
  }
}

void emit(const ojson& report, bool as_json, std::ostream& out) {
  if (as_json) {
    out << report.dump(2) << '\n';
    return;
  }
  render(report, out, 0);
  if (report.contains("summary"))
    for (const auto& line : report["summary"]) out << line.get<std::string>() << '\n';
}

// ---- Payload helpers -------------------------------------------------------

ojson structure_json(const StructureReport& s) {
  return ojson{{"reversible", s.reversible},
               {"max_detailed_balance_violation", s.max_detailed_balance_violation},
               {"irreducible", s.irreducible},
               {"period", s.period},
               {"stationary", s.stationary_ok},
               {"max_stationarity_violation", s.max_stationarity_violation}};
}

ojson mc_json(const McEstimate& e) {
  return ojson{{"mean_estimate", e.mean_estimate}, {"asym_var_estimate", e.asym_var_estimate},
               {"std_error", e.std_error},         {"steps", e.steps},
               {"replications", e.replications},   {"seed", e.seed}};
}

ojson witness_json(const Witness& w, const char* favours) {
  return ojson{{"favours", favours}, {"f", w.f.values}};
}

struct Loaded {
  ChainFile file;
  TargetDistribution pi;
  TransitionMatrix p;
};

Loaded load_chain(const std::string& path) {
  ChainFile f = load_chain_file(path);
  TargetDistribution pi = target_of(f);
  TransitionMatrix p = chain_of(f);
  return {std::move(f), std::move(pi), std::move(p)};
}

void require_irreducible(const Loaded& c) {
  if (!c.p.irreducible()) throw Error(ErrorCode::NotIrreducible, c.file.source + ": chain is reducible");
}

void require_reversible_named(const Loaded& c) {
  try {
    require_reversible(c.p, c.pi);
  } catch (const Error& e) {
    throw Error(e.code(), c.file.source + ": " + e.detail());
  }
}

Vector functional_for(const std::string& arg, std::size_t n) {
  Vector f = parse_functional_arg(arg);
  if (f.size() != n)
    throw Error(ErrorCode::DimensionMismatch,
                "--f has " + std::to_string(f.size()) + " values, chain has " + std::to_string(n) + " states");
  return f;
}

// ---- Options ---------------------------------------------------------------

struct Options {
  bool json = false;
  double tol = 0.0;
  std::vector<std::string> files;
  std::string f;
  std::string route = "auto";
  bool mc = false;
  std::size_t steps = 200000;
  std::size_t reps = 16;
  std::uint64_t seed = 1;
  double tail_tol = 1e-12;
  std::string action;
  std::size_t component = 0;
  std::optional<std::size_t> block;
  std::string new_block;
};

// ---- Commands --------------------------------------------------------------

ojson cmd_spectrum(const Options& o) {
  const Loaded c = load_chain(o.files.at(0));
  require_reversible_named(c);
  const double tol = o.tol > 0.0 ? o.tol : 1e-12;
  const SpectralDecomposition spec = spectral_decompose(c.p, c.pi);
  const TraceCertificate cert = trace_certificate(c.p, c.pi, tol);

  ojson r;
  r["command"] = "spectrum";
  r["file"] = c.file.source;
  r["tolerances"] = {{"structural", structural_tolerance(c.p.size())}, {"trace", tol}};
  r["n"] = c.p.size();
  r["structure"] = structure_json(validate_structure(c.p, c.pi));
  r["eigenvalues"] = spec.eigenvalues();
  r["pi_max"] = cert.pi_max;
  r["trace"] = cert.trace;
  r["trace_lower_bound"] = cert.lower_bound;
  r["trace_minimal"] = cert.minimal;
  r["summary"] = {std::string("trace-minimal: ") + (cert.minimal ? "yes" : "no")};
  return r;
}

ojson cmd_variance(const Options& o) {
  const Loaded c = load_chain(o.files.at(0));
  const Vector f = functional_for(o.f, c.p.size());
  require_reversible_named(c);
  require_irreducible(c);

  ojson r;
  r["command"] = "variance";
  r["file"] = c.file.source;
  r["tolerances"] = {{"structural", structural_tolerance(c.p.size())}, {"tail", o.tail_tol}};
  r["structure"] = structure_json(validate_structure(c.p, c.pi));
  r["f"] = f;
  r["route"] = o.route == "auto" ? "spectral" : o.route;

  const SpectralDecomposition spec = spectral_decompose(c.p, c.pi);
  VarianceResult v;
  if (o.route == "auto" || o.route == "spectral") {
    v = asym_var_spectral(spec, f);
  } else if (o.route == "resolvent") {
    v = asym_var_resolvent(c.p, c.pi, f);
  } else {
    v = asym_var_autocov(spec, f, o.tail_tol);
    r["lags"] = v.lags;
  }
  r["variance"] = v.value;

  if (o.mc) {
    const McEstimate e = mc_asym_var(c.p, c.pi, f, o.steps, o.reps, o.seed);
    ojson m = mc_json(e);
    m["z_score"] = (e.asym_var_estimate - v.value) / e.std_error;
    r["mc"] = m;
  }
  return r;
}

ojson cmd_compare(const Options& o) {
  const Loaded a = load_chain(o.files.at(0));
  const Loaded b = load_chain(o.files.at(1));
  if (a.p.size() != b.p.size())
    throw Error(ErrorCode::DimensionMismatch, "chains have " + std::to_string(a.p.size()) + " and " +
                                                  std::to_string(b.p.size()) + " states");
  const double pi_tol = std::max(o.tol, structural_tolerance(a.p.size()));
  for (std::size_t i = 0; i < a.pi.size(); ++i)
    if (std::abs(a.pi[i] - b.pi[i]) > pi_tol)
      throw Error(ErrorCode::StructureMismatch, "stationary distributions differ at state " + std::to_string(i));
  require_reversible_named(a);
  require_irreducible(a);
  try {
    require_reversible(b.p, a.pi);
  } catch (const Error& e) {
    throw Error(e.code(), b.file.source + ": " + e.detail());
  }
  require_irreducible(b);

  const TargetDistribution& pi = a.pi;
  const DominanceVerdict v = efficiency_dominates(a.p, b.p, pi, o.tol);
  const SpectralDecomposition sp = spectral_decompose(a.p, pi);
  const SpectralDecomposition sq = spectral_decompose(b.p, pi);

  ojson r;
  r["command"] = "compare";
  r["first"] = a.file.source;
  r["second"] = b.file.source;
  r["tolerances"] = {{"dominance", v.tolerance_used}, {"pi_agreement", pi_tol}};
  r["gap_spectrum"] = v.gap_eigenvalues;
  r["verdict"] = std::string(to_string(v.relation));
  r["peskun"] = {{"P_over_Q", peskun_dominates(a.p, b.p)}, {"Q_over_P", peskun_dominates(b.p, a.p)}};
  r["eigen_dominance"] = {{"P_over_Q", eigen_dominates(sp, sq)}, {"Q_over_P", eigen_dominates(sq, sp)}};
  r["spectral_interval"] = {{"P_over_Q", spectral_interval_dominates(sp, sq)},
                            {"Q_over_P", spectral_interval_dominates(sq, sp)}};
  r["identical_spectrum_incomparable"] = identical_spectrum_incomparable(sp, sq, a.p, b.p);
  r["trace"] = {{"P", a.p.trace()}, {"Q", b.p.trace()}, {"P_strictly_smaller", strict_trace_check(a.p, b.p, pi)}};

  ojson witnesses = ojson::array();
  const double noise = 1e-3 * v.tolerance_used;
  if (v.witness) {
    ojson w = witness_json(*v.witness, "Q");
    w["v_P"] = v.witness->var_first;
    w["v_Q"] = v.witness->var_second;
    witnesses.push_back(w);
  }
  if (!v.gap_eigenvalues.empty() && v.gap_eigenvalues.front() > noise) {
    if (auto w = find_witness(b.p, a.p, pi, 1000, o.seed, noise)) {
      ojson j = witness_json(*w, "P");
      j["v_P"] = w->var_second;
      j["v_Q"] = w->var_first;
      witnesses.push_back(j);
    }
  }
  r["witnesses"] = witnesses;
  return r;
}

ojson cmd_certify(const Options& o) {
  const Loaded c = load_chain(o.files.at(0));
  require_reversible_named(c);
  require_irreducible(c);
  const double tol = o.tol > 0.0 ? o.tol : 1e-12;
  const TraceCertificate cert = trace_certificate(c.p, c.pi, tol);

  ojson r;
  r["command"] = "certify-minimal";
  r["file"] = c.file.source;
  r["tolerances"] = {{"trace", tol}};
  r["trace"] = cert.trace;
  r["lower_bound"] = cert.lower_bound;
  r["pi_max"] = cert.pi_max;
  r["minimal"] = cert.minimal;
  r["certified"] = cert.certifies_non_dominated;
  if (cert.certifies_non_dominated)
    r["summary"] = {"CERTIFIED non-dominated"};
  else
    r["summary"] = {"not certified: trace " + number(cert.trace) + " does not attain the lower bound " +
                    number(cert.lower_bound) + ", so the trace-minimality theorem does not apply"};
  return r;
}

ojson cmd_simulate(const Options& o) {
  const Loaded c = load_chain(o.files.at(0));
  const Vector f = functional_for(o.f, c.p.size());
  require_irreducible(c);
  const McEstimate e = mc_asym_var(c.p, c.pi, f, o.steps, o.reps, o.seed);

  ojson r;
  r["command"] = "simulate";
  r["file"] = c.file.source;
  r["f"] = f;
  r["estimate"] = mc_json(e);
  if (validate_structure(c.p, c.pi).reversible)
    r["exact_spectral"] = asym_var_spectral(spectral_decompose(c.p, c.pi), f).value;
  return r;
}

// ---- gibbs -----------------------------------------------------------------

Matrix load_block(const std::string& arg) {
  if (arg.empty()) throw ParseError("--new-block is required");
  const auto first = arg.find_first_not_of(" \t\r\n");
  nlohmann::json doc;
  if (first != std::string::npos && arg[first] == '[') {
    try {
      doc = nlohmann::json::parse(arg);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("--new-block: ") + e.what());
    }
  } else {
    doc = load_json(arg);
  }
  if (doc.is_object()) {
    if (!doc.contains("block")) throw ParseError("--new-block: object must have a 'block' matrix");
    doc = doc["block"];
  }
  return parse_matrix(doc, "--new-block");
}

ojson chain_doc(const TargetDistribution& pi, const Matrix& p, const std::optional<std::vector<std::size_t>>& product) {
  ChainFile f;
  f.states = pi.labels();
  f.pi.assign(pi.probs().begin(), pi.probs().end());
  f.p = p;
  f.product = product;
  return to_json(f);
}

ojson blocks_json(const GibbsComponent& comp) {
  ojson out = ojson::array();
  for (std::size_t b = 0; b < comp.blocks.size(); ++b)
    out.push_back({{"block", b}, {"states", comp.blocks[b].states}, {"conditional", comp.blocks[b].conditional}});
  return out;
}

ojson cmd_gibbs(const Options& o) {
  const ChainFile file = load_chain_file(o.files.at(0));
  if (!file.product) throw ParseError(file.source + ": gibbs needs a 'product' entry");
  const TargetDistribution pi = target_of(file);
  const ProductSpec prod(*file.product);
  const std::size_t l = prod.components();

  std::vector<GibbsComponent> comps;
  for (std::size_t k = 1; k <= l; ++k) comps.push_back(gibbs_component(pi, prod, k));
  auto component = [&](std::size_t k) -> const GibbsComponent& {
    if (k < 1 || k > l)
      throw Error(ErrorCode::BadComponentIndex, "--component " + std::to_string(k) + " not in 1.." + std::to_string(l));
    return comps[k - 1];
  };

  ojson r;
  r["command"] = "gibbs " + o.action;
  r["file"] = file.source;
  r["product"] = *file.product;

  if (o.action == "build") {
    const TransitionMatrix chain = random_scan_gibbs(pi, prod);
    r["chain"] = chain_doc(pi, chain.entries(), file.product);
    r["structure"] = structure_json(validate_structure(chain, pi));
    ojson list = ojson::array();
    for (const auto& comp : comps) {
      if (o.component != 0 && comp.k != o.component) continue;
      list.push_back({{"component", comp.k}, {"kernel", to_json(comp.kernel.entries())}, {"blocks", blocks_json(comp)}});
    }
    if (o.component != 0) component(o.component);
    r["components"] = list;
    return r;
  }

  if (o.component == 0) throw ParseError("--component is required for gibbs " + o.action);
  const GibbsComponent& old_comp = component(o.component);
  std::optional<GibbsComponent> new_comp;
  if (o.block || !o.new_block.empty()) {
    if (!o.block) throw ParseError("--block is required with --new-block");
    const double tol = o.tol > 0.0 ? o.tol : 1e-12;
    new_comp = replace_block(old_comp, *o.block, load_block(o.new_block), tol);
  } else if (o.action == "replace-block") {
    throw ParseError("gibbs replace-block needs --block and --new-block");
  }

  if (o.action == "replace-block") {
    r["component"] = new_comp->k;
    r["block"] = *o.block;
    r["block_kernel"] = to_json(new_comp->blocks[*o.block].kernel);
    r["kernel"] = to_json(new_comp->kernel.entries());
    r["chain"] = chain_doc(pi, new_comp->kernel.entries(), file.product);
    return r;
  }

  // check-improvement
  std::vector<GibbsComponent> improved = comps;
  if (new_comp) improved[o.component - 1] = *new_comp;
  const std::vector<double> weights(l, 1.0 / static_cast<double>(l));
  const ImprovementVerdict iv = component_improvement_verdict(std::span<const GibbsComponent>(comps),
                                                              std::span<const GibbsComponent>(improved),
                                                              weights, pi, o.tol);
  const auto block_gaps = block_gap_eigs(old_comp, improved[o.component - 1]);
  r["tolerances"] = {{"dominance", iv.verdict.tolerance_used}};
  r["component"] = o.component;
  ojson bg = ojson::array();
  for (std::size_t b = 0; b < block_gaps.size(); ++b) bg.push_back({{"block", b}, {"eigenvalues", block_gaps[b]}});
  r["block_gap_eigenvalues"] = bg;
  ojson cg = ojson::array();
  for (std::size_t k = 0; k < iv.component_gaps.size(); ++k)
    cg.push_back({{"component", k + 1}, {"eigenvalues", iv.component_gaps[k]}});
  r["component_gap_eigenvalues"] = cg;
  r["components_nonnegative"] = iv.components_nonnegative;
  r["mixture_gap_spectrum"] = iv.verdict.gap_eigenvalues;
  r["direct_relation"] = std::string(to_string(iv.direct_relation));
  r["consistent"] = iv.consistent;
  r["verdict"] = std::string(to_string(iv.verdict.relation));
  r["summary"] = {"verdict (new vs old): " + std::string(to_string(iv.verdict.relation))};
  return r;
}

int status_for(const Error& e) {
  return e.code() == ErrorCode::PeriodicChain ? kExitRouteRefused : kExitValidation;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  std::function<ojson(const Options&)> action;

  CLI::App app{"Exact efficiency analysis of reversible Markov chains on finite state spaces", "revmc"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub) {
    sub->add_flag("--json", o.json, "Emit a JSON report instead of text");
    sub->add_option("--tol", o.tol, "Tolerance override (default: library default for the check)");
  };
  auto chain_arg = [&](CLI::App* sub, const char* name, const char* help) {
    sub->add_option(name, o.files, help)->required()->expected(1);
  };

  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues, structure and trace bound of a reversible chain");
  chain_arg(spectrum, "chain", "Chain file");
  common(spectrum);
  spectrum->callback([&] { action = cmd_spectrum; });

  auto* variance = app.add_subcommand("variance", "Asymptotic variance v(f,P)");
  chain_arg(variance, "chain", "Chain file");
  common(variance);
  variance->add_option("--f", o.f, "Function values: '1,0,0', '[1,0,0]' or @file")->required();
  variance->add_option("--route", o.route, "auto | spectral | resolvent | autocov")
      ->check(CLI::IsMember({"auto", "spectral", "resolvent", "autocov"}));
  variance->add_option("--tail-tol", o.tail_tol, "Truncation tolerance for the autocov route");
  variance->add_flag("--mc", o.mc, "Also run the Monte Carlo estimator");
  variance->add_option("--steps", o.steps, "Monte Carlo steps per replication");
  variance->add_option("--reps", o.reps, "Monte Carlo replications");
  variance->add_option("--seed", o.seed, "Monte Carlo seed");
  variance->callback([&] { action = cmd_variance; });

  auto* compare = app.add_subcommand("compare", "Efficiency, Peskun and eigen dominance between two chains");
  compare->add_option("chains", o.files, "Chain files P and Q")->required()->expected(2);
  common(compare);
  compare->add_option("--seed", o.seed, "Witness search seed");
  compare->callback([&] { action = cmd_compare; });

  auto* gibbs = app.add_subcommand("gibbs", "Random-scan Gibbs samplers on product spaces");
  std::string target;
  gibbs->add_option("target", target, "Target file with a 'product' entry")->required();
  gibbs->add_option("action", o.action, "build | replace-block | check-improvement")
      ->required()
      ->check(CLI::IsMember({"build", "replace-block", "check-improvement"}));
  common(gibbs);
  gibbs->add_option("--component", o.component, "Component index k, 1-based");
  gibbs->add_option("--block", o.block, "Block index within the component, 0-based");
  gibbs->add_option("--new-block", o.new_block, "Replacement block: JSON matrix file or inline JSON");
  gibbs->callback([&] {
    o.files = {target};
    action = cmd_gibbs;
  });

  auto* certify = app.add_subcommand("certify-minimal", "Trace-minimality certificate of non-domination");
  chain_arg(certify, "chain", "Chain file");
  common(certify);
  certify->callback([&] { action = cmd_certify; });

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of the asymptotic variance");
  chain_arg(simulate, "chain", "Chain file");
  common(simulate);
  simulate->add_option("--f", o.f, "Function values: '1,0,0', '[1,0,0]' or @file")->required();
  simulate->add_option("--steps", o.steps, "Steps per replication (>= 10000)");
  simulate->add_option("--reps", o.reps, "Replications (>= 8)");
  simulate->add_option("--seed", o.seed, "Seed");
  simulate->callback([&] { action = cmd_simulate; });

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  }

  std::string failure;
  int status = kExitOk;
  try {
    ojson report = action(o);
    report["exit_status"] = kExitOk;
    emit(report, o.json, out);
    return kExitOk;
  } catch (const ParseError& e) {
    failure = e.what();
    status = kExitParse;
  } catch (const Error& e) {
    failure = e.what();
    status = status_for(e);
  } catch (const std::exception& e) {
    failure = e.what();
    status = kExitInternal;
  }
  err << "error: " << failure << '\n';
  if (o.json) out << ojson{{"error", failure}, {"exit_status", status}}.dump(2) << '\n';
  return status;
}

}  // namespace revmc::cli
