#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "longrun/csv.hpp"
#include "longrun/gallery.hpp"
#include "longrun/mdp_lift.hpp"
#include "longrun/minavg.hpp"
#include "longrun/model.hpp"
#include "longrun/parallel.hpp"
#include "longrun/plays.hpp"
#include "longrun/pomdp_lift.hpp"
#include "longrun/uniform.hpp"
#include "longrun/values.hpp"

namespace {

using namespace longrun;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitValidation = 2;
constexpr int kExitBudget = 3;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelError("cannot write file: " + path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void print_config(const std::string& verb,
                  const std::vector<std::pair<std::string, std::string>>& kv) {
  std::cout << "config: verb=" << verb;
  for (const auto& [k, v] : kv) std::cout << " " << k << "=" << v;
  std::cout << "\n";
}

void emit_csv(const std::string& path, const std::vector<ValueTable>& tables) {
  std::ostringstream buf;
  write_values_csv(buf, tables);
  if (path.empty()) {
    std::cout << buf.str();
  } else {
    write_file(path, buf.str());
  }
}

std::string guarantee_csv(const GuaranteeReport& g) {
  std::ostringstream out;
  out << "level,epsilon,T1,pass\n"
      << format_double(g.level) << ',' << format_double(g.epsilon) << ','
      << g.checked_horizon << ',' << (g.pass ? 1 : 0) << '\n';
  return out.str();
}

int run_values(const std::string& model_path, int n, std::vector<double> lambdas,
               const std::string& csv) {
  Model model = load_model_file(model_path);
  print_config("values", {{"model", model_path},
                          {"n", std::to_string(n)},
                          {"csv", csv.empty() ? "-" : csv}});
  std::vector<ValueTable> tables = v_n_table(model, n);
  for (double lambda : lambdas) {
    DiscountParams params;
    params.lambda = lambda;
    tables.push_back(v_lambda_table(model, params));
  }
  emit_csv(csv, tables);
  return kExitOk;
}

int run_wvalues(const std::string& model_path, int n, int m, double tol,
                const std::string& csv) {
  Model model = load_model_file(model_path);
  print_config("wvalues", {{"model", model_path},
                           {"n", std::to_string(n)},
                           {"m", std::to_string(m)},
                           {"tol", format_double(tol)}});
  ValueTable table;
  table.family = m > 0 ? Family::wmn : Family::wn;
  table.n = n;
  table.m = m;
  table.values.assign(static_cast<size_t>(model.size()), 0.0);
  parallel_for(model.size(), [&](int z) {
    table.values[static_cast<size_t>(z)] = w_mn(model, z, m, n, tol).value;
  });
  emit_csv(csv, {table});
  return kExitOk;
}

int run_vstar(const std::string& model_path, int state, double gap,
              const std::string& csv, const std::string& cert) {
  Model model = load_model_file(model_path);
  const StateId z = state < 0 ? model.initial : state;
  print_config("vstar", {{"model", model_path},
                         {"state", std::to_string(z)},
                         {"gap", format_double(gap)}});
  ValueInterval vi = estimate_vstar(model, z, gap);
  std::cout << "interval: [" << format_double(vi.lower) << ", "
            << format_double(vi.upper) << "] upper_horizon=" << vi.upper_horizon
            << (vi.budget_exhausted ? " budget_exhausted" : "") << "\n";
  if (!csv.empty()) {
    std::ostringstream out;
    out << "state,lower,upper,upper_horizon,budget_exhausted\n"
        << z << ',' << format_double(vi.lower) << ',' << format_double(vi.upper)
        << ',' << vi.upper_horizon << ',' << (vi.budget_exhausted ? 1 : 0)
        << '\n';
    write_file(csv, out.str());
  }
  if (!cert.empty()) write_file(cert, serialize_play(vi.lower_certificate));
  return vi.budget_exhausted ? kExitBudget : kExitOk;
}

int run_chain(const std::string& model_path, int state, int m_probe,
              int horizons, const std::string& csv) {
  Model model = load_model_file(model_path);
  const StateId z = state < 0 ? model.initial : state;
  print_config("chain", {{"model", model_path},
                         {"state", std::to_string(z)},
                         {"m_probe", std::to_string(m_probe)},
                         {"horizons", std::to_string(horizons)}});
  ChainReport chain = check_chain(model, z, m_probe, horizons);
  VminusReport vm = check_vminus(model, z, horizons);
  std::ostringstream out;
  out << "term,value,direction\n";
  for (const auto& t : chain.terms) {
    out << t.name << ',' << format_double(t.value) << ",\"" << t.direction
        << "\"\n";
  }
  out << "v_minus.liminf_probe," << format_double(vm.liminf_probe) << ",\""
      << (vm.conclusive ? "conclusive" : "inconclusive") << "\"\n";
  out << "v_minus.supinf_probe," << format_double(vm.supinf_probe) << ",\""
      << (vm.agree ? "agrees" : "disagrees") << "\"\n";
  for (const auto& t : chain.terms) {
    std::cout << "  " << t.name << " = " << format_double(t.value) << "  ["
              << t.direction << "]\n";
  }
  std::cout << "  v_minus window probe = " << format_double(vm.liminf_probe)
            << " vs sup-inf probe " << format_double(vm.supinf_probe) << " ("
            << (vm.conclusive ? (vm.agree ? "agree" : "DISAGREE")
                              : "inconclusive")
            << ")\n";
  for (const auto& v : chain.violations) std::cout << "violation: " << v << "\n";
  if (!csv.empty()) write_file(csv, out.str());
  return chain.ok() ? kExitOk : kExitCheckFailed;
}

int run_synth(const std::string& model_path, int state, double alpha,
              const std::string& play_out, const std::string& report_csv) {
  Model model = load_model_file(model_path);
  const StateId z = state < 0 ? model.initial : state;
  print_config("synth", {{"model", model_path},
                         {"state", std::to_string(z)},
                         {"alpha", format_double(alpha)}});
  SynthesisResult result = synthesize(model, z, alpha);
  std::cout << "level=" << format_double(result.report.level)
            << " epsilon=" << format_double(result.report.epsilon)
            << " upper_bound=" << format_double(result.upper_bound)
            << " blocks=" << result.blocks_used
            << " target_met=" << (result.target_met ? 1 : 0)
            << " pass=" << (result.report.pass ? 1 : 0) << "\n";
  if (!play_out.empty()) write_file(play_out, serialize_play(result.lasso));
  if (!report_csv.empty()) write_file(report_csv, guarantee_csv(result.report));
  return result.target_met ? kExitOk : kExitBudget;
}

int run_shorten(const std::string& model_path, const std::string& play_path,
                double epsilon, double level, const std::string& out_path) {
  Model model = load_model_file(model_path);
  Play play = parse_play(read_file(play_path));
  if (play.is_lasso()) {
    throw ModelError("shorten expects a finite prefix play, not a lasso");
  }
  print_config("shorten", {{"model", model_path},
                           {"play", play_path},
                           {"epsilon", format_double(epsilon)},
                           {"level", format_double(level)}});
  Play shorter = shorten(model, play, epsilon, level);
  const std::string text = serialize_play(shorter);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
  return kExitOk;
}

int run_lift_mdp(const std::string& mdp_path, int depth, double delta,
                 const std::string& emit_model, int values_n,
                 const std::string& csv, double uniform_gap) {
  MDPSpec spec = load_mdp_file(mdp_path);
  print_config("lift-mdp", {{"mdp", mdp_path},
                            {"depth", std::to_string(depth)},
                            {"delta", format_double(delta)}});
  LiftResult lift = explore(spec, depth, delta);
  std::cout << "lifted states=" << lift.model.size()
            << " merges=" << lift.merges.size()
            << " boundary_redirects=" << lift.boundary_redirects << "\n";
  if (!emit_model.empty()) write_file(emit_model, serialize_model(lift.model));
  if (values_n > 0) {
    emit_csv(csv, v_n_table(lift.model, values_n));
  }
  if (uniform_gap > 0.0) {
    MdpUniformOptions options;
    options.depth = depth;
    options.delta = delta;
    ValueInterval vi = mdp_uniform(spec, uniform_gap, options);
    std::cout << "uniform interval: [" << format_double(vi.lower) << ", "
              << format_double(vi.upper) << "]"
              << (vi.budget_exhausted ? " budget_exhausted" : "") << "\n";
  }
  return kExitOk;
}

int run_lift_pomdp(const std::string& pomdp_path, int depth, double delta,
                   const std::string& emit_model, int values_n,
                   const std::string& csv,
                   const std::vector<double>& theta) {
  POMDPSpec spec = load_pomdp_file(pomdp_path);
  print_config("lift-pomdp", {{"pomdp", pomdp_path},
                              {"depth", std::to_string(depth)},
                              {"delta", format_double(delta)}});
  PLiftResult lift = explore_p(spec, depth, delta);
  std::cout << "lifted states=" << lift.model.size()
            << " merges=" << lift.merges.size()
            << " boundary_redirects=" << lift.boundary_redirects << "\n";
  if (!emit_model.empty()) write_file(emit_model, serialize_model(lift.model));
  if (values_n > 0) emit_csv(csv, v_n_table(lift.model, values_n));
  if (!theta.empty()) {
    std::cout << "value_theta=" << format_double(value_theta(spec, spec.p0, theta))
              << "\n";
  }
  return kExitOk;
}

int run_gallery(const std::string& name, int grid_y,
                std::vector<double> alpha_grid, double mass_threshold,
                int k_blocks, std::int64_t horizon, int base, int grid,
                const std::string& emit_model, const std::string& csv) {
  GalleryReport report;
  Model model;
  if (name == "square") {
    print_config("gallery", {{"name", name}, {"grid_y", std::to_string(grid_y)}});
    report = square_diagnostics(grid_y);
    model = square_model(grid_y).model;
  } else if (name == "simplex") {
    if (alpha_grid.empty()) {
      for (int i = 0; i <= 10; ++i) alpha_grid.push_back(0.05 * i);
    }
    print_config("gallery", {{"name", name},
                             {"alphas", std::to_string(alpha_grid.size())},
                             {"mass_threshold", format_double(mass_threshold)}});
    report = simplex_diagnostics(alpha_grid, mass_threshold);
    model = simplex_model(alpha_grid, mass_threshold).model;
  } else if (name == "blocks") {
    print_config("gallery", {{"name", name}, {"k", std::to_string(k_blocks)}});
    report = blocks_diagnostics(k_blocks);
    model = blocks_model(k_blocks).model;
  } else if (name == "abelgap") {
    print_config("gallery", {{"name", name},
                             {"horizon", std::to_string(horizon)},
                             {"base", std::to_string(base)}});
    report = abelgap_diagnostics(horizon, base);
    model = abelgap_model(horizon, base).model;
  } else if (name == "interval") {
    print_config("gallery", {{"name", name}, {"grid", std::to_string(grid)}});
    report = interval_diagnostics(grid);
    model = interval_model(grid).model;
  } else {
    throw ModelError("unknown gallery instance: " + name);
  }
  std::ostringstream out;
  out << "check,pass,value,note\n";
  for (const auto& c : report.checks) {
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << report.instance << "."
              << c.name << " value=" << format_double(c.value) << " (" << c.note
              << ")\n";
    out << c.name << ',' << (c.pass ? 1 : 0) << ',' << format_double(c.value)
        << ",\"" << c.note << "\"\n";
  }
  if (!csv.empty()) write_file(csv, out.str());
  if (!emit_model.empty()) write_file(emit_model, serialize_model(model));
  return report.ok() ? kExitOk : kExitCheckFailed;
}

int run_check(const std::string& model_path, int horizons, int m_max,
              double tol) {
  Model model = load_model_file(model_path);
  print_config("check", {{"model", model_path},
                         {"horizons", std::to_string(horizons)},
                         {"m_max", std::to_string(m_max)}});
  bool all_ok = true;
  auto report = [&](const std::string& name, bool ok, const std::string& note) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name
              << (note.empty() ? "" : " (" + note + ")") << "\n";
    all_ok &= ok;
  };

  const std::vector<ValueTable> vn = v_n_table(model, horizons);
  const auto violations = check_eq1(model, vn);
  report("horizon_splitting_sandwich", violations.empty(),
         violations.empty() ? "" : violations.front().inequality);

  bool mono_ok = true;
  bool dom_ok = true;
  std::vector<std::vector<std::vector<double>>> w(
      static_cast<size_t>(model.size()));
  parallel_for(model.size(), [&](int z) {
    auto& per_state = w[static_cast<size_t>(z)];
    per_state.assign(static_cast<size_t>(m_max) + 1, {});
    for (int m = 0; m <= m_max; ++m) {
      for (int n = 1; n <= horizons; ++n) {
        per_state[static_cast<size_t>(m)].push_back(
            w_mn(model, z, m, n, tol).value);
      }
    }
  });
  for (int z = 0; z < model.size(); ++z) {
    for (int m = 0; m <= m_max; ++m) {
      for (int n = 1; n <= horizons; ++n) {
        const double wmn = w[static_cast<size_t>(z)][static_cast<size_t>(m)]
                            [static_cast<size_t>(n - 1)];
        if (n < horizons) {
          const double wmn1 = w[static_cast<size_t>(z)][static_cast<size_t>(m)]
                               [static_cast<size_t>(n)];
          if (wmn1 > wmn + 2 * tol) mono_ok = false;
        }
        if (wmn > v_mn(model, z, m, n, vn) + 2 * tol) dom_ok = false;
      }
    }
  }
  report("min_average_monotone_in_horizon", mono_ok, "");
  report("min_average_dominated_by_shifted_value", dom_ok, "");

  bool lemma_ok = true;
  for (int k = 1; k <= 3 && k <= horizons; ++k) {
    std::vector<double> fk(static_cast<size_t>(model.size()));
    parallel_for(model.size(), [&](int z) {
      fk[static_cast<size_t>(z)] = f_n(model, z, k, tol);
    });
    for (int z = 0; z < model.size(); ++z) {
      for (int m = 0; m <= m_max; ++m) {
        for (int n = 1; n <= horizons; ++n) {
          const double bound = fk[static_cast<size_t>(z)] +
                               static_cast<double>(k - 1) / n + 2 * tol;
          if (v_mn(model, z, m, n, vn) > bound) lemma_ok = false;
        }
      }
    }
  }
  report("shifted_value_capped_by_horizon_k_floor", lemma_ok, "");

  ChainReport chain = check_chain(model, model.initial, m_max, horizons, tol);
  report("chain_surrogates_sound", chain.ok(),
         chain.ok() ? "" : chain.violations.front());

  return all_ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"long-run average value toolkit"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "worker thread bound (output invariant)");

  // values
  auto* values_cmd = app.add_subcommand("values", "n-stage and discounted value tables");
  std::string model_path, csv_path, cert_path, play_path, out_path;
  int n = 10, m = 0, state = -1, m_probe = 3, horizons = 12;
  double tol = 1e-9, gap = 0.02, alpha = 0.1, epsilon = 0.1, level = 0.5;
  std::vector<double> lambdas;
  values_cmd->add_option("--model", model_path)->required();
  values_cmd->add_option("--n", n)->required();
  values_cmd->add_option("--lambda", lambdas);
  values_cmd->add_option("--csv", csv_path);

  auto* wvalues_cmd = app.add_subcommand("wvalues", "min-average value tables");
  wvalues_cmd->add_option("--model", model_path)->required();
  wvalues_cmd->add_option("--n", n)->required();
  wvalues_cmd->add_option("--m", m);
  wvalues_cmd->add_option("--tol", tol);
  wvalues_cmd->add_option("--csv", csv_path);

  auto* vstar_cmd = app.add_subcommand("vstar", "long-run value interval");
  vstar_cmd->add_option("--model", model_path)->required();
  vstar_cmd->add_option("--state", state);
  vstar_cmd->add_option("--gap", gap);
  vstar_cmd->add_option("--csv", csv_path);
  vstar_cmd->add_option("--cert", cert_path);

  auto* chain_cmd = app.add_subcommand("chain", "ordered long-run surrogates");
  chain_cmd->add_option("--model", model_path)->required();
  chain_cmd->add_option("--state", state);
  chain_cmd->add_option("--m-probe", m_probe);
  chain_cmd->add_option("--horizons", horizons);
  chain_cmd->add_option("--csv", csv_path);

  auto* synth_cmd = app.add_subcommand("synth", "certified lasso synthesis");
  synth_cmd->add_option("--model", model_path)->required();
  synth_cmd->add_option("--state", state);
  synth_cmd->add_option("--alpha", alpha);
  synth_cmd->add_option("--out", out_path);
  synth_cmd->add_option("--report", csv_path);

  auto* shorten_cmd = app.add_subcommand("shorten", "compress a good play");
  shorten_cmd->add_option("--model", model_path)->required();
  shorten_cmd->add_option("--play", play_path)->required();
  shorten_cmd->add_option("--epsilon", epsilon)->required();
  shorten_cmd->add_option("--level", level)->required();
  shorten_cmd->add_option("--out", out_path);

  auto* lift_mdp_cmd = app.add_subcommand("lift-mdp", "belief-free MDP rewrite");
  std::string spec_path, emit_model;
  int depth = 6, values_n = 0;
  double delta = 0.0, uniform_gap = 0.0;
  lift_mdp_cmd->add_option("--mdp", spec_path)->required();
  lift_mdp_cmd->add_option("--depth", depth);
  lift_mdp_cmd->add_option("--delta", delta);
  lift_mdp_cmd->add_option("--emit-model", emit_model);
  lift_mdp_cmd->add_option("--values", values_n);
  lift_mdp_cmd->add_option("--csv", csv_path);
  lift_mdp_cmd->add_option("--uniform", uniform_gap);

  auto* lift_pomdp_cmd = app.add_subcommand("lift-pomdp", "belief-measure rewrite");
  std::vector<double> theta;
  lift_pomdp_cmd->add_option("--pomdp", spec_path)->required();
  lift_pomdp_cmd->add_option("--depth", depth);
  lift_pomdp_cmd->add_option("--delta", delta);
  lift_pomdp_cmd->add_option("--emit-model", emit_model);
  lift_pomdp_cmd->add_option("--values", values_n);
  lift_pomdp_cmd->add_option("--csv", csv_path);
  lift_pomdp_cmd->add_option("--theta", theta);

  auto* gallery_cmd = app.add_subcommand("gallery", "worked instances and diagnostics");
  std::string gallery_name;
  int grid_y = 64, k_blocks = 30, base = 4, grid = 8;
  std::int64_t horizon = 1'000'000;
  double mass_threshold = 1e-4;
  std::vector<double> alpha_grid;
  gallery_cmd->add_option("name", gallery_name)->required();
  gallery_cmd->add_option("--grid-y", grid_y);
  gallery_cmd->add_option("--alpha-grid", alpha_grid);
  gallery_cmd->add_option("--mass-threshold", mass_threshold);
  gallery_cmd->add_option("--k-blocks", k_blocks);
  gallery_cmd->add_option("--horizon", horizon);
  gallery_cmd->add_option("--base", base);
  gallery_cmd->add_option("--grid", grid);
  gallery_cmd->add_option("--emit-model", emit_model);
  gallery_cmd->add_option("--csv", csv_path);

  auto* check_cmd = app.add_subcommand("check", "property suite on one model");
  check_cmd->add_option("--model", model_path)->required();
  check_cmd->add_option("--horizons", horizons);
  check_cmd->add_option("--m-max", m_probe);
  check_cmd->add_option("--tol", tol);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  set_worker_threads(threads);
  try {
    if (values_cmd->parsed()) return run_values(model_path, n, lambdas, csv_path);
    if (wvalues_cmd->parsed()) return run_wvalues(model_path, n, m, tol, csv_path);
    if (vstar_cmd->parsed())
      return run_vstar(model_path, state, gap, csv_path, cert_path);
    if (chain_cmd->parsed())
      return run_chain(model_path, state, m_probe, horizons, csv_path);
    if (synth_cmd->parsed())
      return run_synth(model_path, state, alpha, out_path, csv_path);
    if (shorten_cmd->parsed())
      return run_shorten(model_path, play_path, epsilon, level, out_path);
    if (lift_mdp_cmd->parsed())
      return run_lift_mdp(spec_path, depth, delta, emit_model, values_n,
                          csv_path, uniform_gap);
    if (lift_pomdp_cmd->parsed())
      return run_lift_pomdp(spec_path, depth, delta, emit_model, values_n,
                            csv_path, theta);
    if (gallery_cmd->parsed())
      return run_gallery(gallery_name, grid_y, alpha_grid, mass_threshold,
                         k_blocks, horizon, base, grid, emit_model, csv_path);
    if (check_cmd->parsed()) return run_check(model_path, horizons, m_probe, tol);
  } catch (const BudgetError& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return kExitBudget;
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
