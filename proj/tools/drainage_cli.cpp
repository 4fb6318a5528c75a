// Batch interface to the simulator: one subcommand per experiment family,
// JSON (default) or CSV output, deterministic under a fixed seed. Exit codes:
// 0 success, 2 invalid configuration, 3 budget exceeded, 4 internal error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "drainage/analytic_laws.hpp"
#include "drainage/clt_harness.hpp"
#include "drainage/coalescence.hpp"
#include "drainage/coupling.hpp"
#include "drainage/forest_census.hpp"
#include "drainage/step_law.hpp"

using nlohmann::json;
using namespace drainage;

namespace {

struct Emitted {
  json doc;
  std::vector<std::pair<std::string, std::string>> csv_rows;  // (key or row, value)
  std::vector<std::string> plot_lines;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

Emitted run_step_law(int dim, double p, const std::vector<int>& moments, double tail) {
  ModelParams params(dim, p);
  StepLaw law(params, truncation_radius(params.displacement_dim(), p, tail));
  Emitted out;
  out.doc["k_max"] = law.k_max();
  out.doc["tail_mass"] = law.tail_mass();
  json shells = json::array();
  for (int k = 0; k <= law.k_max(); ++k) shells.push_back(law.shell_probability(k));
  out.doc["shell_probabilities"] = shells;
  json ms;
  for (int i : moments) {
    double m = step_moment(params, i);
    ms["m_" + std::to_string(i)] = m;
    out.csv_rows.emplace_back("m_" + std::to_string(i), fmt(m));
  }
  out.doc["moments"] = ms;
  for (int k = 0; k <= law.k_max(); ++k)
    out.plot_lines.push_back(std::to_string(k) + " " + fmt(law.shell_probability(k)));
  return out;
}

Emitted run_degree_law(double p, int cap, int offsets) {
  auto law = degree_pmf(p, cap);
  Emitted out;
  out.doc["pmf"] = law.pmf;
  out.doc["residual"] = law.residual;
  out.doc["mean"] = law.mean_recomputed;
  out.csv_rows.emplace_back("mean", fmt(law.mean_recomputed));
  out.csv_rows.emplace_back("residual", fmt(law.residual));

  json offs = json::array();
  double conservation = p;
  for (std::int64_t l = 1;; ++l) {
    auto ol = edge_offset_pmf(p, l);
    if (l <= offsets) {
      offs.push_back({{"l", l},
                      {"q", ol.q},
                      {"q_verbatim", ol.q_verbatim},
                      {"pmf", {ol.pmf[0], ol.pmf[1], ol.pmf[2]}}});
    }
    conservation += 2.0 * ol.q;
    if (ol.q < 1e-18 && l > offsets) break;
  }
  out.doc["offset_laws"] = offs;
  out.doc["conservation"] = conservation;
  for (std::size_t k = 1; k < law.pmf.size(); ++k) {
    out.csv_rows.emplace_back("p_degree_" + std::to_string(k), fmt(law.pmf[k]));
    out.plot_lines.push_back(std::to_string(k) + " " + fmt(law.pmf[k]));
  }
  return out;
}

Emitted run_forest(int dim, double p, int n, std::uint64_t seed, int depth, int offsets) {
  ModelParams params(dim, p);
  ForestWindow w(params, n, seed);
  if (depth < 0) depth = n;
  Emitted out;
  out.doc["margin"] = w.margin();
  std::int64_t open = open_vertex_count(w);
  out.doc["open_vertices"] = open;
  auto hist = degree_histogram(w);
  json dh = json::array();
  double mean_degree = 0.0;
  for (std::size_t nu = 0; nu < hist.size(); ++nu) {
    dh.push_back(hist[nu]);
    mean_degree += static_cast<double>(nu + 1) * static_cast<double>(hist[nu]);
  }
  if (open > 0) mean_degree /= static_cast<double>(open);
  out.doc["degree_histogram"] = dh;
  out.doc["mean_degree"] = mean_degree;
  out.doc["edge_count"] = edge_count(w);
  json el = json::array();
  for (std::int64_t l = 1; l <= w.margin() + 1; ++l)
    el.push_back({{"l", l}, {"count", edge_length_count(w, l)}});
  out.doc["edge_length_histogram"] = el;
  out.doc["tree_count"] = tree_count(w, depth);
  out.doc["census_depth"] = depth;
  if (params.d == 2) {
    json oc = json::array();
    for (std::int64_t l = 1; l <= offsets; ++l)
      oc.push_back({{"l", l}, {"multiplicity_counts", up_edge_offset_census(w, l)}});
    out.doc["offset_census"] = oc;
  }
  out.csv_rows.emplace_back("open_vertices", std::to_string(open));
  out.csv_rows.emplace_back("mean_degree", fmt(mean_degree));
  out.csv_rows.emplace_back("tree_count", std::to_string(tree_count(w, depth)));
  for (std::size_t nu = 0; nu < hist.size(); ++nu) {
    double f = open > 0 ? static_cast<double>(hist[nu]) / static_cast<double>(open) : 0.0;
    out.plot_lines.push_back(std::to_string(nu + 1) + " " + fmt(f));
  }
  return out;
}

Emitted run_coalesce(int dim, double p, std::int64_t sep, int horizon, int replicas,
                     std::uint64_t seed) {
  ModelParams params(dim, p);
  LatticePoint separation(params.displacement_dim());
  separation[0] = sep;
  auto est = meeting_probability(params, separation, horizon, replicas, seed);
  Emitted out;
  out.doc["meeting"] = {{"value", est.value},
                        {"std_error", est.std_error},
                        {"successes", est.successes},
                        {"trials", est.trials}};
  out.csv_rows.emplace_back("meeting_probability", fmt(est.value));
  out.csv_rows.emplace_back("std_error", fmt(est.std_error));
  return out;
}

Emitted run_couple(int dim, double p, std::int64_t sep, int replicas, std::uint64_t seed,
                   const std::string& event, int n, double epsilon, std::int64_t start_sep) {
  ModelParams params(dim, p);
  Emitted out;
  if (event.empty()) {
    auto de = decoupling_probability(params, sep, replicas, seed);
    out.doc["mode"] = "decoupling";
    out.doc["decoupling"] = {{"value", de.empirical.value},
                             {"std_error", de.empirical.std_error},
                             {"successes", de.empirical.successes},
                             {"trials", de.empirical.trials},
                             {"analytic_bound", de.analytic_bound},
                             {"loose_bound", de.loose_bound},
                             {"separation", de.separation}};
    out.csv_rows.emplace_back("decoupling_probability", fmt(de.empirical.value));
    out.csv_rows.emplace_back("analytic_bound", fmt(de.analytic_bound));
  } else {
    LatticePoint v(params.displacement_dim());
    v[0] = start_sep;
    auto est = event_probability(params, n, epsilon, parse_walk_event(event[0]), replicas, seed, v);
    out.doc["mode"] = "event";
    out.doc["event"] = {{"kind", event},
                        {"n", est.n},
                        {"epsilon", est.epsilon},
                        {"close_approach_radius", est.close_approach_radius},
                        {"value", est.probability.value},
                        {"std_error", est.probability.std_error}};
    out.csv_rows.emplace_back("event_probability", fmt(est.probability.value));
  }
  return out;
}

Emitted run_ancestors(int dim, double p, std::int64_t level, std::vector<int> orders,
                      std::int64_t half_width, std::uint64_t seed, int branching_order,
                      int branching_replicas) {
  ModelParams params(dim, p);
  auto ac = ancestor_census(params, level, orders, half_width, seed);
  Emitted out;
  out.doc["level"] = ac.level;
  out.doc["half_width"] = ac.half_width;
  json counts = json::array();
  double sites = static_cast<double>(2 * half_width + 1);
  for (auto& [order, count] : ac.counts) {
    double density = static_cast<double>(count) / sites;
    counts.push_back({{"order", order}, {"count", count}, {"density", density}});
    out.csv_rows.emplace_back("count_order_" + std::to_string(order), std::to_string(count));
    out.plot_lines.push_back(std::to_string(order) + " " + fmt(density));
  }
  out.doc["counts"] = counts;
  if (branching_order > 0) {
    json reps = json::array();
    int holds = 0;
    for (int r = 0; r < branching_replicas; ++r) {
      auto bs = branching_stats(params, branching_order, half_width,
                                replica_seed(seed, static_cast<std::uint64_t>(r)));
      reps.push_back({{"r0", bs.r0},
                      {"r1", bs.r1},
                      {"r0_branching", bs.r0_branching},
                      {"inequality_holds", bs.inequality_holds}});
      if (bs.inequality_holds) ++holds;
    }
    out.doc["branching"] = {{"order", branching_order},
                            {"replicas", branching_replicas},
                            {"inequality_held", holds},
                            {"samples", reps}};
    out.csv_rows.emplace_back("branching_inequality_held",
                              std::to_string(holds) + "/" + std::to_string(branching_replicas));
  }
  return out;
}

Emitted run_clt(int dim, double p, int n, int replicas, const std::string& kind, std::int64_t index,
                std::uint64_t seed, int s2_lag, int s2_replicas) {
  ModelParams params(dim, p);
  StatKind sk = kind == "edge" ? StatKind::kEdgeLengthCount : StatKind::kDegreeCount;
  auto sample = run_replicas(params, n, sk, index, replicas, seed);
  auto rep = normality_report(sample);
  Emitted out;
  out.doc["kind"] = kind;
  out.doc["index"] = index;
  out.doc["report"] = {{"replicas", rep.replicas},
                       {"mean", rep.mean},
                       {"variance", rep.variance},
                       {"fitted_scale", rep.fitted_scale},
                       {"skewness", rep.skewness},
                       {"excess_kurtosis", rep.excess_kurtosis},
                       {"ks_distance", rep.ks_distance},
                       {"has_verdict", rep.has_verdict},
                       {"skewness_ok", rep.skewness_ok},
                       {"kurtosis_ok", rep.kurtosis_ok},
                       {"ks_ok", rep.ks_ok},
                       {"normal_verdict", rep.normal_verdict}};
  out.csv_rows.emplace_back("mean", fmt(rep.mean));
  out.csv_rows.emplace_back("skewness", fmt(rep.skewness));
  out.csv_rows.emplace_back("excess_kurtosis", fmt(rep.excess_kurtosis));
  out.csv_rows.emplace_back("ks_distance", fmt(rep.ks_distance));
  out.csv_rows.emplace_back("normal_verdict", rep.normal_verdict ? "1" : "0");
  for (double z : rep.standardized) out.plot_lines.push_back(fmt(z));
  if (s2_lag > 0) {
    auto s2 = estimate_s2(params, n, static_cast<int>(index), s2_lag, s2_replicas, seed + 1);
    out.doc["s2"] = {{"var_term", s2.var_term},
                     {"horizontal_term", s2.horizontal_term},
                     {"up_term", s2.up_term},
                     {"down_term", s2.down_term},
                     {"total", s2.total.mean},
                     {"std_error", s2.total.std_error},
                     {"lag_cap", s2.lag_cap}};
    out.csv_rows.emplace_back("s2_total", fmt(s2.total.mean));
  }
  return out;
}

int emit(const Emitted& out, json config, const std::string& format, const std::string& output_path,
         const std::string& plot_path) {
  json doc = out.doc;
  doc["config"] = std::move(config);

  std::string payload;
  if (format == "json") {
    payload = doc.dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << "key,value\n";
    for (const auto& [k, v] : out.csv_rows) os << k << "," << v << "\n";
    payload = os.str();
  }
  if (output_path.empty()) {
    std::cout << payload;
  } else {
    std::ofstream f(output_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output path: " + output_path);
    f << payload;
  }
  if (!plot_path.empty()) {
    std::ofstream f(plot_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open plot path: " + plot_path);
    for (const auto& line : out.plot_lines) f << line << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"drainage-network lattice simulator"};
  app.require_subcommand(1);

  std::string format = "json", output_path, plot_path;
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--output", output_path, "write the result to this file instead of stdout");
  app.add_option("--plot", plot_path, "also write plain columnar plot data to this file");
  app.fallthrough();

  int dim = 2, n = 64, replicas = 1000, horizon = 1000, cap = 64, offsets = 10, depth = -1;
  double p = 0.5, epsilon = 0.25, tail = 1e-12;
  std::int64_t sep = 1, level = 0, half_width = 256, index = 1, start_sep = 3;
  std::uint64_t seed = 1;
  int event_n = 4, branching_order = 0, branching_replicas = 20, s2_lag = 0, s2_replicas = 100;
  std::vector<int> moments{0, 2};
  std::vector<int> orders{8, 32, 128};
  std::string event, kind = "degree";

  auto* sl = app.add_subcommand("step-law", "one-step displacement law and its moments");
  sl->add_option("--dim", dim);
  sl->add_option("--p", p);
  sl->add_option("--moments", moments)->delimiter(',');
  sl->add_option("--tail", tail);

  auto* dl = app.add_subcommand("degree-law", "closed-form degree and edge-offset laws (d = 2)");
  dl->add_option("--p", p);
  dl->add_option("--cap", cap);
  dl->add_option("--offsets", offsets);

  auto* fo = app.add_subcommand("forest", "window census: degrees, edge lengths, components");
  fo->add_option("--dim", dim);
  fo->add_option("--p", p);
  fo->add_option("--n", n);
  fo->add_option("--seed", seed);
  fo->add_option("--depth", depth);
  fo->add_option("--offsets", offsets);

  auto* co = app.add_subcommand("coalesce", "two-path meeting probability");
  co->add_option("--dim", dim);
  co->add_option("--p", p);
  co->add_option("--sep", sep);
  co->add_option("--horizon", horizon);
  co->add_option("--replicas", replicas);
  co->add_option("--seed", seed);

  auto* cp = app.add_subcommand("couple", "walk/tree coupling probes");
  cp->add_option("--dim", dim);
  cp->add_option("--p", p);
  cp->add_option("--sep", sep);
  cp->add_option("--replicas", replicas);
  cp->add_option("--seed", seed);
  cp->add_option("--event", event)->check(CLI::IsMember({"B", "E", "F", "G"}));
  cp->add_option("--n", event_n);
  cp->add_option("--epsilon", epsilon);
  cp->add_option("--start-sep", start_sep);

  auto* an = app.add_subcommand("ancestors", "finite-order ancestor census and branching stats");
  an->add_option("--dim", dim);
  an->add_option("--p", p);
  an->add_option("--level", level);
  an->add_option("--orders", orders)->delimiter(',');
  an->add_option("--half-width", half_width);
  an->add_option("--seed", seed);
  an->add_option("--branching-order", branching_order);
  an->add_option("--branching-replicas", branching_replicas);

  auto* cl = app.add_subcommand("clt", "replica normality diagnostics for window statistics");
  cl->add_option("--dim", dim);
  cl->add_option("--p", p);
  cl->add_option("--n", n);
  cl->add_option("--replicas", replicas);
  cl->add_option("--kind", kind)->check(CLI::IsMember({"degree", "edge"}));
  cl->add_option("--index", index);
  cl->add_option("--seed", seed);
  cl->add_option("--s2-lag", s2_lag);
  cl->add_option("--s2-replicas", s2_replicas);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  json config = {{"format", format}};
  Emitted out;
  try {
    if (sl->parsed()) {
      config.update({{"subcommand", "step-law"}, {"dim", dim}, {"p", p}, {"moments", moments},
                     {"tail", tail}});
      out = run_step_law(dim, p, moments, tail);
    } else if (dl->parsed()) {
      config.update({{"subcommand", "degree-law"}, {"p", p}, {"cap", cap}, {"offsets", offsets}});
      out = run_degree_law(p, cap, offsets);
    } else if (fo->parsed()) {
      config.update({{"subcommand", "forest"}, {"dim", dim}, {"p", p}, {"n", n}, {"seed", seed},
                     {"depth", depth}, {"offsets", offsets}});
      out = run_forest(dim, p, n, seed, depth, offsets);
    } else if (co->parsed()) {
      config.update({{"subcommand", "coalesce"}, {"dim", dim}, {"p", p}, {"sep", sep},
                     {"horizon", horizon}, {"replicas", replicas}, {"seed", seed}});
      out = run_coalesce(dim, p, sep, horizon, replicas, seed);
    } else if (cp->parsed()) {
      config.update({{"subcommand", "couple"}, {"dim", dim}, {"p", p}, {"sep", sep},
                     {"replicas", replicas}, {"seed", seed}, {"event", event}, {"n", event_n},
                     {"epsilon", epsilon}, {"start_sep", start_sep}});
      out = run_couple(dim, p, sep, replicas, seed, event, event_n, epsilon, start_sep);
    } else if (an->parsed()) {
      config.update({{"subcommand", "ancestors"}, {"dim", dim}, {"p", p}, {"level", level},
                     {"orders", orders}, {"half_width", half_width}, {"seed", seed},
                     {"branching_order", branching_order},
                     {"branching_replicas", branching_replicas}});
      out = run_ancestors(dim, p, level, orders, half_width, seed, branching_order,
                          branching_replicas);
    } else if (cl->parsed()) {
      config.update({{"subcommand", "clt"}, {"dim", dim}, {"p", p}, {"n", n},
                     {"replicas", replicas}, {"kind", kind}, {"index", index}, {"seed", seed},
                     {"s2_lag", s2_lag}, {"s2_replicas", s2_replicas}});
      out = run_clt(dim, p, n, replicas, kind, index, seed, s2_lag, s2_replicas);
    }
    return emit(out, std::move(config), format, output_path, plot_path);
  } catch (const BudgetExceeded& e) {
    std::cout << json{{"error", {{"kind", "budget"}, {"message", e.what()}}}}.dump() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cout << json{{"error", {{"kind", "validation"}, {"message", e.what()}}}}.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cout << json{{"error", {{"kind", "internal"}, {"message", e.what()}}}}.dump() << "\n";
    return 4;
  }
}
