// engelgrad command-line front end.
//
//   engelgrad analyze --poly 'x1^2/2 + x1*x2 + x2*x4' --box=-2,2,-2,2,-2,2,-2,2
//   engelgrad flow --poly-file f.txt --seeds 20 --format csv --out runs/
//
// Exit codes: 0 all certificates true / success, 2 a certificate is false or
// the repair failed, 1 operational error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "engelgrad/flow.hpp"
#include "engelgrad/genericity.hpp"
#include "engelgrad/report.hpp"

namespace fs = std::filesystem;
using namespace engelgrad;

namespace {

struct RunConfig {
  std::string poly;
  std::string poly_file;
  std::string box = "-2,2,-2,2,-2,2,-2,2";
  int grid = 6;
  int system_grid = 5;
  int seeds = 10;
  std::uint64_t seed = 1;
  double refine_tol = 1e-9;
  double rank_tol = 1e-6;
  double claim_tol = 1e-7;
  double fiber_tol = 1e-7;
  double collar = 1e-2;
  double gamma0 = 1e-2;
  int loja_points = 400;
  double t_max = 1e3;
  std::string start;
  std::string direction = "descent";
  std::string out;
  std::string format = "json";
};

std::vector<double> parse_reals(const std::string& text, std::size_t count, const char* what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used == 0 || used != item.size()) throw std::invalid_argument(std::string("malformed number in ") + what);
    v.push_back(x);
  }
  if (v.size() != count)
    throw std::invalid_argument(std::string(what) + " needs " + std::to_string(count) + " comma-separated reals");
  return v;
}

Box parse_box(const std::string& text) {
  auto v = parse_reals(text, 8, "--box");
  Point4 lo, hi;
  for (int i = 0; i < 4; ++i) {
    lo[i] = v[2 * i];
    hi[i] = v[2 * i + 1];
  }
  return Box(lo, hi);
}

Poly4 load_poly(const RunConfig& cfg) {
  if (cfg.poly.empty() == cfg.poly_file.empty()) throw std::invalid_argument("give exactly one of --poly, --poly-file");
  if (!cfg.poly.empty()) return parse_poly(cfg.poly);
  std::ifstream in(cfg.poly_file);
  if (!in) throw std::runtime_error("cannot read " + cfg.poly_file);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_poly(ss.str());
}

void validate(const RunConfig& cfg) {
  for (double t : {cfg.refine_tol, cfg.rank_tol, cfg.claim_tol, cfg.fiber_tol, cfg.collar, cfg.gamma0, cfg.t_max})
    if (!(t > 0.0)) throw std::invalid_argument("tolerance overrides must be positive");
  if (cfg.grid < 2 || cfg.system_grid < 2) throw std::invalid_argument("grid resolutions must be at least 2");
  if (cfg.seeds < 1) throw std::invalid_argument("--seeds must be at least 1");
  if (cfg.format != "json" && cfg.format != "csv") throw std::invalid_argument("--format must be json or csv");
}

VarietyOptions variety_options(const RunConfig& cfg) {
  VarietyOptions vo;
  vo.tol.refine_tol = cfg.refine_tol;
  vo.tol.rank_tol = cfg.rank_tol;
  vo.tol.claim_tol = cfg.claim_tol;
  vo.tol.fiber_tol = cfg.fiber_tol;
  vo.grid_res = cfg.grid;
  vo.system_grid = cfg.system_grid;
  return vo;
}

void emit(const RunConfig& cfg, const std::string& text, const std::string& name = "report.json") {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  fs::path p = cfg.out;
  if (cfg.format == "csv") {
    fs::create_directories(p);
    p /= name;
  }
  std::ofstream o(p, std::ios::binary);
  if (!o) throw std::runtime_error("cannot write " + p.string());
  o << text;
}

int cmd_analyze(const RunConfig& cfg) {
  const Poly4 f = load_poly(cfg);
  const Box box = parse_box(cfg.box);
  CertifyOptions co;
  co.variety = variety_options(cfg);
  const CertificateReport rep = certify(f, box, co);
  Json j = report_header(f, box);
  j["command"] = "analyze";
  j["certificates"] = to_json(rep);
  Json comps = Json::array();
  for (const auto& c : rep.components) comps.push_back(to_json(c));
  j["gamma"] = comps;
  j["omega"] = to_json(rep.omega);
  j["critical_points"] = to_json(rep.critical);
  emit(cfg, j.dump(2) + "\n");
  return rep.all_pass() ? 0 : 2;
}

int cmd_gamma(const RunConfig& cfg) {
  const Poly4 f = load_poly(cfg);
  const Box box = parse_box(cfg.box);
  TraceDiagnostics diag;
  auto comps = trace_gamma(f, box, variety_options(cfg), &diag);
  Json j = report_header(f, box);
  j["command"] = "gamma";
  Json arr = Json::array();
  for (const auto& c : comps) arr.push_back(to_json(c));
  j["gamma"] = arr;
  j["trace"] = Json{{"seeds", diag.seeds}, {"converged_seeds", diag.converged_seeds}, {"min_sigma3", diag.min_sigma3}};
  emit(cfg, j.dump(2) + "\n");
  return 0;
}

FlowConfig flow_config(const RunConfig& cfg) {
  FlowConfig fc;
  fc.t_max = cfg.t_max;
  fc.vf_grid = cfg.grid;
  fc.tol = variety_options(cfg).tol;
  if (cfg.direction == "ascent") fc.direction = FlowDirection::Ascent;
  else if (cfg.direction != "descent") throw std::invalid_argument("--direction must be ascent or descent");
  return fc;
}

int cmd_flow(const RunConfig& cfg) {
  const Poly4 f = load_poly(cfg);
  const Box box = parse_box(cfg.box);
  Json j = report_header(f, box);
  j["command"] = "flow";

  if (!cfg.start.empty()) {
    auto v = parse_reals(cfg.start, 4, "--start");
    const Trajectory tr = integrate(f, Point4(v[0], v[1], v[2], v[3]), box, flow_config(cfg));
    if (cfg.format == "csv") {
      emit(cfg, trajectory_csv(tr), "trajectory.csv");
      return 0;
    }
    const LimitReport lim = limit_analysis(tr, {}, 1e-5);
    TrajectorySummary sm;
    sm.start = tr.samples.front().x;
    sm.direction = tr.direction;
    sm.termination = tr.termination;
    sm.limit = lim;
    sm.l_g = tr.l_g;
    sm.l_delta = tr.l_delta;
    sm.monotonicity_violation = monotonicity_violation(tr);
    sm.horizontality = tr.max_horizontality;
    sm.revisit = revisit_detected(tr, 1e-6, 1e-3);
    sm.samples = tr.samples.size();
    j["flows"] = Json::array({to_json(sm)});
    emit(cfg, j.dump(2) + "\n");
    return 0;
  }

  FlowBatchConfig bc;
  bc.flow = flow_config(cfg);
  bc.seed = cfg.seed;
  bc.collar = cfg.collar;
  bc.loja_points = cfg.loja_points;
  bc.keep_trajectories = cfg.format == "csv";
  const FlowBatch batch = batch_flow(f, box, cfg.seeds, bc);
  j["flows"] = Json::array({to_json(batch)});
  if (batch.loja) j["loja"] = to_json(*batch.loja);
  if (cfg.format == "csv") {
    for (std::size_t k = 0; k < batch.trajectories.size(); ++k) {
      char name[64];
      std::snprintf(name, sizeof name, "trajectory_%04zu_%s.csv", k / 2,
                    to_string(batch.trajectories[k].direction).c_str());
      emit(cfg, trajectory_csv(batch.trajectories[k]), name);
    }
  }
  emit(cfg, j.dump(2) + "\n");
  return 0;
}

int cmd_loja(const RunConfig& cfg) {
  const Poly4 f = load_poly(cfg);
  const Box box = parse_box(cfg.box);
  const VarietyOptions vo = variety_options(cfg);
  const VfSample sample = sample_vf(f, box, cfg.grid, vo);
  const LojaEstimate est = estimate_loja(f, box, sample, cfg.loja_points, cfg.collar, cfg.seed, vo.tol);
  Json j = report_header(f, box);
  j["command"] = "loja";
  j["loja"] = to_json(est);
  emit(cfg, j.dump(2) + "\n");
  return 0;
}

int cmd_repair(const RunConfig& cfg) {
  const Poly4 f = load_poly(cfg);
  const Box box = parse_box(cfg.box);
  RepairOptions ro;
  ro.certify.variety = variety_options(cfg);
  ro.seed = cfg.seed;
  const RepairResult res = repair_loop(f, box, cfg.gamma0, ro);
  Json j = report_header(f, box);
  j["command"] = "repair";
  j["repair"] = to_json(res);
  j["certificates"] = to_json(res.final_report);
  emit(cfg, j.dump(2) + "\n");
  return res.success ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Horizontal gradients of polynomials on the Engel group"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&cfg](CLI::App* sub) {
    sub->add_option("--poly", cfg.poly, "polynomial in x1..x4, e.g. 'x1^2/2 + x2*x4'");
    sub->add_option("--poly-file", cfg.poly_file, "file holding the polynomial text");
    sub->add_option("--box", cfg.box, "a1,b1,a2,b2,a3,b3,a4,b4")->capture_default_str();
    sub->add_option("--grid", cfg.grid, "seeding lattice points per axis")->capture_default_str();
    sub->add_option("--system-grid", cfg.system_grid, "lattice for the finite systems")->capture_default_str();
    sub->add_option("--seeds", cfg.seeds, "flow start points")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "root random seed")->capture_default_str();
    sub->add_option("--tol-refine", cfg.refine_tol)->capture_default_str();
    sub->add_option("--tol-rank", cfg.rank_tol)->capture_default_str();
    sub->add_option("--tol-claim", cfg.claim_tol)->capture_default_str();
    sub->add_option("--tol-fiber", cfg.fiber_tol)->capture_default_str();
    sub->add_option("--tol-collar", cfg.collar)->capture_default_str();
    sub->add_option("--tol-gamma0", cfg.gamma0)->capture_default_str();
    sub->add_option("--out", cfg.out, "output file (json) or directory (csv); stdout if omitted");
    sub->add_option("--format", cfg.format, "json or csv")->capture_default_str();
  };

  CLI::App* analyze = app.add_subcommand("analyze", "genericity certificates");
  CLI::App* gamma = app.add_subcommand("gamma", "trace and classify Gamma_f");
  CLI::App* flow = app.add_subcommand("flow", "horizontal gradient trajectories");
  CLI::App* loja = app.add_subcommand("loja", "Lojasiewicz constants");
  CLI::App* repair = app.add_subcommand("repair", "perturb away fiber-contained components");
  for (CLI::App* s : {analyze, gamma, flow, loja, repair}) common(s);
  flow->add_option("--start", cfg.start, "single start point x1,x2,x3,x4");
  flow->add_option("--direction", cfg.direction, "ascent or descent (single start)")->capture_default_str();
  flow->add_option("--t-max", cfg.t_max)->capture_default_str();
  flow->add_option("--loja-points", cfg.loja_points)->capture_default_str();
  loja->add_option("--points", cfg.loja_points)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    validate(cfg);
    if (analyze->parsed()) return cmd_analyze(cfg);
    if (gamma->parsed()) return cmd_gamma(cfg);
    if (flow->parsed()) return cmd_flow(cfg);
    if (loja->parsed()) return cmd_loja(cfg);
    if (repair->parsed()) return cmd_repair(cfg);
  } catch (const std::exception& e) {
    std::cerr << "engelgrad: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
