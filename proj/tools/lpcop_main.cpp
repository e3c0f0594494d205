// Command-line front end: CSV in, JSON/TSV out, one subcommand per
// estimator. All outputs are byte-stable given identical inputs and seeds.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lpcop/lpcop.hpp"

namespace {

struct CommonOpts {
  std::string path;
  std::string x_col, y_col;
  std::size_t m = 4;
  bool denoise = true;
  std::string out;
  std::string format = "json";
  std::vector<std::string> categories;
};

lpcop::CategoryOrders parse_categories(const std::vector<std::string>& specs) {
  lpcop::CategoryOrders orders;
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
      throw CLI::ValidationError("--categories expects NAME=a<b<c");
    }
    const std::string col = spec.substr(0, eq);
    std::vector<std::string> cats;
    std::string cur;
    for (char ch : spec.substr(eq + 1)) {
      if (ch == '<') {
        cats.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    cats.push_back(cur);
    orders[col] = cats;
  }
  return orders;
}

void write_output(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write file: " + out);
    f << text;
  }
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

lpcop::CopulaModel fit_from_csv(const CommonOpts& o,
                                std::vector<double>* x_out = nullptr,
                                std::vector<double>* y_out = nullptr) {
  const lpcop::Dataset ds =
      lpcop::ingest(o.path, parse_categories(o.categories));
  const auto& x = ds.column(o.x_col);
  const auto& y = ds.column(o.y_col);
  if (x_out) *x_out = x;
  if (y_out) *y_out = y;
  return lpcop::fit_copula(x, y, o.m, o.denoise);
}

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_xy = true) {
  cmd->add_option("data", o.path, "input CSV file with header")->required();
  if (needs_xy) {
    cmd->add_option("--x", o.x_col, "X column name")->required();
    cmd->add_option("--y", o.y_col, "Y column name")->required();
  }
  cmd->add_option("--m", o.m, "basis degree (default 4)");
  cmd->add_flag("--denoise,!--no-denoise", o.denoise,
                "apply the BIC selection step (default on)");
  cmd->add_option("--out", o.out, "output file (default stdout)");
  cmd->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"json", "tsv", "matrix"}));
  cmd->add_option("--categories", o.categories,
                  "ordinal column spec NAME=a<b<c (repeatable)");
}

lpcop::CopulaFamily family_from_flags(const std::string& name, double param,
                                      double dof, double l1, double l2,
                                      const std::string& base_name,
                                      double base_param) {
  using namespace lpcop;
  auto make = [&](const std::string& nm, double th) -> CopulaFamily {
    if (nm == "independence") return independence_copula();
    if (nm == "gaussian") return gaussian_copula(th);
    if (nm == "studentt") return student_t_copula(th, dof);
    if (nm == "frank") return frank_copula(th);
    if (nm == "clayton") return clayton_copula(th);
    if (nm == "plackett") return plackett_copula(th);
    if (nm == "amh") return amh_copula(th);
    if (nm == "joe") return joe_copula(th);
    if (nm == "gumbel") return gumbel_copula(th);
    throw CLI::ValidationError("unknown family: " + nm);
  };
  if (name == "khoudraji") {
    return khoudraji_copula(make(base_name, base_param), l1, l2);
  }
  return make(name, param);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LP copula estimation toolkit"};
  app.require_subcommand(1);

  // fit ------------------------------------------------------------------
  CommonOpts fit_o;
  std::size_t fit_grid = 0;
  bool fit_clip = false;
  auto* cmd_fit = app.add_subcommand(
      "fit", "fit the copula model; emits comeans or a density grid");
  add_common(cmd_fit, fit_o);
  cmd_fit->add_option("--grid", fit_grid,
                      "emit an LxL density grid instead of comeans");
  cmd_fit->add_flag("--clip", fit_clip,
                    "clip the density at zero and renormalize");

  // basis ----------------------------------------------------------------
  CommonOpts basis_o;
  std::string basis_col;
  auto* cmd_basis = app.add_subcommand(
      "basis", "dump the per-margin score table as TSV");
  cmd_basis->add_option("data", basis_o.path, "input CSV file")->required();
  cmd_basis->add_option("--col", basis_col, "column name")->required();
  cmd_basis->add_option("--m", basis_o.m, "basis degree (default 4)");
  cmd_basis->add_option("--out", basis_o.out, "output file");
  cmd_basis->add_option("--categories", basis_o.categories,
                        "ordinal column spec NAME=a<b<c");

  // infor / sym / spearman / maxcorr --------------------------------------
  CommonOpts infor_o;
  auto* cmd_infor =
      app.add_subcommand("infor", "LPINFOR dependence test");
  add_common(cmd_infor, infor_o);
  infor_o.denoise = false;  // raw statistic is the calibrated default

  CommonOpts sym_o;
  auto* cmd_sym = app.add_subcommand("sym", "copula symmetry test");
  add_common(cmd_sym, sym_o);

  CommonOpts sp_o;
  auto* cmd_sp =
      app.add_subcommand("spearman", "generalized Spearman correlation");
  add_common(cmd_sp, sp_o);

  CommonOpts mc_o;
  auto* cmd_mc = app.add_subcommand(
      "maxcorr", "LP-maximal correlation and optimal transformations");
  add_common(cmd_mc, mc_o);

  // tree -------------------------------------------------------------------
  CommonOpts tree_o;
  std::vector<std::string> tree_cols;
  auto* cmd_tree = app.add_subcommand(
      "tree", "dependence tree over several columns");
  cmd_tree->add_option("data", tree_o.path, "input CSV file")->required();
  cmd_tree->add_option("--cols", tree_cols, "column names (>= 2)")
      ->required()
      ->delimiter(',');
  cmd_tree->add_option("--m", tree_o.m, "basis degree");
  cmd_tree->add_flag("--denoise,!--no-denoise", tree_o.denoise, "");
  cmd_tree->add_option("--out", tree_o.out, "output file");
  cmd_tree->add_option("--categories", tree_o.categories, "");

  // simulate ---------------------------------------------------------------
  std::string sim_family = "independence", sim_base = "gaussian";
  double sim_param = 0.0, sim_dof = 5.0, sim_l1 = 0.5, sim_l2 = 0.7,
         sim_base_param = 0.0;
  std::size_t sim_n = 1000;
  std::uint64_t sim_seed = 1;
  std::string sim_out;
  auto* cmd_sim = app.add_subcommand(
      "simulate", "draw a copula sample and write it as CSV (u,v)");
  cmd_sim->add_option("--family", sim_family, "copula family")->required();
  cmd_sim->add_option("--param", sim_param, "family parameter");
  cmd_sim->add_option("--dof", sim_dof, "Student-t degrees of freedom");
  cmd_sim->add_option("--lambda1", sim_l1, "Khoudraji shape 1");
  cmd_sim->add_option("--lambda2", sim_l2, "Khoudraji shape 2");
  cmd_sim->add_option("--base", sim_base, "Khoudraji base family");
  cmd_sim->add_option("--base-param", sim_base_param, "Khoudraji base parameter");
  cmd_sim->add_option("--n", sim_n, "sample size")->required();
  cmd_sim->add_option("--seed", sim_seed, "random seed");
  cmd_sim->add_option("--out", sim_out, "output file (default stdout)");

  // bench --------------------------------------------------------------------
  std::string bench_family = "gaussian", bench_base = "gaussian";
  double bench_param = 0.7, bench_dof = 5.0, bench_l1 = 0.5, bench_l2 = 0.7,
         bench_base_param = 0.0;
  lpcop::BenchConfig bench_cfg;
  std::string bench_out, bench_format = "json";
  std::vector<std::size_t> timing_sizes;
  std::size_t timing_reps = 5;
  auto* cmd_bench = app.add_subcommand(
      "bench", "Monte-Carlo MIAE benchmark or timing table");
  cmd_bench->add_option("--family", bench_family, "copula family");
  cmd_bench->add_option("--param", bench_param, "family parameter");
  cmd_bench->add_option("--dof", bench_dof, "Student-t degrees of freedom");
  cmd_bench->add_option("--lambda1", bench_l1, "Khoudraji shape 1");
  cmd_bench->add_option("--lambda2", bench_l2, "Khoudraji shape 2");
  cmd_bench->add_option("--base", bench_base, "Khoudraji base family");
  cmd_bench->add_option("--base-param", bench_base_param, "");
  cmd_bench->add_option("--n", bench_cfg.n, "sample size per replication");
  cmd_bench->add_option("--B", bench_cfg.reps, "replication count");
  cmd_bench->add_option("--L", bench_cfg.grid, "evaluation grid size");
  cmd_bench->add_option("--m", bench_cfg.degree, "basis degree");
  cmd_bench->add_option("--seed", bench_cfg.seed, "master seed");
  cmd_bench->add_flag("--denoise,!--no-denoise", bench_cfg.denoise, "");
  cmd_bench->add_option("--threads", bench_cfg.threads,
                        "worker threads (0 = all cores)");
  cmd_bench->add_option("--out", bench_out, "output file");
  cmd_bench->add_option("--format", bench_format, "json or tsv table")
      ->check(CLI::IsMember({"json", "tsv"}));
  cmd_bench->add_option("--timing", timing_sizes,
                        "measure fit wall-clock for these sizes instead")
      ->delimiter(',');
  cmd_bench->add_option("--timing-reps", timing_reps, "repeats per size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    std::cerr << app.help() << "\n";
    return 2;
  }

  try {
    if (cmd_fit->parsed()) {
      lpcop::CopulaModel model = fit_from_csv(fit_o);
      if (fit_clip) model.enable_clipping(0.0);
      std::ostringstream os;
      if (fit_grid > 0) {
        const Eigen::MatrixXd grid = model.density_grid(fit_grid);
        const double L1 = static_cast<double>(fit_grid + 1);
        if (fit_o.format == "matrix") {
          for (Eigen::Index i = 0; i < grid.rows(); ++i) {
            for (Eigen::Index j = 0; j < grid.cols(); ++j) {
              os << (j ? "\t" : "") << fmt_double(grid(i, j));
            }
            os << "\n";
          }
        } else {
          os << "u\tv\tdensity\n";
          for (Eigen::Index i = 0; i < grid.rows(); ++i) {
            for (Eigen::Index j = 0; j < grid.cols(); ++j) {
              os << fmt_double((i + 1) / L1) << "\t" << fmt_double((j + 1) / L1)
                 << "\t" << fmt_double(grid(i, j)) << "\n";
            }
          }
        }
      } else {
        os << lpcop::to_json(model.comeans()).dump(2) << "\n";
      }
      write_output(fit_o.out, os.str());
    } else if (cmd_basis->parsed()) {
      const lpcop::Dataset ds =
          lpcop::ingest(basis_o.path, parse_categories(basis_o.categories));
      const auto& col = ds.column(basis_col);
      const lpcop::EmpiricalMargin margin = lpcop::fit_margin(col);
      const lpcop::LPBasis basis(
          margin, std::min(basis_o.m, margin.unique_count() - 1));
      std::ostringstream os;
      os << "value\tp\tmidcdf";
      for (std::size_t j = 1; j <= basis.effective_degree(); ++j) {
        os << "\tT" << j;
      }
      os << "\n";
      for (std::size_t i = 0; i < margin.unique_count(); ++i) {
        os << fmt_double(margin.values()[i]) << "\t"
           << fmt_double(margin.masses()[i]) << "\t"
           << fmt_double(margin.midcdf()[i]);
        for (std::size_t j = 1; j <= basis.effective_degree(); ++j) {
          os << "\t"
             << fmt_double(basis.table()(static_cast<Eigen::Index>(i),
                                         static_cast<Eigen::Index>(j - 1)));
        }
        os << "\n";
      }
      write_output(basis_o.out, os.str());
    } else if (cmd_infor->parsed()) {
      std::vector<double> x, y;
      const lpcop::CopulaModel model = fit_from_csv(infor_o, &x, &y);
      const lpcop::TestResult r =
          lpcop::lpinfor(model.comeans(), infor_o.denoise);
      write_output(infor_o.out, lpcop::to_json(r).dump(2) + "\n");
    } else if (cmd_sym->parsed()) {
      CommonOpts o = sym_o;
      o.denoise = false;  // symmetry statistic uses the raw coefficients
      const lpcop::CopulaModel model = fit_from_csv(o);
      const lpcop::TestResult r = lpcop::lpsym(model.comeans());
      write_output(o.out, lpcop::to_json(r).dump(2) + "\n");
    } else if (cmd_sp->parsed()) {
      const lpcop::Dataset ds =
          lpcop::ingest(sp_o.path, parse_categories(sp_o.categories));
      const lpcop::SpearmanResult r = lpcop::generalized_spearman(
          ds.column(sp_o.x_col), ds.column(sp_o.y_col));
      write_output(sp_o.out, lpcop::to_json(r).dump(2) + "\n");
    } else if (cmd_mc->parsed()) {
      std::vector<double> x, y;
      const lpcop::CopulaModel model = fit_from_csv(mc_o, &x, &y);
      const lpcop::MaxCorrelation r = lpcop::max_correlation(model, x, y);
      if (mc_o.format == "tsv") {
        std::ostringstream os;
        os << "side\tvalue\tscore\n";
        for (const auto& [xv, s] : r.phi_table) {
          os << "x\t" << fmt_double(xv) << "\t" << fmt_double(s) << "\n";
        }
        for (const auto& [yv, s] : r.psi_table) {
          os << "y\t" << fmt_double(yv) << "\t" << fmt_double(s) << "\n";
        }
        write_output(mc_o.out, os.str());
      } else {
        write_output(mc_o.out, lpcop::to_json(r).dump(2) + "\n");
      }
    } else if (cmd_tree->parsed()) {
      const lpcop::Dataset ds =
          lpcop::ingest(tree_o.path, parse_categories(tree_o.categories));
      std::vector<std::vector<double>> cols;
      for (const auto& name : tree_cols) cols.push_back(ds.column(name));
      const lpcop::TreeCopula tree =
          lpcop::fit_tree(cols, tree_o.m, tree_o.denoise);
      nlohmann::json j;
      j["nodes"] = tree_cols;
      j["edges"] = nlohmann::json::array();
      for (const auto& e : tree.edges) {
        j["edges"].push_back({{"i", e.i},
                              {"j", e.j},
                              {"weight", e.weight},
                              {"comeans", lpcop::to_json(e.model.comeans())}});
      }
      write_output(tree_o.out, j.dump(2) + "\n");
    } else if (cmd_sim->parsed()) {
      const lpcop::CopulaFamily fam =
          family_from_flags(sim_family, sim_param, sim_dof, sim_l1, sim_l2,
                            sim_base, sim_base_param);
      const auto draws = lpcop::sample(fam, sim_n, sim_seed);
      std::ostringstream os;
      os << "u,v\n";
      for (const auto& [u, v] : draws) {
        os << fmt_double(u) << "," << fmt_double(v) << "\n";
      }
      write_output(sim_out, os.str());
    } else if (cmd_bench->parsed()) {
      if (!timing_sizes.empty()) {
        const auto rows =
            lpcop::run_timing(timing_sizes, timing_reps, bench_cfg.degree,
                              bench_cfg.seed);
        std::ostringstream os;
        if (bench_format == "tsv") {
          os << "n\tseconds\n";
          for (const auto& r : rows) {
            os << r.n << "\t" << fmt_double(r.seconds) << "\n";
          }
        } else {
          nlohmann::json j = nlohmann::json::array();
          for (const auto& r : rows) {
            j.push_back({{"n", r.n}, {"seconds", r.seconds}});
          }
          os << j.dump(2) << "\n";
        }
        write_output(bench_out, os.str());
      } else {
        bench_cfg.family =
            family_from_flags(bench_family, bench_param, bench_dof, bench_l1,
                              bench_l2, bench_base, bench_base_param);
        const lpcop::BenchReport report = lpcop::run_miae(bench_cfg);
        std::ostringstream os;
        if (bench_format == "tsv") {
          os << "family\tn\tB\tL\tm\tmiae_mean\tmiae_stderr\tseconds_per_fit\n"
             << bench_cfg.family.name() << "\t" << bench_cfg.n << "\t"
             << bench_cfg.reps << "\t" << bench_cfg.grid << "\t"
             << bench_cfg.degree << "\t" << fmt_double(report.miae_mean)
             << "\t" << fmt_double(report.miae_stderr) << "\t"
             << fmt_double(report.seconds_per_fit) << "\n";
        } else {
          os << lpcop::to_json(report).dump(2) << "\n";
        }
        write_output(bench_out, os.str());
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
