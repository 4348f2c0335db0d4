#include <CLI11.hpp>
#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dascof/experiments.hpp"
#include "dascof/integer_search.hpp"
#include "dascof/scheduling.hpp"

namespace {

using namespace dascof;

Eigen::VectorXd parse_vector(const std::string& csv, const std::string& what) {
  std::vector<double> vals;
  std::istringstream is(csv);
  for (std::string item; std::getline(is, item, ',');) {
    try {
      vals.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError(what + ": expected comma-separated numbers, got '" + csv + "'");
    }
  }
  if (vals.empty()) throw ConfigError(what + ": empty vector");
  return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

Eigen::MatrixXd read_matrix(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw IoError("cannot open matrix file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(file, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("matrix file '" + path + "' holds no rows");
  const auto cols = rows.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw IoError("matrix file '" + path + "': ragged rows");
    for (std::size_t j = 0; j < cols; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

void print_report(const RateReport& rep) {
  std::printf("scheme              %s\n", scheme_name(rep.scheme));
  std::printf("symmetric_rate      %.6f bits/symbol\n", rep.symmetric_rate);
  std::printf("raw_rate            %.6f\n", rep.raw_rate);
  if (std::isfinite(rep.backhaul_cap)) std::printf("backhaul_cap        %.6f\n", rep.backhaul_cap);
  if (!std::isnan(rep.effective_variance))
    std::printf("effective_variance  %.6g\n", rep.effective_variance);
  if (!std::isnan(rep.entropy_bits)) std::printf("entropy             %.6f bits\n", rep.entropy_bits);
  if (!std::isnan(rep.quantization_penalty))
    std::printf("quantization_penalty %.6f bits\n", rep.quantization_penalty);
  if (!std::isnan(rep.quantization_noise_variance))
    std::printf("sigma_zhat^2        %.6g\n", rep.quantization_noise_variance);
  if (!std::isnan(rep.power_deflation)) std::printf("power_deflation     %.6g\n", rep.power_deflation);
}

int cmd_rate(const std::string& scheme_str, double snr_db, double r0, std::uint64_t p,
             const std::string& sigma2_csv, const std::string& h_csv, const std::string& a_csv,
             const std::string& matrix_path) {
  const Scheme scheme = scheme_from_name(scheme_str);
  const double snr = std::pow(10.0, snr_db / 10.0);

  auto sigma2_list = [&]() -> Eigen::VectorXd {
    if (!sigma2_csv.empty()) return parse_vector(sigma2_csv, "--sigma2");
    if (!h_csv.empty()) {
      const Eigen::VectorXd h = parse_vector(h_csv, "--channel");
      Eigen::VectorXd a;
      if (!a_csv.empty()) {
        a = parse_vector(a_csv, "--coeff");
      } else {
        a = best_coeff_qcof(h, snr, p).cast<double>();
        std::printf("# best a =");
        for (Eigen::Index i = 0; i < a.size(); ++i) std::printf(" %lld", static_cast<long long>(a(i)));
        std::printf("\n");
      }
      Eigen::VectorXd s2(1);
      s2(0) = effective_variance(h, a, snr);
      return s2;
    }
    throw ConfigError("rate: supply --sigma2, or --channel (optionally --coeff), or --matrix");
  };

  switch (scheme) {
    case Scheme::QCoF: {
      const Eigen::VectorXd s2 = sigma2_list();
      const NestedLatticePair pair = NestedLatticePair::from_snr(snr, p);
      RateReport rep;
      rep.scheme = Scheme::QCoF;
      rep.effective_variance = s2(0);
      rep.entropy_bits = discrete_entropy(discrete_noise_pmf({s2(0), pair}));
      rep.raw_rate = std::log2(static_cast<double>(p)) - rep.entropy_bits;
      rep.symmetric_rate = std::max(0.0, rep.raw_rate);
      print_report(rep);
      return 0;
    }
    case Scheme::CoF: {
      const Eigen::VectorXd s2 = sigma2_list();
      RateReport rep;
      rep.scheme = Scheme::CoF;
      rep.effective_variance = s2(0);
      rep.raw_rate = 0.5 * std::log2(snr / s2(0));
      rep.symmetric_rate = std::max(0.0, rep.raw_rate);
      print_report(rep);
      return 0;
    }
    case Scheme::RQCoF: {
      print_report(rate_rqcof(sigma2_list(), NestedLatticePair::from_snr(snr, p), r0));
      return 0;
    }
    case Scheme::RCoF: {
      print_report(rate_rcof(sigma2_list(), snr, r0));
      return 0;
    }
    default: {
      if (matrix_path.empty()) throw ConfigError("rate: IFBF/CIFBF schemes need --matrix");
      const Eigen::MatrixXd h = read_matrix(matrix_path);
      const IntegerCoeffMatrix coeffs = ifbf_coeffs(h, p);
      if (scheme == Scheme::IFBF_RQCoF || scheme == Scheme::IFBF_RCoF)
        print_report(rate_ifbf(h, coeffs.a_rows, snr, p, scheme));
      else
        print_report(rate_cifbf(h, coeffs.a_rows, snr, p, r0, scheme));
      return 0;
    }
  }
}

int cmd_select(const std::string& input, bool brute) {
  std::ifstream file(input);
  if (!file) throw IoError("cannot open instance file '" + input + "'");
  std::uint64_t p = 0;
  Eigen::Index slots = 0;
  if (!(file >> p >> slots)) throw IoError("instance file: first line must be 'p L'");
  std::vector<double> sig;
  std::vector<std::vector<std::uint64_t>> rows;
  double s;
  while (file >> s) {
    std::vector<std::uint64_t> row(static_cast<std::size_t>(slots));
    for (auto& v : row)
      if (!(file >> v)) throw IoError("instance file: truncated row");
    sig.push_back(s);
    rows.push_back(std::move(row));
  }
  SelectionInstance inst;
  inst.p = p;
  inst.num_slots = slots;
  inst.q_rows.resize(static_cast<Eigen::Index>(rows.size()), slots);
  inst.sigma2.resize(static_cast<Eigen::Index>(sig.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    inst.sigma2(static_cast<Eigen::Index>(i)) = sig[i];
    for (Eigen::Index j = 0; j < slots; ++j)
      inst.q_rows(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)] % p;
  }

  const SelectionResult res = brute ? brute_force_select(inst) : greedy_select(inst);
  if (!res.feasible) {
    std::printf("infeasible\n");
    return 0;
  }
  std::printf("chosen (1-based):");
  for (Eigen::Index k : res.chosen) std::printf(" %lld", static_cast<long long>(k + 1));
  std::printf("\nobjective (max sigma^2): %.10g\n", res.objective);
  return 0;
}

int cmd_reduce(const std::string& input, double delta) {
  const Eigen::MatrixXd g = read_matrix(input);
  const LllResult res = lll_reduce(LatticeBasis(g), delta);
  std::printf("# reduced basis (columns generate the lattice)\n");
  for (Eigen::Index i = 0; i < res.basis.rows(); ++i) {
    for (Eigen::Index j = 0; j < res.basis.cols(); ++j)
      std::printf("%s%.12g", j ? " " : "", res.basis(i, j));
    std::printf("\n");
  }
  std::printf("# unimodular transform U (basis = input * U)\n");
  for (Eigen::Index i = 0; i < res.unimodular.rows(); ++i) {
    for (Eigen::Index j = 0; j < res.unimodular.cols(); ++j)
      std::printf("%s%lld", j ? " " : "", res.unimodular(i, j));
    std::printf("\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"downlink compute-and-forward simulation toolkit"};
  app.require_subcommand(1);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a Monte Carlo rate sweep from a config file");
  std::string config_path, out_override, overlay_path;
  std::vector<std::string> scheme_override;
  std::int64_t seed_override = -1, trials_override = -1;
  sweep->add_option("--config", config_path, "experiment config file")->required();
  sweep->add_option("--seed", seed_override, "override experiment.seed");
  sweep->add_option("--trials", trials_override, "override experiment.trials");
  sweep->add_option("--out", out_override, "override output.path");
  sweep->add_option("--scheme", scheme_override, "override experiment.schemes");
  sweep->add_option("--overlay", overlay_path, "CSV with externally computed reference curves");

  // rate
  auto* rate = app.add_subcommand("rate", "single-point analytic rate query");
  std::string rate_scheme, sigma2_csv, h_csv, a_csv, matrix_path;
  double rate_snr_db = 20.0, rate_r0 = std::numeric_limits<double>::infinity();
  std::uint64_t rate_p = 251;
  rate->add_option("--scheme", rate_scheme, "QCoF|CoF|RQCoF|RCoF|IFBF_*|CIFBF_*")->required();
  rate->add_option("--snr-db", rate_snr_db, "SNR in dB")->required();
  rate->add_option("--p", rate_p, "field size (prime)");
  rate->add_option("--r0", rate_r0, "backhaul rate in bits");
  rate->add_option("--sigma2", sigma2_csv, "effective noise variance(s), comma separated");
  rate->add_option("--channel", h_csv, "channel row, comma separated");
  rate->add_option("--coeff", a_csv, "integer coefficients, comma separated");
  rate->add_option("--matrix", matrix_path, "whitespace-separated channel matrix file (IFBF/CIFBF)");

  // select
  auto* select = app.add_subcommand("select", "greedy or brute-force user selection on an instance file");
  std::string select_input;
  bool select_brute = false;
  select->add_option("--input", select_input, "instance file: 'p L' then lines 'sigma2 q1 .. qL'")
      ->required();
  select->add_flag("--brute", select_brute, "exhaustive search instead of greedy");

  // reduce
  auto* reduce = app.add_subcommand("reduce", "LLL-reduce the lattice generated by a matrix's columns");
  std::string reduce_input;
  double reduce_delta = 0.75;
  reduce->add_option("--input", reduce_input, "whitespace-separated matrix file")->required();
  reduce->add_option("--delta", reduce_delta, "Lovasz parameter in (1/4, 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*sweep) {
      dascof::ExperimentSpec spec = dascof::load_config(config_path);
      if (seed_override >= 0) spec.seed = static_cast<std::uint64_t>(seed_override);
      if (trials_override >= 0) spec.trials = static_cast<Eigen::Index>(trials_override);
      if (!out_override.empty()) spec.out_path = out_override;
      if (!scheme_override.empty()) {
        spec.schemes.clear();
        for (const std::string& name : scheme_override)
          spec.schemes.push_back(dascof::scheme_from_name(name));
      }
      spec.validate();
      if (spec.out_path.empty())
        throw dascof::ConfigError("output.path: set it in the config or pass --out");
      dascof::CurveSet curves = dascof::run_sweep(spec);
      if (!overlay_path.empty()) curves.overlays = dascof::read_overlay_csv(overlay_path);
      dascof::emit_csv(curves, spec.out_path);
      std::printf("wrote %s (%zu curve points)\n", spec.out_path.c_str(), curves.points.size());
      return 0;
    }
    if (*rate)
      return cmd_rate(rate_scheme, rate_snr_db, rate_r0, rate_p, sigma2_csv, h_csv, a_csv, matrix_path);
    if (*select) return cmd_select(select_input, select_brute);
    if (*reduce) return cmd_reduce(reduce_input, reduce_delta);
  } catch (const dascof::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
